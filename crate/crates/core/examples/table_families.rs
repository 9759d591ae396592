//! The fifteen built-in families and their first few terms.

use qfib::catalog::builtin_families;
use qfib::sequences::window;

fn main() {
    for spec in builtin_families() {
        let b = spec.b().map_or("-".to_string(), |b| b.to_string());
        println!(
            "{} ({}): a = {}, b = {b}, c = {}, d = {}",
            spec.name(),
            spec.kind(),
            spec.a(),
            spec.c(),
            spec.d()
        );
        for (n, t) in window(&spec, 0, 5).unwrap().iter() {
            println!("    {n}: {t}");
        }
    }
}

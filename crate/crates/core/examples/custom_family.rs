//! A user-defined family loaded from JSON and checked like a built-in one.

use qfib::catalog::{load_families, to_json, FamilyPair};
use qfib::identities::{check_lf_link, check_mixed_docagne, run_suite, summarize, Bounds};
use qfib::sequences::window;

const FAMILIES: &str = r#"[
  {"name": "odd-lucas", "kind": "lucas", "a": "3/2", "b": "x^2 - 1", "c": "x + 1/3", "d": "-2*x"},
  {"name": "odd-fib", "kind": "fibonacci", "a": "3/2", "c": "x + 1/3", "d": "-2*x"}
]"#;

fn main() {
    let specs = load_families(FAMILIES).unwrap();
    for spec in &specs {
        println!("{}:", spec.name());
        for (n, t) in window(spec, 0, 4).unwrap().iter() {
            println!("    {n}: {t}");
        }
    }

    let pair = FamilyPair::from_parts(specs[0].clone(), specs[1].clone()).unwrap();
    for r in check_lf_link(&pair, 15) {
        println!("{} {} {}", r.identity, r.status, r.range);
    }
    let r = check_mixed_docagne(&pair, 12);
    println!("{} {} {}", r.identity, r.status, r.range);

    let s = summarize(&run_suite(&specs, &Bounds::new(12, 12, 3)));
    println!("{} PASS, {} FAIL, {} SKIPPED", s.pass, s.fail, s.skipped);

    // bad input is reported with the family and field at fault
    let bad = r#"[{"name": "broken", "kind": "fibonacci", "a": "1", "c": "x +", "d": "1"}]"#;
    println!("{}", load_families(bad).unwrap_err());

    println!("{}", to_json(&specs));
}

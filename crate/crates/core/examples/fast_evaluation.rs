//! Exact numeric evaluation of one far-out term: forward iteration against
//! matrix powers, with operation counts.

use std::time::Instant;

use qfib::catalog::builtin;
use qfib::sequences::{eval_term_fast_counted, eval_term_iter_counted, term_iter};
use qfib::Rational;

fn main() {
    let x0 = Rational::new(3, 2).unwrap();
    let spec = builtin("fermat-lucas").unwrap();
    let symbolic = term_iter(&spec, 40).eval(&x0);
    let (fast, _) = eval_term_fast_counted(&spec, 40, &x0);
    assert_eq!(symbolic, fast);
    println!("fermat-lucas L_40(3/2) = {fast}");

    let fib = builtin("fibonacci").unwrap();
    for n in [1_000u64, 10_000, 100_000] {
        let t = Instant::now();
        let (a, it) = eval_term_iter_counted(&fib, n, &Rational::one());
        let t_iter = t.elapsed();
        let t = Instant::now();
        let (b, mp) = eval_term_fast_counted(&fib, n, &Rational::one());
        let t_fast = t.elapsed();
        assert_eq!(a, b);
        println!(
            "n={n:>6}: {} digits; iter {:?} ({} muls), matpow {:?} ({} products, {} muls)",
            a.numer().to_string().len(),
            t_iter,
            it.scalar_muls,
            t_fast,
            mp.matrix_products(),
            mp.scalar_muls
        );
    }
}

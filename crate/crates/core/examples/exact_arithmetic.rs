//! Exact rationals and binomial coefficients.

use qfib::exactnum::{binomial, Rational};

fn main() {
    let a: Rational = "-6/4".parse().unwrap();
    let b = Rational::new(1, 3).unwrap();
    println!("a = {a}, b = {b}");
    println!("a + b = {}", &a + &b);
    println!("a * b = {}", &a * &b);
    println!("a / b = {}", a.checked_div(&b).unwrap());
    println!("b^10 = {}", b.pow(10));
    println!("1/0 -> {}", Rational::zero().recip().unwrap_err());

    for n in [10u64, 50, 100] {
        println!("C({n}, {}) = {}", n / 2, binomial(n, n / 2).unwrap());
    }
}

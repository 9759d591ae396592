//! Parsing, printing and evaluating polynomials in `x`.

use qfib::polyparse::parse_poly;
use qfib::{Poly, Rational};

fn main() {
    for src in ["x^4 + 3*x^2 + 1", "-(x^2 - 1/2)", "2x*(x+1)^3", "(x + 2)*(x - 2)"] {
        let p = parse_poly(src).unwrap();
        println!("{src:>18}  ->  {p}   degree {}", p.degree());
    }

    let p = parse_poly("x^3 - 2*x + 1/4").unwrap();
    let half = Rational::new(1, 2).unwrap();
    println!("p(1/2) = {}", p.eval(&half));
    println!("p^2 = {}", p.pow(2));
    println!("p as JSON = {}", serde_json::to_string(&p).unwrap());

    // errors carry a character position
    for bad in ["x^", "3/0", "x2", "(x + 1"] {
        println!("{bad:>8}: {}", parse_poly(bad).unwrap_err());
    }

    assert_eq!(&(Poly::x() + Poly::one()) * &(Poly::x() - Poly::one()), parse_poly("x^2 - 1").unwrap());
}

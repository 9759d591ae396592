//! Powers of `Q(x) = [[c, d], [1, 0]]` and the scaled inverse `(-d)^m Q^{-m}`.

use qfib::catalog::builtin;
use qfib::qmatrix::{q_of, qpow_neg_scaled, Mat2};
use qfib::sequences::{fib_via_qpow, term_iter};

fn main() {
    let pell = builtin("pell").unwrap();
    let q = q_of(&pell);
    for n in 0..=4 {
        let qn = q.pow(n);
        println!("Q^{n} = {qn}   det = {}", qn.det());
    }

    // read terms off the matrix and compare with iteration
    for n in [10, 50] {
        assert_eq!(fib_via_qpow(&pell, n).unwrap(), term_iter(&pell, n));
    }
    println!("P_10 = {}", fib_via_qpow(&pell, 10).unwrap());

    let m = 3;
    let inv = qpow_neg_scaled(&pell, m);
    println!("(-d)^{m} Q^-{m} = {inv}");
    let check = &q.pow(m) * &inv;
    assert_eq!(check, Mat2::scalar((-pell.d()).pow(m as u32)));
    println!("Q^{m} * that = {check}");
}

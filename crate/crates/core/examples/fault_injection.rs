//! Claim wrong parameters for a family's terms and watch the checkers object.

use qfib::catalog::builtin;
use qfib::identities::{recheck, run_subjects, Bounds, IdentityId, Status, Subject};
use qfib::{Poly, Rational};

fn main() {
    let truth = builtin("pell-lucas").unwrap();
    let two = Rational::from(2);
    let mutants = [
        ("a", truth.with_a(truth.a() * &two).unwrap()),
        ("b", truth.with_b(truth.b().unwrap().scale(&two)).unwrap()),
        ("c", truth.with_c(truth.c().scale(&two)).unwrap()),
        ("d", truth.with_d(Poly::from_ints(&[2])).unwrap()),
    ];
    for (field, claimed) in mutants {
        let subject = Subject::with_data(claimed, truth.clone());
        let reports = run_subjects(std::slice::from_ref(&subject), &IdentityId::ALL, &Bounds::new(10, 10, 3));
        let failed: Vec<_> = reports.iter().filter(|r| r.status == Status::Fail).collect();
        println!("{field} doubled: {} identities fail", failed.len());
        if let Some(r) = failed.first() {
            let cx = r.counterexample.as_ref().unwrap();
            println!("    {} {cx}", r.identity);
            println!("    reproduces from scratch: {}", recheck(r, &subject));
        }
    }
}

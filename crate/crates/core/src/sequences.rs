//! Sequence terms: symbolic generation by forward iteration or by powers of
//! `Q(x)`, and exact numeric evaluation of a single term at a rational point.
//!
//! The two symbolic routes share no code: [`term_iter`] and [`window`] only
//! ever apply the recurrence, while
//! [`fib_via_qpow`] and [`lucas_from_fib`] only read entries of `Q^n`:
//!
//! ```text
//! Q^n = [[F_{n+1}/a, d F_n/a], [F_n/a, d F_{n-1}/a]]
//! L_n = (b/a) F_n + d F_{n-1}
//! ```

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Zero};

use crate::catalog::{FamilyPair, FamilySpec, Kind};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::poly::Poly;
use crate::qmatrix::{q_of, Mat2};

/// Above this index a single-term query defaults to the matrix route.
pub const MATPOW_THRESHOLD: u64 = 64;

/// `n`-th term by forward iteration from the family's initial pair.
pub fn term_iter(spec: &FamilySpec, n: u64) -> Poly {
    let (mut prev, mut cur) = spec.initial_terms();
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = &(spec.c() * &cur) + &(spec.d() * &prev);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Consecutive terms `lo..=hi` of one family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqWindow {
    pub spec: FamilySpec,
    pub lo: u64,
    pub terms: Vec<Poly>,
}

impl SeqWindow {
    pub fn hi(&self) -> u64 {
        self.lo + self.terms.len() as u64 - 1
    }

    /// Term `n`, if it lies inside the window.
    pub fn get(&self, n: u64) -> Option<&Poly> {
        n.checked_sub(self.lo)
            .and_then(|i| self.terms.get(usize::try_from(i).ok()?))
    }

    /// Term `n`; panics outside the window.
    pub fn term(&self, n: u64) -> &Poly {
        self.get(n).unwrap_or_else(|| {
            panic!(
                "index {n} outside window {}..={} of `{}`",
                self.lo,
                self.hi(),
                self.spec.name()
            )
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Poly)> {
        (self.lo..).zip(self.terms.iter())
    }
}

/// Terms `lo..=hi` in a single forward pass.
pub fn window(spec: &FamilySpec, lo: u64, hi: u64) -> Result<SeqWindow> {
    if lo > hi {
        return Err(Error::Domain(format!("empty index range {lo}..={hi}")));
    }
    let (mut prev, mut cur) = spec.initial_terms();
    let mut terms = Vec::with_capacity((hi - lo + 1) as usize);
    for n in 0..=hi {
        if n >= lo {
            terms.push(prev.clone());
        }
        let next = &(spec.c() * &cur) + &(spec.d() * &prev);
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(SeqWindow {
        spec: spec.clone(),
        lo,
        terms,
    })
}

/// `F_n = a * (Q^n)_{21}` for a Fibonacci-type family.
pub fn fib_via_qpow(spec: &FamilySpec, n: u64) -> Result<Poly> {
    if spec.kind() != Kind::Fibonacci {
        return Err(spec.wrong_kind(Kind::Fibonacci).into());
    }
    if n == 0 {
        return Ok(Poly::zero());
    }
    Ok(q_of(spec).pow(n).e21.scale(spec.a()))
}

/// `L_n = (b/a) F_n + d F_{n-1}`, with `F_n = a (Q^n)_{21}` and
/// `d F_{n-1} = a (Q^n)_{22}` read off one matrix power. Defined for `n >= 1`.
pub fn lucas_from_fib(pair: &FamilyPair, n: u64) -> Result<Poly> {
    if n == 0 {
        return Err(Error::Domain(
            "lucas_from_fib needs n >= 1 (F_{-1} is undefined)".into(),
        ));
    }
    let fib = &pair.fib;
    let b = pair.lucas.b().expect("lucas-type family has b");
    let qn = q_of(fib).pow(n);
    let f_n = qn.e21.scale(fib.a());
    let d_f_prev = qn.e22.scale(fib.a());
    let b_over_a = b.scale(&fib.a().recip().expect("a is nonzero"));
    Ok(&(&b_over_a * &f_n) + &d_f_prev)
}

/// `n`-th term through the matrix route, for either kind.
pub fn term_matpow(spec: &FamilySpec, n: u64) -> Poly {
    match spec.kind() {
        Kind::Fibonacci => fib_via_qpow(spec, n).expect("kind checked"),
        Kind::Lucas if n == 0 => Poly::constant(spec.a().clone()),
        Kind::Lucas => {
            let pair = FamilyPair::new(spec.clone()).expect("kind checked");
            lucas_from_fib(&pair, n).expect("n >= 1")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Forward recurrence.
    Iter,
    /// Powers of `Q`.
    MatPow,
}

impl Method {
    /// Sweeps iterate; a single term past [`MATPOW_THRESHOLD`] uses matrix powers.
    pub fn default_for(lo: u64, hi: u64) -> Method {
        if lo == hi && hi > MATPOW_THRESHOLD {
            Method::MatPow
        } else {
            Method::Iter
        }
    }
}

/// Terms `lo..=hi` computed with the given method.
pub fn terms(spec: &FamilySpec, lo: u64, hi: u64, method: Method) -> Result<Vec<Poly>> {
    match method {
        Method::Iter => Ok(window(spec, lo, hi)?.terms),
        Method::MatPow => {
            if lo > hi {
                return Err(Error::Domain(format!("empty index range {lo}..={hi}")));
            }
            Ok((lo..=hi).map(|n| term_matpow(spec, n)).collect())
        }
    }
}

/// Operation counts of one numeric matrix power.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatPowStats {
    pub squarings: u32,
    pub multiplies: u32,
    /// Big-integer multiplications, eight per 2x2 product.
    pub scalar_muls: u64,
}

impl MatPowStats {
    pub fn matrix_products(&self) -> u32 {
        self.squarings + self.multiplies
    }
}

/// Operation counts of one numeric forward iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IterStats {
    pub steps: u64,
    pub scalar_muls: u64,
}

#[derive(Clone)]
struct IntMat2([BigInt; 4]);

impl IntMat2 {
    fn identity() -> Self {
        IntMat2([BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()])
    }

    fn mul(&self, rhs: &IntMat2, stats: &mut MatPowStats) -> IntMat2 {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &rhs.0;
        stats.scalar_muls += 8;
        IntMat2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    fn pow(&self, n: u64, stats: &mut MatPowStats) -> IntMat2 {
        if n == 0 {
            return IntMat2::identity();
        }
        let mut acc = self.clone();
        for bit in (0..63 - n.leading_zeros()).rev() {
            acc = acc.mul(&acc, stats);
            stats.squarings += 1;
            if (n >> bit) & 1 == 1 {
                acc = acc.mul(self, stats);
                stats.multiplies += 1;
            }
        }
        acc
    }
}

/// `c(x0)` and `d(x0)` as `(C, E, s)` with `C = s c(x0)`, `E = s d(x0)`
/// integers, `s` the least common denominator.
fn scaled_step(spec: &FamilySpec, x0: &Rational) -> (BigInt, BigInt, BigInt) {
    let c0 = spec.c().eval(x0);
    let d0 = spec.d().eval(x0);
    let s = c0.denom().lcm(d0.denom());
    let c_s = c0.numer() * (&s / c0.denom());
    let d_s = d0.numer() * (&s / d0.denom());
    (c_s, d_s, s)
}

/// `G_n(x0)` exactly via a numeric power of `Q(x0)`, with operation counts.
///
/// All work happens on the integer matrix `s Q(x0)`; the one division by
/// `s^n` happens at the end. Lucas-type terms use
/// `L_n = b(x0) (Q^n)_{21} + a (Q^n)_{22}`.
pub fn eval_term_fast_counted(spec: &FamilySpec, n: u64, x0: &Rational) -> (Rational, MatPowStats) {
    let (c_s, d_s, s) = scaled_step(spec, x0);
    let m = IntMat2([c_s, d_s, s.clone(), BigInt::zero()]);
    let mut stats = MatPowStats::default();
    let [_, _, m21, m22] = m.pow(n, &mut stats).0;
    let scale = Rational::new(BigInt::one(), num_traits::pow(s, n as usize)).expect("s > 0");
    let value = match spec.b() {
        None => spec.a() * &Rational::from_integer(m21),
        Some(b) => &(&b.eval(x0) * &Rational::from_integer(m21)) + &(spec.a() * &Rational::from_integer(m22)),
    };
    (&value * &scale, stats)
}

pub fn eval_term_fast(spec: &FamilySpec, n: u64, x0: &Rational) -> Rational {
    eval_term_fast_counted(spec, n, x0).0
}

/// `G_n(x0)` exactly by numeric forward iteration, with operation counts.
///
/// Tracks `H_k = D s^k G_k(x0)`, which obeys the integer recurrence
/// `H_k = C H_{k-1} + s E H_{k-2}`.
pub fn eval_term_iter_counted(spec: &FamilySpec, n: u64, x0: &Rational) -> (Rational, IterStats) {
    let (c_s, d_s, s) = scaled_step(spec, x0);
    let e_ss = &d_s * &s;
    let (g0, g1) = match spec.b() {
        None => (Rational::zero(), spec.a().clone()),
        Some(b) => (spec.a().clone(), b.eval(x0)),
    };
    let dd = g0.denom().lcm(g1.denom());
    let mut prev = g0.numer() * (&dd / g0.denom());
    let mut cur = g1.numer() * (&dd / g1.denom()) * &s;
    let mut stats = IterStats::default();
    let top = if n == 0 {
        prev
    } else {
        for _ in 1..n {
            let next = &c_s * &cur + &e_ss * &prev;
            prev = std::mem::replace(&mut cur, next);
            stats.steps += 1;
            stats.scalar_muls += 2;
        }
        cur
    };
    let den = dd * num_traits::pow(s, n as usize);
    (Rational::new(top, den).expect("positive denominator"), stats)
}

pub fn eval_term_iter(spec: &FamilySpec, n: u64, x0: &Rational) -> Rational {
    eval_term_iter_counted(spec, n, x0).0
}

/// `Q^n` for the family.
pub fn q_power(spec: &FamilySpec, n: u64) -> Mat2 {
    q_of(spec).pow(n)
}

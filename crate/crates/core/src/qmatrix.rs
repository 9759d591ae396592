//! 2x2 matrices over [`Poly`]: the companion matrix `Q(x) = [[c, d], [1, 0]]`,
//! its powers, and the adjugate-scaled inverse powers `(-d)^m Q^{-m}`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::Serialize;

use crate::catalog::FamilySpec;
use crate::poly::Poly;

/// Row-major 2x2 polynomial matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct Mat2 {
    pub e11: Poly,
    pub e12: Poly,
    pub e21: Poly,
    pub e22: Poly,
}

impl Mat2 {
    pub fn new(e11: Poly, e12: Poly, e21: Poly, e22: Poly) -> Self {
        Mat2 { e11, e12, e21, e22 }
    }

    pub fn identity() -> Self {
        Self::scalar(Poly::one())
    }

    pub fn zero() -> Self {
        Self::scalar(Poly::zero())
    }

    /// `s * I`
    pub fn scalar(s: Poly) -> Self {
        Mat2::new(s.clone(), Poly::zero(), Poly::zero(), s)
    }

    pub fn det(&self) -> Poly {
        &(&self.e11 * &self.e22) - &(&self.e12 * &self.e21)
    }

    /// `[[e22, -e12], [-e21, e11]]`, so that `A * adj(A) = det(A) * I`.
    pub fn adjugate(&self) -> Self {
        Mat2::new(
            self.e22.clone(),
            -&self.e12,
            -&self.e21,
            self.e11.clone(),
        )
    }

    /// Every entry multiplied by `s`.
    pub fn scale(&self, s: &Poly) -> Self {
        Mat2::new(&self.e11 * s, &self.e12 * s, &self.e21 * s, &self.e22 * s)
    }

    /// `self^n` by left-to-right square-and-multiply; `A^0 = I`.
    pub fn pow(&self, n: u64) -> Self {
        if n == 0 {
            return Mat2::identity();
        }
        let mut acc = self.clone();
        for bit in (0..63 - n.leading_zeros()).rev() {
            acc = &acc * &acc;
            if (n >> bit) & 1 == 1 {
                acc = &acc * self;
            }
        }
        acc
    }

    pub fn entries(&self) -> [&Poly; 4] {
        [&self.e11, &self.e12, &self.e21, &self.e22]
    }
}

impl<'a> Mul<&'a Mat2> for &'a Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            &(&self.e11 * &rhs.e11) + &(&self.e12 * &rhs.e21),
            &(&self.e11 * &rhs.e12) + &(&self.e12 * &rhs.e22),
            &(&self.e21 * &rhs.e11) + &(&self.e22 * &rhs.e21),
            &(&self.e21 * &rhs.e12) + &(&self.e22 * &rhs.e22),
        )
    }
}

impl<'a> Add<&'a Mat2> for &'a Mat2 {
    type Output = Mat2;

    fn add(self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            &self.e11 + &rhs.e11,
            &self.e12 + &rhs.e12,
            &self.e21 + &rhs.e21,
            &self.e22 + &rhs.e22,
        )
    }
}

impl<'a> Sub<&'a Mat2> for &'a Mat2 {
    type Output = Mat2;

    fn sub(self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            &self.e11 - &rhs.e11,
            &self.e12 - &rhs.e12,
            &self.e21 - &rhs.e21,
            &self.e22 - &rhs.e22,
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.e11, self.e12, self.e21, self.e22
        )
    }
}

/// `Q(x) = [[c(x), d(x)], [1, 0]]` for the family's recurrence.
pub fn q_of(spec: &FamilySpec) -> Mat2 {
    Mat2::new(spec.c().clone(), spec.d().clone(), Poly::one(), Poly::zero())
}

pub fn mat_pow(a: &Mat2, n: u64) -> Mat2 {
    a.pow(n)
}

/// `(-d)^m * Q^{-m}`, kept inside the polynomial ring.
///
/// Since `det Q = -d`, this is the adjugate of `Q^m`, which equals
/// `adj(Q)^m = [[0, -d], [-1, c]]^m`. It is computed from the second form so
/// it does not share a code path with `Q^m`. A valid spec always has a
/// nonzero `d`, which is what makes `Q` invertible over the rational functions.
pub fn qpow_neg_scaled(spec: &FamilySpec, m: u64) -> Mat2 {
    q_of(spec).adjugate().pow(m)
}

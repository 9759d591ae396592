//! Exact checkers for the Fibonacci-, Lucas- and mixed-type identities.
//!
//! Each identity is one formula evaluated over a source of terms. A sweep uses
//! a cached source; [`recheck`] rebuilds every term from scratch through
//! different code paths. Inside a source, sequence terms come from forward
//! iteration of the *data* spec, while parameters, `Q`-powers and the terms
//! read off `Q`-powers come from the *claimed* spec. For an honest
//! [`Subject`] the two specs coincide; a subject whose claimed parameters
//! disagree with its data is how faults are injected.
//!
//! | id | statement | range |
//! |----|-----------|-------|
//! | `FIB_MATRIX` | `Q^n = [[F_{n+1}/a, dF_n/a], [F_n/a, dF_{n-1}/a]]` | `1 <= n` |
//! | `FIB_CASSINI` | `F_n^2 - F_{n+1}F_{n-1} = a^2 (-d)^{n-1}` | `1 <= n` |
//! | `FIB_CASSINI_EXPANDED` | `F_n^2 - cF_nF_{n-1} - dF_{n-1}^2 = a^2 (-d)^{n-1}` | `1 <= n` |
//! | `FIB_HONSBERGER` | `aF_{n+m} = F_nF_{m+1} + dF_{n-1}F_m` | `1 <= n`, `0 <= m` |
//! | `FIB_DOUBLE_INDEX` | `aF_{2n-1} = F_n^2 + dF_{n-1}^2` | `1 <= n` |
//! | `FIB_DOCAGNE` | `a(-d)^m F_{n-m} = F_nF_{m+1} - F_{n+1}F_m` | `0 <= m <= n` |
//! | `FIB_BINOMIAL` | `F_{2n+p} = sum_j C(n,j) c^j d^{n-j} F_{j+p}` | `0 <= n`, `1 <= p` |
//! | `Q_SQUARE` | `Q^2 = cQ + dI` | none |
//! | `LF_LINK_A` | `L_n = (b/a)F_n + dF_{n-1}` | `1 <= n` |
//! | `LF_LINK_B` | `L_n = ((bc+ad)/a)F_{n-1} + (bd/a)F_{n-2}` | `2 <= n` |
//! | `LUCAS_MATRIX` | `[[L_{n+2}, dL_{n+1}], [L_{n+1}, dL_n]] = [[L_2, dL_1], [L_1, dL_0]] Q^n` | `0 <= n` |
//! | `LUCAS_CASSINI` | `L_{n+2}L_n - L_{n+1}^2 = (L_2L_0 - L_1^2)(-d)^n` | `0 <= n` |
//! | `LUCAS_CASSINI_EXPANDED` | `cL_{n+1}L_n + dL_n^2 - L_{n+1}^2 = (L_2L_0 - L_1^2)(-d)^n` | `0 <= n` |
//! | `LUCAS_BINOMIAL` | `L_{2n+p} = sum_j C(n,j) c^j d^{n-j} L_{p+j}` | `0 <= n`, `0 <= p` |
//! | `MIXED_HONSBERGER` | `aL_{n+m} = L_{n+1}F_m + dL_nF_{m-1}` | `0 <= n`, `1 <= m` |
//! | `MIXED_DOCAGNE` | `a(-d)^m L_{n-m} = L_nF_{m+1} - L_{n+1}F_m` | `0 <= m <= n` |
//!
//! In the mixed rows `F` is the companion Fibonacci-type sequence with the
//! same `a`, `c`, `d`. Upper bounds come from [`Bounds`].

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{companion_fib, FamilyPair, FamilySpec, Kind};
use crate::exactnum::{binomial, Rational};
use crate::poly::Poly;
use crate::qmatrix::{mat_pow, q_of, Mat2};
use crate::sequences::{fib_via_qpow, term_iter, term_matpow, window, SeqWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IdentityId {
    FibMatrix,
    FibCassini,
    FibCassiniExpanded,
    FibHonsberger,
    FibDoubleIndex,
    FibDocagne,
    FibBinomial,
    QSquare,
    LfLinkA,
    LfLinkB,
    LucasMatrix,
    LucasCassini,
    LucasCassiniExpanded,
    LucasBinomial,
    MixedHonsberger,
    MixedDocagne,
}

/// Which families an identity applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Applies {
    Fibonacci,
    Lucas,
    /// A Lucas-type family together with its companion.
    Pair,
    Any,
}

impl IdentityId {
    pub const ALL: [IdentityId; 16] = [
        IdentityId::FibMatrix,
        IdentityId::FibCassini,
        IdentityId::FibCassiniExpanded,
        IdentityId::FibHonsberger,
        IdentityId::FibDoubleIndex,
        IdentityId::FibDocagne,
        IdentityId::FibBinomial,
        IdentityId::QSquare,
        IdentityId::LfLinkA,
        IdentityId::LfLinkB,
        IdentityId::LucasMatrix,
        IdentityId::LucasCassini,
        IdentityId::LucasCassiniExpanded,
        IdentityId::LucasBinomial,
        IdentityId::MixedHonsberger,
        IdentityId::MixedDocagne,
    ];

    pub fn as_str(self) -> &'static str {
        use IdentityId::*;
        match self {
            FibMatrix => "FIB_MATRIX",
            FibCassini => "FIB_CASSINI",
            FibCassiniExpanded => "FIB_CASSINI_EXPANDED",
            FibHonsberger => "FIB_HONSBERGER",
            FibDoubleIndex => "FIB_DOUBLE_INDEX",
            FibDocagne => "FIB_DOCAGNE",
            FibBinomial => "FIB_BINOMIAL",
            QSquare => "Q_SQUARE",
            LfLinkA => "LF_LINK_A",
            LfLinkB => "LF_LINK_B",
            LucasMatrix => "LUCAS_MATRIX",
            LucasCassini => "LUCAS_CASSINI",
            LucasCassiniExpanded => "LUCAS_CASSINI_EXPANDED",
            LucasBinomial => "LUCAS_BINOMIAL",
            MixedHonsberger => "MIXED_HONSBERGER",
            MixedDocagne => "MIXED_DOCAGNE",
        }
    }

    pub fn applies(self) -> Applies {
        use IdentityId::*;
        match self {
            FibMatrix | FibCassini | FibCassiniExpanded | FibHonsberger | FibDoubleIndex
            | FibDocagne | FibBinomial => Applies::Fibonacci,
            QSquare => Applies::Any,
            LucasCassini | LucasCassiniExpanded | LucasBinomial => Applies::Lucas,
            LfLinkA | LfLinkB | LucasMatrix | MixedHonsberger | MixedDocagne => Applies::Pair,
        }
    }

    pub fn applies_to(self, kind: Kind) -> bool {
        match self.applies() {
            Applies::Any => true,
            Applies::Fibonacci => kind == Kind::Fibonacci,
            Applies::Lucas | Applies::Pair => kind == Kind::Lucas,
        }
    }

    /// The statement in plain text, with the family's own parameters left symbolic.
    pub fn formula(self) -> &'static str {
        use IdentityId::*;
        match self {
            FibMatrix => "Q^n = [[F_(n+1)/a, d*F_n/a], [F_n/a, d*F_(n-1)/a]]",
            FibCassini => "F_n^2 - F_(n+1)*F_(n-1) = a^2*(-d)^(n-1)",
            FibCassiniExpanded => "F_n^2 - c*F_n*F_(n-1) - d*F_(n-1)^2 = a^2*(-d)^(n-1)",
            FibHonsberger => "a*F_(n+m) = F_n*F_(m+1) + d*F_(n-1)*F_m",
            FibDoubleIndex => "a*F_(2n-1) = F_n^2 + d*F_(n-1)^2",
            FibDocagne => "a*(-d)^m*F_(n-m) = F_n*F_(m+1) - F_(n+1)*F_m",
            FibBinomial => "F_(2n+p) = sum_j C(n,j)*c^j*d^(n-j)*F_(j+p)",
            QSquare => "Q^2 = c*Q + d*I",
            LfLinkA => "L_n = (b/a)*F_n + d*F_(n-1)",
            LfLinkB => "L_n = ((b*c + a*d)/a)*F_(n-1) + (b*d/a)*F_(n-2)",
            LucasMatrix => "[[L_(n+2), d*L_(n+1)], [L_(n+1), d*L_n]] = [[L_2, d*L_1], [L_1, d*L_0]]*Q^n",
            LucasCassini => "L_(n+2)*L_n - L_(n+1)^2 = (L_2*L_0 - L_1^2)*(-d)^n",
            LucasCassiniExpanded => "c*L_(n+1)*L_n + d*L_n^2 - L_(n+1)^2 = (L_2*L_0 - L_1^2)*(-d)^n",
            LucasBinomial => "L_(2n+p) = sum_j C(n,j)*c^j*d^(n-j)*L_(p+j)",
            MixedHonsberger => "a*L_(n+m) = L_(n+1)*F_m + d*L_n*F_(m-1)",
            MixedDocagne => "a*(-d)^m*L_(n-m) = L_n*F_(m+1) - L_(n+1)*F_m",
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown identity `{0}`")]
pub struct UnknownIdentity(pub String);

impl FromStr for IdentityId {
    type Err = UnknownIdentity;

    /// Case-insensitive; `-` is accepted for `_`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_uppercase().replace('-', "_");
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == wanted)
            .ok_or_else(|| UnknownIdentity(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        })
    }
}

/// Inclusive bounds of each swept index.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRange {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<[u64; 2]>,
    /// For the d'Ocagne identities `m` is further capped by `n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<[u64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<[u64; 2]>,
}

impl fmt::Display for IndexRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [("n", self.n), ("m", self.m), ("p", self.p)]
            .into_iter()
            .filter_map(|(name, r)| r.map(|[lo, hi]| format!("{name}={lo}..{hi}")))
            .collect();
        if parts.is_empty() {
            f.write_str("-")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub indices: BTreeMap<String, u64>,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at: Vec<String> = self.indices.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "at {}: lhs = {}, rhs = {}", at.join(" "), self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: IdentityId,
    pub family: String,
    pub range: IndexRange,
    pub status: Status,
    pub counterexample: Option<Counterexample>,
    /// Why a combination was skipped.
    pub reason: Option<String>,
    /// The statement, with the right-hand side instantiated where it is a
    /// closed form in the family's parameters.
    pub formula: String,
}

/// Upper bounds of the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_n: u64,
    pub max_m: u64,
    pub max_p: u64,
    /// Sweep `p = 0` in `FIB_BINOMIAL` as well.
    pub include_p_zero: bool,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_n: 30,
            max_m: 30,
            max_p: 5,
            include_p_zero: false,
        }
    }
}

impl Bounds {
    pub fn new(max_n: u64, max_m: u64, max_p: u64) -> Self {
        Bounds {
            max_n,
            max_m,
            max_p,
            include_p_zero: false,
        }
    }

    /// Largest subscript any identity reads.
    fn max_index(&self) -> u64 {
        2 * self.max_n + self.max_m.max(self.max_p) + 2
    }

    pub fn range_of(&self, id: IdentityId) -> IndexRange {
        use IdentityId::*;
        let (n, m, p) = (self.max_n, self.max_m, self.max_p);
        let r = |lo: u64, hi: u64| Some([lo, hi]);
        match id {
            FibMatrix | FibCassini | FibCassiniExpanded | FibDoubleIndex | LfLinkA => IndexRange {
                n: r(1, n),
                ..Default::default()
            },
            LfLinkB => IndexRange {
                n: r(2, n),
                ..Default::default()
            },
            FibHonsberger => IndexRange {
                n: r(1, n),
                m: r(0, m),
                p: None,
            },
            MixedHonsberger => IndexRange {
                n: r(0, n),
                m: r(1, m),
                p: None,
            },
            FibDocagne | MixedDocagne => IndexRange {
                n: r(0, n),
                m: r(0, n),
                p: None,
            },
            FibBinomial => IndexRange {
                n: r(0, n),
                m: None,
                p: r(if self.include_p_zero { 0 } else { 1 }, p),
            },
            LucasBinomial => IndexRange {
                n: r(0, n),
                m: None,
                p: r(0, p),
            },
            LucasMatrix | LucasCassini | LucasCassiniExpanded => IndexRange {
                n: r(0, n),
                ..Default::default()
            },
            QSquare => IndexRange::default(),
        }
    }
}

/// A family as claimed (`params`) and as observed (`data`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subject {
    pub params: FamilySpec,
    pub data: FamilySpec,
}

impl Subject {
    pub fn new(spec: FamilySpec) -> Self {
        Subject {
            params: spec.clone(),
            data: spec,
        }
    }

    /// Claimed parameters checked against another family's terms.
    pub fn with_data(params: FamilySpec, data: FamilySpec) -> Self {
        Subject { params, data }
    }

    pub fn name(&self) -> &str {
        self.params.name()
    }

    fn fib_params(&self) -> FamilySpec {
        match self.params.kind() {
            Kind::Fibonacci => self.params.clone(),
            Kind::Lucas => companion_fib(&self.params).expect("valid lucas spec"),
        }
    }
}

/// Everything a formula may read.
trait Terms {
    fn params(&self) -> &FamilySpec;
    /// Term `k` of the data spec, by forward iteration.
    fn data(&self, k: u64) -> Cow<'_, Poly>;
    /// Fibonacci-type term `k` read off `Q^k` of the claimed spec
    /// (its companion for a Lucas-type spec).
    fn fq(&self, k: u64) -> Cow<'_, Poly>;
    /// Lucas-type term `k` read off `Q`-powers of the claimed spec.
    fn lq(&self, k: u64) -> Cow<'_, Poly>;
    /// `C(n,j) c^j d^(n-j)` for `j = 0..=n`.
    fn weights(&self, n: u64) -> Cow<'_, [Poly]>;
    fn qpow(&self, n: u64) -> Mat2 {
        mat_pow(&q_of(self.params()), n)
    }
}

/// Terms precomputed once per subject for a whole sweep.
struct Cached {
    params: FamilySpec,
    data: SeqWindow,
    fq: Vec<Poly>,
    lq: Vec<Poly>,
    weights: Vec<Vec<Poly>>,
}

impl Cached {
    fn new(subject: &Subject, bounds: &Bounds) -> Self {
        let top = bounds.max_index();
        let params = subject.params.clone();
        let data = window(&subject.data, 0, top).expect("0 <= top");
        // Q^0..=Q^top by repeated multiplication
        let q = q_of(&params);
        let mut qk = Mat2::identity();
        let mut fq = Vec::with_capacity(top as usize + 1);
        let mut lq = Vec::new();
        let b = params.b().cloned();
        if b.is_some() {
            lq.push(Poly::constant(params.a().clone()));
        }
        for _ in 0..=top {
            fq.push(qk.e21.scale(params.a()));
            if let Some(b) = &b {
                // L_{k+1} = b (Q^k)_11 + a d (Q^k)_21
                lq.push(&(b * &qk.e11) + &(params.d() * &qk.e21).scale(params.a()));
            }
            qk = &qk * &q;
        }
        let weights = binomial_weights(&params, bounds.max_n);
        Cached {
            params,
            data,
            fq,
            lq,
            weights,
        }
    }
}

fn binomial_weights(params: &FamilySpec, max_n: u64) -> Vec<Vec<Poly>> {
    let mut cpow = vec![Poly::one()];
    let mut dpow = vec![Poly::one()];
    for k in 1..=max_n as usize {
        cpow.push(&cpow[k - 1] * params.c());
        dpow.push(&dpow[k - 1] * params.d());
    }
    (0..=max_n)
        .map(|n| {
            (0..=n)
                .map(|j| {
                    let c = Rational::from_integer(binomial(n, j).expect("j <= n"));
                    (&cpow[j as usize] * &dpow[(n - j) as usize]).scale(&c)
                })
                .collect()
        })
        .collect()
}

impl Terms for Cached {
    fn params(&self) -> &FamilySpec {
        &self.params
    }

    fn data(&self, k: u64) -> Cow<'_, Poly> {
        Cow::Borrowed(self.data.term(k))
    }

    fn fq(&self, k: u64) -> Cow<'_, Poly> {
        Cow::Borrowed(&self.fq[k as usize])
    }

    fn lq(&self, k: u64) -> Cow<'_, Poly> {
        Cow::Borrowed(&self.lq[k as usize])
    }

    fn weights(&self, n: u64) -> Cow<'_, [Poly]> {
        Cow::Borrowed(&self.weights[n as usize])
    }
}

/// Terms rebuilt on demand through the public sequence routines.
struct Fresh {
    params: FamilySpec,
    fib_params: FamilySpec,
    data: FamilySpec,
}

impl Terms for Fresh {
    fn params(&self) -> &FamilySpec {
        &self.params
    }

    fn data(&self, k: u64) -> Cow<'_, Poly> {
        Cow::Owned(term_iter(&self.data, k))
    }

    fn fq(&self, k: u64) -> Cow<'_, Poly> {
        Cow::Owned(fib_via_qpow(&self.fib_params, k).expect("fibonacci kind"))
    }

    fn lq(&self, k: u64) -> Cow<'_, Poly> {
        Cow::Owned(term_matpow(&self.params, k))
    }

    fn weights(&self, n: u64) -> Cow<'_, [Poly]> {
        let (c, d) = (self.params.c(), self.params.d());
        Cow::Owned(
            (0..=n)
                .map(|j| {
                    let k = Rational::from_integer(binomial(n, j).expect("j <= n"));
                    (&c.pow(j as u32) * &d.pow((n - j) as u32)).scale(&k)
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Side {
    Poly(Poly),
    Mat(Mat2),
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Poly(p) => p.fmt(f),
            Side::Mat(m) => m.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Idx {
    n: u64,
    m: u64,
    p: u64,
}

fn neg_d_pow(t: &dyn Terms, k: u64) -> Poly {
    (-t.params().d()).pow(k as u32)
}

/// `a^2`, as a constant polynomial.
fn a_squared(spec: &FamilySpec) -> Poly {
    Poly::constant(spec.a() * spec.a())
}

/// `(L_0, L_1, L_2) = (a, b, bc + ad)` of a Lucas-type spec.
fn lucas_initial(spec: &FamilySpec) -> (Poly, Poly, Poly) {
    let a = Poly::constant(spec.a().clone());
    let b = spec.b().expect("lucas-type spec").clone();
    let l2 = &(&b * spec.c()) + &(&a * spec.d());
    (a, b, l2)
}

/// `L_2 L_0 - L_1^2`
pub fn lucas_cassini_constant(spec: &FamilySpec) -> Poly {
    let (l0, l1, l2) = lucas_initial(spec);
    &(&l2 * &l0) - &(&l1 * &l1)
}

fn over_a(spec: &FamilySpec) -> Rational {
    spec.a().recip().expect("a is nonzero")
}

fn sides(id: IdentityId, t: &dyn Terms, i: Idx) -> (Side, Side) {
    use IdentityId::*;
    let params = t.params();
    let (c, d) = (params.c(), params.d());
    let a = params.a();
    let Idx { n, m, p } = i;
    let poly = |l: Poly, r: Poly| (Side::Poly(l), Side::Poly(r));
    match id {
        FibMatrix => {
            let inv_a = over_a(params);
            let (f_next, f_n, f_prev) = (t.data(n + 1), t.data(n), t.data(n - 1));
            let from_terms = Mat2::new(
                f_next.scale(&inv_a),
                (d * &*f_n).scale(&inv_a),
                f_n.scale(&inv_a),
                (d * &*f_prev).scale(&inv_a),
            );
            (Side::Mat(t.qpow(n)), Side::Mat(from_terms))
        }
        FibCassini => {
            let (f_n, f_next, f_prev) = (t.data(n), t.data(n + 1), t.data(n - 1));
            let lhs = &(&*f_n * &*f_n) - &(&*f_next * &*f_prev);
            poly(lhs, &a_squared(params) * &neg_d_pow(t, n - 1))
        }
        FibCassiniExpanded => {
            let (f_n, f_prev) = (t.data(n), t.data(n - 1));
            let lhs = &(&(&*f_n * &*f_n) - &(c * &(&*f_n * &*f_prev))) - &(d * &(&*f_prev * &*f_prev));
            poly(lhs, &a_squared(params) * &neg_d_pow(t, n - 1))
        }
        FibHonsberger => {
            let lhs = t.fq(n + m).scale(a);
            let rhs = &(&*t.data(n) * &*t.data(m + 1)) + &(d * &(&*t.data(n - 1) * &*t.data(m)));
            poly(lhs, rhs)
        }
        FibDoubleIndex => {
            let lhs = t.fq(2 * n - 1).scale(a);
            let (f_n, f_prev) = (t.data(n), t.data(n - 1));
            poly(lhs, &(&*f_n * &*f_n) + &(d * &(&*f_prev * &*f_prev)))
        }
        FibDocagne => {
            let lhs = (&neg_d_pow(t, m) * &*t.data(n - m)).scale(a);
            let rhs = &(&*t.fq(n) * &*t.fq(m + 1)) - &(&*t.fq(n + 1) * &*t.fq(m));
            poly(lhs, rhs)
        }
        FibBinomial | LucasBinomial => {
            let lhs = match id {
                FibBinomial => t.fq(2 * n + p).into_owned(),
                _ => t.lq(2 * n + p).into_owned(),
            };
            let rhs = t
                .weights(n)
                .iter()
                .enumerate()
                .fold(Poly::zero(), |acc, (j, w)| &acc + &(w * &*t.data(j as u64 + p)));
            poly(lhs, rhs)
        }
        QSquare => {
            let q = q_of(params);
            let rhs = &q.scale(c) + &Mat2::scalar(d.clone());
            (Side::Mat(t.qpow(2)), Side::Mat(rhs))
        }
        LfLinkA => {
            let b = params.b().expect("lucas-type spec");
            let rhs = &(&b.scale(&over_a(params)) * &*t.fq(n)) + &(d * &*t.fq(n - 1));
            poly(t.data(n).into_owned(), rhs)
        }
        LfLinkB => {
            let (_, b, l2) = lucas_initial(params);
            let inv_a = over_a(params);
            let rhs = &(&l2.scale(&inv_a) * &*t.fq(n - 1)) + &(&(&b * d).scale(&inv_a) * &*t.fq(n - 2));
            poly(t.data(n).into_owned(), rhs)
        }
        LucasMatrix => {
            let (l0, l1, l2) = lucas_initial(params);
            let init = Mat2::new(l2, d * &l1, l1, d * &l0);
            let lhs = Mat2::new(
                t.data(n + 2).into_owned(),
                d * &*t.data(n + 1),
                t.data(n + 1).into_owned(),
                d * &*t.data(n),
            );
            (Side::Mat(lhs), Side::Mat(&init * &t.qpow(n)))
        }
        LucasCassini => {
            let (l2, l1, l0) = (t.data(n + 2), t.data(n + 1), t.data(n));
            let lhs = &(&*l2 * &*l0) - &(&*l1 * &*l1);
            poly(lhs, &lucas_cassini_constant(params) * &neg_d_pow(t, n))
        }
        LucasCassiniExpanded => {
            let (l1, l0) = (t.data(n + 1), t.data(n));
            let lhs = &(&(c * &(&*l1 * &*l0)) + &(d * &(&*l0 * &*l0))) - &(&*l1 * &*l1);
            poly(lhs, &lucas_cassini_constant(params) * &neg_d_pow(t, n))
        }
        MixedHonsberger => {
            let lhs = t.data(n + m).scale(a);
            let rhs = &(&*t.data(n + 1) * &*t.fq(m)) + &(d * &(&*t.data(n) * &*t.fq(m - 1)));
            poly(lhs, rhs)
        }
        MixedDocagne => {
            let lhs = (&neg_d_pow(t, m) * &*t.data(n - m)).scale(a);
            let rhs = &(&*t.data(n) * &*t.fq(m + 1)) - &(&*t.data(n + 1) * &*t.fq(m));
            poly(lhs, rhs)
        }
    }
}

/// Index tuples of a sweep, in the order they are tried.
fn tuples(id: IdentityId, bounds: &Bounds) -> Vec<Idx> {
    use IdentityId::*;
    let range = bounds.range_of(id);
    let span = |r: Option<[u64; 2]>| r.map_or(0..=0, |[lo, hi]| lo..=hi);
    let mut out = Vec::new();
    for n in span(range.n) {
        match id {
            FibDocagne | MixedDocagne => out.extend((0..=n).map(|m| Idx { n, m, p: 0 })),
            _ => {
                for m in span(range.m) {
                    for p in span(range.p) {
                        out.push(Idx { n, m, p });
                    }
                }
            }
        }
    }
    out
}

fn index_map(range: &IndexRange, i: Idx) -> BTreeMap<String, u64> {
    [("n", range.n, i.n), ("m", range.m, i.m), ("p", range.p, i.p)]
        .into_iter()
        .filter(|(_, r, _)| r.is_some())
        .map(|(k, _, v)| (k.to_string(), v))
        .collect()
}

/// Statement with a closed-form right-hand side filled in.
fn instantiated_formula(id: IdentityId, spec: &FamilySpec) -> String {
    match id {
        IdentityId::FibCassini | IdentityId::FibCassiniExpanded => {
            let lhs = id.formula().split(" = ").next().unwrap_or_default();
            let a2 = spec.a() * spec.a();
            let power = format!("({})^(n-1)", -spec.d());
            if a2.is_one() {
                format!("{lhs} = {power}")
            } else {
                format!("{lhs} = {a2}*{power}")
            }
        }
        IdentityId::LucasCassini | IdentityId::LucasCassiniExpanded => {
            let lhs = id.formula().split(" = ").next().unwrap_or_default();
            format!("{lhs} = ({})*({})^n", lucas_cassini_constant(spec), -spec.d())
        }
        _ => id.formula().to_string(),
    }
}

fn skipped(id: IdentityId, subject: &Subject, bounds: &Bounds) -> Option<IdentityReport> {
    if id.applies_to(subject.params.kind()) && subject.data.kind() == subject.params.kind() {
        return None;
    }
    let reason = match id.applies() {
        Applies::Fibonacci => "requires a Fibonacci-type family",
        Applies::Lucas => "requires a Lucas-type family",
        Applies::Pair => "requires a Lucas-type family and its companion",
        Applies::Any => "claimed and observed kinds differ",
    };
    Some(IdentityReport {
        identity: id,
        family: subject.name().to_string(),
        range: bounds.range_of(id),
        status: Status::Skipped,
        counterexample: None,
        reason: Some(reason.to_string()),
        formula: id.formula().to_string(),
    })
}

fn sweep(id: IdentityId, subject: &Subject, bounds: &Bounds, terms: &dyn Terms) -> IdentityReport {
    if let Some(report) = skipped(id, subject, bounds) {
        return report;
    }
    let range = bounds.range_of(id);
    let counterexample = tuples(id, bounds).into_iter().find_map(|i| {
        let (lhs, rhs) = sides(id, terms, i);
        (lhs != rhs).then(|| Counterexample {
            indices: index_map(&range, i),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        })
    });
    IdentityReport {
        identity: id,
        family: subject.name().to_string(),
        range,
        status: if counterexample.is_some() {
            Status::Fail
        } else {
            Status::Pass
        },
        counterexample,
        reason: None,
        formula: instantiated_formula(id, &subject.params),
    }
}

/// Sweep one identity over one subject.
pub fn check(id: IdentityId, subject: &Subject, bounds: &Bounds) -> IdentityReport {
    if let Some(report) = skipped(id, subject, bounds) {
        return report;
    }
    sweep(id, subject, bounds, &Cached::new(subject, bounds))
}

fn only_n(n_max: u64) -> Bounds {
    Bounds::new(n_max, 0, 0)
}

pub fn check_fib_matrix(spec: &FamilySpec, n_max: u64) -> IdentityReport {
    check(IdentityId::FibMatrix, &Subject::new(spec.clone()), &only_n(n_max))
}

pub fn check_fib_cassini(spec: &FamilySpec, n_max: u64) -> IdentityReport {
    check(IdentityId::FibCassini, &Subject::new(spec.clone()), &only_n(n_max))
}

pub fn check_fib_cassini_expanded(spec: &FamilySpec, n_max: u64) -> IdentityReport {
    check(IdentityId::FibCassiniExpanded, &Subject::new(spec.clone()), &only_n(n_max))
}

pub fn check_fib_honsberger(spec: &FamilySpec, n_max: u64, m_max: u64) -> IdentityReport {
    check(IdentityId::FibHonsberger, &Subject::new(spec.clone()), &Bounds::new(n_max, m_max, 0))
}

pub fn check_fib_double_index(spec: &FamilySpec, n_max: u64) -> IdentityReport {
    check(IdentityId::FibDoubleIndex, &Subject::new(spec.clone()), &only_n(n_max))
}

pub fn check_fib_docagne(spec: &FamilySpec, n_max: u64) -> IdentityReport {
    check(IdentityId::FibDocagne, &Subject::new(spec.clone()), &only_n(n_max))
}

pub fn check_fib_binomial(spec: &FamilySpec, n_max: u64, p_max: u64) -> IdentityReport {
    check(IdentityId::FibBinomial, &Subject::new(spec.clone()), &Bounds::new(n_max, 0, p_max))
}

pub fn check_q_square(spec: &FamilySpec) -> IdentityReport {
    check(IdentityId::QSquare, &Subject::new(spec.clone()), &only_n(0))
}

/// `LF_LINK_A` and `LF_LINK_B`, in that order.
pub fn check_lf_link(pair: &FamilyPair, n_max: u64) -> [IdentityReport; 2] {
    let subject = Subject::new(pair.lucas.clone());
    let bounds = only_n(n_max);
    let terms = Cached::new(&subject, &bounds);
    [IdentityId::LfLinkA, IdentityId::LfLinkB].map(|id| sweep(id, &subject, &bounds, &terms))
}

pub fn check_lucas_matrix(pair: &FamilyPair, n_max: u64) -> IdentityReport {
    check(IdentityId::LucasMatrix, &Subject::new(pair.lucas.clone()), &only_n(n_max))
}

pub fn check_lucas_cassini(spec: &FamilySpec, n_max: u64) -> IdentityReport {
    check(IdentityId::LucasCassini, &Subject::new(spec.clone()), &only_n(n_max))
}

pub fn check_lucas_cassini_expanded(spec: &FamilySpec, n_max: u64) -> IdentityReport {
    check(IdentityId::LucasCassiniExpanded, &Subject::new(spec.clone()), &only_n(n_max))
}

pub fn check_lucas_binomial(spec: &FamilySpec, n_max: u64, p_max: u64) -> IdentityReport {
    check(IdentityId::LucasBinomial, &Subject::new(spec.clone()), &Bounds::new(n_max, 0, p_max))
}

pub fn check_mixed_honsberger(pair: &FamilyPair, n_max: u64, m_max: u64) -> IdentityReport {
    check(IdentityId::MixedHonsberger, &Subject::new(pair.lucas.clone()), &Bounds::new(n_max, m_max, 0))
}

pub fn check_mixed_docagne(pair: &FamilyPair, n_max: u64) -> IdentityReport {
    check(IdentityId::MixedDocagne, &Subject::new(pair.lucas.clone()), &only_n(n_max))
}

/// Run `ids` over every subject, in parallel. Reports are ordered by family
/// name, then by declaration order of the identity.
pub fn run_subjects(subjects: &[Subject], ids: &[IdentityId], bounds: &Bounds) -> Vec<IdentityReport> {
    let mut reports: Vec<(usize, IdentityReport)> = subjects
        .par_iter()
        .enumerate()
        .flat_map(|(i, subject)| {
            let terms = Cached::new(subject, bounds);
            ids.par_iter()
                .map(|&id| (i, sweep(id, subject, bounds, &terms)))
                .collect::<Vec<_>>()
        })
        .collect();
    reports.sort_by(|(i, x), (j, y)| {
        (x.family.as_str(), i, x.identity).cmp(&(y.family.as_str(), j, y.identity))
    });
    reports.into_iter().map(|(_, r)| r).collect()
}

/// All sixteen identities over honest subjects.
pub fn run_suite(specs: &[FamilySpec], bounds: &Bounds) -> Vec<IdentityReport> {
    run_suite_for(specs, &IdentityId::ALL, bounds)
}

/// Selected identities over honest subjects.
pub fn run_suite_for(specs: &[FamilySpec], ids: &[IdentityId], bounds: &Bounds) -> Vec<IdentityReport> {
    let subjects: Vec<Subject> = specs.iter().cloned().map(Subject::new).collect();
    run_subjects(&subjects, ids, bounds)
}

/// Recompute a reported counterexample from scratch. True when the
/// recomputed sides differ and print exactly as reported.
pub fn recheck(report: &IdentityReport, subject: &Subject) -> bool {
    let Some(cx) = &report.counterexample else {
        return false;
    };
    if subject.params.kind() != subject.data.kind() || !report.identity.applies_to(subject.params.kind()) {
        return false;
    }
    let get = |k: &str| cx.indices.get(k).copied().unwrap_or(0);
    let fresh = Fresh {
        params: subject.params.clone(),
        fib_params: subject.fib_params(),
        data: subject.data.clone(),
    };
    let (lhs, rhs) = sides(
        report.identity,
        &fresh,
        Idx {
            n: get("n"),
            m: get("m"),
            p: get("p"),
        },
    );
    lhs != rhs && lhs.to_string() == cx.lhs && rhs.to_string() == cx.rhs
}

/// Families where a Cassini identity passed but its expanded form, also
/// present in `reports`, did not.
pub fn consistency_violations(reports: &[IdentityReport]) -> Vec<(String, IdentityId, IdentityId)> {
    let status: BTreeMap<(&str, IdentityId), Status> = reports
        .iter()
        .map(|r| ((r.family.as_str(), r.identity), r.status))
        .collect();
    let chains = [
        (IdentityId::FibCassini, IdentityId::FibCassiniExpanded),
        (IdentityId::LucasCassini, IdentityId::LucasCassiniExpanded),
    ];
    let mut out = Vec::new();
    for r in reports {
        for (base, expanded) in chains {
            if r.identity == base
                && r.status == Status::Pass
                && status
                    .get(&(r.family.as_str(), expanded))
                    .is_some_and(|s| *s != Status::Pass)
            {
                out.push((r.family.clone(), base, expanded));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

pub fn summarize(reports: &[IdentityReport]) -> Summary {
    let mut s = Summary::default();
    for r in reports {
        match r.status {
            Status::Pass => s.pass += 1,
            Status::Fail => s.fail += 1,
            Status::Skipped => s.skipped += 1,
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin, builtin_families};

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(c)
    }

    fn pair(name: &str) -> FamilyPair {
        FamilyPair::new(builtin(name).unwrap()).unwrap()
    }

    fn assert_pass(r: &IdentityReport) {
        assert_eq!(r.status, Status::Pass, "{} on {}: {:?}", r.identity, r.family, r.counterexample);
    }

    #[test]
    fn ids_round_trip() {
        for id in IdentityId::ALL {
            assert_eq!(id.as_str().parse::<IdentityId>(), Ok(id));
            assert_eq!(id.as_str().to_lowercase().parse::<IdentityId>(), Ok(id));
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{}\"", id.as_str()));
        }
        assert!("fib-cassini".parse::<IdentityId>().is_ok());
        assert!("catalan".parse::<IdentityId>().is_err());
    }

    #[test]
    fn applicability() {
        let fib = IdentityId::ALL.iter().filter(|id| id.applies_to(Kind::Fibonacci)).count();
        let lucas = IdentityId::ALL.iter().filter(|id| id.applies_to(Kind::Lucas)).count();
        assert_eq!((fib, lucas), (8, 9));
    }

    #[test]
    fn fibonacci_checks() {
        let fib = builtin("fibonacci").unwrap();
        assert_pass(&check_fib_matrix(&fib, 20));
        assert_pass(&check_fib_cassini(&fib, 30));
        assert_pass(&check_fib_cassini_expanded(&fib, 30));
        assert_pass(&check_fib_honsberger(&fib, 12, 12));
        assert_pass(&check_fib_double_index(&fib, 30));
        assert_pass(&check_fib_docagne(&fib, 15));
        assert_pass(&check_fib_binomial(&fib, 8, 4));
        assert_pass(&check_q_square(&fib));
        let fermat = builtin("fermat").unwrap();
        assert_pass(&check_fib_cassini_expanded(&fermat, 30));
        assert_pass(&check_fib_double_index(&builtin("vieta").unwrap(), 30));
        assert_pass(&check_fib_binomial(&builtin("jacobsthal").unwrap(), 8, 4));
    }

    #[test]
    fn lucas_checks() {
        for r in check_lf_link(&pair("pell-lucas"), 30) {
            assert_pass(&r);
        }
        assert_pass(&check_lucas_matrix(&pair("pell-lucas"), 20));
        assert_pass(&check_lucas_matrix(&pair("vieta-lucas"), 20));
        assert_pass(&check_lucas_cassini(&builtin("fermat-lucas").unwrap(), 30));
        assert_pass(&check_lucas_cassini_expanded(&builtin("lucas").unwrap(), 30));
        assert_pass(&check_lucas_cassini_expanded(&builtin("chebyshev-t").unwrap(), 30));
        assert_pass(&check_lucas_binomial(&builtin("jacobsthal-lucas").unwrap(), 8, 4));
        assert_pass(&check_mixed_honsberger(&pair("pell-lucas"), 20, 20));
        assert_pass(&check_mixed_docagne(&pair("jacobsthal-lucas"), 20));
    }

    #[test]
    fn kind_mismatch_is_skipped() {
        let r = check_fib_cassini(&builtin("lucas").unwrap(), 5);
        assert_eq!(r.status, Status::Skipped);
        assert!(r.reason.is_some());
        assert!(r.counterexample.is_none());
        assert_eq!(check_lucas_cassini(&builtin("pell").unwrap(), 5).status, Status::Skipped);
        assert_pass(&check_q_square(&builtin("vieta-lucas").unwrap()));
    }

    #[test]
    fn cassini_constants_are_instantiated() {
        let j = check_fib_cassini(&builtin("jacobsthal").unwrap(), 10);
        assert!(j.formula.ends_with("= (-2*x)^(n-1)"), "{}", j.formula);
        let pl = check_lucas_cassini(&builtin("pell-lucas").unwrap(), 20);
        assert!(pl.formula.ends_with("= (4*x^2 + 4)*(-1)^n"), "{}", pl.formula);
        assert_eq!(lucas_cassini_constant(&builtin("pell-lucas").unwrap()), p(&[4, 0, 4]));
        // Fermat-Lucas: (9x^2 - 4)*2 - (3x)^2
        assert_eq!(lucas_cassini_constant(&builtin("fermat-lucas").unwrap()), p(&[-8, 0, 9]));
    }

    #[test]
    fn ranges_and_tuples() {
        let b = Bounds::new(3, 2, 1);
        assert_eq!(tuples(IdentityId::FibCassini, &b).len(), 3);
        assert_eq!(tuples(IdentityId::FibHonsberger, &b).len(), 3 * 3);
        assert_eq!(tuples(IdentityId::FibDocagne, &b).len(), 1 + 2 + 3 + 4);
        assert_eq!(tuples(IdentityId::FibBinomial, &b).len(), 4);
        assert_eq!(tuples(IdentityId::LucasBinomial, &b).len(), 4 * 2);
        assert_eq!(tuples(IdentityId::LfLinkB, &b).len(), 2);
        assert_eq!(tuples(IdentityId::QSquare, &b).len(), 1);
        let zero = Bounds {
            include_p_zero: true,
            ..b
        };
        assert_eq!(tuples(IdentityId::FibBinomial, &zero).len(), 8);
        assert_eq!(b.range_of(IdentityId::FibHonsberger).to_string(), "n=1..3 m=0..2");
        assert_eq!(b.range_of(IdentityId::QSquare).to_string(), "-");
        assert!(check_lf_link(&pair("lucas"), 1)[1].status == Status::Pass);
    }

    #[test]
    fn binomial_with_p_zero_holds() {
        let bounds = Bounds {
            include_p_zero: true,
            ..Bounds::new(10, 0, 3)
        };
        for spec in builtin_families().into_iter().filter(|s| s.kind() == Kind::Fibonacci) {
            assert_pass(&check(IdentityId::FibBinomial, &Subject::new(spec), &bounds));
        }
    }

    #[test]
    fn suite_order_and_counts() {
        let specs = vec![builtin("pell-lucas").unwrap(), builtin("fibonacci").unwrap()];
        let reports = run_suite(&specs, &Bounds::new(6, 6, 2));
        assert_eq!(reports.len(), 32);
        assert_eq!(reports[0].family, "fibonacci");
        assert_eq!(reports[16].family, "pell-lucas");
        let ids: Vec<_> = reports[..16].iter().map(|r| r.identity).collect();
        assert_eq!(ids, IdentityId::ALL);
        let s = summarize(&reports);
        assert_eq!((s.pass, s.fail, s.skipped), (17, 0, 15));
        assert!(consistency_violations(&reports).is_empty());
        assert!(run_suite(&[], &Bounds::default()).is_empty());
    }

    #[test]
    fn mutated_d_is_caught_and_rechecks() {
        let fib = builtin("fibonacci").unwrap();
        let bad = fib.with_d(p(&[2])).unwrap();
        let subject = Subject::with_data(bad, fib);
        let r = check(IdentityId::FibMatrix, &subject, &Bounds::new(20, 0, 0));
        assert_eq!(r.status, Status::Fail);
        let cx = r.counterexample.as_ref().unwrap();
        assert_ne!(cx.lhs, cx.rhs);
        assert!(recheck(&r, &subject));
        assert!(!recheck(&r, &Subject::new(builtin("fibonacci").unwrap())));
    }

    #[test]
    fn every_parameter_mutation_is_caught() {
        let bounds = Bounds::new(6, 6, 2);
        for spec in builtin_families() {
            let two = Rational::from(2);
            let mut mutants = vec![
                spec.with_a(spec.a() * &two).unwrap(),
                spec.with_c(spec.c().scale(&two)).unwrap(),
                spec.with_d(spec.d().scale(&two)).unwrap(),
            ];
            if let Some(b) = spec.b() {
                mutants.push(spec.with_b(b.scale(&two)).unwrap());
            }
            for mutant in mutants {
                let subject = Subject::with_data(mutant, spec.clone());
                let reports = run_subjects(std::slice::from_ref(&subject), &IdentityId::ALL, &bounds);
                let failed: Vec<_> = reports.iter().filter(|r| r.status == Status::Fail).collect();
                assert!(!failed.is_empty(), "{} mutant not caught", spec.name());
                for r in failed {
                    assert!(recheck(r, &subject), "{} {}", spec.name(), r.identity);
                }
            }
        }
    }

    #[test]
    fn cached_and_fresh_sources_agree() {
        let bounds = Bounds::new(5, 5, 2);
        for spec in builtin_families() {
            let subject = Subject::new(spec.clone());
            let cached = Cached::new(&subject, &bounds);
            let fresh = Fresh {
                params: spec.clone(),
                fib_params: subject.fib_params(),
                data: spec.clone(),
            };
            for k in 0..=bounds.max_index() {
                assert_eq!(cached.data(k), fresh.data(k));
                assert_eq!(cached.fq(k), fresh.fq(k));
                if spec.kind() == Kind::Lucas {
                    assert_eq!(cached.lq(k), fresh.lq(k), "{} k={k}", spec.name());
                }
            }
            for n in 0..=bounds.max_n {
                assert_eq!(cached.weights(n), fresh.weights(n));
            }
        }
    }

    #[test]
    fn report_json_shape() {
        let r = check_fib_cassini(&builtin("jacobsthal").unwrap(), 3);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["identity"], "FIB_CASSINI");
        assert_eq!(v["status"], "PASS");
        assert_eq!(v["range"]["n"], serde_json::json!([1, 3]));
        assert!(v["counterexample"].is_null());
        let back: IdentityReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}

//! Family parameters, the fifteen built-in families, and the JSON family file.
//!
//! A Fibonacci-type family is fixed by `F_0 = 0`, `F_1 = a` and the step
//! `F_n = c(x) F_{n-1} + d(x) F_{n-2}`. A Lucas-type family uses the same step
//! from `L_0 = a`, `L_1 = b(x)`. Pairing a Lucas-type family with the
//! Fibonacci-type family that shares its `a`, `c` and `d` is what the mixed
//! identities need, so the Lucas-type `a` plays both roles.
//!
//! Built-ins (Greek letters are the usual symbols):
//!
//! | slug               | symbol | kind      | a | b     | c     | d   |
//! |--------------------|--------|-----------|---|-------|-------|-----|
//! | `fibonacci`        | F      | fibonacci | 1 |       | x     | 1   |
//! | `pell`             | P      | fibonacci | 1 |       | 2x    | 1   |
//! | `fermat`           | Φ      | fibonacci | 1 |       | 3x    | -2  |
//! | `chebyshev-u`      | U      | fibonacci | 1 |       | 2x    | -1  |
//! | `jacobsthal`       | J      | fibonacci | 1 |       | 1     | 2x  |
//! | `morgan-voyce-b`   | B      | fibonacci | 1 |       | x+2   | -1  |
//! | `vieta`            | V      | fibonacci | 1 |       | x     | -1  |
//! | `lucas`            | L      | lucas     | 2 | x     | x     | 1   |
//! | `pell-lucas`       | D      | lucas     | 2 | 2x    | 2x    | 1   |
//! | `pell-lucas-prime` | D'     | lucas     | 1 | x     | 2x    | 1   |
//! | `fermat-lucas`     | ϑ      | lucas     | 2 | 3x    | 3x    | -2  |
//! | `chebyshev-t`      | T      | lucas     | 1 | x     | 2x    | -1  |
//! | `jacobsthal-lucas` | Λ      | lucas     | 1 | 1     | 1     | 2x  |
//! | `morgan-voyce-c`   | C      | lucas     | 2 | x+2   | x+2   | -1  |
//! | `vieta-lucas`      | v      | lucas     | 2 | x     | x     | -1  |

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactnum::Rational;
use crate::poly::Poly;
use crate::polyparse::{parse_poly, parse_rational, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Fibonacci,
    Lucas,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Fibonacci => "fibonacci",
            Kind::Lucas => "lucas",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("parameter `{0}` must be nonzero")]
    ZeroParameter(&'static str),
    #[error("family name must not be empty")]
    EmptyName,
    #[error("expected a {expected}-type family, got {found}-type `{name}`")]
    WrongKind {
        name: String,
        expected: Kind,
        found: Kind,
    },
    #[error("`{fib}` is not the companion of `{lucas}`: a, c and d must match")]
    NotCompanions { lucas: String, fib: String },
}

/// Validated parameters of one family. Construction rejects a zero `a`,
/// `b`, `c` or `d`, so every accessor below returns a nonzero value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FamilySpec {
    name: String,
    kind: Kind,
    a: Rational,
    b: Option<Poly>,
    c: Poly,
    d: Poly,
}

impl FamilySpec {
    pub fn fibonacci(name: impl Into<String>, a: Rational, c: Poly, d: Poly) -> Result<Self, SpecError> {
        Self::validated(FamilySpec {
            name: name.into(),
            kind: Kind::Fibonacci,
            a,
            b: None,
            c,
            d,
        })
    }

    pub fn lucas(
        name: impl Into<String>,
        a: Rational,
        b: Poly,
        c: Poly,
        d: Poly,
    ) -> Result<Self, SpecError> {
        Self::validated(FamilySpec {
            name: name.into(),
            kind: Kind::Lucas,
            a,
            b: Some(b),
            c,
            d,
        })
    }

    fn validated(spec: FamilySpec) -> Result<Self, SpecError> {
        if spec.name.is_empty() {
            return Err(SpecError::EmptyName);
        }
        if spec.a.is_zero() {
            return Err(SpecError::ZeroParameter("a"));
        }
        if spec.b.as_ref().is_some_and(Poly::is_zero) {
            return Err(SpecError::ZeroParameter("b"));
        }
        if spec.c.is_zero() {
            return Err(SpecError::ZeroParameter("c"));
        }
        if spec.d.is_zero() {
            return Err(SpecError::ZeroParameter("d"));
        }
        Ok(spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// `F_1` for Fibonacci-type families, `L_0` for Lucas-type ones.
    pub fn a(&self) -> &Rational {
        &self.a
    }

    /// `L_1`; `None` for Fibonacci-type families.
    pub fn b(&self) -> Option<&Poly> {
        self.b.as_ref()
    }

    pub fn c(&self) -> &Poly {
        &self.c
    }

    pub fn d(&self) -> &Poly {
        &self.d
    }

    /// The two initial terms `(G_0, G_1)`.
    pub fn initial_terms(&self) -> (Poly, Poly) {
        let a = Poly::constant(self.a.clone());
        match &self.b {
            None => (Poly::zero(), a),
            Some(b) => (a, b.clone()),
        }
    }

    pub fn with_name(&self, name: impl Into<String>) -> Result<Self, SpecError> {
        Self::validated(FamilySpec {
            name: name.into(),
            ..self.clone()
        })
    }

    pub fn with_a(&self, a: Rational) -> Result<Self, SpecError> {
        Self::validated(FamilySpec { a, ..self.clone() })
    }

    /// Replaces `b`; only meaningful for Lucas-type families.
    pub fn with_b(&self, b: Poly) -> Result<Self, SpecError> {
        if self.kind != Kind::Lucas {
            return Err(self.wrong_kind(Kind::Lucas));
        }
        Self::validated(FamilySpec {
            b: Some(b),
            ..self.clone()
        })
    }

    pub fn with_c(&self, c: Poly) -> Result<Self, SpecError> {
        Self::validated(FamilySpec { c, ..self.clone() })
    }

    pub fn with_d(&self, d: Poly) -> Result<Self, SpecError> {
        Self::validated(FamilySpec { d, ..self.clone() })
    }

    pub(crate) fn wrong_kind(&self, expected: Kind) -> SpecError {
        SpecError::WrongKind {
            name: self.name.clone(),
            expected,
            found: self.kind,
        }
    }
}

/// The Fibonacci-type family sharing `a`, `c`, `d` with a Lucas-type one.
pub fn companion_fib(lucas: &FamilySpec) -> Result<FamilySpec, SpecError> {
    if lucas.kind != Kind::Lucas {
        return Err(lucas.wrong_kind(Kind::Lucas));
    }
    FamilySpec::fibonacci(
        format!("{}/companion", lucas.name),
        lucas.a.clone(),
        lucas.c.clone(),
        lucas.d.clone(),
    )
}

/// A Lucas-type family together with its Fibonacci-type companion
/// (`L_0 = F_1 = a`, identical `c` and `d`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyPair {
    pub lucas: FamilySpec,
    pub fib: FamilySpec,
}

impl FamilyPair {
    pub fn new(lucas: FamilySpec) -> Result<Self, SpecError> {
        let fib = companion_fib(&lucas)?;
        Ok(FamilyPair { lucas, fib })
    }

    pub fn from_parts(lucas: FamilySpec, fib: FamilySpec) -> Result<Self, SpecError> {
        if lucas.kind != Kind::Lucas {
            return Err(lucas.wrong_kind(Kind::Lucas));
        }
        if fib.kind != Kind::Fibonacci {
            return Err(fib.wrong_kind(Kind::Fibonacci));
        }
        if lucas.a != fib.a || lucas.c != fib.c || lucas.d != fib.d {
            return Err(SpecError::NotCompanions {
                lucas: lucas.name,
                fib: fib.name,
            });
        }
        Ok(FamilyPair { lucas, fib })
    }
}

fn table_row(name: &str, a: i64, b: Option<&[i64]>, c: &[i64], d: &[i64]) -> FamilySpec {
    let a = Rational::from(a);
    let (c, d) = (Poly::from_ints(c), Poly::from_ints(d));
    match b {
        None => FamilySpec::fibonacci(name, a, c, d),
        Some(b) => FamilySpec::lucas(name, a, Poly::from_ints(b), c, d),
    }
    .expect("built-in parameters are nonzero")
}

/// The fifteen built-in families, Fibonacci-type rows first.
pub fn builtin_families() -> Vec<FamilySpec> {
    const X: &[i64] = &[0, 1];
    const TWO_X: &[i64] = &[0, 2];
    const THREE_X: &[i64] = &[0, 3];
    const X_PLUS_2: &[i64] = &[2, 1];
    vec![
        table_row("fibonacci", 1, None, X, &[1]),
        table_row("pell", 1, None, TWO_X, &[1]),
        table_row("fermat", 1, None, THREE_X, &[-2]),
        table_row("chebyshev-u", 1, None, TWO_X, &[-1]),
        table_row("jacobsthal", 1, None, &[1], TWO_X),
        table_row("morgan-voyce-b", 1, None, X_PLUS_2, &[-1]),
        table_row("vieta", 1, None, X, &[-1]),
        table_row("lucas", 2, Some(X), X, &[1]),
        table_row("pell-lucas", 2, Some(TWO_X), TWO_X, &[1]),
        table_row("pell-lucas-prime", 1, Some(X), TWO_X, &[1]),
        table_row("fermat-lucas", 2, Some(THREE_X), THREE_X, &[-2]),
        table_row("chebyshev-t", 1, Some(X), TWO_X, &[-1]),
        table_row("jacobsthal-lucas", 1, Some(&[1]), &[1], TWO_X),
        table_row("morgan-voyce-c", 2, Some(X_PLUS_2), X_PLUS_2, &[-1]),
        table_row("vieta-lucas", 2, Some(X), X, &[-1]),
    ]
}

pub fn builtin(name: &str) -> Option<FamilySpec> {
    builtin_families().into_iter().find(|s| s.name == name)
}

/// One object of the JSON family file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyRecord {
    pub name: String,
    pub kind: Kind,
    pub a: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    pub c: String,
    pub d: String,
}

impl From<&FamilySpec> for FamilyRecord {
    fn from(spec: &FamilySpec) -> Self {
        FamilyRecord {
            name: spec.name.clone(),
            kind: spec.kind,
            a: spec.a.to_string(),
            b: spec.b.as_ref().map(ToString::to_string),
            c: spec.c.to_string(),
            d: spec.d.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid family file at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("family #{index} (`{name}`), field `{field}`: {source}")]
    Parse {
        index: usize,
        name: String,
        field: &'static str,
        source: ParseError,
    },
    #[error("family #{index} (`{name}`): {message}")]
    Invalid {
        index: usize,
        name: String,
        message: String,
    },
}

impl FamilyRecord {
    /// Validates one record; `index` is its 0-based position in the file.
    pub fn to_spec(&self, index: usize) -> Result<FamilySpec, ConfigError> {
        let invalid = |message: String| ConfigError::Invalid {
            index,
            name: self.name.clone(),
            message,
        };
        let field_err = |field: &'static str| {
            move |source: ParseError| ConfigError::Parse {
                index,
                name: self.name.clone(),
                field,
                source,
            }
        };
        let a = parse_rational(&self.a).map_err(field_err("a"))?;
        let c = parse_poly(&self.c).map_err(field_err("c"))?;
        let d = parse_poly(&self.d).map_err(field_err("d"))?;
        let spec = match (self.kind, &self.b) {
            (Kind::Fibonacci, None) => FamilySpec::fibonacci(&self.name, a, c, d),
            (Kind::Fibonacci, Some(_)) => {
                return Err(invalid("field `b` is only allowed for lucas-type families".into()))
            }
            (Kind::Lucas, Some(b)) => {
                let b = parse_poly(b).map_err(field_err("b"))?;
                FamilySpec::lucas(&self.name, a, b, c, d)
            }
            (Kind::Lucas, None) => {
                return Err(invalid("lucas-type families need field `b`".into()))
            }
        };
        spec.map_err(|e| invalid(e.to_string()))
    }
}

/// Parses and validates a JSON family file (a top-level array of records).
pub fn load_families(doc: &str) -> Result<Vec<FamilySpec>, ConfigError> {
    let records: Vec<FamilyRecord> = serde_json::from_str(doc).map_err(|e| ConfigError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut seen = BTreeSet::new();
    records
        .iter()
        .enumerate()
        .map(|(index, record)| {
            let spec = record.to_spec(index)?;
            if !seen.insert(spec.name.clone()) {
                return Err(ConfigError::Invalid {
                    index,
                    name: spec.name,
                    message: "duplicate family name".into(),
                });
            }
            Ok(spec)
        })
        .collect()
}

/// Serializes specs in the family-file format.
pub fn to_json(specs: &[FamilySpec]) -> String {
    let records: Vec<FamilyRecord> = specs.iter().map(FamilyRecord::from).collect();
    serde_json::to_string_pretty(&records).expect("records serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(c)
    }

    #[test]
    fn fifteen_valid_builtins() {
        let all = builtin_families();
        assert_eq!(all.len(), 15);
        assert_eq!(all.iter().filter(|s| s.kind() == Kind::Lucas).count(), 8);
        let names: BTreeSet<_> = all.iter().map(|s| s.name().to_string()).collect();
        assert_eq!(names.len(), 15);
        for spec in &all {
            assert_eq!(FamilySpec::validated(spec.clone()).as_ref(), Ok(spec));
            assert!(spec.name().bytes().all(|b| b.is_ascii_lowercase() || b == b'-'));
        }
    }

    #[test]
    fn table_rows() {
        let d = builtin("pell-lucas").unwrap();
        assert_eq!(
            (d.a(), d.b(), d.c(), d.d()),
            (&Rational::from(2), Some(&p(&[0, 2])), &p(&[0, 2]), &p(&[1]))
        );
        let v = builtin("vieta").unwrap();
        assert_eq!((v.a(), v.b(), v.c(), v.d()), (&Rational::from(1), None, &p(&[0, 1]), &p(&[-1])));
        let jl = builtin("jacobsthal-lucas").unwrap();
        assert_eq!(
            (jl.a(), jl.b(), jl.c(), jl.d()),
            (&Rational::from(1), Some(&p(&[1])), &p(&[1]), &p(&[0, 2]))
        );
        let t = builtin("chebyshev-t").unwrap();
        assert_eq!(t.initial_terms(), (p(&[1]), p(&[0, 1])));
        assert_eq!(builtin("fermat").unwrap().initial_terms(), (Poly::zero(), p(&[1])));
    }

    #[test]
    fn companions() {
        let jl = builtin("jacobsthal-lucas").unwrap();
        let comp = companion_fib(&jl).unwrap();
        let j = builtin("jacobsthal").unwrap();
        assert_eq!((comp.a(), comp.c(), comp.d()), (j.a(), j.c(), j.d()));
        assert_eq!(comp.kind(), Kind::Fibonacci);

        let t = companion_fib(&builtin("chebyshev-t").unwrap()).unwrap();
        assert_eq!((t.a(), t.c(), t.d()), (&Rational::from(1), &p(&[0, 2]), &p(&[-1])));

        for spec in builtin_families().into_iter().filter(|s| s.kind() == Kind::Lucas) {
            let comp = companion_fib(&spec).unwrap();
            assert_eq!((comp.a(), comp.c(), comp.d()), (spec.a(), spec.c(), spec.d()));
            let pair = FamilyPair::new(spec.clone()).unwrap();
            assert_eq!(FamilyPair::from_parts(spec, pair.fib.clone()).unwrap(), pair);
        }

        let err = companion_fib(&builtin("pell").unwrap()).unwrap_err();
        assert!(matches!(err, SpecError::WrongKind { expected: Kind::Lucas, .. }));
        let mismatch = FamilyPair::from_parts(builtin("lucas").unwrap(), builtin("fibonacci").unwrap());
        assert!(matches!(mismatch, Err(SpecError::NotCompanions { .. })));
    }

    #[test]
    fn validation() {
        let one = Rational::one();
        assert_eq!(
            FamilySpec::fibonacci("z", Rational::zero(), p(&[0, 1]), p(&[1])),
            Err(SpecError::ZeroParameter("a"))
        );
        assert_eq!(
            FamilySpec::fibonacci("z", one.clone(), Poly::zero(), p(&[1])),
            Err(SpecError::ZeroParameter("c"))
        );
        assert_eq!(
            FamilySpec::fibonacci("z", one.clone(), p(&[1]), Poly::zero()),
            Err(SpecError::ZeroParameter("d"))
        );
        assert_eq!(
            FamilySpec::lucas("z", one.clone(), Poly::zero(), p(&[1]), p(&[1])),
            Err(SpecError::ZeroParameter("b"))
        );
        assert_eq!(
            FamilySpec::fibonacci("", one, p(&[1]), p(&[1])),
            Err(SpecError::EmptyName)
        );
        assert!(builtin("pell").unwrap().with_b(p(&[1])).is_err());
        assert_eq!(
            builtin("fibonacci").unwrap().with_d(p(&[2])).unwrap().d(),
            &p(&[2])
        );
    }

    #[test]
    fn load_single_family() {
        let specs =
            load_families(r#"[{"name":"fib","kind":"fibonacci","a":"1","c":"x","d":"1"}]"#).unwrap();
        let fib = builtin("fibonacci").unwrap().with_name("fib").unwrap();
        assert_eq!(specs, vec![fib]);
        assert_eq!(load_families("[]").unwrap(), vec![]);
    }

    #[test]
    fn load_rejections() {
        let zero_b = r#"[{"name":"bad","kind":"lucas","a":"2","b":"0","c":"x","d":"1"}]"#;
        let e = load_families(zero_b).unwrap_err();
        assert!(matches!(&e, ConfigError::Invalid { index: 0, name, .. } if name == "bad"));
        assert!(e.to_string().contains("`b`"), "{e}");

        let zero_a = r#"[{"name":"ok","kind":"fibonacci","a":"1","c":"x","d":"1"},
                         {"name":"za","kind":"fibonacci","a":"0","c":"x","d":"1"}]"#;
        let e = load_families(zero_a).unwrap_err();
        assert!(matches!(&e, ConfigError::Invalid { index: 1, name, .. } if name == "za"));

        let unknown = r#"[{"name":"u","kind":"fibonacci","a":"1","c":"x","d":"1","q":"2"}]"#;
        assert!(matches!(load_families(unknown), Err(ConfigError::Json { line: 1, .. })));

        let bad_kind = r#"[{"name":"u","kind":"tribonacci","a":"1","c":"x","d":"1"}]"#;
        assert!(matches!(load_families(bad_kind), Err(ConfigError::Json { .. })));

        let bad_poly = r#"[{"name":"p","kind":"fibonacci","a":"1","c":"x^","d":"1"}]"#;
        let e = load_families(bad_poly).unwrap_err();
        assert!(matches!(&e, ConfigError::Parse { field: "c", .. }), "{e}");

        let fib_with_b = r#"[{"name":"p","kind":"fibonacci","a":"1","b":"x","c":"x","d":"1"}]"#;
        assert!(matches!(load_families(fib_with_b), Err(ConfigError::Invalid { .. })));

        let lucas_without_b = r#"[{"name":"p","kind":"lucas","a":"1","c":"x","d":"1"}]"#;
        assert!(matches!(load_families(lucas_without_b), Err(ConfigError::Invalid { .. })));

        let dup = r#"[{"name":"p","kind":"fibonacci","a":"1","c":"x","d":"1"},
                      {"name":"p","kind":"fibonacci","a":"1","c":"x","d":"2"}]"#;
        assert!(matches!(load_families(dup), Err(ConfigError::Invalid { index: 1, .. })));

        assert!(matches!(load_families("{}"), Err(ConfigError::Json { .. })));
    }

    #[test]
    fn builtins_round_trip_through_json() {
        let all = builtin_families();
        assert_eq!(load_families(&to_json(&all)).unwrap(), all);
    }
}

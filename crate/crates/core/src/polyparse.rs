//! Recursive-descent parser for polynomial and rational expressions.
//!
//! Grammar:
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := factor ("*"? factor)*        -- implicit product only after a numeric literal,
//!                                          -- and only before `x` or `(`
//! factor   := "-" factor | atom ("^" INT)?
//! atom     := rational | "x" | "(" expr ")"
//! rational := INT ("/" INT)?
//! ```
//!
//! Unary minus applies to the whole factor, so `-x^2` is `-(x^2)`. The
//! canonical printer in [`crate::poly`] emits text this grammar reads back.

use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::exactnum::Rational;
use crate::poly::Poly;

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 4096;
/// Cap on the estimated size of any intermediate result, in coefficient bits
/// summed over terms.
const MAX_RESULT_BITS: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// Decimal digits only.
    Int(String),
    Slash,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    VarX,
    End,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Int(s) => write!(f, "integer `{s}`"),
            TokenKind::Slash => f.write_str("`/`"),
            TokenKind::Plus => f.write_str("`+`"),
            TokenKind::Minus => f.write_str("`-`"),
            TokenKind::Star => f.write_str("`*`"),
            TokenKind::Caret => f.write_str("`^`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::VarX => f.write_str("`x`"),
            TokenKind::End => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Character offsets into the source.
    pub span: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    Unexpected { found: TokenKind, expected: &'static str },
    BadExponent,
    ZeroDenominator,
    TooLarge,
}

/// A parse failure at a character offset (0-based) of the input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at position {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::Unexpected { found, expected } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::BadExponent => write!(
                f,
                "exponent must be a nonnegative integer no larger than {MAX_EXPONENT}"
            ),
            ParseErrorKind::ZeroDenominator => f.write_str("zero denominator in rational literal"),
            ParseErrorKind::TooLarge => f.write_str("expression too large"),
        }
    }
}

fn err(position: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { position, kind }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = match c {
            '0'..='9' => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Int(chars[start..i].iter().collect()),
                    span: start..i,
                });
                continue;
            }
            '/' => TokenKind::Slash,
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '^' => TokenKind::Caret,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            'x' => {
                if chars.get(i + 1).is_some_and(|n| n.is_alphanumeric() || *n == '_') {
                    return Err(err(i + 1, ParseErrorKind::UnexpectedChar(chars[i + 1])));
                }
                TokenKind::VarX
            }
            other => return Err(err(i, ParseErrorKind::UnexpectedChar(other))),
        };
        i += 1;
        tokens.push(Token {
            kind,
            span: start..i,
        });
    }
    tokens.push(Token {
        kind: TokenKind::End,
        span: chars.len()..chars.len(),
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

/// A parsed factor plus whether it was a bare numeric literal, which is what
/// licenses an implicit product like `3x` or `2(x+1)`.
struct Factor {
    value: Poly,
    literal: bool,
}

/// (number of coefficient slots, combined bit length of the largest
/// coefficient, log2 of the nonzero term count rounded up).
fn shape(p: &Poly) -> (u64, u64, u64) {
    let slots = p.coeffs().len() as u64;
    let bits = p
        .coeffs()
        .iter()
        .map(|c| c.numer().bits().saturating_sub(1) + c.denom().bits().saturating_sub(1))
        .max()
        .unwrap_or(0);
    let terms = p.coeffs().iter().filter(|c| !c.is_zero()).count() as u64;
    (slots, bits, 64 - terms.saturating_sub(1).leading_zeros() as u64)
}

fn product_estimate(a: &Poly, b: &Poly) -> u64 {
    let (sa, ba, ta) = shape(a);
    let (sb, bb, tb) = shape(b);
    (sa + sb).saturating_mul(ba + bb + ta.min(tb) + 1)
}

fn power_estimate(base: &Poly, exponent: u32) -> u64 {
    let (slots, bits, terms) = shape(base);
    let e = exponent as u64;
    (slots.saturating_sub(1) * e + 1).saturating_mul(e * (bits + terms) + 1)
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let t = self.peek();
        err(
            t.span.start,
            ParseErrorKind::Unexpected {
                found: t.kind.clone(),
                expected,
            },
        )
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek().kind {
            TokenKind::End => Ok(()),
            _ => Err(self.unexpected("operator or end of input")),
        }
    }

    fn int(&mut self) -> Result<(BigInt, Range<usize>), ParseError> {
        match self.peek().kind.clone() {
            TokenKind::Int(digits) => {
                let span = self.bump().span;
                let n = digits.parse::<BigInt>().expect("token holds only digits");
                Ok((n, span))
            }
            _ => Err(self.unexpected("integer")),
        }
    }

    /// `INT ("/" INT)?`
    fn rational(&mut self) -> Result<Rational, ParseError> {
        let (num, _) = self.int()?;
        if self.peek().kind != TokenKind::Slash {
            return Ok(Rational::from_integer(num));
        }
        self.bump();
        let (den, span) = self.int()?;
        if den.is_zero() {
            return Err(err(span.start, ParseErrorKind::ZeroDenominator));
        }
        Ok(Rational::new(num, den).expect("nonzero denominator"))
    }

    fn expr(&mut self, depth: usize) -> Result<Poly, ParseError> {
        let mut acc = self.term(depth)?;
        loop {
            let negate = match self.peek().kind {
                TokenKind::Plus => false,
                TokenKind::Minus => true,
                _ => return Ok(acc),
            };
            self.bump();
            let rhs = self.term(depth)?;
            acc = if negate { &acc - &rhs } else { &acc + &rhs };
        }
    }

    fn term(&mut self, depth: usize) -> Result<Poly, ParseError> {
        let first = self.factor(depth)?;
        let mut acc = first.value;
        let mut prev_literal = first.literal;
        loop {
            let start = self.peek().span.start;
            let next = match self.peek().kind {
                TokenKind::Star => {
                    self.bump();
                    self.factor(depth)?
                }
                TokenKind::VarX | TokenKind::LParen if prev_literal => self.factor(depth)?,
                _ => return Ok(acc),
            };
            if product_estimate(&acc, &next.value) > MAX_RESULT_BITS {
                return Err(err(start, ParseErrorKind::TooLarge));
            }
            acc = &acc * &next.value;
            prev_literal = next.literal;
        }
    }

    fn factor(&mut self, depth: usize) -> Result<Factor, ParseError> {
        if depth > 256 {
            return Err(err(self.peek().span.start, ParseErrorKind::TooLarge));
        }
        if self.peek().kind == TokenKind::Minus {
            self.bump();
            let inner = self.factor(depth + 1)?;
            return Ok(Factor {
                value: -inner.value,
                literal: inner.literal,
            });
        }
        let (base, literal) = self.atom(depth)?;
        if self.peek().kind != TokenKind::Caret {
            return Ok(Factor {
                value: base,
                literal,
            });
        }
        let caret = self.bump();
        let exponent = match self.peek().kind {
            TokenKind::Int(_) => {
                let (n, span) = self.int()?;
                u32::try_from(n)
                    .ok()
                    .filter(|e| *e <= MAX_EXPONENT)
                    .ok_or_else(|| err(span.start, ParseErrorKind::BadExponent))?
            }
            _ => return Err(err(caret.span.end, ParseErrorKind::BadExponent)),
        };
        if power_estimate(&base, exponent) > MAX_RESULT_BITS {
            return Err(err(caret.span.start, ParseErrorKind::TooLarge));
        }
        Ok(Factor {
            value: base.pow(exponent),
            literal: false,
        })
    }

    fn atom(&mut self, depth: usize) -> Result<(Poly, bool), ParseError> {
        match self.peek().kind {
            TokenKind::Int(_) => Ok((Poly::constant(self.rational()?), true)),
            TokenKind::VarX => {
                self.bump();
                Ok((Poly::x(), false))
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.expr(depth + 1)?;
                if self.peek().kind != TokenKind::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok((inner, false))
            }
            _ => Err(self.unexpected("number, `x`, `(` or `-`")),
        }
    }
}

/// Parses a polynomial expression in `x` into canonical form.
pub fn parse_poly(src: &str) -> Result<Poly, ParseError> {
    let mut parser = Parser::new(src)?;
    let poly = parser.expr(0)?;
    parser.expect_end()?;
    Ok(poly)
}

/// Parses an optionally signed `p` or `p/q` literal.
pub fn parse_rational(src: &str) -> Result<Rational, ParseError> {
    let mut parser = Parser::new(src)?;
    let negate = match parser.peek().kind {
        TokenKind::Minus => {
            parser.bump();
            true
        }
        TokenKind::Plus => {
            parser.bump();
            false
        }
        _ => false,
    };
    let value = parser.rational()?;
    parser.expect_end()?;
    Ok(if negate { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    fn int(s: &str) -> TokenKind {
        TokenKind::Int(s.into())
    }

    fn poly(src: &str) -> Poly {
        parse_poly(src).unwrap_or_else(|e| panic!("{src:?}: {e}"))
    }

    #[test]
    fn tokens() {
        use TokenKind::*;
        assert_eq!(kinds("3x - 2"), vec![int("3"), VarX, Minus, int("2"), End]);
        assert_eq!(kinds(""), vec![End]);
        assert_eq!(
            kinds("x^2+1"),
            vec![VarX, Caret, int("2"), Plus, int("1"), End]
        );
        let toks = tokenize(" 12 x").unwrap();
        assert_eq!(toks[0].span, 1..3);
        assert_eq!(toks[1].span, 4..5);
        assert_eq!(toks[2].span, 5..5);
    }

    #[test]
    fn lex_errors_carry_position() {
        let e = tokenize("x + y").unwrap_err();
        assert_eq!(e.position, 4);
        assert_eq!(e.kind, ParseErrorKind::UnexpectedChar('y'));
        assert_eq!(tokenize("2.5").unwrap_err().position, 1);
        assert_eq!(tokenize("X").unwrap_err().position, 0);
        assert_eq!(tokenize("xx").unwrap_err().position, 1);
    }

    #[test]
    fn table_parameters() {
        let three_x = Poly::from_ints(&[0, 3]);
        assert_eq!(poly("3*x"), three_x);
        assert_eq!(poly("3x"), three_x);
        assert_eq!(poly("x+2"), Poly::from_ints(&[2, 1]));
        assert_eq!(poly("2x"), Poly::from_ints(&[0, 2]));
        assert_eq!(poly("-2"), Poly::from_ints(&[-2]));
        assert_eq!(poly("-1"), Poly::from_ints(&[-1]));
    }

    #[test]
    fn negated_group_agrees_at_sample_points() {
        let f = poly("-(x^2 - 1/2)");
        let expected = Poly::from_coeffs(vec![
            Rational::new(1, 2).unwrap(),
            Rational::zero(),
            Rational::from(-1),
        ]);
        assert_eq!(f, expected);
        // pointwise oracle: -(t^2 - 1/2)
        for t in [Rational::from(0), Rational::from(3), Rational::new(-5, 7).unwrap()] {
            let direct = -(&(&t * &t) - &Rational::new(1, 2).unwrap());
            assert_eq!(f.eval(&t), direct);
        }
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(poly("2+3*x^2"), poly("2+(3*(x^2))"));
        assert_eq!(poly("-x^2"), Poly::from_ints(&[0, 0, -1]));
        assert_eq!(poly("(-x)^2"), Poly::from_ints(&[0, 0, 1]));
        assert_eq!(poly("2(x+1)"), Poly::from_ints(&[2, 2]));
        assert_eq!(poly("3x^2"), Poly::from_ints(&[0, 0, 3]));
        assert_eq!(poly("1/2x"), Poly::from_coeffs(vec![Rational::zero(), Rational::new(1, 2).unwrap()]));
        assert_eq!(poly("x - -x"), Poly::from_ints(&[0, 2]));
        assert_eq!(poly("(x+1)*(x-1)"), Poly::from_ints(&[-1, 0, 1]));
        assert_eq!(poly("x^0"), Poly::one());
        assert_eq!(poly("x^4096").degree(), crate::poly::Degree::Finite(4096));
        assert_eq!(poly("(x+1)^200").coeff(100), Rational::from(crate::exactnum::binomial(200, 100).unwrap()));
        assert_eq!(poly("0"), Poly::zero());
    }

    #[test]
    fn rejected_inputs() {
        let e = parse_poly("x2").unwrap_err();
        assert_eq!(e.position, 1);
        assert!(parse_poly("x(x+1)").is_err());
        assert!(parse_poly("").is_err());
        assert!(parse_poly("(x+1").is_err());
        assert!(parse_poly("x/2").is_err());
        assert_eq!(parse_poly("x^-1").unwrap_err().kind, ParseErrorKind::BadExponent);
        assert_eq!(parse_poly("x^x").unwrap_err().kind, ParseErrorKind::BadExponent);
        let e = parse_poly("1/0 + x").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ZeroDenominator);
        assert_eq!(e.position, 2);
        assert_eq!(parse_poly("x^99999").unwrap_err().kind, ParseErrorKind::BadExponent);
        assert_eq!(
            parse_poly("((x+1)^4000)^4000").unwrap_err().kind,
            ParseErrorKind::TooLarge
        );
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-4/6").unwrap(), Rational::new(-2, 3).unwrap());
        assert_eq!(parse_rational("7").unwrap(), Rational::from(7));
        assert_eq!(parse_rational("0/5").unwrap(), Rational::zero());
        assert_eq!(parse_rational(" +3 / 9 ").unwrap(), Rational::new(1, 3).unwrap());
        assert_eq!(
            parse_rational("5/0").unwrap_err().kind,
            ParseErrorKind::ZeroDenominator
        );
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/2/3").is_err());
        assert!(parse_rational("--1").is_err());
    }

    fn canonical_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec((any::<i64>(), 1i64..=1_000_000), 0..=11).prop_map(|cs| {
            Poly::from_coeffs(
                cs.into_iter()
                    .map(|(n, d)| Rational::new(n, d).unwrap())
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in canonical_poly()) {
            let text = f.to_string();
            let back = parse_poly(&text).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(back.to_string(), text);
        }

        #[test]
        fn parser_is_total_on_bytes(bytes in prop::collection::vec(any::<u8>(), 0..=256)) {
            let src = String::from_utf8_lossy(&bytes);
            if let Ok(p) = parse_poly(&src) {
                prop_assert!(p.is_canonical());
            }
        }

        #[test]
        fn parser_is_total_on_grammar_soup(src in "[0-9x()+*/^ -]{0,256}") {
            match parse_poly(&src) {
                Ok(p) => prop_assert!(p.is_canonical()),
                Err(e) => prop_assert!(e.position <= src.chars().count()),
            }
        }
    }
}

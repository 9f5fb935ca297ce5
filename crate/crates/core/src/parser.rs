//! Text form of polynomials.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ['^' integer]
//! atom   := integer ['/' integer] | var
//! var    := 'x' index | 'y' index        (letter fixed by the space)
//! ```
//!
//! Implicit multiplication and parentheses are rejected.

use crate::error::{Error, Result};
use crate::field::{Field, Rat};
use crate::ring::{Monomial, Polynomial, Space};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    space: Space,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { offset, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(start, "expected a number");
        }
        Ok((start, std::str::from_utf8(&self.src[start..self.pos]).unwrap()))
    }

    fn integer(&mut self) -> Result<Rat> {
        let (start, s) = self.digits()?;
        match s.parse::<num_bigint::BigInt>() {
            Ok(n) => Ok(Rat::from_bigint(n)),
            Err(_) => self.err(start, "invalid integer"),
        }
    }

    fn small(&mut self, what: &str) -> Result<(usize, u32)> {
        let (start, s) = self.digits()?;
        match s.parse::<u32>() {
            Ok(n) => Ok((start, n)),
            Err(_) => self.err(start, format!("{what} out of range")),
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = Polynomial::zero(self.space, self.nvars);
        let mut sign = Rat::one();
        if self.eat(b'-') {
            sign = sign.neg();
        } else {
            self.eat(b'+');
        }
        loop {
            let t = self.term()?;
            acc = acc.add(&t.scale(&sign))?;
            if self.eat(b'+') {
                sign = Rat::one();
            } else if self.eat(b'-') {
                sign = Rat::one().neg();
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let f = self.factor()?;
            acc = acc.mul(&f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let (at, e) = self.small("exponent")?;
        if e > 255 {
            return self.err(at, "exponent out of range");
        }
        let mut acc = Polynomial::constant(self.space, self.nvars, Rat::one());
        for _ in 0..e {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let at = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let mut c = num;
                if self.eat(b'/') {
                    let dat = self.pos;
                    let den = self.integer()?;
                    if den.is_zero() {
                        return self.err(dat, "zero denominator");
                    }
                    c = c.mul(&den.inv());
                }
                Ok(Polynomial::constant(self.space, self.nvars, c))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                if c as char != self.space.letter() {
                    return self.err(at, format!("expected variable '{}<i>'", self.space.letter()));
                }
                if !self.src.get(self.pos).is_some_and(|d| d.is_ascii_digit()) {
                    return self.err(self.pos, "expected a variable index");
                }
                let (iat, i) = self.small("variable index")?;
                if i == 0 || i as usize > self.nvars {
                    return self.err(iat, format!("variable index {i} not in 1..={}", self.nvars));
                }
                Ok(Polynomial::var(self.space, self.nvars, i as usize - 1))
            }
            Some(_) => self.err(at, "unexpected character"),
            None => self.err(at, "unexpected end of input"),
        }
    }
}

/// Parses a polynomial in `nvars` variables of the given family.
pub fn parse_poly(src: &str, space: Space, nvars: usize) -> Result<Polynomial> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, space, nvars };
    let out = p.expr()?;
    if p.peek().is_some() {
        let at = p.pos;
        return p.err(at, "unexpected trailing input");
    }
    Ok(out)
}

/// A parsed polynomial together with the variables that occur in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseResult {
    pub value: Polynomial,
    /// 1-based indices of the variables with a nonzero exponent.
    pub consumed_variables: Vec<usize>,
}

pub fn parse(src: &str, space: Space, nvars: usize) -> Result<ParseResult> {
    let value = parse_poly(src, space, nvars)?;
    let consumed_variables = value.support_vars().into_iter().map(|i| i + 1).collect();
    Ok(ParseResult { value, consumed_variables })
}

fn print_monomial(m: &Monomial, letter: char) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("{letter}{}", i + 1)),
            _ => parts.push(format!("{letter}{}^{e}", i + 1)),
        }
    }
    parts.join("*")
}

/// Canonical text form: terms by decreasing degree, and within a degree
/// by increasing monomial order (`y1^3` before `y2^3`).
pub fn print_poly(p: &Polynomial) -> String {
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| a.cmp(b)));
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs();
        let mono = print_monomial(m, p.space().letter());
        if mono.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{a}*{mono}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn y(s: &str, n: usize) -> Polynomial {
        parse_poly(s, Space::Dual, n).unwrap()
    }

    #[test]
    fn parses_and_prints() {
        assert_eq!(print_poly(&y("y1^3 - y2^3", 2)), "y1^3 - y2^3");
        assert_eq!(print_poly(&y("-y2^3 + y1^3", 2)), "y1^3 - y2^3");
        assert_eq!(print_poly(&parse_poly("1/6*x1^3", Space::Ring, 1).unwrap()), "1/6*x1^3");
        assert_eq!(print_poly(&y("y1*y2*y3 + y4^2 + y5^2", 5)), "y1*y2*y3 + y4^2 + y5^2");
        assert_eq!(print_poly(&y("y1*y2 + y2*y1", 2)), "2*y1*y2");
        assert_eq!(print_poly(&y("y1^0*y2^2*y2", 2)), "y2^3");
        assert_eq!(print_poly(&y("-1/2*y1*y2^2", 2)), "-1/2*y1*y2^2");
        assert_eq!(print_poly(&y("0", 3)), "0");
        assert_eq!(print_poly(&y("2/4 - 1", 1)), "-1/2");
    }

    #[test]
    fn reports_consumed_variables() {
        let r = parse("y1^3 + y3^2 + 0*y2", Space::Dual, 4).unwrap();
        assert_eq!(r.consumed_variables, vec![1, 3]);
    }

    #[test]
    fn reports_error_positions() {
        assert_eq!(
            parse_poly("y1^", Space::Dual, 2).unwrap_err(),
            Error::Parse { offset: 3, message: "expected a number".into() }
        );
        assert!(matches!(parse_poly("y3", Space::Dual, 2), Err(Error::Parse { offset: 1, .. })));
        assert!(matches!(parse_poly("x1", Space::Dual, 2), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(parse_poly("y1 y2", Space::Dual, 2), Err(Error::Parse { offset: 3, .. })));
        assert!(matches!(parse_poly("1/0", Space::Dual, 1), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(parse_poly("(y1)", Space::Dual, 1), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(parse_poly("2y1", Space::Dual, 1), Err(Error::Parse { offset: 1, .. })));
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        (1usize..=5).prop_flat_map(|nvars| {
            let term = (-20i64..=20, 1i64..=6, proptest::collection::vec(0u8..=4, nvars))
                .prop_filter("degree at most 4", |(_, _, e)| e.iter().map(|&x| x as usize).sum::<usize>() <= 4);
            proptest::collection::vec(term, 0..6).prop_map(move |ts| {
                Polynomial::from_terms(
                    Space::Dual,
                    nvars,
                    ts.into_iter().map(|(n, d, e)| (Monomial::new(e), Rat::new(n, d))),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(p in arb_poly()) {
            let s = print_poly(&p);
            let q = parse_poly(&s, Space::Dual, p.nvars()).unwrap();
            prop_assert_eq!(&q, &p);
            prop_assert_eq!(print_poly(&q), s);
        }
    }
}

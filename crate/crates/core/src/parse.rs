//! Text format for exact holomorphic polynomials, used by configs and
//! fixtures. Example literals:
//!
//! ```text
//! 2*z1^2*z2 - (1+3i)*z3
//! 1/3*z1 + z2^4
//! -z1*z2
//! 0
//! ```
//!
//! Grammar (whitespace allowed between tokens):
//!
//! ```text
//! poly     := ['+'|'-'] term { ('+'|'-') term }
//! term     := factor { '*' factor }
//! factor   := '(' complex ')' | rational | var
//! var      := 'z' digits [ '^' digits ]
//! complex  := rational [('+'|'-') [rational] 'i'] | [rational] 'i'
//! rational := digits [ '/' digits ]
//! ```
//!
//! Printing uses basis term order with coefficients rendered as `p/q` or
//! `(p/q+r/s i)`, so print -> parse is lossless for exact scalars.

use num::{One, Signed, Zero};

use crate::error::{CoreError, Result};
use crate::multiindex::MultiIndex;
use crate::poly::HoloPoly;
use crate::scalar::{format_rat, ExactC, Rat};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor {
            bytes: s.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", b as char)))
        }
    }

    fn error(&self, message: impl Into<String>) -> CoreError {
        CoreError::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn digits(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected digits"));
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn rational(&mut self) -> Result<Rat> {
        let numer: num::BigInt = self
            .digits()?
            .parse()
            .map_err(|_| self.error("bad integer"))?;
        if self.eat(b'/') {
            let denom: num::BigInt = self
                .digits()?
                .parse()
                .map_err(|_| self.error("bad integer"))?;
            if denom.is_zero() {
                return Err(self.error("zero denominator"));
            }
            Ok(Rat::new(numer, denom))
        } else {
            Ok(Rat::from(numer))
        }
    }

    /// Body of a parenthesized complex literal, e.g. `1+3i`, `1/2-2/3i`, `i`, `-2i`, `3`.
    fn complex(&mut self) -> Result<ExactC> {
        let neg_first = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        // Pure imaginary with implicit 1: `i` or `-i`.
        if self.eat(b'i') {
            let im = if neg_first { -Rat::one() } else { Rat::one() };
            return Ok(ExactC::new(Rat::zero(), im));
        }
        let first = self.rational()?;
        let first = if neg_first { -first } else { first };
        if self.eat(b'i') {
            return Ok(ExactC::new(Rat::zero(), first));
        }
        let im_sign = match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                false
            }
            Some(b'-') => {
                self.pos += 1;
                true
            }
            _ => return Ok(ExactC::new(first, Rat::zero())),
        };
        let im_mag = if self.peek() == Some(b'i') {
            Rat::one()
        } else {
            self.rational()?
        };
        self.expect(b'i')?;
        let im = if im_sign { -im_mag } else { im_mag };
        Ok(ExactC::new(first, im))
    }

    fn var(&mut self, n: usize) -> Result<(usize, u32)> {
        self.expect(b'z')?;
        let idx: usize = self
            .digits()?
            .parse()
            .map_err(|_| self.error("bad variable index"))?;
        if idx < 1 || idx > n {
            return Err(self.error(format!("variable z{idx} out of range for dimension {n}")));
        }
        let exp = if self.eat(b'^') {
            self.digits()?
                .parse()
                .map_err(|_| self.error("bad exponent"))?
        } else {
            1
        };
        Ok((idx, exp))
    }

    /// One product of factors, returned as (coefficient, exponent vector).
    fn term(&mut self, n: usize) -> Result<(ExactC, MultiIndex)> {
        let mut coeff = ExactC::new(Rat::one(), Rat::zero());
        let mut exps = vec![0u32; n];
        loop {
            match self.peek() {
                Some(b'(') => {
                    self.pos += 1;
                    let c = self.complex()?;
                    self.expect(b')')?;
                    coeff = coeff * c;
                }
                Some(b'z') => {
                    let (idx, exp) = self.var(n)?;
                    exps[idx - 1] += exp;
                }
                Some(d) if d.is_ascii_digit() => {
                    let r = self.rational()?;
                    coeff = coeff * ExactC::new(r, Rat::zero());
                }
                _ => return Err(self.error("expected a coefficient or variable")),
            }
            if !self.eat(b'*') {
                break;
            }
        }
        Ok((coeff, MultiIndex::new(exps)))
    }
}

/// Parse a polynomial literal in dimension `n`.
pub fn parse_poly(input: &str, n: usize) -> Result<HoloPoly<ExactC>> {
    let mut cur = Cursor::new(input);
    let mut poly = HoloPoly::zero(n);
    let mut negate = match cur.peek() {
        Some(b'-') => {
            cur.pos += 1;
            true
        }
        Some(b'+') => {
            cur.pos += 1;
            false
        }
        _ => false,
    };
    loop {
        let (coeff, alpha) = cur.term(n)?;
        let coeff = if negate { -coeff } else { coeff };
        poly.add_term(alpha, coeff);
        match cur.peek() {
            Some(b'+') => {
                cur.pos += 1;
                negate = false;
            }
            Some(b'-') => {
                cur.pos += 1;
                negate = true;
            }
            None => break,
            Some(other) => {
                return Err(cur.error(format!("unexpected `{}`", other as char)));
            }
        }
    }
    Ok(poly)
}

fn format_coeff(c: &ExactC) -> String {
    if c.im.is_zero() {
        format_rat(&c.re)
    } else if c.re.is_zero() {
        format!("({}i)", format_rat(&c.im))
    } else if c.im.is_negative() {
        format!("({}-{}i)", format_rat(&c.re), format_rat(&c.im.abs()))
    } else {
        format!("({}+{}i)", format_rat(&c.re), format_rat(&c.im))
    }
}

fn format_monomial(alpha: &MultiIndex) -> String {
    let mut parts = Vec::new();
    for (i, &e) in alpha.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("z{}", i + 1)),
            _ => parts.push(format!("z{}^{}", i + 1, e)),
        }
    }
    parts.join("*")
}

/// Canonical text form; `parse_poly(format_poly(p), n) == p` exactly.
pub fn format_poly(p: &HoloPoly<ExactC>) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (alpha, coeff)) in p.terms().enumerate() {
        let (lead, body) = render_term(alpha, coeff);
        if idx == 0 {
            if lead {
                out.push('-');
            }
            out.push_str(&body);
        } else {
            out.push_str(if lead { " - " } else { " + " });
            out.push_str(&body);
        }
    }
    out
}

/// Returns (negated, body) so callers can place the sign between terms.
fn render_term(alpha: &MultiIndex, coeff: &ExactC) -> (bool, String) {
    let mono = format_monomial(alpha);
    // Real coefficients move their sign out of the term; complex ones keep
    // it inside the parentheses.
    if coeff.im.is_zero() {
        let neg = coeff.re.is_negative();
        let mag = coeff.re.abs();
        let body = if mono.is_empty() {
            format_rat(&mag)
        } else if mag.is_one() {
            mono
        } else {
            format!("{}*{}", format_rat(&mag), mono)
        };
        (neg, body)
    } else {
        let c = format_coeff(coeff);
        let body = if mono.is_empty() {
            c
        } else {
            format!("{c}*{mono}")
        };
        (false, body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num::Zero;

    #[test]
    fn parses_spec_shaped_literal() {
        let p = parse_poly("2*z1^2*z2 - (1+3i)*z3", 3).unwrap();
        assert_eq!(p.num_terms(), 2);
        let c = p.coeff(&MultiIndex::new(vec![2, 1, 0]));
        assert_eq!(c, ExactC::new(rat(2, 1), Rat::zero()));
        let c = p.coeff(&MultiIndex::new(vec![0, 0, 1]));
        assert_eq!(c, ExactC::new(rat(-1, 1), rat(-3, 1)));
    }

    #[test]
    fn parses_rational_coefficients() {
        let p = parse_poly("1/3*z1 + 2/5", 2).unwrap();
        assert_eq!(p.coeff(&MultiIndex::new(vec![1, 0])), ExactC::new(rat(1, 3), Rat::zero()));
        assert_eq!(p.coeff(&MultiIndex::zero(2)), ExactC::new(rat(2, 5), Rat::zero()));
    }

    #[test]
    fn parses_bare_imaginary_unit() {
        let p = parse_poly("(i)*z1 + (-i)", 1).unwrap();
        assert_eq!(
            p.coeff(&MultiIndex::new(vec![1])),
            ExactC::new(Rat::zero(), rat(1, 1))
        );
        assert_eq!(
            p.coeff(&MultiIndex::zero(1)),
            ExactC::new(Rat::zero(), rat(-1, 1))
        );
    }

    #[test]
    fn zero_literal() {
        let p = parse_poly("0", 2).unwrap();
        assert!(p.is_zero());
        assert_eq!(format_poly(&p), "0");
    }

    #[test]
    fn rejects_out_of_range_variable() {
        assert!(parse_poly("z3", 2).is_err());
        assert!(parse_poly("z0", 2).is_err());
    }

    #[test]
    fn rejects_trailing_garbage() {
        assert!(parse_poly("z1 )", 2).is_err());
        assert!(parse_poly("1//2", 1).is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        let cases = [
            "2*z1^2*z2 - (1+3i)*z3",
            "1/3*z1 + z2^4 - 7",
            "-z1*z2",
            "(2/3-1/5i)*z1^3 + (4i)*z2",
            "0",
        ];
        for s in cases {
            let p = parse_poly(s, 3).unwrap();
            let printed = format_poly(&p);
            let q = parse_poly(&printed, 3).unwrap();
            assert_eq!(p, q, "round trip failed for {s} -> {printed}");
        }
    }
}

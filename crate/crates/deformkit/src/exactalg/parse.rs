use num_bigint::BigInt;
use num_traits::Zero;

use super::{AlgError, Chart, LocalizedPoly, Rational};

/// Parse an arithmetic expression over a chart: `+ - * / ^`, parentheses,
/// integers, `p/q` rationals and variable names. Division is only allowed by
/// units of the chart algebra.
pub fn parse_expr(chart: &Chart, src: &str) -> Result<LocalizedPoly, AlgError> {
    let mut p = Parser { chart, s: src.as_bytes(), pos: 0 };
    let v = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    chart: &'a Chart,
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> AlgError {
        AlgError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).cloned()
    }

    fn expr(&mut self) -> Result<LocalizedPoly, AlgError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LocalizedPoly, AlgError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.power()?;
                    let inv = d.inverse().ok_or(AlgError::Parse {
                        pos: at,
                        msg: format!("{} is not invertible on {}", d.render(), self.chart.render()),
                    })?;
                    acc = acc.mul(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<LocalizedPoly, AlgError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected exponent"));
            }
            let e: u32 = std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<LocalizedPoly, AlgError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let n: BigInt = std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().unwrap();
                Ok(LocalizedPoly::constant(self.chart, Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                match self.chart.vars.iter().position(|v| v == name) {
                    Some(i) => Ok(LocalizedPoly::var(self.chart, i)),
                    None => Err(AlgError::Parse { pos: start, msg: format!("unknown variable {}", name) }),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parse a rational literal `n` or `n/d`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().ok()?;
            let d: BigInt = b.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{q, ChartData, Poly};

    #[test]
    fn parses_and_renders() {
        let c = ChartData::polynomial(&["x", "y"]);
        let p = parse_expr(&c, "3/2*x^2*y - (1 - x)*0 - 1").unwrap();
        assert_eq!(p.render(), "3/2*x^2*y - 1");
        assert_eq!(parse_expr(&c, &p.render()).unwrap(), p);
    }

    #[test]
    fn division_by_unit_only() {
        let c = ChartData::localized(&["x"], vec![Poly::var(1, 0)]);
        let p = parse_expr(&c, "1/x^2 + x").unwrap();
        assert_eq!(parse_expr(&c, &p.render()).unwrap(), p);
        assert!(parse_expr(&c, "1/(x+1)").is_err());
        assert!(parse_expr(&c, "z").is_err());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("-3/6"), Some(q(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
    }
}

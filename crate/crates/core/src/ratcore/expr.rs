use num_bigint::BigInt;

use super::{PolyFraction, RatError, Rational};

/// Parses an arithmetic expression into a [`PolyFraction`].
///
/// Grammar: integers, identifiers, parentheses, binary `+ - * /`, unary minus,
/// and `^` with an integer exponent (negative exponents must be parenthesized).
/// Multiplication is always explicit.
pub fn parse_polyfrac(src: &str) -> Result<PolyFraction, RatError> {
    let mut p = Parser { s: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> RatError {
        RatError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), RatError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<PolyFraction, RatError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PolyFraction, RatError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let f = self.unary()?;
            acc = if c == b'*' {
                acc.mul(&f)
            } else {
                if f.num.is_zero() {
                    return Err(self.err("division by zero"));
                }
                acc.div(&f)
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<PolyFraction, RatError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        self.power()
    }

    fn power(&mut self) -> Result<PolyFraction, RatError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let exp = if self.peek() == Some(b'(') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = self.integer()?;
            self.expect(b')')?;
            if neg {
                -e
            } else {
                e
            }
        } else {
            self.integer()?
        };
        let exp: i32 = exp.try_into().map_err(|_| self.err("exponent too large"))?;
        if exp < 0 && base.num.is_zero() {
            return Err(self.err("zero to a negative power"));
        }
        Ok(base.pow(exp))
    }

    fn integer(&mut self) -> Result<BigInt, RatError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let t = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(t.parse().unwrap())
    }

    fn atom(&mut self) -> Result<PolyFraction, RatError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(PolyFraction::constant(Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                Ok(PolyFraction::var(name))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

//! Parser for coefficient strings.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := atom ('^' ['-'] integer)?
//! atom    := number | name | '(' expr ')'
//! number  := digits ('.' digits)?
//! name    := [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! A rational such as `3/4` is simply the quotient of two numbers. Names must
//! be scalar generators of the chart the string is parsed against.

use crate::coeff::CoefficientFunction;
use crate::error::Error;
use crate::rational::Rational;

pub fn parse_coefficient(src: &str, names: &[String]) -> Result<CoefficientFunction, Error> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, names };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in `{}`", self.pos, String::from_utf8_lossy(self.src)))
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

    fn expr(&mut self) -> Result<CoefficientFunction, Error> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<CoefficientFunction, Error> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                b'/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    acc = acc.div(&d).ok_or_else(|| self.err("division by zero"))?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<CoefficientFunction, Error> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<CoefficientFunction, Error> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected integer exponent"));
            }
            let e: i32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("exponent too large"))?;
            let e = if neg { -e } else { e };
            return base.pow(e).ok_or_else(|| self.err("zero raised to a negative power"));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<CoefficientFunction, Error> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let r: Rational = text.parse().map_err(|_| self.err("malformed number"))?;
                Ok(CoefficientFunction::constant(r))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.names.iter().position(|n| n == name) {
                    Some(i) => Ok(CoefficientFunction::generator(i)),
                    None => Err(Error::UnknownGenerator(name.to_string())),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["t".into(), "x".into()]
    }

    #[test]
    fn precedence_and_rationals() {
        let f = parse_coefficient("-3/4*t^2 + x/(t - 1)", &names()).unwrap();
        let t = CoefficientFunction::generator(0);
        let x = CoefficientFunction::generator(1);
        let expected = t
            .mul(&t)
            .scale(&Rational::new(-3, 4))
            .add(&x.div(&t.sub(&CoefficientFunction::one())).unwrap());
        assert_eq!(f, expected);
    }

    #[test]
    fn negative_exponent_and_unary() {
        let f = parse_coefficient("-t^-2", &names()).unwrap();
        let t = CoefficientFunction::generator(0);
        assert_eq!(f, t.mul(&t).recip().unwrap().neg());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_coefficient("y + 1", &names()), Err(Error::UnknownGenerator(_))));
        assert!(parse_coefficient("(t", &names()).is_err());
        assert!(parse_coefficient("1/0", &names()).is_err());
        assert!(parse_coefficient("t t", &names()).is_err());
    }

    #[test]
    fn printing_round_trips() {
        let src = "(2*t^2 - 1/3*x)/(t*(x + t)^2)";
        let f = parse_coefficient(src, &names()).unwrap();
        let printed = f.format_with(&names());
        let g = parse_coefficient(&printed, &names()).unwrap();
        assert_eq!(f, g);
    }
}

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Exponent, Polynomial, Rational};
use crate::{Error, Result};

struct Cursor {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Cursor {
    fn new(text: &str) -> Self {
        Cursor {
            chars: text.chars().enumerate().collect(),
            pos: 0,
        }
    }

    fn column(&self) -> usize {
        self.chars.get(self.pos).map_or(self.chars.len(), |c| c.0) + 1
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        s.parse().ok()
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::parse(self.column(), message)
    }
}

fn parse_signed_int(cur: &mut Cursor) -> Result<i64> {
    cur.skip_ws();
    let negative = cur.eat('-');
    let col = cur.column();
    let digits = cur
        .digits()
        .ok_or_else(|| cur.error("expected an integer exponent"))?;
    let value: i64 = digits
        .try_into()
        .map_err(|_| Error::parse(col, "exponent out of range"))?;
    Ok(if negative { -value } else { value })
}

fn parse_factor(cur: &mut Cursor, nvars: usize, coeff: &mut Rational, exp: &mut [i64]) -> Result<()> {
    cur.skip_ws();
    let col = cur.column();
    match cur.peek() {
        Some(c) if c.is_ascii_digit() => {
            let numer = cur.digits().expect("digit present");
            let mut value = Rational::from_integer(numer);
            if cur.eat('/') {
                let denom = cur
                    .digits()
                    .ok_or_else(|| cur.error("expected a denominator"))?;
                if denom.is_zero() {
                    return Err(Error::parse(col, "zero denominator"));
                }
                value /= Rational::from_integer(denom);
            }
            *coeff *= value;
            Ok(())
        }
        Some('u') => {
            cur.bump();
            let index = match cur.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let d = cur.digits().expect("digit present");
                    usize::try_from(d).map_err(|_| Error::parse(col, "variable index out of range"))?
                }
                _ if nvars == 1 => 1,
                _ => return Err(cur.error("expected a variable index after `u`")),
            };
            if index == 0 || index > nvars {
                return Err(Error::parse(
                    col,
                    format!("variable u{index} outside u1..u{nvars}"),
                ));
            }
            let power = if cur.eat('^') { parse_signed_int(cur)? } else { 1 };
            exp[index - 1] += power;
            Ok(())
        }
        Some(c) => Err(cur.error(format!("unexpected character `{c}`"))),
        None => Err(cur.error("unexpected end of input")),
    }
}

pub(super) fn parse_polynomial(nvars: usize, text: &str) -> Result<Polynomial> {
    let mut cur = Cursor::new(text);
    let mut out = Polynomial::zero(nvars);
    let mut terms = Vec::new();
    cur.skip_ws();
    if cur.peek().is_none() {
        return Err(cur.error("empty polynomial"));
    }
    let mut first = true;
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            break;
        }
        let mut sign = Rational::one();
        if cur.eat('-') {
            sign = -sign;
        } else if !cur.eat('+') && !first {
            return Err(cur.error("expected `+` or `-` between terms"));
        }
        first = false;
        let mut coeff = sign;
        let mut exp = vec![0i64; nvars];
        parse_factor(&mut cur, nvars, &mut coeff, &mut exp)?;
        while cur.eat('*') {
            parse_factor(&mut cur, nvars, &mut coeff, &mut exp)?;
        }
        terms.push((coeff, Exponent::new(exp)));
    }
    for (c, e) in terms {
        out = out.try_add(&Polynomial::monomial(c, e))?;
    }
    Ok(out)
}

/// Largest `k` appearing as `u{k}`, or 1 for a bare `u`.
pub(super) fn max_variable(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut best = 0;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'u' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let k = text[i + 1..j].parse::<usize>().unwrap_or(1);
            best = best.max(k);
            i = j;
        } else {
            i += 1;
        }
    }
    best
}

/// Parses a rational literal: `p`, `p/q`, optionally signed.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    let negative = if cur.eat('-') {
        true
    } else {
        cur.eat('+');
        false
    };
    let col = cur.column();
    let numer = cur.digits().ok_or_else(|| cur.error("expected a rational literal"))?;
    let mut value = Rational::from_integer(numer);
    if cur.eat('/') {
        let denom = cur.digits().ok_or_else(|| cur.error("expected a denominator"))?;
        if denom.is_zero() {
            return Err(Error::parse(col, "zero denominator"));
        }
        value /= Rational::from_integer(denom);
    }
    cur.skip_ws();
    if cur.peek().is_some() {
        return Err(cur.error("trailing characters after rational literal"));
    }
    Ok(if negative { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn parses_spec_syntax() {
        let f = parse_polynomial(2, "3/2*u1^2*u2^-1").unwrap();
        let (e, c) = f.as_monomial().unwrap();
        assert_eq!(e.entries(), &[2, -1]);
        assert_eq!(c, &rat(3, 2));
        let g = parse_polynomial(2, "u1*u1 - 2 + u2").unwrap();
        assert_eq!(g.to_string(), "-2 + u2 + u1^2");
    }

    #[test]
    fn error_columns() {
        match parse_polynomial(2, "u1 + u3") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("{other:?}"),
        }
        match parse_polynomial(1, "1 + # u") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_polynomial(1, "").is_err());
        assert!(parse_polynomial(1, "1/0").is_err());
        assert!(parse_polynomial(1, "u u").is_err());
        assert!(parse_polynomial(2, "u").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/1").unwrap(), int(3));
        assert_eq!(parse_rational(" -4/6 ").unwrap(), rat(-2, 3));
        assert!(parse_rational("3/").is_err());
        assert!(parse_rational("1/2x").is_err());
    }

    #[test]
    fn infers_dimension() {
        let f: Polynomial = "u1 + u3^2".parse().unwrap();
        assert_eq!(f.nvars(), 3);
        let g: Polynomial = "u + 1".parse().unwrap();
        assert_eq!(g.nvars(), 1);
    }
}

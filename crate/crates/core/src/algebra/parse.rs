//! Parsing and canonical printing of polynomials.
//!
//! Grammar (explicit `*` required, `t` names the finite-field generator):
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor | '/' nat)*
//! factor := atom ('^' nat)?
//! atom   := nat | var | 't' | '(' expr ')'
//! ```
//!
//! Printing is canonical: terms ascend by total degree with lexicographic
//! ties, so printed traces are byte-stable and round-trip through the parser.

use num::bigint::BigInt;

use super::coeff::{Field, K};
use super::poly::Poly;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LPar,
    RPar,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut it = src.chars().peekable();
    while let Some(&c) = it.peek() {
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                it.next();
            }
            '+' => {
                it.next();
                out.push(Tok::Plus);
            }
            '-' => {
                it.next();
                out.push(Tok::Minus);
            }
            '*' => {
                it.next();
                out.push(Tok::Star);
            }
            '/' => {
                it.next();
                out.push(Tok::Slash);
            }
            '^' => {
                it.next();
                out.push(Tok::Caret);
            }
            '(' => {
                it.next();
                out.push(Tok::LPar);
            }
            ')' => {
                it.next();
                out.push(Tok::RPar);
            }
            '0'..='9' => {
                let mut s = String::new();
                while let Some(&d) = it.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Num(s.parse().map_err(|_| {
                    Error::Parse(format!("bad integer literal {}", s))
                })?));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = it.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Ident(s));
            }
            other => return Err(Error::Parse(format!("unexpected character '{}'", other))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [&'a str],
    field: &'a Field,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_nat(&mut self) -> Result<BigInt> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(n),
            other => Err(Error::Parse(format!("expected a number, found {:?}", other))),
        }
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut negate = false;
        if self.peek() == Some(&Tok::Minus) {
            self.next();
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.next();
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Some(Tok::Slash) => {
                    self.next();
                    let n = self.expect_nat()?;
                    let d = self.field.from_bigint(&n);
                    let inv = d.inv().map_err(|_| {
                        Error::Parse(format!("division by {} is not invertible here", n))
                    })?;
                    acc = acc.scale(&inv);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.next();
            let n = self.expect_nat()?;
            let e: u32 = n
                .try_into()
                .map_err(|_| Error::Parse("exponent out of range".into()))?;
            if e > u16::MAX as u32 {
                return Err(Error::Parse("exponent out of range".into()));
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.next() {
            Some(Tok::Num(n)) => Ok(Poly::constant(
                self.field.clone(),
                self.nvars(),
                self.field.from_bigint(&n),
            )),
            Some(Tok::Ident(name)) => {
                if let Some(i) = self.vars.iter().position(|&v| v == name) {
                    return Ok(Poly::var(self.field.clone(), self.nvars(), i));
                }
                if name == "t" {
                    return match self.field {
                        Field::Fq(f) if f.k > 1 => Ok(Poly::constant(
                            self.field.clone(),
                            self.nvars(),
                            K::F(f.gen()),
                        )),
                        _ => Err(Error::Parse(
                            "generator t only exists in a proper extension field".into(),
                        )),
                    };
                }
                Err(Error::Parse(format!("unknown variable '{}'", name)))
            }
            Some(Tok::LPar) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RPar) => Ok(e),
                    _ => Err(Error::Parse("unbalanced parentheses".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {:?}", other))),
        }
    }
}

pub fn parse_poly(src: &str, vars: &[&str], field: &Field) -> Result<Poly> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut p = Parser { toks, pos: 0, vars, field };
    let poly = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!(
            "trailing input at token {} in '{}'",
            p.pos, src
        )));
    }
    Ok(poly)
}

/// Univariate polynomial in t over F_p as a coefficient vector (for minimal
/// polynomials in job files).
pub fn parse_fp_poly(src: &str, p: u64) -> Result<Vec<u64>> {
    // Parse over Q with t as the only variable, then reduce mod p.
    let f = parse_poly(src, &["t"], &Field::Q)?;
    let deg = f.degree().unwrap_or(0) as usize;
    let mut out = vec![0u64; deg + 1];
    for (m, k) in &f.terms {
        let K::Q(r) = k else { unreachable!() };
        if !num::One::is_one(r.denom()) {
            return Err(Error::Parse("minimal polynomial must have integer coefficients".into()));
        }
        let big_p = BigInt::from(p);
        let residue = ((r.numer() % &big_p) + &big_p) % &big_p;
        let residue: u64 = residue.try_into().unwrap();
        out[m.get(0) as usize] = residue;
    }
    while out.last() == Some(&0) && out.len() > 1 {
        out.pop();
    }
    Ok(out)
}

fn print_coeff(k: &K) -> (bool, String) {
    // (negative-over-Q, magnitude text)
    match k {
        K::Q(r) => {
            use num::Signed;
            if r.is_negative() {
                let pos = -r;
                (true, K::Q(pos).to_string())
            } else {
                (false, k.to_string())
            }
        }
        K::F(_) => (false, k.to_string()),
    }
}

/// Canonical printing; inverse of [`parse_poly`] up to term normalisation.
pub fn print_poly(f: &Poly, vars: &[&str]) -> String {
    if f.terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (m, k)) in f.terms.iter().enumerate() {
        let (neg, mag) = print_coeff(k);
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut parts: Vec<String> = Vec::new();
        let coeff_is_one = mag == "1";
        let needs_coeff = !coeff_is_one || m.is_one();
        if needs_coeff {
            if mag.contains(" + ") && !m.is_one() {
                parts.push(format!("({})", mag));
            } else {
                parts.push(mag);
            }
        }
        for i in 0..f.nvars {
            let e = m.get(i);
            if e == 0 {
                continue;
            }
            if e == 1 {
                parts.push(vars[i].to_string());
            } else {
                parts.push(format!("{}^{}", vars[i], e));
            }
        }
        out.push_str(&parts.join("*"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fq::FqField;

    #[test]
    fn parse_print_round_trip_q() {
        let vars = ["x", "y", "z"];
        for src in [
            "z^2 - x^2*y",
            "x^2 + y^2 + z^5",
            "z^3 - x^2*y^2",
            "1/2*x - 3/4",
            "x^3 - 2*x*y*z + 7",
            "-x + y",
            "0",
        ] {
            let f = parse_poly(src, &vars, &Field::Q).unwrap();
            let s = print_poly(&f, &vars);
            let g = parse_poly(&s, &vars, &Field::Q).unwrap();
            assert_eq!(f, g, "round trip of {} printed {}", src, s);
        }
    }

    #[test]
    fn parse_print_round_trip_f4() {
        let f4 = Field::Fq(FqField::extension(2, 2).unwrap());
        let vars = ["x", "y"];
        for src in ["(t + 1)*x^2 + t*y", "x^2 + t^3*y", "t + x"] {
            let f = parse_poly(src, &vars, &f4).unwrap();
            let s = print_poly(&f, &vars);
            let g = parse_poly(&s, &vars, &f4).unwrap();
            assert_eq!(f, g, "round trip of {} printed {}", src, s);
        }
        // t^2 + t + 1 = 0 in F_4.
        let zero = parse_poly("t^2 + t + 1", &vars, &f4).unwrap();
        assert!(zero.is_exactly_zero());
    }

    #[test]
    fn printing_is_canonical_order() {
        let f = parse_poly("y^2 + x^2 + x*y + 1 + y + x", &["x", "y"], &Field::Q).unwrap();
        assert_eq!(print_poly(&f, &["x", "y"]), "1 + x + y + x^2 + x*y + y^2");
    }

    #[test]
    fn reduction_mod_p_in_parser() {
        let f2 = Field::Fq(FqField::prime(2).unwrap());
        let f = parse_poly("2*x + 3*y", &["x", "y"], &f2).unwrap();
        assert_eq!(print_poly(&f, &["x", "y"]), "y");
    }

    #[test]
    fn min_poly_text() {
        assert_eq!(parse_fp_poly("t^2 + t + 1", 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(parse_fp_poly("t^2 + 1", 3).unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_poly("x + w", &["x", "y"], &Field::Q).is_err());
        assert!(parse_poly("x +", &["x"], &Field::Q).is_err());
        assert!(parse_poly("(x", &["x"], &Field::Q).is_err());
        assert!(parse_poly("t*x", &["x"], &Field::Q).is_err());
        let f2 = Field::Fq(FqField::prime(2).unwrap());
        assert!(parse_poly("x/2", &["x"], &f2).is_err());
    }
}

//! Text notation for forms, e.g. `2*T1^3*T2 dlogT1^dT3 - T2^-1 dT1`.
//!
//! Terms are joined by `+`/`-`. A term is an optional coefficient and
//! monomial (`*`-separated factors) followed by a `^`-separated wedge of
//! generators `dlogTi` / `dTi`. The printer emits canonical output:
//! coefficients in `1..p`, generators increasing, terms in storage order.
//! Generators may be given in any order when parsing; the permutation
//! sign is applied and `dTi` on a log variable becomes `Ti dlogTi`.

use std::fmt;

use super::form::LogForm;
use super::ring::{FormRing, GenSet, Multidegree, Term};
use crate::error::{Error, Result};

impl fmt::Display for LogForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (t, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", format_term(self.ring(), t, c))?;
        }
        Ok(())
    }
}

fn format_term(ring: &FormRing, t: &Term, c: u8) -> String {
    let mono: Vec<String> = (0..ring.nvars())
        .filter(|&k| t.exponent.0[k] != 0)
        .map(|k| match t.exponent.0[k] {
            1 => format!("T{}", ring.label(k)),
            e => format!("T{}^{}", ring.label(k), e),
        })
        .collect();
    let gens: Vec<String> = t
        .gens
        .positions()
        .map(|k| {
            if ring.is_log(k) {
                format!("dlogT{}", ring.label(k))
            } else {
                format!("dT{}", ring.label(k))
            }
        })
        .collect();
    let body = if !mono.is_empty() {
        let m = mono.join("*");
        if c == 1 {
            m
        } else {
            format!("{c}*{m}")
        }
    } else if c == 1 && !gens.is_empty() {
        String::new()
    } else {
        c.to_string()
    };
    match (body.is_empty(), gens.is_empty()) {
        (_, true) => body,
        (true, false) => gens.join("^"),
        (false, false) => format!("{body} {}", gens.join("^")),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: FormRing,
}

#[derive(Clone, Copy)]
enum Generator {
    Dlog(usize),
    D(usize),
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { position: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<i64> {
        let start = self.pos;
        let negative = self.eat("-");
        let digits_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return self.err("expected a number");
        }
        let text = std::str::from_utf8(&self.src[digits_start..self.pos]).expect("ascii digits");
        let v: i64 = text.parse().map_err(|_| Error::Parse { position: start, message: "number too large".into() })?;
        Ok(if negative { -v } else { v })
    }

    fn variable(&mut self) -> Result<usize> {
        let at = self.pos;
        let label = self.number()?;
        if !(0..=255).contains(&label) {
            self.pos = at;
            return self.err("variable label out of range");
        }
        self.ring
            .position(label as u8)
            .map_err(|_| Error::Parse { position: at, message: format!("unknown variable T{label}") })
    }

    /// Whether a `^` at the cursor introduces an exponent (digit or minus follows).
    fn caret_is_exponent(&self) -> bool {
        let mut i = self.pos + 1;
        while i < self.src.len() && self.src[i] == b' ' {
            i += 1;
        }
        matches!(self.src.get(i), Some(c) if c.is_ascii_digit() || *c == b'-')
    }

    fn term(&mut self) -> Result<(i64, Multidegree, Vec<Generator>)> {
        let mut coeff: i64 = 1;
        let mut exps = Multidegree::zero();
        let mut gens = Vec::new();
        let mut saw_any = false;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let v = self.number()?;
                    coeff = (coeff * (v % self.ring.p() as i64)) % self.ring.p() as i64;
                }
                Some(b'T') => {
                    self.pos += 1;
                    let k = self.variable()?;
                    let mut e = 1;
                    self.skip_ws();
                    if self.peek() == Some(b'^') && self.caret_is_exponent() {
                        self.pos += 1;
                        self.skip_ws();
                        e = self.number()?;
                    }
                    exps.0[k] += i32::try_from(e).map_err(|_| Error::Parse {
                        position: self.pos,
                        message: "exponent out of range".into(),
                    })?;
                }
                Some(b'd') => {
                    gens.push(self.generator()?);
                    loop {
                        self.skip_ws();
                        if self.eat("^") || self.eat("∧") {
                            self.skip_ws();
                            gens.push(self.generator()?);
                        } else {
                            break;
                        }
                    }
                    break;
                }
                _ => {
                    if !saw_any {
                        return self.err("expected a term");
                    }
                    break;
                }
            }
            saw_any = true;
            self.skip_ws();
            if self.eat("*") {
                continue;
            }
            match self.peek() {
                Some(b'd') => continue,
                Some(b'^') => {
                    // a wedge sign between the monomial and the generators
                    self.pos += 1;
                    continue;
                }
                _ => break,
            }
        }
        Ok((coeff, exps, gens))
    }

    fn generator(&mut self) -> Result<Generator> {
        if self.eat("dlogT") {
            Ok(Generator::Dlog(self.variable()?))
        } else if self.eat("dT") {
            Ok(Generator::D(self.variable()?))
        } else {
            self.err("expected dlogT<i> or dT<i>")
        }
    }
}

impl LogForm {
    /// Parses a form; its degree is read off the terms (`0` parses as the zero function).
    pub fn parse(ring: FormRing, s: &str) -> Result<LogForm> {
        Self::parse_inner(ring, s, None)
    }

    /// Parses a form of a known degree (needed for the zero form of positive degree).
    pub fn parse_with_degree(ring: FormRing, s: &str, degree: usize) -> Result<LogForm> {
        Self::parse_inner(ring, s, Some(degree))
    }

    fn parse_inner(ring: FormRing, s: &str, degree: Option<usize>) -> Result<LogForm> {
        let mut p = Parser { src: s.as_bytes(), pos: 0, ring };
        let f = ring.field();
        let mut terms: Vec<(u8, Multidegree, GenSet)> = Vec::new();
        let mut degree_seen = degree;
        p.skip_ws();
        if p.pos == p.src.len() {
            return p.err("empty input");
        }
        let mut sign: i64 = 1;
        if p.eat("-") {
            sign = -1;
        } else {
            p.eat("+");
        }
        loop {
            let at = p.pos;
            let (c, exps, gens) = p.term()?;
            let mut w = exps;
            let mut set = GenSet::empty();
            let mut negative = false;
            let mut repeated = false;
            // wedge the generators right to left: g_1 ∧ (g_2 ∧ (…))
            for g in gens.iter().rev() {
                let k = match *g {
                    Generator::Dlog(k) => k,
                    Generator::D(k) => {
                        w.0[k] += 1;
                        k
                    }
                };
                match set.insert_front(k) {
                    Some((s2, neg)) => {
                        set = s2;
                        negative ^= neg;
                    }
                    None => repeated = true,
                }
            }
            let deg = gens.len();
            if let Some(d) = degree_seen {
                if d != deg && !(c % f.p() as i64 == 0 && deg == 0) {
                    return Err(Error::Parse { position: at, message: format!("term of degree {deg}, expected {d}") });
                }
            } else if !(deg == 0 && c == 0) {
                degree_seen = Some(deg);
            }
            let mut coeff = f.reduce(c * sign);
            if negative {
                coeff = f.neg(coeff);
            }
            if !repeated && coeff != 0 {
                terms.push((coeff, w, set));
            }
            p.skip_ws();
            if p.pos == p.src.len() {
                break;
            }
            if p.eat("+") {
                sign = 1;
            } else if p.eat("-") {
                sign = -1;
            } else {
                return p.err("expected '+' or '-' between terms");
            }
        }
        let mut out = LogForm::zero(ring, degree_seen.unwrap_or(0));
        for (c, w, set) in terms {
            out.add_ambient(w, set, c)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;

    fn ring(p: u32, m: usize, log: &[u8]) -> FormRing {
        FormRing::new(PrimeField::new(p).unwrap(), m).unwrap().with_log(log).unwrap()
    }

    #[test]
    fn canonical_round_trip() {
        let r = ring(5, 3, &[1]);
        for s in ["2*T1^3*T2 dlogT1^dT3", "0", "3", "T2", "dT2", "dlogT1 + 4*T3^2 dT2"] {
            let f = LogForm::parse(r, s).unwrap();
            assert_eq!(f.to_string(), s);
        }
    }

    #[test]
    fn non_canonical_input_is_normalised() {
        let r = ring(5, 3, &[1]);
        let f = LogForm::parse(r, "dT3 ^ dT2").unwrap();
        assert_eq!(f.to_string(), "4 dT2^dT3");
        assert_eq!(LogForm::parse(r, "T1 - T1").unwrap().to_string(), "0");
        assert_eq!(LogForm::parse(r, "dT1").unwrap().to_string(), "T1 dlogT1");
        assert_eq!(LogForm::parse(r, "-1*T2").unwrap().to_string(), "4*T2");
    }

    #[test]
    fn laurent_exponents() {
        let r = ring(3, 1, &[]).with_laurent(&[1]).unwrap();
        let f = LogForm::parse(r, "T1^-2 dT1").unwrap();
        assert_eq!(f.to_string(), "T1^-2 dT1");
        assert_eq!(f.weights().into_iter().next().unwrap().0[0], -1);
    }

    #[test]
    fn parse_errors() {
        let r = ring(5, 2, &[]);
        assert!(LogForm::parse(r, "T3").is_err());
        assert!(LogForm::parse(r, "T1^-1").is_err());
        assert!(LogForm::parse(r, "dT1 + T2").is_err());
        assert!(LogForm::parse(r, "").is_err());
        assert!(LogForm::parse(r, "T1 +").is_err());
    }
}

use std::collections::{BTreeMap, BTreeSet};

use super::ring::{FormRing, GenSet, Multidegree, Term};
use crate::error::{Error, Result};

/// A differential form: a finite F_p-combination of [`Term`]s of one degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LogForm {
    ring: FormRing,
    degree: usize,
    terms: BTreeMap<Term, u8>,
}

impl std::fmt::Debug for LogForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LogForm[{}]({})", self.degree, self)
    }
}

impl LogForm {
    pub fn zero(ring: FormRing, degree: usize) -> Self {
        LogForm { ring, degree, terms: BTreeMap::new() }
    }

    /// Constant function `c`.
    pub fn scalar(ring: FormRing, c: i64) -> Self {
        let mut f = Self::zero(ring, 0);
        let c = ring.field().reduce(c);
        if c != 0 {
            f.terms.insert(Term { exponent: Multidegree::zero(), gens: GenSet::empty() }, c);
        }
        f
    }

    /// The form `c · T^w dlog T_I` written with all generators logarithmic.
    pub fn from_ambient(ring: FormRing, c: i64, w: Multidegree, gens: GenSet) -> Result<Self> {
        let mut f = Self::zero(ring, gens.len());
        f.add_ambient(w, gens, ring.field().reduce(c))?;
        Ok(f)
    }

    pub fn from_term(ring: FormRing, c: i64, term: Term) -> Result<Self> {
        let w = term.weight(&ring);
        Self::from_ambient(ring, c, w, term.gens)
    }

    /// Monomial `c · T^a` (exponents indexed by position).
    pub fn monomial(ring: FormRing, c: i64, exponents: &[i32]) -> Result<Self> {
        if exponents.len() != ring.nvars() {
            return Err(Error::DimensionMismatch { expected: ring.nvars(), found: exponents.len() });
        }
        Self::from_ambient(ring, c, Multidegree::from_slice(exponents), GenSet::empty())
    }

    /// The variable `T_label`.
    pub fn variable(ring: FormRing, label: u8) -> Result<Self> {
        let pos = ring.position(label)?;
        Self::from_ambient(ring, 1, Multidegree::unit(pos), GenSet::empty())
    }

    /// `dT_label`, stored as `T·dlog T` when the variable is logarithmic.
    pub fn d_variable(ring: FormRing, label: u8) -> Result<Self> {
        let pos = ring.position(label)?;
        Self::from_ambient(ring, 1, Multidegree::unit(pos), GenSet::from_positions(&[pos]))
    }

    /// `dlog T_label`; requires a log or inverted variable.
    pub fn dlog(ring: FormRing, label: u8) -> Result<Self> {
        let pos = ring.position(label)?;
        if !ring.is_log(pos) && !ring.is_laurent(pos) {
            return Err(Error::NotLogVariable(label));
        }
        Self::from_ambient(ring, 1, Multidegree::zero(), GenSet::from_positions(&[pos]))
    }

    /// `dlog T_{l1} ∧ … ∧ dlog T_{lk}` in the order given.
    pub fn dlog_wedge(ring: FormRing, labels: &[u8]) -> Result<Self> {
        let mut acc = Self::scalar(ring, 1);
        for &l in labels {
            acc = acc.wedge(&Self::dlog(ring, l)?)?;
        }
        Ok(acc)
    }

    /// `dlog T^a = Σ a_i dlog T_i` for an exponent supported on log variables.
    pub fn dlog_of_monomial(ring: FormRing, exponents: &[i32]) -> Result<Self> {
        if exponents.len() != ring.nvars() {
            return Err(Error::DimensionMismatch { expected: ring.nvars(), found: exponents.len() });
        }
        let mut f = Self::zero(ring, 1);
        for (pos, &a) in exponents.iter().enumerate() {
            if a == 0 {
                continue;
            }
            if !ring.is_log(pos) {
                return Err(Error::NotLogVariable(ring.label(pos)));
            }
            f.add_ambient(Multidegree::zero(), GenSet::from_positions(&[pos]), ring.field().reduce(a as i64))?;
        }
        Ok(f)
    }

    pub fn ring(&self) -> &FormRing {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, u8)> {
        self.terms.iter().map(|(t, &c)| (t, c))
    }

    pub fn coefficient(&self, term: &Term) -> u8 {
        self.terms.get(term).copied().unwrap_or(0)
    }

    /// Adds `c · T^w dlog T_I` (ambient description) to `self`.
    pub fn add_ambient(&mut self, w: Multidegree, gens: GenSet, c: u8) -> Result<()> {
        if gens.len() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, gens.len()));
        }
        if c == 0 {
            return Ok(());
        }
        let term = self.ring.term_from_ambient(w, gens)?;
        self.add_term(term, c);
        Ok(())
    }

    pub(crate) fn add_term(&mut self, term: Term, c: u8) {
        let f = self.ring.field();
        let entry = self.terms.entry(term).or_insert(0);
        *entry = f.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(&term);
        }
    }

    /// Terms in ambient form `(weight, generator set, coefficient)`.
    pub fn ambient_terms(&self) -> impl Iterator<Item = (Multidegree, GenSet, u8)> + '_ {
        self.terms.iter().map(move |(t, &c)| (t.weight(&self.ring), t.gens, c))
    }

    fn check_same(&self, other: &LogForm) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &LogForm) -> Result<LogForm> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        let mut out = self.clone();
        for (t, &c) in &other.terms {
            out.add_term(*t, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LogForm) -> Result<LogForm> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LogForm {
        self.scale(-1)
    }

    pub fn scale(&self, c: i64) -> LogForm {
        let f = self.ring.field();
        let c = f.reduce(c);
        let mut out = Self::zero(self.ring, self.degree);
        if c == 0 {
            return out;
        }
        for (t, &v) in &self.terms {
            out.terms.insert(*t, f.mul(v, c));
        }
        out
    }

    /// Wedge product; fails if a product leaves the weight window.
    pub fn wedge(&self, other: &LogForm) -> Result<LogForm> {
        self.check_same(other)?;
        let f = self.ring.field();
        let mut out = Self::zero(self.ring, self.degree + other.degree);
        for (w1, g1, c1) in self.ambient_terms() {
            for (w2, g2, c2) in other.ambient_terms() {
                if let Some((g, negative)) = g1.wedge(g2) {
                    let c = f.mul(c1, c2);
                    out.add_ambient(w1.add(w2), g, if negative { f.neg(c) } else { c })?;
                }
            }
        }
        Ok(out)
    }

    /// The exterior derivative. Weight is preserved, so the window is never left.
    pub fn differential(&self) -> LogForm {
        let f = self.ring.field();
        let mut out = Self::zero(self.ring, self.degree + 1);
        for (w, g, c) in self.ambient_terms() {
            for k in 0..self.ring.nvars() {
                let wk = f.reduce(w.0[k] as i64);
                if wk == 0 {
                    continue;
                }
                if let Some((g2, negative)) = g.insert_front(k) {
                    let v = f.mul(c, wk);
                    out.add_ambient(w, g2, if negative { f.neg(v) } else { v })
                        .expect("d preserves weight and regularity");
                }
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.differential().is_zero()
    }

    /// Distinct weights of the terms.
    pub fn weights(&self) -> BTreeSet<Multidegree> {
        self.terms.keys().map(|t| t.weight(&self.ring)).collect()
    }

    /// The weight-`w` homogeneous component.
    pub fn component(&self, w: &Multidegree) -> LogForm {
        let mut out = Self::zero(self.ring, self.degree);
        for (t, &c) in &self.terms {
            if t.weight(&self.ring) == *w {
                out.terms.insert(*t, c);
            }
        }
        out
    }

    /// The same form viewed in another ring with identical variables.
    pub fn reinterpret(&self, ring: FormRing) -> Result<LogForm> {
        if ring.nvars() != self.ring.nvars() || ring.field() != self.ring.field() {
            return Err(Error::RingMismatch);
        }
        let mut out = Self::zero(ring, self.degree);
        for (w, g, c) in self.ambient_terms() {
            out.add_ambient(w, g, c)?;
        }
        Ok(out)
    }

    /// Residue along the log divisor `T_label = 0`: the coefficient of
    /// `dlog T_label` restricted to the divisor, in the ring without that variable.
    pub fn residue(&self, label: u8) -> Result<LogForm> {
        let pos = self.ring.position(label)?;
        if !self.ring.is_log(pos) {
            return Err(Error::NotLogVariable(label));
        }
        if self.degree == 0 {
            return Err(Error::invalid("residue of a function"));
        }
        let target = self.ring.drop_variable(pos);
        let f = self.ring.field();
        let mut out = Self::zero(target, self.degree - 1);
        for (w, g, c) in self.ambient_terms() {
            if !g.contains(pos) {
                continue;
            }
            match w.0[pos] {
                0 => {
                    let negative = g.rank_of(pos) % 2 == 1;
                    let g2 = g.without(pos).remove_shift(pos);
                    out.add_ambient(w.remove(pos), g2, if negative { f.neg(c) } else { c })?;
                }
                x if x > 0 => {}
                _ => return Err(Error::Pole(label)),
            }
        }
        Ok(out)
    }

    /// Restriction to the divisor `T_label = 0`: sets the variable to zero and
    /// kills `dT_label`. Rejects forms with a log pole along the divisor.
    pub fn restrict_to_divisor(&self, label: u8) -> Result<LogForm> {
        let pos = self.ring.position(label)?;
        let target = self.ring.drop_variable(pos);
        let mut out = Self::zero(target, self.degree);
        for (w, g, c) in self.ambient_terms() {
            if w.0[pos] < 0 || (w.0[pos] == 0 && g.contains(pos)) {
                return Err(Error::Pole(label));
            }
            if w.0[pos] > 0 {
                continue;
            }
            out.add_ambient(w.remove(pos), g.remove_shift(pos), c)?;
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

    fn parse(r: FormRing, s: &str) -> LogForm {
        LogForm::parse(r, s).unwrap()
    }

    #[test]
    fn repeated_generator_wedges_to_zero() {
        let r = ring(5, 2, &[]);
        let d1 = LogForm::d_variable(r, 1).unwrap();
        assert!(d1.wedge(&d1).unwrap().is_zero());
    }

    #[test]
    fn wedge_sign_normalisation() {
        let r = ring(5, 2, &[]);
        let a = parse(r, "T1 dT2");
        let b = parse(r, "dT1");
        assert_eq!(a.wedge(&b).unwrap(), parse(r, "-T1 dT1^dT2"));
        let r2 = ring(5, 2, &[1, 2]);
        assert_eq!(
            LogForm::dlog(r2, 1).unwrap().wedge(&LogForm::dlog(r2, 2).unwrap()).unwrap().to_string(),
            "dlogT1^dlogT2"
        );
    }

    #[test]
    fn differential_examples() {
        let r = ring(2, 1, &[]);
        assert!(parse(r, "T1^2").differential().is_zero());
        let r = ring(3, 1, &[1]);
        assert_eq!(parse(r, "T1").differential().to_string(), "T1 dlogT1");
        let r = ring(3, 2, &[]);
        let f = parse(r, "T1*T2");
        assert!(!f.differential().is_zero());
        assert!(f.differential().differential().is_zero());
    }

    #[test]
    fn dlog_of_monomial_examples() {
        let r = ring(3, 2, &[1, 2]);
        assert_eq!(LogForm::dlog_of_monomial(r, &[1, 0]).unwrap().to_string(), "dlogT1");
        assert!(LogForm::dlog_of_monomial(r, &[3, 0]).unwrap().is_zero());
        assert_eq!(LogForm::dlog_of_monomial(r, &[1, 2]).unwrap().to_string(), "dlogT1 + 2 dlogT2");
        let r1 = ring(3, 2, &[1]);
        assert!(LogForm::dlog_of_monomial(r1, &[0, 1]).is_err());
    }

    #[test]
    fn residue_examples() {
        let r = ring(3, 3, &[1, 2]);
        let res = parse(r, "dlogT1^dlogT2").residue(1).unwrap();
        assert_eq!(res.to_string(), "dlogT2");
        assert_eq!(res.ring().labels(), vec![2, 3]);
        assert!(parse(r, "dT2^dT3").residue(1).unwrap().is_zero());
        assert!(parse(r, "T1 dlogT1").residue(1).unwrap().is_zero());
        assert!(matches!(parse(r, "dT3").residue(3), Err(Error::NotLogVariable(3))));
        // dlog T2 ∧ dlog T1 = -dlog T1 ∧ dlog T2
        assert_eq!(parse(r, "dlogT2^dlogT1").residue(1).unwrap().to_string(), "2 dlogT2");
    }

    #[test]
    fn restrict_examples() {
        let r = ring(3, 3, &[1, 2]);
        assert_eq!(parse(r, "dlogT2").restrict_to_divisor(1).unwrap().to_string(), "dlogT2");
        assert!(parse(r, "T1 dlogT1^dT3").restrict_to_divisor(1).unwrap().is_zero());
        assert_eq!(parse(r, "T2 dT3").restrict_to_divisor(1).unwrap().to_string(), "T2 dT3");
        assert!(matches!(parse(r, "dlogT1").restrict_to_divisor(1), Err(Error::Pole(1))));
    }

    #[test]
    fn d_of_log_variable_equals_t_dlog() {
        let r = ring(5, 2, &[1]);
        assert_eq!(LogForm::d_variable(r, 1).unwrap(), parse(r, "T1 dlogT1"));
        assert_eq!(parse(r, "dT1"), parse(r, "T1 dlogT1"));
    }

    #[test]
    fn window_overflow_is_reported() {
        let r = ring(3, 1, &[]).with_radius(3).unwrap();
        let t2 = parse(r, "T1^2");
        assert!(matches!(t2.wedge(&t2), Err(Error::WindowOverflow { .. })));
    }
}

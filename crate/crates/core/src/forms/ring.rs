use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::PrimeField;

/// Maximum number of variables of a [`FormRing`].
pub const MAX_VARS: usize = 8;

/// Integer exponent vector indexed by variable position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Multidegree(pub [i32; MAX_VARS]);

impl Multidegree {
    pub fn zero() -> Self {
        Multidegree([0; MAX_VARS])
    }

    pub fn unit(pos: usize) -> Self {
        let mut d = Self::zero();
        d.0[pos] = 1;
        d
    }

    pub fn from_slice(v: &[i32]) -> Self {
        assert!(v.len() <= MAX_VARS, "too many variables");
        let mut d = Self::zero();
        d.0[..v.len()].copy_from_slice(v);
        d
    }

    pub fn to_vec(self, n: usize) -> Vec<i32> {
        self.0[..n].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(self, o: Self) -> Self {
        let mut d = self;
        for i in 0..MAX_VARS {
            d.0[i] += o.0[i];
        }
        d
    }

    pub fn sub(self, o: Self) -> Self {
        let mut d = self;
        for i in 0..MAX_VARS {
            d.0[i] -= o.0[i];
        }
        d
    }

    pub fn scale(self, k: i32) -> Self {
        let mut d = self;
        for x in d.0.iter_mut() {
            *x *= k;
        }
        d
    }

    /// Componentwise exact division, `None` unless every entry is divisible.
    pub fn div_exact(self, k: i32) -> Option<Self> {
        if self.0.iter().any(|x| x % k != 0) {
            return None;
        }
        let mut d = self;
        for x in d.0.iter_mut() {
            *x /= k;
        }
        Some(d)
    }

    /// Removes entry `pos`, shifting later entries down.
    pub fn remove(self, pos: usize) -> Self {
        let mut d = Self::zero();
        let mut j = 0;
        for i in 0..MAX_VARS {
            if i != pos {
                d.0[j] = self.0[i];
                j += 1;
            }
        }
        d
    }
}

/// A set of variable positions indexing a wedge of generators. Ordered
/// lexicographically by the increasing list of positions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSet(pub u32);

impl GenSet {
    pub fn empty() -> Self {
        GenSet(0)
    }

    pub fn from_positions(ps: &[usize]) -> Self {
        GenSet(ps.iter().fold(0, |m, &p| m | (1 << p)))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, pos: usize) -> bool {
        self.0 >> pos & 1 == 1
    }

    pub fn positions(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.0 >> i & 1 == 1)
    }

    pub fn is_subset_of(self, mask: u32) -> bool {
        self.0 & !mask == 0
    }

    /// Number of members smaller than `pos`.
    pub fn rank_of(self, pos: usize) -> usize {
        (self.0 & ((1u32 << pos) - 1)).count_ones() as usize
    }

    /// `g_pos ∧ g_self = ± g_{self ∪ pos}`; returns the set and whether the
    /// sign is negative, or `None` if `pos` is already present.
    pub fn insert_front(self, pos: usize) -> Option<(GenSet, bool)> {
        if self.contains(pos) {
            return None;
        }
        Some((GenSet(self.0 | 1 << pos), self.rank_of(pos) % 2 == 1))
    }

    /// `g_self ∧ g_other = ± g_{self ∪ other}`.
    pub fn wedge(self, other: GenSet) -> Option<(GenSet, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut inversions = 0;
        for a in self.positions() {
            inversions += other.rank_of(a);
        }
        Some((GenSet(self.0 | other.0), inversions % 2 == 1))
    }

    /// Removes `pos`, shifting higher positions down by one.
    pub fn remove_shift(self, pos: usize) -> GenSet {
        let low = self.0 & ((1u32 << pos) - 1);
        let high = (self.0 >> (pos + 1)) << pos;
        GenSet(low | high)
    }

    pub fn without(self, pos: usize) -> GenSet {
        GenSet(self.0 & !(1 << pos))
    }

    /// All `k`-subsets of `mask` in increasing order.
    pub fn subsets(mask: u32, k: usize) -> Vec<GenSet> {
        let elems: Vec<usize> = (0..32).filter(|&i| mask >> i & 1 == 1).collect();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k);
        fn rec(elems: &[usize], start: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<GenSet>) {
            if cur.len() == k {
                out.push(GenSet::from_positions(cur));
                return;
            }
            for i in start..elems.len() {
                if elems.len() - i < k - cur.len() {
                    break;
                }
                cur.push(elems[i]);
                rec(elems, i + 1, k, cur, out);
                cur.pop();
            }
        }
        rec(&elems, 0, k, &mut cur, &mut out);
        out
    }
}

impl Ord for GenSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.positions().cmp(other.positions())
    }
}

impl PartialOrd for GenSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `F_p[T_1..T_m]` with a log set `L` and optionally some inverted
/// variables, together with a weight window bounding every enumeration.
///
/// Variables carry display labels (1-based by default). Rings derived by
/// dropping a variable keep the original labels of the remaining ones.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FormRing {
    field: PrimeField,
    nvars: u8,
    labels: [u8; MAX_VARS],
    log_mask: u32,
    laurent_mask: u32,
    lo: [i32; MAX_VARS],
    hi: [i32; MAX_VARS],
}

/// Default half-width of the weight window.
pub const DEFAULT_RADIUS: i32 = 16;

impl fmt::Debug for FormRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl FormRing {
    /// Polynomial ring in `m` variables over `field`, no log variables.
    pub fn new(field: PrimeField, m: usize) -> Result<Self> {
        if m > MAX_VARS {
            return Err(Error::invalid(format!("at most {MAX_VARS} variables supported")));
        }
        let mut labels = [0u8; MAX_VARS];
        for (i, l) in labels.iter_mut().enumerate() {
            *l = i as u8 + 1;
        }
        let mut r = FormRing {
            field,
            nvars: m as u8,
            labels,
            log_mask: 0,
            laurent_mask: 0,
            lo: [0; MAX_VARS],
            hi: [0; MAX_VARS],
        };
        r.set_radius(DEFAULT_RADIUS);
        Ok(r)
    }

    /// Sets the log variables, given by label.
    pub fn with_log(mut self, labels: &[u8]) -> Result<Self> {
        self.log_mask = self.mask_of(labels)?;
        Ok(self)
    }

    /// Inverts the given variables (by label).
    pub fn with_laurent(mut self, labels: &[u8]) -> Result<Self> {
        self.laurent_mask = self.mask_of(labels)?;
        let r = self.hi[0];
        self.set_radius(r);
        Ok(self)
    }

    /// Window `[-r, r]` on inverted variables and `[0, r]` on the others.
    pub fn with_radius(mut self, r: i32) -> Result<Self> {
        if r < 0 {
            return Err(Error::invalid("window radius must be non-negative"));
        }
        self.set_radius(r);
        Ok(self)
    }

    fn set_radius(&mut self, r: i32) {
        for i in 0..MAX_VARS {
            self.hi[i] = r;
            self.lo[i] = if self.laurent_mask >> i & 1 == 1 { -r } else { 0 };
        }
    }

    fn mask_of(&self, labels: &[u8]) -> Result<u32> {
        let mut mask = 0;
        for &l in labels {
            mask |= 1 << self.position(l)?;
        }
        Ok(mask)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn radius(&self) -> i32 {
        self.hi[0]
    }

    pub fn label(&self, pos: usize) -> u8 {
        self.labels[pos]
    }

    pub fn labels(&self) -> Vec<u8> {
        self.labels[..self.nvars()].to_vec()
    }

    /// Position of the variable with the given label.
    pub fn position(&self, label: u8) -> Result<usize> {
        self.labels[..self.nvars()]
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| Error::invalid(format!("no variable T{label} in ring")))
    }

    pub fn log_mask(&self) -> u32 {
        self.log_mask
    }

    pub fn laurent_mask(&self) -> u32 {
        self.laurent_mask
    }

    pub fn all_mask(&self) -> u32 {
        (1u32 << self.nvars) - 1
    }

    pub fn is_log(&self, pos: usize) -> bool {
        self.log_mask >> pos & 1 == 1
    }

    pub fn is_laurent(&self, pos: usize) -> bool {
        self.laurent_mask >> pos & 1 == 1
    }

    pub fn log_labels(&self) -> Vec<u8> {
        (0..self.nvars()).filter(|&i| self.is_log(i)).map(|i| self.labels[i]).collect()
    }

    pub fn in_window(&self, w: &Multidegree) -> bool {
        (0..self.nvars()).all(|i| self.lo[i] <= w.0[i] && w.0[i] <= self.hi[i])
    }

    /// Every weight in the window, in lexicographic order.
    pub fn window_weights(&self) -> Vec<Multidegree> {
        let n = self.nvars();
        let mut out = vec![Multidegree::zero()];
        for i in 0..n {
            let mut next = Vec::with_capacity(out.len() * (self.hi[i] - self.lo[i] + 1) as usize);
            for w in &out {
                for v in self.lo[i]..=self.hi[i] {
                    let mut w2 = *w;
                    w2.0[i] = v;
                    next.push(w2);
                }
            }
            out = next;
        }
        out
    }

    /// Whether `T^w dlog T_I` (all generators logarithmic) is a section.
    pub fn is_regular(&self, w: &Multidegree, gens: GenSet) -> bool {
        (0..self.nvars()).all(|k| {
            if self.is_laurent(k) {
                true
            } else if gens.contains(k) && !self.is_log(k) {
                w.0[k] >= 1
            } else {
                w.0[k] >= 0
            }
        }) && gens.is_subset_of(self.all_mask())
            && w.0[self.nvars()..].iter().all(|&x| x == 0)
    }

    /// Converts the ambient description `T^w dlog T_I` into a stored term.
    pub fn term_from_ambient(&self, w: Multidegree, gens: GenSet) -> Result<Term> {
        if !self.is_regular(&w, gens) {
            return Err(Error::NotRegular(format!(
                "weight {:?} with generators {:?}",
                w.to_vec(self.nvars()),
                gens.positions().map(|p| self.labels[p]).collect::<Vec<_>>()
            )));
        }
        if !self.in_window(&w) {
            return Err(Error::WindowOverflow { exponent: w.to_vec(self.nvars()) });
        }
        let mut a = w;
        for k in gens.positions() {
            if !self.is_log(k) {
                a.0[k] -= 1;
            }
        }
        Ok(Term { exponent: a, gens })
    }

    /// Generator sets `I` with `|I| = j` such that `T^w dlog T_I` is a section.
    pub fn allowed_gensets(&self, w: &Multidegree, j: usize) -> Vec<GenSet> {
        if !self.is_regular(w, GenSet::empty()) {
            return Vec::new();
        }
        let mut mask = 0;
        for k in 0..self.nvars() {
            if self.is_log(k) || self.is_laurent(k) || w.0[k] >= 1 {
                mask |= 1 << k;
            }
        }
        GenSet::subsets(mask, j)
    }

    /// Ring with variable `pos` removed; labels of the others are kept.
    pub fn drop_variable(&self, pos: usize) -> FormRing {
        let mut r = *self;
        let shrink = |mask: u32| GenSet(mask).remove_shift(pos).0;
        r.log_mask = shrink(self.log_mask);
        r.laurent_mask = shrink(self.laurent_mask);
        let mut j = 0;
        for i in 0..self.nvars() {
            if i != pos {
                r.labels[j] = self.labels[i];
                r.lo[j] = self.lo[i];
                r.hi[j] = self.hi[i];
                j += 1;
            }
        }
        r.nvars -= 1;
        for i in r.nvars()..MAX_VARS {
            r.lo[i] = 0;
            r.hi[i] = self.hi[0];
        }
        r
    }

    /// Same ring with the log set changed to the given mask.
    pub fn with_log_mask(&self, mask: u32) -> FormRing {
        let mut r = *self;
        r.log_mask = mask & self.all_mask();
        r
    }

    pub fn with_laurent_mask(&self, mask: u32) -> FormRing {
        let mut r = *self;
        r.laurent_mask = mask & self.all_mask();
        let rad = r.hi[0];
        r.set_radius(rad);
        r
    }

    pub fn describe(&self) -> String {
        let names = |mask: u32| {
            (0..self.nvars())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| format!("T{}", self.labels[i]))
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "F_{}[{}] log={{{}}} inverted={{{}}} radius={}",
            self.p(),
            names(self.all_mask()),
            names(self.log_mask),
            names(self.laurent_mask),
            self.radius()
        )
    }
}

/// A basis monomial `T^a ⋀_{i∈I} g_i` with `g_i = dlog T_i` for log
/// variables and `dT_i` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub exponent: Multidegree,
    pub gens: GenSet,
}

impl Term {
    /// The torus weight `a + e_{I \ L}`.
    pub fn weight(&self, ring: &FormRing) -> Multidegree {
        let mut w = self.exponent;
        for k in self.gens.positions() {
            if !ring.is_log(k) {
                w.0[k] += 1;
            }
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genset_order_is_lexicographic_on_sorted_lists() {
        let a = GenSet::from_positions(&[0]);
        let b = GenSet::from_positions(&[0, 1]);
        let c = GenSet::from_positions(&[1]);
        assert!(a < b && b < c);
        let subs = GenSet::subsets(0b1111, 2);
        let mut sorted = subs.clone();
        sorted.sort();
        assert_eq!(subs, sorted);
        assert_eq!(subs.len(), 6);
    }

    #[test]
    fn wedge_sign_counts_inversions() {
        let a = GenSet::from_positions(&[2]);
        let b = GenSet::from_positions(&[0, 1]);
        assert_eq!(a.wedge(b), Some((GenSet::from_positions(&[0, 1, 2]), false)));
        let c = GenSet::from_positions(&[1]);
        let d = GenSet::from_positions(&[0, 2]);
        assert_eq!(c.wedge(d), Some((GenSet::from_positions(&[0, 1, 2]), true)));
        assert_eq!(c.wedge(c), None);
    }

    #[test]
    fn remove_shift_compacts_positions() {
        let g = GenSet::from_positions(&[0, 2, 3]);
        assert_eq!(g.remove_shift(1), GenSet::from_positions(&[0, 1, 2]));
        assert_eq!(g.without(2).remove_shift(2), GenSet::from_positions(&[0, 2]));
    }

    #[test]
    fn dropping_a_variable_keeps_labels() {
        let f = PrimeField::new(3).unwrap();
        let r = FormRing::new(f, 3).unwrap().with_log(&[1, 3]).unwrap();
        let s = r.drop_variable(0);
        assert_eq!(s.labels(), vec![2, 3]);
        assert_eq!(s.log_labels(), vec![3]);
    }
}

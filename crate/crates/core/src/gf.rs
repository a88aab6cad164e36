//! Exact linear algebra over a prime field F_p with p < 256.
//!
//! Residues are stored as `u8`. Row reduction pivots on the first nonzero
//! entry in column order, so every derived basis (kernel, image, cokernel
//! complement) is a deterministic function of the input matrix.

use std::fmt;

use crate::error::{Error, Result};

/// Largest prime accepted by [`PrimeField::new`].
pub const MAX_PRIME: u32 = 251;

/// The field F_p for a prime `p <= 251`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u8,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(PrimeField { p: p as u8 })
    }

    pub fn p(self) -> u32 {
        self.p as u32
    }

    /// Canonical residue of an arbitrary integer.
    pub fn reduce(self, x: i64) -> u8 {
        x.rem_euclid(self.p as i64) as u8
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        let s = a as u16 + b as u16;
        let p = self.p as u16;
        (if s >= p { s - p } else { s }) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        if a >= b {
            a - b
        } else {
            (a as u16 + self.p as u16 - b as u16) as u8
        }
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    pub fn pow(self, a: u8, mut e: u64) -> u8 {
        let mut base = a % self.p;
        let mut acc = 1u8 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(self, a: u8) -> Option<u8> {
        let a = a % self.p;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }

    pub fn elements(self) -> impl Iterator<Item = u8> {
        0..self.p
    }
}

/// Row-echelon data of a matrix: the reduced matrix and its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: FpMatrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FpMatrix {}x{} over F_{}", self.rows, self.cols, self.field.p())?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl FpMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FpMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows_with_width(field, rows, cols)
    }

    pub fn from_rows_with_width(field: PrimeField, rows: &[Vec<i64>], cols: usize) -> Result<Self> {
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, field.reduce(x));
            }
        }
        Ok(m)
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(field: PrimeField, rows: usize, columns: &[Vec<u8>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x % field.p);
            }
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: u8) {
        let cur = self.get(r, c);
        self.set(r, c, self.field.add(cur, v));
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u8>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        out.add_to(i, j, f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0u8, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        let mut out = Self::zeros(self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        Ok(out)
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.cols });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FpMatrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Reduced row-echelon form. Pivot in each column is the first row at or
    /// below the current pivot row with a nonzero entry.
    pub fn echelon(&self) -> Echelon {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        let cols = m.cols;
        for c in 0..cols {
            if prow == m.rows {
                break;
            }
            let Some(r) = (prow..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            if r != prow {
                for k in 0..cols {
                    m.data.swap(r * cols + k, prow * cols + k);
                }
            }
            let inv = f.inv(m.get(prow, c)).expect("pivot is nonzero");
            if inv != 1 {
                for k in c..cols {
                    let v = m.get(prow, k);
                    m.set(prow, k, f.mul(v, inv));
                }
            }
            let pivot_row: Vec<u8> = m.row(prow)[c..].to_vec();
            for r2 in 0..m.rows {
                if r2 == prow {
                    continue;
                }
                let factor = m.get(r2, c);
                if factor == 0 {
                    continue;
                }
                let base = r2 * cols;
                for (k, &pv) in pivot_row.iter().enumerate() {
                    if pv != 0 {
                        let idx = base + c + k;
                        m.data[idx] = f.sub(m.data[idx], f.mul(factor, pv));
                    }
                }
            }
            pivots.push(c);
            prow += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.echelon().rank()
    }

    /// Basis of the right kernel `{x : A x = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<u8>> {
        let f = self.field;
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &c in &ech.pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u8; self.cols];
            v[free] = 1;
            for (r, &pc) in ech.pivots.iter().enumerate() {
                v[pc] = f.neg(ech.reduced.get(r, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Basis of the column space: the original columns at pivot positions.
    pub fn image_basis(&self) -> Vec<Vec<u8>> {
        self.echelon().pivots.iter().map(|&c| self.column(c)).collect()
    }

    pub fn cokernel_dim(&self) -> usize {
        self.rows - self.rank()
    }

    /// Standard basis vectors completing the column space to F_p^rows.
    pub fn cokernel_complement(&self) -> Vec<Vec<u8>> {
        let ident = Self::identity(self.field, self.rows);
        let joined = self.hstack(&ident).expect("row counts agree");
        joined
            .echelon()
            .pivots
            .into_iter()
            .filter(|&c| c >= self.cols)
            .map(|c| ident.column(c - self.cols))
            .collect()
    }

    /// One solution of `A x = b`, with free variables set to zero.
    pub fn solve(&self, b: &[u8]) -> Result<Vec<u8>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: b.len() });
        }
        let aug = self.hstack(&Self::from_columns(self.field, self.rows, &[b.to_vec()]))?;
        let ech = aug.echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return Err(Error::Inconsistent);
        }
        let mut x = vec![0u8; self.cols];
        for (r, &pc) in ech.pivots.iter().enumerate() {
            x[pc] = ech.reduced.get(r, self.cols);
        }
        Ok(x)
    }

    /// Solves `A X = B` column by column with a single elimination.
    pub fn solve_many(&self, rhs: &FpMatrix) -> Result<FpMatrix> {
        let aug = self.hstack(rhs)?;
        let ech = aug.echelon();
        if ech.pivots.iter().any(|&c| c >= self.cols) {
            return Err(Error::Inconsistent);
        }
        let mut x = Self::zeros(self.field, self.cols, rhs.cols);
        for (r, &pc) in ech.pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, ech.reduced.get(r, self.cols + j));
            }
        }
        Ok(x)
    }
}

/// Dimension of the span of a list of vectors of common length `len`.
pub fn span_rank(field: PrimeField, len: usize, vectors: &[Vec<u8>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    FpMatrix::from_columns(field, len, vectors).rank()
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(field: PrimeField, basis: &[Vec<u8>], v: &[u8]) -> bool {
    if v.iter().all(|&x| x == 0) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    FpMatrix::from_columns(field, v.len(), basis).solve(v).is_ok()
}

/// Extends `sub` (assumed independent) by vectors of `sup` to a basis of
/// `span(sub) + span(sup)`; returns only the added vectors.
pub fn complement_in(field: PrimeField, len: usize, sub: &[Vec<u8>], sup: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let mut all: Vec<Vec<u8>> = sub.to_vec();
    all.extend(sup.iter().cloned());
    if all.is_empty() {
        return Vec::new();
    }
    let m = FpMatrix::from_columns(field, len, &all);
    m.echelon()
        .pivots
        .into_iter()
        .filter(|&c| c >= sub.len())
        .map(|c| all[c].clone())
        .collect()
}

/// Matrix whose columns are the coordinates of `vectors` in `basis`
/// (vectors of length `len`); fails if some vector is outside the span.
pub fn coordinates(field: PrimeField, len: usize, basis: &[Vec<u8>], vectors: &[Vec<u8>]) -> Result<FpMatrix> {
    if basis.is_empty() {
        if vectors.iter().all(|v| v.iter().all(|&x| x == 0)) {
            return Ok(FpMatrix::zeros(field, 0, vectors.len()));
        }
        return Err(Error::Inconsistent);
    }
    let b = FpMatrix::from_columns(field, len, basis);
    if vectors.is_empty() {
        return Ok(FpMatrix::zeros(field, basis.len(), 0));
    }
    b.solve_many(&FpMatrix::from_columns(field, len, vectors))
}

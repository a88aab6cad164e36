use super::form::LogForm;
use super::ring::{FormRing, GenSet, Multidegree, Term};
use crate::error::{Error, Result};
use crate::gf::FpMatrix;

/// Basis of the weight-`w` piece of `Ω^j` of a ring. Basis element `k` is
/// `T^w dlog T_{I_k}` rewritten in the mixed generator basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSlice {
    ring: FormRing,
    degree: usize,
    weight: Multidegree,
    basis: Vec<GenSet>,
}

impl WeightSlice {
    /// Enumerates the slice; empty when `w` lies outside the window.
    pub fn new(ring: FormRing, degree: usize, weight: Multidegree) -> Self {
        let basis = if ring.in_window(&weight) { ring.allowed_gensets(&weight, degree) } else { Vec::new() };
        WeightSlice { ring, degree, weight, basis }
    }

    /// The zero space, used for slices of sheaves supported away from `w`.
    pub fn empty(ring: FormRing, degree: usize, weight: Multidegree) -> Self {
        WeightSlice { ring, degree, weight, basis: Vec::new() }
    }

    pub fn ring(&self) -> &FormRing {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn weight(&self) -> Multidegree {
        self.weight
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn gensets(&self) -> &[GenSet] {
        &self.basis
    }

    pub fn term(&self, k: usize) -> Term {
        self.ring.term_from_ambient(self.weight, self.basis[k]).expect("slice basis is regular")
    }

    pub fn terms(&self) -> Vec<Term> {
        (0..self.dim()).map(|k| self.term(k)).collect()
    }

    pub fn basis_form(&self, k: usize) -> LogForm {
        LogForm::from_ambient(self.ring, 1, self.weight, self.basis[k]).expect("slice basis is regular")
    }

    pub fn basis_forms(&self) -> Vec<LogForm> {
        (0..self.dim()).map(|k| self.basis_form(k)).collect()
    }

    pub fn index_of(&self, gens: GenSet) -> Option<usize> {
        self.basis.binary_search(&gens).ok()
    }

    /// Coordinates of a form supported in this slice.
    pub fn coords(&self, form: &LogForm) -> Result<Vec<u8>> {
        if form.ring() != &self.ring {
            return Err(Error::RingMismatch);
        }
        if !form.is_zero() && form.degree() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, form.degree()));
        }
        let mut v = vec![0u8; self.dim()];
        for (w, g, c) in form.ambient_terms() {
            if w != self.weight {
                return Err(Error::NotHomogeneous(format!("term of weight {:?} outside slice", w.to_vec(self.ring.nvars()))));
            }
            let k = self.index_of(g).ok_or_else(|| Error::internal("generator set missing from slice basis"))?;
            v[k] = c;
        }
        Ok(v)
    }

    pub fn form_from_coords(&self, v: &[u8]) -> LogForm {
        let mut out = LogForm::zero(self.ring, self.degree);
        for (k, &c) in v.iter().enumerate() {
            if c != 0 {
                out.add_ambient(self.weight, self.basis[k], c).expect("slice basis is regular");
            }
        }
        out
    }

    /// Matrix (rows: `target` basis, columns: this basis) of a linear map
    /// given on basis forms.
    pub fn matrix_of<F>(&self, target: &WeightSlice, mut map: F) -> Result<FpMatrix>
    where
        F: FnMut(&LogForm) -> Result<LogForm>,
    {
        let cols: Vec<Vec<u8>> = (0..self.dim())
            .map(|k| map(&self.basis_form(k)).and_then(|img| target.coords(&img)))
            .collect::<Result<_>>()?;
        Ok(FpMatrix::from_columns(self.ring.field(), target.dim(), &cols))
    }
}

/// Matrix of `d: Ω^j_w → Ω^{j+1}_w`.
pub fn differential_matrix(ring: FormRing, j: usize, w: Multidegree) -> (WeightSlice, WeightSlice, FpMatrix) {
    let src = WeightSlice::new(ring, j, w);
    let dst = WeightSlice::new(ring, j + 1, w);
    let m = src.matrix_of(&dst, |f| Ok(f.differential())).expect("d preserves weight");
    (src, dst, m)
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::FpMatrix;

/// A finite complex of F_p vector spaces `V_0 → V_1 → … → V_r`, implicitly
/// padded by zeros on both sides. `maps[k]` is the matrix of `V_k → V_{k+1}`.
#[derive(Clone, Debug)]
pub struct SliceComplex {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub maps: Vec<FpMatrix>,
}

/// Ranks and homology of a [`SliceComplex`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSummary {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub homology: Vec<usize>,
    pub composition_zero: bool,
    pub exact: bool,
}

impl SliceComplex {
    pub fn new(labels: Vec<String>, dims: Vec<usize>, maps: Vec<FpMatrix>) -> Result<Self> {
        if labels.len() != dims.len() || maps.len() + 1 != dims.len() {
            return Err(Error::invalid("complex needs one label per node and one map between consecutive nodes"));
        }
        for (k, m) in maps.iter().enumerate() {
            if m.cols() != dims[k] || m.rows() != dims[k + 1] {
                return Err(Error::DimensionMismatch { expected: dims[k] * dims[k + 1], found: m.rows() * m.cols() });
            }
        }
        Ok(SliceComplex { labels, dims, maps })
    }

    pub fn composition_is_zero(&self) -> bool {
        self.maps.windows(2).all(|w| {
            if w[0].cols() == 0 || w[1].rows() == 0 {
                return true;
            }
            w[1].mul(&w[0]).map(|m| m.is_zero()).unwrap_or(false)
        })
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.maps.iter().map(|m| m.rank()).collect()
    }

    /// Homology dimension at each node.
    pub fn homology(&self) -> Vec<usize> {
        let ranks = self.ranks();
        (0..self.dims.len())
            .map(|k| {
                let out = if k < ranks.len() { ranks[k] } else { 0 };
                let inc = if k > 0 { ranks[k - 1] } else { 0 };
                self.dims[k].saturating_sub(out + inc)
            })
            .collect()
    }

    pub fn is_exact(&self) -> bool {
        self.composition_is_zero() && self.homology().iter().all(|&h| h == 0)
    }

    pub fn summary(&self) -> ComplexSummary {
        let ranks = self.ranks();
        let composition_zero = self.composition_is_zero();
        let homology = self.homology();
        let exact = composition_zero && homology.iter().all(|&h| h == 0);
        ComplexSummary { labels: self.labels.clone(), dims: self.dims.clone(), ranks, homology, composition_zero, exact }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;

    #[test]
    fn short_exact_sequence_of_coordinate_spaces() {
        let f = PrimeField::new(2).unwrap();
        let inc = FpMatrix::from_rows(f, &[vec![1], vec![0]]).unwrap();
        let proj = FpMatrix::from_rows(f, &[vec![0, 1]]).unwrap();
        let c = SliceComplex::new(vec!["A".into(), "B".into(), "C".into()], vec![1, 2, 1], vec![inc, proj]).unwrap();
        assert!(c.is_exact());
        let bad = FpMatrix::from_rows(f, &[vec![1, 1]]).unwrap();
        let inc = FpMatrix::from_rows(f, &[vec![1], vec![0]]).unwrap();
        let c = SliceComplex::new(vec!["A".into(), "B".into(), "C".into()], vec![1, 2, 1], vec![inc, bad]).unwrap();
        assert!(!c.composition_is_zero());
    }
}

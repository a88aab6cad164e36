//! Frobenius, the inverse Cartier operator and the Cartier operator on
//! log forms, closed and exact forms per weight, `ν(n) = ker(C − 1)` and
//! Artin–Schreier extensions.
//!
//! In the description `T^w dlog T_I` the inverse Cartier operator sends
//! `c T^w dlog T_I` to `c T^{pw} dlog T_I`, a closed form of weight `pw`.
//! `C` is obtained by inverting that map slice by slice: a closed form of
//! weight `pw` is written as `C⁻¹(η) + (exact)` and `C` returns `η`.

mod artin_schreier;
mod axioms;
mod nu;
mod obstruction;

pub use artin_schreier::{ArtinSchreierExtension, ExtForm, SurjectivityCertificate, c_minus_one_surjectivity};
pub use axioms::{cartier_axioms, CartierAxiomReport, Tally};
pub use nu::{nu_bruteforce_dim, nu_sections, NuSections};
pub use obstruction::{etale_obstruction_demo, exhaustive_artin_schreier_search, ObstructionReport};

use crate::error::{Error, Result};
use crate::forms::{differential_matrix, FormRing, LogForm, Multidegree, WeightSlice};
use crate::gf::{complement_in, FpMatrix};

/// Absolute Frobenius on functions: every exponent is multiplied by `p`.
pub fn frobenius(f: &LogForm) -> Result<LogForm> {
    if f.degree() != 0 {
        return Err(Error::invalid("frobenius acts on functions"));
    }
    inverse_cartier(f)
}

/// A closed representative of `C⁻¹(η)`: `c T^w dlog T_I ↦ c T^{pw} dlog T_I`.
pub fn inverse_cartier(eta: &LogForm) -> Result<LogForm> {
    let p = eta.ring().p() as i32;
    let mut out = LogForm::zero(*eta.ring(), eta.degree());
    for (w, g, c) in eta.ambient_terms() {
        out.add_ambient(w.scale(p), g, c)?;
    }
    Ok(out)
}

/// Closed forms, exact forms and a complement of the exact ones in one slice.
#[derive(Clone, Debug)]
pub struct ZBDecomposition {
    pub slice: WeightSlice,
    pub z_basis: Vec<Vec<u8>>,
    pub b_basis: Vec<Vec<u8>>,
    pub quotient_basis: Vec<Vec<u8>>,
}

impl ZBDecomposition {
    pub fn z_dim(&self) -> usize {
        self.z_basis.len()
    }

    pub fn b_dim(&self) -> usize {
        self.b_basis.len()
    }

    pub fn quotient_dim(&self) -> usize {
        self.quotient_basis.len()
    }

    pub fn z_forms(&self) -> Vec<LogForm> {
        self.z_basis.iter().map(|v| self.slice.form_from_coords(v)).collect()
    }

    pub fn b_forms(&self) -> Vec<LogForm> {
        self.b_basis.iter().map(|v| self.slice.form_from_coords(v)).collect()
    }
}

/// `Z = ker d` and `B = d(Ω^{j-1})` on the weight-`w` slice of `Ω^j`.
pub fn zb_decomposition(ring: FormRing, j: usize, w: Multidegree) -> ZBDecomposition {
    let (slice, _, dmat) = differential_matrix(ring, j, w);
    let z_basis = if slice.dim() == 0 { Vec::new() } else { dmat.kernel_basis() };
    let b_basis = if j == 0 {
        Vec::new()
    } else {
        let (src, _, dprev) = differential_matrix(ring, j - 1, w);
        if src.dim() == 0 || slice.dim() == 0 {
            Vec::new()
        } else {
            dprev.image_basis()
        }
    };
    let quotient_basis = complement_in(ring.field(), slice.dim(), &b_basis, &z_basis);
    ZBDecomposition { slice, z_basis, b_basis, quotient_basis }
}

/// `C` on the closed forms of one slice.
#[derive(Clone, Debug)]
pub struct CartierSlice {
    pub source: ZBDecomposition,
    /// The slice of weight `w/p`, absent when `p ∤ w`.
    pub target: Option<WeightSlice>,
    /// Columns: `C` of each Z-basis vector, in target coordinates.
    pub matrix: FpMatrix,
}

/// Matrix of `C: Z_w → Ω_{w/p}` on slice coordinates.
pub fn cartier_slice(ring: FormRing, j: usize, w: Multidegree) -> Result<CartierSlice> {
    let zb = zb_decomposition(ring, j, w);
    let field = ring.field();
    let n = zb.slice.dim();
    let Some(base) = w.div_exact(ring.p() as i32) else {
        // closed forms of weight prime to p are exact
        if !zb.z_basis.iter().all(|z| crate::gf::in_span(field, &zb.b_basis, z)) {
            return Err(Error::internal("closed form of weight prime to p is not exact"));
        }
        let matrix = FpMatrix::zeros(field, 0, zb.z_dim());
        return Ok(CartierSlice { source: zb, target: None, matrix });
    };
    let target = WeightSlice::new(ring, j, base);
    if zb.z_dim() == 0 {
        let matrix = FpMatrix::zeros(field, target.dim(), 0);
        return Ok(CartierSlice { source: zb, target: Some(target), matrix });
    }
    let mut cols: Vec<Vec<u8>> = Vec::with_capacity(target.dim() + zb.b_dim());
    for f in target.basis_forms() {
        cols.push(zb.slice.coords(&inverse_cartier(&f)?)?);
    }
    cols.extend(zb.b_basis.iter().cloned());
    let system = FpMatrix::from_columns(field, n, &cols);
    let rhs = FpMatrix::from_columns(field, n, &zb.z_basis);
    let sol = system.solve_many(&rhs).map_err(|_| Error::internal("C⁻¹ does not span Z/B on a slice"))?;
    let mut matrix = FpMatrix::zeros(field, target.dim(), zb.z_dim());
    for r in 0..target.dim() {
        for c in 0..zb.z_dim() {
            matrix.set(r, c, sol.get(r, c));
        }
    }
    Ok(CartierSlice { source: zb, target: Some(target), matrix })
}

/// The Cartier operator on a closed form.
pub fn cartier(omega: &LogForm) -> Result<LogForm> {
    if !omega.is_closed() {
        return Err(Error::NotClosed);
    }
    let ring = *omega.ring();
    let field = ring.field();
    let mut out = LogForm::zero(ring, omega.degree());
    for w in omega.weights() {
        let comp = omega.component(&w);
        let slice = WeightSlice::new(ring, omega.degree(), w);
        let v = slice.coords(&comp)?;
        let Some(base) = w.div_exact(ring.p() as i32) else {
            let zb = zb_decomposition(ring, omega.degree(), w);
            if !crate::gf::in_span(field, &zb.b_basis, &v) {
                return Err(Error::internal("closed form of weight prime to p is not exact"));
            }
            continue;
        };
        let target = WeightSlice::new(ring, omega.degree(), base);
        let zb = zb_decomposition(ring, omega.degree(), w);
        let mut cols: Vec<Vec<u8>> = Vec::new();
        for f in target.basis_forms() {
            cols.push(slice.coords(&inverse_cartier(&f)?)?);
        }
        cols.extend(zb.b_basis.iter().cloned());
        let x = FpMatrix::from_columns(field, slice.dim(), &cols)
            .solve(&v)
            .map_err(|_| Error::internal("closed form not in C⁻¹(Ω) + B"))?;
        out = out.add(&target.form_from_coords(&x[..target.dim()]))?;
    }
    Ok(out)
}

/// Matrix of `C⁻¹: Ω_w → (Z/B)_{pw}` composed with projection onto the chosen
/// quotient complement; square and invertible when the bijection holds.
pub fn inverse_cartier_quotient_matrix(ring: FormRing, j: usize, w: Multidegree) -> Result<FpMatrix> {
    let src = WeightSlice::new(ring, j, w);
    let zb = zb_decomposition(ring, j, w.scale(ring.p() as i32));
    let field = ring.field();
    let mut cols = zb.b_basis.clone();
    cols.extend(zb.quotient_basis.iter().cloned());
    let basis = FpMatrix::from_columns(field, zb.slice.dim(), &cols);
    let mut out = FpMatrix::zeros(field, zb.quotient_dim(), src.dim());
    for (k, f) in src.basis_forms().iter().enumerate() {
        let v = zb.slice.coords(&inverse_cartier(f)?)?;
        let x = basis.solve(&v).map_err(|_| Error::internal("C⁻¹ image not closed"))?;
        for r in 0..zb.quotient_dim() {
            out.set(r, k, x[zb.b_dim() + r]);
        }
    }
    Ok(out)
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
    fn frobenius_examples() {
        let r = ring(2, 1, &[]);
        assert_eq!(frobenius(&parse(r, "T1 + 1")).unwrap().to_string(), "1 + T1^2");
        assert_eq!(frobenius(&parse(r, "1")).unwrap().to_string(), "1");
        let r = ring(3, 2, &[]);
        assert_eq!(frobenius(&parse(r, "2*T1*T2")).unwrap().to_string(), "2*T1^3*T2^3");
    }

    #[test]
    fn inverse_cartier_on_generators() {
        let r = ring(3, 2, &[1]);
        assert_eq!(inverse_cartier(&parse(r, "dT2")).unwrap().to_string(), "T2^2 dT2");
        assert_eq!(inverse_cartier(&parse(r, "1")).unwrap().to_string(), "1");
        assert_eq!(inverse_cartier(&parse(r, "dlogT1")).unwrap().to_string(), "dlogT1");
    }

    #[test]
    fn cartier_examples() {
        for p in [2, 3, 5] {
            let r = ring(p, 2, &[]);
            let w = format!("T1^{} dT1", p - 1);
            let w = if p == 2 { "T1 dT1".to_string() } else { w };
            assert_eq!(cartier(&parse(r, &w)).unwrap().to_string(), "dT1");
            assert!(cartier(&parse(r, "T1*T2").differential()).unwrap().is_zero());
        }
        let r = ring(3, 2, &[1, 2]);
        let f = parse(r, "dlogT1^dlogT2");
        assert_eq!(cartier(&f).unwrap(), f);
        assert!(matches!(cartier(&parse(r, "T1")), Err(Error::NotClosed)));
    }

    #[test]
    fn zb_examples() {
        let r = ring(3, 1, &[]);
        let zb = zb_decomposition(r, 0, Multidegree::from_slice(&[3]));
        assert_eq!((zb.z_dim(), zb.b_dim()), (1, 0));
        let zb = zb_decomposition(r, 0, Multidegree::from_slice(&[2]));
        assert_eq!(zb.z_dim(), 0);
        let r = ring(3, 2, &[1]);
        let zb = zb_decomposition(r, 2, Multidegree::from_slice(&[1, 2]));
        assert_eq!(zb.z_dim(), zb.slice.dim());
    }
}

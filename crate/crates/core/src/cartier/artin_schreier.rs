use super::cartier;
use crate::error::{Error, Result};
use crate::forms::{FormRing, GenSet, LogForm, Multidegree};
use crate::gf::FpMatrix;

/// `A[γ]/(γ^p − γ − h)` for a function `h` of a [`FormRing`], as the free
/// module `⊕_{k<p} γ^k A` with multiplication reduced by `γ^p = γ + h`.
#[derive(Clone, Debug)]
pub struct ArtinSchreierExtension {
    ring: FormRing,
    h: LogForm,
}

/// An element `Σ_k γ^k ω_k` of `B ⊗_A Ω^j_A`, `k < p`. Degree 0 gives ring elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtForm {
    pub degree: usize,
    pub coeffs: Vec<LogForm>,
}

impl ExtForm {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("γ·({c})"),
                _ => format!("γ^{k}·({c})"),
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

impl ArtinSchreierExtension {
    pub fn new(h: LogForm) -> Result<Self> {
        if h.degree() != 0 {
            return Err(Error::invalid("h must be a function"));
        }
        Ok(ArtinSchreierExtension { ring: *h.ring(), h })
    }

    pub fn ring(&self) -> &FormRing {
        &self.ring
    }

    pub fn h(&self) -> &LogForm {
        &self.h
    }

    pub fn rank(&self) -> usize {
        self.ring.p() as usize
    }

    pub fn zero(&self, degree: usize) -> ExtForm {
        ExtForm { degree, coeffs: vec![LogForm::zero(self.ring, degree); self.rank()] }
    }

    /// `γ^k · ω` for `k < p`.
    pub fn embed(&self, k: usize, omega: &LogForm) -> ExtForm {
        let mut e = self.zero(omega.degree());
        e.coeffs[k] = omega.clone();
        e
    }

    pub fn gamma(&self) -> ExtForm {
        self.embed(1, &LogForm::scalar(self.ring, 1))
    }

    pub fn add(&self, a: &ExtForm, b: &ExtForm) -> Result<ExtForm> {
        if a.degree != b.degree {
            return Err(Error::DegreeMismatch(a.degree, b.degree));
        }
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.add(y)).collect::<Result<_>>()?;
        Ok(ExtForm { degree: a.degree, coeffs })
    }

    pub fn sub(&self, a: &ExtForm, b: &ExtForm) -> Result<ExtForm> {
        let nb = ExtForm { degree: b.degree, coeffs: b.coeffs.iter().map(|c| c.neg()).collect() };
        self.add(a, &nb)
    }

    /// Product, reducing `γ^{a+b}` for `a + b ≥ p` by `γ^p = γ + h`.
    pub fn mul(&self, a: &ExtForm, b: &ExtForm) -> Result<ExtForm> {
        let p = self.rank();
        let mut out = self.zero(a.degree + b.degree);
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let prod = x.wedge(y)?;
                let k = i + j;
                if k < p {
                    out.coeffs[k] = out.coeffs[k].add(&prod)?;
                } else {
                    let low = k - p;
                    out.coeffs[low + 1] = out.coeffs[low + 1].add(&prod)?;
                    out.coeffs[low] = out.coeffs[low].add(&self.h.wedge(&prod)?)?;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, a: &ExtForm, e: usize) -> Result<ExtForm> {
        let mut acc = self.embed(0, &LogForm::scalar(self.ring, 1));
        for _ in 0..e {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }

    /// Checks `γ^p − γ − h = 0` by multiplying out `γ^p`.
    pub fn defining_relation_holds(&self) -> Result<bool> {
        let gp = self.pow(&self.gamma(), self.rank())?;
        let rhs = self.add(&self.gamma(), &self.embed(0, &self.h))?;
        Ok(gp == rhs)
    }

    /// Coefficients `α_s` with `ω = Σ_s (γ^p)^s α_s`. Since `γ^p = γ + h`,
    /// `{(γ^p)^s}` is again a module basis and the change of basis is unitriangular.
    pub fn frobenius_coordinates(&self, omega: &ExtForm) -> Result<Vec<LogForm>> {
        let p = self.rank();
        let mut hp = vec![LogForm::scalar(self.ring, 1)];
        for k in 1..p {
            hp.push(hp[k - 1].wedge(&self.h)?);
        }
        let mut alpha = vec![LogForm::zero(self.ring, omega.degree); p];
        for k in (0..p).rev() {
            let mut a = omega.coeffs[k].clone();
            for s in k + 1..p {
                let term = hp[s - k].wedge(&alpha[s])?.scale(binomial(s, k));
                a = a.sub(&term)?;
            }
            alpha[k] = a;
        }
        Ok(alpha)
    }

    pub fn is_closed(&self, omega: &ExtForm) -> Result<bool> {
        Ok(self.frobenius_coordinates(omega)?.iter().all(|a| a.is_closed()))
    }

    /// `C(Σ (γ^p)^s α_s) = Σ γ^s C(α_s)`.
    pub fn cartier(&self, omega: &ExtForm) -> Result<ExtForm> {
        let alpha = self.frobenius_coordinates(omega)?;
        let mut out = self.zero(omega.degree);
        for (s, a) in alpha.iter().enumerate() {
            out.coeffs[s] = cartier(a)?;
        }
        Ok(out)
    }
}

/// Witness that `h · dlog T_I` lies in the image of `C − 1` after adjoining
/// a root of `γ^p − γ = h`.
#[derive(Clone, Debug)]
pub struct SurjectivityCertificate {
    pub h: String,
    pub generators: Vec<u8>,
    /// A root of `γ^p − γ = h` already in the base ring, when one exists.
    pub base_root: Option<String>,
    pub preimage: String,
    pub image: String,
    pub relation_holds: bool,
    pub module_rank: usize,
    pub verified: bool,
}

/// Constructs `η′ = −γ^p · dlog T_I` with `(C − 1)(η′) = h · dlog T_I`.
///
/// With `γ^p − γ = h`, `(C − 1)(γ^p ω) = γ ω − γ^p ω = −h ω` for a
/// `C`-fixed `ω`, so the preimage carries a minus sign; for `p = 2` it is `γ² ω`.
pub fn c_minus_one_surjectivity(target: &LogForm) -> Result<SurjectivityCertificate> {
    let ring = *target.ring();
    let p = ring.p() as i32;
    let mut gens: Option<GenSet> = None;
    let mut hmax = 0;
    for (w, g, _) in target.ambient_terms() {
        if gens.is_some_and(|g0| g0 != g) {
            return Err(Error::NotHomogeneous("target must be h · dlog T_I for one I".into()));
        }
        gens = Some(g);
        hmax = hmax.max(w.0.iter().map(|x| x.abs()).max().unwrap_or(0));
    }
    let gens = gens.unwrap_or(GenSet::empty());
    if gens.positions().any(|k| !ring.is_log(k) && !ring.is_laurent(k)) {
        return Err(Error::NotHomogeneous("dlog generators must be log or inverted variables".into()));
    }
    let work = ring.with_radius(ring.radius().max(p * (hmax + 1)))?;
    let dlog = LogForm::from_ambient(work, 1, Multidegree::zero(), gens)?;
    let mut h = LogForm::zero(work, 0);
    for (w, _, c) in target.ambient_terms() {
        h.add_ambient(w, GenSet::empty(), c)?;
    }
    let ext = ArtinSchreierExtension::new(h.clone())?;
    let gamma_p = ext.pow(&ext.gamma(), p as usize)?;
    let preimage = ext.mul(&gamma_p, &ext.embed(0, &dlog))?;
    let preimage = ext.sub(&ext.zero(gens.len()), &preimage)?;
    let image = ext.sub(&ext.cartier(&preimage)?, &preimage)?;
    let expected = ext.embed(0, &h.wedge(&dlog)?);
    let base_root = artin_schreier_root_in_base(&h)?;
    Ok(SurjectivityCertificate {
        h: h.to_string(),
        generators: gens.positions().map(|k| ring.label(k)).collect(),
        base_root: base_root.map(|r| r.to_string()),
        preimage: preimage.to_text(),
        image: image.to_text(),
        relation_holds: ext.defining_relation_holds()?,
        module_rank: ext.rank(),
        verified: image == expected,
    })
}

/// Solves `γ^p − γ = h` for `γ` in the ring, searching among functions
/// whose Frobenius stays in the window. `γ ↦ γ^p − γ` is F_p-linear, so this
/// is a single linear solve.
pub fn artin_schreier_root_in_base(h: &LogForm) -> Result<Option<LogForm>> {
    let ring = *h.ring();
    let p = ring.p() as i32;
    let weights = ring.window_weights();
    let index: std::collections::HashMap<Multidegree, usize> =
        weights.iter().enumerate().map(|(i, w)| (*w, i)).collect();
    let unknowns: Vec<Multidegree> = weights.iter().copied().filter(|w| ring.in_window(&w.scale(p))).collect();
    let field = ring.field();
    let mut m = FpMatrix::zeros(field, weights.len(), unknowns.len());
    for (c, w) in unknowns.iter().enumerate() {
        m.add_to(index[&w.scale(p)], c, 1);
        m.add_to(index[w], c, field.neg(1));
    }
    let mut rhs = vec![0u8; weights.len()];
    for (w, _, c) in h.ambient_terms() {
        rhs[index[&w]] = c;
    }
    match m.solve(&rhs) {
        Ok(x) => {
            let mut g = LogForm::zero(ring, 0);
            for (c, w) in unknowns.iter().enumerate() {
                g.add_ambient(*w, GenSet::empty(), x[c])?;
            }
            Ok(Some(g))
        }
        Err(Error::Inconsistent) => Ok(None),
        Err(e) => Err(e),
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
    fn extension_for_t1_over_f2() {
        let r = ring(2, 2, &[1, 2]);
        let target = LogForm::parse(r, "T1 dlogT2").unwrap();
        let cert = c_minus_one_surjectivity(&target).unwrap();
        assert!(cert.relation_holds && cert.verified);
        assert_eq!(cert.module_rank, 2);
        assert!(cert.base_root.is_none());
        assert_eq!(cert.preimage, "(T1 dlogT2) + γ·(dlogT2)");
    }

    #[test]
    fn odd_prime_certificates_verify() {
        for p in [3, 5] {
            let r = ring(p, 2, &[1, 2]);
            for s in ["T1 dlogT1^dlogT2", "T1*T2 dlogT2 + 2 dlogT2", "dlogT1"] {
                let cert = c_minus_one_surjectivity(&LogForm::parse(r, s).unwrap()).unwrap();
                assert!(cert.verified, "{s} over F_{p}");
                assert!(cert.relation_holds);
            }
        }
    }

    #[test]
    fn constant_h_has_root_only_when_zero() {
        let r = ring(3, 1, &[1]);
        for c in 0..3 {
            let h = LogForm::scalar(r, c);
            let root = artin_schreier_root_in_base(&h).unwrap();
            let exhaustive = (0..3u8).any(|a| PrimeField::new(3).unwrap().pow(a, 3) as i64 - a as i64 == c);
            assert_eq!(root.is_some(), exhaustive);
        }
        let h = LogForm::parse(r, "T1^3 + 2*T1").unwrap();
        assert_eq!(artin_schreier_root_in_base(&h).unwrap().unwrap().to_string(), "T1");
    }
}

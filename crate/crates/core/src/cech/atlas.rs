//! Affine-chart model: each chart is a polynomial ring with log variables,
//! overlaps invert the variables cutting out the other charts, and sections
//! are compared through monomial transition maps
//! `v_k = Π u_i^{M_{k,i}}`, so that `dlog v_k = Σ_i M_{k,i} dlog u_i`.
//!
//! Transition exponents are recovered from the torus weights of the chart
//! variables by exact rational elimination.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::forms::{FormRing, GenSet, Multidegree, WeightSlice};
use crate::gf::{FpMatrix, PrimeField};

type Q = Ratio<i64>;

/// One affine chart.
#[derive(Clone, Debug)]
pub struct Chart {
    pub name: String,
    /// Torus weight of each chart variable.
    pub weights: Vec<Vec<i64>>,
    /// Torus weight of the trivializing section of the twist.
    pub twist: Vec<i64>,
    pub log_mask: u32,
    /// `units[β]`: the variable of this chart that is inverted on the overlap with chart `β`.
    pub units: Vec<Option<usize>>,
}

/// Solves `x · W = t` for integer `x`, `W` having independent rows.
#[derive(Clone, Debug)]
struct LatticeSolver {
    rows: Vec<Vec<i64>>,
    cols: Vec<usize>,
    inverse: Vec<Vec<Q>>,
}

impl LatticeSolver {
    fn new(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.len());
        // pivot columns of W by elimination on a working copy
        let mut work: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| Q::from_integer(x)).collect()).collect();
        let mut cols = Vec::new();
        let mut rank = 0;
        for c in 0..d {
            let Some(piv) = (rank..n).find(|&r| work[r][c] != Q::from_integer(0)) else {
                continue;
            };
            work.swap(rank, piv);
            for r in 0..n {
                if r != rank && work[r][c] != Q::from_integer(0) {
                    let f = work[r][c] / work[rank][c];
                    for c2 in 0..d {
                        let sub = f * work[rank][c2];
                        work[r][c2] -= sub;
                    }
                }
            }
            cols.push(c);
            rank += 1;
        }
        if rank != n {
            return Err(Error::invalid("chart variable weights are dependent"));
        }
        // invert the square submatrix S = W[:, cols] by Gauss-Jordan
        let mut aug: Vec<Vec<Q>> = (0..n)
            .map(|r| {
                let mut row: Vec<Q> = cols.iter().map(|&c| Q::from_integer(rows[r][c])).collect();
                row.extend((0..n).map(|k| Q::from_integer((k == r) as i64)));
                row
            })
            .collect();
        for c in 0..n {
            let piv = (c..n).find(|&r| aug[r][c] != Q::from_integer(0)).ok_or_else(|| Error::internal("singular chart"))?;
            aug.swap(c, piv);
            let inv = Q::from_integer(1) / aug[c][c];
            for x in aug[c].iter_mut() {
                *x *= inv;
            }
            for r in 0..n {
                if r != c && aug[r][c] != Q::from_integer(0) {
                    let f = aug[r][c];
                    for c2 in 0..2 * n {
                        let sub = f * aug[c][c2];
                        aug[r][c2] -= sub;
                    }
                }
            }
        }
        let inverse = aug.into_iter().map(|row| row[n..].to_vec()).collect();
        Ok(LatticeSolver { rows: rows.to_vec(), cols, inverse })
    }

    fn solve(&self, target: &[i64]) -> Option<Vec<i64>> {
        let n = self.rows.len();
        // x = t[cols] · S^{-1}
        let x: Vec<Q> = (0..n)
            .map(|i| self.cols.iter().enumerate().map(|(r, &c)| Q::from_integer(target[c]) * self.inverse[r][i]).sum())
            .collect();
        if x.iter().any(|q| !q.is_integer()) {
            return None;
        }
        let x: Vec<i64> = x.iter().map(|q| q.to_integer()).collect();
        let consistent = (0..target.len()).all(|c| (0..n).map(|i| x[i] * self.rows[i][c]).sum::<i64>() == target[c]);
        consistent.then_some(x)
    }
}

#[derive(Clone, Debug)]
struct Transition {
    /// `matrix[k][i]`: exponent of `u_i` in the `k`-th variable of the source chart.
    matrix: Vec<Vec<i64>>,
    /// Exponents of `g_source / g_target`.
    offset: Vec<i64>,
}

/// A finite atlas of toric charts with a common torus of rank `d`.
#[derive(Clone, Debug)]
pub struct Atlas {
    field: PrimeField,
    pub torus_rank: usize,
    pub charts: Vec<Chart>,
    solvers: Vec<LatticeSolver>,
    transitions: Vec<Vec<Option<Transition>>>,
}

const UNBOUNDED: i32 = 1 << 20;

impl Atlas {
    pub fn new(field: PrimeField, torus_rank: usize, charts: Vec<Chart>) -> Result<Self> {
        let solvers: Vec<LatticeSolver> = charts.iter().map(|c| LatticeSolver::new(&c.weights)).collect::<Result<_>>()?;
        let mut transitions = Vec::new();
        for (b, cb) in charts.iter().enumerate() {
            let mut row = Vec::new();
            for (a, ca) in charts.iter().enumerate() {
                if a == b {
                    row.push(None);
                    continue;
                }
                let matrix = cb
                    .weights
                    .iter()
                    .map(|wt| solvers[a].solve(wt))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::invalid(format!("chart {} is not monomial in chart {}", cb.name, ca.name)))?;
                let diff: Vec<i64> = cb.twist.iter().zip(&ca.twist).map(|(x, y)| x - y).collect();
                let offset = solvers[a].solve(&diff).ok_or_else(|| Error::invalid("twist transition is not monomial"))?;
                row.push(Some(Transition { matrix, offset }));
            }
            transitions.push(row);
        }
        Ok(Atlas { field, torus_rank, charts, solvers, transitions })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    fn nvars(&self, chart: usize) -> usize {
        self.charts[chart].weights.len()
    }

    /// The ring of the intersection `U_I`, presented on its first chart.
    pub fn ring_of(&self, set: GenSet) -> Result<(usize, FormRing)> {
        let a = set.positions().next().ok_or_else(|| Error::invalid("empty chart set"))?;
        let mut inverted = 0u32;
        for b in set.positions().skip(1) {
            let u = self.charts[a].units[b].ok_or_else(|| Error::internal("overlap without unit"))?;
            inverted |= 1 << u;
        }
        let ring = FormRing::new(self.field, self.nvars(a))?
            .with_radius(UNBOUNDED)?
            .with_log_mask(self.charts[a].log_mask)
            .with_laurent_mask(inverted);
        Ok((a, ring))
    }

    /// Exponent of chart `a` whose monomial (times the twist section) has weight `chi`.
    pub fn exponent(&self, a: usize, chi: &[i64]) -> Option<Vec<i64>> {
        let t: Vec<i64> = chi.iter().zip(&self.charts[a].twist).map(|(x, y)| x - y).collect();
        self.solvers[a].solve(&t)
    }

    /// Sections of `Ω^j(log)` twisted by the atlas line bundle on `U_I` at weight `chi`.
    pub fn section_slice(&self, set: GenSet, j: usize, chi: &[i64]) -> Result<WeightSlice> {
        let (a, ring) = self.ring_of(set)?;
        let zero = Multidegree::zero();
        Ok(match self.exponent(a, chi) {
            Some(e) if e.iter().all(|x| x.abs() < UNBOUNDED as i64) => {
                let w: Vec<i32> = e.iter().map(|&x| x as i32).collect();
                WeightSlice::new(ring, j, Multidegree::from_slice(&w))
            }
            _ => WeightSlice::empty(ring, j, zero),
        })
    }

    /// Matrix of the restriction `Γ(U_J) → Γ(U_I)` for `J ⊂ I` at one weight.
    pub fn restriction(&self, src: &WeightSlice, src_set: GenSet, dst: &WeightSlice, dst_set: GenSet) -> Result<FpMatrix> {
        let field = self.field;
        let b = src_set.positions().next().ok_or_else(|| Error::invalid("empty chart set"))?;
        let a = dst_set.positions().next().ok_or_else(|| Error::invalid("empty chart set"))?;
        let mut m = FpMatrix::zeros(field, dst.dim(), src.dim());
        if src.dim() == 0 {
            return Ok(m);
        }
        if a == b {
            for (c, g) in src.gensets().iter().enumerate() {
                let r = dst.index_of(*g).ok_or_else(|| Error::internal("restriction leaves the section space"))?;
                m.set(r, c, 1);
            }
            return Ok(m);
        }
        let tr = self.transitions[b][a].as_ref().expect("distinct charts");
        let nb = self.nvars(b);
        let na = self.nvars(a);
        let wb = src.weight().to_vec(nb);
        let wa: Vec<i64> =
            (0..na).map(|i| tr.offset[i] + (0..nb).map(|k| wb[k] as i64 * tr.matrix[k][i]).sum::<i64>()).collect();
        if dst.dim() > 0 && wa != dst.weight().to_vec(na).iter().map(|&x| x as i64).collect::<Vec<_>>() {
            return Err(Error::internal("transition does not preserve the torus weight"));
        }
        for (c, g) in src.gensets().iter().enumerate() {
            // ⋀_{k∈g} Σ_i M_{k,i} dlog u_i
            let mut acc: Vec<(GenSet, i64)> = vec![(GenSet::empty(), 1)];
            for k in g.positions() {
                let mut next: Vec<(GenSet, i64)> = Vec::new();
                for (s, coef) in &acc {
                    for i in 0..na {
                        let mk = tr.matrix[k][i];
                        if mk == 0 {
                            continue;
                        }
                        if let Some((s2, neg)) = s.wedge(GenSet::from_positions(&[i])) {
                            let v = coef * mk * if neg { -1 } else { 1 };
                            match next.iter_mut().find(|(t, _)| *t == s2) {
                                Some(e) => e.1 += v,
                                None => next.push((s2, v)),
                            }
                        }
                    }
                }
                acc = next;
            }
            for (s, coef) in acc {
                let x = field.reduce(coef);
                if x == 0 {
                    continue;
                }
                let r = dst.index_of(s).ok_or_else(|| Error::internal("restriction leaves the section space"))?;
                m.set(r, c, field.add(m.get(r, c), x));
            }
        }
        Ok(m)
    }

    /// The Čech complex of the atlas covering at weight `chi`:
    /// per-degree cochain dimensions and coboundary matrices.
    pub fn cech_complex(&self, j: usize, chi: &[i64]) -> Result<(Vec<usize>, Vec<FpMatrix>)> {
        let count = self.charts.len();
        let all = (1u32 << count) - 1;
        let levels: Vec<Vec<GenSet>> = (1..=count).map(|s| GenSet::subsets(all, s)).collect();
        let slices: Vec<Vec<WeightSlice>> = levels
            .iter()
            .map(|lv| lv.iter().map(|&s| self.section_slice(s, j, chi)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let dims: Vec<usize> = slices.iter().map(|lv| lv.iter().map(|s| s.dim()).sum()).collect();
        let mut maps = Vec::new();
        for k in 0..count.saturating_sub(1) {
            let mut m = FpMatrix::zeros(self.field, dims[k + 1], dims[k]);
            let mut row_off = 0;
            for (r, set) in levels[k + 1].iter().enumerate() {
                let dst = &slices[k + 1][r];
                for (t, i) in set.positions().enumerate() {
                    let face = set.without(i);
                    let c = levels[k].binary_search(&face).expect("faces are listed");
                    let col_off: usize = slices[k][..c].iter().map(|s| s.dim()).sum();
                    let src = &slices[k][c];
                    let block = self.restriction(src, face, dst, *set)?;
                    for rr in 0..block.rows() {
                        for cc in 0..block.cols() {
                            let v = block.get(rr, cc);
                            if v != 0 {
                                let v = if t % 2 == 0 { v } else { self.field.neg(v) };
                                m.add_to(row_off + rr, col_off + cc, v);
                            }
                        }
                    }
                }
                row_off += dst.dim();
            }
            maps.push(m);
        }
        Ok((dims, maps))
    }

    /// `dim Ȟ^k` at weight `chi`; fails if the coboundaries do not compose to zero.
    pub fn cohomology_dims(&self, j: usize, chi: &[i64]) -> Result<Vec<usize>> {
        let (dims, maps) = self.cech_complex(j, chi)?;
        for k in 1..maps.len() {
            if !maps[k].mul(&maps[k - 1])?.is_zero() {
                return Err(Error::internal("Čech coboundary does not square to zero"));
            }
        }
        let ranks: Vec<usize> = maps.iter().map(|m| m.rank()).collect();
        Ok((0..dims.len())
            .map(|k| dims[k] - ranks.get(k).copied().unwrap_or(0) - if k > 0 { ranks[k - 1] } else { 0 })
            .collect())
    }
}

fn unit_vec(d: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; d];
    v[i] = 1;
    v
}

/// The standard charts `U_a = {X_a ≠ 0}` of `P^n` with coordinates
/// `X_k / X_a`, log divisors `V(X_s)` for `s ∈ log_set`, twisted by `O(l)`.
pub fn projective_atlas(field: PrimeField, n: usize, log_set: &[usize], twist: i32) -> Result<Atlas> {
    if n == 0 || n >= 8 {
        return Err(Error::invalid("projective dimension must lie in 1..=7"));
    }
    let d = n + 1;
    let charts = (0..d)
        .map(|a| {
            let others: Vec<usize> = (0..d).filter(|&k| k != a).collect();
            let weights = others
                .iter()
                .map(|&k| {
                    let mut v = unit_vec(d, k);
                    v[a] -= 1;
                    v
                })
                .collect();
            let log_mask = others.iter().enumerate().filter(|(_, k)| log_set.contains(k)).fold(0, |m, (i, _)| m | 1 << i);
            let units = (0..d).map(|b| others.iter().position(|&k| k == b)).collect();
            let twist_v: Vec<i64> = unit_vec(d, a).iter().map(|x| x * twist as i64).collect();
            Chart { name: format!("U{a}"), weights, twist: twist_v, log_mask, units }
        })
        .collect();
    Atlas::new(field, d, charts)
}

/// The `c` standard charts of the blowup of `A^m` along `V(T_1, …, T_c)`.
///
/// On chart `j` (0-based), `T_j = u_j`, `T_i = u_j u_i` for other `i < c`,
/// and `T_i = u_i` for `i ≥ c`. The exceptional divisor is `V(u_j)`; the
/// strict transform of `V(T_1)` is `V(u_0)` on charts `j ≠ 0` and empty on
/// chart 0. Both are log divisors.
pub fn blowup_charts(field: PrimeField, m: usize, c: usize) -> Result<Atlas> {
    if c < 2 || c > m || m > 6 {
        return Err(Error::invalid("blowup requires 2 ≤ c ≤ m ≤ 6"));
    }
    let charts = (0..c)
        .map(|j| {
            let weights = (0..m)
                .map(|i| {
                    let mut v = unit_vec(m, i);
                    if i < c && i != j {
                        v[j] -= 1;
                    }
                    v
                })
                .collect();
            let mut log_mask = 1u32 << j;
            if j != 0 {
                log_mask |= 1;
            }
            let units = (0..c).map(|k| (k != j).then_some(k)).collect();
            Chart { name: format!("B{}", j + 1), weights, twist: vec![0; m], log_mask, units }
        })
        .collect();
    Atlas::new(field, m, charts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_solver_inverts_chart_weights() {
        let s = LatticeSolver::new(&[vec![1, -1, 0], vec![0, -1, 1]]).unwrap();
        assert_eq!(s.solve(&[2, -3, 1]), Some(vec![2, 1]));
        assert_eq!(s.solve(&[1, 0, 0]), None);
    }

    #[test]
    fn blowup_transitions_are_monomial() {
        let f = PrimeField::new(2).unwrap();
        let at = blowup_charts(f, 3, 2).unwrap();
        // chart 1 in terms of chart 0: u'_1 = T_2 = u_0 u_1, u'_0 = T_1/T_2 = u_1^{-1}
        let tr = at.transitions[1][0].as_ref().unwrap();
        assert_eq!(tr.matrix, vec![vec![0, -1, 0], vec![1, 1, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn p1_chart_model_matches_known_dims() {
        let f = PrimeField::new(3).unwrap();
        let at = projective_atlas(f, 1, &[], 0).unwrap();
        assert_eq!(at.cohomology_dims(1, &[0, 0]).unwrap(), vec![0, 1]);
        assert_eq!(at.cohomology_dims(0, &[0, 0]).unwrap(), vec![1, 0]);
        let at = projective_atlas(f, 1, &[], -2).unwrap();
        assert_eq!(at.cohomology_dims(0, &[-1, -1]).unwrap(), vec![0, 1]);
    }
}

//! Hermitian SDPs through the real embedding `H ↦ [[Re H, −Im H], [Im H, Re H]]`.
//!
//! `tr(H X) = ½ tr(H̃ X̃)` for Hermitian `H`, `X`. The embedded program has no
//! constraint forcing `X̃` to have the block structure, but averaging any
//! solution with its image under `J = [[0, −I], [I, 0]]` restores it without
//! changing feasibility or the objective, and that average is what
//! [`ComplexSdp::solve`] decodes.

use bellforge_sdp::{solve, SdpOptions, SdpProblem, SdpStatus, SparseSym};
use nalgebra::DMatrix;

use crate::linalg::{c, CMatrix};
use crate::{Error, Result};

fn embed(h: &CMatrix) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |r, col| {
        let (i, bi) = (r % n, r / n);
        let (j, bj) = (col % n, col / n);
        let z = h[(i, j)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

fn decode(x: &DMatrix<f64>) -> CMatrix {
    let n = x.nrows() / 2;
    CMatrix::from_fn(n, n, |i, j| {
        let re = 0.5 * (x[(i, j)] + x[(n + i, n + j)]);
        let im = 0.5 * (x[(n + i, j)] - x[(i, n + j)]);
        c(re, im)
    })
}

/// Maximize `Σ_k tr(C_k X_k)` over Hermitian `X_k ⪰ 0` under linear equalities.
#[derive(Debug, Clone)]
pub(crate) struct ComplexSdp {
    dims: Vec<usize>,
    objective: SparseSym,
    problem_constraints: Vec<(SparseSym, f64)>,
}

impl ComplexSdp {
    pub fn new(dims: Vec<usize>) -> Self {
        Self {
            dims,
            objective: SparseSym::new(),
            problem_constraints: Vec::new(),
        }
    }

    pub fn add_objective(&mut self, block: usize, h: &CMatrix) {
        self.objective.push_dense(block, &embed(h), 0.5);
    }

    /// `Σ tr(H X_block) = rhs`.
    pub fn add_constraint(&mut self, terms: &[(usize, &CMatrix)], rhs: f64) {
        let mut a = SparseSym::new();
        for (block, h) in terms {
            a.push_dense(*block, &embed(h), 0.5);
        }
        self.problem_constraints.push((a, rhs));
    }

    /// `|Σ tr(H X_block) − center| ≤ eps`, through two scalar slack blocks;
    /// an equality when `eps` is zero.
    pub fn add_band(&mut self, terms: &[(usize, &CMatrix)], center: f64, eps: f64) {
        if eps <= 0.0 {
            self.add_constraint(terms, center);
            return;
        }
        let one = CMatrix::from_element(1, 1, c(1.0, 0.0));
        let minus = CMatrix::from_element(1, 1, c(-1.0, 0.0));
        for (slack, rhs) in [(&one, center + eps), (&minus, center - eps)] {
            let block = self.dims.len();
            self.dims.push(1);
            let mut t = terms.to_vec();
            t.push((block, slack));
            self.add_constraint(&t, rhs);
        }
    }

    /// `Σ_{k ∈ blocks} X_k = target`, entry by entry.
    pub fn add_sum_equals(&mut self, blocks: &[usize], target: &CMatrix) {
        let n = target.nrows();
        for i in 0..n {
            for j in i..n {
                // Re X_ij via (E_ij + E_ji)/2, Im X_ij via i(E_ij − E_ji)/2
                let mut re = CMatrix::zeros(n, n);
                re[(i, j)] += c(0.5, 0.0);
                re[(j, i)] += c(0.5, 0.0);
                let terms: Vec<(usize, &CMatrix)> = blocks.iter().map(|&b| (b, &re)).collect();
                self.add_constraint(&terms, target[(i, j)].re);
                if i != j {
                    let mut im = CMatrix::zeros(n, n);
                    im[(i, j)] = c(0.0, 0.5);
                    im[(j, i)] = c(0.0, -0.5);
                    let terms: Vec<(usize, &CMatrix)> =
                        blocks.iter().map(|&b| (b, &im)).collect();
                    self.add_constraint(&terms, target[(i, j)].im);
                }
            }
        }
    }

    pub fn solve(&self) -> Result<(f64, Vec<CMatrix>)> {
        let mut p = SdpProblem::new(self.dims.iter().map(|d| 2 * d).collect());
        p.objective = self.objective.clone();
        for (a, b) in &self.problem_constraints {
            p.add_constraint(a.clone(), *b);
        }
        let sol = solve(&p, &SdpOptions::default())?;
        if sol.status != SdpStatus::Optimal {
            return Err(Error::Numerical(format!(
                "measurement SDP ended with status {:?}",
                sol.status
            )));
        }
        let blocks = sol.x.blocks.iter().map(decode).collect();
        Ok((sol.primal_objective, blocks))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn top_eigenvalue_of_sigma_y() {
        let mut sdp = ComplexSdp::new(vec![2]);
        sdp.add_objective(0, &linalg::sigma_y());
        sdp.add_constraint(&[(0, &linalg::identity(2))], 1.0);
        let (v, x) = sdp.solve().unwrap();
        assert!((v - 1.0).abs() < 1e-7);
        // the optimum is the σ_y = +1 eigenprojector, which is complex
        assert!((x[0][(1, 0)] - c(0.0, 0.5)).norm() < 1e-4);
    }

    #[test]
    fn band_limits_a_diagonal_entry() {
        // max X_00 with tr X = 1 and |X_00 − X_11| ≤ 0.2 gives X_00 = 0.6
        let mut sdp = ComplexSdp::new(vec![2]);
        sdp.add_objective(0, &CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])));
        sdp.add_constraint(&[(0, &linalg::identity(2))], 1.0);
        sdp.add_band(&[(0, &linalg::sigma_z())], 0.0, 0.2);
        let (v, x) = sdp.solve().unwrap();
        assert!((v - 0.6).abs() < 1e-7, "{v}");
        assert_eq!(x.len(), 3);
    }
}

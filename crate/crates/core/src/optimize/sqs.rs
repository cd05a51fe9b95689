//! Local search over symmetric qubit (and qudit) strategies.
//!
//! Every setting carries one SU(D) element `U_x`; its columns, grouped by the
//! rank partition, span the projectors of the shared measurement. The state
//! is not parametrized: for fixed measurements the best state in a subspace
//! is the top eigenvector of the Bell operator compressed to it.

use std::cell::RefCell;

use argmin::core::{CostFunction, Executor, Gradient, TerminationReason, TerminationStatus};
use argmin::solver::linesearch::condition::ArmijoCondition;
use argmin::solver::linesearch::BacktrackingLineSearch;
use argmin::solver::quasinewton::BFGS;
use rand::Rng;
use rayon::prelude::*;

use super::chart::{su_param_count, su_unitary};
use super::{reduce_restarts, restart_rng, OptimizationReport, ParamOptConfig, RestartOutcome, Subspace};
use crate::linalg::{self, c, CMatrix};
use crate::quantum::{Ket, Measurement, QuantumStrategy};
use crate::{BellFunctional, Error, Result};

/// Most rank-partition combinations tried exhaustively.
pub const MAX_PARTITION_COMBINATIONS: usize = 128;

/// Orthonormal basis (as columns) of the symmetric or antisymmetric subspace
/// of `C^d ⊗ C^d`; dimensions `d(d+1)/2` and `d(d−1)/2`.
pub fn subspace_basis(d: usize, symmetric: bool) -> CMatrix {
    let mut cols: Vec<Vec<(usize, f64)>> = Vec::new();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        if symmetric {
            cols.push(vec![(i * d + i, 1.0)]);
        }
        for j in i + 1..d {
            let sign = if symmetric { 1.0 } else { -1.0 };
            cols.push(vec![(i * d + j, h), (j * d + i, sign * h)]);
        }
    }
    let mut out = CMatrix::zeros(d * d, cols.len());
    for (k, col) in cols.iter().enumerate() {
        for &(r, v) in col {
            out[(r, k)] = c(v, 0.0);
        }
    }
    out
}

/// Ranks as equal as possible, larger ones first.
pub fn balanced_ranks(d: usize, outcomes: usize) -> Vec<usize> {
    (0..outcomes)
        .map(|a| d / outcomes + usize::from(a < d % outcomes))
        .collect()
}

/// Projective measurement whose outcome `a` projects onto the next
/// `ranks[a]` columns of `u`.
pub fn projective_from_unitary(u: &CMatrix, ranks: &[usize]) -> Result<Measurement> {
    Measurement::new(projectors(u, ranks))
}

fn projectors(u: &CMatrix, ranks: &[usize]) -> Vec<CMatrix> {
    let d = u.nrows();
    let mut start = 0;
    ranks
        .iter()
        .map(|&r| {
            let cols = u.columns(start, r);
            start += r;
            if r == 0 {
                CMatrix::zeros(d, d)
            } else {
                &cols * cols.adjoint()
            }
        })
        .collect()
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Rank partitions to try: the configured one, every combination when
/// there are at most [`MAX_PARTITION_COMBINATIONS`], otherwise balanced.
fn partitions_to_try(cfg: &ParamOptConfig, settings: usize, outcomes: usize) -> Vec<Vec<Vec<usize>>> {
    if let Some(p) = &cfg.rank_partitions {
        return vec![p.clone()];
    }
    let per = compositions(cfg.local_dim, outcomes);
    let count = (per.len() as f64).powi(settings as i32);
    if count > MAX_PARTITION_COMBINATIONS as f64 {
        return vec![vec![balanced_ranks(cfg.local_dim, outcomes); settings]];
    }
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for _ in 0..settings {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                per.iter().map(move |r| {
                    let mut p = prefix.clone();
                    p.push(r.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Bell operator for shared projectors (offset excluded).
fn shared_bell_operator(f: &BellFunctional, proj: &[Vec<CMatrix>]) -> CMatrix {
    let s = f.scenario();
    let d = proj[0][0].nrows();
    let mut op = CMatrix::zeros(d * d, d * d);
    for x in 0..s.settings_a {
        for a in 0..s.outcomes {
            let mut g = CMatrix::zeros(d, d);
            let mut any = false;
            for y in 0..s.settings_b {
                for b in 0..s.outcomes {
                    let beta = f.coefficient(x, y, a, b);
                    if beta != 0.0 {
                        g += &proj[y][b] * c(beta, 0.0);
                        any = true;
                    }
                }
            }
            if any {
                op += proj[x][a].kronecker(&g);
            }
        }
    }
    op
}

struct SqsProblem<'a> {
    f: &'a BellFunctional,
    d: usize,
    ranks: &'a [Vec<usize>],
    bases: Vec<CMatrix>,
    h: f64,
    best: RefCell<(f64, Vec<f64>)>,
}

impl SqsProblem<'_> {
    fn projectors(&self, p: &[f64]) -> Vec<Vec<CMatrix>> {
        let k = su_param_count(self.d);
        self.ranks
            .iter()
            .enumerate()
            .map(|(x, r)| {
                let u = su_unitary(self.d, &p[x * k..(x + 1) * k]).expect("parameter count");
                projectors(&u, r)
            })
            .collect()
    }

    /// Best value and the subspace index attaining it.
    fn value(&self, p: &[f64]) -> (f64, usize) {
        let op = shared_bell_operator(self.f, &self.projectors(p));
        self.bases
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let top = linalg::hermitian_eigenvalues(&(s.adjoint() * &op * s))
                    .last()
                    .copied()
                    .unwrap_or(f64::NEG_INFINITY);
                (top + self.f.offset, i)
            })
            .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
    }

    fn strategy(&self, p: &[f64]) -> Result<QuantumStrategy> {
        let proj = self.projectors(p);
        let (_, i) = self.value(p);
        let op = shared_bell_operator(self.f, &proj);
        let s = &self.bases[i];
        let (vals, vecs) = linalg::hermitian_eigen(&(s.adjoint() * &op * s));
        let v = vecs.column(vals.len() - 1).into_owned();
        let ket = Ket::normalized((self.d, self.d), s * v)?;
        let ms = proj
            .into_iter()
            .map(Measurement::new)
            .collect::<Result<Vec<_>>>()?;
        QuantumStrategy::new(ket.into(), ms.clone(), ms)
    }
}

/// Borrowing handle passed to the optimizer, which takes problems by value.
struct Objective<'p, 'a>(&'p SqsProblem<'a>);

impl CostFunction for Objective<'_, '_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let (v, _) = self.0.value(p);
        let mut best = self.0.best.borrow_mut();
        if v > best.0 {
            *best = (v, p.clone());
        }
        Ok(-v)
    }
}

impl Gradient for Objective<'_, '_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, p: &Vec<f64>) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        let mut q = p.clone();
        let g = (0..p.len())
            .map(|i| {
                let h = self.0.h;
                q[i] = p[i] + h;
                let up = self.0.value(&q).0;
                q[i] = p[i] - h;
                let down = self.0.value(&q).0;
                q[i] = p[i];
                -(up - down) / (2.0 * h)
            })
            .collect();
        Ok(g)
    }
}

/// One local search; returns (value, parameters, converged).
fn local_search(problem: &SqsProblem, start: Vec<f64>, cfg: &ParamOptConfig) -> (f64, Vec<f64>, bool) {
    let n = start.len();
    let (v0, _) = problem.value(&start);
    *problem.best.borrow_mut() = (v0, start.clone());
    let evals_per_iter = 2 * n + 4;
    let max_iters = (cfg.max_evals / evals_per_iter).max(1) as u64;
    let ls = BacktrackingLineSearch::new(ArmijoCondition::new(1e-4).expect("valid constant"));
    let solver = BFGS::new(ls)
        .with_tolerance_grad(cfg.gradient_tol)
        .and_then(|s| s.with_tolerance_cost(cfg.value_tol));
    let converged = match solver {
        Ok(solver) => {
            let identity: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            let run = Executor::new(Objective(problem), solver)
                .configure(|st| st.param(start).inv_hessian(identity).max_iters(max_iters))
                .run();
            match run {
                Ok(res) => matches!(
                    res.state.termination_status,
                    TerminationStatus::Terminated(
                        TerminationReason::SolverConverged | TerminationReason::TargetCostReached
                    )
                ),
                // line-search breakdown near a flat optimum; keep the best point seen
                Err(_) => false,
            }
        }
        Err(_) => false,
    };
    let (v, p) = problem.best.borrow().clone();
    (v, p, converged)
}

/// Best Bell value found over symmetric quantum strategies of local
/// dimension `cfg.local_dim`. This is a lower bound on the SQS maximum,
/// not a certificate.
pub fn sqs_lower_bound(f: &BellFunctional, cfg: &ParamOptConfig) -> Result<OptimizationReport> {
    let s = f.scenario();
    s.expect_balanced()?;
    cfg.validate(s.settings_a, s.outcomes)?;
    if !f.is_symmetric() {
        eprintln!(
            "warning: `{}` is not party-symmetric; SQS values may be far from its quantum maximum",
            f.name
        );
    }
    let d = cfg.local_dim;
    let bases = match cfg.subspace {
        Subspace::Symmetric => vec![subspace_basis(d, true)],
        Subspace::Antisymmetric => vec![subspace_basis(d, false)],
        Subspace::Full => vec![subspace_basis(d, true), subspace_basis(d, false)],
    };
    let partitions = partitions_to_try(cfg, s.settings_a, s.outcomes);
    let nparams = s.settings_a * su_param_count(d);

    let results: Vec<Result<RestartOutcome>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(cfg.seed, r);
            let mut best: Option<RestartOutcome> = None;
            for ranks in &partitions {
                let start: Vec<f64> = (0..nparams)
                    .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                    .collect();
                let problem = SqsProblem {
                    f,
                    d,
                    ranks,
                    bases: bases.clone(),
                    h: cfg.gradient_step,
                    best: RefCell::new((f64::NEG_INFINITY, Vec::new())),
                };
                let (v, p, conv) = local_search(&problem, start, cfg);
                if best.as_ref().is_none_or(|b| v > b.0) {
                    best = Some((v, problem.strategy(&p)?, conv));
                }
            }
            best.ok_or_else(|| Error::Numerical("no rank partition to try".into()))
        })
        .collect();
    reduce_restarts(f, results, "sqs".into(), d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_dimensions() {
        for d in 2..5 {
            let s = subspace_basis(d, true);
            let a = subspace_basis(d, false);
            assert_eq!(s.ncols(), d * (d + 1) / 2);
            assert_eq!(a.ncols(), d * (d - 1) / 2);
            let swap = linalg::swap_operator(d);
            assert!(linalg::max_abs(&(&swap * &s - &s)) < 1e-15);
            assert!(linalg::max_abs(&(&swap * &a + &a)) < 1e-15);
            assert!(linalg::max_abs(&(s.adjoint() * &s - linalg::identity(s.ncols()))) < 1e-15);
        }
    }

    #[test]
    fn partition_enumeration() {
        let cfg = ParamOptConfig::default();
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(partitions_to_try(&cfg, 3, 2).len(), 27);
        assert_eq!(partitions_to_try(&cfg, 9, 2).len(), 1);
        assert_eq!(balanced_ranks(5, 3), vec![2, 2, 1]);
    }
}

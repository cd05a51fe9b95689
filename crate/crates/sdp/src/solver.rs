use nalgebra::{Cholesky, DMatrix, DVector};

use crate::{BlockMatrix, SdpError, SdpProblem, SparseSym};

#[derive(Debug, Clone, PartialEq)]
pub struct SdpOptions {
    /// Relative duality gap at which an iterate counts as optimal.
    pub tolerance: f64,
    /// Relative primal and dual residual at which an iterate counts as feasible.
    pub feasibility_tolerance: f64,
    pub max_iterations: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Remove linearly dependent equality constraints before solving.
    pub presolve: bool,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            feasibility_tolerance: 1e-8,
            max_iterations: 100,
            step_fraction: 0.98,
            presolve: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    /// A Farkas certificate for the equality system was found.
    PrimalInfeasible,
    /// The primal objective grows without bound along a feasible ray.
    DualInfeasible,
    NumericalFailure,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub x: BlockMatrix,
    /// Dual multipliers, one per constraint of the original problem.
    pub y: Vec<f64>,
    pub z: BlockMatrix,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub relative_gap: f64,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}

/// Per-block Nesterov–Todd scaling data.
struct Scaling {
    lx: Vec<DMatrix<f64>>,
    lz: Vec<DMatrix<f64>>,
    g: Vec<DMatrix<f64>>,
    ginv: Vec<DMatrix<f64>>,
    d: Vec<DVector<f64>>,
    w: BlockMatrix,
}

fn cholesky_l(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    Cholesky::new(m.clone()).map(|c| c.l())
}

fn scaling(x: &BlockMatrix, z: &BlockMatrix) -> Option<Scaling> {
    let k = x.blocks.len();
    let mut s = Scaling {
        lx: Vec::with_capacity(k),
        lz: Vec::with_capacity(k),
        g: Vec::with_capacity(k),
        ginv: Vec::with_capacity(k),
        d: Vec::with_capacity(k),
        w: BlockMatrix { blocks: Vec::with_capacity(k) },
    };
    for (xb, zb) in x.blocks.iter().zip(&z.blocks) {
        let n = xb.nrows();
        let lx = cholesky_l(xb)?;
        let lz = cholesky_l(zb)?;
        let svd = (lz.transpose() * &lx).svd(false, true);
        let v = svd.v_t?.transpose();
        let d = svd.singular_values;
        if d.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return None;
        }
        let lxinv = lx.solve_lower_triangular(&DMatrix::identity(n, n))?;
        let mut g = &lx * &v;
        let mut ginv = v.transpose() * lxinv;
        for i in 0..n {
            let r = d[i].sqrt();
            g.column_mut(i).scale_mut(1.0 / r);
            ginv.row_mut(i).scale_mut(r);
        }
        let mut w = &g * g.transpose();
        let wt = w.transpose();
        w += wt;
        w *= 0.5;
        s.lx.push(lx);
        s.lz.push(lz);
        s.g.push(g);
        s.ginv.push(ginv);
        s.d.push(d);
        s.w.blocks.push(w);
    }
    Some(s)
}

fn apply_a(p: &SdpProblem, x: &BlockMatrix) -> Vec<f64> {
    p.constraints.iter().map(|a| a.dot(x)).collect()
}

fn apply_at(p: &SdpProblem, y: &[f64]) -> BlockMatrix {
    let mut out = BlockMatrix::zeros(&p.block_sizes);
    for (a, &yi) in p.constraints.iter().zip(y) {
        a.add_to(yi, &mut out);
    }
    out
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `W A W` restricted to the blocks `A` touches.
fn sandwich(a: &SparseSym, w: &BlockMatrix) -> Vec<Option<DMatrix<f64>>> {
    let mut out: Vec<Option<DMatrix<f64>>> = vec![None; w.blocks.len()];
    let mut counts = vec![0usize; w.blocks.len()];
    for e in a.entries() {
        counts[e.block] += 1;
    }
    for (k, &cnt) in counts.iter().enumerate() {
        if cnt == 0 {
            continue;
        }
        let wk = &w.blocks[k];
        let n = wk.nrows();
        if cnt > n {
            let mut dense = DMatrix::zeros(n, n);
            for e in a.entries().iter().filter(|e| e.block == k) {
                dense[(e.row, e.col)] += e.value;
                if e.row != e.col {
                    dense[(e.col, e.row)] += e.value;
                }
            }
            out[k] = Some(wk * dense * wk);
        } else {
            let mut acc = DMatrix::zeros(n, n);
            for e in a.entries().iter().filter(|e| e.block == k) {
                let cr = wk.column(e.row);
                let cc = wk.column(e.col);
                acc.ger(e.value, &cr, &cc, 1.0);
                if e.row != e.col {
                    acc.ger(e.value, &cc, &cr, 1.0);
                }
            }
            out[k] = Some(acc);
        }
    }
    out
}

fn sparse_dot_partial(a: &SparseSym, b: &[Option<DMatrix<f64>>]) -> f64 {
    a.entries()
        .iter()
        .map(|e| match &b[e.block] {
            Some(m) => {
                let v = m[(e.row, e.col)];
                if e.row == e.col {
                    e.value * v
                } else {
                    2.0 * e.value * v
                }
            }
            None => 0.0,
        })
        .sum()
}

fn schur_complement(p: &SdpProblem, w: &BlockMatrix) -> DMatrix<f64> {
    let m = p.constraints.len();
    let mut schur = DMatrix::zeros(m, m);
    for j in 0..m {
        let b = sandwich(&p.constraints[j], w);
        for i in 0..=j {
            let v = sparse_dot_partial(&p.constraints[i], &b);
            schur[(i, j)] = v;
            schur[(j, i)] = v;
        }
    }
    schur
}

/// Schur complement with its (possibly regularized) Cholesky factor; the
/// unshifted matrix is kept for iterative refinement.
struct Schur {
    matrix: DMatrix<f64>,
    factor: Cholesky<f64, nalgebra::Dyn>,
}

impl Schur {
    fn new(matrix: DMatrix<f64>) -> Option<Self> {
        let max_diag = matrix.diagonal().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if let Some(factor) = Cholesky::new(matrix.clone()) {
            return Some(Self { matrix, factor });
        }
        let mut shifted = matrix.clone();
        for shift in [1e-14, 1e-12, 1e-10] {
            for i in 0..shifted.nrows() {
                shifted[(i, i)] += shift * max_diag.max(1.0);
            }
            if let Some(factor) = Cholesky::new(shifted.clone()) {
                return Some(Self { matrix, factor });
            }
        }
        None
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut x = self.factor.solve(rhs);
        for _ in 0..3 {
            let r = rhs - &self.matrix * &x;
            if r.amax() <= 1e-15 * rhs.amax() {
                break;
            }
            x += self.factor.solve(&r);
        }
        x
    }
}

struct Direction {
    dx: BlockMatrix,
    dy: Vec<f64>,
    dz: BlockMatrix,
}

fn quad(w: &BlockMatrix, r: &BlockMatrix) -> BlockMatrix {
    w.map_blocks(|k, wk| wk * &r.blocks[k] * wk)
}

fn direction(
    p: &SdpProblem,
    sc: &Scaling,
    schur: &Option<Schur>,
    rc: &BlockMatrix,
    rd: &BlockMatrix,
    rp: &[f64],
) -> Direction {
    let wrdw = quad(&sc.w, rd);
    let a_rc = apply_a(p, rc);
    let a_wrdw = apply_a(p, &wrdw);
    let rhs = DVector::from_iterator(
        rp.len(),
        (0..rp.len()).map(|i| a_rc[i] - a_wrdw[i] - rp[i]),
    );
    let dy: Vec<f64> = match schur {
        Some(c) => c.solve(&rhs).iter().copied().collect(),
        None => Vec::new(),
    };
    let mut dz = apply_at(p, &dy);
    dz.axpy(1.0, rd);
    dz.symmetrize();
    let mut dx = rc.clone();
    dx.axpy(-1.0, &quad(&sc.w, &dz));
    dx.symmetrize();
    Direction { dx, dy, dz }
}

/// Largest `α` with `L Lᵀ + α Δ ⪰ 0`, capped at `cap`.
fn max_step(l: &[DMatrix<f64>], delta: &BlockMatrix, cap: f64) -> f64 {
    let mut alpha = cap;
    for (lk, dk) in l.iter().zip(&delta.blocks) {
        let Some(t) = lk.solve_lower_triangular(dk) else {
            return 0.0;
        };
        let Some(t) = lk.solve_lower_triangular(&t.transpose()) else {
            return 0.0;
        };
        let t = (&t + t.transpose()) * 0.5;
        let lmin = t.symmetric_eigenvalues().min();
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

fn step_lengths(sc: &Scaling, dir: &Direction, frac: f64) -> (f64, f64) {
    let ap = (frac * max_step(&sc.lx, &dir.dx, f64::INFINITY)).min(1.0);
    let ad = (frac * max_step(&sc.lz, &dir.dz, f64::INFINITY)).min(1.0);
    (ap, ad)
}

/// Right-hand side of the scaled complementarity equation.
fn corrector_rc(sc: &Scaling, sigma_mu: f64, pred: Option<&Direction>) -> BlockMatrix {
    let blocks = (0..sc.d.len())
        .map(|k| {
            let d = &sc.d[k];
            let n = d.len();
            let mut t = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                t[(i, i)] = sigma_mu - d[i] * d[i];
            }
            if let Some(pr) = pred {
                let xs = &sc.ginv[k] * &pr.dx.blocks[k] * sc.ginv[k].transpose();
                let zs = sc.g[k].transpose() * &pr.dz.blocks[k] * &sc.g[k];
                let prod = &xs * &zs;
                t -= (&prod + prod.transpose()) * 0.5;
            }
            for i in 0..n {
                for j in 0..n {
                    t[(i, j)] *= 2.0 / (d[i] + d[j]);
                }
            }
            &sc.g[k] * t * sc.g[k].transpose()
        })
        .collect();
    BlockMatrix { blocks }
}

/// Solves the problem with a primal-dual interior point method.
pub fn solve(problem: &SdpProblem, options: &SdpOptions) -> Result<SdpSolution, SdpError> {
    problem.validate()?;

    // keep track of which original constraints survive presolve
    let mut p = problem.clone();
    let kept: Vec<usize> = if options.presolve {
        let before: Vec<(SparseSym, f64)> = problem
            .constraints
            .iter()
            .cloned()
            .zip(problem.rhs.iter().copied())
            .collect();
        p.remove_redundant_constraints(1e-10)?;
        let mut kept = Vec::with_capacity(p.constraints.len());
        let mut j = 0;
        for (i, (a, b)) in before.iter().enumerate() {
            if j < p.constraints.len() && p.constraints[j] == *a && p.rhs[j] == *b {
                kept.push(i);
                j += 1;
            }
        }
        kept
    } else {
        (0..p.constraints.len()).collect()
    };

    let sizes = p.block_sizes.clone();
    let n = p.total_dim() as f64;
    let m = p.constraints.len();
    let c = p.objective.to_dense(&sizes);
    let c_norm = c.norm();
    let b_norm = norm(&p.rhs);
    let a_norms: Vec<f64> = p
        .constraints
        .iter()
        .map(|a| a.frobenius_norm(&sizes))
        .collect();
    let a_max = a_norms.iter().fold(0.0f64, |x, &y| x.max(y));

    let xi = p
        .rhs
        .iter()
        .zip(&a_norms)
        .map(|(b, an)| n * (1.0 + b.abs()) / (1.0 + an))
        .fold(10.0f64.max(n.sqrt()), f64::max);
    let eta = [10.0, n.sqrt(), c_norm, a_max]
        .into_iter()
        .fold(0.0f64, f64::max);

    let mut x = BlockMatrix::scaled_identity(&sizes, xi);
    let mut z = BlockMatrix::scaled_identity(&sizes, eta);
    let mut y = vec![0.0; m];

    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0;
    let (mut pobj, mut dobj, mut pinf, mut dinf, mut gap);

    loop {
        let ax = apply_a(&p, &x);
        let rp: Vec<f64> = p.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let aty = apply_at(&p, &y);
        let mut rd = aty.clone();
        rd.axpy(-1.0, &c);
        rd.axpy(-1.0, &z);

        pobj = c.dot(&x);
        dobj = p.rhs.iter().zip(&y).map(|(b, v)| b * v).sum::<f64>();
        pinf = norm(&rp) / (1.0 + b_norm);
        dinf = rd.norm() / (1.0 + c_norm);
        let xz = x.dot(&z);
        let scale = 1.0 + pobj.abs() + dobj.abs();
        gap = (pobj - dobj).abs().max(xz.max(0.0)) / scale;
        let mu = xz / n;

        let ftol = options.feasibility_tolerance;
        if pinf < ftol && dinf < ftol && gap < options.tolerance {
            status = SdpStatus::Optimal;
            break;
        }
        // Farkas certificate: b·y < 0 with Σ y_i A_i ⪰ 0.
        if pinf > ftol && dobj < 0.0 && aty.min_eigenvalue() >= -ftol * dobj.abs() {
            status = SdpStatus::PrimalInfeasible;
            break;
        }
        // Improving ray: tr(C X) > 0 with A(X) negligible relative to it.
        if dinf > ftol && pobj > 0.0 && norm(&ax) <= ftol * pobj * (1.0 + a_max) {
            status = SdpStatus::DualInfeasible;
            break;
        }
        if iterations >= options.max_iterations {
            break;
        }
        if !(mu.is_finite() && pobj.is_finite() && dobj.is_finite()) {
            status = SdpStatus::NumericalFailure;
            break;
        }

        let Some(sc) = scaling(&x, &z) else {
            status = SdpStatus::NumericalFailure;
            break;
        };
        let schur = if m > 0 {
            match Schur::new(schur_complement(&p, &sc.w)) {
                Some(f) => Some(f),
                None => {
                    status = SdpStatus::NumericalFailure;
                    break;
                }
            }
        } else {
            None
        };

        let rc = corrector_rc(&sc, 0.0, None);
        let pred = direction(&p, &sc, &schur, &rc, &rd, &rp);
        let (ap, ad) = step_lengths(&sc, &pred, options.step_fraction);
        let mut xa = x.clone();
        xa.axpy(ap, &pred.dx);
        let mut za = z.clone();
        za.axpy(ad, &pred.dz);
        let mu_aff = xa.dot(&za) / n;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let rc = corrector_rc(&sc, sigma * mu, Some(&pred));
        let dir = direction(&p, &sc, &schur, &rc, &rd, &rp);
        let (ap, ad) = step_lengths(&sc, &dir, options.step_fraction);
        if ap == 0.0 && ad == 0.0 {
            status = SdpStatus::NumericalFailure;
            break;
        }

        x.axpy(ap, &dir.dx);
        x.symmetrize();
        z.axpy(ad, &dir.dz);
        z.symmetrize();
        for (yi, di) in y.iter_mut().zip(&dir.dy) {
            *yi += ad * di;
        }
        iterations += 1;
    }

    let mut y_full = vec![0.0; problem.constraints.len()];
    for (j, &i) in kept.iter().enumerate() {
        y_full[i] = y[j];
    }
    Ok(SdpSolution {
        status,
        primal_objective: pobj,
        dual_objective: dobj,
        x,
        y: y_full,
        z,
        iterations,
        primal_residual: pinf,
        dual_residual: dinf,
        relative_gap: gap,
    })
}

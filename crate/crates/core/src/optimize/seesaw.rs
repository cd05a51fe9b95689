use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::complex_sdp::ComplexSdp;
use super::sqs::{balanced_ranks, projective_from_unitary, subspace_basis};
use super::{reduce_restarts, restart_rng, OptimizationReport, RestartOutcome, SeesawConfig, SeesawMode};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::quantum::{bell_operator, born_correlation, DensityOperator, Ket, Measurement, QuantumStrategy, State};
use crate::{BellFunctional, Error, Result};

/// Optimal two-outcome PVM for `max tr(F Â)` over `±1` observables: outcome 0
/// projects onto the nonnegative eigenspace of `F`, outcome 1 onto the rest.
/// Zero eigenvalues go to outcome 0, so `F = 0` yields `Â = I`.
pub fn dichotomic_observable_update(f: &CMatrix) -> Measurement {
    let d = f.nrows();
    let (vals, vecs) = linalg::hermitian_eigen(f);
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut p0 = CMatrix::zeros(d, d);
    for (k, &l) in vals.iter().enumerate() {
        if l >= -1e-12 * scale {
            let v = vecs.column(k);
            p0 += &v * v.adjoint();
        }
    }
    let p1 = linalg::identity(d) - &p0;
    Measurement::new(vec![p0, p1]).expect("spectral projectors form a PVM")
}

/// Clips tiny negative eigenvalues and renormalizes so the effects sum to `I`.
fn clean_povm(effects: Vec<CMatrix>) -> Result<Measurement> {
    let d = effects[0].nrows();
    let clipped: Vec<CMatrix> = effects
        .iter()
        .map(|e| {
            let h = (e + e.adjoint()) * c(0.5, 0.0);
            let (vals, vecs) = linalg::hermitian_eigen(&h);
            let mut out = CMatrix::zeros(d, d);
            for (k, &l) in vals.iter().enumerate() {
                if l > 0.0 {
                    let v = vecs.column(k);
                    out += &v * v.adjoint() * c(l, 0.0);
                }
            }
            out
        })
        .collect();
    let total: CMatrix = clipped.iter().fold(CMatrix::zeros(d, d), |acc, e| acc + e);
    let (vals, vecs) = linalg::hermitian_eigen(&total);
    if vals[0] <= 1e-6 {
        return Err(Error::Numerical("POVM effects do not span the space".into()));
    }
    let inv_sqrt = &vecs
        * CMatrix::from_diagonal(&CVector::from_iterator(d, vals.iter().map(|l| c(1.0 / l.sqrt(), 0.0))))
        * vecs.adjoint();
    let fixed = clipped.iter().map(|e| &inv_sqrt * e * &inv_sqrt).collect::<Vec<_>>();
    Measurement::with_tolerance(fixed, 1e-9)
}

/// POVM maximizing `Σ_a tr(M_a F_a)`; closed form for two outcomes, an SDP
/// otherwise.
pub fn optimal_povm(fields: &[CMatrix]) -> Result<Measurement> {
    if fields.len() == 2 {
        return Ok(dichotomic_observable_update(&(&fields[0] - &fields[1])));
    }
    let d = fields[0].nrows();
    let mut sdp = ComplexSdp::new(vec![d; fields.len()]);
    for (a, f) in fields.iter().enumerate() {
        sdp.add_objective(a, f);
    }
    let blocks: Vec<usize> = (0..fields.len()).collect();
    sdp.add_sum_equals(&blocks, &linalg::identity(d));
    let (_, effects) = sdp.solve()?;
    clean_povm(effects)
}

/// `K[v][t] = tr_B[ρ (I ⊗ N_{t|v})]`, so that `P = tr(M K)` for Alice's `M`.
fn kernels_for_alice(rho: &CMatrix, dims: (usize, usize), bob: &[Measurement]) -> Vec<Vec<CMatrix>> {
    let ida = linalg::identity(dims.0);
    bob.iter()
        .map(|m| {
            m.effects()
                .iter()
                .map(|e| linalg::partial_trace_b(&(rho * ida.kronecker(e)), dims.0, dims.1))
                .collect()
        })
        .collect()
}

/// `K[u][s] = tr_A[ρ (M_{s|u} ⊗ I)]`.
fn kernels_for_bob(rho: &CMatrix, dims: (usize, usize), alice: &[Measurement]) -> Vec<Vec<CMatrix>> {
    let idb = linalg::identity(dims.1);
    alice
        .iter()
        .map(|m| {
            m.effects()
                .iter()
                .map(|e| linalg::partial_trace_a(&(rho * e.kronecker(&idb)), dims.0, dims.1))
                .collect()
        })
        .collect()
}

/// Fields `F[u][s] = Σ_{v,t} coef(u,s,v,t) K[v][t]` for the party being updated.
fn fields(
    kernels: &[Vec<CMatrix>],
    settings: usize,
    outcomes: usize,
    coef: impl Fn(usize, usize, usize, usize) -> f64,
) -> Vec<Vec<CMatrix>> {
    let d = kernels[0][0].nrows();
    (0..settings)
        .map(|u| {
            (0..outcomes)
                .map(|s| {
                    let mut acc = CMatrix::zeros(d, d);
                    for (v, row) in kernels.iter().enumerate() {
                        for (t, k) in row.iter().enumerate() {
                            let w = coef(u, s, v, t);
                            if w != 0.0 {
                                acc += k * c(w, 0.0);
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn update_free(fields: &[Vec<CMatrix>]) -> Result<Vec<Measurement>> {
    fields.iter().map(|f| optimal_povm(f)).collect()
}

/// Joint update of one party's measurements keeping the correlation
/// symmetric up to `eps` on every Collins–Gisin entry. `kernels[v][t]` pairs
/// with this party's effects as above, `own_marginal` is this party's reduced
/// state and `other_marginals[u][s]` the other party's marginal probabilities.
fn update_symmetric(
    fields: &[Vec<CMatrix>],
    kernels: &[Vec<CMatrix>],
    own_marginal: &CMatrix,
    other_marginals: &[Vec<f64>],
    eps: f64,
) -> Result<Vec<Measurement>> {
    let m = fields.len();
    let n = fields[0].len();
    let d = own_marginal.nrows();
    let blk = |u: usize, s: usize| u * n + s;
    let mut sdp = ComplexSdp::new(vec![d; m * n]);
    for u in 0..m {
        for s in 0..n {
            sdp.add_objective(blk(u, s), &fields[u][s]);
        }
        let blocks: Vec<usize> = (0..n).map(|s| blk(u, s)).collect();
        sdp.add_sum_equals(&blocks, &linalg::identity(d));
        for s in 0..n - 1 {
            sdp.add_band(&[(blk(u, s), own_marginal)], other_marginals[u][s], eps);
        }
    }
    // P(s,t|u,v) = P(t,s|v,u) on the Collins–Gisin entries
    for u in 0..m {
        for v in u..m {
            for s in 0..n - 1 {
                for t in 0..n - 1 {
                    if u == v && t <= s {
                        continue;
                    }
                    let neg = -&kernels[u][s];
                    sdp.add_band(&[(blk(u, s), &kernels[v][t]), (blk(v, t), &neg)], 0.0, eps);
                }
            }
        }
    }
    let (_, x) = sdp.solve()?;
    let mut out = Vec::with_capacity(m);
    for u in 0..m {
        out.push(clean_povm(x[u * n..(u + 1) * n].to_vec())?);
    }
    Ok(out)
}

/// State maximizing the Bell value subject to a correlation symmetric up to
/// `eps`.
fn update_state_symmetric(
    f: &BellFunctional,
    alice: &[Measurement],
    bob: &[Measurement],
    eps: f64,
) -> Result<DensityOperator> {
    let (da, db) = (alice[0].dim(), bob[0].dim());
    let n = f.scenario().outcomes;
    let m = alice.len();
    let dim = da * db;
    let mut sdp = ComplexSdp::new(vec![dim]);
    sdp.add_objective(0, &bell_operator(f, alice, bob)?);
    sdp.add_constraint(&[(0, &linalg::identity(dim))], 1.0);
    let (ia, ib) = (linalg::identity(da), linalg::identity(db));
    for x in 0..m {
        for a in 0..n - 1 {
            let diff = alice[x].effect(a).kronecker(&ib) - ia.kronecker(bob[x].effect(a));
            sdp.add_band(&[(0, &diff)], 0.0, eps);
        }
    }
    for x in 0..m {
        for y in x..m {
            for a in 0..n - 1 {
                for b in 0..n - 1 {
                    if x == y && b <= a {
                        continue;
                    }
                    let diff = alice[x].effect(a).kronecker(bob[y].effect(b))
                        - alice[y].effect(b).kronecker(bob[x].effect(a));
                    sdp.add_band(&[(0, &diff)], 0.0, eps);
                }
            }
        }
    }
    let (_, x) = sdp.solve()?;
    let h = (&x[0] + x[0].adjoint()) * c(0.5, 0.0);
    let (vals, vecs) = linalg::hermitian_eigen(&h);
    let mut rho = CMatrix::zeros(dim, dim);
    for (k, &l) in vals.iter().enumerate() {
        if l > 0.0 {
            let v = vecs.column(k);
            rho += &v * v.adjoint() * c(l, 0.0);
        }
    }
    let tr = rho.trace().re;
    DensityOperator::new((da, db), rho * c(1.0 / tr, 0.0))
}

/// Top eigenvector of `op` (optionally within a subspace with orthonormal
/// basis `basis`); degenerate top eigenspaces are resolved by a small random
/// perturbation.
fn top_state(
    op: &CMatrix,
    basis: Option<&CMatrix>,
    dims: (usize, usize),
    rng: &mut ChaCha8Rng,
) -> Result<Ket> {
    let restricted = match basis {
        Some(s) => s.adjoint() * op * s,
        None => op.clone(),
    };
    let k = restricted.nrows();
    let (vals, vecs) = linalg::hermitian_eigen(&restricted);
    let top = vals[k - 1];
    let mut v = vecs.column(k - 1).into_owned();
    if k > 1 && top - vals[k - 2] <= crate::quantum::DEGENERACY_TOL * top.abs().max(1.0) {
        let noise = linalg::random_density(k, k, rng) * c(1e-9 * top.abs().max(1.0), 0.0);
        let (_, pv) = linalg::hermitian_eigen(&(&restricted + noise));
        v = pv.column(k - 1).into_owned();
    }
    let full = match basis {
        Some(s) => s * v,
        None => v,
    };
    Ket::normalized(dims, full)
}

fn random_pvms(
    settings: usize,
    outcomes: usize,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Measurement>> {
    let ranks = balanced_ranks(d, outcomes);
    (0..settings)
        .map(|_| projective_from_unitary(&linalg::random_unitary(d, rng), &ranks))
        .collect()
}

/// Updated measurements and state, and whether every SDP step stalled.
type Sweep = (Vec<Measurement>, Vec<Measurement>, State, bool);

/// Keeps `current` when an SDP step fails numerically; the current iterate is
/// always feasible.
fn or_keep<T>(step: Result<T>, current: T, stalls: &mut usize) -> Result<T> {
    match step {
        Ok(v) => Ok(v),
        Err(Error::Numerical(_)) => {
            *stalls += 1;
            Ok(current)
        }
        Err(e) => Err(e),
    }
}

/// One full sweep: both measurement updates, then the state.
fn sweep_once(
    f: &BellFunctional,
    cfg: &SeesawConfig,
    state: &State,
    alice: &[Measurement],
    bob: &[Measurement],
    eps: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Sweep> {
    let s = f.scenario();
    let n = s.outcomes;
    let d = cfg.local_dim;
    let dims = (d, d);
    // field coefficients in the (own setting, own outcome, other setting, other outcome) order
    let coef_a = |x: usize, a: usize, y: usize, b: usize| f.coefficient(x, y, a, b);
    let coef_b = |y: usize, b: usize, x: usize, a: usize| f.coefficient(x, y, a, b);
    let (mut alice, mut bob) = (alice.to_vec(), bob.to_vec());
    let mut stalls = 0;
    let rho = state.density();
    match cfg.mode {
        SeesawMode::Unrestricted | SeesawMode::SharedPovm => {
            let ka = kernels_for_alice(&rho, dims, &bob);
            alice = update_free(&fields(&ka, s.settings_a, n, coef_a))?;
            if cfg.mode == SeesawMode::SharedPovm {
                bob = alice.clone();
            } else {
                let kb = kernels_for_bob(&rho, dims, &alice);
                bob = update_free(&fields(&kb, s.settings_b, n, coef_b))?;
            }
        }
        SeesawMode::SymmetricCorrelation => {
            let p = born_correlation(state, &alice, &bob);
            let rho_a = linalg::partial_trace_b(&rho, d, d);
            let rho_b = linalg::partial_trace_a(&rho, d, d);
            let marg = |party_b: bool| -> Vec<Vec<f64>> {
                (0..s.settings_a)
                    .map(|x| {
                        (0..n)
                            .map(|a| if party_b { p.marginal_b(a, x) } else { p.marginal_a(a, x) })
                            .collect()
                    })
                    .collect()
            };
            let ka = kernels_for_alice(&rho, dims, &bob);
            let next = update_symmetric(&fields(&ka, s.settings_a, n, coef_a), &ka, &rho_a, &marg(true), eps);
            alice = or_keep(next, alice, &mut stalls)?;
            let p = born_correlation(state, &alice, &bob);
            let alice_marg: Vec<Vec<f64>> = (0..s.settings_a)
                .map(|x| (0..n).map(|a| p.marginal_a(a, x)).collect())
                .collect();
            let kb = kernels_for_bob(&rho, dims, &alice);
            let next = update_symmetric(&fields(&kb, s.settings_b, n, coef_b), &kb, &rho_b, &alice_marg, eps);
            bob = or_keep(next, bob, &mut stalls)?;
        }
    }

    let op = bell_operator(f, &alice, &bob)?;
    let state: State = match cfg.mode {
        SeesawMode::Unrestricted => top_state(&op, None, dims, rng)?.into(),
        SeesawMode::SharedPovm => {
            let mut cands = Vec::new();
            for sym in [true, false] {
                let basis = subspace_basis(d, sym);
                let k = top_state(&op, Some(&basis), dims, rng)?;
                let v = linalg::trace_product(&k.density(), &op).re;
                cands.push((v, k));
            }
            let (_, k) = cands
                .into_iter()
                .fold(None::<(f64, Ket)>, |acc, c| match acc {
                    Some(a) if a.0 >= c.0 => Some(a),
                    _ => Some(c),
                })
                .expect("two candidates");
            k.into()
        }
        SeesawMode::SymmetricCorrelation => {
            let next = update_state_symmetric(f, &alice, &bob, eps).map(State::from);
            or_keep(next, state.clone(), &mut stalls)?
        }
    };
    Ok((alice, bob, state, stalls == 3))
}

/// Per-sweep factor on the asymmetry allowed in symmetric mode.
const ASYMMETRY_SHRINK: f64 = 0.5;
/// Band kept around exact symmetry so the SDPs stay strictly feasible.
const ASYMMETRY_FLOOR: f64 = 1e-9;
/// Sweeps without the asymmetry shrinking before a symmetric-mode run gives up.
const ASYMMETRY_PATIENCE: usize = 25;
/// Largest `|P − P^swap|` entry of an iterate counted as symmetric.
pub const SYMMETRIC_TOL: f64 = 1e-8;

/// One see-saw run: final value, strategy, convergence flag and the value
/// after every full sweep.
#[derive(Debug, Clone)]
pub struct SeesawRun {
    pub value: f64,
    pub strategy: QuantumStrategy,
    pub converged: bool,
    pub history: Vec<f64>,
}

pub fn seesaw_run(f: &BellFunctional, cfg: &SeesawConfig, restart: usize) -> Result<SeesawRun> {
    cfg.validate()?;
    let s = f.scenario();
    if cfg.mode != SeesawMode::Unrestricted {
        s.expect_balanced()?;
    }
    let d = cfg.local_dim;
    let dims = (d, d);
    let n = s.outcomes;
    let mut rng = restart_rng(cfg.seed, restart);
    let mut history = Vec::new();
    let mut converged = false;

    let shared = cfg.mode == SeesawMode::SharedPovm;
    let symcorr = cfg.mode == SeesawMode::SymmetricCorrelation;
    let mut alice = random_pvms(s.settings_a, n, d, &mut rng)?;
    let mut bob = if shared {
        alice.clone()
    } else {
        random_pvms(s.settings_b, n, d, &mut rng)?
    };
    let mut state: State = match cfg.mode {
        SeesawMode::Unrestricted | SeesawMode::SymmetricCorrelation => {
            Ket::normalized(dims, linalg::random_ket(d * d, &mut rng))?.into()
        }
        SeesawMode::SharedPovm => {
            let basis = subspace_basis(d, true);
            let coeffs = linalg::random_ket(basis.ncols(), &mut rng);
            Ket::normalized(dims, basis * coeffs)?.into()
        }
    };
    let mut best: Option<(f64, QuantumStrategy)> = None;
    let mut prev = f64::NEG_INFINITY;
    // symmetric mode starts anywhere and tightens the allowed asymmetry
    let mut asym = if symcorr { born_correlation(&state, &alice, &bob).asymmetry()? } else { 0.0 };
    let mut stuck = 0;

    for _ in 0..cfg.max_iters {
        let eps = if symcorr { (ASYMMETRY_SHRINK * asym).max(ASYMMETRY_FLOOR) } else { 0.0 };
        let stalled;
        (alice, bob, state, stalled) = sweep_once(f, cfg, &state, &alice, &bob, eps, &mut rng)?;
        let strategy = QuantumStrategy::new(state.clone(), alice.clone(), bob.clone())?;
        let value = strategy.value(f)?;
        history.push(value);
        if symcorr {
            let now = strategy.correlation().asymmetry()?;
            stuck = if now < asym { 0 } else { stuck + 1 };
            asym = now;
            if asym > SYMMETRIC_TOL {
                if stuck >= ASYMMETRY_PATIENCE {
                    break;
                }
                prev = value;
                continue;
            }
        }
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, strategy));
        }
        if (value - prev).abs() < cfg.convergence_tol {
            converged = !stalled;
            break;
        }
        prev = value;
    }
    let (value, strategy) = best.ok_or_else(|| {
        if symcorr {
            Error::Numerical("see-saw never reached a symmetric correlation".into())
        } else {
            Error::InvalidParameter("max_iters is zero".into())
        }
    })?;
    Ok(SeesawRun {
        value,
        strategy,
        converged,
        history,
    })
}

/// Fresh starts tried after a restart fails numerically.
const MAX_RETRIES: usize = 3;

/// Best see-saw value over `cfg.restarts` independent random starts.
pub fn seesaw(f: &BellFunctional, cfg: &SeesawConfig) -> Result<OptimizationReport> {
    cfg.validate()?;
    let results: Vec<Result<RestartOutcome>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            // a failed start is retried from streams no other restart uses
            let mut out = seesaw_run(f, cfg, r);
            for attempt in 1..=MAX_RETRIES {
                if out.is_ok() {
                    break;
                }
                out = seesaw_run(f, cfg, r + attempt * cfg.restarts);
            }
            out.map(|run| (run.value, run.strategy, run.converged))
        })
        .collect();
    reduce_restarts(f, results, cfg.mode.to_string(), cfg.local_dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_sigma_z() {
        let m = dichotomic_observable_update(&linalg::sigma_z());
        assert!(linalg::max_abs(&(m.observable() - linalg::sigma_z())) < 1e-12);
    }

    #[test]
    fn zero_field_gives_identity_observable() {
        let m = dichotomic_observable_update(&CMatrix::zeros(2, 2));
        assert!(linalg::max_abs(&(m.observable() - linalg::identity(2))) < 1e-12);
    }

    #[test]
    fn three_outcome_povm_matches_spectral_bound() {
        // diagonal fields: the optimum picks the largest entry per basis state
        let diag = |v: [f64; 3]| CMatrix::from_diagonal(&CVector::from_iterator(3, v.iter().map(|&x| c(x, 0.0))));
        let fs = vec![diag([1.0, 0.0, 0.0]), diag([0.0, 2.0, 0.0]), diag([0.5, 0.5, 3.0])];
        let m = optimal_povm(&fs).unwrap();
        let v: f64 = fs.iter().enumerate().map(|(a, f)| linalg::trace_product(m.effect(a), f).re).sum();
        assert!((v - 6.0).abs() < 1e-6, "{v}");
    }
}

//! Symmetrization of strategies and mirror-symmetry checks.
//!
//! Enlarged local spaces are ordered as (system ⊗ ancilla): local index
//! `i * k + anc` for system index `i` and ancilla index `anc` of dimension `k`.

use nalgebra::{Matrix3, Vector3};

use crate::correlation::SYMMETRY_TOL;
use crate::linalg::{self, c, CMatrix, CVector};
use crate::quantum::{DensityOperator, Ket, Measurement, QuantumStrategy, QubitObservable, State};
use crate::{Error, Result};

/// Tolerance for operator identities in the sufficient-condition checks.
pub const CONDITION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// `ρ_AB = ρ_BA` with both parties using the same measurements.
    Identity,
    /// `ρ* = ρ_BA` with Bob's effects the complex conjugates of Alice's.
    Conjugation,
}

fn same_measurements(a: &[Measurement], b: &[Measurement], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(p, q)| p.distance(q) <= tol)
}

/// Checks the sufficient conditions under which a strategy yields a
/// party-symmetric correlation.
pub fn check_sufficient_conditions(s: &QuantumStrategy, kind: MapKind) -> bool {
    let (da, db) = s.dims();
    if da != db {
        return false;
    }
    let rho = s.state.density();
    let rho_ba = linalg::swap_density(&rho, da, db);
    match kind {
        MapKind::Identity => {
            linalg::max_abs(&(&rho - &rho_ba)) <= CONDITION_TOL
                && same_measurements(&s.alice, &s.bob, CONDITION_TOL)
        }
        MapKind::Conjugation => {
            let conj: Vec<Measurement> = s.alice.iter().map(Measurement::conj).collect();
            linalg::max_abs(&(rho.map(|z| z.conj()) - &rho_ba)) <= CONDITION_TOL
                && same_measurements(&conj, &s.bob, CONDITION_TOL)
        }
    }
}

/// Shared measurements and a swap-invariant state.
pub fn is_sqs(s: &QuantumStrategy) -> bool {
    check_sufficient_conditions(s, MapKind::Identity)
}

fn require_symmetric_correlation(s: &QuantumStrategy) -> Result<()> {
    let asym = s.correlation().asymmetry()?;
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(format!(
            "correlation differs from its swap by {asym:e}"
        )));
    }
    Ok(())
}

fn require_equal_dims(s: &QuantumStrategy) -> Result<usize> {
    let (da, db) = s.dims();
    if da != db {
        return Err(Error::InvalidParameter(format!(
            "symmetrization needs equal local dimensions, got {da} and {db}"
        )));
    }
    Ok(da)
}

/// Shared effects `M^A ⊗ |0⟩⟨0| + M^B ⊗ |1⟩⟨1|`.
fn shared_ancilla_measurements(s: &QuantumStrategy) -> Result<Vec<Measurement>> {
    let p0 = linalg::projector(&linalg::basis_vector(2, 0));
    let p1 = linalg::projector(&linalg::basis_vector(2, 1));
    s.alice
        .iter()
        .zip(&s.bob)
        .map(|(ma, mb)| {
            let effects = ma
                .effects()
                .iter()
                .zip(mb.effects())
                .map(|(ea, eb)| ea.kronecker(&p0) + eb.kronecker(&p1))
                .collect();
            Measurement::new(effects)
        })
        .collect()
}

/// Index of `(i, anc_a, j, anc_b)` on `(C^d ⊗ C^2) ⊗ (C^d ⊗ C^2)`.
fn doubled_index(d: usize, i: usize, anc_a: usize, j: usize, anc_b: usize) -> usize {
    (i * 2 + anc_a) * (2 * d) + (j * 2 + anc_b)
}

/// Symmetric strategy on doubled local dimension reproducing a symmetric
/// correlation: state `½[ρ_AB ⊗ |01⟩⟨01| + ρ_BA ⊗ |10⟩⟨10|]`.
pub fn symmetrize_mixed(s: &QuantumStrategy) -> Result<QuantumStrategy> {
    require_symmetric_correlation(s)?;
    let d = require_equal_dims(s)?;
    let rho = s.state.density();
    let rho_ba = linalg::swap_density(&rho, d, d);
    let n = 4 * d * d;
    let mut out = CMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let row = i * d + j;
                    let col = k * d + l;
                    out[(doubled_index(d, i, 0, j, 1), doubled_index(d, k, 0, l, 1))] =
                        rho[(row, col)] * c(0.5, 0.0);
                    out[(doubled_index(d, i, 1, j, 0), doubled_index(d, k, 1, l, 0))] =
                        rho_ba[(row, col)] * c(0.5, 0.0);
                }
            }
        }
    }
    let state = DensityOperator::new((2 * d, 2 * d), out)?;
    let shared = shared_ancilla_measurements(s)?;
    QuantumStrategy::new(state.into(), shared.clone(), shared)
}

/// Pure symmetric strategy `(|ψ⟩_AB|01⟩ + |ψ⟩_BA|10⟩)/√2` with projective
/// shared measurements.
pub fn symmetrize_pure(s: &QuantumStrategy) -> Result<QuantumStrategy> {
    let Some(ket) = s.state.as_ket() else {
        return Err(Error::InvalidState("pure symmetrization needs a ket".into()));
    };
    if !s.all_projective() {
        return Err(Error::InvalidMeasurement(
            "pure symmetrization needs projective measurements".into(),
        ));
    }
    require_symmetric_correlation(s)?;
    let d = require_equal_dims(s)?;
    let swapped = ket.swapped();
    let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut v = CVector::zeros(4 * d * d);
    for i in 0..d {
        for j in 0..d {
            v[doubled_index(d, i, 0, j, 1)] = ket.vector[i * d + j] * h;
            v[doubled_index(d, i, 1, j, 0)] = swapped.vector[i * d + j] * h;
        }
    }
    let state = Ket::new((2 * d, 2 * d), v)?;
    let shared = shared_ancilla_measurements(s)?;
    QuantumStrategy::new(state.into(), shared.clone(), shared)
}

/// A projective measurement on an enlarged space with an isometry `V`
/// such that `V† Π_a V = M_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct NaimarkDilation {
    pub measurement: Measurement,
    /// `(D·k) × D` isometry; `k = 1` for projective input.
    pub isometry: CMatrix,
}

/// `V = Σ_a √M_a ⊗ |a⟩` and `Π_a = I ⊗ |a⟩⟨a|`; projective input is
/// returned unchanged with `V = I`.
pub fn naimark_dilate(m: &Measurement) -> Result<NaimarkDilation> {
    let d = m.dim();
    if m.is_projective() {
        return Ok(NaimarkDilation {
            measurement: m.clone(),
            isometry: linalg::identity(d),
        });
    }
    let n = m.outcomes();
    let mut v = CMatrix::zeros(d * n, d);
    for (a, e) in m.effects().iter().enumerate() {
        let (vals, vecs) = linalg::hermitian_eigen(e);
        let sqrt_diag = CVector::from_iterator(d, vals.iter().map(|&l| c(l.max(0.0).sqrt(), 0.0)));
        let root = &vecs * CMatrix::from_diagonal(&sqrt_diag) * vecs.adjoint();
        for i in 0..d {
            for j in 0..d {
                v[(i * n + a, j)] = root[(i, j)];
            }
        }
    }
    let projectors = (0..n)
        .map(|a| linalg::identity(d).kronecker(&linalg::projector(&linalg::basis_vector(n, a))))
        .collect();
    Ok(NaimarkDilation {
        measurement: Measurement::new(projectors)?,
        isometry: v,
    })
}

/// A purification of `ρ` with the ancilla held by Alice: the returned ket
/// lives on `(C^da ⊗ C^k) ⊗ C^db` with `k = da·db`, and ancilla index `k`
/// labels the eigenvalues of `ρ` in decreasing order.
pub fn purify(rho: &DensityOperator) -> Result<Ket> {
    let (da, db) = rho.dims;
    let n = da * db;
    let (vals, vecs) = linalg::hermitian_eigen(&rho.matrix);
    let mut v = CVector::zeros(da * n * db);
    for (k, idx) in (0..n).rev().enumerate() {
        let w = vals[idx].max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        for i in 0..da {
            for j in 0..db {
                v[(i * n + k) * db + j] += vecs[(i * db + j, idx)] * c(w, 0.0);
            }
        }
    }
    Ket::normalized((da * n, db), v)
}

/// Traces the ancilla out of a ket produced by [`purify`].
pub fn reduce_purification(psi: &Ket, da: usize) -> CMatrix {
    let (dak, db) = psi.dims;
    let k = dak / da;
    CMatrix::from_fn(da * db, da * db, |r, col| {
        let (i, j) = (r / db, r % db);
        let (i2, j2) = (col / db, col % db);
        (0..k)
            .map(|anc| psi.vector[(i * k + anc) * db + j] * psi.vector[(i2 * k + anc) * db + j2].conj())
            .sum()
    })
}

/// Reflection of Bloch vectors through the x–z plane.
pub fn mirror_vector(a: &[f64; 3]) -> [f64; 3] {
    [a[0], -a[1], a[2]]
}

/// Bob's observables `b_k = diag(1, −1, 1) a_k`; their effects are the
/// complex conjugates of Alice's.
pub fn mirror_measurements(alice: &[QubitObservable]) -> Vec<QubitObservable> {
    alice
        .iter()
        .map(|o| match o {
            QubitObservable::Bloch(v) => QubitObservable::Bloch(mirror_vector(v)),
            d @ QubitObservable::Degenerate { .. } => *d,
        })
        .collect()
}

/// Qubit strategy with Bob's measurements mirrored from Alice's.
pub fn mirror_strategy(state: State, alice: &[QubitObservable]) -> Result<QuantumStrategy> {
    let a = alice
        .iter()
        .map(QubitObservable::measurement)
        .collect::<Result<Vec<_>>>()?;
    let b = mirror_measurements(alice)
        .iter()
        .map(QubitObservable::measurement)
        .collect::<Result<Vec<_>>>()?;
    QuantumStrategy::new(state, a, b)
}

/// `cos α |ψ_sym⟩ + i sin α |Ψ−⟩` for a real, swap-symmetric two-qubit ket.
pub fn mirror_state(alpha: f64, psi_sym: &Ket) -> Result<Ket> {
    if psi_sym.dims != (2, 2) {
        return Err(Error::InvalidState("expected a two-qubit ket".into()));
    }
    if psi_sym.vector.iter().any(|z| z.im.abs() > CONDITION_TOL) {
        return Err(Error::InvalidState("symmetric part must be real".into()));
    }
    if (&psi_sym.swapped().vector - &psi_sym.vector).norm() > CONDITION_TOL {
        return Err(Error::InvalidState("symmetric part must be swap-invariant".into()));
    }
    let v = &psi_sym.vector * c(alpha.cos(), 0.0)
        + crate::quantum::psi_minus().vector * c(0.0, alpha.sin());
    Ket::normalized((2, 2), v)
}

/// Tests `S|ψ⟩ = e^{iθ}|ψ*⟩` and returns `θ` (meaningful only when true).
pub fn check_mirror_state_form(psi: &Ket) -> (bool, f64) {
    let (da, db) = psi.dims;
    if da != db {
        return (false, 0.0);
    }
    let swapped = psi.swapped().vector;
    // ⟨ψ*|S|ψ⟩ = ψᵀ S ψ equals e^{iθ} when the relation holds
    let overlap: crate::linalg::C64 = psi
        .vector
        .iter()
        .zip(swapped.iter())
        .map(|(p, q)| p * q)
        .sum();
    let theta = overlap.arg();
    let target = psi.vector.map(|z| z.conj()) * c(theta.cos(), theta.sin());
    ((swapped - target).norm() <= CONDITION_TOL, theta)
}

/// Finds `R ∈ SO(3)` with `R a_k = b_k` for all `k`, if one exists.
///
/// Solves the orthogonal Procrustes problem and forces `det R = +1`; the
/// result is accepted only if it maps every `a_k` to `b_k` within `1e-9`.
pub fn find_aligning_rotation(a: &[[f64; 3]], b: &[[f64; 3]]) -> Result<Option<Matrix3<f64>>> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::InvalidParameter(format!(
            "need matching non-empty direction lists, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut h = Matrix3::zeros();
    for (ak, bk) in a.iter().zip(b) {
        h += Vector3::from(*bk) * Vector3::from(*ak).transpose();
    }
    let svd = h.svd(true, true);
    let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v requested"));
    let sign = (u * vt).determinant().signum();
    let fix = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, if sign == 0.0 { 1.0 } else { sign }));
    let r = u * fix * vt;
    let fits = a
        .iter()
        .zip(b)
        .all(|(ak, bk)| (r * Vector3::from(*ak) - Vector3::from(*bk)).norm() <= 1e-9);
    Ok(fits.then_some(r))
}

/// `¼(I⊗I + r·σ⊗I + I⊗s·σ + Σ T_ij σ_i⊗σ_j)` with `s = (r_x, −r_y, r_z)`.
///
/// `T` must satisfy `T_yx = −T_xy`, `T_zy = −T_yz`, `T_zx = T_xz`, which
/// makes `ρ* = S ρ S†`.
pub fn mirror_compatible_two_qubit_state(r: [f64; 3], t: Matrix3<f64>) -> Result<DensityOperator> {
    let tol = CONDITION_TOL;
    let ok = (t[(1, 0)] + t[(0, 1)]).abs() <= tol
        && (t[(2, 1)] + t[(1, 2)]).abs() <= tol
        && (t[(2, 0)] - t[(0, 2)]).abs() <= tol;
    if !ok {
        return Err(Error::InvalidParameter(
            "correlation matrix violates the mirror constraints".into(),
        ));
    }
    let s = mirror_vector(&r);
    let paulis = [linalg::sigma_x(), linalg::sigma_y(), linalg::sigma_z()];
    let id = linalg::identity(2);
    let mut rho = id.kronecker(&id);
    for i in 0..3 {
        rho += paulis[i].kronecker(&id) * c(r[i], 0.0);
        rho += id.kronecker(&paulis[i]) * c(s[i], 0.0);
        for j in 0..3 {
            rho += paulis[i].kronecker(&paulis[j]) * c(t[(i, j)], 0.0);
        }
    }
    rho *= c(0.25, 0.0);
    let lmin = linalg::min_eigenvalue(&rho);
    if lmin < -tol {
        return Err(Error::InvalidState(format!(
            "parameters give a non-positive operator (eigenvalue {lmin:e})"
        )));
    }
    DensityOperator::new((2, 2), rho)
}

/// Summary of the symmetry properties of a strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub correlation_asymmetry: f64,
    pub correlation_symmetric: bool,
    pub sqs: bool,
    pub mirror_kind: bool,
    /// For qubit projective strategies: whether a single rotation maps
    /// Alice's Bloch vectors onto Bob's.
    pub aligning_rotation: Option<bool>,
}

pub fn symmetry_report(s: &QuantumStrategy) -> Result<SymmetryReport> {
    let asym = s.correlation().asymmetry()?;
    let aligning_rotation = if s.dims() == (2, 2) && s.scenario().outcomes == 2 {
        let a: Option<Vec<_>> = s.alice.iter().map(QubitObservable::from_measurement).collect();
        let b: Option<Vec<_>> = s.bob.iter().map(QubitObservable::from_measurement).collect();
        match (a, b) {
            (Some(a), Some(b)) => {
                let pairs: Vec<([f64; 3], [f64; 3])> = a
                    .iter()
                    .zip(&b)
                    .filter_map(|(p, q)| Some((p.bloch()?, q.bloch()?)))
                    .collect();
                if pairs.is_empty() {
                    None
                } else {
                    let (va, vb): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
                    Some(find_aligning_rotation(&va, &vb)?.is_some())
                }
            }
            _ => None,
        }
    } else {
        None
    };
    Ok(SymmetryReport {
        correlation_asymmetry: asym,
        correlation_symmetric: asym <= SYMMETRY_TOL,
        sqs: is_sqs(s),
        mirror_kind: check_sufficient_conditions(s, MapKind::Conjugation),
        aligning_rotation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{phi_minus, phi_plus, strategy_chsh_max, strategy_chsh_sym, strategy_j42};

    #[test]
    fn sufficient_conditions_on_known_strategies() {
        assert!(check_sufficient_conditions(&strategy_chsh_sym(), MapKind::Identity));
        let j = strategy_j42();
        assert!(check_sufficient_conditions(&j, MapKind::Conjugation));
        assert!(!check_sufficient_conditions(&j, MapKind::Identity));
        let m = strategy_chsh_max();
        assert!(!check_sufficient_conditions(&m, MapKind::Identity));
        assert!(!check_sufficient_conditions(&m, MapKind::Conjugation));
    }

    #[test]
    fn mirror_state_examples() {
        let k = mirror_state(0.0, &phi_plus()).unwrap();
        assert!((k.vector - phi_plus().vector).norm() < 1e-15);
        let k = mirror_state(std::f64::consts::FRAC_PI_2, &phi_plus()).unwrap();
        let expected = crate::quantum::psi_minus().vector * c(0.0, 1.0);
        assert!((k.vector - expected).norm() < 1e-15);
        let (ok, _) = check_mirror_state_form(&mirror_state(0.3, &phi_minus()).unwrap());
        assert!(ok);
        let ket01 = Ket::from_real((2, 2), &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(!check_mirror_state_form(&ket01).0);
    }

    #[test]
    fn j42_state_is_in_mirror_family() {
        let s = strategy_j42();
        let ket = s.state.as_ket().unwrap();
        let (ok, theta) = check_mirror_state_form(ket);
        assert!(ok);
        assert!(theta.abs() < 1e-12);
        // real symmetric, so it is the α = 0 member with ψ_sym = itself
        let back = mirror_state(0.0, ket).unwrap();
        assert!((back.vector - &ket.vector).norm() < 1e-15);
    }

    #[test]
    fn rotation_examples() {
        let e = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let r = find_aligning_rotation(&e, &e).unwrap().unwrap();
        assert!((r - Matrix3::identity()).norm() < 1e-12);
        let mirrored: Vec<_> = e.iter().map(mirror_vector).collect();
        assert!(find_aligning_rotation(&e, &mirrored).unwrap().is_none());
        let xz = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        let xz_m: Vec<_> = xz.iter().map(mirror_vector).collect();
        assert!(find_aligning_rotation(&xz, &xz_m).unwrap().is_some());
        assert!(find_aligning_rotation(&[], &[]).is_err());
    }

    #[test]
    fn bell_state_from_correlation_matrix() {
        let t = Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0));
        let rho = mirror_compatible_two_qubit_state([0.0; 3], t).unwrap();
        assert!(linalg::max_abs(&(rho.matrix.clone() - phi_plus().density())) < 1e-15);
        let mixed = mirror_compatible_two_qubit_state([0.0; 3], Matrix3::zeros()).unwrap();
        assert!(linalg::max_abs(&(mixed.matrix - linalg::identity(4) * c(0.25, 0.0))) < 1e-15);
        let bad = Matrix3::from_diagonal(&Vector3::new(2.0, 2.0, 2.0));
        assert!(mirror_compatible_two_qubit_state([0.0; 3], bad).is_err());
    }

    #[test]
    fn naimark_of_projective_is_identity() {
        let m = Measurement::from_observable(&linalg::sigma_x()).unwrap();
        let d = naimark_dilate(&m).unwrap();
        assert_eq!(d.isometry, linalg::identity(2));
        assert_eq!(d.measurement, m);
    }

    #[test]
    fn purify_maximally_mixed_qubit() {
        let rho = DensityOperator::new((2, 1), linalg::identity(2) * c(0.5, 0.0)).unwrap();
        let psi = purify(&rho).unwrap();
        assert!(linalg::max_abs(&(reduce_purification(&psi, 2) - &rho.matrix)) < 1e-14);
    }
}

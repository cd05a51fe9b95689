//! Explicit strategies attaining known Bell values.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::{phi_plus, psi_plus, Ket, Measurement, QuantumStrategy, QubitObservable, State};
use crate::linalg::{self, c, sigma_x, sigma_y, sigma_z, CMatrix, CVector};
use crate::{Error, Result};

fn observables(list: &[CMatrix]) -> Result<Vec<Measurement>> {
    list.iter().map(Measurement::from_observable).collect()
}

/// `W_ij = 1 / (d sin[(i − j − ½)π/d])`.
pub fn cglmp_w(d: usize) -> CMatrix {
    let df = d as f64;
    CMatrix::from_fn(d, d, |i, j| {
        let arg = (i as f64 - j as f64 - 0.5) * PI / df;
        c(1.0 / (df * arg.sin()), 0.0)
    })
}

/// `U = T W` with `T = diag(−1, 1, …, 1)`.
pub fn cglmp_unitary(d: usize) -> Result<CMatrix> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("need d ≥ 2, got {d}")));
    }
    let mut u = cglmp_w(d);
    for j in 0..d {
        u[(0, j)] = -u[(0, j)];
    }
    Ok(u)
}

/// Setting 0 measures the computational basis; setting 1 the columns of
/// [`cglmp_unitary`]. Both parties use the same pair.
pub fn cglmp_optimal_measurements(d: usize) -> Result<Vec<Measurement>> {
    let u = cglmp_unitary(d)?;
    Ok(vec![
        Measurement::from_basis(&linalg::identity(d))?,
        Measurement::from_basis(&u)?,
    ])
}

/// `|Φ+⟩` with `A_0 = σ_z`, `A_1 = σ_x`, `B_k = [σ_z + (−1)^k σ_x]/√2`.
pub fn strategy_chsh_max() -> QuantumStrategy {
    let h = c(FRAC_1_SQRT_2, 0.0);
    let alice = observables(&[sigma_z(), sigma_x()]).expect("valid observables");
    let bob = observables(&[(sigma_z() + sigma_x()) * h, (sigma_z() - sigma_x()) * h])
        .expect("valid observables");
    QuantumStrategy::new(phi_plus().into(), alice, bob).expect("consistent strategy")
}

/// `−i[cos(π/8)|Φ−⟩ + sin(π/8)|Ψ+⟩]` with `σ_z`, `σ_x` for both parties.
pub fn strategy_chsh_sym() -> QuantumStrategy {
    let (cs, sn) = ((PI / 8.0).cos(), (PI / 8.0).sin());
    let v = (super::phi_minus().vector * c(cs, 0.0) + psi_plus().vector * c(sn, 0.0)) * c(0.0, -1.0);
    let ket = Ket::new((2, 2), v).expect("unit vector");
    let shared = observables(&[sigma_z(), sigma_x()]).expect("valid observables");
    QuantumStrategy::new(ket.into(), shared.clone(), shared).expect("consistent strategy")
}

/// Shared-measurement qubit strategy reaching 5 on the correlation part of
/// I3322 for every `alpha`.
pub fn strategy_i3322c(alpha: f64) -> QuantumStrategy {
    let v = phi_plus().vector * c(0.0, (alpha / 2.0).sin()) - psi_plus().vector * c((alpha / 2.0).cos(), 0.0);
    let ket = Ket::new((2, 2), v).expect("unit vector");
    let k = 2.0 * (PI / 6.0).cos();
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let a0 = (sigma_x() * c(k, 0.) + sigma_y() * c(ca, 0.) + sigma_z() * c(sa, 0.)) * c(0.5, 0.);
    let a1 = (sigma_x() * c(k, 0.) - sigma_y() * c(ca, 0.) - sigma_z() * c(sa, 0.)) * c(0.5, 0.);
    let shared = observables(&[a0, a1, sigma_y()]).expect("valid observables");
    QuantumStrategy::new(ket.into(), shared.clone(), shared).expect("consistent strategy")
}

/// Parameters `(p, s, t)` of the qubit strategy for `I_S(α)`.
pub fn is_parameters(alpha: f64) -> Result<(f64, f64, f64)> {
    if alpha == 1.5 {
        Ok((16.0 / 21.0, 8.0 / 17.0, -(5f64.sqrt()) / 3.0))
    } else if alpha == 2.0 {
        let r = 13f64.sqrt();
        Ok((
            2.0 * (1.0 + r) / (3.0 * r),
            (10.0 * r - 18.0) / 61.0,
            -((11.0 - r) / 18.0).sqrt(),
        ))
    } else {
        Err(Error::InvalidParameter(format!(
            "closed-form I_S strategy known only for alpha 1.5 and 2, got {alpha}"
        )))
    }
}

/// `√p|00⟩ + √(1−p)|11⟩`; `A = (sσ_x + √(1−s²)σ_z, σ_x, σ_z)`,
/// `B = (tσ_x + √(1−t²)σ_z, tσ_x − √(1−t²)σ_z, I)`.
pub fn strategy_is_params(p: f64, s: f64, t: f64) -> Result<QuantumStrategy> {
    let ket = Ket::from_real((2, 2), &[p.sqrt(), 0.0, 0.0, (1.0 - p).sqrt()])?;
    let sc = (1.0 - s * s).sqrt();
    let tc = (1.0 - t * t).sqrt();
    let alice = observables(&[
        sigma_x() * c(s, 0.) + sigma_z() * c(sc, 0.),
        sigma_x(),
        sigma_z(),
    ])?;
    let mut bob = observables(&[
        sigma_x() * c(t, 0.) + sigma_z() * c(tc, 0.),
        sigma_x() * c(t, 0.) - sigma_z() * c(tc, 0.),
    ])?;
    bob.push(QubitObservable::Degenerate { outcome: 0 }.measurement()?);
    QuantumStrategy::new(ket.into(), alice, bob)
}

pub fn strategy_is(alpha: f64) -> Result<QuantumStrategy> {
    let (p, s, t) = is_parameters(alpha)?;
    strategy_is_params(p, s, t)
}

/// Polar and azimuthal angles (degrees) of Alice's Bloch vectors in the J42
/// strategy; the azimuth of setting 1 is arbitrary and fixed to 0.
pub const J42_THETA_DEG: [f64; 4] = [61.9767, 0.0, 54.3423, 52.2700];
pub const J42_PHI_DEG: [f64; 4] = [166.1570, 0.0, 41.5892, -71.170];
/// State angle `a` (degrees) in `−sin a|00⟩ + cos a|11⟩`.
pub const J42_STATE_DEG: f64 = 42.5092;

pub fn j42_alice_observables() -> Vec<QubitObservable> {
    J42_THETA_DEG
        .iter()
        .zip(J42_PHI_DEG)
        .map(|(t, p)| QubitObservable::from_angles(t.to_radians(), p.to_radians()))
        .collect()
}

/// Asymmetric qubit strategy whose Bloch vectors for Bob are the mirror
/// images of Alice's in the x–z plane.
pub fn strategy_j42() -> QuantumStrategy {
    let a = J42_STATE_DEG.to_radians();
    let ket = Ket::from_real((2, 2), &[-a.sin(), 0.0, 0.0, a.cos()]).expect("unit vector");
    let obs = j42_alice_observables();
    let alice: Vec<Measurement> = obs
        .iter()
        .map(|o| o.measurement().expect("unit Bloch vector"))
        .collect();
    let bob = alice.iter().map(Measurement::conj).collect();
    QuantumStrategy::new(ket.into(), alice, bob).expect("consistent strategy")
}

/// Observables of the maximal I_9 strategy, settings 0..8.
fn i9_max_observables() -> (Vec<CMatrix>, Vec<CMatrix>) {
    let h = c(FRAC_1_SQRT_2, 0.0);
    let (sx, sy, sz) = (sigma_x(), sigma_y(), sigma_z());
    let first = [sz.clone(), sx.clone(), -sy.clone()];
    let rest = [
        (&sz + &sx) * h,
        (&sz - &sx) * h,
        (&sz + &sy) * h,
        (&sz - &sy) * h,
        (&sx + &sy) * h,
        (&sx - &sy) * h,
    ];
    let conj = |m: &CMatrix| m.map(|z| z.conj());
    let mut alice: Vec<CMatrix> = first.to_vec();
    let mut bob: Vec<CMatrix> = first.iter().map(conj).collect();
    alice.extend(rest.iter().map(conj));
    bob.extend(rest.iter().cloned());
    (alice, bob)
}

pub fn strategy_i9_max() -> QuantumStrategy {
    let (a, b) = i9_max_observables();
    QuantumStrategy::new(
        phi_plus().into(),
        observables(&a).expect("valid observables"),
        observables(&b).expect("valid observables"),
    )
    .expect("consistent strategy")
}

/// Best known symmetric qubit strategy for I_9 (shared real observables).
pub fn strategy_i9_sym() -> QuantumStrategy {
    let r3 = 3f64.sqrt();
    let (sx, sz) = (sigma_x(), sigma_z());
    let comb = |u: f64, v: f64| &sx * c(u, 0.) + &sz * c(v, 0.);
    let list = [
        sz.clone(),
        comb(r3 / 2.0, 0.5),
        comb(r3 / 2.0, -0.5),
        comb(0.5, r3 / 2.0),
        comb(-r3 / 2.0, 0.5),
        comb(r3 / 2.0, 0.5),
        comb(-0.5, r3 / 2.0),
        sx.clone(),
        sz.clone(),
    ];
    let shared = observables(&list).expect("valid observables");
    QuantumStrategy::new(phi_plus().into(), shared.clone(), shared).expect("consistent strategy")
}

/// Maximally entangled state `Σ_i |ii⟩/√d`.
pub fn maximally_entangled(d: usize) -> Ket {
    let mut v = CVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = c(1.0 / (d as f64).sqrt(), 0.0);
    }
    Ket::new((d, d), v).expect("unit vector")
}

/// Shared-measurement strategy from a state and one list of measurements.
pub fn shared_strategy(state: State, measurements: Vec<Measurement>) -> Result<QuantumStrategy> {
    QuantumStrategy::new(state, measurements.clone(), measurements)
}

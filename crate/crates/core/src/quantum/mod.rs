//! Quantum states, measurements, strategies and Born-rule evaluation.

mod measurement;
mod state;
mod strategies;
mod strategy;

pub use measurement::{Measurement, QubitObservable};
pub use state::{
    phi_minus, phi_plus, psi_minus, psi_plus, DensityOperator, Ket, State, OPERATOR_TOL,
};
pub use strategies::*;
pub use strategy::{
    bell_operator, best_state_for_measurements, born_correlation, top_eigenvector, BestState,
    QuantumStrategy, DEGENERACY_TOL,
};

use crate::linalg::{self, CMatrix};
use crate::{BellFunctional, Correlation, Error, Result};

/// Negativity `(Σ|λ_i| − 1)/2` of the partial transpose on Bob's factor.
pub fn negativity(rho: &CMatrix, dims: (usize, usize)) -> f64 {
    let pt = linalg::partial_transpose_b(rho, dims.0, dims.1);
    let sum: f64 = linalg::hermitian_eigenvalues(&pt).iter().map(|l| l.abs()).sum();
    (sum - 1.0) / 2.0
}

/// `c·P* + (1−c)·swap(P*)`; for symmetric `f` every point on the segment has
/// the same Bell value as `P*`.
pub fn flat_segment(f: &BellFunctional, p_star: &Correlation, c: f64) -> Result<Correlation> {
    if !f.is_symmetric() {
        return Err(Error::NotSymmetric(format!("functional `{}`", f.name)));
    }
    p_star.mix(c, &p_star.swap_parties()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_state_negativity() {
        let k = phi_plus();
        assert!((negativity(&k.density(), (2, 2)) - 0.5).abs() < 1e-12);
        let prod = Ket::from_real((2, 2), &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(negativity(&prod.density(), (2, 2)).abs() < 1e-12);
    }

    #[test]
    fn product_state_gives_deterministic_point() {
        let prod = Ket::from_real((2, 2), &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let z = Measurement::from_observable(&linalg::sigma_z()).unwrap();
        let s = QuantumStrategy::new(prod.into(), vec![z.clone(); 2], vec![z; 2]).unwrap();
        let p = s.correlation();
        for (x, y, a, b) in p.scenario().indices() {
            let expected = if a == 0 && b == 0 { 1.0 } else { 0.0 };
            assert!((p.get(x, y, a, b) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn mixed_and_pure_paths_agree() {
        let s = strategy_j42();
        let mixed = QuantumStrategy {
            state: State::Mixed(s.state.to_density_operator()),
            ..s.clone()
        };
        assert!(s.correlation().max_distance(&mixed.correlation()) < 1e-14);
    }
}

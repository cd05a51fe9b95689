//! A chart of SU(D) by plane rotations.
//!
//! `U = G_1 ⋯ G_K · diag(e^{iα_0}, …, e^{iα_{D−2}}, e^{−iΣα})` where the
//! `K = D(D−1)/2` factors are complex Givens rotations
//! `[[cos θ, −e^{−iφ} sin θ], [e^{iφ} sin θ, cos θ]]` on every plane `(i, j)`,
//! `i < j`, taken column by column. Parameters are laid out as
//! `(θ_1, φ_1, …, θ_K, φ_K, α_0, …, α_{D−2})`, `D² − 1` in total.

use crate::linalg::{c, identity, CMatrix};
use crate::{Error, Result};

pub fn su_param_count(d: usize) -> usize {
    d * d - 1
}

pub fn su_unitary(d: usize, params: &[f64]) -> Result<CMatrix> {
    if params.len() != su_param_count(d) {
        return Err(Error::InvalidParameter(format!(
            "SU({d}) needs {} parameters, got {}",
            su_param_count(d),
            params.len()
        )));
    }
    let mut u = identity(d);
    let mut k = 0;
    for j in 1..d {
        for i in 0..j {
            let (theta, phi) = (params[k], params[k + 1]);
            k += 2;
            let (ct, st) = (theta.cos(), theta.sin());
            let e = c(phi.cos(), phi.sin());
            // right-multiply: only columns i and j change
            for r in 0..d {
                let ui = u[(r, i)];
                let uj = u[(r, j)];
                u[(r, i)] = ui * ct + uj * e * st;
                u[(r, j)] = -ui * e.conj() * st + uj * ct;
            }
        }
    }
    let mut total = 0.0;
    for col in 0..d {
        let alpha = if col + 1 < d {
            let a = params[k + col];
            total += a;
            a
        } else {
            -total
        };
        let ph = c(alpha.cos(), alpha.sin());
        for r in 0..d {
            u[(r, col)] *= ph;
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use rand::Rng;

    #[test]
    fn chart_lands_in_su() {
        let mut rng = crate::optimize::restart_rng(1, 0);
        for d in 2..=5 {
            let p: Vec<f64> = (0..su_param_count(d)).map(|_| rng.random_range(-3.0..3.0)).collect();
            let u = su_unitary(d, &p).unwrap();
            let defect = linalg::max_abs(&(u.adjoint() * &u - linalg::identity(d)));
            assert!(defect < 1e-13);
            let det = u.determinant();
            assert!((det - c(1.0, 0.0)).norm() < 1e-12, "{det}");
        }
    }

    #[test]
    fn zero_parameters_give_identity() {
        let u = su_unitary(3, &[0.0; 8]).unwrap();
        assert!(linalg::max_abs(&(u - linalg::identity(3))) < 1e-15);
    }
}

//! Dense complex linear algebra helpers.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// `v · σ` for a real 3-vector.
pub fn bloch_operator(v: &[f64; 3]) -> CMatrix {
    sigma_x() * c(v[0], 0.) + sigma_y() * c(v[1], 0.) + sigma_z() * c(v[2], 0.)
}

pub fn real(m: &DMatrix<f64>) -> CMatrix {
    m.map(|v| c(v, 0.0))
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn basis_vector(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = c(1.0, 0.0);
    v
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigenvalues in ascending order with matching eigenvector columns.
///
/// The input is symmetrized first; nalgebra reduces to tridiagonal form with
/// Householder reflections and runs implicit QR on the result.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// The swap operator `S|i⟩|j⟩ = |j⟩|i⟩` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = c(1.0, 0.0);
        }
    }
    s
}

/// Swaps the tensor factors of a vector on `C^da ⊗ C^db`.
pub fn swap_vector(v: &CVector, da: usize, db: usize) -> CVector {
    let mut out = CVector::zeros(da * db);
    for i in 0..da {
        for j in 0..db {
            out[j * da + i] = v[i * db + j];
        }
    }
    out
}

/// `S ρ S†` for `ρ` on `C^da ⊗ C^db`; the result lives on `C^db ⊗ C^da`.
pub fn swap_density(rho: &CMatrix, da: usize, db: usize) -> CMatrix {
    let mut out = CMatrix::zeros(da * db, da * db);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(j * da + i, l * da + k)] = rho[(i * db + j, k * db + l)];
                }
            }
        }
    }
    out
}

/// `tr_B ρ`.
pub fn partial_trace_b(rho: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da, da, |i, k| {
        (0..db).map(|j| rho[(i * db + j, k * db + j)]).sum()
    })
}

/// `tr_A ρ`.
pub fn partial_trace_a(rho: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(db, db, |j, l| {
        (0..da).map(|i| rho[(i * db + j, i * db + l)]).sum()
    })
}

/// Partial transpose on the second factor.
pub fn partial_transpose_b(rho: &CMatrix, da: usize, db: usize) -> CMatrix {
    let mut out = CMatrix::zeros(da * db, da * db);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(i * db + l, k * db + j)] = rho[(i * db + j, k * db + l)];
                }
            }
        }
    }
    out
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let mut acc = c(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn random_ket<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(n, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// Haar-random unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / c(d.norm(), 0.0) } else { c(1.0, 0.0) };
        let col = u.column(j) * phase;
        u.set_column(j, &col);
    }
    u
}

/// A random density matrix of the given rank.
pub fn random_density<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, rank, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn random_unit_vector3<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-8 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigen_sorted_and_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_unitary(4, &mut rng);
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(3.0, 0.),
            c(-1.0, 0.),
            c(0.5, 0.),
            c(2.0, 0.),
        ]));
        let h = &g * d * g.adjoint();
        let (vals, vecs) = hermitian_eigen(&h);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[3] - 3.0).abs() < 1e-12);
        let back = &vecs
            * CMatrix::from_diagonal(&CVector::from_iterator(4, vals.iter().map(|&v| c(v, 0.))))
            * vecs.adjoint();
        assert!(max_abs(&(back - h)) < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(5, &mut rng);
        assert!(max_abs(&(u.adjoint() * &u - identity(5))) < 1e-12);
    }

    #[test]
    fn swap_helpers_agree_with_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = swap_operator(3);
        let v = random_ket(9, &mut rng);
        assert!((swap_vector(&v, 3, 3) - &s * &v).norm() < 1e-14);
        let rho = random_density(9, 2, &mut rng);
        assert!(max_abs(&(swap_density(&rho, 3, 3) - &s * &rho * &s)) < 1e-14);
    }

    #[test]
    fn partial_traces_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_density(2, 2, &mut rng);
        let b = random_density(3, 1, &mut rng);
        let rho = a.kronecker(&b);
        assert!(max_abs(&(partial_trace_b(&rho, 2, 3) - &a)) < 1e-14);
        assert!(max_abs(&(partial_trace_a(&rho, 2, 3) - &b)) < 1e-14);
    }
}

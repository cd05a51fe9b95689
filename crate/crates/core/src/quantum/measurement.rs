use super::state::OPERATOR_TOL;
use crate::linalg::{self, c, CMatrix};
use crate::{Error, Result};

/// A POVM `{M_a}`; `projective` records whether every effect is idempotent.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    effects: Vec<CMatrix>,
    projective: bool,
}

impl Measurement {
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        Self::with_tolerance(effects, OPERATOR_TOL)
    }

    pub fn with_tolerance(effects: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let Some(first) = effects.first() else {
            return Err(Error::InvalidMeasurement("no effects".into()));
        };
        let d = first.nrows();
        let mut total = CMatrix::zeros(d, d);
        for (a, e) in effects.iter().enumerate() {
            if e.nrows() != d || e.ncols() != d {
                return Err(Error::InvalidMeasurement(format!(
                    "effect {a} is {}x{}, expected {d}x{d}",
                    e.nrows(),
                    e.ncols()
                )));
            }
            if linalg::hermitian_defect(e) > tol {
                return Err(Error::InvalidMeasurement(format!("effect {a} not Hermitian")));
            }
            let lmin = linalg::min_eigenvalue(e);
            if lmin < -tol {
                return Err(Error::InvalidMeasurement(format!(
                    "effect {a} has eigenvalue {lmin:e}"
                )));
            }
            total += e;
        }
        let defect = linalg::max_abs(&(total - linalg::identity(d)));
        if defect > tol {
            return Err(Error::InvalidMeasurement(format!(
                "effects sum to identity only within {defect:e}"
            )));
        }
        let projective = effects
            .iter()
            .all(|e| linalg::max_abs(&(e * e - e)) <= tol);
        Ok(Self {
            effects,
            projective,
        })
    }

    /// Two-outcome measurement of a `±1`-valued observable `A`:
    /// effects `(I + A)/2` and `(I − A)/2`.
    pub fn from_observable(a: &CMatrix) -> Result<Self> {
        let id = linalg::identity(a.nrows());
        let half = c(0.5, 0.0);
        Self::new(vec![(&id + a) * half, (&id - a) * half])
    }

    /// Measurement whose outcome is always `outcome`.
    pub fn trivial(d: usize, outcomes: usize, outcome: usize) -> Self {
        let effects = (0..outcomes)
            .map(|a| {
                if a == outcome {
                    linalg::identity(d)
                } else {
                    CMatrix::zeros(d, d)
                }
            })
            .collect();
        Self {
            effects,
            projective: true,
        }
    }

    /// Rank-one projective measurement onto the columns of a unitary.
    pub fn from_basis(u: &CMatrix) -> Result<Self> {
        let effects = (0..u.ncols())
            .map(|a| linalg::projector(&u.column(a).into_owned()))
            .collect();
        Self::new(effects)
    }

    pub fn dim(&self) -> usize {
        self.effects[0].nrows()
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn effect(&self, a: usize) -> &CMatrix {
        &self.effects[a]
    }

    pub fn is_projective(&self) -> bool {
        self.projective
    }

    /// `Σ_a (−1)^a M_a`.
    pub fn observable(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for (a, e) in self.effects.iter().enumerate() {
            if a % 2 == 0 {
                out += e;
            } else {
                out -= e;
            }
        }
        out
    }

    pub fn conj(&self) -> Measurement {
        Measurement {
            effects: self.effects.iter().map(|e| e.map(|z| z.conj())).collect(),
            projective: self.projective,
        }
    }

    pub fn map_effects(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Result<Measurement> {
        Measurement::new(self.effects.iter().map(f).collect())
    }

    /// Effects conjugated by a unitary, `U M_a U†`.
    pub fn rotated(&self, u: &CMatrix) -> Measurement {
        Measurement {
            effects: self.effects.iter().map(|e| u * e * u.adjoint()).collect(),
            projective: self.projective,
        }
    }

    /// Max-norm distance between corresponding effects.
    pub fn distance(&self, other: &Measurement) -> f64 {
        if self.outcomes() != other.outcomes() || self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.effects
            .iter()
            .zip(&other.effects)
            .map(|(p, q)| linalg::max_abs(&(p - q)))
            .fold(0.0, f64::max)
    }
}

/// A two-outcome qubit observable `a·σ`, or `±I` when degenerate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitObservable {
    Bloch([f64; 3]),
    /// Always returns outcome 0 (`+I`) or 1 (`−I`).
    Degenerate { outcome: usize },
}

impl QubitObservable {
    /// Unit Bloch vector from polar and azimuthal angles in radians.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        QubitObservable::Bloch([
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ])
    }

    pub fn operator(&self) -> CMatrix {
        match self {
            QubitObservable::Bloch(v) => linalg::bloch_operator(v),
            QubitObservable::Degenerate { outcome: 0 } => linalg::identity(2),
            QubitObservable::Degenerate { .. } => -linalg::identity(2),
        }
    }

    pub fn measurement(&self) -> Result<Measurement> {
        match self {
            QubitObservable::Bloch(v) => {
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if (n - 1.0).abs() > OPERATOR_TOL {
                    return Err(Error::InvalidMeasurement(format!(
                        "Bloch vector has length {n}"
                    )));
                }
                Measurement::from_observable(&self.operator())
            }
            QubitObservable::Degenerate { outcome } => {
                Ok(Measurement::trivial(2, 2, (*outcome).min(1)))
            }
        }
    }

    /// Reads a projective qubit measurement back as an observable.
    pub fn from_measurement(m: &Measurement) -> Option<Self> {
        if m.dim() != 2 || m.outcomes() != 2 || !m.is_projective() {
            return None;
        }
        let a = m.observable();
        let v = [
            a[(0, 1)].re,
            -a[(0, 1)].im,
            0.5 * (a[(0, 0)].re - a[(1, 1)].re),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n < 0.5 {
            let outcome = if a[(0, 0)].re > 0.0 { 0 } else { 1 };
            Some(QubitObservable::Degenerate { outcome })
        } else {
            Some(QubitObservable::Bloch([v[0] / n, v[1] / n, v[2] / n]))
        }
    }

    pub fn bloch(&self) -> Option<[f64; 3]> {
        match self {
            QubitObservable::Bloch(v) => Some(*v),
            QubitObservable::Degenerate { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observable_round_trip() {
        let o = QubitObservable::from_angles(0.7, -1.2);
        let m = o.measurement().unwrap();
        assert!(m.is_projective());
        let back = QubitObservable::from_measurement(&m).unwrap();
        let (a, b) = (o.bloch().unwrap(), back.bloch().unwrap());
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_is_projective_with_zero_effect() {
        let m = QubitObservable::Degenerate { outcome: 0 }.measurement().unwrap();
        assert!(m.is_projective());
        assert_eq!(m.effect(1), &CMatrix::zeros(2, 2));
        assert_eq!(
            QubitObservable::from_measurement(&m),
            Some(QubitObservable::Degenerate { outcome: 0 })
        );
    }

    #[test]
    fn rejects_incomplete_povm() {
        let half = linalg::identity(2) * c(0.4, 0.0);
        assert!(Measurement::new(vec![half.clone(), half]).is_err());
    }
}

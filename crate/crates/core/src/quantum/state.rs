use crate::linalg::{self, c, CMatrix, CVector};
use crate::{Error, Result};

/// Tolerance for state and effect invariants.
pub const OPERATOR_TOL: f64 = 1e-10;

/// A unit vector on `C^da ⊗ C^db`, stored with Alice's index major.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    pub dims: (usize, usize),
    pub vector: CVector,
}

impl Ket {
    pub fn new(dims: (usize, usize), vector: CVector) -> Result<Self> {
        if vector.len() != dims.0 * dims.1 {
            return Err(Error::InvalidState(format!(
                "vector of length {} on {}x{}",
                vector.len(),
                dims.0,
                dims.1
            )));
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > OPERATOR_TOL {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(Self { dims, vector })
    }

    /// Normalizes `vector` first.
    pub fn normalized(dims: (usize, usize), vector: CVector) -> Result<Self> {
        let norm = vector.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(dims, vector / c(norm, 0.0))
    }

    pub fn from_real(dims: (usize, usize), amplitudes: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&x| c(x, 0.0)));
        Self::new(dims, v)
    }

    /// The amplitude matrix `Ψ_{ij} = ⟨ij|ψ⟩`.
    pub fn amplitude_matrix(&self) -> CMatrix {
        let (da, db) = self.dims;
        CMatrix::from_fn(da, db, |i, j| self.vector[i * db + j])
    }

    pub fn density(&self) -> CMatrix {
        linalg::projector(&self.vector)
    }

    /// The same state with the parties' factors exchanged.
    pub fn swapped(&self) -> Ket {
        let (da, db) = self.dims;
        Ket {
            dims: (db, da),
            vector: linalg::swap_vector(&self.vector, da, db),
        }
    }

    pub fn conj(&self) -> Ket {
        Ket {
            dims: self.dims,
            vector: self.vector.map(|z| z.conj()),
        }
    }
}

/// A unit-trace positive semidefinite operator on `C^da ⊗ C^db`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    pub dims: (usize, usize),
    pub matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(dims: (usize, usize), matrix: CMatrix) -> Result<Self> {
        let n = dims.0 * dims.1;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix on {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                dims.0,
                dims.1
            )));
        }
        if linalg::hermitian_defect(&matrix) > OPERATOR_TOL {
            return Err(Error::InvalidState("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > OPERATOR_TOL || tr.im.abs() > OPERATOR_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let lmin = linalg::min_eigenvalue(&matrix);
        if lmin < -OPERATOR_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {lmin:e}"
            )));
        }
        Ok(Self { dims, matrix })
    }

    pub fn swapped(&self) -> DensityOperator {
        let (da, db) = self.dims;
        DensityOperator {
            dims: (db, da),
            matrix: linalg::swap_density(&self.matrix, da, db),
        }
    }

    pub fn conj(&self) -> DensityOperator {
        DensityOperator {
            dims: self.dims,
            matrix: self.matrix.map(|z| z.conj()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(Ket),
    Mixed(DensityOperator),
}

impl State {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            State::Pure(k) => k.dims,
            State::Mixed(r) => r.dims,
        }
    }

    pub fn density(&self) -> CMatrix {
        match self {
            State::Pure(k) => k.density(),
            State::Mixed(r) => r.matrix.clone(),
        }
    }

    pub fn to_density_operator(&self) -> DensityOperator {
        match self {
            State::Pure(k) => DensityOperator {
                dims: k.dims,
                matrix: k.density(),
            },
            State::Mixed(r) => r.clone(),
        }
    }

    pub fn swapped(&self) -> State {
        match self {
            State::Pure(k) => State::Pure(k.swapped()),
            State::Mixed(r) => State::Mixed(r.swapped()),
        }
    }

    pub fn conj(&self) -> State {
        match self {
            State::Pure(k) => State::Pure(k.conj()),
            State::Mixed(r) => State::Mixed(r.conj()),
        }
    }

    pub fn as_ket(&self) -> Option<&Ket> {
        match self {
            State::Pure(k) => Some(k),
            State::Mixed(_) => None,
        }
    }
}

impl From<Ket> for State {
    fn from(k: Ket) -> Self {
        State::Pure(k)
    }
}

impl From<DensityOperator> for State {
    fn from(r: DensityOperator) -> Self {
        State::Mixed(r)
    }
}

/// `|Φ+⟩ = (|00⟩ + |11⟩)/√2` on two qubits.
pub fn phi_plus() -> Ket {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ket::from_real((2, 2), &[h, 0.0, 0.0, h]).expect("unit vector")
}

/// `|Φ−⟩ = (|00⟩ − |11⟩)/√2`.
pub fn phi_minus() -> Ket {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ket::from_real((2, 2), &[h, 0.0, 0.0, -h]).expect("unit vector")
}

/// `|Ψ+⟩ = (|01⟩ + |10⟩)/√2`.
pub fn psi_plus() -> Ket {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ket::from_real((2, 2), &[0.0, h, h, 0.0]).expect("unit vector")
}

/// The singlet `|Ψ−⟩ = (|01⟩ − |10⟩)/√2`.
pub fn psi_minus() -> Ket {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ket::from_real((2, 2), &[0.0, h, -h, 0.0]).expect("unit vector")
}

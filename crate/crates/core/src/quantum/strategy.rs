use super::{Ket, Measurement, State};
use crate::linalg::{self, c, CMatrix};
use crate::{BellFunctional, Correlation, Error, Result, Scenario};

/// A state together with one measurement per setting for each party.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    pub state: State,
    pub alice: Vec<Measurement>,
    pub bob: Vec<Measurement>,
}

impl QuantumStrategy {
    pub fn new(state: State, alice: Vec<Measurement>, bob: Vec<Measurement>) -> Result<Self> {
        let (da, db) = state.dims();
        let n = alice
            .first()
            .or(bob.first())
            .map(|m| m.outcomes())
            .ok_or_else(|| Error::InvalidMeasurement("no measurements".into()))?;
        if alice.is_empty() || bob.is_empty() {
            return Err(Error::InvalidMeasurement("each party needs a setting".into()));
        }
        for (party, list, d) in [("Alice", &alice, da), ("Bob", &bob, db)] {
            for (x, m) in list.iter().enumerate() {
                if m.dim() != d {
                    return Err(Error::InvalidMeasurement(format!(
                        "{party} setting {x} acts on dimension {}, state has {d}",
                        m.dim()
                    )));
                }
                if m.outcomes() != n {
                    return Err(Error::InvalidMeasurement(format!(
                        "{party} setting {x} has {} outcomes, expected {n}",
                        m.outcomes()
                    )));
                }
            }
        }
        Ok(Self { state, alice, bob })
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            settings_a: self.alice.len(),
            settings_b: self.bob.len(),
            outcomes: self.alice[0].outcomes(),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.state.dims()
    }

    /// Born-rule correlation `P(a,b|x,y) = tr(ρ M_{a|x} ⊗ N_{b|y})`.
    pub fn correlation(&self) -> Correlation {
        born_correlation(&self.state, &self.alice, &self.bob)
    }

    pub fn value(&self, f: &BellFunctional) -> Result<f64> {
        f.evaluate(&self.correlation())
    }

    /// The same strategy with the parties' roles exchanged.
    pub fn swapped(&self) -> QuantumStrategy {
        QuantumStrategy {
            state: self.state.swapped(),
            alice: self.bob.clone(),
            bob: self.alice.clone(),
        }
    }

    pub fn all_projective(&self) -> bool {
        self.alice.iter().chain(&self.bob).all(|m| m.is_projective())
    }
}

/// Alice-side reduced operators `K_{a|x}` with `P(a,b|x,y) = tr(K_{a|x} N_{b|y})`.
fn reduced_operators(state: &State, alice: &[Measurement]) -> Vec<Vec<CMatrix>> {
    let (da, db) = state.dims();
    match state {
        State::Pure(k) => {
            // (M ⊗ N)|ψ⟩ ↔ M Ψ Nᵀ, so ⟨ψ|M ⊗ N|ψ⟩ = Σ_jl (Ψ† M Ψ)_{jl} N_{jl}
            let psi = k.amplitude_matrix();
            let psi_dag = psi.adjoint();
            alice
                .iter()
                .map(|m| {
                    m.effects()
                        .iter()
                        .map(|e| (&psi_dag * e * &psi).transpose())
                        .collect()
                })
                .collect()
        }
        State::Mixed(r) => alice
            .iter()
            .map(|m| {
                m.effects()
                    .iter()
                    .map(|e| {
                        // tr_A[ρ (M ⊗ I)]
                        CMatrix::from_fn(db, db, |j, l| {
                            let mut acc = c(0.0, 0.0);
                            for i in 0..da {
                                for k in 0..da {
                                    acc += r.matrix[(i * db + j, k * db + l)] * e[(k, i)];
                                }
                            }
                            acc
                        })
                    })
                    .collect()
            })
            .collect(),
    }
}

pub fn born_correlation(state: &State, alice: &[Measurement], bob: &[Measurement]) -> Correlation {
    let s = Scenario {
        settings_a: alice.len(),
        settings_b: bob.len(),
        outcomes: alice[0].outcomes(),
    };
    let reduced = reduced_operators(state, alice);
    Correlation::from_fn(s, |x, y, a, b| {
        linalg::trace_product(&reduced[x][a], bob[y].effect(b)).re
    })
}

/// Bell operator `Σ β(a,b|x,y) M_{a|x} ⊗ N_{b|y}` (the offset is not included).
pub fn bell_operator(f: &BellFunctional, alice: &[Measurement], bob: &[Measurement]) -> Result<CMatrix> {
    let s = f.scenario();
    if alice.len() != s.settings_a || bob.len() != s.settings_b {
        return Err(Error::ShapeMismatch {
            expected: s.to_string(),
            found: format!("{} and {} measurements", alice.len(), bob.len()),
        });
    }
    if alice.iter().chain(bob).any(|m| m.outcomes() != s.outcomes) {
        return Err(Error::ShapeMismatch {
            expected: format!("{} outcomes", s.outcomes),
            found: "measurement with a different outcome count".into(),
        });
    }
    let da = alice[0].dim();
    let db = bob[0].dim();
    let mut op = CMatrix::zeros(da * db, da * db);
    for (x, m) in alice.iter().enumerate() {
        for a in 0..s.outcomes {
            let mut g = CMatrix::zeros(db, db);
            let mut any = false;
            for (y, nm) in bob.iter().enumerate() {
                for b in 0..s.outcomes {
                    let beta = f.coefficient(x, y, a, b);
                    if beta != 0.0 {
                        g += nm.effect(b) * c(beta, 0.0);
                        any = true;
                    }
                }
            }
            if any {
                op += m.effect(a).kronecker(&g);
            }
        }
    }
    Ok(op)
}

/// Result of maximizing a Bell value over states for fixed measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct BestState {
    pub ket: Ket,
    /// Top eigenvalue plus the functional's offset.
    pub value: f64,
    /// True when the top eigenvalue is degenerate; `ket` is then one
    /// arbitrary unit vector from the eigenspace.
    pub degenerate: bool,
    /// Gap between the two largest eigenvalues.
    pub gap: f64,
}

/// Relative eigenvalue gap below which the top eigenspace counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

pub fn top_eigenvector(op: &CMatrix, dims: (usize, usize), offset: f64) -> Result<BestState> {
    let (vals, vecs) = linalg::hermitian_eigen(op);
    let n = vals.len();
    let top = vals[n - 1];
    let gap = if n > 1 { top - vals[n - 2] } else { f64::INFINITY };
    let ket = Ket::normalized(dims, vecs.column(n - 1).into_owned())?;
    Ok(BestState {
        ket,
        value: top + offset,
        degenerate: gap <= DEGENERACY_TOL * top.abs().max(1.0),
        gap,
    })
}

/// The state maximizing `f` for the given measurements: the top eigenvector
/// of the Bell operator.
pub fn best_state_for_measurements(
    f: &BellFunctional,
    alice: &[Measurement],
    bob: &[Measurement],
) -> Result<BestState> {
    let op = bell_operator(f, alice, bob)?;
    top_eigenvector(&op, (alice[0].dim(), bob[0].dim()), f.offset)
}

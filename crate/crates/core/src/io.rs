//! JSON file formats for correlations, functionals and strategies.
//!
//! Tables are nested as `[x][y][a][b]`; complex numbers are `[re, im]` pairs
//! and matrices are lists of rows.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linalg::{c, CMatrix, CVector};
use crate::quantum::{DensityOperator, Ket, Measurement, QuantumStrategy, State};
use crate::{BellFunctional, Correlation, Error, Result, Scenario};

type Table = Vec<Vec<Vec<Vec<f64>>>>;
type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
struct CorrelationFile {
    m: usize,
    n: usize,
    p: Table,
}

#[derive(Debug, Serialize, Deserialize)]
struct FunctionalFile {
    m: usize,
    n: usize,
    #[serde(alias = "p")]
    beta: Table,
    #[serde(default)]
    offset: f64,
    #[serde(default)]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    local_bound: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum StateKind {
    Ket,
    Rho,
}

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    kind: StateKind,
    /// A flat list of amplitudes for a ket, rows of `[re, im]` for a density.
    data: serde_json::Value,
}

#[derive(Debug, Serialize, Deserialize)]
struct StrategyFile {
    dims: [usize; 2],
    state: StateFile,
    alice: Vec<Vec<ComplexRows>>,
    bob: Vec<Vec<ComplexRows>>,
}

fn to_table(s: Scenario, get: impl Fn(usize, usize, usize, usize) -> f64) -> Table {
    (0..s.settings_a)
        .map(|x| {
            (0..s.settings_b)
                .map(|y| {
                    (0..s.outcomes)
                        .map(|a| (0..s.outcomes).map(|b| get(x, y, a, b)).collect())
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn from_table(m: usize, n: usize, t: &Table) -> Result<(Scenario, Vec<f64>)> {
    let s = Scenario::symmetric(m, n)?;
    let shape_ok = t.len() == m
        && t.iter().all(|row| {
            row.len() == m
                && row
                    .iter()
                    .all(|ab| ab.len() == n && ab.iter().all(|bs| bs.len() == n))
        });
    if !shape_ok {
        return Err(Error::ShapeMismatch {
            expected: format!("table of shape [{m}][{m}][{n}][{n}]"),
            found: "ragged or mis-sized table".into(),
        });
    }
    let flat = s.indices().map(|(x, y, a, b)| t[x][y][a][b]).collect();
    Ok((s, flat))
}

pub fn correlation_to_json(p: &Correlation) -> Result<String> {
    let s = p.scenario();
    s.expect_balanced()?;
    let file = CorrelationFile {
        m: s.settings_a,
        n: s.outcomes,
        p: to_table(s, |x, y, a, b| p.get(x, y, a, b)),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn correlation_from_json(text: &str) -> Result<Correlation> {
    let file: CorrelationFile = serde_json::from_str(text)?;
    let (s, flat) = from_table(file.m, file.n, &file.p)?;
    Correlation::new(s, flat)
}

pub fn functional_to_json(f: &BellFunctional) -> Result<String> {
    let s = f.scenario();
    s.expect_balanced()?;
    let file = FunctionalFile {
        m: s.settings_a,
        n: s.outcomes,
        beta: to_table(s, |x, y, a, b| f.coefficient(x, y, a, b)),
        offset: f.offset,
        name: Some(f.name.clone()),
        local_bound: f.known_local_bound,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn functional_from_json(text: &str) -> Result<BellFunctional> {
    let file: FunctionalFile = serde_json::from_str(text)?;
    let (s, flat) = from_table(file.m, file.n, &file.beta)?;
    let name = file.name.unwrap_or_else(|| "custom".to_string());
    let mut f = BellFunctional::new(s, flat, file.offset, name)?;
    f.known_local_bound = file.local_bound;
    Ok(f)
}

fn matrix_rows(m: &CMatrix) -> ComplexRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_rows(rows: &ComplexRows, dim: usize) -> Result<CMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::ShapeMismatch {
            expected: format!("{dim}×{dim} matrix"),
            found: format!("{} rows", rows.len()),
        });
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn measurements_from_rows(list: &[Vec<ComplexRows>], dim: usize) -> Result<Vec<Measurement>> {
    list.iter()
        .map(|effects| {
            let mats = effects
                .iter()
                .map(|e| matrix_from_rows(e, dim))
                .collect::<Result<Vec<_>>>()?;
            Measurement::new(mats)
        })
        .collect()
}

pub fn strategy_to_json(s: &QuantumStrategy) -> Result<String> {
    let (da, db) = s.dims();
    let state = match &s.state {
        State::Pure(k) => {
            let amps: Vec<[f64; 2]> = k.vector.iter().map(|z| [z.re, z.im]).collect();
            StateFile {
                kind: StateKind::Ket,
                data: serde_json::to_value(amps)?,
            }
        }
        State::Mixed(r) => StateFile {
            kind: StateKind::Rho,
            data: serde_json::to_value(matrix_rows(&r.matrix))?,
        },
    };
    let effects = |ms: &[Measurement]| -> Vec<Vec<ComplexRows>> {
        ms.iter()
            .map(|m| m.effects().iter().map(matrix_rows).collect())
            .collect()
    };
    let file = StrategyFile {
        dims: [da, db],
        state,
        alice: effects(&s.alice),
        bob: effects(&s.bob),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn strategy_from_json(text: &str) -> Result<QuantumStrategy> {
    let file: StrategyFile = serde_json::from_str(text)?;
    let dims = (file.dims[0], file.dims[1]);
    let state = match file.state.kind {
        StateKind::Ket => {
            let amps: Vec<[f64; 2]> = serde_json::from_value(file.state.data)?;
            let v = CVector::from_iterator(amps.len(), amps.iter().map(|z| c(z[0], z[1])));
            State::Pure(Ket::new(dims, v)?)
        }
        StateKind::Rho => {
            let rows: ComplexRows = serde_json::from_value(file.state.data)?;
            let m = matrix_from_rows(&rows, dims.0 * dims.1)?;
            State::Mixed(DensityOperator::new(dims, m)?)
        }
    };
    let alice = measurements_from_rows(&file.alice, dims.0)?;
    let bob = measurements_from_rows(&file.bob, dims.1)?;
    QuantumStrategy::new(state, alice, bob)
}

/// Formats with nine significant digits, without exponent for ordinary
/// magnitudes.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        let decimals = (8 - mag).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.8e}")
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))
}

pub fn read_correlation(path: impl AsRef<Path>) -> Result<Correlation> {
    correlation_from_json(&read(path.as_ref())?)
}

pub fn read_functional(path: impl AsRef<Path>) -> Result<BellFunctional> {
    functional_from_json(&read(path.as_ref())?)
}

pub fn read_strategy(path: impl AsRef<Path>) -> Result<QuantumStrategy> {
    strategy_from_json(&read(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::quantum::{strategy_is, strategy_j42};

    #[test]
    fn functional_round_trip() {
        let f = catalog::j42().functional;
        let g = functional_from_json(&functional_to_json(&f).unwrap()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn strategy_round_trip_preserves_correlation() {
        for s in [strategy_j42(), strategy_is(2.0).unwrap()] {
            let t = strategy_from_json(&strategy_to_json(&s).unwrap()).unwrap();
            assert!(s.correlation().max_distance(&t.correlation()) < 1e-14);
        }
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig(9.140681101), "9.14068110");
        assert_eq!(format_sig(2.0), "2.00000000");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(-0.0123456789), "-0.0123456789");
        assert_eq!(format_sig(1.5e12), "1.50000000e12");
    }

    #[test]
    fn ragged_table_is_rejected() {
        let text = r#"{"m":2,"n":2,"p":[[[[0.25]]]]}"#;
        assert!(matches!(correlation_from_json(text), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn beta_accepts_p_alias() {
        let text = r#"{"m":1,"n":2,"p":[[[[1,0],[0,0]]]],"offset":0.5}"#;
        let f = functional_from_json(text).unwrap();
        assert_eq!(f.coefficient(0, 0, 0, 0), 1.0);
        assert_eq!(f.offset, 0.5);
    }
}

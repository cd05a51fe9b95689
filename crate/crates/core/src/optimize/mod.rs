//! Lower bounds on quantum Bell values in fixed local dimension.
//!
//! Two drivers are provided: the see-saw iteration, which alternates exact
//! maximizations over one party's measurements and the state, and a
//! parametrized local search over symmetric strategies (shared projective
//! measurements and a swap-(anti)invariant pure state). Both run independent
//! restarts in parallel and keep the best.

mod chart;
mod complex_sdp;
mod seesaw;
mod sqs;
mod sweep;

pub use chart::{su_param_count, su_unitary};
pub use seesaw::{dichotomic_observable_update, optimal_povm, seesaw, seesaw_run, SeesawRun, SYMMETRIC_TOL};
pub use sqs::{balanced_ranks, projective_from_unitary, sqs_lower_bound, subspace_basis};
pub use sweep::{sweep, SweepRow, SWEEP_CSV_HEADER};

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::quantum::QuantumStrategy;
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeesawMode {
    Unrestricted,
    /// Starts anywhere and bounds the asymmetry `|P − P^swap|` by a band
    /// that halves every sweep; only iterates symmetric within
    /// [`SYMMETRIC_TOL`] are reported. Values are not monotone while the band
    /// shrinks.
    SymmetricCorrelation,
    /// Bob copies Alice's measurements and the state stays in the symmetric
    /// or antisymmetric subspace; convergence is not guaranteed.
    SharedPovm,
}

impl fmt::Display for SeesawMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Unrestricted => "unrestricted",
            Self::SymmetricCorrelation => "symmetric_correlation",
            Self::SharedPovm => "shared_povm",
        })
    }
}

impl FromStr for SeesawMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unrestricted" | "free" => Ok(Self::Unrestricted),
            "symmetric_correlation" | "symcorr" => Ok(Self::SymmetricCorrelation),
            "shared_povm" | "shared" => Ok(Self::SharedPovm),
            _ => Err(Error::InvalidParameter(format!("unknown see-saw mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeesawConfig {
    pub local_dim: usize,
    pub max_iters: usize,
    /// Stop once a full sweep improves the Bell value by less than this.
    pub convergence_tol: f64,
    pub restarts: usize,
    pub mode: SeesawMode,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self {
            local_dim: 2,
            max_iters: 500,
            convergence_tol: 1e-12,
            restarts: 20,
            mode: SeesawMode::Unrestricted,
            seed: DEFAULT_SEED,
        }
    }
}

impl SeesawConfig {
    pub fn validate(&self) -> Result<()> {
        if self.local_dim < 2 {
            return Err(Error::InvalidParameter("local dimension must be at least 2".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("need at least one restart".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    Symmetric,
    Antisymmetric,
    /// Both of the above; the better one is kept.
    Full,
}

impl FromStr for Subspace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" | "sym" => Ok(Self::Symmetric),
            "antisymmetric" | "antisym" => Ok(Self::Antisymmetric),
            "full" => Ok(Self::Full),
            _ => Err(Error::InvalidParameter(format!("unknown subspace `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamOptConfig {
    pub local_dim: usize,
    pub subspace: Subspace,
    /// Ranks of the projectors of each setting, `ranks[x][a]`, each row
    /// summing to `local_dim`. When unset every composition is tried if
    /// there are few enough, otherwise the balanced one.
    pub rank_partitions: Option<Vec<Vec<usize>>>,
    pub restarts: usize,
    /// Objective evaluations allowed per local search.
    pub max_evals: usize,
    /// Central-difference step.
    pub gradient_step: f64,
    pub gradient_tol: f64,
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for ParamOptConfig {
    fn default() -> Self {
        Self {
            local_dim: 2,
            subspace: Subspace::Full,
            rank_partitions: None,
            restarts: 20,
            max_evals: 20_000,
            gradient_step: 1e-6,
            gradient_tol: 1e-9,
            value_tol: 1e-13,
            seed: DEFAULT_SEED,
        }
    }
}

impl ParamOptConfig {
    pub fn validate(&self, settings: usize, outcomes: usize) -> Result<()> {
        if self.local_dim < 2 {
            return Err(Error::InvalidParameter("local dimension must be at least 2".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("need at least one restart".into()));
        }
        if let Some(parts) = &self.rank_partitions {
            if parts.len() != settings {
                return Err(Error::InvalidParameter(format!(
                    "{} rank rows for {settings} settings",
                    parts.len()
                )));
            }
            for (x, row) in parts.iter().enumerate() {
                if row.len() != outcomes || row.iter().sum::<usize>() != self.local_dim {
                    return Err(Error::InvalidParameter(format!(
                        "ranks of setting {x} must be {outcomes} numbers summing to {}",
                        self.local_dim
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct OptimizationReport {
    /// Bell value of `best_strategy`, recomputed from its correlation.
    pub best_value: f64,
    pub best_strategy: QuantumStrategy,
    pub per_restart: Vec<f64>,
    /// Whether the restart that produced the best value met its
    /// termination tolerance.
    pub converged: bool,
    pub mode: String,
    pub local_dim: usize,
}

/// Independent, reproducible generator for one restart.
pub fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// One finished restart: value, strategy, convergence flag.
pub(crate) type RestartOutcome = (f64, QuantumStrategy, bool);

/// Picks the best restart; ties go to the lowest index.
pub(crate) fn reduce_restarts(
    f: &crate::BellFunctional,
    results: Vec<Result<RestartOutcome>>,
    mode: String,
    local_dim: usize,
) -> Result<OptimizationReport> {
    let mut per_restart = Vec::with_capacity(results.len());
    let mut best: Option<RestartOutcome> = None;
    let mut last_err = None;
    for r in results {
        match r {
            Ok(out) => {
                per_restart.push(out.0);
                if best.as_ref().is_none_or(|b| out.0 > b.0) {
                    best = Some(out);
                }
            }
            Err(e) => {
                per_restart.push(f64::NAN);
                last_err = Some(e);
            }
        }
    }
    let Some((_, strategy, converged)) = best else {
        return Err(last_err.unwrap_or_else(|| Error::Numerical("no restart finished".into())));
    };
    let best_value = strategy.value(f)?;
    Ok(OptimizationReport {
        best_value,
        best_strategy: strategy,
        per_restart,
        converged,
        mode,
        local_dim,
    })
}

use super::{seesaw, sqs_lower_bound, ParamOptConfig, SeesawConfig};
use crate::io::format_sig;
use crate::local::local_bound;
use crate::{BellFunctional, Result};

pub const SWEEP_CSV_HEADER: &str = "alpha,local,sqs_qubit,quantum";

/// One row of a parameter sweep: the local bound, the best symmetric
/// strategy value and the best unrestricted see-saw value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub local: f64,
    pub sqs_qubit: f64,
    pub quantum: f64,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        [self.alpha, self.local, self.sqs_qubit, self.quantum]
            .iter()
            .map(|v| format_sig(*v))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Evaluates a one-parameter family on a grid. Points run one after the
/// other; restarts within a point run in parallel.
pub fn sweep(
    family: impl Fn(f64) -> BellFunctional,
    alphas: &[f64],
    seesaw_cfg: &SeesawConfig,
    sqs_cfg: &ParamOptConfig,
) -> Result<Vec<SweepRow>> {
    alphas
        .iter()
        .map(|&alpha| {
            let f = family(alpha);
            Ok(SweepRow {
                alpha,
                local: local_bound(&f)?.value,
                sqs_qubit: sqs_lower_bound(&f, sqs_cfg)?.best_value,
                quantum: seesaw(&f, seesaw_cfg)?.best_value,
            })
        })
        .collect()
}

//! Local (deterministic) bounds by exhaustive enumeration.

use rayon::prelude::*;
use serde::Serialize;

use crate::{BellFunctional, Correlation, Error, Result, Scenario};

/// Largest number of Alice assignments the enumeration will visit.
pub const ENUMERATION_LIMIT: f64 = 1e7;

/// Response functions `x ↦ a` and `y ↦ b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeterministicStrategy {
    pub outcomes: usize,
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(self.alice.len(), self.bob.len(), self.outcomes)
    }

    /// `P(a,b|x,y) = [a = alice(x)]·[b = bob(y)]`.
    pub fn correlation(&self) -> Result<Correlation> {
        let s = self.scenario()?;
        if self.alice.iter().chain(&self.bob).any(|&o| o >= s.outcomes) {
            return Err(Error::InvalidParameter("output outside outcome range".into()));
        }
        Ok(Correlation::from_fn(s, |x, y, a, b| {
            if a == self.alice[x] && b == self.bob[y] {
                1.0
            } else {
                0.0
            }
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalBound {
    pub value: f64,
    pub witness: DeterministicStrategy,
}

fn assignment_count(s: &Scenario) -> Result<usize> {
    let count = (s.outcomes as f64).powi(s.settings_a as i32);
    if count > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(count as usize)
}

/// Base-n digits of `index`, least significant first.
fn decode(mut index: usize, n: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0; m];
    for digit in out.iter_mut() {
        *digit = index % n;
        index /= n;
    }
    out
}

/// Bob's best response to a fixed Alice assignment, ties to the smallest `b`.
fn best_response(f: &BellFunctional, alice: &[usize]) -> (f64, Vec<usize>) {
    let s = f.scenario();
    let mut total = 0.0;
    let mut bob = Vec::with_capacity(s.settings_b);
    for y in 0..s.settings_b {
        let mut best = (f64::NEG_INFINITY, 0);
        for b in 0..s.outcomes {
            let v: f64 = (0..s.settings_a)
                .map(|x| f.coefficient(x, y, alice[x], b))
                .sum();
            if v > best.0 {
                best = (v, b);
            }
        }
        total += best.0;
        bob.push(best.1);
    }
    (total, bob)
}

fn better(lhs: (f64, usize), rhs: (f64, usize)) -> (f64, usize) {
    if rhs.0 > lhs.0 || (rhs.0 == lhs.0 && rhs.1 < lhs.1) {
        rhs
    } else {
        lhs
    }
}

/// Maximum of `f` over deterministic strategies, with a witness attaining it.
///
/// The reported value is the functional evaluated on the witness, so it
/// agrees bit-for-bit with `f.evaluate(witness.correlation())`.
pub fn local_bound(f: &BellFunctional) -> Result<LocalBound> {
    let s = f.scenario();
    let count = assignment_count(&s)?;
    let (_, best) = (0..count)
        .into_par_iter()
        .map(|i| {
            let alice = decode(i, s.outcomes, s.settings_a);
            (best_response(f, &alice).0, i)
        })
        .reduce(|| (f64::NEG_INFINITY, usize::MAX), better);
    let alice = decode(best, s.outcomes, s.settings_a);
    let (_, bob) = best_response(f, &alice);
    let witness = DeterministicStrategy {
        outcomes: s.outcomes,
        alice,
        bob,
    };
    let value = f.evaluate(&witness.correlation()?)?;
    Ok(LocalBound { value, witness })
}

/// Maximum over deterministic strategies with identical response functions.
pub fn symmetric_local_bound(f: &BellFunctional) -> Result<LocalBound> {
    let s = f.scenario();
    s.expect_balanced()?;
    let count = assignment_count(&s)?;
    let value_of = |i: usize| {
        let out = decode(i, s.outcomes, s.settings_a);
        let v: f64 = s
            .indices()
            .filter(|&(x, y, a, b)| a == out[x] && b == out[y])
            .map(|(x, y, a, b)| f.coefficient(x, y, a, b))
            .sum();
        (v, i)
    };
    let (_, best) = (0..count)
        .into_par_iter()
        .map(value_of)
        .reduce(|| (f64::NEG_INFINITY, usize::MAX), better);
    let out = decode(best, s.outcomes, s.settings_a);
    let witness = DeterministicStrategy {
        outcomes: s.outcomes,
        alice: out.clone(),
        bob: out,
    };
    let value = f.evaluate(&witness.correlation()?)?;
    Ok(LocalBound { value, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CorrelatorForm;

    #[test]
    fn decode_is_base_n() {
        assert_eq!(decode(5, 2, 3), vec![1, 0, 1]);
        assert_eq!(decode(0, 3, 2), vec![0, 0]);
    }

    #[test]
    fn chsh_bound_and_witness() {
        let f = CorrelatorForm::new(2, 2)
            .joint(0, 0, 1.0)
            .joint(0, 1, 1.0)
            .joint(1, 0, 1.0)
            .joint(1, 1, -1.0)
            .into_functional("chsh")
            .unwrap();
        let lb = local_bound(&f).unwrap();
        assert_eq!(lb.value, 2.0);
        assert_eq!(lb.witness.alice, vec![0, 0]);
        assert_eq!(lb.witness.bob, vec![0, 0]);
        assert_eq!(symmetric_local_bound(&f).unwrap().value, 2.0);
    }

    #[test]
    fn guard_rejects_huge_enumeration() {
        let s = Scenario::symmetric(30, 2).unwrap();
        let f = BellFunctional::zeros(s, "big");
        assert!(matches!(
            local_bound(&f),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }
}

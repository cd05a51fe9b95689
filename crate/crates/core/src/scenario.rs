use crate::{Error, Result};

/// A bipartite Bell scenario with `settings_a`/`settings_b` measurement
/// choices and `outcomes` results per choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scenario {
    pub settings_a: usize,
    pub settings_b: usize,
    pub outcomes: usize,
}

impl Scenario {
    pub fn new(settings_a: usize, settings_b: usize, outcomes: usize) -> Result<Self> {
        if settings_a == 0 || settings_b == 0 {
            return Err(Error::InvalidScenario("need at least one setting".into()));
        }
        if outcomes < 2 {
            return Err(Error::InvalidScenario("need at least two outcomes".into()));
        }
        Ok(Self {
            settings_a,
            settings_b,
            outcomes,
        })
    }

    /// The scenario (2, m, n) with the same number of settings for both parties.
    pub fn symmetric(m: usize, n: usize) -> Result<Self> {
        Self::new(m, m, n)
    }

    pub fn len(&self) -> usize {
        self.settings_a * self.settings_b * self.outcomes * self.outcomes
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_balanced(&self) -> bool {
        self.settings_a == self.settings_b
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        let n = self.outcomes;
        ((x * self.settings_b + y) * n + a) * n + b
    }

    /// The scenario with the parties' roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            settings_a: self.settings_b,
            settings_b: self.settings_a,
            outcomes: self.outcomes,
        }
    }

    pub(crate) fn expect_same(&self, other: &Scenario) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            });
        }
        Ok(())
    }

    pub(crate) fn expect_balanced(&self) -> Result<()> {
        if !self.is_balanced() {
            return Err(Error::InvalidScenario(format!(
                "party swap needs equal setting counts, got {self}"
            )));
        }
        Ok(())
    }

    /// Iterates over all `(x, y, a, b)` in storage order.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> {
        let (ma, mb, n) = (self.settings_a, self.settings_b, self.outcomes);
        (0..ma).flat_map(move |x| {
            (0..mb).flat_map(move |y| (0..n).flat_map(move |a| (0..n).map(move |b| (x, y, a, b))))
        })
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_balanced() {
            write!(f, "(2,{},{})", self.settings_a, self.outcomes)
        } else {
            write!(
                f,
                "(2,{}|{},{})",
                self.settings_a, self.settings_b, self.outcomes
            )
        }
    }
}

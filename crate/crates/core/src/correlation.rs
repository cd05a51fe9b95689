use crate::{Error, Result, Scenario};

/// Default tolerance for normalization and no-signaling checks.
pub const VALIDITY_TOL: f64 = 1e-9;
/// Default tolerance for party-symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// A joint conditional distribution `P(a,b|x,y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    scenario: Scenario,
    table: Vec<f64>,
}

impl Correlation {
    /// Wraps a table in storage order; only the shape is checked.
    pub fn new(scenario: Scenario, table: Vec<f64>) -> Result<Self> {
        if table.len() != scenario.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries for {scenario}", scenario.len()),
                found: table.len().to_string(),
            });
        }
        Ok(Self { scenario, table })
    }

    pub fn from_fn(scenario: Scenario, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let table = scenario.indices().map(|(x, y, a, b)| f(x, y, a, b)).collect();
        Self { scenario, table }
    }

    pub fn uniform(scenario: Scenario) -> Self {
        let n = scenario.outcomes as f64;
        Self::from_fn(scenario, |_, _, _, _| 1.0 / (n * n))
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.table
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.table[self.scenario.index(x, y, a, b)]
    }

    /// Alice's marginal `P_A(a|x)`, read off at Bob's setting 0.
    pub fn marginal_a(&self, a: usize, x: usize) -> f64 {
        (0..self.scenario.outcomes).map(|b| self.get(x, 0, a, b)).sum()
    }

    /// Bob's marginal `P_B(b|y)`, read off at Alice's setting 0.
    pub fn marginal_b(&self, b: usize, y: usize) -> f64 {
        (0..self.scenario.outcomes).map(|a| self.get(0, y, a, b)).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        let s = self.scenario;
        let n = s.outcomes;
        if self.table.iter().any(|&p| !(-tol..=1.0 + tol).contains(&p)) {
            return false;
        }
        self.table
            .chunks(n * n)
            .all(|block| (block.iter().sum::<f64>() - 1.0).abs() <= tol)
    }

    pub fn is_no_signaling(&self, tol: f64) -> bool {
        let s = self.scenario;
        let n = s.outcomes;
        for x in 0..s.settings_a {
            for a in 0..n {
                let reference = self.marginal_a(a, x);
                for y in 1..s.settings_b {
                    let m: f64 = (0..n).map(|b| self.get(x, y, a, b)).sum();
                    if (m - reference).abs() > tol {
                        return false;
                    }
                }
            }
        }
        for y in 0..s.settings_b {
            for b in 0..n {
                let reference = self.marginal_b(b, y);
                for x in 1..s.settings_a {
                    let m: f64 = (0..n).map(|a| self.get(x, y, a, b)).sum();
                    if (m - reference).abs() > tol {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.is_normalized(tol) && self.is_no_signaling(tol)
    }

    /// `P'(a,b|x,y) = P(b,a|y,x)`.
    pub fn swap_parties(&self) -> Result<Correlation> {
        self.scenario.expect_balanced()?;
        let s = self.scenario;
        Ok(Self::from_fn(s, |x, y, a, b| self.get(y, x, b, a)))
    }

    /// Max-norm distance to the party-swapped table.
    pub fn asymmetry(&self) -> Result<f64> {
        let swapped = self.swap_parties()?;
        Ok(self.max_distance(&swapped))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry().map(|d| d <= tol).unwrap_or(false)
    }

    pub fn max_distance(&self, other: &Correlation) -> f64 {
        if self.scenario != other.scenario {
            return f64::INFINITY;
        }
        self.table
            .iter()
            .zip(&other.table)
            .fold(0.0, |acc, (p, q)| acc.max((p - q).abs()))
    }

    /// `c·self + (1−c)·other`.
    pub fn mix(&self, c: f64, other: &Correlation) -> Result<Correlation> {
        self.scenario.expect_same(&other.scenario)?;
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(p, q)| c * p + (1.0 - c) * q)
            .collect();
        Ok(Self {
            scenario: self.scenario,
            table,
        })
    }

    pub fn correlators(&self) -> Result<CorrelatorView> {
        CorrelatorView::from_probabilities(self)
    }
}

/// Expectation values `⟨A_x⟩`, `⟨B_y⟩`, `⟨A_x B_y⟩` of a two-outcome
/// correlation, with outcome `a` mapped to the sign `(−1)^a`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorView {
    pub singles_a: Vec<f64>,
    pub singles_b: Vec<f64>,
    /// Row-major `joints[x * settings_b + y]`.
    pub joints: Vec<f64>,
}

impl CorrelatorView {
    pub fn settings_a(&self) -> usize {
        self.singles_a.len()
    }

    pub fn settings_b(&self) -> usize {
        self.singles_b.len()
    }

    pub fn joint(&self, x: usize, y: usize) -> f64 {
        self.joints[x * self.settings_b() + y]
    }

    pub fn from_probabilities(p: &Correlation) -> Result<Self> {
        let s = p.scenario();
        if s.outcomes != 2 {
            return Err(Error::NotDichotomic(s.outcomes));
        }
        let singles_a = (0..s.settings_a)
            .map(|x| p.marginal_a(0, x) - p.marginal_a(1, x))
            .collect();
        let singles_b = (0..s.settings_b)
            .map(|y| p.marginal_b(0, y) - p.marginal_b(1, y))
            .collect();
        let mut joints = Vec::with_capacity(s.settings_a * s.settings_b);
        for x in 0..s.settings_a {
            for y in 0..s.settings_b {
                joints.push(p.get(x, y, 0, 0) - p.get(x, y, 0, 1) - p.get(x, y, 1, 0)
                    + p.get(x, y, 1, 1));
            }
        }
        Ok(Self {
            singles_a,
            singles_b,
            joints,
        })
    }

    /// Inverts [`CorrelatorView::from_probabilities`]; fails if any
    /// reconstructed probability is negative beyond `VALIDITY_TOL`.
    pub fn to_probabilities(&self) -> Result<Correlation> {
        let (ma, mb) = (self.settings_a(), self.settings_b());
        if self.joints.len() != ma * mb {
            return Err(Error::ShapeMismatch {
                expected: format!("{} joint correlators", ma * mb),
                found: self.joints.len().to_string(),
            });
        }
        let s = Scenario::new(ma, mb, 2)?;
        let sign = |k: usize| if k == 0 { 1.0 } else { -1.0 };
        let p = Correlation::from_fn(s, |x, y, a, b| {
            0.25 * (1.0
                + sign(a) * self.singles_a[x]
                + sign(b) * self.singles_b[y]
                + sign(a) * sign(b) * self.joint(x, y))
        });
        for (x, y, a, b) in s.indices() {
            let value = p.get(x, y, a, b);
            if value < -VALIDITY_TOL {
                return Err(Error::InconsistentCorrelators { x, y, a, b, value });
            }
        }
        Ok(p)
    }
}

/// The Tsirelson correlation `P(a,b|x,y) = ¼[1 + (−1)^{xy+a+b}/√2]`.
pub fn tsirelson_correlation() -> Correlation {
    let s = Scenario::symmetric(2, 2).expect("valid scenario");
    Correlation::from_fn(s, |x, y, a, b| {
        let sign = if (x * y + a + b) % 2 == 0 { 1.0 } else { -1.0 };
        0.25 * (1.0 + sign * std::f64::consts::FRAC_1_SQRT_2)
    })
}

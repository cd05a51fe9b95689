use crate::correlation::SYMMETRY_TOL;
use crate::{Correlation, Error, Result, Scenario};

/// A linear Bell functional `I(P) = β·P + offset`.
///
/// Marginal terms are stored on the joint table: `P_A(a|x)` contributes to
/// `β(x, 0, a, ·)` and `P_B(b|y)` to `β(0, y, ·, b)`. With this convention a
/// functional built from party-symmetric terms has a swap-symmetric `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct BellFunctional {
    scenario: Scenario,
    coefficients: Vec<f64>,
    pub offset: f64,
    pub name: String,
    pub known_local_bound: Option<f64>,
}

impl BellFunctional {
    pub fn zeros(scenario: Scenario, name: impl Into<String>) -> Self {
        Self {
            scenario,
            coefficients: vec![0.0; scenario.len()],
            offset: 0.0,
            name: name.into(),
            known_local_bound: None,
        }
    }

    pub fn new(
        scenario: Scenario,
        coefficients: Vec<f64>,
        offset: f64,
        name: impl Into<String>,
    ) -> Result<Self> {
        if coefficients.len() != scenario.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} coefficients for {scenario}", scenario.len()),
                found: coefficients.len().to_string(),
            });
        }
        Ok(Self {
            scenario,
            coefficients,
            offset,
            name: name.into(),
            known_local_bound: None,
        })
    }

    pub fn with_local_bound(mut self, bound: f64) -> Self {
        self.known_local_bound = Some(bound);
        self
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    #[inline]
    pub fn coefficient(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.coefficients[self.scenario.index(x, y, a, b)]
    }

    pub fn add(&mut self, x: usize, y: usize, a: usize, b: usize, value: f64) {
        let i = self.scenario.index(x, y, a, b);
        self.coefficients[i] += value;
    }

    /// Adds `value · P_A(a|x)`.
    pub fn add_marginal_a(&mut self, x: usize, a: usize, value: f64) {
        for b in 0..self.scenario.outcomes {
            self.add(x, 0, a, b, value);
        }
    }

    /// Adds `value · P_B(b|y)`.
    pub fn add_marginal_b(&mut self, y: usize, b: usize, value: f64) {
        for a in 0..self.scenario.outcomes {
            self.add(0, y, a, b, value);
        }
    }

    pub fn evaluate(&self, p: &Correlation) -> Result<f64> {
        self.scenario.expect_same(&p.scenario())?;
        let dot: f64 = self
            .coefficients
            .iter()
            .zip(p.as_slice())
            .map(|(b, q)| b * q)
            .sum();
        Ok(dot + self.offset)
    }

    /// The functional with the parties' roles exchanged.
    pub fn swap_parties(&self) -> Result<BellFunctional> {
        self.scenario.expect_balanced()?;
        let s = self.scenario;
        let coefficients = s
            .indices()
            .map(|(x, y, a, b)| self.coefficient(y, x, b, a))
            .collect();
        Ok(Self {
            coefficients,
            ..self.clone()
        })
    }

    /// Max-norm distance between `β` and its party-swapped image; the offset
    /// is not part of the comparison.
    pub fn asymmetry(&self) -> Result<f64> {
        let swapped = self.swap_parties()?;
        Ok(self
            .coefficients
            .iter()
            .zip(&swapped.coefficients)
            .fold(0.0, |acc, (p, q)| acc.max((p - q).abs())))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_symmetric_within(SYMMETRY_TOL)
    }

    pub fn is_symmetric_within(&self, tol: f64) -> bool {
        self.asymmetry().map(|d| d <= tol).unwrap_or(false)
    }

    /// Applies setting permutations and per-setting outcome permutations.
    ///
    /// The relabeled functional `f'` satisfies `f'(P') = f(P)` where
    /// `P'(a',b'|x',y')` is `P` with `x' = perm_a[x]`, `a' = out_a[x][a]`
    /// and likewise for Bob.
    pub fn relabel(
        &self,
        perm_a: &[usize],
        perm_b: &[usize],
        out_a: &[Vec<usize>],
        out_b: &[Vec<usize>],
    ) -> Result<BellFunctional> {
        let s = self.scenario;
        let ok = perm_a.len() == s.settings_a
            && perm_b.len() == s.settings_b
            && out_a.len() == s.settings_a
            && out_b.len() == s.settings_b;
        if !ok {
            return Err(Error::InvalidParameter("relabeling has wrong shape".into()));
        }
        let mut out = Self {
            coefficients: vec![0.0; s.len()],
            ..self.clone()
        };
        for (x, y, a, b) in s.indices() {
            let v = self.coefficient(x, y, a, b);
            out.add(perm_a[x], perm_b[y], out_a[x][a], out_b[y][b], v);
        }
        Ok(out)
    }

    /// Scales all coefficients and the offset, e.g. to flip the sign.
    pub fn scaled(&self, factor: f64) -> BellFunctional {
        Self {
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
            offset: self.offset * factor,
            known_local_bound: None,
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0.0)
    }
}

/// A two-outcome functional written with correlators.
///
/// `⟨A_x⟩ = Σ_a (−1)^a P_A(a|x)` and likewise for Bob and products; this is
/// the only sign convention used in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorForm {
    pub settings_a: usize,
    pub settings_b: usize,
    pub singles_a: Vec<f64>,
    pub singles_b: Vec<f64>,
    pub joints: Vec<f64>,
    pub offset: f64,
}

impl CorrelatorForm {
    pub fn new(settings_a: usize, settings_b: usize) -> Self {
        Self {
            settings_a,
            settings_b,
            singles_a: vec![0.0; settings_a],
            singles_b: vec![0.0; settings_b],
            joints: vec![0.0; settings_a * settings_b],
            offset: 0.0,
        }
    }

    pub fn joint(mut self, x: usize, y: usize, w: f64) -> Self {
        self.joints[x * self.settings_b + y] += w;
        self
    }

    pub fn single_a(mut self, x: usize, w: f64) -> Self {
        self.singles_a[x] += w;
        self
    }

    pub fn single_b(mut self, y: usize, w: f64) -> Self {
        self.singles_b[y] += w;
        self
    }

    pub fn offset(mut self, c: f64) -> Self {
        self.offset += c;
        self
    }

    pub fn into_functional(self, name: impl Into<String>) -> Result<BellFunctional> {
        let s = Scenario::new(self.settings_a, self.settings_b, 2)?;
        let mut f = BellFunctional::zeros(s, name);
        let sign = |k: usize| if k == 0 { 1.0 } else { -1.0 };
        for x in 0..s.settings_a {
            for a in 0..2 {
                f.add_marginal_a(x, a, sign(a) * self.singles_a[x]);
            }
        }
        for y in 0..s.settings_b {
            for b in 0..2 {
                f.add_marginal_b(y, b, sign(b) * self.singles_b[y]);
            }
        }
        for x in 0..s.settings_a {
            for y in 0..s.settings_b {
                let w = self.joints[x * s.settings_b + y];
                for a in 0..2 {
                    for b in 0..2 {
                        f.add(x, y, a, b, sign(a) * sign(b) * w);
                    }
                }
            }
        }
        f.offset = self.offset;
        Ok(f)
    }

    /// Evaluates the correlator expression directly.
    pub fn evaluate(&self, c: &crate::CorrelatorView) -> f64 {
        let singles: f64 = self
            .singles_a
            .iter()
            .zip(&c.singles_a)
            .chain(self.singles_b.iter().zip(&c.singles_b))
            .map(|(w, v)| w * v)
            .sum();
        let joints: f64 = self.joints.iter().zip(&c.joints).map(|(w, v)| w * v).sum();
        singles + joints + self.offset
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::tsirelson_correlation;

    fn chsh() -> BellFunctional {
        CorrelatorForm::new(2, 2)
            .joint(0, 0, 1.0)
            .joint(0, 1, 1.0)
            .joint(1, 0, 1.0)
            .joint(1, 1, -1.0)
            .into_functional("chsh")
            .unwrap()
    }

    #[test]
    fn chsh_on_tsirelson_point() {
        let v = chsh().evaluate(&tsirelson_correlation()).unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn chsh_coefficients_have_sign_pattern() {
        let f = chsh();
        for (x, y, a, b) in f.scenario().indices() {
            let e = if (x * y + a + b) % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(f.coefficient(x, y, a, b), e);
        }
        assert!(f.is_symmetric());
    }

    #[test]
    fn constant_functional() {
        let f = CorrelatorForm::new(2, 2).offset(1.5).into_functional("c").unwrap();
        assert!(f.is_zero());
        let p = Correlation::uniform(f.scenario());
        assert_eq!(f.evaluate(&p).unwrap(), 1.5);
    }

    #[test]
    fn uniform_gives_mean_coefficient() {
        let f = chsh();
        let p = Correlation::uniform(f.scenario());
        let total: f64 = f.coefficients().iter().sum();
        assert!((f.evaluate(&p).unwrap() - total / 4.0).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let f = chsh();
        let p = Correlation::uniform(Scenario::symmetric(3, 2).unwrap());
        assert!(matches!(f.evaluate(&p), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn relabeling_bob_settings_breaks_symmetry() {
        let g = chsh()
            .relabel(&[0, 1], &[1, 0], &vec![vec![0, 1]; 2], &vec![vec![0, 1]; 2])
            .unwrap();
        assert!(!g.is_symmetric());
    }
}

//! NPA moment-matrix relaxations of the quantum set.
//!
//! Generators are the projectors `A_{x,a}` and `B_{y,b}` for outcomes
//! `0..n−1` only; the last outcome is written as `I − Σ` in the objective.
//! The relaxation is real: a word and its adjoint share one variable, which
//! is exact for real functionals since `Re Γ` of any moment matrix is again a
//! valid moment matrix.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use bellforge_sdp::{solve, SdpOptions, SdpProblem, SdpStatus, SparseSym};
use nalgebra::DMatrix;

use crate::linalg::{self, CMatrix};
use crate::quantum::QuantumStrategy;
use crate::{BellFunctional, Error, Result, Scenario};

/// One projector: `(setting, outcome)`.
pub type Letter = (u16, u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NpaLevel {
    One,
    /// Level 1 plus all products `A_{x,a} B_{y,b}`.
    OneAb,
    Two,
    /// Level 2 plus the length-3 words `A A' B` and `A B B'`.
    TwoAab,
}

impl FromStr for NpaLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1" => Ok(Self::One),
            "1ab" | "1+ab" => Ok(Self::OneAb),
            "2" => Ok(Self::Two),
            "2aab" | "2+aab" => Ok(Self::TwoAab),
            _ => Err(Error::InvalidParameter(format!(
                "unknown NPA level `{s}` (expected 1, 1ab, 2 or 2aab)"
            ))),
        }
    }
}

impl fmt::Display for NpaLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::One => "1",
            Self::OneAb => "1+AB",
            Self::Two => "2",
            Self::TwoAab => "2+AAB",
        })
    }
}

/// A product of Alice's projectors times a product of Bob's.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    pub alice: Vec<Letter>,
    pub bob: Vec<Letter>,
}

/// Applies idempotence and same-setting orthogonality; `None` is the zero
/// operator. A single left-to-right pass reaches the fixpoint because a
/// letter is only ever dropped, never cancelled against its neighbour.
fn reduce_party(letters: &[Letter]) -> Option<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        match out.last() {
            Some(&top) if top == l => {}
            Some(&top) if top.0 == l.0 => return None,
            _ => out.push(l),
        }
    }
    Some(out)
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn is_identity(&self) -> bool {
        self.alice.is_empty() && self.bob.is_empty()
    }

    pub fn len(&self) -> usize {
        self.alice.len() + self.bob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn adjoint(&self) -> Word {
        Word {
            alice: self.alice.iter().rev().copied().collect(),
            bob: self.bob.iter().rev().copied().collect(),
        }
    }

    pub fn swapped(&self) -> Word {
        Word {
            alice: self.bob.clone(),
            bob: self.alice.clone(),
        }
    }

    pub fn reduced(&self) -> Option<Word> {
        Some(Word {
            alice: reduce_party(&self.alice)?,
            bob: reduce_party(&self.bob)?,
        })
    }

    /// `u† v`, reduced.
    pub fn adjoint_product(u: &Word, v: &Word) -> Option<Word> {
        let mut w = u.adjoint();
        w.alice.extend_from_slice(&v.alice);
        w.bob.extend_from_slice(&v.bob);
        w.reduced()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        for (x, a) in &self.alice {
            write!(f, "A{x}|{a}")?;
        }
        for (y, b) in &self.bob {
            write!(f, "B{y}|{b}")?;
        }
        Ok(())
    }
}

/// Content of one moment-matrix entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Moment {
    Zero,
    One,
    Var(usize),
}

#[derive(Debug, Clone)]
pub struct MomentMatrix {
    pub scenario: Scenario,
    pub level: NpaLevel,
    pub monomials: Vec<Word>,
    /// Row-major `size × size`.
    entries: Vec<Moment>,
    /// Representative word of each variable.
    pub variables: Vec<Word>,
    index: HashMap<Word, usize>,
    /// Whether variables are merged along party-swap orbits.
    pub twirled: bool,
}

fn party_letters(settings: usize, outcomes: usize) -> Vec<Letter> {
    let mut v = Vec::new();
    for x in 0..settings {
        for a in 0..outcomes - 1 {
            v.push((x as u16, a as u16));
        }
    }
    v
}

fn monomials(s: Scenario, level: NpaLevel) -> Vec<Word> {
    let la = party_letters(s.settings_a, s.outcomes);
    let lb = party_letters(s.settings_b, s.outcomes);
    let mut out = vec![Word::identity()];
    out.extend(la.iter().map(|&l| Word { alice: vec![l], bob: vec![] }));
    out.extend(lb.iter().map(|&l| Word { alice: vec![], bob: vec![l] }));
    if level != NpaLevel::One {
        for &a in &la {
            for &b in &lb {
                out.push(Word { alice: vec![a], bob: vec![b] });
            }
        }
    }
    if matches!(level, NpaLevel::Two | NpaLevel::TwoAab) {
        let pairs = |ls: &[Letter]| -> Vec<Vec<Letter>> {
            let mut v = Vec::new();
            for &p in ls {
                for &q in ls {
                    if p.0 != q.0 {
                        v.push(vec![p, q]);
                    }
                }
            }
            v
        };
        out.extend(pairs(&la).into_iter().map(|w| Word { alice: w, bob: vec![] }));
        out.extend(pairs(&lb).into_iter().map(|w| Word { alice: vec![], bob: w }));
        if level == NpaLevel::TwoAab {
            for pa in pairs(&la) {
                out.extend(lb.iter().map(|&b| Word { alice: pa.clone(), bob: vec![b] }));
            }
            for pb in pairs(&lb) {
                out.extend(la.iter().map(|&a| Word { alice: vec![a], bob: pb.clone() }));
            }
        }
    }
    out
}

impl MomentMatrix {
    fn build(scenario: Scenario, level: NpaLevel, twirled: bool) -> Result<Self> {
        if twirled {
            scenario.expect_balanced()?;
        }
        let monomials = monomials(scenario, level);
        let n = monomials.len();
        let mut m = Self {
            scenario,
            level,
            monomials,
            entries: vec![Moment::Zero; n * n],
            variables: Vec::new(),
            index: HashMap::new(),
            twirled,
        };
        for i in 0..n {
            for j in i..n {
                let e = match Word::adjoint_product(&m.monomials[i], &m.monomials[j]) {
                    None => Moment::Zero,
                    Some(w) if w.is_identity() => Moment::One,
                    Some(w) => {
                        let rep = m.representative(&w);
                        let next = m.variables.len();
                        let k = *m.index.entry(rep.clone()).or_insert(next);
                        if k == next {
                            m.variables.push(rep);
                        }
                        Moment::Var(k)
                    }
                };
                m.entries[i * n + j] = e;
                m.entries[j * n + i] = e;
            }
        }
        Ok(m)
    }

    /// Smallest word in the orbit of a reduced word under adjoint and, when
    /// twirled, the party swap.
    fn representative(&self, w: &Word) -> Word {
        let mut best = w.clone();
        let mut consider = |c: Word| {
            if c < best {
                best = c;
            }
        };
        consider(w.adjoint());
        if self.twirled {
            let s = w.swapped();
            consider(s.adjoint());
            consider(s);
        }
        best
    }

    pub fn size(&self) -> usize {
        self.monomials.len()
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> Moment {
        self.entries[i * self.size() + j]
    }

    /// Variable carrying an arbitrary word, if it appears in the matrix.
    pub fn moment_of(&self, w: &Word) -> Option<Moment> {
        match w.reduced() {
            None => Some(Moment::Zero),
            Some(r) if r.is_identity() => Some(Moment::One),
            Some(r) => self.index.get(&self.representative(&r)).map(|&k| Moment::Var(k)),
        }
    }

    /// `Γ` for given variable values.
    pub fn fill(&self, values: &[f64]) -> DMatrix<f64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |i, j| match self.entry(i, j) {
            Moment::Zero => 0.0,
            Moment::One => 1.0,
            Moment::Var(k) => values[k],
        })
    }
}

pub fn npa_moment_structure(scenario: Scenario, level: NpaLevel) -> Result<MomentMatrix> {
    MomentMatrix::build(scenario, level, false)
}

/// Merges variables along orbits of the party swap.
pub fn twirl(m: &MomentMatrix) -> Result<MomentMatrix> {
    MomentMatrix::build(m.scenario, m.level, true)
}

/// Writes `f` as `c0 + Σ_k c_k y_k` over the variables of `m`.
pub fn objective(f: &BellFunctional, m: &MomentMatrix) -> Result<(f64, Vec<f64>)> {
    let s = f.scenario();
    s.expect_same(&m.scenario)?;
    let last = s.outcomes - 1;
    // Projector for outcome `a` of setting `x` as (coefficient, generator).
    let expand = |x: usize, a: usize| -> Vec<(f64, Option<Letter>)> {
        if a < last {
            vec![(1.0, Some((x as u16, a as u16)))]
        } else {
            let mut v = vec![(1.0, None)];
            v.extend((0..last).map(|k| (-1.0, Some((x as u16, k as u16)))));
            v
        }
    };
    let mut c0 = f.offset;
    let mut coeffs = vec![0.0; m.num_variables()];
    for (x, y, a, b) in s.indices() {
        let beta = f.coefficient(x, y, a, b);
        if beta == 0.0 {
            continue;
        }
        for (ca, la) in expand(x, a) {
            for (cb, lb) in expand(y, b) {
                let w = Word {
                    alice: la.into_iter().collect(),
                    bob: lb.into_iter().collect(),
                };
                let v = beta * ca * cb;
                match m.moment_of(&w) {
                    Some(Moment::One) => c0 += v,
                    Some(Moment::Var(k)) => coeffs[k] += v,
                    Some(Moment::Zero) => {}
                    None => {
                        return Err(Error::Numerical(format!("word {w} missing from moment matrix")))
                    }
                }
            }
        }
    }
    Ok((c0, coeffs))
}

/// The assembled SDP. `Γ(y) = F_0 + Σ_k y_k F_k ⪰ 0` is the dual slack of a
/// standard-form program with `A_k = F_k`, `C = −F_0` and `b = −c`, so the
/// bound is `constant − primal objective`.
#[derive(Debug, Clone)]
pub struct NpaProgram {
    pub moments: MomentMatrix,
    pub problem: SdpProblem,
    pub constant: f64,
}

impl NpaProgram {
    pub fn new(f: &BellFunctional, level: NpaLevel, symmetric: bool) -> Result<Self> {
        let mut moments = npa_moment_structure(f.scenario(), level)?;
        if symmetric {
            moments = twirl(&moments)?;
        }
        let (constant, coeffs) = objective(f, &moments)?;
        let n = moments.size();
        let mut fs = vec![SparseSym::new(); moments.num_variables()];
        let mut neg_f0 = SparseSym::new();
        for i in 0..n {
            for j in i..n {
                match moments.entry(i, j) {
                    Moment::Zero => {}
                    Moment::One => neg_f0.push(0, i, j, -1.0),
                    Moment::Var(k) => fs[k].push(0, i, j, 1.0),
                }
            }
        }
        let mut problem = SdpProblem::new(vec![n]);
        problem.objective = neg_f0;
        for (fk, ck) in fs.into_iter().zip(&coeffs) {
            problem.add_constraint(fk, -ck);
        }
        Ok(Self {
            moments,
            problem,
            constant,
        })
    }

    pub fn to_sdpa(&self) -> String {
        self.problem.to_sdpa_sparse()
    }

    pub fn solve(&self) -> Result<NpaSolution> {
        let opts = SdpOptions {
            max_iterations: 200,
            ..SdpOptions::default()
        };
        let sol = solve(&self.problem, &opts)?;
        if sol.status != SdpStatus::Optimal {
            return Err(Error::Numerical(format!(
                "moment SDP ended with status {:?} after {} iterations",
                sol.status, sol.iterations
            )));
        }
        Ok(NpaSolution {
            value: self.constant - sol.primal_objective,
            dual_value: self.constant - sol.dual_objective,
            moments: sol.y,
            iterations: sol.iterations,
        })
    }
}

#[derive(Debug, Clone)]
pub struct NpaSolution {
    /// Upper bound from the primal (certificate) side.
    pub value: f64,
    /// Value attained by the optimal moment assignment.
    pub dual_value: f64,
    pub moments: Vec<f64>,
    pub iterations: usize,
}

/// Upper bound on `f` over quantum correlations, or over symmetric quantum
/// correlations when `symmetric` is set.
pub fn npa_upper_bound(f: &BellFunctional, level: NpaLevel, symmetric: bool) -> Result<f64> {
    Ok(NpaProgram::new(f, level, symmetric)?.solve()?.value)
}

fn party_operator(
    letters: &[Letter],
    ms: &[crate::quantum::Measurement],
    dim: usize,
) -> CMatrix {
    letters.iter().fold(linalg::identity(dim), |acc, &(x, a)| {
        acc * ms[x as usize].effect(a as usize)
    })
}

/// `⟨w⟩` evaluated directly on a strategy.
pub fn word_expectation(s: &QuantumStrategy, w: &Word) -> crate::linalg::C64 {
    let (da, db) = s.dims();
    let oa = party_operator(&w.alice, &s.alice, da);
    let ob = party_operator(&w.bob, &s.bob, db);
    linalg::trace_product(&s.state.density(), &oa.kronecker(&ob))
}

/// Real part of the moment matrix realised by a projective strategy, with
/// each entry computed from the representative word of its variable.
pub fn strategy_moment_matrix(s: &QuantumStrategy, m: &MomentMatrix) -> Result<DMatrix<f64>> {
    s.scenario().expect_same(&m.scenario)?;
    if !s.all_projective() {
        return Err(Error::InvalidMeasurement(
            "moment matrices need projective measurements".into(),
        ));
    }
    let values: Vec<f64> = m.variables.iter().map(|w| word_expectation(s, w).re).collect();
    Ok(m.fill(&values))
}

/// Direct evaluation of `Re⟨u_i† u_j⟩` without going through variables.
pub fn strategy_gram_matrix(s: &QuantumStrategy, m: &MomentMatrix) -> DMatrix<f64> {
    let n = m.size();
    DMatrix::from_fn(n, n, |i, j| {
        let mut w = m.monomials[i].adjoint();
        w.alice.extend_from_slice(&m.monomials[j].alice);
        w.bob.extend_from_slice(&m.monomials[j].bob);
        word_expectation(s, &w).re
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_rules() {
        let w = Word {
            alice: vec![(0, 0), (0, 0), (1, 0)],
            bob: vec![],
        };
        assert_eq!(w.reduced().unwrap().alice, vec![(0, 0), (1, 0)]);
        let z = Word {
            alice: vec![(0, 0), (0, 1)],
            bob: vec![],
        };
        assert!(z.reduced().is_none());
    }

    #[test]
    fn monomial_counts() {
        let s = Scenario::symmetric(2, 2).unwrap();
        assert_eq!(npa_moment_structure(s, NpaLevel::One).unwrap().size(), 5);
        assert_eq!(npa_moment_structure(s, NpaLevel::OneAb).unwrap().size(), 9);
        let s3 = Scenario::symmetric(2, 3).unwrap();
        assert_eq!(npa_moment_structure(s3, NpaLevel::One).unwrap().size(), 9);
    }

    #[test]
    fn level_parsing() {
        assert_eq!("1ab".parse::<NpaLevel>().unwrap(), NpaLevel::OneAb);
        assert!("3".parse::<NpaLevel>().is_err());
    }
}

use nalgebra::DMatrix;

use crate::{BlockMatrix, SdpError};

/// One stored coefficient of a sparse symmetric block matrix.
///
/// Entries satisfy `row <= col`; an off-diagonal entry stands for both
/// `(row, col)` and `(col, row)`. Repeated coordinates add up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseSym {
    entries: Vec<Entry>,
}

impl SparseSym {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `value` at `(row, col)` and, off the diagonal, at `(col, row)`.
    pub fn push(&mut self, block: usize, row: usize, col: usize, value: f64) {
        if value == 0.0 {
            return;
        }
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        self.entries.push(Entry {
            block,
            row,
            col,
            value,
        });
    }

    /// Adds every upper-triangle coefficient of a dense symmetric block.
    pub fn push_dense(&mut self, block: usize, mat: &DMatrix<f64>, scale: f64) {
        for c in 0..mat.ncols() {
            for r in 0..=c {
                self.push(block, r, c, scale * 0.5 * (mat[(r, c)] + mat[(c, r)]));
            }
        }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `tr(self · x)`.
    pub fn dot(&self, x: &BlockMatrix) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                let v = x.blocks[e.block][(e.row, e.col)];
                if e.row == e.col {
                    e.value * v
                } else {
                    2.0 * e.value * v
                }
            })
            .sum()
    }

    /// `out += alpha · self`.
    pub fn add_to(&self, alpha: f64, out: &mut BlockMatrix) {
        for e in &self.entries {
            let b = &mut out.blocks[e.block];
            b[(e.row, e.col)] += alpha * e.value;
            if e.row != e.col {
                b[(e.col, e.row)] += alpha * e.value;
            }
        }
    }

    pub fn to_dense(&self, sizes: &[usize]) -> BlockMatrix {
        let mut out = BlockMatrix::zeros(sizes);
        self.add_to(1.0, &mut out);
        out
    }

    pub fn frobenius_norm(&self, sizes: &[usize]) -> f64 {
        self.to_dense(sizes).norm()
    }
}

/// A block-diagonal SDP in standard primal form; see the crate docs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SdpProblem {
    pub block_sizes: Vec<usize>,
    pub objective: SparseSym,
    pub constraints: Vec<SparseSym>,
    pub rhs: Vec<f64>,
}

impl SdpProblem {
    pub fn new(block_sizes: Vec<usize>) -> Self {
        Self {
            block_sizes,
            ..Self::default()
        }
    }

    pub fn add_constraint(&mut self, a: SparseSym, b: f64) -> usize {
        self.constraints.push(a);
        self.rhs.push(b);
        self.constraints.len() - 1
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn total_dim(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        if self.block_sizes.is_empty() || self.block_sizes.contains(&0) {
            return Err(SdpError::Malformed("empty block structure".into()));
        }
        if self.constraints.len() != self.rhs.len() {
            return Err(SdpError::Malformed(format!(
                "{} constraints but {} right-hand sides",
                self.constraints.len(),
                self.rhs.len()
            )));
        }
        let check = |m: &SparseSym, what: &str| -> Result<(), SdpError> {
            for e in m.entries() {
                let ok = e.block < self.block_sizes.len() && e.col < self.block_sizes[e.block];
                if !ok || !e.value.is_finite() {
                    return Err(SdpError::Malformed(format!(
                        "{what}: entry {e:?} outside block structure {:?}",
                        self.block_sizes
                    )));
                }
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for (i, a) in self.constraints.iter().enumerate() {
            check(a, &format!("constraint {i}"))?;
        }
        if self.rhs.iter().any(|b| !b.is_finite()) {
            return Err(SdpError::Malformed("non-finite right-hand side".into()));
        }
        Ok(())
    }

    /// Drops constraints that are linear combinations of earlier ones.
    ///
    /// Returns the number of constraints removed. Fails if a dependent
    /// constraint disagrees with the combination of right-hand sides by more
    /// than `tol` (relative).
    pub fn remove_redundant_constraints(&mut self, tol: f64) -> Result<usize, SdpError> {
        // Coordinates chosen so the Euclidean inner product equals the trace
        // inner product: diagonal entries as-is, off-diagonal scaled by √2.
        let offsets: Vec<usize> = self
            .block_sizes
            .iter()
            .scan(0, |acc, &n| {
                let o = *acc;
                *acc += n * (n + 1) / 2;
                Some(o)
            })
            .collect();
        let dim: usize = self.block_sizes.iter().map(|&n| n * (n + 1) / 2).sum();
        let vectorize = |a: &SparseSym| -> Vec<f64> {
            let mut v = vec![0.0; dim];
            for e in a.entries() {
                let idx = offsets[e.block] + e.col * (e.col + 1) / 2 + e.row;
                v[idx] += if e.row == e.col {
                    e.value
                } else {
                    std::f64::consts::SQRT_2 * e.value
                };
            }
            v
        };

        let mut basis: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut keep = Vec::with_capacity(self.constraints.len());
        for (i, a) in self.constraints.iter().enumerate() {
            let mut v = vectorize(a);
            let mut r = self.rhs[i];
            let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for (q, qb) in &basis {
                    let c: f64 = q.iter().zip(&v).map(|(x, y)| x * y).sum();
                    if c != 0.0 {
                        for (vi, qi) in v.iter_mut().zip(q) {
                            *vi -= c * qi;
                        }
                        r -= c * qb;
                    }
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= tol * scale.max(1.0) {
                if r.abs() > tol.sqrt() * (1.0 + self.rhs[i].abs()) {
                    return Err(SdpError::InconsistentConstraints {
                        index: i,
                        residual: r,
                    });
                }
                keep.push(false);
            } else {
                v.iter_mut().for_each(|x| *x /= norm);
                basis.push((v, r / norm));
                keep.push(true);
            }
        }

        let removed = keep.iter().filter(|k| !**k).count();
        let mut it = keep.iter();
        self.constraints.retain(|_| *it.next().unwrap());
        let mut it = keep.iter();
        self.rhs.retain(|_| *it.next().unwrap());
        Ok(removed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_counts_off_diagonal_twice() {
        let mut a = SparseSym::new();
        a.push(0, 1, 0, 1.5);
        let x = BlockMatrix {
            blocks: vec![DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0])],
        };
        assert_eq!(a.dot(&x), 6.0);
        assert_eq!(a.to_dense(&[2]).blocks[0][(0, 1)], 1.5);
    }

    #[test]
    fn redundant_constraint_is_dropped() {
        let mut p = SdpProblem::new(vec![2]);
        let mut a = SparseSym::new();
        a.push(0, 0, 0, 1.0);
        let mut b = SparseSym::new();
        b.push(0, 1, 1, 1.0);
        let mut c = SparseSym::new();
        c.push(0, 0, 0, 2.0);
        c.push(0, 1, 1, 2.0);
        p.add_constraint(a, 0.25);
        p.add_constraint(b, 0.75);
        p.add_constraint(c, 2.0);
        assert_eq!(p.remove_redundant_constraints(1e-10), Ok(1));
        assert_eq!(p.num_constraints(), 2);
    }

    #[test]
    fn inconsistent_constraints_are_reported() {
        let mut p = SdpProblem::new(vec![1]);
        let mut a = SparseSym::new();
        a.push(0, 0, 0, 1.0);
        p.add_constraint(a.clone(), 1.0);
        p.add_constraint(a, 2.0);
        assert!(matches!(
            p.remove_redundant_constraints(1e-10),
            Err(SdpError::InconsistentConstraints { index: 1, .. })
        ));
    }

    #[test]
    fn validate_rejects_out_of_range() {
        let mut p = SdpProblem::new(vec![2]);
        p.objective.push(0, 0, 2, 1.0);
        assert!(p.validate().is_err());
    }
}

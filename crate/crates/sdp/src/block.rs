use nalgebra::DMatrix;

/// A block-diagonal real symmetric matrix stored as its dense diagonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    pub blocks: Vec<DMatrix<f64>>,
}

impl BlockMatrix {
    pub fn zeros(sizes: &[usize]) -> Self {
        Self {
            blocks: sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect(),
        }
    }

    pub fn scaled_identity(sizes: &[usize], scale: f64) -> Self {
        Self {
            blocks: sizes
                .iter()
                .map(|&n| DMatrix::identity(n, n) * scale)
                .collect(),
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    /// Frobenius inner product `tr(self · other)`.
    pub fn dot(&self, other: &BlockMatrix) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.dot(b))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    pub fn axpy(&mut self, alpha: f64, other: &BlockMatrix) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a += b * alpha;
        }
    }

    pub fn map_blocks(&self, f: impl Fn(usize, &DMatrix<f64>) -> DMatrix<f64>) -> BlockMatrix {
        BlockMatrix {
            blocks: self
                .blocks
                .iter()
                .enumerate()
                .map(|(k, b)| f(k, b))
                .collect(),
        }
    }

    pub fn symmetrize(&mut self) {
        for b in &mut self.blocks {
            let t = b.transpose();
            *b += t;
            *b *= 0.5;
        }
    }

    /// Smallest eigenvalue over all blocks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .filter(|b| b.nrows() > 0)
            .map(|b| b.clone().symmetric_eigenvalues().min())
            .fold(f64::INFINITY, f64::min)
    }
}

//! Rank data, parities and the affine Cartan tables of `sl(m|n)`.

use serde::{Deserialize, Serialize};

use crate::scalar::Coefficient;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FoundationError {
    #[error("rank (m|n) = ({m}|{n}) violates the hypothesis m, n >= 2 and m != n")]
    InvalidRank { m: usize, n: usize },
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
}

/// The pair `(m, n)` of `gl(m|n)`.
///
/// [`RankData::new`] enforces the Yangian hypothesis `m, n >= 2`, `m != n`.
/// [`RankData::superalgebra`] accepts any `m + n >= 1`, which is all the
/// loop superalgebra itself needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankData {
    m: usize,
    n: usize,
}

impl RankData {
    pub fn new(m: usize, n: usize) -> Result<Self, FoundationError> {
        if m < 2 || n < 2 || m == n {
            return Err(FoundationError::InvalidRank { m, n });
        }
        Ok(RankData { m, n })
    }

    pub fn superalgebra(m: usize, n: usize) -> Self {
        assert!(m + n >= 1, "empty rank");
        RankData { m, n }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `m + n`: matrix size, and also the number of Dynkin nodes.
    pub fn size(&self) -> usize {
        self.m + self.n
    }

    /// Parity of a row/column index `1..=m+n`, or of a node `0..=m+n` with
    /// `p(0) = p(m+n)`.
    pub fn parity(&self, i: usize) -> Result<u8, FoundationError> {
        let size = self.size();
        if i > size {
            return Err(FoundationError::IndexOutOfRange { index: i, max: size });
        }
        Ok(self.p(i))
    }

    /// Unchecked parity; `i` must lie in `0..=m+n`.
    #[inline]
    pub fn p(&self, i: usize) -> u8 {
        if i == 0 || i > self.m {
            1
        } else {
            0
        }
    }

    /// `(-1)^{p(i)}`.
    #[inline]
    pub fn sign(&self, i: usize) -> i64 {
        if self.p(i) == 0 {
            1
        } else {
            -1
        }
    }

    /// Parity of the matrix unit `E_{i,j}`.
    #[inline]
    pub fn unit_parity(&self, i: usize, j: usize) -> u8 {
        (self.p(i) + self.p(j)) % 2
    }

    fn check_node(&self, i: usize) -> Result<(), FoundationError> {
        if i >= self.size() {
            Err(FoundationError::IndexOutOfRange {
                index: i,
                max: self.size() - 1,
            })
        } else {
            Ok(())
        }
    }

    /// Symmetric Cartan entry `a_ij` of the affine diagram.
    pub fn cartan_a(&self, i: usize, j: usize) -> Result<i64, FoundationError> {
        self.check_node(i)?;
        self.check_node(j)?;
        Ok(self.a(i, j))
    }

    pub(crate) fn a(&self, i: usize, j: usize) -> i64 {
        let last = self.size() - 1;
        if i == j {
            self.sign(i) + self.sign(i + 1)
        } else if j == i + 1 {
            -self.sign(i + 1)
        } else if i == j + 1 {
            -self.sign(i)
        } else if (i, j) == (0, last) || (i, j) == (last, 0) {
            1
        } else {
            0
        }
    }

    /// Skew-symmetric table `m_ij`: `(−1)^{p(i)}` for `i = j+1`,
    /// `−(−1)^{p(i+1)}` for `j = i+1`, `∓1` on the affine corner.
    pub fn cartan_m(&self, i: usize, j: usize) -> Result<i64, FoundationError> {
        self.check_node(i)?;
        self.check_node(j)?;
        Ok(self.mm(i, j))
    }

    pub(crate) fn mm(&self, i: usize, j: usize) -> i64 {
        let last = self.size() - 1;
        if i == j + 1 {
            self.sign(i)
        } else if j == i + 1 {
            -self.sign(i + 1)
        } else if (i, j) == (0, last) {
            -1
        } else if (i, j) == (last, 0) {
            1
        } else {
            0
        }
    }

    /// The variant with the two off-diagonal cases exchanged:
    /// `−(−1)^{p(i+1)}` for `i = j+1`, `(−1)^{p(i)}` for `j = i+1`.
    /// It is not skew-symmetric and the evaluation map does not satisfy the
    /// presentation with it.
    pub fn cartan_m_printed(&self, i: usize, j: usize) -> Result<i64, FoundationError> {
        self.check_node(i)?;
        self.check_node(j)?;
        let last = self.size() - 1;
        Ok(if i == j + 1 {
            -self.sign(i + 1)
        } else if j == i + 1 {
            self.sign(i)
        } else if (i, j) == (0, last) {
            -1
        } else if (i, j) == (last, 0) {
            1
        } else {
            0
        })
    }

    /// Odd Dynkin nodes: `0` and `m`.
    pub fn is_odd_node(&self, i: usize) -> bool {
        i == 0 || i == self.m
    }

    /// Node successor `i + 1` read cyclically.
    pub fn next_node(&self, i: usize) -> usize {
        (i + 1) % self.size()
    }

    /// Node predecessor `i - 1` read cyclically.
    pub fn prev_node(&self, i: usize) -> usize {
        (i + self.size() - 1) % self.size()
    }

    /// Nodes `1..m+n` with `p(i) = p(i+1)`, in increasing order.
    pub fn same_parity_nodes(&self) -> Vec<usize> {
        (1..self.size()).filter(|&i| self.p(i) == self.p(i + 1)).collect()
    }
}

/// Indicator `delta(i <= j)` as a scalar.
pub fn delta_le<S: Coefficient>(i: i64, j: i64) -> S {
    if i <= j {
        S::one()
    } else {
        S::zero()
    }
}

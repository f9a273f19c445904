use crate::error::{Error, Result};
use crate::scalar::Weight;

/// Square matrix of pairwise win weights with a mask of compared pairs.
///
/// `get(i, j)` is the weight (count or probability) of `i` beating `j`.
/// Unsampled pairs always hold zero in both directions.
#[derive(Clone, Debug, PartialEq)]
pub struct WinMatrix<T = f64> {
    n: usize,
    w: Vec<T>,
    sampled: Vec<bool>,
}

impl<T: Weight> WinMatrix<T> {
    /// An `n`×`n` matrix with no sampled pairs.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            w: vec![T::zero(); n * n],
            sampled: vec![false; n * n],
        }
    }

    /// Builds a matrix from dense rows. A pair counts as sampled when at
    /// least one direction carries positive weight. Diagonal entries must be
    /// zero.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::new(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::usage(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row[i] != T::zero() {
                return Err(Error::usage(format!("diagonal entry ({i},{i}) is nonzero")));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if a < T::zero() || b < T::zero() {
                    return Err(Error::usage(format!("negative weight at pair ({i},{j})")));
                }
                if a > T::zero() || b > T::zero() {
                    m.set_pair(i, j, a, b)?;
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.w[i * self.n + j]
    }

    #[inline]
    pub fn is_sampled(&self, i: usize, j: usize) -> bool {
        self.sampled[i * self.n + j]
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::usage(format!(
                "pair ({i},{j}) out of range for n = {}",
                self.n
            )));
        }
        if i == j {
            return Err(Error::usage(format!("self-comparison ({i},{i})")));
        }
        Ok(())
    }

    /// Records a comparison between `i` and `j` with both directed weights.
    pub fn set_pair(&mut self, i: usize, j: usize, w_ij: T, w_ji: T) -> Result<()> {
        self.check_pair(i, j)?;
        if w_ij < T::zero() || w_ji < T::zero() {
            return Err(Error::usage(format!("negative weight at pair ({i},{j})")));
        }
        let n = self.n;
        self.w[i * n + j] = w_ij;
        self.w[j * n + i] = w_ji;
        self.sampled[i * n + j] = true;
        self.sampled[j * n + i] = true;
        Ok(())
    }

    /// Records a probability `p` of `i` beating `j`, with `1 - p` for the
    /// reverse direction.
    pub fn set_probability(&mut self, i: usize, j: usize, p: T) -> Result<()> {
        if p < T::zero() || p > T::one() {
            return Err(Error::usage(format!("probability {p:?} outside [0, 1]")));
        }
        self.set_pair(i, j, p, T::one() - p)
    }

    /// Unordered sampled pairs `(i, j)` with `i < j`, in row-major order.
    pub fn sampled_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(move |&(i, j)| self.sampled[i * n + j])
    }

    pub fn sampled_pair_count(&self) -> usize {
        self.sampled_pairs().count()
    }

    /// Number of items `i` was compared with.
    pub fn degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.is_sampled(i, j)).count()
    }

    /// Same sampled mask (shape included).
    pub fn same_mask(&self, other: &Self) -> bool {
        self.n == other.n && self.sampled == other.sampled
    }
}

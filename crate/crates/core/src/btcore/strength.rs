use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bradley-Terry strengths normalized to geometric mean one.
///
/// Strengths are held as natural logarithms, so divergent fits (an item
/// that never loses) keep a meaningful ordering long after `exp` would
/// overflow. The log-strengths always sum to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct StrengthVector<T = f64> {
    log_pi: Vec<T>,
    /// Whether the solver met its tolerance.
    pub converged: bool,
    /// Sweeps performed.
    pub iterations: usize,
    /// Largest relative per-entry change in the last sweep.
    pub final_delta: T,
}

impl<T: Real> StrengthVector<T> {
    /// All strengths equal to one.
    pub fn uniform(n: usize) -> Self {
        Self {
            log_pi: vec![T::zero(); n],
            converged: false,
            iterations: 0,
            final_delta: T::zero(),
        }
    }

    /// Normalizes positive strengths.
    pub fn from_strengths(pi: &[T]) -> Result<Self> {
        if let Some(i) = pi.iter().position(|&p| !(p > T::zero() && p.is_finite())) {
            return Err(Error::usage(format!(
                "strength {} at index {i} is not a positive finite number",
                pi[i]
            )));
        }
        Ok(Self::from_log_strengths(pi.iter().map(|p| p.ln()).collect()))
    }

    /// Normalizes log-strengths (subtracts their mean).
    pub fn from_log_strengths(mut log_pi: Vec<T>) -> Self {
        normalize_log(&mut log_pi);
        Self {
            log_pi,
            ..Self::uniform(0)
        }
    }

    pub(crate) fn from_parts(log_pi: Vec<T>, converged: bool, iterations: usize, final_delta: T) -> Self {
        Self {
            log_pi,
            converged,
            iterations,
            final_delta,
        }
    }

    pub fn len(&self) -> usize {
        self.log_pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_pi.is_empty()
    }

    pub fn log_pi(&self) -> &[T] {
        &self.log_pi
    }

    /// Strengths `pi_i`. Entries of a strongly divergent fit may saturate
    /// to zero or infinity; use [`log_pi`](Self::log_pi) for those.
    pub fn pi(&self) -> Vec<T> {
        self.log_pi.iter().map(|l| l.exp()).collect()
    }

    /// `pi_i / pi_j`.
    pub fn ratio(&self, i: usize, j: usize) -> T {
        (self.log_pi[i] - self.log_pi[j]).exp()
    }
}

/// Shifts log-strengths to zero mean, i.e. strengths to geometric mean one.
pub(crate) fn normalize_log<T: Real>(log_pi: &mut [T]) {
    if log_pi.is_empty() {
        return;
    }
    let mean = log_pi.iter().copied().sum::<T>() / T::count(log_pi.len());
    for l in log_pi.iter_mut() {
        *l = *l - mean;
    }
}

/// Item indices by descending strength; equal strengths keep ascending
/// index order.
pub fn rank_by_strength<T: Real>(strengths: &StrengthVector<T>) -> Vec<usize> {
    let lp = strengths.log_pi();
    let mut order: Vec<usize> = (0..lp.len()).collect();
    order.sort_by(|&a, &b| {
        lp[b]
            .partial_cmp(&lp[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

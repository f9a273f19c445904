use std::fmt;

use super::sample::EvaluationSample;
use crate::btcore::WinMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Real, Weight};

/// Standard normal CDF, `Phi(x) = erfc(-x / sqrt 2) / 2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Probability that project `i` is truly better than `j` for an agent who
/// perceives `v_i`, `v_j` with uncertainties `sigma_i`, `sigma_j`:
/// `Phi((v_i - v_j) / sqrt(sigma_i^2 + sigma_j^2))`. With no uncertainty
/// at all this is a step function, `0.5` on ties.
pub fn win_probability<T: Real>(v_i: T, v_j: T, sigma_i: T, sigma_j: T) -> T {
    win_probability_using(normal_cdf, v_i, v_j, sigma_i, sigma_j)
}

/// [`win_probability`] with a caller-supplied CDF.
pub fn win_probability_using<T: Real>(cdf: impl Fn(f64) -> f64, v_i: T, v_j: T, sigma_i: T, sigma_j: T) -> T {
    let scale = sigma_i.hypot(sigma_j);
    let diff = v_i - v_j;
    if scale == T::zero() {
        return if diff > T::zero() {
            T::one()
        } else if diff < T::zero() {
            T::zero()
        } else {
            T::lit(0.5)
        };
    }
    T::lit(cdf((diff / scale).as_f64()))
}

/// Allowed win-probability answers for discrete-mode agents.
///
/// Sorted, inside `(0, 1)`, and closed under `q -> 1 - q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Levels<T = f64>(Vec<T>);

impl<T: Real> Levels<T> {
    pub fn new(mut levels: Vec<T>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::usage("level set is empty"));
        }
        if let Some(q) = levels.iter().find(|&&q| !(q > T::zero() && q < T::one())) {
            return Err(Error::usage(format!("level {q} outside (0, 1)")));
        }
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        levels.dedup();
        let eps = T::lit(1e-9);
        for &q in &levels {
            let mirror = T::one() - q;
            if !levels.iter().any(|&r| (r - mirror).abs() <= eps) {
                return Err(Error::usage(format!("level {q} has no mirror level {mirror}")));
            }
        }
        Ok(Self(levels))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    /// Nearest level; exact midpoints go to the level closer to 0.5.
    pub fn nearest(&self, w: T) -> T {
        let half = T::lit(0.5);
        let mut best = self.0[0];
        for &q in &self.0[1..] {
            let (d_new, d_best) = ((w - q).abs(), (w - best).abs());
            if d_new < d_best || (d_new == d_best && (q - half).abs() < (best - half).abs()) {
                best = q;
            }
        }
        best
    }
}

impl<T: Real> Default for Levels<T> {
    /// `{0.01, 0.1, 0.2, ..., 0.9, 0.99}`.
    fn default() -> Self {
        let levels = [0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99]
            .iter()
            .map(|&q| T::lit(q))
            .collect();
        Self(levels)
    }
}

/// How agents report win probabilities.
#[derive(Clone, Debug, PartialEq)]
pub enum ProbabilityMode<T = f64> {
    Continuous,
    Discrete(Levels<T>),
}

impl<T: Real> ProbabilityMode<T> {
    pub fn discrete() -> Self {
        ProbabilityMode::Discrete(Levels::default())
    }
}

impl<T> fmt::Display for ProbabilityMode<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbabilityMode::Continuous => "continuous",
            ProbabilityMode::Discrete(_) => "discrete",
        })
    }
}

pub fn quantize<T: Real>(w: T, mode: &ProbabilityMode<T>) -> T {
    match mode {
        ProbabilityMode::Continuous => w,
        ProbabilityMode::Discrete(levels) => levels.nearest(w),
    }
}

/// Agent `agent`'s reported probability that `lo` beats `hi`. The pair is
/// always evaluated in ascending index order so that both orientations of
/// a pair share one quantized answer.
pub fn agent_pair_probability<T: Real>(
    sample: &EvaluationSample<T>,
    agent: usize,
    lo: usize,
    hi: usize,
    mode: &ProbabilityMode<T>,
) -> T {
    debug_assert!(lo < hi);
    let p = win_probability(
        sample.perceived(lo, agent),
        sample.perceived(hi, agent),
        sample.sigma(lo, agent),
        sample.sigma(hi, agent),
    );
    quantize(p, mode)
}

/// One agent's win matrix over `pairs` (every pair when `None`).
pub fn agent_win_matrix<T: Real>(
    sample: &EvaluationSample<T>,
    agent: usize,
    mode: &ProbabilityMode<T>,
    pairs: Option<&[(usize, usize)]>,
) -> Result<WinMatrix<T>> {
    let n = sample.projects();
    if agent >= sample.agents() {
        return Err(Error::usage(format!(
            "agent {agent} out of range for {} agents",
            sample.agents()
        )));
    }
    let mut m = WinMatrix::new(n);
    let mut add = |i: usize, j: usize| -> Result<()> {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        if hi >= n || lo == hi {
            return Err(Error::usage(format!("invalid pair ({i},{j}) for {n} projects")));
        }
        m.set_probability(lo, hi, agent_pair_probability(sample, agent, lo, hi, mode))
    };
    match pairs {
        Some(pairs) => {
            for &(i, j) in pairs {
                add(i, j)?;
            }
        }
        None => {
            for i in 0..n {
                for j in (i + 1)..n {
                    add(i, j)?;
                }
            }
        }
    }
    Ok(m)
}

/// Entrywise mean of the agents' matrices over their common sampled pairs.
///
/// Only ring arithmetic is used, so exact scalar types give exact means.
pub fn aggregate_win_matrices<T: Weight>(matrices: &[WinMatrix<T>]) -> Result<WinMatrix<T>> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::usage("no win matrices to aggregate"))?;
    if let Some(k) = matrices.iter().position(|m| !m.same_mask(first)) {
        return Err(Error::usage(format!(
            "matrix {k} differs from matrix 0 in size or sampled pairs"
        )));
    }
    let count = matrices.iter().fold(T::zero(), |c, _| c + T::one());
    let mut out = WinMatrix::new(first.n());
    for (i, j) in first.sampled_pairs() {
        let (mut a, mut b) = (T::zero(), T::zero());
        for m in matrices {
            a = a + m.get(i, j);
            b = b + m.get(j, i);
        }
        out.set_pair(i, j, a / count, b / count)?;
    }
    Ok(out)
}

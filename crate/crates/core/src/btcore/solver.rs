use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::matrix::WinMatrix;
use super::strength::{normalize_log, StrengthVector};
use crate::error::{Error, Result};
use crate::scalar::{logistic, Real, Weight};

/// Fixed-point iteration used to maximize the Bradley-Terry likelihood.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// `pi_i <- W_i / sum_j (w_ij + w_ji) / (pi_i + pi_j)`, all items at once.
    Zermelo,
    /// `pi_i <- sum_j w_ij pi_j / (pi_i + pi_j) / sum_j w_ji / (pi_i + pi_j)`,
    /// all items at once.
    Newman,
    /// Newman's update applied item by item in index order, each update
    /// seeing the already-refreshed strengths of lower indices.
    NewmanGaussSeidel,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Zermelo => "zermelo",
            Scheme::Newman => "newman",
            Scheme::NewmanGaussSeidel => "newman-gauss-seidel",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zermelo" => Ok(Scheme::Zermelo),
            "newman" => Ok(Scheme::Newman),
            "newman-gauss-seidel" | "gauss-seidel" | "ngs" => Ok(Scheme::NewmanGaussSeidel),
            _ => Err(Error::usage(format!("unknown solver scheme `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig<T = f64> {
    pub scheme: Scheme,
    /// Stop once the largest relative per-entry change drops below this.
    pub tolerance: T,
    pub max_iterations: usize,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(scheme: Scheme, tolerance: T, max_iterations: usize) -> Result<Self> {
        if !(tolerance > T::zero()) {
            return Err(Error::usage(format!("tolerance must be positive, got {tolerance}")));
        }
        if max_iterations == 0 {
            return Err(Error::usage("max_iterations must be at least 1"));
        }
        Ok(Self {
            scheme,
            tolerance,
            max_iterations,
        })
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            scheme: Scheme::NewmanGaussSeidel,
            tolerance: T::lit(1e-8),
            max_iterations: 10_000,
        }
    }
}

/// Log-space step applied to an item whose update has a zero numerator
/// (it never wins) or zero denominator (it never loses). Such items have no
/// finite maximum-likelihood strength; the step keeps them moving in the
/// right direction without producing zeros or infinities.
const DEGENERATE_LOG_STEP: f64 = std::f64::consts::LN_2;

/// Outcome of one unnormalized sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepReport {
    /// At least one item had no wins or no losses among its comparisons.
    pub degenerate: bool,
}

/// Sampled neighbours of each item as `(j, w_ij, w_ji)`, plus total wins.
struct Adjacency<T> {
    edges: Vec<Vec<(usize, T, T)>>,
    wins: Vec<T>,
}

/// Which representation `State::v` currently holds.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Space {
    Plain,
    Log,
}

/// Iteration state. Strengths are kept as plain values while they stay well
/// inside the exponent range, which saves a logarithm and an exponential per
/// item and sweep; extreme fits fall back to log-strengths.
struct State<T> {
    v: Vec<T>,
    space: Space,
    next: Vec<T>,
    prev: Vec<T>,
    prev_space: Space,
}

impl<T: Real> State<T> {
    fn new(theta: Vec<T>) -> Self {
        let mut st = Self {
            next: Vec::with_capacity(theta.len()),
            prev: Vec::with_capacity(theta.len()),
            v: theta,
            space: Space::Log,
            prev_space: Space::Log,
        };
        st.settle();
        st
    }

    fn limit() -> T {
        T::max_value().ln() / T::lit(4.0)
    }

    /// Switches representation when the strengths cross the range limit.
    fn settle(&mut self) {
        let limit = Self::limit();
        match self.space {
            Space::Log => {
                if self.v.iter().all(|t| t.abs() <= limit) {
                    self.v.iter_mut().for_each(|t| *t = t.exp());
                    self.space = Space::Plain;
                }
            }
            Space::Plain => {
                let (lo, hi) = ((-limit).exp(), limit.exp());
                if self.v.iter().any(|&p| !(p >= lo && p <= hi)) {
                    self.v.iter_mut().for_each(|p| *p = p.ln());
                    self.space = Space::Log;
                }
            }
        }
    }

    fn log_strengths(&self) -> Vec<T> {
        match self.space {
            Space::Log => self.v.clone(),
            Space::Plain => self.v.iter().map(|p| p.ln()).collect(),
        }
    }

    /// Rescales to geometric mean one.
    fn normalize(&mut self) {
        match self.space {
            Space::Log => normalize_log(&mut self.v),
            Space::Plain => {
                // products of three in-range values cannot overflow
                let sum_log = self
                    .v
                    .chunks(3)
                    .map(|c| c.iter().fold(T::one(), |acc, &p| acc * p).ln())
                    .sum::<T>();
                let scale = (-sum_log / T::count(self.v.len())).exp();
                self.v.iter_mut().for_each(|p| *p = *p * scale);
            }
        }
    }

    fn snapshot(&mut self) {
        self.prev.clear();
        self.prev.extend_from_slice(&self.v);
        self.prev_space = self.space;
    }

    /// Largest `|pi_new / pi_old - 1|` since the last snapshot.
    fn relative_change(&self) -> T {
        let max = |acc: T, x: T| acc.max(x.abs());
        match (self.prev_space, self.space) {
            (Space::Plain, Space::Plain) => self
                .v
                .iter()
                .zip(&self.prev)
                .fold(T::zero(), |m, (&new, &old)| max(m, new / old - T::one())),
            (Space::Log, Space::Log) => self
                .v
                .iter()
                .zip(&self.prev)
                .fold(T::zero(), |m, (&new, &old)| max(m, (new - old).exp_m1())),
            (was, _) => {
                let old: Vec<T> = match was {
                    Space::Log => self.prev.clone(),
                    Space::Plain => self.prev.iter().map(|p| p.ln()).collect(),
                };
                self.log_strengths()
                    .iter()
                    .zip(&old)
                    .fold(T::zero(), |m, (&new, &old)| max(m, (new - old).exp_m1()))
            }
        }
    }
}

impl<T: Real> Adjacency<T> {
    fn build(w: &WinMatrix<T>) -> Result<Self> {
        let n = w.n();
        let mut edges = vec![Vec::new(); n];
        let mut wins = vec![T::zero(); n];
        for (i, row) in edges.iter_mut().enumerate() {
            let mut total = T::zero();
            for j in 0..n {
                if j != i && w.is_sampled(i, j) {
                    let (a, b) = (w.get(i, j), w.get(j, i));
                    row.push((j, a, b));
                    wins[i] = wins[i] + a;
                    total = total + a + b;
                }
            }
            if row.is_empty() {
                return Err(Error::Degenerate(format!("item {i} has no sampled comparisons")));
            }
            if !(total > T::zero()) {
                return Err(Error::Degenerate(format!(
                    "item {i} has comparisons but zero total weight"
                )));
            }
        }
        Ok(Self { edges, wins })
    }

    /// New plain strength of item `i`.
    fn update_plain(&self, scheme: Scheme, i: usize, pi: &[T]) -> (T, bool) {
        let pi_i = pi[i];
        let (num, den) = match scheme {
            Scheme::Zermelo => {
                let den = self.edges[i]
                    .iter()
                    .fold(T::zero(), |acc, &(j, a, b)| acc + (a + b) / (pi_i + pi[j]));
                (self.wins[i], den)
            }
            Scheme::Newman | Scheme::NewmanGaussSeidel => {
                self.edges[i].iter().fold((T::zero(), T::zero()), |(num, den), &(j, a, b)| {
                    let pair = pi_i + pi[j];
                    (num + a * pi[j] / pair, den + b / pair)
                })
            }
        };
        // a log step of ln 2 is an exact doubling or halving
        let two = T::lit(2.0);
        match (num > T::zero(), den > T::zero()) {
            (true, true) => (num / den, false),
            (true, false) => (pi_i * two, true),
            (false, true) => (pi_i / two, true),
            (false, false) => (pi_i, true),
        }
    }

    /// Same update from log-strengths, using logistic shares.
    fn update_log(&self, scheme: Scheme, i: usize, theta: &[T]) -> (T, bool) {
        let ti = theta[i];
        let (num, den) = match scheme {
            Scheme::Zermelo => {
                let den = self.edges[i]
                    .iter()
                    .fold(T::zero(), |acc, &(j, a, b)| acc + (a + b) * logistic(ti - theta[j]));
                (self.wins[i], den)
            }
            Scheme::Newman | Scheme::NewmanGaussSeidel => {
                self.edges[i].iter().fold((T::zero(), T::zero()), |(num, den), &(j, a, b)| {
                    (num + a * logistic(theta[j] - ti), den + b * logistic(ti - theta[j]))
                })
            }
        };
        let step = T::lit(DEGENERATE_LOG_STEP);
        match (num > T::zero(), den > T::zero()) {
            (true, true) => (ti + num.ln() - den.ln(), false),
            (true, false) => (ti + step, true),
            (false, true) => (ti - step, true),
            (false, false) => (ti, true),
        }
    }

    fn update(&self, scheme: Scheme, i: usize, st: &State<T>) -> (T, bool) {
        match st.space {
            Space::Plain => self.update_plain(scheme, i, &st.v),
            Space::Log => self.update_log(scheme, i, &st.v),
        }
    }

    fn sweep(&self, scheme: Scheme, st: &mut State<T>) -> SweepReport {
        let mut degenerate = false;
        let n = st.v.len();
        if scheme == Scheme::NewmanGaussSeidel {
            for i in 0..n {
                let (v, d) = self.update(scheme, i, st);
                degenerate |= d;
                st.v[i] = v;
            }
        } else {
            let mut next = std::mem::take(&mut st.next);
            next.clear();
            for i in 0..n {
                let (v, d) = self.update(scheme, i, st);
                degenerate |= d;
                next.push(v);
            }
            st.next = std::mem::replace(&mut st.v, next);
        }
        st.settle();
        SweepReport { degenerate }
    }
}

fn check_square<T: Weight>(w: &WinMatrix<T>, len: usize) -> Result<()> {
    if w.n() != len {
        return Err(Error::usage(format!(
            "strength vector has {len} entries but matrix is {}x{}",
            w.n(),
            w.n()
        )));
    }
    Ok(())
}

/// Bradley-Terry log-likelihood `sum_{i != j} w_ij [ln pi_i - ln(pi_i + pi_j)]`
/// over sampled pairs.
pub fn log_likelihood<T: Real>(w: &WinMatrix<T>, pi: &[T]) -> Result<T> {
    check_square(w, pi.len())?;
    if let Some(i) = pi.iter().position(|&p| !(p > T::zero())) {
        return Err(Error::usage(format!("strength at index {i} is not positive")));
    }
    let n = w.n();
    let mut total = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j && w.is_sampled(i, j) {
                total = total + w.get(i, j) * (pi[i].ln() - (pi[i] + pi[j]).ln());
            }
        }
    }
    Ok(total)
}

/// One sweep of `scheme` on log-strengths, in place and without
/// normalization.
pub fn sweep<T: Real>(scheme: Scheme, w: &WinMatrix<T>, log_pi: &mut [T]) -> Result<SweepReport> {
    check_square(w, log_pi.len())?;
    let adj = Adjacency::build(w)?;
    let mut st = State::new(log_pi.to_vec());
    let report = adj.sweep(scheme, &mut st);
    log_pi.copy_from_slice(&st.log_strengths());
    Ok(report)
}

fn step<T: Real>(scheme: Scheme, w: &WinMatrix<T>, pi: &StrengthVector<T>) -> Result<StrengthVector<T>> {
    let mut theta = pi.log_pi().to_vec();
    sweep(scheme, w, &mut theta)?;
    Ok(StrengthVector::from_log_strengths(theta))
}

/// One Zermelo update from `pi`, renormalized.
pub fn zermelo_step<T: Real>(w: &WinMatrix<T>, pi: &StrengthVector<T>) -> Result<StrengthVector<T>> {
    step(Scheme::Zermelo, w, pi)
}

/// One simultaneous Newman update from `pi`, renormalized.
pub fn newman_step<T: Real>(w: &WinMatrix<T>, pi: &StrengthVector<T>) -> Result<StrengthVector<T>> {
    step(Scheme::Newman, w, pi)
}

/// One in-order Newman sweep from `pi`, renormalized.
pub fn newman_gauss_seidel_step<T: Real>(
    w: &WinMatrix<T>,
    pi: &StrengthVector<T>,
) -> Result<StrengthVector<T>> {
    step(Scheme::NewmanGaussSeidel, w, pi)
}

/// Iterates `cfg.scheme` from uniform strengths until the largest relative
/// change falls below `cfg.tolerance` or the iteration budget runs out.
///
/// Running out of budget is not an error: win patterns without a finite
/// maximizer (an item that never loses, say) still produce a usable
/// ordering, reported with `converged == false`.
pub fn solve<T: Real>(w: &WinMatrix<T>, cfg: &SolverConfig<T>) -> Result<StrengthVector<T>> {
    let n = w.n();
    if n < 2 {
        return Err(Error::usage(format!("need at least two items, got {n}")));
    }
    let adj = Adjacency::build(w)?;
    let mut st = State::new(vec![T::zero(); n]);
    let mut delta = T::zero();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        iterations += 1;
        st.snapshot();
        let report = adj.sweep(cfg.scheme, &mut st);
        st.normalize();
        delta = st.relative_change();
        if !report.degenerate && delta < cfg.tolerance {
            converged = true;
            break;
        }
    }
    let mut theta = st.log_strengths();
    normalize_log(&mut theta);
    Ok(StrengthVector::from_parts(theta, converged, iterations, delta))
}

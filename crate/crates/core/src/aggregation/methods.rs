use std::cmp::Ordering;
use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::ledger::ComparisonLedger;
use super::oracle::WinOracle;
use super::{Method, SelectionResult};
use crate::btcore::{rank_by_strength, solve, SolverConfig};
use crate::error::{Error, Result};
use crate::portfolio::{EvaluationSample, ProbabilityMode};
use crate::scalar::Real;

/// First `n_star` entries of `ranking`.
pub fn select_top(ranking: &[usize], n_star: usize) -> Result<BTreeSet<usize>> {
    if n_star == 0 || n_star > ranking.len() {
        return Err(Error::usage(format!(
            "n* = {n_star} must lie in 1..={}",
            ranking.len()
        )));
    }
    Ok(ranking[..n_star].iter().copied().collect())
}

/// Indices sorted by descending score, ties by ascending index.
fn rank_descending<T: Real>(scores: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

fn finish<T>(
    method: Method,
    ranking: Vec<usize>,
    n_star: usize,
    comparisons: ComparisonLedger,
    scores: Option<Vec<T>>,
) -> Result<SelectionResult<T>> {
    let selected = select_top(&ranking, n_star)?;
    Ok(SelectionResult {
        method,
        ranking,
        selected,
        comparisons,
        scores,
        phases: Vec::new(),
    })
}

/// Ranks projects by the mean of the agents' perceived values.
pub fn arithmetic_mean_select<T: Real>(sample: &EvaluationSample<T>, n_star: usize) -> Result<SelectionResult<T>> {
    let agents = T::count(sample.agents());
    let means: Vec<T> = (0..sample.projects())
        .map(|i| (0..sample.agents()).map(|l| sample.perceived(i, l)).sum::<T>() / agents)
        .collect();
    finish(
        Method::ArithmeticMean,
        rank_descending(&means),
        n_star,
        ComparisonLedger::new(),
        Some(means),
    )
}

/// Borda count: each agent sorts projects by perceived value; a project at
/// 1-based position `p` earns `n - p` points.
pub fn borda_select<T: Real>(sample: &EvaluationSample<T>, n_star: usize) -> Result<SelectionResult<T>> {
    let n = sample.projects();
    let mut points = vec![0usize; n];
    for agent in 0..sample.agents() {
        for (pos, &i) in rank_descending(&sample.agent_values(agent)).iter().enumerate() {
            points[i] += n - (pos + 1);
        }
    }
    let scores: Vec<T> = points.into_iter().map(T::count).collect();
    finish(
        Method::Borda,
        rank_descending(&scores),
        n_star,
        ComparisonLedger::new(),
        Some(scores),
    )
}

/// Lomuto-partition Quicksort over the aggregated win matrix, starting from
/// the identity order. Returns projects worst first.
pub fn quicksort_rank<T: Real>(oracle: &mut WinOracle<'_, T>) -> Vec<usize> {
    quicksort_rank_from(oracle, (0..oracle.n()).collect())
}

/// [`quicksort_rank`] from an arbitrary initial order.
///
/// The pivot is the last element of each range; an element moves to the
/// worse side when its win probability against the pivot is below 0.5.
pub fn quicksort_rank_from<T: Real>(oracle: &mut WinOracle<'_, T>, mut idx: Vec<usize>) -> Vec<usize> {
    let half = T::lit(0.5);
    let mut ranges = Vec::new();
    if idx.len() > 1 {
        ranges.push((0, idx.len() - 1));
    }
    while let Some((low, high)) = ranges.pop() {
        let pivot = idx[high];
        let mut store = low;
        for j in low..high {
            if oracle.query(idx[j], pivot) < half {
                idx.swap(store, j);
                store += 1;
            }
        }
        idx.swap(store, high);
        // Same ranges as the recursive formulation; the right one is pushed
        // first so the left one is processed first.
        if store + 1 < high {
            ranges.push((store + 1, high));
        }
        if store > low + 1 {
            ranges.push((low, store - 1));
        }
    }
    idx
}

pub fn quicksort_select<T: Real>(
    sample: &EvaluationSample<T>,
    mode: &ProbabilityMode<T>,
    n_star: usize,
) -> Result<SelectionResult<T>> {
    let mut oracle = WinOracle::new(sample, mode);
    let mut ranking = quicksort_rank(&mut oracle);
    ranking.reverse();
    finish(Method::Quicksort, ranking, n_star, oracle.into_ledger(), None)
}

/// Consecutive pairs of `order` plus the wrap-around pair, deduplicated.
pub fn cyclic_pairs(order: &[usize]) -> Vec<(usize, usize)> {
    let n = order.len();
    if n < 2 {
        return Vec::new();
    }
    let mut seen = ComparisonLedger::new();
    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b) = (order[k], order[(k + 1) % n]);
        if seen.insert(a, b) {
            pairs.push((a, b));
        }
    }
    pairs
}

/// Strength ranking from the aggregated matrix restricted to `pairs`.
fn strength_ranking<T: Real>(
    oracle: &mut WinOracle<'_, T>,
    pairs: &[(usize, usize)],
    solver: &SolverConfig<T>,
) -> Result<Vec<usize>> {
    if oracle.n() < 2 {
        return Ok((0..oracle.n()).collect());
    }
    let w = oracle.matrix(pairs)?;
    Ok(rank_by_strength(&solve(&w, solver)?))
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
}

/// Bradley-Terry strengths fitted to every aggregated pairwise probability.
pub fn bt_full_select<T: Real>(
    sample: &EvaluationSample<T>,
    mode: &ProbabilityMode<T>,
    n_star: usize,
    solver: &SolverConfig<T>,
) -> Result<SelectionResult<T>> {
    let mut oracle = WinOracle::new(sample, mode);
    let ranking = strength_ranking(&mut oracle, &all_pairs(sample.projects()), solver)?;
    finish(Method::BradleyTerry, ranking, n_star, oracle.into_ledger(), None)
}

/// Two-phase Bradley-Terry with a uniformly random first-phase cycle.
pub fn two_phase_bt_select<T: Real, R: Rng + ?Sized>(
    sample: &EvaluationSample<T>,
    mode: &ProbabilityMode<T>,
    n_star: usize,
    solver: &SolverConfig<T>,
    rng: &mut R,
) -> Result<SelectionResult<T>> {
    let mut order: Vec<usize> = (0..sample.projects()).collect();
    order.shuffle(rng);
    two_phase_bt_with_order(sample, mode, n_star, solver, &order)
}

/// Two-phase Bradley-Terry from a given first-phase order: fit on the
/// cycle through `order`, then on the union of that cycle and the cycle
/// through the resulting ranking.
pub fn two_phase_bt_with_order<T: Real>(
    sample: &EvaluationSample<T>,
    mode: &ProbabilityMode<T>,
    n_star: usize,
    solver: &SolverConfig<T>,
    order: &[usize],
) -> Result<SelectionResult<T>> {
    check_permutation(order, sample.projects())?;
    let mut oracle = WinOracle::new(sample, mode);
    let first = cyclic_pairs(order);
    let coarse = strength_ranking(&mut oracle, &first, solver)?;
    let second = cyclic_pairs(&coarse);
    let mut union = first.clone();
    let mut seen: BTreeSet<(usize, usize)> = union.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    for &(a, b) in &second {
        if seen.insert((a.min(b), a.max(b))) {
            union.push((a, b));
        }
    }
    let ranking = strength_ranking(&mut oracle, &union, solver)?;
    let mut result = finish(Method::TwoPhaseBT, ranking, n_star, oracle.into_ledger(), None)?;
    result.phases = vec![first.into_iter().collect(), second.into_iter().collect()];
    Ok(result)
}

/// Quicksort for a coarse ranking, then Bradley-Terry on the cycle through
/// it alone.
pub fn two_phase_quicksort_select<T: Real>(
    sample: &EvaluationSample<T>,
    mode: &ProbabilityMode<T>,
    n_star: usize,
    solver: &SolverConfig<T>,
) -> Result<SelectionResult<T>> {
    let mut oracle = WinOracle::new(sample, mode);
    let coarse = quicksort_rank(&mut oracle);
    let first = oracle.ledger().clone();
    let second = cyclic_pairs(&coarse);
    let ranking = strength_ranking(&mut oracle, &second, solver)?;
    let mut result = finish(Method::TwoPhaseQuicksort, ranking, n_star, oracle.into_ledger(), None)?;
    result.phases = vec![first, second.into_iter().collect()];
    Ok(result)
}

/// Dispatches to the rule named by `method`. Only the two-phase
/// Bradley-Terry rule draws from `rng`.
pub fn run_method<T: Real, R: Rng + ?Sized>(
    method: Method,
    sample: &EvaluationSample<T>,
    mode: &ProbabilityMode<T>,
    n_star: usize,
    solver: &SolverConfig<T>,
    rng: &mut R,
) -> Result<SelectionResult<T>> {
    match method {
        Method::ArithmeticMean => arithmetic_mean_select(sample, n_star),
        Method::Borda => borda_select(sample, n_star),
        Method::Quicksort => quicksort_select(sample, mode, n_star),
        Method::BradleyTerry => bt_full_select(sample, mode, n_star, solver),
        Method::TwoPhaseBT => two_phase_bt_select(sample, mode, n_star, solver, rng),
        Method::TwoPhaseQuicksort => two_phase_quicksort_select(sample, mode, n_star, solver),
    }
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::usage(format!("order has {} entries, expected {n}", order.len())));
    }
    for &i in order {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::usage(format!("order is not a permutation of 0..{n}")));
        }
    }
    Ok(())
}

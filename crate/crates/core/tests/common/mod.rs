//! Independent reference implementations for the integration tests. None of
//! this calls into the solver.

#![allow(dead_code)]

use rand::Rng;

/// Bradley-Terry log-likelihood of log-strengths `theta` for a dense
/// win-count matrix, written from scratch with a stable log-sum-exp.
pub fn log_likelihood(w: &[Vec<f64>], theta: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..w.len() {
        for j in 0..w.len() {
            if i != j && w[i][j] != 0.0 {
                let (a, b) = (theta[i], theta[j]);
                let m = a.max(b);
                let lse = m + ((a - m).exp() + (b - m).exp()).ln();
                total += w[i][j] * (a - lse);
            }
        }
    }
    total
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Maximizes the likelihood over item `i` alone. The objective is concave
/// in that coordinate, so the maximizer is the root of its partial
/// derivative, found by bracketing and bisection.
fn maximize_coordinate(w: &[Vec<f64>], theta: &mut [f64], i: usize) {
    let n = w.len();
    let wins: f64 = (0..n).filter(|&j| j != i).map(|j| w[i][j]).sum();
    let grad = |x: f64| {
        wins - (0..n)
            .filter(|&j| j != i)
            .map(|j| (w[i][j] + w[j][i]) * sigmoid(x - theta[j]))
            .sum::<f64>()
    };
    let x0 = theta[i];
    let (mut lo, mut hi) = (x0 - 1.0, x0 + 1.0);
    let mut step = 1.0;
    while grad(lo) < 0.0 {
        step *= 2.0;
        lo = x0 - step;
    }
    step = 1.0;
    while grad(hi) > 0.0 {
        step *= 2.0;
        hi = x0 + step;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if grad(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    theta[i] = 0.5 * (lo + hi);
}

/// Maximum-likelihood log-strengths with mean zero, by cyclic coordinate
/// ascent until no coordinate moves more than `tol`.
pub fn mle_coordinate_ascent(w: &[Vec<f64>], tol: f64) -> Vec<f64> {
    let n = w.len();
    let mut theta = vec![0.0; n];
    for _ in 0..200_000 {
        let before = theta.clone();
        for i in 0..n {
            maximize_coordinate(w, &mut theta, i);
        }
        let moved = theta.iter().zip(&before).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if moved < tol {
            break;
        }
    }
    let mean = theta.iter().sum::<f64>() / n as f64;
    theta.iter().map(|t| t - mean).collect()
}

/// Three-item maximum by repeated zooming grid search over
/// `(theta_1, theta_2)` with `theta_0 = 0`; returned with mean zero.
pub fn mle_grid_three(w: &[Vec<f64>]) -> Vec<f64> {
    let (mut c1, mut c2, mut half) = (0.0, 0.0, 8.0);
    for _ in 0..60 {
        let mut best = (f64::NEG_INFINITY, c1, c2);
        for a in 0..=20 {
            for b in 0..=20 {
                let t1 = c1 - half + half * a as f64 / 10.0;
                let t2 = c2 - half + half * b as f64 / 10.0;
                let ll = log_likelihood(w, &[0.0, t1, t2]);
                if ll > best.0 {
                    best = (ll, t1, t2);
                }
            }
        }
        (c1, c2) = (best.1, best.2);
        half *= 0.5;
    }
    let mean = (c1 + c2) / 3.0;
    vec![-mean, c1 - mean, c2 - mean]
}

/// Whether every item can reach every other along "beat" edges, the
/// condition for a finite maximizer.
pub fn strongly_connected(w: &[Vec<f64>]) -> bool {
    let n = w.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let edge = if forward { w[i][j] > 0.0 } else { w[j][i] > 0.0 };
                if i != j && edge && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    reach(true) && reach(false)
}

/// Random integer win counts on every pair, redrawn until the win graph is
/// strongly connected (so no item is undefeated or winless).
pub fn random_tournament<R: Rng>(rng: &mut R, n: usize, max_games: u32) -> Vec<Vec<f64>> {
    loop {
        let mut w = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let games = rng.random_range(1..=max_games);
                let wins = rng.random_range(0..=games);
                w[i][j] = wins as f64;
                w[j][i] = (games - wins) as f64;
            }
        }
        if strongly_connected(&w) {
            return w;
        }
    }
}

/// Largest `|W_i - sum_j (w_ij + w_ji) pi_i / (pi_i + pi_j)|` relative to
/// the item's games: zero exactly at a stationary point.
pub fn stationarity_residual(w: &[Vec<f64>], pi: &[f64]) -> f64 {
    let n = w.len();
    (0..n)
        .map(|i| {
            let (mut wins, mut expected, mut games) = (0.0, 0.0, 0.0);
            for j in (0..n).filter(|&j| j != i) {
                wins += w[i][j];
                expected += (w[i][j] + w[j][i]) * pi[i] / (pi[i] + pi[j]);
                games += w[i][j] + w[j][i];
            }
            (wins - expected).abs() / games
        })
        .fold(0.0, f64::max)
}

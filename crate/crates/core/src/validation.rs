//! Built-in regression checks against published reference values.
//!
//! Each check is self-contained and cheap enough to run from the command
//! line. [`Faults`] lets tests break a component on purpose and confirm the
//! relevant checks notice.

use num_rational::Ratio;
use serde::Serialize;

use crate::aggregation::Method;
use crate::btcore::WinMatrix;
use crate::portfolio::{aggregate_win_matrices, normal_cdf, win_probability_using, ProbabilityMode};
use crate::simulator::{run_trial, ExperimentConfig, ValueRule};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Deliberate defects for exercising the suite itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Faults {
    /// Swap the normal CDF for a logistic curve.
    pub broken_cdf: bool,
}

pub const CHECK_NAMES: &[&str] = &[
    "win-probability-w12",
    "win-probability-w23",
    "win-probability-w13",
    "aggregate-0.46",
    "aggregate-0.63",
    "zero-noise-ceiling-345",
    "micro-case-5",
    "bradley-terry-count-435",
];

/// Methods expected to recover the true order from noiseless evaluations.
/// TwoPhaseBT is absent: its random sparse cycle need not compare the two
/// projects on either side of the cut.
pub const NOISELESS_EXACT: [Method; 5] = [
    Method::ArithmeticMean,
    Method::Borda,
    Method::Quicksort,
    Method::BradleyTerry,
    Method::TwoPhaseQuicksort,
];

pub fn run_all(faults: Faults) -> Vec<Check> {
    CHECK_NAMES.iter().map(|name| run_one(name, faults).expect("listed check")).collect()
}

/// Runs the named check, or `None` for an unknown name.
pub fn run_one(name: &str, faults: Faults) -> Option<Check> {
    let cdf = move |x: f64| {
        if faults.broken_cdf {
            1.0 / (1.0 + (-x).exp())
        } else {
            normal_cdf(x)
        }
    };
    let wp = |name, args: (f64, f64, f64, f64), want: f64| {
        let got = win_probability_using(cdf, args.0, args.1, args.2, args.3);
        Check {
            name,
            passed: (got - want).abs() <= 1e-4,
            detail: format!("{got:.6} vs {want} (tolerance 1e-4)"),
        }
    };
    Some(match name {
        "win-probability-w12" => wp(CHECK_NAMES[0], (1.0, 3.5, 3.0, 0.1), 0.2024),
        "win-probability-w23" => wp(CHECK_NAMES[1], (3.5, 4.0, 0.1, 3.0), 0.4338),
        "win-probability-w13" => wp(CHECK_NAMES[2], (1.0, 4.0, 3.0, 3.0), 0.2397),
        "aggregate-0.46" => aggregate(CHECK_NAMES[3], &[98, 20, 20], 46),
        "aggregate-0.63" => aggregate(CHECK_NAMES[4], &[80, 46], 63),
        "zero-noise-ceiling-345" => zero_noise(),
        "micro-case-5" => micro_case(),
        "bradley-terry-count-435" => bt_count(),
        _ => return None,
    })
}

fn pair<T: crate::Weight>(p: T) -> WinMatrix<T> {
    let mut m = WinMatrix::new(2);
    m.set_pair(0, 1, p, T::one() - p).expect("valid pair");
    m
}

/// Averages the percentages `agents` exactly and in `f64`, against
/// `want` percent.
fn aggregate(name: &'static str, agents: &[i64], want: i64) -> Check {
    let exact: Vec<_> = agents.iter().map(|&p| pair(Ratio::new(p, 100))).collect();
    let floats: Vec<_> = agents.iter().map(|&p| pair(p as f64 / 100.0)).collect();
    let (exact, floats) = match (aggregate_win_matrices(&exact), aggregate_win_matrices(&floats)) {
        (Ok(a), Ok(b)) => (a.get(0, 1), b.get(0, 1)),
        (Err(e), _) | (_, Err(e)) => {
            return Check { name, passed: false, detail: e.to_string() };
        }
    };
    let target = Ratio::new(want, 100);
    let float_target = want as f64 / 100.0;
    Check {
        name,
        passed: exact == target && (floats - float_target).abs() <= 4.0 * f64::EPSILON,
        detail: format!("rational {exact}, f64 {floats:?}, want {target}"),
    }
}

fn zero_noise() -> Check {
    let cfg = ExperimentConfig {
        zero_noise: true,
        methods: NOISELESS_EXACT.to_vec(),
        ..ExperimentConfig::default()
    };
    let mut bad = Vec::new();
    for beta_index in [0, 5, 10] {
        match run_trial(&cfg, beta_index, 0) {
            Ok(results) => bad.extend(
                results
                    .iter()
                    .filter(|r| r.performance != 345.0)
                    .map(|r| format!("{} at beta {}: {}", r.method, r.beta, r.performance)),
            ),
            Err(e) => bad.push(e.to_string()),
        }
    }
    Check {
        name: "zero-noise-ceiling-345",
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            "every checked method scored 345 at beta 0, 5, 10".into()
        } else {
            bad.join("; ")
        },
    }
}

fn micro_case() -> Check {
    let cfg = ExperimentConfig {
        n: 3,
        agents: 3,
        n_star: 2,
        beta_grid: vec![0.0],
        values: ValueRule::Explicit(vec![1.0, 2.0, 3.0]),
        zero_noise: true,
        ..ExperimentConfig::default()
    };
    let detail = match run_trial(&cfg, 0, 0) {
        Ok(results) => {
            let bad: Vec<_> = results
                .iter()
                .filter(|r| r.performance != 5.0)
                .map(|r| format!("{}: {}", r.method, r.performance))
                .collect();
            if bad.is_empty() {
                return Check {
                    name: "micro-case-5",
                    passed: true,
                    detail: "all six methods scored 5".into(),
                };
            }
            bad.join("; ")
        }
        Err(e) => e.to_string(),
    };
    Check { name: "micro-case-5", passed: false, detail }
}

fn bt_count() -> Check {
    let cfg = ExperimentConfig {
        mode: ProbabilityMode::discrete(),
        methods: vec![Method::BradleyTerry],
        ..ExperimentConfig::default()
    };
    let mut counts = Vec::new();
    for beta_index in [0, 5, 10] {
        for trial in 0..2 {
            match run_trial(&cfg, beta_index, trial) {
                Ok(r) => counts.push(r[0].comparison_count),
                Err(e) => {
                    return Check { name: "bradley-terry-count-435", passed: false, detail: e.to_string() };
                }
            }
        }
    }
    Check {
        name: "bradley-terry-count-435",
        passed: counts.iter().all(|&c| c == 435),
        detail: format!("comparison counts {counts:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_runnable() {
        let mut names = CHECK_NAMES.to_vec();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CHECK_NAMES.len());
        assert!(run_one("no-such-check", Faults::default()).is_none());
    }

    #[test]
    fn cheap_checks_pass() {
        for name in &CHECK_NAMES[..5] {
            let c = run_one(name, Faults::default()).unwrap();
            assert!(c.passed, "{name}: {}", c.detail);
        }
        let c = run_one("micro-case-5", Faults::default()).unwrap();
        assert!(c.passed, "{}", c.detail);
    }

    #[test]
    fn broken_cdf_is_caught() {
        let faults = Faults { broken_cdf: true };
        for name in &CHECK_NAMES[..3] {
            assert!(!run_one(name, faults).unwrap().passed, "{name}");
        }
        assert!(run_one("aggregate-0.46", faults).unwrap().passed);
    }
}

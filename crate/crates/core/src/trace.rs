//! Human-readable dump of a single trial, for debugging small cases.
//!
//! Projects are numbered from 1 in the output.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aggregation::{run_method, ComparisonLedger, Method};
use crate::btcore::{SolverConfig, WinMatrix};
use crate::error::{Error, Result};
use crate::portfolio::{agent_win_matrix, aggregate_win_matrices, EvaluationSample, ProbabilityMode};
use crate::simulator::{draw_trial, method_rng, ExperimentConfig};

/// Largest portfolio a trace will print.
pub const MAX_PROJECTS: usize = 10;

/// Built-in trace inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fixture {
    /// One agent, three projects perceived at 1, 3.5 and 4 with
    /// uncertainties 3, 0.1 and 3.
    WorkedExample,
    /// Eight projects, three agents, every evaluation exact.
    ZeroNoise,
}

impl Fixture {
    pub const NAMES: [&'static str; 2] = ["worked-example", "zero-noise"];

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "worked-example" => Ok(Fixture::WorkedExample),
            "zero-noise" => Ok(Fixture::ZeroNoise),
            _ => Err(Error::usage(format!(
                "unknown fixture `{name}`; expected one of {}",
                Self::NAMES.join(", ")
            ))),
        }
    }
}

/// Everything a trace needs besides the method list.
pub struct TraceInput {
    pub title: String,
    pub values: Vec<f64>,
    pub sample: EvaluationSample,
    pub mode: ProbabilityMode,
    pub n_star: usize,
    pub solver: SolverConfig,
}

/// The trial `(beta_index, trial_index)` of `cfg`, exactly as the simulator
/// draws it. Refuses portfolios larger than [`MAX_PROJECTS`].
pub fn trace_trial(cfg: &ExperimentConfig, beta_index: usize, trial_index: usize) -> Result<String> {
    if cfg.n > MAX_PROJECTS {
        return Err(Error::config(
            "n",
            format!("trace prints at most {MAX_PROJECTS} projects, got {}", cfg.n),
        ));
    }
    cfg.validate()?;
    let (portfolio, sample) = draw_trial(cfg, beta_index, trial_index)?;
    let input = TraceInput {
        title: format!(
            "trial {trial_index} at beta = {} (seed {})",
            cfg.beta_grid[beta_index], cfg.master_seed
        ),
        values: portfolio.values(),
        sample,
        mode: cfg.mode.clone(),
        n_star: cfg.n_star,
        solver: cfg.solver,
    };
    render(&input, &cfg.methods, &method_rng(cfg.master_seed, beta_index, trial_index))
}

pub fn fixture_input(fixture: Fixture) -> TraceInput {
    match fixture {
        Fixture::WorkedExample => TraceInput {
            title: "worked example: one agent, three projects".into(),
            values: vec![1.0, 2.0, 3.0],
            sample: EvaluationSample::from_rows(&[vec![1.0], vec![3.5], vec![4.0]], &[vec![3.0], vec![0.1], vec![3.0]])
                .expect("fixture is well formed"),
            mode: ProbabilityMode::Continuous,
            n_star: 1,
            solver: SolverConfig::default(),
        },
        Fixture::ZeroNoise => {
            let values: Vec<f64> = (1..=8).map(f64::from).collect();
            let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v; 3]).collect();
            TraceInput {
                title: "zero noise: eight projects, three exact agents".into(),
                sample: EvaluationSample::from_rows(&rows, &vec![vec![0.0; 3]; 8]).expect("fixture is well formed"),
                values,
                mode: ProbabilityMode::Continuous,
                n_star: 4,
                solver: SolverConfig::default(),
            }
        }
    }
}

/// Traces a fixture; `seed` drives the random first cycle of TwoPhaseBT.
pub fn trace_fixture(fixture: Fixture, methods: &[Method], seed: u64) -> Result<String> {
    render(&fixture_input(fixture), methods, &ChaCha8Rng::seed_from_u64(seed))
}

/// Writes the dump. Each method gets a fresh clone of `rng`, as in the
/// simulator.
pub fn render<R: Rng + Clone>(input: &TraceInput, methods: &[Method], rng: &R) -> Result<String> {
    let s = &input.sample;
    let n = s.projects();
    if n > MAX_PROJECTS {
        return Err(Error::config(
            "n",
            format!("trace prints at most {MAX_PROJECTS} projects, got {n}"),
        ));
    }
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "# {}", input.title);
    let _ = writeln!(
        w,
        "projects {n}, agents {}, n* {}, mode {}",
        s.agents(),
        input.n_star,
        input.mode
    );
    let _ = writeln!(w, "\n## evaluations (perceived value, sigma)");
    let _ = write!(w, "{:>8} {:>8}", "project", "true");
    for l in 0..s.agents() {
        let _ = write!(w, " {:>18}", format!("agent {}", l + 1));
    }
    let _ = writeln!(w);
    for i in 0..n {
        let _ = write!(w, "{:>8} {:>8.3}", i + 1, input.values.get(i).copied().unwrap_or(f64::NAN));
        for l in 0..s.agents() {
            let _ = write!(w, " {:>18}", format!("{:.4} +- {:.4}", s.perceived(i, l), s.sigma(i, l)));
        }
        let _ = writeln!(w);
    }
    let mut per_agent = Vec::with_capacity(s.agents());
    for l in 0..s.agents() {
        let m = agent_win_matrix(s, l, &input.mode, None)?;
        let _ = writeln!(w, "\n## agent {} win probabilities", l + 1);
        matrix(w, &m);
        per_agent.push(m);
    }
    let _ = writeln!(w, "\n## aggregated win probabilities");
    matrix(w, &aggregate_win_matrices(&per_agent)?);

    for &method in methods {
        let mut method_rng = rng.clone();
        let r = run_method(method, s, &input.mode, input.n_star, &input.solver, &mut method_rng)?;
        let _ = writeln!(w, "\n## {method}");
        let _ = writeln!(w, "ranking   {}", labels(r.ranking.iter().copied()));
        let _ = writeln!(w, "selected  {}", labels(r.selected.iter().copied()));
        let perf: f64 = r.selected.iter().map(|&i| input.values[i]).sum();
        let _ = writeln!(w, "value     {perf}");
        if let Some(scores) = &r.scores {
            let shown: Vec<String> = scores.iter().map(|x| format!("{x:.4}")).collect();
            let _ = writeln!(w, "scores    {}", shown.join(" "));
        }
        let _ = writeln!(w, "ledger    {} pairs: {}", r.comparisons.count(), pairs(&r.comparisons));
        for (k, phase) in r.phases.iter().enumerate() {
            let _ = writeln!(w, "phase {}   {} pairs: {}", k + 1, phase.count(), pairs(phase));
        }
    }
    Ok(out)
}

fn labels(it: impl Iterator<Item = usize>) -> String {
    it.map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" ")
}

fn pairs(l: &ComparisonLedger) -> String {
    l.pairs().map(|(a, b)| format!("{{{},{}}}", a + 1, b + 1)).collect::<Vec<_>>().join(" ")
}

/// Row `i`, column `j` holds `w_ij`; `.` marks the diagonal and unsampled
/// pairs.
fn matrix(w: &mut String, m: &WinMatrix) {
    let _ = write!(w, "{:>4}", "");
    for j in 0..m.n() {
        let _ = write!(w, " {:>9}", j + 1);
    }
    let _ = writeln!(w);
    for i in 0..m.n() {
        let _ = write!(w, "{:>4}", i + 1);
        for j in 0..m.n() {
            if i != j && m.is_sampled(i, j) {
                let _ = write!(w, " {:>9.6}", m.get(i, j));
            } else {
                let _ = write!(w, " {:>9}", ".");
            }
        }
        let _ = writeln!(w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_shows_the_quoted_probabilities() {
        let out = trace_fixture(Fixture::WorkedExample, &Method::ALL, 1).unwrap();
        for v in ["0.2024", "0.4338", "0.2397"] {
            assert!(out.contains(v), "{v} missing from\n{out}");
        }
        assert!(out.contains("## Quicksort\nranking   3 2 1"), "{out}");
    }

    #[test]
    fn two_phase_phases_cover_all_three_pairs() {
        let out = trace_fixture(Fixture::WorkedExample, &[Method::TwoPhaseBT], 9).unwrap();
        assert!(out.contains("phase 1   3 pairs"), "{out}");
        assert!(out.contains("ledger    3 pairs: {1,2} {1,3} {2,3}"), "{out}");
    }

    #[test]
    fn zero_noise_matrix_is_a_step() {
        let out = trace_fixture(Fixture::ZeroNoise, &[Method::Quicksort], 1).unwrap();
        assert!(out.contains("1.000000") && out.contains("0.000000"));
        assert!(!out.contains("0.500000"));
        assert!(out.contains("selected  5 6 7 8"), "{out}");
    }

    #[test]
    fn refuses_large_portfolios() {
        let cfg = ExperimentConfig::default();
        assert!(matches!(trace_trial(&cfg, 0, 0), Err(Error::Config { key, .. }) if key == "n"));
    }

    #[test]
    fn trial_trace_matches_the_simulator() {
        let cfg = ExperimentConfig {
            n: 6,
            n_star: 3,
            ..ExperimentConfig::default()
        };
        let out = trace_trial(&cfg, 4, 2).unwrap();
        for r in crate::simulator::run_trial(&cfg, 4, 2).unwrap() {
            let section = out.split(&format!("## {}\n", r.method)).nth(1).unwrap();
            assert!(section.contains(&format!("value     {}\n", r.performance)), "{}", r.method);
        }
    }
}

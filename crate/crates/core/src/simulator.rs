//! Deterministic Monte Carlo harness.
//!
//! Every `(beta, trial)` cell gets its own ChaCha stream derived from the
//! master seed, so results do not depend on thread count or scheduling.
//! All methods in a trial see the same project types and the same noisy
//! evaluations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::aggregation::{run_method, Method};
use crate::btcore::SolverConfig;
use crate::error::{Error, Result};
use crate::portfolio::{make_panel, sample_evaluations, EvaluationSample, Portfolio, ProbabilityMode};

/// How true project values are assigned.
#[derive(Clone, Debug, PartialEq)]
pub enum ValueRule {
    /// `v_i = i` for `i = 1..=n`.
    Index,
    Explicit(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Number of projects.
    pub n: usize,
    /// Number of agents.
    pub agents: usize,
    /// Number of projects to select.
    pub n_star: usize,
    pub beta_grid: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub mode: ProbabilityMode<f64>,
    pub methods: Vec<Method>,
    pub values: ValueRule,
    pub t_min: f64,
    pub t_max: f64,
    /// Mean expertise.
    pub e_mid: f64,
    /// Replace every evaluation by the truth (all sigmas zero).
    pub zero_noise: bool,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    pub solver: SolverConfig<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 30,
            agents: 3,
            n_star: 15,
            beta_grid: (0..=10).map(f64::from).collect(),
            trials: 10_000,
            master_seed: 20_250_101,
            mode: ProbabilityMode::Continuous,
            methods: Method::ALL.to_vec(),
            values: ValueRule::Index,
            t_min: 0.0,
            t_max: 10.0,
            e_mid: 5.0,
            zero_noise: false,
            threads: 0,
            solver: SolverConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Checks the cross-field constraints. Errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("n", "need at least one project"));
        }
        if self.agents == 0 {
            return Err(Error::config("agents", "need at least one agent"));
        }
        if self.n_star == 0 || self.n_star > self.n {
            return Err(Error::config("n_star", format!("must lie in 1..={}", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "need at least one trial"));
        }
        if self.beta_grid.is_empty() {
            return Err(Error::config("beta_grid", "grid is empty"));
        }
        if let Some(b) = self.beta_grid.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
            return Err(Error::config("beta_grid", format!("knowledge breadth {b} must be finite and nonnegative")));
        }
        if self.methods.is_empty() {
            return Err(Error::config("methods", "no methods selected"));
        }
        if !(self.t_min.is_finite() && self.t_max.is_finite() && self.t_min <= self.t_max) {
            return Err(Error::config("t_min", format!("type range [{}, {}] is invalid", self.t_min, self.t_max)));
        }
        if !self.e_mid.is_finite() {
            return Err(Error::config("e_mid", "must be finite"));
        }
        if let ValueRule::Explicit(v) = &self.values {
            if v.len() != self.n {
                return Err(Error::config("values", format!("{} values given for n = {}", v.len(), self.n)));
            }
            if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(Error::config("values", "values must be positive"));
            }
        }
        Ok(())
    }

    pub fn true_values(&self) -> Vec<f64> {
        match &self.values {
            ValueRule::Index => (1..=self.n).map(|i| i as f64).collect(),
            ValueRule::Explicit(v) => v.clone(),
        }
    }

    /// Largest achievable performance: the `n*` best true values.
    pub fn ceiling(&self) -> f64 {
        let mut v = self.true_values();
        v.sort_by(|a, b| b.total_cmp(a));
        v.iter().take(self.n_star).sum()
    }

    /// Methods in report order (ascending by name).
    fn report_methods(&self) -> Vec<Method> {
        let mut m = self.methods.clone();
        m.sort_by_key(|m| m.token());
        m.dedup();
        m
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the `(beta_index, trial_index)` cell:
/// `mix(mix(mix(master) ^ beta_index) ^ trial_index)` with SplitMix64's
/// finalizer as `mix`.
pub fn trial_seed(master_seed: u64, beta_index: usize, trial_index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ beta_index as u64) ^ trial_index as u64)
}

/// Separate stream for the methods that randomize internally, so a trial's
/// outcome for one method does not depend on which other methods run.
const METHOD_STREAM: u64 = 0x6D65_7468_6F64_7321;

/// Fresh generator for a method's internal randomness in the given cell.
pub(crate) fn method_rng(master_seed: u64, beta_index: usize, trial_index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(trial_seed(master_seed, beta_index, trial_index) ^ METHOD_STREAM))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub beta: f64,
    pub method: Method,
    /// Sum of the true values of the selected projects.
    pub performance: f64,
    pub comparison_count: usize,
}

/// The evaluation sample and portfolio drawn for one cell.
pub fn draw_trial(cfg: &ExperimentConfig, beta_index: usize, trial_index: usize) -> Result<(Portfolio, EvaluationSample)> {
    let beta = *cfg
        .beta_grid
        .get(beta_index)
        .ok_or_else(|| Error::usage(format!("beta index {beta_index} out of range")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.master_seed, beta_index, trial_index));
    let portfolio = Portfolio::with_random_types(&cfg.true_values(), cfg.t_min, cfg.t_max, &mut rng)?;
    let panel = make_panel(cfg.agents, beta, cfg.e_mid)?;
    let sample = if cfg.zero_noise {
        EvaluationSample::truthful(&portfolio, &panel)
    } else {
        sample_evaluations(&portfolio, &panel, &mut rng)
    };
    Ok((portfolio, sample))
}

/// Runs every configured method on one trial's sample.
pub fn run_trial(cfg: &ExperimentConfig, beta_index: usize, trial_index: usize) -> Result<Vec<TrialResult>> {
    let (portfolio, sample) = draw_trial(cfg, beta_index, trial_index)?;
    let beta = cfg.beta_grid[beta_index];
    cfg.methods
        .iter()
        .map(|&method| {
            let mut rng = method_rng(cfg.master_seed, beta_index, trial_index);
            let r = run_method(method, &sample, &cfg.mode, cfg.n_star, &cfg.solver, &mut rng)?;
            let performance = r.selected.iter().map(|&i| portfolio.projects()[i].value).sum();
            Ok(TrialResult {
                beta,
                method,
                performance,
                comparison_count: r.comparisons.count(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub beta: f64,
    pub method: Method,
    pub mean_performance: f64,
    pub stderr_performance: f64,
    pub mean_comparisons: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Per-`(beta, method)` summary, beta-major, methods by ascending name.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerformanceReport {
    pub rows: Vec<ReportRow>,
    /// Methods within a trial shared one evaluation sample.
    pub common_random_numbers: bool,
}

pub const CSV_HEADER: &str = "beta,method,mean_performance,stderr_performance,mean_comparisons,trials,seed";

impl PerformanceReport {
    pub fn row(&self, beta: f64, method: Method) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.beta == beta && r.method == method)
    }

    pub fn betas(&self) -> Vec<f64> {
        let mut b: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !b.contains(&r.beta) {
                b.push(r.beta);
            }
        }
        b
    }

    /// CSV with [`CSV_HEADER`]; floats use the shortest representation
    /// that round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{:?},{},{:?},{:?},{:?},{},{}\n",
                r.beta, r.method, r.mean_performance, r.stderr_performance, r.mean_comparisons, r.trials, r.seed
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Mean and standard error in index order.
fn summarize(xs: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let count = xs.len() as f64;
    let mean = xs.clone().sum::<f64>() / count;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

/// Runs `cfg.trials` trials at every beta and summarizes them.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<PerformanceReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::usage(format!("thread pool: {e}")))?;
    let methods = cfg.report_methods();
    let mut rows = Vec::with_capacity(cfg.beta_grid.len() * methods.len());
    for (b, &beta) in cfg.beta_grid.iter().enumerate() {
        let trials: Vec<Vec<TrialResult>> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| run_trial(cfg, b, t))
                .collect::<Result<_>>()
        })?;
        for &method in &methods {
            let slot = cfg.methods.iter().position(|&m| m == method).expect("method configured");
            let (mean_performance, stderr_performance) = summarize(trials.iter().map(|t| t[slot].performance));
            let (mean_comparisons, _) = summarize(trials.iter().map(|t| t[slot].comparison_count as f64));
            rows.push(ReportRow {
                beta,
                method,
                mean_performance,
                stderr_performance,
                mean_comparisons,
                trials: cfg.trials,
                seed: cfg.master_seed,
            });
        }
    }
    Ok(PerformanceReport {
        rows,
        common_random_numbers: true,
    })
}

/// A named yes/no statistical statement about a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Finding {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Whether `better` beats `worse` by at least `sigmas` pooled standard
/// errors, `sqrt(se_a^2 + se_b^2)`. A zero difference never passes.
pub fn separation(name: String, better: &ReportRow, worse: &ReportRow, sigmas: f64) -> Finding {
    let diff = better.mean_performance - worse.mean_performance;
    let pooled = better.stderr_performance.hypot(worse.stderr_performance);
    let passed = diff > 0.0 && diff >= sigmas * pooled;
    let z = if pooled > 0.0 { diff / pooled } else { f64::NAN };
    Finding {
        name,
        passed,
        detail: format!(
            "{:.4} vs {:.4}: diff {:.4}, pooled stderr {:.4}, z = {:.2}",
            better.mean_performance, worse.mean_performance, diff, pooled, z
        ),
    }
}

fn require<'a>(report: &'a PerformanceReport, beta: f64, method: Method) -> Result<&'a ReportRow> {
    report
        .row(beta, method)
        .ok_or_else(|| Error::usage(format!("report has no row for {method} at beta = {beta}")))
}

/// Qualitative method orderings as 3-sigma statements: at every beta >= 8
/// Quicksort, TwoPhaseQuicksort and BradleyTerry each beat ArithmeticMean
/// and Borda; at every beta <= 5 TwoPhaseBT trails both.
pub fn ordering_checks(report: &PerformanceReport) -> Result<Vec<Finding>> {
    const SIGMAS: f64 = 3.0;
    let betas = report.betas();
    let high: Vec<f64> = betas.iter().copied().filter(|&b| b >= 8.0).collect();
    let low: Vec<f64> = betas.iter().copied().filter(|&b| b <= 5.0).collect();
    if high.is_empty() || low.is_empty() {
        return Err(Error::usage("ordering checks need beta values <= 5 and >= 8"));
    }
    let baselines = [Method::ArithmeticMean, Method::Borda];
    let mut findings = Vec::new();
    for &beta in &high {
        for better in [Method::Quicksort, Method::TwoPhaseQuicksort, Method::BradleyTerry] {
            for worse in baselines {
                findings.push(separation(
                    format!("beta={beta}: {better} > {worse}"),
                    require(report, beta, better)?,
                    require(report, beta, worse)?,
                    SIGMAS,
                ));
            }
        }
    }
    for &beta in &low {
        for better in baselines {
            findings.push(separation(
                format!("beta={beta}: {} < {better}", Method::TwoPhaseBT),
                require(report, beta, better)?,
                require(report, beta, Method::TwoPhaseBT)?,
                SIGMAS,
            ));
        }
    }
    Ok(findings)
}

/// For every method present in both reports at `beta`, whether the larger
/// panel scores higher by `sigmas` pooled standard errors.
pub fn compare_panel_sizes(
    smaller: &PerformanceReport,
    larger: &PerformanceReport,
    beta: f64,
    sigmas: f64,
) -> Result<Vec<Finding>> {
    let mut findings = Vec::new();
    for small in smaller.rows.iter().filter(|r| r.beta == beta) {
        let large = require(larger, beta, small.method)?;
        findings.push(separation(
            format!("beta={beta}: {} improves with more agents", small.method),
            large,
            small,
            sigmas,
        ));
    }
    if findings.is_empty() {
        return Err(Error::usage(format!("no rows at beta = {beta}")));
    }
    Ok(findings)
}

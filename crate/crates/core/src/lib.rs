//! Portfolio selection from noisy evaluations.
//!
//! Agents with differing expertise evaluate a portfolio of projects with
//! Gaussian noise. Their opinions are combined by one of six rules (value
//! averaging, Borda count, Quicksort over aggregated win probabilities,
//! Bradley-Terry on all pairs, and two cyclic-sampling Bradley-Terry
//! variants) and the best `n*` projects are selected. The [`simulator`]
//! estimates the expected true value of that selection by Monte Carlo.
//!
//! The numeric core is generic over [`Real`]; the aliases below fix it to
//! `f64` or `f32`.

pub mod aggregation;
pub mod btcore;
pub mod config;
mod error;
pub mod portfolio;
pub mod scalar;
pub mod simulator;
pub mod trace;
pub mod validation;

pub use error::{Error, Result};
pub use scalar::{Real, Weight};

pub use aggregation::{ComparisonLedger, Method, SelectionResult, WinOracle};
pub use btcore::{rank_by_strength, solve, Scheme, SolverConfig, StrengthVector, WinMatrix};
pub use portfolio::{AgentPanel, EvaluationSample, Levels, Portfolio, ProbabilityMode};
pub use simulator::{ExperimentConfig, PerformanceReport, ReportRow, TrialResult};

pub type WinMatrix64 = WinMatrix<f64>;
pub type WinMatrix32 = WinMatrix<f32>;
pub type Strengths64 = StrengthVector<f64>;
pub type Strengths32 = StrengthVector<f32>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolverConfig32 = SolverConfig<f32>;
pub type Portfolio64 = Portfolio<f64>;
pub type Sample64 = EvaluationSample<f64>;
pub type Sample32 = EvaluationSample<f32>;
pub type Selection64 = SelectionResult<f64>;

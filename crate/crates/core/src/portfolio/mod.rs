//! Projects, agents, noisy evaluations and per-agent win probabilities.

mod panel;
mod probability;
mod sample;

pub use panel::{make_panel, AgentPanel, Portfolio, Project};
pub use probability::{
    agent_pair_probability, agent_win_matrix, aggregate_win_matrices, normal_cdf, quantize,
    win_probability, win_probability_using, Levels, ProbabilityMode,
};
pub use sample::{sample_evaluations, EvaluationSample};

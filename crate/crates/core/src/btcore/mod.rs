//! Bradley-Terry strength estimation from a (possibly sparse) win matrix.

mod matrix;
mod solver;
mod strength;

pub use matrix::WinMatrix;
pub use solver::{
    log_likelihood, newman_gauss_seidel_step, newman_step, solve, sweep, zermelo_step, Scheme,
    SolverConfig, SweepReport,
};
pub use strength::{rank_by_strength, StrengthVector};

#[cfg(test)]
mod tests;

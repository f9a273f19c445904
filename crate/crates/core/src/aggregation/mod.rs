//! The six selection rules and the comparison bookkeeping they share.

mod ledger;
mod methods;
mod oracle;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use ledger::ComparisonLedger;
pub use methods::{
    arithmetic_mean_select, borda_select, bt_full_select, cyclic_pairs, quicksort_rank,
    quicksort_rank_from, quicksort_select, run_method, select_top, two_phase_bt_select,
    two_phase_bt_with_order, two_phase_quicksort_select,
};
pub use oracle::WinOracle;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    ArithmeticMean,
    Borda,
    Quicksort,
    BradleyTerry,
    TwoPhaseBT,
    TwoPhaseQuicksort,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::ArithmeticMean,
        Method::Borda,
        Method::Quicksort,
        Method::BradleyTerry,
        Method::TwoPhaseBT,
        Method::TwoPhaseQuicksort,
    ];

    /// Stable name used in reports and configuration.
    pub fn token(self) -> &'static str {
        match self {
            Method::ArithmeticMean => "ArithmeticMean",
            Method::Borda => "Borda",
            Method::Quicksort => "Quicksort",
            Method::BradleyTerry => "BradleyTerry",
            Method::TwoPhaseBT => "TwoPhaseBT",
            Method::TwoPhaseQuicksort => "TwoPhaseQuicksort",
        }
    }

    /// Whether the method works from aggregated win probabilities.
    pub fn is_pairwise(self) -> bool {
        !matches!(self, Method::ArithmeticMean | Method::Borda)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Method::ALL
            .into_iter()
            .find(|m| m.token().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::usage(format!("unknown method `{s}`")))
    }
}

/// Outcome of one selection rule on one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult<T = f64> {
    pub method: Method,
    /// Project indices, best first.
    pub ranking: Vec<usize>,
    /// The first `n*` entries of `ranking`.
    pub selected: BTreeSet<usize>,
    pub comparisons: ComparisonLedger,
    /// Aggregated values (arithmetic mean) or Borda scores, by project.
    pub scores: Option<Vec<T>>,
    /// Pairs queried by each phase of a two-phase rule; empty otherwise.
    pub phases: Vec<ComparisonLedger>,
}

use super::ledger::ComparisonLedger;
use crate::btcore::WinMatrix;
use crate::error::{Error, Result};
use crate::portfolio::{agent_pair_probability, EvaluationSample, ProbabilityMode};
use crate::scalar::Real;

/// Lazy, memoized access to the aggregated win matrix of one sample.
///
/// The first query of a pair asks every agent about it, averages their
/// answers and logs the pair in the ledger. Later queries are free.
#[derive(Clone, Debug)]
pub struct WinOracle<'a, T: Real = f64> {
    sample: &'a EvaluationSample<T>,
    mode: &'a ProbabilityMode<T>,
    cache: Vec<Option<(T, T)>>,
    ledger: ComparisonLedger,
}

impl<'a, T: Real> WinOracle<'a, T> {
    pub fn new(sample: &'a EvaluationSample<T>, mode: &'a ProbabilityMode<T>) -> Self {
        let n = sample.projects();
        Self {
            sample,
            mode,
            cache: vec![None; n * n],
            ledger: ComparisonLedger::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.sample.projects()
    }

    /// Aggregated probability that `i` beats `j`.
    pub fn query(&mut self, i: usize, j: usize) -> T {
        assert!(i != j && i < self.n() && j < self.n(), "invalid pair ({i},{j})");
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let slot = lo * self.n() + hi;
        let (forward, backward) = match self.cache[slot] {
            Some(pair) => pair,
            None => {
                let agents = self.sample.agents();
                let (mut a, mut b, mut count) = (T::zero(), T::zero(), T::zero());
                for agent in 0..agents {
                    let p = agent_pair_probability(self.sample, agent, lo, hi, self.mode);
                    a = a + p;
                    b = b + (T::one() - p);
                    count = count + T::one();
                }
                let pair = (a / count, b / count);
                self.cache[slot] = Some(pair);
                self.ledger.insert(lo, hi);
                pair
            }
        };
        if i == lo {
            forward
        } else {
            backward
        }
    }

    /// Aggregated matrix restricted to `pairs`; everything else stays
    /// unsampled.
    pub fn matrix(&mut self, pairs: &[(usize, usize)]) -> Result<WinMatrix<T>> {
        let n = self.n();
        let mut m = WinMatrix::new(n);
        for &(i, j) in pairs {
            if i == j || i >= n || j >= n {
                return Err(Error::usage(format!("invalid pair ({i},{j}) for {n} projects")));
            }
            let (a, b) = (self.query(i, j), self.query(j, i));
            m.set_pair(i, j, a, b)?;
        }
        Ok(m)
    }

    pub fn ledger(&self) -> &ComparisonLedger {
        &self.ledger
    }

    pub fn into_ledger(self) -> ComparisonLedger {
        self.ledger
    }
}

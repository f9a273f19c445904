use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::panel::{AgentPanel, Portfolio};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Every agent's perceived value and noise level for every project, stored
/// project-major.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationSample<T = f64> {
    projects: usize,
    agents: usize,
    perceived: Vec<T>,
    sigma: Vec<T>,
}

impl<T: Real> EvaluationSample<T> {
    /// Builds a sample from per-project rows of length `agents`.
    pub fn from_rows(perceived: &[Vec<T>], sigma: &[Vec<T>]) -> Result<Self> {
        let projects = perceived.len();
        if projects == 0 || sigma.len() != projects {
            return Err(Error::usage("perceived and sigma need the same nonzero number of rows"));
        }
        let agents = perceived[0].len();
        if agents == 0 {
            return Err(Error::usage("sample needs at least one agent"));
        }
        for (i, (p, s)) in perceived.iter().zip(sigma).enumerate() {
            if p.len() != agents || s.len() != agents {
                return Err(Error::usage(format!("row {i} does not have {agents} agents")));
            }
            if s.iter().any(|&x| !(x >= T::zero())) {
                return Err(Error::usage(format!("row {i} has a negative sigma")));
            }
        }
        Ok(Self {
            projects,
            agents,
            perceived: perceived.concat(),
            sigma: sigma.concat(),
        })
    }

    /// Every agent sees the true values with zero uncertainty.
    pub fn truthful(portfolio: &Portfolio<T>, panel: &AgentPanel<T>) -> Self {
        let agents = panel.len();
        let mut perceived = Vec::with_capacity(portfolio.len() * agents);
        for p in portfolio.projects() {
            perceived.extend(std::iter::repeat_n(p.value, agents));
        }
        Self {
            projects: portfolio.len(),
            agents,
            sigma: vec![T::zero(); perceived.len()],
            perceived,
        }
    }

    pub fn projects(&self) -> usize {
        self.projects
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    #[inline]
    pub fn perceived(&self, project: usize, agent: usize) -> T {
        self.perceived[project * self.agents + agent]
    }

    #[inline]
    pub fn sigma(&self, project: usize, agent: usize) -> T {
        self.sigma[project * self.agents + agent]
    }

    /// One agent's perceived values, indexed by project.
    pub fn agent_values(&self, agent: usize) -> Vec<T> {
        (0..self.projects).map(|i| self.perceived(i, agent)).collect()
    }
}

/// Draws `v_il = v_i + eta_il` with `eta_il ~ N(0, sigma_il^2)` and
/// `sigma_il = |t_i - e_l|`, project by project, agent by agent.
pub fn sample_evaluations<T, R>(portfolio: &Portfolio<T>, panel: &AgentPanel<T>, rng: &mut R) -> EvaluationSample<T>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let agents = panel.len();
    let size = portfolio.len() * agents;
    let mut perceived = Vec::with_capacity(size);
    let mut sigma = Vec::with_capacity(size);
    for p in portfolio.projects() {
        for &e in &panel.expertise {
            let s = (p.kind - e).abs();
            let z: T = StandardNormal.sample(rng);
            perceived.push(p.value + s * z);
            sigma.push(s);
        }
    }
    EvaluationSample {
        projects: portfolio.len(),
        agents,
        perceived,
        sigma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portfolio::{make_panel, Project};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn aligned_expertise_sees_the_truth() {
        let portfolio = Portfolio::new(
            vec![
                Project { kind: 5.0, value: 1.0 },
                Project { kind: 5.0, value: 2.0 },
                Project { kind: 5.0, value: 3.0 },
            ],
            0.0,
            10.0,
        )
        .unwrap();
        let panel = make_panel(3, 0.0, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = sample_evaluations(&portfolio, &panel, &mut rng);
        for i in 0..3 {
            for l in 0..3 {
                assert_eq!(s.perceived(i, l), (i + 1) as f64);
                assert_eq!(s.sigma(i, l), 0.0);
            }
        }
        assert_eq!(s, EvaluationSample::truthful(&portfolio, &panel));
    }

    #[test]
    fn sigma_is_distance_to_expertise() {
        let portfolio = Portfolio::new(
            vec![Project { kind: 1.0, value: 4.0 }, Project { kind: 9.5, value: 2.0 }],
            0.0,
            10.0,
        )
        .unwrap();
        let panel = make_panel(2, 2.0, 5.0).unwrap();
        let s = sample_evaluations(&portfolio, &panel, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(s.sigma(0, 0), 2.0);
        assert_eq!(s.sigma(0, 1), 6.0);
        assert_eq!(s.sigma(1, 0), 6.5);
        assert_eq!(s.sigma(1, 1), 2.5);
        assert_eq!(s.agent_values(1).len(), 2);
    }

    #[test]
    fn noise_has_the_stated_moments() {
        let draws = 100_000;
        let portfolio = Portfolio::new(vec![Project { kind: 7.0, value: 10.0 }], 0.0, 10.0).unwrap();
        let panel = make_panel(1, 0.0, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let noise: Vec<f64> = (0..draws)
            .map(|_| sample_evaluations(&portfolio, &panel, &mut rng).perceived(0, 0) - 10.0)
            .collect();
        let mean = noise.iter().sum::<f64>() / draws as f64;
        let var = noise.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var.sqrt() - 2.0).abs() < 0.02, "std {}", var.sqrt());
    }

    #[test]
    fn same_seed_same_sample() {
        let values: Vec<f64> = (1..=10).map(f64::from).collect();
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        let pa = Portfolio::with_random_types(&values, 0.0, 10.0, &mut a).unwrap();
        let pb = Portfolio::with_random_types(&values, 0.0, 10.0, &mut b).unwrap();
        let panel = make_panel(3, 4.0, 5.0).unwrap();
        assert_eq!(sample_evaluations(&pa, &panel, &mut a), sample_evaluations(&pb, &panel, &mut b));
    }

    #[test]
    fn from_rows_validates_shape() {
        assert!(EvaluationSample::<f64>::from_rows(&[], &[]).is_err());
        assert!(EvaluationSample::from_rows(&[vec![1.0]], &[vec![-1.0]]).is_err());
        assert!(EvaluationSample::from_rows(&[vec![1.0], vec![1.0, 2.0]], &[vec![0.0], vec![0.0]]).is_err());
        let s = EvaluationSample::from_rows(&[vec![1.0, 2.0]], &[vec![0.5, 0.0]]).unwrap();
        assert_eq!((s.projects(), s.agents()), (1, 2));
        assert_eq!(s.perceived(0, 1), 2.0);
    }
}

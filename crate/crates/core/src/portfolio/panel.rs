use rand::Rng;
use rand_distr::{Distribution, Uniform};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Project<T = f64> {
    /// Position on the type axis; evaluation noise grows with the distance
    /// to an agent's expertise.
    pub kind: T,
    /// True value, unknown to the agents.
    pub value: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Portfolio<T = f64> {
    projects: Vec<Project<T>>,
    t_min: T,
    t_max: T,
}

impl<T: Real> Portfolio<T> {
    pub fn new(projects: Vec<Project<T>>, t_min: T, t_max: T) -> Result<Self> {
        if projects.is_empty() {
            return Err(Error::usage("portfolio needs at least one project"));
        }
        if !(t_min <= t_max) {
            return Err(Error::usage(format!("type range [{t_min}, {t_max}] is empty")));
        }
        for (i, p) in projects.iter().enumerate() {
            if !(p.kind >= t_min && p.kind <= t_max) {
                return Err(Error::usage(format!(
                    "project {i} has type {} outside [{t_min}, {t_max}]",
                    p.kind
                )));
            }
            if !(p.value > T::zero()) {
                return Err(Error::usage(format!("project {i} has nonpositive value {}", p.value)));
            }
        }
        Ok(Self {
            projects,
            t_min,
            t_max,
        })
    }

    /// Projects with the given values and types drawn uniformly from
    /// `[t_min, t_max]`.
    pub fn with_random_types<R: Rng + ?Sized>(values: &[T], t_min: T, t_max: T, rng: &mut R) -> Result<Self>
    where
        T: rand_distr::uniform::SampleUniform,
    {
        if !(t_min <= t_max) {
            return Err(Error::usage(format!("type range [{t_min}, {t_max}] is empty")));
        }
        let dist = Uniform::new_inclusive(t_min, t_max)
            .map_err(|e| Error::usage(format!("type distribution: {e}")))?;
        let projects = values
            .iter()
            .map(|&value| Project {
                kind: dist.sample(rng),
                value,
            })
            .collect();
        Self::new(projects, t_min, t_max)
    }

    pub fn projects(&self) -> &[Project<T>] {
        &self.projects
    }

    pub fn len(&self) -> usize {
        self.projects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projects.is_empty()
    }

    pub fn values(&self) -> Vec<T> {
        self.projects.iter().map(|p| p.value).collect()
    }

    pub fn type_range(&self) -> (T, T) {
        (self.t_min, self.t_max)
    }

    /// Sum of the `k` largest true values: the best any selection can do.
    pub fn best_total(&self, k: usize) -> T {
        let mut v = self.values();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        v.into_iter().take(k).sum()
    }
}

/// Agents' expertise levels, evenly spread over `[e_mid - beta, e_mid + beta]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentPanel<T = f64> {
    pub expertise: Vec<T>,
    pub beta: T,
    pub e_mid: T,
}

impl<T: Real> AgentPanel<T> {
    pub fn len(&self) -> usize {
        self.expertise.len()
    }

    pub fn is_empty(&self) -> bool {
        self.expertise.is_empty()
    }
}

/// `e_l = e_mid - beta (N + 1 - 2l) / (N - 1)` for `l = 1..=N`. A single
/// agent sits at `e_mid`.
pub fn make_panel<T: Real>(agents: usize, beta: T, e_mid: T) -> Result<AgentPanel<T>> {
    if agents == 0 {
        return Err(Error::usage("panel needs at least one agent"));
    }
    if !(beta >= T::zero()) {
        return Err(Error::usage(format!("knowledge breadth must be nonnegative, got {beta}")));
    }
    let expertise = if agents == 1 {
        vec![e_mid]
    } else {
        let spread = T::count(agents - 1);
        (1..=agents)
            .map(|l| {
                let offset = T::count(agents + 1) - T::count(2 * l);
                e_mid - beta * offset / spread
            })
            .collect()
    };
    Ok(AgentPanel {
        expertise,
        beta,
        e_mid,
    })
}

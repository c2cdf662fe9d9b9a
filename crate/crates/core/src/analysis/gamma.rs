//! Empirical estimation of a policy's guarantee by scanning element
//! distributions and keeping the worst optimum-relative ratio.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::analysis::brute_force_opt;
use crate::error::{Error, Result};
use crate::oracle::{EvalBudget, SetFunction};
use crate::policies::{run_policy, PolicySpec, ProblemInstance};
use crate::set::ElementSet;
use crate::tol::VALUE_EPS;

/// Worst ratio seen over a family of element distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaEstimate {
    pub min_ratio: f64,
    /// Ratio of each distribution, in the order supplied.
    pub ratios: Vec<f64>,
}

/// Runs the policy and the exact optimum on each supplied distribution of
/// elements over agents and reports the worst value ratio.
///
/// A distribution with optimum zero has policy value zero too, and counts as
/// ratio one.
pub fn min_ratio_over<I>(
    objective: &Arc<dyn SetFunction>,
    distributions: I,
    k: usize,
    m: usize,
    spec: PolicySpec,
    budget: EvalBudget,
) -> Result<GammaEstimate>
where
    I: IntoIterator<Item = Vec<ElementSet>>,
{
    let mut ratios = Vec::new();
    for agent_elements in distributions {
        let instance = ProblemInstance::new(objective.clone(), agent_elements, k, m)?;
        let trace = run_policy(&instance, spec, budget)?;
        let opt = brute_force_opt(&instance, budget)?;
        let ratio = if opt.value <= VALUE_EPS { 1.0 } else { trace.total / opt.value };
        ratios.push(ratio);
    }
    if ratios.is_empty() {
        return Err(Error::InvalidSpec("no element distributions supplied".into()));
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(GammaEstimate { min_ratio, ratios })
}

/// Estimates the policy's guarantee on `objective` by sampling seeded random
/// distributions of the ground set over `n_agents` agents.
///
/// Each element lands in each agent's set with probability one half,
/// independently.  Distributions are drawn from one stream in order, so for
/// a fixed seed the estimate can only decrease as `n_samples` grows.
pub fn estimate_policy_guarantee(
    objective: &Arc<dyn SetFunction>,
    n_agents: usize,
    k: usize,
    m: usize,
    spec: PolicySpec,
    n_samples: usize,
    seed: u64,
    budget: EvalBudget,
) -> Result<GammaEstimate> {
    if n_agents == 0 {
        return Err(Error::InvalidSpec("need at least one agent".into()));
    }
    if n_samples == 0 {
        return Err(Error::InvalidSpec("need at least one sample".into()));
    }
    let ground = objective.ground_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut distributions = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let mut agents = Vec::with_capacity(n_agents);
        for _ in 0..n_agents {
            let mut own = ElementSet::empty();
            for id in 0..ground as u32 {
                if rng.gen::<bool>() {
                    own = own.with(id);
                }
            }
            agents.push(own);
        }
        distributions.push(agents);
    }
    min_ratio_over(objective, distributions, k, m, spec, budget)
}

//! Seeded random coverage instances for property sweeps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::CoverageFunction;
use crate::policies::ProblemInstance;
use crate::set::ElementSet;

/// Parameters for `gen_random_coverage`.  The same spec and seed always
/// produce byte-identical instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomCoverageSpec {
    pub n_agents: usize,
    /// Each agent draws between 1 and this many private elements.
    pub max_elems_per_agent: usize,
    pub n_cells: usize,
    /// Inclusive weight range for cells; the minimum must be positive so the
    /// optimum of a nonempty instance is never zero.
    pub weight_min: u64,
    pub weight_max: u64,
    pub k: usize,
    pub m: usize,
    pub seed: u64,
}

impl RandomCoverageSpec {
    fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return Err(Error::InvalidSpec("need at least one agent".into()));
        }
        if self.max_elems_per_agent == 0 {
            return Err(Error::InvalidSpec("agents need room for at least one element".into()));
        }
        if self.n_cells == 0 || self.n_cells > crate::objectives::MAX_CELLS {
            return Err(Error::InvalidSpec(format!(
                "cell count {} outside 1..={}",
                self.n_cells,
                crate::objectives::MAX_CELLS
            )));
        }
        if self.weight_min == 0 || self.weight_min > self.weight_max {
            return Err(Error::InvalidSpec(format!(
                "weight range {}..={} must be positive and ordered",
                self.weight_min, self.weight_max
            )));
        }
        if self.n_agents * self.max_elems_per_agent > crate::set::MAX_GROUND {
            return Err(Error::InvalidSpec(format!(
                "up to {} elements requested, more than the supported {}",
                self.n_agents * self.max_elems_per_agent,
                crate::set::MAX_GROUND
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidSpec("selection budget k must be positive".into()));
        }
        Ok(())
    }
}

/// A generated random instance with its concrete objective.
#[derive(Clone)]
pub struct RandomCoverage {
    pub spec: RandomCoverageSpec,
    pub instance: ProblemInstance,
    pub coverage: CoverageFunction,
}

/// Draws cell weights, then per agent a block of elements, each covering a
/// nonempty random cell subset.  Elements are numbered agent-major, so agent
/// sets are contiguous id ranges.
pub fn gen_random_coverage(spec: RandomCoverageSpec) -> Result<RandomCoverage> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let cell_weight: Vec<u64> =
        (0..spec.n_cells).map(|_| rng.gen_range(spec.weight_min..=spec.weight_max)).collect();

    let mut element_cells: Vec<Vec<u32>> = Vec::new();
    let mut agents = Vec::with_capacity(spec.n_agents);
    let all_cells: Vec<u32> = (0..spec.n_cells as u32).collect();
    for _ in 0..spec.n_agents {
        let n_elems = rng.gen_range(1..=spec.max_elems_per_agent);
        let mut own = ElementSet::empty();
        for _ in 0..n_elems {
            let size = rng.gen_range(1..=spec.n_cells);
            let mut deck = all_cells.clone();
            let (chosen, _) = deck.partial_shuffle(&mut rng, size);
            let mut cells: Vec<u32> = chosen.to_vec();
            cells.sort_unstable();
            own = own.with(element_cells.len() as u32);
            element_cells.push(cells);
        }
        agents.push(own);
    }

    let coverage = CoverageFunction::new(cell_weight, element_cells)?;
    let instance = ProblemInstance::new(
        std::sync::Arc::new(coverage.clone()),
        agents,
        spec.k,
        spec.m,
    )?;
    Ok(RandomCoverage { spec, instance, coverage })
}

//! Adversarial coverage instances on which the sequential greedy policies
//! land exactly on their guaranteed ratios.
//!
//! Both constructions share a layout over unit-weight cells.  Each of the
//! first `n - 1` agents holds three groups of elements:
//!
//! * "decoy" elements that cover a private cell block; the sequential policy
//!   picks these because they look as good as anything else and come first
//!   in the tie order,
//! * "bait" elements that the agent forwards as its message; their cells are
//!   duplicated inside the last agent's fallback set, so forwarding them is
//!   pure waste,
//! * "reserve" elements that cover a second private block; the optimum takes
//!   these instead of the decoys.
//!
//! The last agent then holds one wide element duplicating every decoy cell,
//! so the optimum can re-cover everything the decoys bought while the policy
//! gains nothing new from it.
//!
//! Variant A (requires `m * (n - 1) + 1 <= k`) makes the last agent's set
//! small enough to swallow whole; the achieved ratio is
//! `(k + m) * (n - 1) / ((2 * k + m) * (n - 1))`.  Variant B (requires
//! `m >= 1` and `m * (n - 1) >= k`) instead recycles the bait cells into a
//! block of exactly `k` cells duplicated by the last agent; the achieved
//! ratio is `n / (2 * n - 1)` independent of `k` and `m`.

use num::rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::CoverageFunction;
use crate::policies::ProblemInstance;
use crate::set::ElementSet;

/// Which adversarial construction to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorstCaseVariant {
    A,
    B,
}

impl std::fmt::Display for WorstCaseVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WorstCaseVariant::A => write!(f, "a"),
            WorstCaseVariant::B => write!(f, "b"),
        }
    }
}

impl std::str::FromStr for WorstCaseVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(WorstCaseVariant::A),
            "b" | "B" => Ok(WorstCaseVariant::B),
            other => Err(Error::InvalidSpec(format!(
                "unknown worst-case variant {other:?}; expected \"a\" or \"b\""
            ))),
        }
    }
}

/// Parameters of a worst-case instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorstCaseSpec {
    pub variant: WorstCaseVariant,
    pub n_agents: usize,
    pub k: usize,
    pub m: usize,
}

impl WorstCaseSpec {
    pub fn new(variant: WorstCaseVariant, n_agents: usize, k: usize, m: usize) -> Self {
        WorstCaseSpec { variant, n_agents, k, m }
    }

    /// Checks the variant's validity condition and the ground-set capacity.
    pub fn validate(&self) -> Result<()> {
        let (n, k, m) = (self.n_agents, self.k, self.m);
        if n < 2 {
            return Err(Error::InvalidSpec(format!(
                "worst-case instances need at least two agents, got {n}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidSpec("selection budget k must be positive".into()));
        }
        match self.variant {
            WorstCaseVariant::A => {
                if m * (n - 1) + 1 > k {
                    return Err(Error::InvalidSpec(format!(
                        "variant a needs m * (n - 1) + 1 <= k; got n = {n}, k = {k}, m = {m}"
                    )));
                }
            }
            WorstCaseVariant::B => {
                if m == 0 {
                    return Err(Error::InvalidSpec(
                        "variant b needs a positive message budget".into(),
                    ));
                }
                if m * (n - 1) < k {
                    return Err(Error::InvalidSpec(format!(
                        "variant b needs m * (n - 1) >= k; got n = {n}, k = {k}, m = {m}"
                    )));
                }
            }
        }
        let ground = match self.variant {
            WorstCaseVariant::A => (n - 1) * (2 * k + m) + 1 + m * (n - 1),
            WorstCaseVariant::B => (n - 1) * (2 * k + m) + k,
        };
        if ground > crate::set::MAX_GROUND {
            return Err(Error::InvalidSpec(format!(
                "instance needs {ground} elements, more than the supported {}",
                crate::set::MAX_GROUND
            )));
        }
        Ok(())
    }
}

/// A generated worst-case instance together with its bookkeeping.
#[derive(Clone)]
pub struct WorstCaseInstance {
    pub spec: WorstCaseSpec,
    pub instance: ProblemInstance,
    /// The same objective with its concrete type, for exact integer evaluation.
    pub coverage: CoverageFunction,
    /// Ratio the augmented policy achieves against the true optimum.
    pub expected_ratio: Ratio<u64>,
    /// Decoy elements across all leading agents (the policy's selections).
    pub decoys: ElementSet,
    /// Bait elements across all leading agents (the forwarded messages).
    pub bait: ElementSet,
    /// Reserve elements across all leading agents (the optimum's selections).
    pub reserve: ElementSet,
    /// The last agent's single wide element.
    pub wide_element: u32,
}

impl WorstCaseInstance {
    /// Decoy elements of leading agent `i`.
    pub fn decoys_of(&self, i: usize) -> ElementSet {
        self.decoys.intersect(self.instance.agent_elements[i])
    }

    /// Bait elements of leading agent `i`.
    pub fn bait_of(&self, i: usize) -> ElementSet {
        self.bait.intersect(self.instance.agent_elements[i])
    }

    /// Reserve elements of leading agent `i`.
    pub fn reserve_of(&self, i: usize) -> ElementSet {
        self.reserve.intersect(self.instance.agent_elements[i])
    }
}

/// Builds the requested variant.
pub fn gen_worst_case(spec: WorstCaseSpec) -> Result<WorstCaseInstance> {
    spec.validate()?;
    match spec.variant {
        WorstCaseVariant::A => build_a(spec),
        WorstCaseVariant::B => build_b(spec),
    }
}

/// Builds variant A with the given parameters.
pub fn gen_worst_case_a(n_agents: usize, k: usize, m: usize) -> Result<WorstCaseInstance> {
    gen_worst_case(WorstCaseSpec::new(WorstCaseVariant::A, n_agents, k, m))
}

/// Builds variant B with the given parameters.
pub fn gen_worst_case_b(n_agents: usize, k: usize, m: usize) -> Result<WorstCaseInstance> {
    gen_worst_case(WorstCaseSpec::new(WorstCaseVariant::B, n_agents, k, m))
}

/// Element ids are laid out decoys first (agent-major), then bait, then
/// reserve, then the last agent's block.  This makes every leading agent's
/// decoys the lexicographically smallest elements it owns, which is what
/// steers the deterministic tie-break into the adversarial replay.
struct Layout {
    n: usize,
    k: usize,
    m: usize,
}

impl Layout {
    fn decoy(&self, agent: usize, j: usize) -> u32 {
        (agent * self.k + j) as u32
    }

    fn bait(&self, agent: usize, j: usize) -> u32 {
        ((self.n - 1) * self.k + agent * self.m + j) as u32
    }

    fn reserve(&self, agent: usize, j: usize) -> u32 {
        ((self.n - 1) * (self.k + self.m) + agent * self.k + j) as u32
    }

    fn wide(&self) -> u32 {
        ((self.n - 1) * (2 * self.k + self.m)) as u32
    }
}

fn build_a(spec: WorstCaseSpec) -> Result<WorstCaseInstance> {
    let (n, k, m) = (spec.n_agents, spec.k, spec.m);
    let layout = Layout { n, k, m };
    // Cell blocks: decoy cells, reserve cells, bait cells.
    let decoy_cell = |i: usize, j: usize| (i * k + j) as u32;
    let reserve_cell = |i: usize, j: usize| ((n - 1) * k + i * k + j) as u32;
    let bait_cell = |i: usize, j: usize| (2 * (n - 1) * k + i * m + j) as u32;
    let n_cells = (n - 1) * (2 * k + m);

    let n_elems = (n - 1) * (2 * k + m) + 1 + m * (n - 1);
    let mut element_cells = vec![Vec::new(); n_elems];
    let mut agents = vec![ElementSet::empty(); n];
    for i in 0..n - 1 {
        for j in 0..k {
            element_cells[layout.decoy(i, j) as usize] = vec![decoy_cell(i, j)];
            element_cells[layout.reserve(i, j) as usize] = vec![reserve_cell(i, j)];
            agents[i] = agents[i].with(layout.decoy(i, j)).with(layout.reserve(i, j));
        }
        for j in 0..m {
            element_cells[layout.bait(i, j) as usize] = vec![bait_cell(i, j)];
            agents[i] = agents[i].with(layout.bait(i, j));
        }
    }
    // The last agent: one element covering every decoy cell, plus one
    // duplicate element per bait cell.
    let wide = layout.wide();
    element_cells[wide as usize] = (0..(n - 1) * k).map(|c| c as u32).collect();
    agents[n - 1] = agents[n - 1].with(wide);
    for i in 0..n - 1 {
        for j in 0..m {
            let id = wide + 1 + (i * m + j) as u32;
            element_cells[id as usize] = vec![bait_cell(i, j)];
            agents[n - 1] = agents[n - 1].with(id);
        }
    }

    let coverage = CoverageFunction::unit(n_cells, element_cells)?;
    finish(spec, layout, coverage, agents, {
        let policy = ((k + m) * (n - 1)) as u64;
        let opt = ((2 * k + m) * (n - 1)) as u64;
        Ratio::new(policy, opt)
    })
}

fn build_b(spec: WorstCaseSpec) -> Result<WorstCaseInstance> {
    let (n, k, m) = (spec.n_agents, spec.k, spec.m);
    let layout = Layout { n, k, m };
    let decoy_cell = |i: usize, j: usize| (i * k + j) as u32;
    let reserve_cell = |i: usize, j: usize| ((n - 1) * k + i * k + j) as u32;
    // Bait cells wrap around a block of exactly k shared cells.  Consecutive
    // bait elements of one agent land on distinct cells because m <= k here
    // is not guaranteed, but any m consecutive residues mod k repeat only
    // after k steps and the policy forwards at most min(k, m) of them.
    let shared_cell = |i: usize, j: usize| (2 * (n - 1) * k + (i * m + j) % k) as u32;
    let n_cells = 2 * (n - 1) * k + k;

    let n_elems = (n - 1) * (2 * k + m) + k;
    let mut element_cells = vec![Vec::new(); n_elems];
    let mut agents = vec![ElementSet::empty(); n];
    for i in 0..n - 1 {
        for j in 0..k {
            element_cells[layout.decoy(i, j) as usize] = vec![decoy_cell(i, j)];
            element_cells[layout.reserve(i, j) as usize] = vec![reserve_cell(i, j)];
            agents[i] = agents[i].with(layout.decoy(i, j)).with(layout.reserve(i, j));
        }
        for j in 0..m {
            element_cells[layout.bait(i, j) as usize] = vec![shared_cell(i, j)];
            agents[i] = agents[i].with(layout.bait(i, j));
        }
    }
    // The last agent: the wide element covers every decoy cell plus the
    // first shared cell; k - 1 singletons cover the remaining shared cells,
    // so the whole set has exactly k elements.
    let wide = layout.wide();
    let mut wide_cells: Vec<u32> = (0..(n - 1) * k).map(|c| c as u32).collect();
    wide_cells.push((2 * (n - 1) * k) as u32);
    element_cells[wide as usize] = wide_cells;
    agents[n - 1] = agents[n - 1].with(wide);
    for t in 1..k {
        let id = wide + t as u32;
        element_cells[id as usize] = vec![(2 * (n - 1) * k + t) as u32];
        agents[n - 1] = agents[n - 1].with(id);
    }

    let coverage = CoverageFunction::unit(n_cells, element_cells)?;
    finish(spec, layout, coverage, agents, Ratio::new(n as u64, 2 * n as u64 - 1))
}

fn finish(
    spec: WorstCaseSpec,
    layout: Layout,
    coverage: CoverageFunction,
    agents: Vec<ElementSet>,
    expected_ratio: Ratio<u64>,
) -> Result<WorstCaseInstance> {
    let (n, k, m) = (layout.n, layout.k, layout.m);
    let mut decoys = ElementSet::empty();
    let mut bait = ElementSet::empty();
    let mut reserve = ElementSet::empty();
    for i in 0..n - 1 {
        for j in 0..k {
            decoys = decoys.with(layout.decoy(i, j));
            reserve = reserve.with(layout.reserve(i, j));
        }
        for j in 0..m {
            bait = bait.with(layout.bait(i, j));
        }
    }
    let instance =
        ProblemInstance::new(std::sync::Arc::new(coverage.clone()), agents, k, m)?;
    Ok(WorstCaseInstance {
        spec,
        instance,
        coverage,
        expected_ratio,
        decoys,
        bait,
        reserve,
        wide_element: layout.wide(),
    })
}

//! Sequential selection policies over a shared objective.
//!
//! Agents act in a fixed order. Each picks at most `k` elements from what it
//! can see; under the message-passing policy it additionally forwards at most
//! `m` of its own elements to every later agent. All argmax steps enumerate
//! candidate subsets exhaustively and break ties deterministically: highest
//! value, then largest cardinality, then lexicographically smallest id
//! sequence.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{argmax_subsets, EvalBudget, Meter, SetFunction, TieRule};
use crate::set::ElementSet;

/// A sequential selection problem: one shared objective, per-agent visible
/// element sets, a selection budget `k` and a message budget `m`.
#[derive(Clone)]
pub struct ProblemInstance {
    pub objective: Arc<dyn SetFunction>,
    /// Elements visible to each agent, in acting order. Sets may overlap.
    pub agent_elements: Vec<ElementSet>,
    /// Per-agent selection budget; selections have size at most `k`.
    pub k: usize,
    /// Per-agent message budget; messages have size at most `m`.
    pub m: usize,
}

impl ProblemInstance {
    pub fn new(
        objective: Arc<dyn SetFunction>,
        agent_elements: Vec<ElementSet>,
        k: usize,
        m: usize,
    ) -> Result<Self> {
        let inst = ProblemInstance {
            objective,
            agent_elements,
            k,
            m,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.agent_elements.is_empty() {
            return Err(Error::InvalidSpec("an instance needs at least one agent".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidSpec("selection budget k must be at least 1".into()));
        }
        let ground = ElementSet::full(self.objective.ground_size());
        for (i, s) in self.agent_elements.iter().enumerate() {
            if !s.is_subset_of(ground) {
                return Err(Error::InvalidSpec(format!(
                    "agent {i} sees elements outside the ground set: {}",
                    s.minus(ground)
                )));
            }
        }
        Ok(())
    }

    pub fn n_agents(&self) -> usize {
        self.agent_elements.len()
    }

    /// The same instance with a different message budget.
    pub fn with_m(&self, m: usize) -> Self {
        let mut c = self.clone();
        c.m = m;
        c
    }
}

impl fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("ground_size", &self.objective.ground_size())
            .field("agent_elements", &self.agent_elements)
            .field("k", &self.k)
            .field("m", &self.m)
            .finish()
    }
}

/// Which policy drives the agents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    /// Greedy on own elements given earlier selections; no messages.
    Nominal,
    /// Greedy on own elements ignoring everyone else; no messages.
    Independent,
    /// Greedy on own elements plus received messages; forwards messages.
    Augmented,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PolicyKind::Nominal => "nominal",
            PolicyKind::Independent => "independent",
            PolicyKind::Augmented => "augmented",
        };
        f.write_str(s)
    }
}

/// Policy configuration.
///
/// The tie-break rule (value, then cardinality, then lexicographic id
/// sequence) and the surplus-message rule (keep adding the highest-gain own
/// element until the budget or the element supply runs out) are fixed; they
/// are part of the crate's determinism contract rather than options.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PolicySpec {
    pub kind: PolicyKind,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind) -> Self {
        PolicySpec { kind }
    }
}

/// One agent's step in a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentRecord {
    /// Elements the agent selected (`x`).
    pub selection: ElementSet,
    /// Elements the agent forwarded (`z`); empty for policies that do not
    /// pass messages.
    pub message: ElementSet,
    /// Objective gain of this selection over the accumulated prefix.
    pub gain: f64,
}

/// Full record of a policy run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub policy: PolicyKind,
    pub k: usize,
    pub m: usize,
    pub agents: Vec<AgentRecord>,
    /// `f` of the union of all selections.
    pub total: f64,
}

impl RunTrace {
    /// Union of all selections.
    pub fn selected(&self) -> ElementSet {
        self.agents
            .iter()
            .fold(ElementSet::empty(), |acc, a| acc.union(a.selection))
    }

    /// Union of selections of agents `0..i`.
    pub fn selected_prefix(&self, i: usize) -> ElementSet {
        self.agents[..i]
            .iter()
            .fold(ElementSet::empty(), |acc, a| acc.union(a.selection))
    }
}

pub(crate) fn select_from(
    f: &dyn SetFunction,
    pool: ElementSet,
    k: usize,
    base: ElementSet,
    meter: &mut Meter,
) -> Result<ElementSet> {
    let (set, _) = argmax_subsets(f, &pool.ids(), k, base, TieRule::ValueSizeLex, meter)?;
    Ok(set)
}

/// Greedy selection from `s_i` given already-selected elements `prior`.
pub fn nominal_select(
    f: &dyn SetFunction,
    s_i: ElementSet,
    k: usize,
    prior: ElementSet,
    budget: EvalBudget,
) -> Result<ElementSet> {
    let mut meter = Meter::new(budget);
    select_from(f, s_i, k, prior, &mut meter)
}

/// Greedy selection from `s_i` in isolation.
pub fn independent_select(
    f: &dyn SetFunction,
    s_i: ElementSet,
    k: usize,
    budget: EvalBudget,
) -> Result<ElementSet> {
    let mut meter = Meter::new(budget);
    select_from(f, s_i, k, ElementSet::empty(), &mut meter)
}

pub(crate) fn augmented_step_m(
    f: &dyn SetFunction,
    s_i: ElementSet,
    k: usize,
    m: usize,
    prior: ElementSet,
    received: ElementSet,
    meter: &mut Meter,
) -> Result<(ElementSet, ElementSet)> {
    let selection = select_from(f, s_i.union(received), k, prior, meter)?;
    let after = prior.union(selection);

    // Message core: the best own subset of size ≤ min(k, m) given everything
    // selected so far (including this agent's own picks).
    let core_limit = k.min(m);
    let (mut message, _) =
        argmax_subsets(f, &s_i.ids(), core_limit, after, TieRule::ValueSizeLex, meter)?;

    // Surplus budget: when m > k the message may carry up to m - k more own
    // elements. Fill greedily by single-element gain given the selections and
    // the message collected so far; ties go to the smallest id, and elements
    // are appended even at zero gain until the budget or `s_i` runs out.
    for _ in 0..m.saturating_sub(k) {
        let context = after.union(message);
        let f_context = meter.eval(f, context)?;
        let mut best: Option<(f64, u32)> = None;
        for id in s_i.minus(message).iter() {
            meter.charge_subset()?;
            let gain = meter.eval(f, context.with(id))? - f_context;
            let better = match best {
                None => true,
                Some((bv, _)) => gain > bv + crate::tol::VALUE_EPS,
            };
            if better {
                best = Some((gain, id));
            }
        }
        match best {
            Some((_, id)) => message.insert(id),
            None => break,
        }
    }
    Ok((selection, message))
}

/// One step of the message-passing policy: selection from own plus received
/// elements, then the outgoing message from own elements only.
pub fn augmented_step(
    f: &dyn SetFunction,
    s_i: ElementSet,
    k: usize,
    m: usize,
    prior: ElementSet,
    received: ElementSet,
    budget: EvalBudget,
) -> Result<(ElementSet, ElementSet)> {
    let mut meter = Meter::new(budget);
    augmented_step_m(f, s_i, k, m, prior, received, &mut meter)
}

/// Runs a policy over all agents and records the full trace.
pub fn run_policy(
    instance: &ProblemInstance,
    spec: PolicySpec,
    budget: EvalBudget,
) -> Result<RunTrace> {
    instance.validate()?;
    let f = instance.objective.as_ref();
    let mut meter = Meter::new(budget);
    let mut selected = ElementSet::empty();
    let mut inbox = ElementSet::empty();
    let mut prev = 0.0;
    let mut agents = Vec::with_capacity(instance.n_agents());
    for &s_i in &instance.agent_elements {
        let (selection, message) = match spec.kind {
            PolicyKind::Nominal => (
                select_from(f, s_i, instance.k, selected, &mut meter)?,
                ElementSet::empty(),
            ),
            PolicyKind::Independent => (
                select_from(f, s_i, instance.k, ElementSet::empty(), &mut meter)?,
                ElementSet::empty(),
            ),
            PolicyKind::Augmented => augmented_step_m(
                f,
                s_i,
                instance.k,
                instance.m,
                selected,
                inbox,
                &mut meter,
            )?,
        };
        selected = selected.union(selection);
        inbox = inbox.union(message);
        let total = meter.eval(f, selected)?;
        agents.push(AgentRecord {
            selection,
            message,
            gain: total - prev,
        });
        prev = total;
    }
    Ok(RunTrace {
        policy: spec.kind,
        k: instance.k,
        m: instance.m,
        agents,
        total: prev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::CoverageFunction;
    use crate::oracle::best_subset;

    fn instance(
        weights: Vec<u64>,
        cells: Vec<Vec<u32>>,
        agents: Vec<Vec<u32>>,
        k: usize,
        m: usize,
    ) -> ProblemInstance {
        let f = CoverageFunction::new(weights, cells).unwrap();
        ProblemInstance::new(
            Arc::new(f),
            agents
                .into_iter()
                .map(|ids| ElementSet::from_ids(ids))
                .collect(),
            k,
            m,
        )
        .unwrap()
    }

    /// Three agents over distinct unit cells, with agent 2 seeing only
    /// duplicates of cells covered by agent 0.
    fn fixture() -> ProblemInstance {
        instance(
            vec![1; 6],
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![3],
                vec![4, 5],
                vec![0],
                vec![1],
            ],
            vec![vec![0, 1, 2], vec![3, 4], vec![5, 6]],
            2,
            1,
        )
    }

    #[test]
    fn zero_message_budget_reduces_to_nominal() {
        let inst = fixture().with_m(0);
        let nominal = run_policy(&inst, PolicySpec::new(PolicyKind::Nominal), EvalBudget::default())
            .unwrap();
        let augmented =
            run_policy(&inst, PolicySpec::new(PolicyKind::Augmented), EvalBudget::default())
                .unwrap();
        assert_eq!(nominal.total, augmented.total);
        for (a, b) in nominal.agents.iter().zip(&augmented.agents) {
            assert_eq!(a.selection, b.selection);
            assert!(b.message.is_empty());
        }
    }

    #[test]
    fn single_agent_matches_best_subset() {
        let inst = instance(
            vec![2, 1, 1],
            vec![vec![0], vec![1], vec![2]],
            vec![vec![0, 1, 2]],
            2,
            0,
        );
        let trace = run_policy(&inst, PolicySpec::new(PolicyKind::Nominal), EvalBudget::default())
            .unwrap();
        let (set, val) = best_subset(
            inst.objective.as_ref(),
            ElementSet::from_ids([0, 1, 2]),
            2,
            ElementSet::empty(),
            EvalBudget::default(),
        )
        .unwrap();
        assert_eq!(trace.agents[0].selection, set);
        assert_eq!(trace.total, val);
    }

    #[test]
    fn small_agent_set_is_taken_whole() {
        // Agent 0 sees three elements, two of which duplicate the same cell;
        // with k = 3 the whole set is selected: the tie-break prefers the
        // larger cardinality at equal value.
        let inst = instance(
            vec![1, 1],
            vec![vec![0], vec![0], vec![1]],
            vec![vec![0, 1, 2]],
            3,
            0,
        );
        let trace = run_policy(&inst, PolicySpec::new(PolicyKind::Nominal), EvalBudget::default())
            .unwrap();
        assert_eq!(trace.agents[0].selection, ElementSet::from_ids([0, 1, 2]));
        assert_eq!(trace.total, 2.0);
    }

    #[test]
    fn empty_agent_selects_nothing() {
        let inst = instance(
            vec![1],
            vec![vec![0]],
            vec![vec![], vec![0]],
            1,
            0,
        );
        let trace = run_policy(&inst, PolicySpec::new(PolicyKind::Nominal), EvalBudget::default())
            .unwrap();
        assert!(trace.agents[0].selection.is_empty());
        assert_eq!(trace.agents[0].gain, 0.0);
        assert_eq!(trace.total, 1.0);
    }

    #[test]
    fn message_budget_beyond_supply_forwards_everything() {
        let inst = instance(
            vec![1; 3],
            vec![vec![0], vec![1], vec![2]],
            vec![vec![0, 1], vec![2]],
            1,
            5,
        );
        let trace = run_policy(&inst, PolicySpec::new(PolicyKind::Augmented), EvalBudget::default())
            .unwrap();
        // m = 5 ≥ |S_0| = 2: everything is forwarded, selected or not.
        assert_eq!(trace.agents[0].message, ElementSet::from_ids([0, 1]));
        assert!(trace.agents[0].message.len() <= inst.m);
    }

    #[test]
    fn messages_come_from_own_elements_and_fit_budget() {
        let inst = fixture();
        let trace = run_policy(&inst, PolicySpec::new(PolicyKind::Augmented), EvalBudget::default())
            .unwrap();
        for (i, rec) in trace.agents.iter().enumerate() {
            assert!(rec.message.is_subset_of(inst.agent_elements[i]));
            assert!(rec.message.len() <= inst.m);
            assert!(rec.selection.len() <= inst.k);
        }
    }

    #[test]
    fn per_step_gains_sum_to_total() {
        for kind in [PolicyKind::Nominal, PolicyKind::Independent, PolicyKind::Augmented] {
            let trace =
                run_policy(&fixture(), PolicySpec::new(kind), EvalBudget::default()).unwrap();
            let sum: f64 = trace.agents.iter().map(|a| a.gain).sum();
            assert_eq!(sum, trace.total, "{kind}");
            // Selections stay feasible relative to what each agent could see.
            let mut inbox = ElementSet::empty();
            for (i, rec) in trace.agents.iter().enumerate() {
                let visible = fixture().agent_elements[i].union(inbox);
                assert!(rec.selection.is_subset_of(visible), "{kind} agent {i}");
                inbox = inbox.union(rec.message);
            }
        }
    }

    #[test]
    fn passed_elements_help_later_agents() {
        // Agent 1's own elements duplicate cells 0 and 1; only the message
        // from agent 0 lets it add value.
        let inst = instance(
            vec![1; 4],
            vec![vec![0], vec![1], vec![2], vec![3], vec![0], vec![1]],
            vec![vec![0, 1, 2, 3], vec![4, 5]],
            2,
            2,
        );
        let nominal = run_policy(&inst, PolicySpec::new(PolicyKind::Nominal), EvalBudget::default())
            .unwrap();
        let augmented =
            run_policy(&inst, PolicySpec::new(PolicyKind::Augmented), EvalBudget::default())
                .unwrap();
        assert_eq!(nominal.total, 2.0);
        assert_eq!(augmented.total, 4.0);
        // Agent 0 forwards the two elements it could not select.
        assert_eq!(augmented.agents[0].message, ElementSet::from_ids([2, 3]));
        assert_eq!(augmented.agents[1].selection, ElementSet::from_ids([2, 3]));
    }

    #[test]
    fn rejects_malformed_instances() {
        let f = CoverageFunction::unit(1, vec![vec![0]]).unwrap();
        assert!(ProblemInstance::new(Arc::new(f.clone()), vec![], 1, 0).is_err());
        assert!(ProblemInstance::new(
            Arc::new(f.clone()),
            vec![ElementSet::from_ids([0])],
            0,
            0
        )
        .is_err());
        assert!(ProblemInstance::new(
            Arc::new(f),
            vec![ElementSet::from_ids([0, 1])],
            1,
            0
        )
        .is_err());
    }
}

//! Exact optimum of the team selection problem by exhaustive search.
//!
//! The feasible space is the product of per-agent subsets: agent `i` may take
//! any subset of its own elements of size at most `k`, with no messages
//! involved.  The search enumerates that product in lexicographic profile
//! order with two admissible prunes, so it returns exactly the value and the
//! lexicographically first maximizer that plain enumeration would find, while
//! visiting far fewer nodes.

use crate::error::{Error, Result};
use crate::oracle::{EvalBudget, Meter, SetFunction};
use crate::policies::ProblemInstance;
use crate::set::ElementSet;

/// Result of the exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    /// Optimal objective value.
    pub value: f64,
    /// Lexicographically first optimal profile, one subset per agent.
    pub profile: Vec<ElementSet>,
    /// Complete profiles whose value was compared during the search.
    pub enumerated: u64,
}

struct Search<'a> {
    f: &'a dyn SetFunction,
    agents: &'a [ElementSet],
    k: usize,
    /// Union of the element pools of agents `i..`, for the lookahead bound.
    suffix_pool: Vec<ElementSet>,
    meter: Meter,
    best_value: f64,
    best_profile: Option<Vec<ElementSet>>,
    current: Vec<ElementSet>,
    enumerated: u64,
}

impl<'a> Search<'a> {
    /// Upper bound on what agents `i..` can still add on top of `chosen`.
    ///
    /// Two admissible estimates, combined by taking the smaller: the sum over
    /// remaining agents of their top-k single-element gains (submodularity
    /// makes each agent's true contribution no larger), and the gain of
    /// taking every remaining element at once (monotonicity makes any final
    /// selection no larger).
    fn remaining_bound(&mut self, i: usize, chosen: ElementSet, value: f64) -> Result<f64> {
        let everything = self.meter.eval(self.f, chosen.union(self.suffix_pool[i]))?;
        let mut by_agents = 0.0;
        for agent in &self.agents[i..] {
            let mut gains: Vec<f64> = Vec::new();
            for id in agent.minus(chosen).iter() {
                let g = self.meter.eval(self.f, chosen.with(id))? - value;
                if g > 0.0 {
                    gains.push(g);
                }
            }
            gains.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
            by_agents += gains.iter().take(self.k).sum::<f64>();
            if by_agents >= everything - value {
                by_agents = everything - value;
                break;
            }
        }
        Ok(by_agents.min(everything - value))
    }

    fn visit_agent(&mut self, i: usize, chosen: ElementSet, value: f64) -> Result<()> {
        if i == self.agents.len() {
            self.enumerated += 1;
            if value > self.best_value {
                self.best_value = value;
                self.best_profile = Some(self.current.clone());
            } else if value == self.best_value && self.best_profile.is_none() {
                self.best_profile = Some(self.current.clone());
            }
            return Ok(());
        }
        let bound = value + self.remaining_bound(i, chosen, value)?;
        // With a profile already in hand, a subtree that can at best tie is
        // useless: everything in it is lexicographically later.  Before the
        // first profile is recorded the seed value is only a number, so ties
        // must still be explored to find the profile that attains it.
        let prune = match self.best_profile {
            Some(_) => bound <= self.best_value,
            None => bound < self.best_value,
        };
        if prune {
            return Ok(());
        }
        let pool = self.agents[i].ids();
        self.visit_subsets(i, &pool, 0, self.k, chosen, value)
    }

    fn visit_subsets(
        &mut self,
        i: usize,
        pool: &[u32],
        start: usize,
        room: usize,
        chosen: ElementSet,
        value: f64,
    ) -> Result<()> {
        self.meter.charge_subset()?;
        self.visit_agent(i + 1, chosen, value)?;
        if room == 0 {
            return Ok(());
        }
        for idx in start..pool.len() {
            let grown = chosen.with(pool[idx]);
            let grown_value = self.meter.eval(self.f, grown)?;
            self.current[i] = self.current[i].with(pool[idx]);
            self.visit_subsets(i, pool, idx + 1, room - 1, grown, grown_value)?;
            self.current[i].remove(pool[idx]);
        }
        Ok(())
    }
}

/// Greedy profile used to seed the search with a strong incumbent value.
///
/// Starts from the sequential greedy profile and runs best-response rounds
/// (each agent in turn re-picks its best subset given everyone else) until no
/// agent can improve.  Every profile touched is feasible, so the final value
/// is a valid lower bound on the optimum.
fn seed_value(
    f: &dyn SetFunction,
    agents: &[ElementSet],
    k: usize,
    meter: &mut Meter,
) -> Result<f64> {
    let mut profile = vec![ElementSet::empty(); agents.len()];
    let mut chosen = ElementSet::empty();
    for (i, own) in agents.iter().enumerate() {
        let picked = crate::policies::select_from(f, *own, k, chosen, meter)?;
        profile[i] = picked;
        chosen = chosen.union(picked);
    }
    let mut total = meter.eval(f, chosen)?;
    for _round in 0..2 * agents.len() {
        let mut improved = false;
        for i in 0..agents.len() {
            let mut others = ElementSet::empty();
            for (j, x) in profile.iter().enumerate() {
                if j != i {
                    others = others.union(*x);
                }
            }
            let picked = crate::policies::select_from(f, agents[i], k, others, meter)?;
            let candidate = meter.eval(f, others.union(picked))?;
            if candidate > total {
                total = candidate;
                profile[i] = picked;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(total)
}

/// Finds the exact optimum of the product selection problem.
///
/// Returns the optimal value together with the lexicographically first
/// profile attaining it (agent by agent, each subset ordered as an ascending
/// id sequence).  The budget meters actual work: every visited subset node
/// and every objective evaluation counts against it, and exceeding it
/// returns an error rather than a truncated answer.
pub fn brute_force_opt(instance: &ProblemInstance, budget: EvalBudget) -> Result<OptResult> {
    instance.validate()?;
    let n = instance.n_agents();
    let mut meter = Meter::new(budget);
    let f: &dyn SetFunction = instance.objective.as_ref();

    let mut suffix_pool = vec![ElementSet::empty(); n + 1];
    for i in (0..n).rev() {
        suffix_pool[i] = suffix_pool[i + 1].union(instance.agent_elements[i]);
    }

    let seed = seed_value(f, &instance.agent_elements, instance.k, &mut meter)?;
    let mut search = Search {
        f,
        agents: &instance.agent_elements,
        k: instance.k,
        suffix_pool,
        meter,
        best_value: seed,
        best_profile: None,
        current: vec![ElementSet::empty(); n],
        enumerated: 0,
    };
    search.visit_agent(0, ElementSet::empty(), 0.0)?;
    let profile = search.best_profile.ok_or_else(|| {
        Error::InvalidSpec("search ended with no feasible profile recorded".into())
    })?;
    Ok(OptResult { value: search.best_value, profile, enumerated: search.enumerated })
}

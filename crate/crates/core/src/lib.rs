//! Sequential distributed subset selection with inter-agent message passing.
//!
//! A team of agents takes turns choosing up to `k` elements each to maximize
//! one shared monotone submodular objective.  Each agent sees only its own
//! elements plus whatever earlier agents chose or forwarded, and may forward
//! up to `m` of its own elements to everyone after it.  The crate implements
//! the greedy selection policies, exact optimality search, the closed-form
//! performance bounds with the adversarial instances that attain them, and a
//! Monte Carlo harness around a multi-vehicle camera fusion experiment.
//!
//! The pieces:
//!
//! * [`set`], [`oracle`]: bitset ground sets, the objective trait, budgets,
//!   subset argmax, and structural checks (normalized, monotone,
//!   submodular).
//! * [`objectives`]: weighted coverage and log-determinant information gain.
//! * [`policies`]: the sequential greedy policies and full run traces.
//! * [`instances`]: adversarial, random, and camera-scenario generators.
//! * [`analysis`]: brute-force optimum, closed-form bounds, certificate
//!   checks, and empirical guarantee estimation.
//! * [`harness`]: deterministic experiment runners over all of the above.
//! * [`io`]: JSON files for instances and traces.
//!
//! Everything is deterministic: ties break by value, then cardinality, then
//! lexicographic id order, and all randomness flows from explicit seeds.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod instances;
pub mod io;
pub mod objectives;
pub mod oracle;
pub mod policies;
pub mod set;
pub mod tol;

pub use error::{Error, Result};
pub use oracle::{
    best_subset, check_monotone, check_normalized, check_submodular, marginal, CheckMode,
    CheckResult, Counterexample, EvalBudget, SetFunction,
};
pub use policies::{
    augmented_step, independent_select, nominal_select, run_policy, AgentRecord, PolicyKind,
    PolicySpec, ProblemInstance, RunTrace,
};
pub use set::{ElementSet, MAX_GROUND};

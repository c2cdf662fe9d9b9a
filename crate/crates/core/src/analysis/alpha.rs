//! Certificate check connecting message quality to a performance guarantee.
//!
//! If every leading agent's message is strong enough that `alpha` times the
//! best achievable gain from it covers the gain the optimum profile would
//! have extracted at that point, then the whole run is guaranteed at least a
//! `1 / (2 - 1 / (1 + alpha + ... + alpha^(n-1)))` share of the optimum.
//! The checker evaluates both the premise and the conclusion on a concrete
//! run and reports the slack of each inequality.

use serde::Serialize;

use crate::analysis::OptResult;
use crate::error::{Error, Result};
use crate::oracle::{argmax_subsets, EvalBudget, Meter, SetFunction, TieRule};
use crate::policies::{ProblemInstance, RunTrace};
use crate::tol::BOUND_TOL;

/// Premise inequality at one leading agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepCheck {
    pub agent: usize,
    /// Best gain extractable from the message, within the selection budget,
    /// on top of everything selected through this agent.
    pub message_gain_cap: f64,
    /// Gain the optimum profile's subset for this agent would add there.
    pub opt_gain: f64,
    /// `alpha * message_gain_cap - opt_gain`; nonnegative means satisfied.
    pub slack: f64,
}

/// Conclusion inequality of the certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConclusionCheck {
    /// `ratio - threshold`; nonnegative means satisfied.
    pub slack: f64,
    pub holds: bool,
}

/// Outcome of the certificate check on one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaBoundReport {
    pub alpha: f64,
    pub steps: Vec<StepCheck>,
    pub premise_holds: bool,
    /// Guaranteed ratio when the premise holds.
    pub threshold: f64,
    /// Achieved value over the optimum (1 when both are zero).
    pub ratio: f64,
    /// Only evaluated when the premise holds; the certificate promises
    /// nothing otherwise.
    pub conclusion: Option<ConclusionCheck>,
}

/// Checks the certificate on a finished run against the exact optimum.
pub fn check_alpha_bound(
    instance: &ProblemInstance,
    trace: &RunTrace,
    opt: &OptResult,
    alpha: f64,
    budget: EvalBudget,
) -> Result<AlphaBoundReport> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "certificate strength alpha must be a finite value >= 1, got {alpha}"
        )));
    }
    let n = instance.n_agents();
    if trace.agents.len() != n || opt.profile.len() != n {
        return Err(Error::InvalidSpec(format!(
            "run has {} agents and optimum {}, instance has {n}",
            trace.agents.len(),
            opt.profile.len()
        )));
    }
    if trace.k != instance.k {
        return Err(Error::InvalidSpec(format!(
            "run was made with k = {}, instance has k = {}",
            trace.k, instance.k
        )));
    }

    let f: &dyn SetFunction = instance.objective.as_ref();
    let mut meter = Meter::new(budget);
    let mut steps = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let through_i = trace.selected_prefix(i + 1);
        let f_through = meter.eval(f, through_i)?;
        let message = trace.agents[i].message;
        let (_, best_value) = argmax_subsets(
            f,
            &message.ids(),
            instance.k,
            through_i,
            TieRule::ValueLex,
            &mut meter,
        )?;
        let message_gain_cap = best_value - f_through;
        let opt_gain = meter.eval(f, opt.profile[i].union(through_i))? - f_through;
        let slack = alpha * message_gain_cap - opt_gain;
        steps.push(StepCheck { agent: i, message_gain_cap, opt_gain, slack });
    }
    let premise_holds = steps.iter().all(|s| s.slack >= -BOUND_TOL);

    let mut geometric = 0.0;
    for j in 0..n {
        geometric += alpha.powi(j as i32);
    }
    let threshold = 1.0 / (2.0 - 1.0 / geometric);
    let ratio = if opt.value <= crate::tol::VALUE_EPS {
        1.0
    } else {
        trace.total / opt.value
    };
    let conclusion = premise_holds.then(|| {
        let slack = ratio - threshold;
        ConclusionCheck { slack, holds: slack >= -BOUND_TOL }
    });
    Ok(AlphaBoundReport { alpha, steps, premise_holds, threshold, ratio, conclusion })
}

//! Exact optimality search, closed-form performance bounds, and certificate
//! checks for policy runs.

mod alpha;
mod bounds;
mod gamma;
mod opt;

pub use alpha::{check_alpha_bound, AlphaBoundReport, ConclusionCheck, StepCheck};
pub use bounds::{
    alpha_factor, augmented_ratio_lower_bound, bound_report, improvement_bounds, opt_ratio_upper_bound,
    BoundReport, ImprovementBounds,
};
pub use gamma::{estimate_policy_guarantee, min_ratio_over, GammaEstimate};
pub use opt::{brute_force_opt, OptResult};

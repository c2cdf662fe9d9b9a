//! Closed-form performance bounds as functions of the team size `n`, the
//! selection budget `k`, and the message budget `m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn validate(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!(
            "bounds are defined for at least two agents, got {n}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidSpec("selection budget k must be positive".into()));
    }
    Ok(())
}

/// Upper bound on the optimum-relative ratio any sequential policy with
/// message budget `m` can guarantee.
///
/// With `c = min((n - 1) m / k, 1)` the bound is `1 / (2 - c / (n - 1 + c))`.
/// It is 1/2 for `m = 0` and climbs to `n / (2 n - 1)` once
/// `m >= k / (n - 1)`.
pub fn opt_ratio_upper_bound(n: usize, k: usize, m: usize) -> Result<f64> {
    validate(n, k)?;
    let c = (((n - 1) * m) as f64 / k as f64).min(1.0);
    Ok(1.0 / (2.0 - c / ((n - 1) as f64 + c)))
}

/// Guaranteed optimum-relative ratio of the message-augmented policy.
///
/// With `r = min(m / k, 1)` the bound is
/// `1 / (2 - r^(n-1) / (1 + r + ... + r^(n-1)))`; the empty-message case
/// degenerates to the plain sequential guarantee of 1/2.
pub fn augmented_ratio_lower_bound(n: usize, k: usize, m: usize) -> Result<f64> {
    validate(n, k)?;
    let r = (m as f64 / k as f64).min(1.0);
    let mut geometric = 0.0;
    for i in 0..n {
        geometric += r.powi(i as i32);
    }
    Ok(1.0 / (2.0 - r.powi((n - 1) as i32) / geometric))
}

/// Range of the ratio between the augmented and the message-free policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImprovementBounds {
    pub lower: f64,
    pub upper: f64,
}

/// How much passing messages can change the achieved value, relative to
/// running the same sequential greedy without them: at worst the augmented
/// ratio guarantee (messages never cost more than that), at best a factor
/// `2 + min(m / k, n - 1)`.
pub fn improvement_bounds(n: usize, k: usize, m: usize) -> Result<ImprovementBounds> {
    let lower = augmented_ratio_lower_bound(n, k, m)?;
    let upper = 2.0 + (m as f64 / k as f64).min((n - 1) as f64);
    Ok(ImprovementBounds { lower, upper })
}

/// Message strength `min(m / k, n - 1)` used by the improvement analysis.
pub fn alpha_factor(n: usize, k: usize, m: usize) -> f64 {
    (m as f64 / k as f64).min((n - 1) as f64)
}

/// All bounds for one parameter triple, ready for serialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n_agents: usize,
    pub k: usize,
    pub m: usize,
    /// Guarantee of the augmented policy against the optimum.
    pub opt_ratio_lower: f64,
    /// Ceiling for any policy with this message budget against the optimum.
    pub opt_ratio_upper: f64,
    /// Floor and ceiling of augmented over message-free value.
    pub improvement_lower: f64,
    pub improvement_upper: f64,
    pub alpha: f64,
}

/// Computes every closed-form bound for the triple.
pub fn bound_report(n: usize, k: usize, m: usize) -> Result<BoundReport> {
    let improvement = improvement_bounds(n, k, m)?;
    Ok(BoundReport {
        n_agents: n,
        k,
        m,
        opt_ratio_lower: augmented_ratio_lower_bound(n, k, m)?,
        opt_ratio_upper: opt_ratio_upper_bound(n, k, m)?,
        improvement_lower: improvement.lower,
        improvement_upper: improvement.upper,
        alpha: alpha_factor(n, k, m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::BOUND_TOL;

    #[test]
    fn empty_messages_give_one_half() {
        for n in 2..8 {
            for k in 1..5 {
                assert_eq!(opt_ratio_upper_bound(n, k, 0).unwrap(), 0.5);
                assert_eq!(augmented_ratio_lower_bound(n, k, 0).unwrap(), 0.5);
            }
        }
    }

    #[test]
    fn full_messages_close_the_gap() {
        // With m >= k both bounds collapse to n / (2 n - 1).
        for n in 2..8 {
            for k in 1..5 {
                for m in [k, k + 1, 3 * k] {
                    let target = n as f64 / (2 * n - 1) as f64;
                    let up = opt_ratio_upper_bound(n, k, m).unwrap();
                    let lo = augmented_ratio_lower_bound(n, k, m).unwrap();
                    assert!((up - target).abs() < 1e-12, "up n={n} k={k} m={m}");
                    assert!((lo - target).abs() < 1e-12, "lo n={n} k={k} m={m}");
                }
            }
        }
    }

    #[test]
    fn two_agents_are_tight_at_any_message_budget() {
        // For n = 2 the ceiling and the guarantee agree even when m < k.
        for k in 1..6 {
            for m in 0..=k {
                let up = opt_ratio_upper_bound(2, k, m).unwrap();
                let lo = augmented_ratio_lower_bound(2, k, m).unwrap();
                assert!((up - lo).abs() < 1e-12, "k={k} m={m}");
            }
        }
    }

    #[test]
    fn frozen_point_values() {
        assert!((opt_ratio_upper_bound(3, 2, 2).unwrap() - 0.6).abs() < 1e-12);
        assert!((augmented_ratio_lower_bound(3, 2, 2).unwrap() - 0.6).abs() < 1e-12);
        assert!((opt_ratio_upper_bound(2, 2, 2).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        // One partial-message point, from the closed form by hand:
        // r = 1/2, so the guarantee is 1 / (2 - (1/4) / (7/4)) = 7 / 13.
        assert!((augmented_ratio_lower_bound(3, 2, 1).unwrap() - 7.0 / 13.0).abs() < 1e-12);
        // And the ceiling with c = 1: 1 / (2 - 1/3) = 3/5.
        assert!((opt_ratio_upper_bound(3, 2, 1).unwrap() - 0.6).abs() < 1e-12);
        let imp = improvement_bounds(3, 2, 2).unwrap();
        assert!((imp.upper - 3.0).abs() < 1e-12);
        assert!((imp.lower - 0.6).abs() < 1e-12);
    }

    #[test]
    fn guarantee_never_exceeds_the_ceiling() {
        for n in 2..=10 {
            for k in 1..=10 {
                for m in 0..=10 {
                    let up = opt_ratio_upper_bound(n, k, m).unwrap();
                    let lo = augmented_ratio_lower_bound(n, k, m).unwrap();
                    assert!(lo <= up + BOUND_TOL, "n={n} k={k} m={m}: {lo} > {up}");
                    assert!((0.5..=1.0).contains(&lo));
                    assert!((0.5..=1.0).contains(&up));
                    let imp = improvement_bounds(n, k, m).unwrap();
                    assert!(imp.lower <= imp.upper);
                    assert!(imp.upper <= (n + 1) as f64);
                }
            }
        }
    }

    #[test]
    fn bounds_grow_with_the_message_budget() {
        for n in 2..6 {
            for k in 1..6 {
                let mut prev_up = 0.0;
                let mut prev_lo = 0.0;
                for m in 0..=k {
                    let up = opt_ratio_upper_bound(n, k, m).unwrap();
                    let lo = augmented_ratio_lower_bound(n, k, m).unwrap();
                    assert!(up >= prev_up - 1e-15);
                    assert!(lo >= prev_lo - 1e-15);
                    prev_up = up;
                    prev_lo = lo;
                }
            }
        }
    }

    #[test]
    fn improvement_ceiling_saturates() {
        let a = improvement_bounds(3, 2, 4).unwrap();
        let b = improvement_bounds(3, 2, 5).unwrap();
        assert_eq!(a.upper, 4.0);
        assert_eq!(b.upper, 4.0);
        assert_eq!(alpha_factor(3, 2, 5), 2.0);
        assert_eq!(alpha_factor(3, 2, 1), 0.5);
    }

    #[test]
    fn degenerate_parameters_are_rejected() {
        assert!(opt_ratio_upper_bound(1, 2, 1).is_err());
        assert!(augmented_ratio_lower_bound(2, 0, 1).is_err());
        assert!(bound_report(0, 1, 0).is_err());
    }

    #[test]
    fn report_is_consistent_with_the_parts() {
        let r = bound_report(4, 3, 2).unwrap();
        assert_eq!(r.opt_ratio_upper, opt_ratio_upper_bound(4, 3, 2).unwrap());
        assert_eq!(r.opt_ratio_lower, augmented_ratio_lower_bound(4, 3, 2).unwrap());
        assert_eq!(r.improvement_upper, improvement_bounds(4, 3, 2).unwrap().upper);
        assert_eq!(r.alpha, alpha_factor(4, 3, 2));
        let json = serde_json::to_string(&r).unwrap();
        let back: BoundReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}

//! Flat output records. Every real is rounded to 12 significant digits so
//! serialized tables are stable and readable.

use serde::{Deserialize, Serialize};

use crate::design::{DesignSolution, Regime};
use crate::equilibrium::{Branch, EquilibriumOutcome};
use crate::model::NetworkScenario;
use crate::scalar::Scalar;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits. The result prints
/// with at most that many digits via `Display`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn r<T: Scalar>(x: T) -> f64 {
    round_sig(x.as_f64())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub f2_n: f64,
    pub f2_a: f64,
    pub f1_n: f64,
    pub f1_a: f64,
    pub branch: Branch,
    pub g_value: f64,
    pub pr_a: f64,
    pub beta_a_a: f64,
    pub beta_n_a: f64,
    pub cost_pop1: f64,
    pub cost_pop2: f64,
    pub cost_avg: f64,
}

impl OutcomeRecord {
    pub fn new<T: Scalar>(s: &NetworkScenario<T>, o: &EquilibriumOutcome<T>) -> Self {
        let f1 = o.f1(s);
        Self {
            f2_n: r(o.f2.n),
            f2_a: r(o.f2.a),
            f1_n: r(f1.n),
            f1_a: r(f1.a),
            branch: o.branch,
            g_value: r(o.g_value),
            pr_a: r(o.beliefs.pr_a),
            beta_a_a: r(o.beliefs.beta_a_of_a),
            beta_n_a: r(o.beliefs.beta_n_of_a),
            cost_pop1: r(o.costs.pop1),
            cost_pop2: r(o.costs.pop2),
            cost_avg: r(o.costs.average),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub regime: Regime,
    pub pi_a_a: f64,
    pub pi_n_n: f64,
    pub f2_n: f64,
    pub f2_a: f64,
    pub loss: f64,
    pub p_bar: f64,
    pub lambda_low: Option<f64>,
    pub lambda_high: Option<f64>,
    pub pr_a: f64,
    pub cost_pop1: f64,
    pub cost_pop2: f64,
    pub cost_avg: f64,
}

impl<T: Scalar> From<&DesignSolution<T>> for DesignRecord {
    fn from(d: &DesignSolution<T>) -> Self {
        let o = &d.outcome;
        Self {
            regime: d.regime,
            pi_a_a: r(d.pi_star.pi_a_given_a),
            pi_n_n: r(d.pi_star.pi_n_given_n),
            f2_n: r(o.f2.n),
            f2_a: r(o.f2.a),
            loss: r(d.loss),
            p_bar: r(d.thresholds.p_bar),
            lambda_low: d.thresholds.lambda_low.map(r),
            lambda_high: d.thresholds.lambda_high.map(r),
            pr_a: r(o.beliefs.pr_a),
            cost_pop1: r(o.costs.pop1),
            cost_pop2: r(o.costs.pop2),
            cost_avg: r(o.costs.average),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(2.0 / 3.0).to_string(), "0.666666666667");
        assert_eq!(round_sig(0.4).to_string(), "0.4");
        assert_eq!(round_sig(-1234.56789012345).to_string(), "-1234.56789012");
        assert_eq!(round_sig(0.0), 0.0);
        assert!(round_sig(f64::NAN).is_nan());
    }
}

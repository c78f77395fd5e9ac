//! Optimal information design: the persuasion threshold on the prior, the
//! two informed-fraction thresholds, regime classification and the
//! closed-form optimal structure in each regime.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{solve_equilibrium, EquilibriumOutcome};
use crate::error::{Error, Result};
use crate::model::{InformationStructure, NetworkScenario, PerSignal, ValidScenario};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Prior at or below `p_bar`: silence already yields zero spillover.
    NoPersuasion,
    /// `lambda < lambda_low`: reveal the state fully.
    Lambda1,
    /// `lambda_low <= lambda < lambda_high`.
    Lambda2,
    /// `lambda >= lambda_high`: the optimum no longer depends on `lambda`.
    Lambda3,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::NoPersuasion => "no_persuasion",
            Regime::Lambda1 => "lambda1",
            Regime::Lambda2 => "lambda2",
            Regime::Lambda3 => "lambda3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds<T> {
    pub p_bar: T,
    /// Undefined when the prior does not exceed `p_bar`.
    pub lambda_low: Option<T>,
    pub lambda_high: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSolution<T> {
    pub regime: Regime,
    pub pi_star: InformationStructure<T>,
    pub outcome: EquilibriumOutcome<T>,
    pub loss: T,
    pub thresholds: Thresholds<T>,
}

/// Prior on the incident state at which the no-information route-2 flow
/// equals `tau`.
pub fn p_bar<T: Scalar>(s: &NetworkScenario<T>) -> Result<T> {
    let headroom = s.demand - s.tau;
    if !(headroom > T::zero()) {
        return Err(Error::Domain(format!("p_bar is singular for tau = demand = {}", s.tau)));
    }
    Ok((s.full_load_gap() / headroom - s.alpha2 - s.alpha1_n) / (s.alpha1_a - s.alpha1_n))
}

/// `(D - tau)(mean slope + alpha2) - (alpha2 D + b2 - b1)`: positive exactly
/// when the prior exceeds `p_bar`.
fn excess_pressure<T: Scalar>(s: &NetworkScenario<T>) -> T {
    (s.demand - s.tau) * (s.prior_slope() + s.alpha2) - s.full_load_gap()
}

fn incident_slope<T: Scalar>(s: &NetworkScenario<T>) -> T {
    s.alpha1_a + s.alpha2
}

fn persuasion_applies<T: Scalar>(s: &NetworkScenario<T>, p_bar: T) -> bool {
    s.p > p_bar + T::tol()
}

/// `(lambda_low, lambda_high)`. Only defined when the prior exceeds `p_bar`.
pub fn lambda_thresholds<T: Scalar>(s: &ValidScenario<T>) -> Result<(T, T)> {
    let pb = p_bar(s)?;
    if !persuasion_applies(s, pb) {
        return Err(Error::NoPersuasionRegime {
            p: s.p.as_f64(),
            p_bar: pb.as_f64(),
        });
    }
    let d = s.demand;
    let high = T::one() - s.full_load_gap() / (incident_slope(s) * d) - s.tau / d;
    let low = excess_pressure(s) / (d * s.p * incident_slope(s));
    let eps = T::tol();
    // The two thresholds coincide only when tau sits on its lower bound or
    // the prior is one; in that case the middle regime is empty.
    if !(low > T::zero() && low <= high + eps && high < T::one()) {
        return Err(Error::Numerical(format!(
            "thresholds out of order: lambda_low = {low}, lambda_high = {high}"
        )));
    }
    Ok((low, high.max(low)))
}

pub fn thresholds<T: Scalar>(s: &ValidScenario<T>) -> Result<Thresholds<T>> {
    let pb = p_bar(s)?;
    if !persuasion_applies(s, pb) {
        return Ok(Thresholds {
            p_bar: pb,
            lambda_low: None,
            lambda_high: None,
        });
    }
    let (low, high) = lambda_thresholds(s)?;
    Ok(Thresholds {
        p_bar: pb,
        lambda_low: Some(low),
        lambda_high: Some(high),
    })
}

/// Regime of `s` at its own informed fraction. Boundaries belong to the
/// upper regime; `p == p_bar` counts as no persuasion.
pub fn classify<T: Scalar>(s: &ValidScenario<T>) -> Result<Regime> {
    let t = thresholds(s)?;
    Ok(match (t.lambda_low, t.lambda_high) {
        (Some(low), Some(high)) => {
            if s.lambda < low {
                Regime::Lambda1
            } else if s.lambda < high {
                Regime::Lambda2
            } else {
                Regime::Lambda3
            }
        }
        _ => Regime::NoPersuasion,
    })
}

/// A regime's formulas evaluated at the scenario's informed fraction,
/// whether or not the scenario actually falls in that regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeClosedForm<T> {
    pub pi_a_given_a: T,
    pub f2: PerSignal<T>,
    pub loss: T,
}

pub fn regime_closed_form<T: Scalar>(s: &NetworkScenario<T>, regime: Regime) -> RegimeClosedForm<T> {
    let d = s.demand;
    let k = s.full_load_gap();
    let informed = s.lambda * d;
    let prior_split = s.prior_slope() + s.alpha2;
    let pressure = excess_pressure(s);
    let capped_flow = d - k / incident_slope(s);
    match regime {
        Regime::NoPersuasion => {
            let f = d - k / prior_split;
            RegimeClosedForm {
                pi_a_given_a: T::zero(),
                f2: PerSignal::new(f, f),
                loss: T::zero(),
            }
        }
        Regime::Lambda1 => {
            let f2_n = d - (k + informed * s.p * incident_slope(s)) / prior_split;
            let spread = s.p * (T::one() - s.p) * (s.alpha1_a - s.alpha1_n) * informed / prior_split;
            RegimeClosedForm {
                pi_a_given_a: T::one(),
                f2: PerSignal::new(f2_n, f2_n + informed),
                loss: d - s.tau - k / prior_split - spread,
            }
        }
        Regime::Lambda2 => RegimeClosedForm {
            pi_a_given_a: pressure / (informed * incident_slope(s) * s.p),
            f2: PerSignal::new(s.tau, s.tau + informed),
            loss: pressure / incident_slope(s),
        },
        Regime::Lambda3 => RegimeClosedForm {
            pi_a_given_a: pressure / (((d - s.tau) * incident_slope(s) - k) * s.p),
            f2: PerSignal::new(s.tau, capped_flow),
            loss: pressure / incident_slope(s),
        },
    }
}

/// Spillover-minimizing information structure for the scenario's informed
/// fraction, with the equilibrium it induces.
pub fn optimal_design<T: Scalar>(s: &ValidScenario<T>) -> Result<DesignSolution<T>> {
    let thresholds = thresholds(s)?;
    let regime = classify(s)?;
    let form = regime_closed_form(s, regime);
    let pi_star = InformationStructure::new(form.pi_a_given_a.min(T::one()), T::one())?;
    let outcome = solve_equilibrium(s, &pi_star)?;
    let recomputed = outcome.loss(s.tau)?;
    if (recomputed - form.loss).abs() / s.demand > T::tol() {
        return Err(Error::Numerical(format!(
            "{regime}: closed-form loss {} but induced equilibrium gives {recomputed}",
            form.loss
        )));
    }
    Ok(DesignSolution {
        regime,
        pi_star,
        outcome,
        loss: form.loss,
        thresholds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossPoint<T> {
    pub lambda: T,
    pub loss: T,
    pub regime: Regime,
}

pub fn loss_curve<T: Scalar>(s: &ValidScenario<T>, lambdas: &[T]) -> Result<Vec<LossPoint<T>>> {
    lambdas
        .iter()
        .map(|&lambda| {
            let sol = optimal_design(&s.with_lambda(lambda)?)?;
            Ok(LossPoint {
                lambda,
                loss: sol.loss,
                regime: sol.regime,
            })
        })
        .collect()
}

/// Equilibrium when the authority stays silent.
pub fn no_information_outcome<T: Scalar>(s: &ValidScenario<T>) -> Result<EquilibriumOutcome<T>> {
    solve_equilibrium(s, &InformationStructure::uninformative())
}

/// Equilibrium when the informed fraction learns the state exactly.
pub fn full_information_outcome<T: Scalar>(s: &ValidScenario<T>) -> Result<EquilibriumOutcome<T>> {
    solve_equilibrium(s, &InformationStructure::full_revelation())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example1;
    use approx::assert_abs_diff_eq;

    fn valid(lambda: f64) -> ValidScenario<f64> {
        example1(lambda).into_valid().unwrap()
    }

    #[test]
    fn p_bar_example_one() {
        assert_abs_diff_eq!(p_bar(&example1(0.2)).unwrap(), 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn p_bar_at_tau_bounds() {
        let s = example1(0.2);
        let (lo, hi) = s.tau_range();
        assert_abs_diff_eq!(p_bar(&s.with_tau(lo)).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p_bar(&s.with_tau(hi)).unwrap(), 1.0, epsilon = 1e-12);
        assert!(p_bar(&s.with_tau(10.0)).is_err());
    }

    #[test]
    fn p_bar_solves_no_information_flow_equals_tau() {
        // Bisection on p of the no-information flow, independent of the formula.
        let s = example1(0.2);
        let flow = |p: f64| {
            let slope = 3.0 * p + (1.0 - p);
            10.0 - 25.0 / (slope + 2.0)
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if flow(mid) < s.tau {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_abs_diff_eq!(p_bar(&s).unwrap(), lo, epsilon = 1e-12);
    }

    #[test]
    fn thresholds_example_one() {
        let (low, high) = lambda_thresholds(&valid(0.2)).unwrap();
        assert_abs_diff_eq!(low, 2.0 / 15.0, epsilon = 1e-12);
        assert_abs_diff_eq!(high, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn thresholds_decrease_in_tau() {
        let mut prev = lambda_thresholds(&valid(0.2)).unwrap();
        for tau in [2.6, 2.8, 3.0] {
            let s = example1(0.2).with_tau(tau).into_valid().unwrap();
            let next = lambda_thresholds(&s).unwrap();
            assert!(next.0 < prev.0 && next.1 < prev.1, "tau {tau}");
            prev = next;
        }
    }

    #[test]
    fn lambda_low_vanishes_as_prior_approaches_p_bar() {
        let pb = 1.0 / 6.0;
        let mut last = f64::INFINITY;
        for dp in [1e-1, 1e-2, 1e-3, 1e-5] {
            let s = example1(0.2).with_p(pb + dp).into_valid().unwrap();
            let (low, _) = lambda_thresholds(&s).unwrap();
            assert!(low > 0.0 && low < last);
            last = low;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn thresholds_refused_without_persuasion() {
        let s = example1(0.2).with_p(0.1).into_valid().unwrap();
        assert!(matches!(lambda_thresholds(&s), Err(Error::NoPersuasionRegime { .. })));
        let s = example1(0.2).with_p(1.0 / 6.0).into_valid().unwrap();
        assert_eq!(classify(&s).unwrap(), Regime::NoPersuasion);
    }

    #[test]
    fn regime_one_design() {
        let sol = optimal_design(&valid(0.05)).unwrap();
        assert_eq!(sol.regime, Regime::Lambda1);
        assert_eq!(sol.pi_star, InformationStructure::full_revelation());
        let expected = 10.0 - 2.5 - 25.0 / 3.6 - 0.3 * 0.7 * 2.0 * 0.05 * 10.0 / 3.6;
        assert_abs_diff_eq!(sol.loss, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.loss, 0.497222209, epsilon = 1e-6);
        assert_abs_diff_eq!(sol.outcome.f2.n, 2.847222098, epsilon = 1e-6);
        assert_abs_diff_eq!(sol.outcome.f2.a, 3.347222098, epsilon = 1e-6);
    }

    #[test]
    fn regime_two_design() {
        let sol = optimal_design(&valid(0.2)).unwrap();
        assert_eq!(sol.regime, Regime::Lambda2);
        assert_abs_diff_eq!(sol.pi_star.pi_a_given_a, 2.0 / 3.0, epsilon = 1e-12);
        assert_eq!(sol.pi_star.pi_n_given_n, 1.0);
        assert_abs_diff_eq!(sol.outcome.f2.n, 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.outcome.f2.a, 4.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.loss, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.outcome.costs.pop1, 25.3, epsilon = 1e-6);
        assert_abs_diff_eq!(sol.outcome.costs.pop2, 25.8, epsilon = 1e-6);
    }

    #[test]
    fn regime_three_design() {
        let sol = optimal_design(&valid(0.6)).unwrap();
        assert_eq!(sol.regime, Regime::Lambda3);
        assert_abs_diff_eq!(sol.pi_star.pi_a_given_a, 8.0 / 15.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.outcome.f2.n, 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.outcome.f2.a, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.loss, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.outcome.costs.pop1, 25.8, epsilon = 1e-6);
        assert_abs_diff_eq!(sol.outcome.costs.pop2, 25.8, epsilon = 1e-6);
    }

    #[test]
    fn no_persuasion_design() {
        let s = example1(0.5).with_p(0.1).into_valid().unwrap();
        let sol = optimal_design(&s).unwrap();
        assert_eq!(sol.regime, Regime::NoPersuasion);
        assert_eq!(sol.pi_star, InformationStructure::uninformative());
        assert_eq!(sol.loss, 0.0);
        assert!(sol.outcome.f2.n <= s.tau);
    }

    #[test]
    fn regime_boundaries_belong_to_upper_regime() {
        let (low, high) = lambda_thresholds(&valid(0.2)).unwrap();
        assert_eq!(classify(&valid(low)).unwrap(), Regime::Lambda2);
        assert_eq!(classify(&valid(high)).unwrap(), Regime::Lambda3);
    }

    #[test]
    fn loss_curve_endpoints() {
        let low = 2.0 / 15.0;
        let curve = loss_curve(&valid(0.2), &[0.0, low, 1.0]).unwrap();
        assert_abs_diff_eq!(curve[0].loss, 10.0 - 2.5 - 25.0 / 3.6, epsilon = 1e-12);
        assert_abs_diff_eq!(curve[1].loss, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(curve[2].loss, 0.4, epsilon = 1e-12);

        let silent = example1(0.2).with_p(0.12).into_valid().unwrap();
        let curve = loss_curve(&silent, &[0.0, 0.5, 1.0]).unwrap();
        assert!(curve
            .iter()
            .all(|pt| pt.loss == 0.0 && pt.regime == Regime::NoPersuasion));
    }

    #[test]
    fn regime_three_is_lambda_independent() {
        let a = optimal_design(&valid(0.3)).unwrap();
        let b = optimal_design(&valid(0.9)).unwrap();
        assert_eq!(a.pi_star, b.pi_star);
        assert_abs_diff_eq!(a.outcome.f2.n, b.outcome.f2.n, epsilon = 1e-12);
        assert_abs_diff_eq!(a.outcome.f2.a, b.outcome.f2.a, epsilon = 1e-12);
        assert_eq!(a.loss, b.loss);
    }
}

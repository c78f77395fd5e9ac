//! Network primitives: the scenario, information structures, affine route
//! costs and the spillover loss.

use std::fmt;
use std::ops::Deref;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Network state, and also the label of the signal that reports it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signal {
    /// Incident on route 1.
    A,
    /// Nominal conditions.
    N,
}

pub type State = Signal;

impl Signal {
    pub const ALL: [Signal; 2] = [Signal::N, Signal::A];
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signal::A => f.write_str("a"),
            Signal::N => f.write_str("n"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Route {
    R1,
    R2,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Route::R1 => f.write_str("r1"),
            Route::R2 => f.write_str("r2"),
        }
    }
}

/// A value attached to each of the two signals.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerSignal<T> {
    pub n: T,
    pub a: T,
}

impl<T: Copy> PerSignal<T> {
    pub fn new(n: T, a: T) -> Self {
        Self { n, a }
    }

    pub fn get(&self, s: Signal) -> T {
        match s {
            Signal::A => self.a,
            Signal::N => self.n,
        }
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> PerSignal<U> {
        PerSignal {
            n: f(self.n),
            a: f(self.a),
        }
    }
}

/// Exogenous parameters of the two-route game.
///
/// Route 1 costs `alpha1_a * f1 + b1` under an incident and
/// `alpha1_n * f1 + b1` otherwise; route 2 costs `alpha2 * f2 + b2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkScenario<T> {
    pub alpha1_a: T,
    pub alpha1_n: T,
    pub alpha2: T,
    pub b1: T,
    pub b2: T,
    pub demand: T,
    /// Prior probability of the incident state.
    pub p: T,
    /// Fraction of travelers who receive the signal.
    #[serde(rename = "lambda_")]
    pub lambda: T,
    /// Spillover threshold on route 2.
    pub tau: T,
}

impl<T: Scalar> NetworkScenario<T> {
    /// `c2(D) - b1`, the constant that appears in every equilibrium flow.
    pub fn full_load_gap(&self) -> T {
        self.alpha2 * self.demand + self.b2 - self.b1
    }

    /// Prior-mean slope of route 1.
    pub fn prior_slope(&self) -> T {
        self.alpha1_a * self.p + self.alpha1_n * (T::one() - self.p)
    }

    /// Admissible spillover thresholds: the complete-information route-2
    /// flows in the nominal and incident states.
    pub fn tau_range(&self) -> (T, T) {
        let d = self.demand;
        let k = self.full_load_gap();
        (
            d - k / (self.alpha1_n + self.alpha2),
            d - k / (self.alpha1_a + self.alpha2),
        )
    }

    pub fn route1_cost(&self, state: State) -> CostFunction<T> {
        let slope = match state {
            State::A => self.alpha1_a,
            State::N => self.alpha1_n,
        };
        CostFunction {
            slope,
            intercept: self.b1,
        }
    }

    pub fn route2_cost(&self) -> CostFunction<T> {
        CostFunction {
            slope: self.alpha2,
            intercept: self.b2,
        }
    }

    pub fn with_lambda(mut self, lambda: T) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_tau(mut self, tau: T) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_p(mut self, p: T) -> Self {
        self.p = p;
        self
    }

    /// Lists every violated invariant; an empty report means the scenario is
    /// admissible for all solvers.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let fields = [
            ("alpha1_a", self.alpha1_a),
            ("alpha1_n", self.alpha1_n),
            ("alpha2", self.alpha2),
            ("b1", self.b1),
            ("b2", self.b2),
            ("demand", self.demand),
            ("p", self.p),
            ("lambda_", self.lambda),
            ("tau", self.tau),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                report.push(Violation::NotFinite(name));
            }
        }
        if !report.is_empty() {
            return report;
        }
        for (name, value) in &fields[..6] {
            if *value <= T::zero() {
                report.push(Violation::NotPositive(name));
            }
        }
        if self.tau <= T::zero() {
            report.push(Violation::NotPositive("tau"));
        }
        for (name, value) in [("p", self.p), ("lambda_", self.lambda)] {
            if value < T::zero() || value > T::one() {
                report.push(Violation::OutsideUnit(name));
            }
        }
        if self.b1 >= self.b2 {
            report.push(Violation::FreeFlowOrder);
        }
        if self.alpha1_a <= self.alpha2 {
            report.push(Violation::IncidentSlopeOrder);
        }
        if self.alpha2 <= self.alpha1_n {
            report.push(Violation::NominalSlopeOrder);
        }
        let slopes_positive = self.alpha1_n > T::zero() && self.alpha2 > T::zero();
        if slopes_positive && self.demand <= (self.b2 - self.b1) / self.alpha1_n {
            report.push(Violation::DemandTooLow);
        }
        if slopes_positive && self.alpha1_a > T::zero() && self.demand > T::zero() {
            let (lo, hi) = self.tau_range();
            let eps = T::tol();
            let d = self.demand;
            if (self.tau - lo) / d < -eps {
                report.push(Violation::TauBelowRange {
                    tau: self.tau.as_f64(),
                    low: lo.as_f64(),
                    high: hi.as_f64(),
                });
            } else if (self.tau - hi) / d > eps {
                report.push(Violation::TauAboveRange {
                    tau: self.tau.as_f64(),
                    low: lo.as_f64(),
                    high: hi.as_f64(),
                });
            }
        }
        report
    }

    pub fn into_valid(self) -> Result<ValidScenario<T>> {
        ValidScenario::new(self)
    }
}

impl<T: Scalar + DeserializeOwned> NetworkScenario<T> {
    /// Parses the flat `key = value` scenario document. Unknown or missing
    /// keys are errors.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl<T: Scalar + Serialize> NetworkScenario<T> {
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A scenario that passed [`NetworkScenario::validate`]. Solvers only accept
/// this type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidScenario<T>(NetworkScenario<T>);

impl<T: Scalar> ValidScenario<T> {
    pub fn new(scenario: NetworkScenario<T>) -> Result<Self> {
        let report = scenario.validate();
        if report.is_empty() {
            Ok(Self(scenario))
        } else {
            Err(Error::InvalidScenario(report))
        }
    }

    /// Same network at another informed fraction. The fraction is the only
    /// field whose admissibility does not interact with the others.
    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        if !(lambda >= T::zero() && lambda <= T::one()) {
            let mut report = ValidationReport::default();
            report.push(Violation::OutsideUnit("lambda_"));
            return Err(Error::InvalidScenario(report));
        }
        Ok(Self(self.0.with_lambda(lambda)))
    }

    pub fn scenario(&self) -> &NetworkScenario<T> {
        &self.0
    }

    pub fn into_inner(self) -> NetworkScenario<T> {
        self.0
    }
}

impl<T> Deref for ValidScenario<T> {
    type Target = NetworkScenario<T>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotFinite(&'static str),
    NotPositive(&'static str),
    OutsideUnit(&'static str),
    FreeFlowOrder,
    IncidentSlopeOrder,
    NominalSlopeOrder,
    DemandTooLow,
    TauBelowRange { tau: f64, low: f64, high: f64 },
    TauAboveRange { tau: f64, low: f64, high: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotFinite(name) => write!(f, "{name} must be finite"),
            Violation::NotPositive(name) => write!(f, "{name} must be positive"),
            Violation::OutsideUnit(name) => write!(f, "{name} must lie in [0, 1]"),
            Violation::FreeFlowOrder => f.write_str("b1 < b2 violated"),
            Violation::IncidentSlopeOrder => f.write_str("alpha1_a > alpha2 violated"),
            Violation::NominalSlopeOrder => f.write_str("alpha2 > alpha1_n violated"),
            Violation::DemandTooLow => f.write_str("demand > (b2 - b1)/alpha1_n violated"),
            Violation::TauBelowRange { tau, low, high } => {
                write!(f, "tau below admissible range: {tau} < {low} (range [{low}, {high}])")
            }
            Violation::TauAboveRange { tau, low, high } => {
                write!(f, "tau above admissible range: {tau} > {high} (range [{low}, {high}])")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn messages(&self) -> Vec<String> {
        self.violations.iter().map(ToString::to_string).collect()
    }

    pub fn contains(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.to_string().contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        f.write_str(&self.messages().join("; "))
    }
}

/// Signal distribution conditional on the state. Only the two diagonal
/// entries are stored; the off-diagonal ones follow from row-stochasticity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationStructure<T> {
    pub pi_a_given_a: T,
    pub pi_n_given_n: T,
}

impl<T: Scalar> InformationStructure<T> {
    /// Checks both entries lie in `[0, 1]` and that signal `n` is at least as
    /// likely in state `n` as in state `a`. Values within tolerance of a
    /// boundary are snapped onto it.
    pub fn new(pi_a_given_a: T, pi_n_given_n: T) -> Result<Self> {
        let eps = T::tol();
        let in_unit = |x: T| x.is_finite() && x >= -eps && x <= T::one() + eps;
        if !in_unit(pi_a_given_a) || !in_unit(pi_n_given_n) {
            return Err(Error::InvalidInformationStructure(format!(
                "probabilities must lie in [0, 1], got pi(a|a) = {pi_a_given_a}, pi(n|n) = {pi_n_given_n}"
            )));
        }
        let aa = pi_a_given_a.max(T::zero()).min(T::one());
        let nn = pi_n_given_n.max(T::zero()).min(T::one());
        if nn < T::one() - aa - eps {
            return Err(Error::InvalidInformationStructure(format!(
                "pi(n|n) = {nn} is below pi(n|a) = {}",
                T::one() - aa
            )));
        }
        Ok(Self {
            pi_a_given_a: aa,
            pi_n_given_n: nn.max(T::one() - aa),
        })
    }

    /// Perfectly informative signal.
    pub fn full_revelation() -> Self {
        Self {
            pi_a_given_a: T::one(),
            pi_n_given_n: T::one(),
        }
    }

    /// The all-`n` structure: always send `n`, revealing nothing.
    pub fn uninformative() -> Self {
        Self {
            pi_a_given_a: T::zero(),
            pi_n_given_n: T::one(),
        }
    }

    pub fn pi_n_given_a(&self) -> T {
        T::one() - self.pi_a_given_a
    }

    pub fn pi_a_given_n(&self) -> T {
        T::one() - self.pi_n_given_n
    }

    /// `pi(signal | state)`.
    pub fn prob(&self, signal: Signal, state: State) -> T {
        match (signal, state) {
            (Signal::A, State::A) => self.pi_a_given_a,
            (Signal::N, State::A) => self.pi_n_given_a(),
            (Signal::A, State::N) => self.pi_a_given_n(),
            (Signal::N, State::N) => self.pi_n_given_n,
        }
    }

    /// Joint probability `theta(state) * pi(signal | state)`.
    pub fn joint(&self, prior_a: T, state: State, signal: Signal) -> T {
        let theta = match state {
            State::A => prior_a,
            State::N => T::one() - prior_a,
        };
        theta * self.prob(signal, state)
    }

    pub fn is_uninformative(&self) -> bool {
        (self.pi_a_given_a - self.pi_a_given_n()).abs() <= T::tol()
    }
}

/// Affine, increasing route cost `slope * flow + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostFunction<T> {
    pub slope: T,
    pub intercept: T,
}

impl<T: Scalar> CostFunction<T> {
    pub fn new(slope: T, intercept: T) -> Result<Self> {
        if !(slope > T::zero()) || !(intercept > T::zero()) {
            return Err(Error::Domain(format!(
                "cost function needs positive slope and intercept, got {slope} and {intercept}"
            )));
        }
        Ok(Self { slope, intercept })
    }

    /// Evaluates without checking the sign of `flow`.
    #[inline]
    pub fn at(&self, flow: T) -> T {
        self.slope * flow + self.intercept
    }
}

pub fn route_cost<T: Scalar>(cf: &CostFunction<T>, flow: T) -> Result<T> {
    if !(flow >= T::zero()) {
        return Err(Error::Domain(format!("route flow must be nonnegative, got {flow}")));
    }
    Ok(cf.at(flow))
}

/// Average route-2 flow above `tau`, weighted by the signal marginals.
pub fn spillover_loss<T: Scalar>(marginals: PerSignal<T>, flows2: PerSignal<T>, tau: T) -> Result<T> {
    let eps = T::tol();
    let ok = |x: T| x.is_finite() && x >= -eps && x <= T::one() + eps;
    if !ok(marginals.a) || !ok(marginals.n) || (marginals.a + marginals.n - T::one()).abs() > eps {
        return Err(Error::Domain(format!(
            "signal marginals must be probabilities summing to one, got ({}, {})",
            marginals.a, marginals.n
        )));
    }
    Ok(marginals.a * (flows2.a - tau).pos() + marginals.n * (flows2.n - tau).pos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example1;

    #[test]
    fn example_one_is_valid() {
        assert!(example1(0.2).validate().is_empty());
        assert!(example1(0.0).validate().is_empty());
        assert!(example1(1.0).validate().is_empty());
    }

    #[test]
    fn each_single_inequality_violation_is_reported() {
        let base = example1(0.2);
        let cases: Vec<(NetworkScenario<f64>, &str)> = vec![
            (NetworkScenario { b1: 25.0, ..base }, "b1 < b2 violated"),
            (NetworkScenario { alpha1_a: 1.5, ..base }, "alpha1_a > alpha2 violated"),
            (
                NetworkScenario {
                    alpha1_n: 2.5,
                    alpha1_a: 4.0,
                    ..base
                },
                "alpha2 > alpha1_n violated",
            ),
            (
                NetworkScenario { demand: 4.0, ..base },
                "demand > (b2 - b1)/alpha1_n violated",
            ),
            (NetworkScenario { tau: 1.0, ..base }, "tau below admissible range"),
            (NetworkScenario { tau: 5.5, ..base }, "tau above admissible range"),
            (NetworkScenario { p: 1.5, ..base }, "p must lie in [0, 1]"),
            (NetworkScenario { lambda: -0.1, ..base }, "lambda_ must lie in [0, 1]"),
            (NetworkScenario { b1: -1.0, ..base }, "b1 must be positive"),
            (
                NetworkScenario {
                    demand: f64::NAN,
                    ..base
                },
                "demand must be finite",
            ),
        ];
        for (s, needle) in cases {
            let report = s.validate();
            assert!(report.contains(needle), "{needle:?} not in {report}");
        }
    }

    #[test]
    fn tau_range_matches_hand_values() {
        let (lo, hi) = example1(0.2).tau_range();
        assert!((lo - (10.0 - 25.0 / 3.0)).abs() < 1e-12);
        assert!((hi - 5.0).abs() < 1e-12);
        // Both endpoints are admissible.
        assert!(example1(0.2).with_tau(lo).validate().is_empty());
        assert!(example1(0.2).with_tau(hi).validate().is_empty());
    }

    #[test]
    fn route_costs_of_example_one() {
        let s = example1(0.2);
        assert_eq!(route_cost(&s.route2_cost(), 5.0).unwrap(), 30.0);
        assert_eq!(route_cost(&s.route1_cost(State::A), 5.0).unwrap(), 30.0);
        assert_eq!(route_cost(&s.route1_cost(State::N), 0.0).unwrap(), 15.0);
        assert!(route_cost(&s.route2_cost(), -0.1).is_err());
        assert!(CostFunction::new(0.0, 1.0).is_err());
    }

    #[test]
    fn spillover_cases() {
        let l = spillover_loss::<f64>(PerSignal::new(0.84, 0.16), PerSignal::new(2.5, 5.0), 2.5).unwrap();
        assert!((l - 0.4).abs() < 1e-12);
        let l = spillover_loss::<f64>(PerSignal::new(0.3, 0.7), PerSignal::new(1.0, 2.0), 2.5).unwrap();
        assert_eq!(l, 0.0);
        let l = spillover_loss::<f64>(PerSignal::new(0.0, 1.0), PerSignal::new(2.0, 3.5), 2.5).unwrap();
        assert_eq!(l, 1.0);
        assert!(spillover_loss::<f64>(PerSignal::new(0.5, 0.6), PerSignal::new(1.0, 1.0), 2.5).is_err());
    }

    #[test]
    fn information_structure_feasibility() {
        assert!(InformationStructure::<f64>::new(0.3, 0.6).is_err());
        assert!(InformationStructure::<f64>::new(1.2, 1.0).is_err());
        let pi = InformationStructure::<f64>::new(0.4, 0.6).unwrap();
        assert!(pi.is_uninformative());
        assert!((pi.prob(Signal::N, State::A) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn scenario_file_rejects_unknown_and_missing_keys() {
        let text = example1(0.2).to_toml_string().unwrap();
        let back = NetworkScenario::<f64>::from_toml_str(&text).unwrap();
        assert_eq!(back, example1(0.2));
        let extra = format!("{text}gamma = 1.0\n");
        assert!(NetworkScenario::<f64>::from_toml_str(&extra).is_err());
        let missing: String = text
            .lines()
            .filter(|l| !l.starts_with("tau"))
            .map(|l| format!("{l}\n"))
            .collect();
        let err = NetworkScenario::<f64>::from_toml_str(&missing).unwrap_err();
        assert!(err.to_string().contains("tau"), "{err}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn spillover_monotone(pa in 0.0..=1.0f64, fa in 0.0..10.0f64, fn_ in 0.0..10.0f64,
                                  df in 0.0..2.0f64, tau in 0.1..5.0f64, dt in 0.0..2.0f64) {
                let m = PerSignal::new(1.0 - pa, pa);
                let base = spillover_loss(m, PerSignal::new(fn_, fa), tau).unwrap();
                prop_assert!(base >= 0.0);
                let up = spillover_loss(m, PerSignal::new(fn_ + df, fa + df), tau).unwrap();
                prop_assert!(up >= base - 1e-12);
                let higher_tau = spillover_loss(m, PerSignal::new(fn_, fa), tau + dt).unwrap();
                prop_assert!(higher_tau <= base + 1e-12);
            }

            #[test]
            fn spillover_is_linear_between_kinks(pa in 0.01..0.99f64, fa in 0.0..10.0f64, tau in 0.1..5.0f64) {
                // Away from f = tau the loss is affine in each flow with slope Pr(s) or 0.
                let m = PerSignal::new(1.0 - pa, pa);
                prop_assume!((fa - tau).abs() > 1e-3);
                let h = 1e-4;
                let l0 = spillover_loss(m, PerSignal::new(0.0, fa), tau).unwrap();
                let l1 = spillover_loss(m, PerSignal::new(0.0, fa + h), tau).unwrap();
                let slope = (l1 - l0) / h;
                let expected = if fa > tau { pa } else { 0.0 };
                prop_assert!((slope - expected).abs() < 1e-6);
            }
        }
    }
}

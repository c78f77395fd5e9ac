//! Posterior beliefs, the unique Bayesian Wardrop equilibrium for a given
//! information structure, equilibrium checks and population costs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{InformationStructure, NetworkScenario, PerSignal, Route, Signal, State, ValidScenario};
use crate::scalar::Scalar;

/// Posteriors of the incident state after each signal, and the signal
/// marginal. A signal sent with probability zero carries the prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefSystem<T> {
    pub beta_a_of_a: T,
    pub beta_n_of_a: T,
    pub pr_a: T,
}

impl<T: Scalar> BeliefSystem<T> {
    pub fn pr_n(&self) -> T {
        T::one() - self.pr_a
    }

    pub fn marginals(&self) -> PerSignal<T> {
        PerSignal::new(self.pr_n(), self.pr_a)
    }

    /// Posterior probability of `state` after `signal`.
    pub fn posterior(&self, signal: Signal, state: State) -> T {
        let of_a = match signal {
            Signal::A => self.beta_a_of_a,
            Signal::N => self.beta_n_of_a,
        };
        match state {
            State::A => of_a,
            State::N => T::one() - of_a,
        }
    }

    /// Left-hand side of the Bayes-plausibility identity; equals the prior.
    pub fn mean_posterior(&self) -> T {
        self.beta_a_of_a * self.pr_a + self.beta_n_of_a * self.pr_n()
    }
}

/// Bayes' rule for both signals.
pub fn posterior_beliefs<T: Scalar>(s: &NetworkScenario<T>, pi: &InformationStructure<T>) -> BeliefSystem<T> {
    let p = s.p;
    let joint = |signal: Signal| {
        (
            pi.joint(p, State::A, signal),
            pi.joint(p, State::A, signal) + pi.joint(p, State::N, signal),
        )
    };
    let posterior = |(mass_a, mass): (T, T)| {
        if mass > T::zero() {
            (mass_a / mass).min(T::one())
        } else {
            p
        }
    };
    let (a_mass_a, pr_a) = joint(Signal::A);
    let n_joint = joint(Signal::N);
    BeliefSystem {
        beta_a_of_a: posterior((a_mass_a, pr_a)),
        beta_n_of_a: posterior(n_joint),
        pr_a: pr_a.min(T::one()),
    }
}

/// Route-1 slope averaged under a belief that puts `belief_of_a` on the
/// incident state.
pub fn mean_slope<T: Scalar>(belief_of_a: T, s: &NetworkScenario<T>) -> T {
    s.alpha1_a * belief_of_a + s.alpha1_n * (T::one() - belief_of_a)
}

/// Partition value from already computed beliefs.
pub fn partition_from_beliefs<T: Scalar>(s: &NetworkScenario<T>, beliefs: &BeliefSystem<T>) -> T {
    let k = s.full_load_gap();
    let d = s.demand;
    let slope_n = mean_slope(beliefs.beta_n_of_a, s) + s.alpha2;
    let slope_a = mean_slope(beliefs.beta_a_of_a, s) + s.alpha2;
    (k / (slope_n * d) - k / (slope_a * d)).max(T::zero())
}

/// Demand-normalized gap between the split-branch route-2 flows under the
/// two signals. Compared against the informed fraction to pick the branch.
pub fn partition_value<T: Scalar>(s: &NetworkScenario<T>, pi: &InformationStructure<T>) -> T {
    partition_from_beliefs(s, &posterior_beliefs(s, pi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Informed travelers take route 1 on `n` and route 2 on `a`.
    InformedSwitchAll,
    /// Both populations split over the two routes under every signal.
    BothSplit,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::InformedSwitchAll => f.write_str("informed_switch_all"),
            Branch::BothSplit => f.write_str("both_split"),
        }
    }
}

/// Average experienced travel time per traveler of each population, and
/// over everyone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationCosts<T> {
    pub pop1: T,
    pub pop2: T,
    pub average: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumOutcome<T> {
    /// Route-2 aggregate flow under each signal.
    pub f2: PerSignal<T>,
    pub branch: Branch,
    pub g_value: T,
    pub beliefs: BeliefSystem<T>,
    pub costs: PopulationCosts<T>,
}

impl<T: Scalar> EquilibriumOutcome<T> {
    pub fn f1(&self, s: &NetworkScenario<T>) -> PerSignal<T> {
        self.f2.map(|f| s.demand - f)
    }

    /// Spillover loss of this outcome at threshold `tau`.
    pub fn loss(&self, tau: T) -> Result<T> {
        crate::model::spillover_loss(self.beliefs.marginals(), self.f2, tau)
    }
}

/// Route-2 flows of the unique equilibrium, and which branch produced them.
pub fn equilibrium_flows<T: Scalar>(
    s: &NetworkScenario<T>,
    beliefs: &BeliefSystem<T>,
    g_value: T,
) -> (PerSignal<T>, Branch) {
    let d = s.demand;
    let k = s.full_load_gap();
    if g_value >= s.lambda - T::tol() {
        let informed = s.lambda * d;
        let slope_a = mean_slope(beliefs.beta_a_of_a, s) + s.alpha2;
        let f2_n = d - (k + informed * beliefs.pr_a * slope_a) / (s.prior_slope() + s.alpha2);
        (PerSignal::new(f2_n, f2_n + informed), Branch::InformedSwitchAll)
    } else {
        let split = |belief: T| d - k / (mean_slope(belief, s) + s.alpha2);
        (
            PerSignal::new(split(beliefs.beta_n_of_a), split(beliefs.beta_a_of_a)),
            Branch::BothSplit,
        )
    }
}

/// Unique Bayesian Wardrop equilibrium under `pi`, with population costs.
pub fn solve_equilibrium<T: Scalar>(
    s: &ValidScenario<T>,
    pi: &InformationStructure<T>,
) -> Result<EquilibriumOutcome<T>> {
    let beliefs = posterior_beliefs(s, pi);
    let g_value = partition_from_beliefs(s, &beliefs);
    let (raw, branch) = equilibrium_flows(s, &beliefs, g_value);

    let d = s.demand;
    let eps = T::tol();
    for (signal, f) in [(Signal::N, raw.n), (Signal::A, raw.a)] {
        if !(f / d >= -eps && f / d <= T::one() + eps) {
            return Err(Error::Numerical(format!(
                "route-2 flow {f} under signal {signal} is outside [0, {d}]"
            )));
        }
    }
    let f2 = raw.map(|f| f.max(T::zero()).min(d));
    let costs = population_costs(s, pi, f2)?;
    Ok(EquilibriumOutcome {
        f2,
        branch,
        g_value,
        beliefs,
        costs,
    })
}

/// Route-2 usage of each population; route-1 usage is the remainder of the
/// population's mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile<T> {
    /// Informed travelers on route 2, per received signal.
    pub pop1_route2: PerSignal<T>,
    /// Uninformed travelers on route 2.
    pub pop2_route2: T,
    pub pop1_mass: T,
    pub pop2_mass: T,
}

impl<T: Scalar> StrategyProfile<T> {
    pub fn pop1(&self, route: Route, signal: Signal) -> T {
        let on2 = self.pop1_route2.get(signal);
        match route {
            Route::R1 => self.pop1_mass - on2,
            Route::R2 => on2,
        }
    }

    pub fn pop2(&self, route: Route) -> T {
        match route {
            Route::R1 => self.pop2_mass - self.pop2_route2,
            Route::R2 => self.pop2_route2,
        }
    }

    fn with_pop2_route2(s: &NetworkScenario<T>, flows2: PerSignal<T>, x: T) -> Self {
        let m1 = s.lambda * s.demand;
        let m2 = s.demand - m1;
        let x = x.max(T::zero()).min(m2);
        Self {
            pop1_route2: flows2.map(|f| (f - x).max(T::zero()).min(m1)),
            pop2_route2: x,
            pop1_mass: m1,
            pop2_mass: m2,
        }
    }
}

/// Feasible range of uninformed route-2 mass consistent with `flows2`.
fn decomposition_range<T: Scalar>(s: &NetworkScenario<T>, flows2: PerSignal<T>) -> (T, T) {
    let m1 = s.lambda * s.demand;
    let m2 = s.demand - m1;
    let lo = T::zero().max(flows2.n - m1).max(flows2.a - m1);
    let hi = m2.min(flows2.n).min(flows2.a);
    (lo, hi)
}

/// Splits aggregate flows into a feasible profile. Among all decompositions
/// the one with the least informed route-2 mass under `n` is returned.
pub fn recover_strategies<T: Scalar>(s: &NetworkScenario<T>, flows2: PerSignal<T>) -> Result<StrategyProfile<T>> {
    let (lo, hi) = decomposition_range(s, flows2);
    if lo > hi + T::tol() * s.demand {
        return Err(Error::Infeasible(format!(
            "route-2 flows (n: {}, a: {}) need uninformed route-2 mass in [{lo}, {hi}]",
            flows2.n, flows2.a
        )));
    }
    Ok(StrategyProfile::with_pop2_route2(s, flows2, hi.max(lo)))
}

/// Route cost `c_route^state` at the aggregate flow realised under `signal`.
fn realised_cost<T: Scalar>(
    s: &NetworkScenario<T>,
    flows2: PerSignal<T>,
    route: Route,
    state: State,
    signal: Signal,
) -> T {
    let f2 = flows2.get(signal);
    match route {
        Route::R1 => s.route1_cost(state).at(s.demand - f2),
        Route::R2 => s.route2_cost().at(f2),
    }
}

/// Expected cost of `route` for an informed traveler who received `signal`.
pub fn informed_expected_cost<T: Scalar>(
    s: &NetworkScenario<T>,
    beliefs: &BeliefSystem<T>,
    flows2: PerSignal<T>,
    route: Route,
    signal: Signal,
) -> T {
    [State::A, State::N].into_iter().fold(T::zero(), |acc, state| {
        acc + beliefs.posterior(signal, state) * realised_cost(s, flows2, route, state, signal)
    })
}

/// Expected cost of `route` for an uninformed traveler, under the common
/// prior over (state, signal).
pub fn uninformed_expected_cost<T: Scalar>(
    s: &NetworkScenario<T>,
    pi: &InformationStructure<T>,
    flows2: PerSignal<T>,
    route: Route,
) -> T {
    let mut acc = T::zero();
    for state in [State::A, State::N] {
        for signal in Signal::ALL {
            acc = acc + pi.joint(s.p, state, signal) * realised_cost(s, flows2, route, state, signal);
        }
    }
    acc
}

/// Population costs for `flows2`, using the canonical decomposition. An empty
/// population is assigned the other population's cost.
pub fn population_costs<T: Scalar>(
    s: &NetworkScenario<T>,
    pi: &InformationStructure<T>,
    flows2: PerSignal<T>,
) -> Result<PopulationCosts<T>> {
    let q = recover_strategies(s, flows2)?;
    let mut total1 = T::zero();
    let mut total2 = T::zero();
    for state in [State::A, State::N] {
        for signal in Signal::ALL {
            let mu = pi.joint(s.p, state, signal);
            for route in [Route::R1, Route::R2] {
                let c = realised_cost(s, flows2, route, state, signal);
                total1 = total1 + mu * c * q.pop1(route, signal);
                total2 = total2 + mu * c * q.pop2(route);
            }
        }
    }
    let m1 = q.pop1_mass;
    let m2 = q.pop2_mass;
    let (pop1, pop2) = match (m1 > T::zero(), m2 > T::zero()) {
        (true, true) => (total1 / m1, total2 / m2),
        (true, false) => (total1 / m1, total1 / m1),
        (false, true) => (total2 / m2, total2 / m2),
        (false, false) => unreachable!("demand is positive"),
    };
    Ok(PopulationCosts {
        pop1,
        pop2,
        average: s.lambda * pop1 + (T::one() - s.lambda) * pop2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Population {
    Informed,
    Uninformed,
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Population::Informed => f.write_str("population 1"),
            Population::Uninformed => f.write_str("population 2"),
        }
    }
}

/// A used route whose expected cost exceeds the cheapest option.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WardropViolation {
    pub population: Population,
    /// `None` for the uninformed population.
    pub signal: Option<Signal>,
    pub route: Route,
    pub excess_cost: f64,
}

impl fmt::Display for WardropViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} uses {}", self.population, self.route)?;
        if let Some(sig) = self.signal {
            write!(f, " on signal {sig}")?;
        }
        write!(f, " at excess expected cost {:e}", self.excess_cost)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T> {
    /// False when no nonnegative strategy profile induces the flows.
    pub feasible: bool,
    pub violations: Vec<WardropViolation>,
    /// The decomposition that was checked.
    pub profile: Option<StrategyProfile<T>>,
}

impl<T> VerificationReport<T> {
    pub fn is_equilibrium(&self) -> bool {
        self.feasible && self.violations.is_empty()
    }
}

fn violations_of<T: Scalar>(
    s: &NetworkScenario<T>,
    pi: &InformationStructure<T>,
    beliefs: &BeliefSystem<T>,
    flows2: PerSignal<T>,
    q: &StrategyProfile<T>,
) -> Vec<WardropViolation> {
    let used = T::tol() * s.demand;
    let slack = T::lit(T::COST_SLACK) * s.b2;
    let mut out = Vec::new();
    let mut check = |population, signal, costs: [T; 2], masses: [T; 2]| {
        let best = costs[0].min(costs[1]);
        for (i, route) in [Route::R1, Route::R2].into_iter().enumerate() {
            let excess = costs[i] - best;
            if masses[i] > used && excess > slack {
                out.push(WardropViolation {
                    population,
                    signal,
                    route,
                    excess_cost: excess.as_f64(),
                });
            }
        }
    };
    for signal in Signal::ALL {
        let costs = [Route::R1, Route::R2].map(|r| informed_expected_cost(s, beliefs, flows2, r, signal));
        let masses = [Route::R1, Route::R2].map(|r| q.pop1(r, signal));
        check(Population::Informed, Some(signal), costs, masses);
    }
    let costs = [Route::R1, Route::R2].map(|r| uninformed_expected_cost(s, pi, flows2, r));
    let masses = [Route::R1, Route::R2].map(|r| q.pop2(r));
    check(Population::Uninformed, None, costs, masses);
    out
}

/// Checks the Bayesian Wardrop conditions for aggregate route-2 flows.
///
/// The flows pass if some feasible strategy profile inducing them has every
/// used route at minimal expected cost (within `COST_SLACK * b2`). Otherwise
/// the violations of the canonical decomposition are reported.
pub fn verify_wardrop<T: Scalar>(
    s: &NetworkScenario<T>,
    pi: &InformationStructure<T>,
    flows2: PerSignal<T>,
) -> VerificationReport<T> {
    let beliefs = posterior_beliefs(s, pi);
    let (lo, hi) = decomposition_range(s, flows2);
    let flow_tol = T::tol() * s.demand;
    if lo > hi + flow_tol {
        return VerificationReport {
            feasible: false,
            violations: Vec::new(),
            profile: None,
        };
    }
    let hi = hi.max(lo);
    let m1 = s.lambda * s.demand;
    let m2 = s.demand - m1;
    let slack = T::lit(T::COST_SLACK) * s.b2;

    // Strict cost preferences pin down the uninformed route-2 mass.
    let (mut c_lo, mut c_hi) = (lo, hi);
    if m1 > flow_tol {
        for signal in Signal::ALL {
            let gap = informed_expected_cost(s, &beliefs, flows2, Route::R1, signal)
                - informed_expected_cost(s, &beliefs, flows2, Route::R2, signal);
            let f = flows2.get(signal);
            if gap > slack {
                c_hi = c_hi.min(f - m1);
            } else if gap < -slack {
                c_lo = c_lo.max(f);
            }
        }
    }
    if m2 > flow_tol {
        let gap =
            uninformed_expected_cost(s, pi, flows2, Route::R1) - uninformed_expected_cost(s, pi, flows2, Route::R2);
        if gap > slack {
            c_lo = c_lo.max(m2);
        } else if gap < -slack {
            c_hi = c_hi.min(T::zero());
        }
    }

    let clamp = |x: T| x.max(lo).min(hi);
    let mut canonical = None;
    for x in [hi, clamp(c_hi), clamp(c_lo)] {
        let q = StrategyProfile::with_pop2_route2(s, flows2, x);
        let violations = violations_of(s, pi, &beliefs, flows2, &q);
        if violations.is_empty() {
            return VerificationReport {
                feasible: true,
                violations,
                profile: Some(q),
            };
        }
        canonical.get_or_insert((q, violations));
    }
    let (q, violations) = canonical.expect("at least one candidate checked");
    VerificationReport {
        feasible: true,
        violations,
        profile: Some(q),
    }
}

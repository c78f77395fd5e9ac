//! Bayesian Wardrop equilibria and optimal information design for a
//! two-route network whose shorter route is prone to incidents.
//!
//! A fraction of travelers receives a noisy signal of the network state
//! from an information structure chosen by an authority. This crate solves
//! the resulting equilibrium in closed form, finds the structure that
//! minimizes the expected route-2 flow above a threshold, and ships
//! brute-force engines ([`oracle`]) that check both without the formulas.
//!
//! All solvers are generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod design;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod oracle;
pub mod record;
pub mod scalar;

pub use design::{
    classify, lambda_thresholds, loss_curve, optimal_design, p_bar, regime_closed_form, LossPoint, Regime,
    RegimeClosedForm, Thresholds,
};
pub use equilibrium::{
    mean_slope, partition_value, population_costs, posterior_beliefs, recover_strategies, solve_equilibrium,
    verify_wardrop, Branch, Population, WardropViolation,
};
pub use error::{Error, Result};
pub use model::{route_cost, spillover_loss, PerSignal, Route, Signal, State, ValidationReport, Violation};
pub use oracle::{best_response_equilibrium, grid_search_design, grid_search_trace, GridSpec};
pub use record::{DesignRecord, OutcomeRecord};
pub use scalar::Scalar;

pub type NetworkScenario = model::NetworkScenario<f64>;
pub type ValidScenario = model::ValidScenario<f64>;
pub type InformationStructure = model::InformationStructure<f64>;
pub type CostFunction = model::CostFunction<f64>;
pub type BeliefSystem = equilibrium::BeliefSystem<f64>;
pub type EquilibriumOutcome = equilibrium::EquilibriumOutcome<f64>;
pub type StrategyProfile = equilibrium::StrategyProfile<f64>;
pub type PopulationCosts = equilibrium::PopulationCosts<f64>;
pub type VerificationReport = equilibrium::VerificationReport<f64>;
pub type DesignSolution = design::DesignSolution<f64>;
pub type GridCell = oracle::GridCell<f64>;
pub type GridSearchResult = oracle::GridSearchResult<f64>;

/// The incident-prone network used throughout the documentation: route 1
/// costs `3 f1 + 15` under an incident and `f1 + 15` otherwise, route 2
/// costs `2 f2 + 20`, demand 10, incident prior 0.3, threshold 2.5.
pub fn example1(lambda: f64) -> NetworkScenario {
    model::NetworkScenario {
        alpha1_a: 3.0,
        alpha1_n: 1.0,
        alpha2: 2.0,
        b1: 15.0,
        b2: 20.0,
        demand: 10.0,
        p: 0.3,
        lambda,
        tau: 2.5,
    }
}

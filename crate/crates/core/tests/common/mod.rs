#![allow(dead_code)]

use infodesign::{p_bar, InformationStructure, NetworkScenario};
use rand::Rng;

/// Valid scenario with every structural inequality satisfied with margin and
/// the threshold strictly inside its admissible range.
pub fn random_scenario(rng: &mut impl Rng) -> NetworkScenario {
    let alpha1_n = rng.gen_range(0.5..2.0);
    let alpha2 = alpha1_n + rng.gen_range(0.3..2.0);
    let alpha1_a = alpha2 + rng.gen_range(0.3..3.0);
    let b1 = rng.gen_range(5.0..20.0);
    let b2 = b1 + rng.gen_range(1.0..10.0);
    let demand = (b2 - b1) / alpha1_n * rng.gen_range(1.5..4.0);
    let mut s = NetworkScenario {
        alpha1_a,
        alpha1_n,
        alpha2,
        b1,
        b2,
        demand,
        p: rng.gen_range(0.02..0.98),
        lambda: rng.gen_range(0.0..1.0),
        tau: 0.0,
    };
    let (lo, hi) = s.tau_range();
    s.tau = lo + (hi - lo) * rng.gen_range(0.05..0.95);
    assert!(s.validate().is_empty(), "{}", s.validate());
    s
}

/// Random scenario whose prior exceeds `p_bar`, so persuasion is optimal.
pub fn random_persuasion_scenario(rng: &mut impl Rng) -> NetworkScenario {
    let s = random_scenario(rng);
    let pb = p_bar(&s).unwrap();
    s.with_p(pb + (1.0 - pb) * rng.gen_range(0.05..0.95))
}

/// Uniform draw from the feasible set `pi(n|n) >= 1 - pi(a|a)`.
pub fn random_pi(rng: &mut impl Rng) -> InformationStructure {
    let aa: f64 = rng.gen_range(0.0..=1.0);
    let nn = rng.gen_range((1.0 - aa)..=1.0);
    InformationStructure::new(aa, nn).unwrap()
}

use infodesign::model::{InformationStructure, NetworkScenario};
use infodesign::{lambda_thresholds, optimal_design, p_bar, solve_equilibrium, verify_wardrop, Regime};

fn example1_f32(lambda: f32) -> NetworkScenario<f32> {
    NetworkScenario {
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

#[test]
fn single_precision_design_tracks_double() {
    for (lambda, regime) in [
        (0.05f32, Regime::Lambda1),
        (0.2, Regime::Lambda2),
        (0.6, Regime::Lambda3),
    ] {
        let s = example1_f32(lambda).into_valid().unwrap();
        let single = optimal_design(&s).unwrap();
        let double = optimal_design(&infodesign::example1(lambda as f64).into_valid().unwrap()).unwrap();
        assert_eq!(single.regime, regime);
        assert!((single.loss as f64 - double.loss).abs() < 1e-4);
        assert!((single.pi_star.pi_a_given_a as f64 - double.pi_star.pi_a_given_a).abs() < 1e-4);
    }
}

#[test]
fn single_precision_thresholds() {
    let s = example1_f32(0.2).into_valid().unwrap();
    assert!((p_bar(&s).unwrap() - 1.0 / 6.0).abs() < 1e-5);
    let (low, high) = lambda_thresholds(&s).unwrap();
    assert!((low - 2.0 / 15.0).abs() < 1e-5);
    assert!((high - 0.25).abs() < 1e-5);
}

#[test]
fn single_precision_equilibrium_verifies() {
    let s = example1_f32(0.1).into_valid().unwrap();
    let pi = InformationStructure::<f32>::full_revelation();
    let o = solve_equilibrium(&s, &pi).unwrap();
    assert!((o.f2.n - 95.0 / 36.0).abs() < 1e-4);
    assert!((o.f2.a - o.f2.n - 1.0).abs() < 1e-4);
    assert!(verify_wardrop(&s, &pi, o.f2).is_equilibrium());
}

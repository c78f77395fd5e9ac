//! Brute-force verification engines.
//!
//! Equilibria are found by letting travelers drift toward cheaper routes
//! until no used route is costlier than the alternative, and optimal designs
//! by exhausting a grid of information structures. Neither path evaluates
//! the closed-form flow or design formulas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::equilibrium::partition_value;
use crate::error::{Error, Result};
use crate::model::{spillover_loss, InformationStructure, PerSignal, Signal, State, ValidScenario};
use crate::scalar::Scalar;

pub const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Grid points per probability axis, endpoints included.
    pub steps_pi: usize,
    /// Initial profiles the dynamics are started from. The first is the
    /// midpoint profile, the rest are drawn at random; from two on, the
    /// restarts must agree on the flows.
    pub steps_flow: usize,
    /// Convergence threshold on the largest cost gap among used routes.
    pub tol: f64,
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            steps_pi: 201,
            steps_flow: 2,
            tol: 1e-10,
            seed: 0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps_pi < 2 {
            return Err(Error::Domain(format!(
                "steps_pi must be at least 2, got {}",
                self.steps_pi
            )));
        }
        if self.steps_flow < 1 {
            return Err(Error::Domain("steps_flow must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.steps_pi - 1) as f64
    }
}

/// Travelers of one kind that choose between the two routes: informed
/// travelers holding a given signal, or the uninformed population.
#[derive(Debug, Clone, Copy)]
struct Group<T> {
    mass: T,
    on_route2: T,
}

impl<T: Scalar> Group<T> {
    /// Largest cost disadvantage of a route that still carries mass.
    /// `gap` is route-1 cost minus route-2 cost.
    fn residual(&self, gap: T, used: T) -> T {
        let on1 = self.mass - self.on_route2;
        let mut r = T::zero();
        if on1 > used && gap > T::zero() {
            r = gap;
        }
        if self.on_route2 > used && gap < T::zero() {
            r = r.max(-gap);
        }
        r
    }
}

/// Expected-cost model of the game, built from the joint state/signal
/// distribution only.
struct Game<T> {
    demand: T,
    slope1: [T; 2],
    b1: T,
    alpha2: T,
    b2: T,
    /// `joint[state][signal]`, index 0 = a, 1 = n.
    joint: [[T; 2]; 2],
    /// `weight[signal][state]`: informed belief after the signal.
    weight: [[T; 2]; 2],
}

const SIGNALS: [Signal; 2] = [Signal::A, Signal::N];

fn idx(x: Signal) -> usize {
    match x {
        Signal::A => 0,
        Signal::N => 1,
    }
}

impl<T: Scalar> Game<T> {
    fn new(s: &ValidScenario<T>, pi: &InformationStructure<T>) -> Self {
        let mut joint = [[T::zero(); 2]; 2];
        for state in [State::A, State::N] {
            for signal in SIGNALS {
                joint[idx(state)][idx(signal)] = pi.joint(s.p, state, signal);
            }
        }
        let prior = [s.p, T::one() - s.p];
        let mut weight = [[T::zero(); 2]; 2];
        for signal in 0..2 {
            let mass = joint[0][signal] + joint[1][signal];
            for state in 0..2 {
                weight[signal][state] = if mass > T::zero() {
                    joint[state][signal] / mass
                } else {
                    prior[state]
                };
            }
        }
        Self {
            demand: s.demand,
            slope1: [s.alpha1_a, s.alpha1_n],
            b1: s.b1,
            alpha2: s.alpha2,
            b2: s.b2,
            joint,
            weight,
        }
    }

    /// Route-1 minus route-2 cost in `state` when route 2 carries `f2`.
    fn state_gap(&self, state: usize, f2: T) -> T {
        (self.slope1[state] * (self.demand - f2) + self.b1) - (self.alpha2 * f2 + self.b2)
    }

    fn informed_gap(&self, signal: usize, f2: T) -> T {
        self.weight[signal][0] * self.state_gap(0, f2) + self.weight[signal][1] * self.state_gap(1, f2)
    }

    fn uninformed_gap(&self, f2: [T; 2]) -> T {
        let mut g = T::zero();
        for state in 0..2 {
            for (mass, &flow) in self.joint[state].iter().zip(&f2) {
                g = g + *mass * self.state_gap(state, flow);
            }
        }
        g
    }
}

struct Converged<T> {
    flows: [T; 2],
}

fn run_dynamics<T: Scalar>(game: &Game<T>, groups: &mut [Group<T>; 3], tol: T, max_slope: T) -> Result<Converged<T>> {
    // groups: informed on a, informed on n, uninformed.
    let used = T::lit(1e-14) * game.demand;
    let mut step = T::one() / (T::lit(2.0) * max_slope);
    let mut prev_gaps: Option<[T; 3]> = None;
    let mut last = T::infinity();
    for _ in 0..MAX_ITERATIONS {
        let flows = [
            groups[0].on_route2 + groups[2].on_route2,
            groups[1].on_route2 + groups[2].on_route2,
        ];
        let gaps = [
            game.informed_gap(0, flows[0]),
            game.informed_gap(1, flows[1]),
            game.uninformed_gap(flows),
        ];
        let residual = groups
            .iter()
            .zip(gaps)
            .map(|(g, gap)| g.residual(gap, used))
            .fold(T::zero(), T::max);
        last = residual;
        if residual < tol {
            return Ok(Converged { flows });
        }
        if let Some(prev) = prev_gaps {
            let flipped = (0..3).any(|i| {
                groups[i].mass > T::zero()
                    && gaps[i] * prev[i] < T::zero()
                    && gaps[i].abs() > tol
                    && prev[i].abs() > tol
            });
            if flipped {
                step = step * T::lit(0.5);
            }
        }
        prev_gaps = Some(gaps);
        for (g, gap) in groups.iter_mut().zip(gaps) {
            g.on_route2 = (g.on_route2 + step * gap).max(T::zero()).min(g.mass);
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        last_gap: last.as_f64(),
    })
}

/// Route-2 flows reached by best-response dynamics from `spec.steps_flow`
/// initial profiles, which must all agree.
pub fn best_response_equilibrium<T: Scalar>(
    s: &ValidScenario<T>,
    pi: &InformationStructure<T>,
    spec: &GridSpec,
) -> Result<PerSignal<T>> {
    spec.validate()?;
    let game = Game::new(s, pi);
    let m1 = s.lambda * s.demand;
    let masses = [m1, m1, s.demand - m1];
    let tol = T::lit(spec.tol);
    let max_slope = s.alpha1_a + s.alpha2;
    let agreement = T::lit(10.0 * spec.tol) / (s.alpha1_n + s.alpha2).min(T::one());

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut first: Option<[T; 2]> = None;
    for restart in 0..spec.steps_flow {
        let mut groups = masses.map(|mass| Group {
            mass,
            on_route2: if restart == 0 {
                mass * T::lit(0.5)
            } else {
                mass * T::lit(rng.gen::<f64>())
            },
        });
        let flows = run_dynamics(&game, &mut groups, tol, max_slope)?.flows;
        match first {
            None => first = Some(flows),
            Some(f0) => {
                let diff = (flows[0] - f0[0]).abs().max((flows[1] - f0[1]).abs());
                if diff > agreement {
                    return Err(Error::Numerical(format!(
                        "dynamics restarts disagree on flows by {diff}; equilibrium not unique?"
                    )));
                }
            }
        }
    }
    let [a, n] = first.expect("steps_flow >= 1");
    Ok(PerSignal::new(n, a))
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell<T> {
    pub pi_a_a: T,
    pub pi_n_n: T,
    pub g_value: T,
    pub f2_n: T,
    pub f2_a: T,
    pub loss: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult<T> {
    pub best_pi: InformationStructure<T>,
    pub best_loss: T,
    pub cells_evaluated: usize,
}

fn evaluate_cell<T: Scalar>(
    s: &ValidScenario<T>,
    spec: &GridSpec,
    i: usize,
    j: usize,
) -> Result<(InformationStructure<T>, GridCell<T>)> {
    let last = T::lit((spec.steps_pi - 1) as f64);
    let aa = T::lit(i as f64) / last;
    let nn = T::lit(j as f64) / last;
    let pi = InformationStructure::new(aa, nn)?;
    let flows = best_response_equilibrium(s, &pi, spec)?;
    let pr_a = s.p * pi.pi_a_given_a + (T::one() - s.p) * pi.pi_a_given_n();
    let loss = spillover_loss(PerSignal::new(T::one() - pr_a, pr_a), flows, s.tau)?;
    Ok((
        pi,
        GridCell {
            pi_a_a: pi.pi_a_given_a,
            pi_n_n: pi.pi_n_given_n,
            g_value: partition_value(s, &pi),
            f2_n: flows.n,
            f2_a: flows.a,
            loss,
        },
    ))
}

fn search<T: Scalar>(
    s: &ValidScenario<T>,
    spec: &GridSpec,
    mut trace: Option<&mut Vec<GridCell<T>>>,
) -> Result<GridSearchResult<T>> {
    spec.validate()?;
    let n = spec.steps_pi;
    let mut best: Option<(InformationStructure<T>, T)> = None;
    let mut count = 0;
    for i in 0..n {
        // Feasible structures satisfy pi(n|n) >= 1 - pi(a|a), i.e. i + j >= n - 1.
        for j in (n - 1 - i)..n {
            let (pi, cell) = evaluate_cell(s, spec, i, j)?;
            count += 1;
            // Strict improvement keeps the lexicographically first minimizer.
            if best.is_none_or(|(_, l)| cell.loss < l) {
                best = Some((pi, cell.loss));
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(cell);
            }
        }
    }
    let (best_pi, best_loss) = best.expect("grid has at least one feasible cell");
    Ok(GridSearchResult {
        best_pi,
        best_loss,
        cells_evaluated: count,
    })
}

/// Minimum spillover over a `steps_pi x steps_pi` grid of feasible
/// information structures. Ties go to the smallest `(pi(a|a), pi(n|n))`.
pub fn grid_search_design<T: Scalar>(s: &ValidScenario<T>, spec: &GridSpec) -> Result<GridSearchResult<T>> {
    search(s, spec, None)
}

/// Like [`grid_search_design`], also returning every evaluated cell in
/// `(pi(a|a), pi(n|n))` order.
pub fn grid_search_trace<T: Scalar>(
    s: &ValidScenario<T>,
    spec: &GridSpec,
) -> Result<(GridSearchResult<T>, Vec<GridCell<T>>)> {
    let mut cells = Vec::new();
    let res = search(s, spec, Some(&mut cells))?;
    Ok((res, cells))
}

//! Parameter sweeps over the informed fraction, the threshold or the prior.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use clap::ValueEnum;
use infodesign::design::{full_information_outcome, no_information_outcome};
use infodesign::record::round_sig;
use infodesign::{optimal_design, DesignSolution, NetworkScenario, ValidScenario};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Lambda,
    Tau,
    P,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Lambda => "lambda",
            Axis::Tau => "tau",
            Axis::P => "p",
        })
    }
}

/// Column groups a sweep can emit. Groups always appear in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Output {
    PiStar,
    Flows,
    Loss,
    Costs,
}

impl Output {
    fn columns(self) -> &'static [&'static str] {
        match self {
            Output::PiStar => &["regime", "pi_a_a", "pi_n_n"],
            Output::Flows => &["f2_n", "f2_a"],
            Output::Loss => &["loss", "loss_no_info", "loss_full_info"],
            Output::Costs => &[
                "cost_pop1",
                "cost_pop2",
                "cost_avg",
                "cost_avg_no_info",
                "cost_avg_full_info",
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRequest {
    pub scenario: NetworkScenario,
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub outputs: BTreeSet<Output>,
}

impl SweepRequest {
    pub fn check(&self) -> Result<(), String> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err("sweep bounds must be finite".into());
        }
        if self.start > self.stop {
            return Err(format!("start {} exceeds stop {}", self.start, self.stop));
        }
        if self.count == 0 {
            return Err("count must be positive".into());
        }
        if self.outputs.is_empty() {
            return Err("at least one output group is required".into());
        }
        Ok(())
    }

    /// Evenly spaced axis values, both ends included.
    pub fn axis_values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }

    fn scenario_at(&self, value: f64) -> NetworkScenario {
        match self.axis {
            Axis::Lambda => self.scenario.with_lambda(value),
            Axis::Tau => self.scenario.with_tau(value),
            Axis::P => self.scenario.with_p(value),
        }
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec![self.axis.to_string()];
        for out in &self.outputs {
            h.extend(out.columns().iter().map(|c| c.to_string()));
        }
        h.push("error".into());
        h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn num(x: f64) -> String {
    round_sig(x).to_string()
}

fn point_row(req: &SweepRequest, s: &ValidScenario, sol: &DesignSolution) -> infodesign::Result<Vec<String>> {
    let mut row = Vec::new();
    let wants_baselines = req.outputs.contains(&Output::Loss) || req.outputs.contains(&Output::Costs);
    let baselines = if wants_baselines {
        Some((no_information_outcome(s)?, full_information_outcome(s)?))
    } else {
        None
    };
    for out in &req.outputs {
        match out {
            Output::PiStar => {
                row.push(sol.regime.to_string());
                row.push(num(sol.pi_star.pi_a_given_a));
                row.push(num(sol.pi_star.pi_n_given_n));
            }
            Output::Flows => {
                row.push(num(sol.outcome.f2.n));
                row.push(num(sol.outcome.f2.a));
            }
            Output::Loss => {
                let (none, full) = baselines.as_ref().expect("computed above");
                row.push(num(sol.loss));
                row.push(num(none.loss(s.tau)?));
                row.push(num(full.loss(s.tau)?));
            }
            Output::Costs => {
                let (none, full) = baselines.as_ref().expect("computed above");
                let c = sol.outcome.costs;
                row.extend([c.pop1, c.pop2, c.average, none.costs.average, full.costs.average].map(num));
            }
        }
    }
    row.push(String::new());
    Ok(row)
}

/// Solves every axis point. A failing point keeps its row with the numeric
/// columns empty and the reason in `error`.
pub fn run_sweep(req: &SweepRequest) -> SweepTable {
    let header = req.header();
    let width = header.len();
    let rows = req
        .axis_values()
        .into_iter()
        .map(|value| {
            let solved = req
                .scenario_at(value)
                .into_valid()
                .and_then(|s| optimal_design(&s).and_then(|sol| point_row(req, &s, &sol)));
            let mut row = vec![num(value)];
            match solved {
                Ok(cells) => row.extend(cells),
                Err(e) => {
                    row.resize(width - 1, String::new());
                    row.push(e.to_string());
                }
            }
            row
        })
        .collect();
    SweepTable { header, rows }
}

pub fn write_csv<W: Write>(table: &SweepTable, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use infodesign::example1;

    fn request(axis: Axis, start: f64, stop: f64, count: usize, outputs: &[Output]) -> SweepRequest {
        SweepRequest {
            scenario: example1(0.2),
            axis,
            start,
            stop,
            count,
            outputs: outputs.iter().copied().collect(),
        }
    }

    #[test]
    fn axis_values_hit_both_ends() {
        let req = request(Axis::Lambda, 0.0, 1.0, 101, &[Output::Loss]);
        let v = req.axis_values();
        assert_eq!(v.len(), 101);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[100], 1.0);
        assert_eq!(
            request(Axis::Tau, 2.0, 3.0, 1, &[Output::Loss]).axis_values(),
            vec![2.0]
        );
    }

    #[test]
    fn request_checks() {
        assert!(request(Axis::P, 0.5, 0.1, 3, &[Output::Loss]).check().is_err());
        assert!(request(Axis::P, 0.1, 0.5, 0, &[Output::Loss]).check().is_err());
        assert!(request(Axis::P, 0.1, 0.5, 3, &[]).check().is_err());
        assert!(request(Axis::P, 0.1, 0.5, 3, &[Output::Loss]).check().is_ok());
    }

    #[test]
    fn header_order_is_fixed() {
        let req = request(Axis::Lambda, 0.0, 1.0, 2, &[Output::Costs, Output::PiStar]);
        assert_eq!(
            req.header(),
            [
                "lambda",
                "regime",
                "pi_a_a",
                "pi_n_n",
                "cost_pop1",
                "cost_pop2",
                "cost_avg",
                "cost_avg_no_info",
                "cost_avg_full_info",
                "error"
            ]
        );
    }

    #[test]
    fn invalid_points_are_reported_not_dropped() {
        let req = request(Axis::Tau, 1.0, 3.0, 3, &[Output::Loss]);
        let table = run_sweep(&req);
        assert_eq!(table.rows.len(), 3);
        assert!(table.rows[0].last().unwrap().contains("tau below admissible range"));
        assert_eq!(table.rows[0][1], "");
        assert_eq!(table.rows[1].last().unwrap(), "");
        assert_eq!(table.rows[2].last().unwrap(), "");
    }

    #[test]
    fn prior_sweep_crosses_into_silence() {
        let req = request(Axis::P, 0.1, 0.3, 2, &[Output::PiStar, Output::Loss]);
        let table = run_sweep(&req);
        assert_eq!(table.rows[0][1], "no_persuasion");
        assert_eq!(table.rows[0][4], "0");
        assert_eq!(table.rows[1][1], "lambda2");
        assert_eq!(table.rows[1][4], "0.4");
    }
}

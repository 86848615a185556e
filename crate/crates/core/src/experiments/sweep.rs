//! Sweeps over experiment configurations, one table row per
//! (configuration, observable, statistic).

use serde::Serialize;

use crate::ctp::estimate_sbp;
use crate::numerics::{theta_curve, theta_n, ThetaConfig};
use crate::parallel::Execution;

use super::config::{ExperimentConfig, GraphSpec, Observable};
use super::estimate::{CiMethod, Estimate};
use super::mc::{mc_accessibility, mc_descent_count, mc_path_count, mc_reduced_fpp_cdf};
use super::output::{build_id, to_csv, to_json, SCHEMA_VERSION};
use super::ExperimentError;

/// Sweep CSV columns, version 1: `schema_version, config, graph, alpha,
/// target, apriori_max, observable, statistic, parameter, value,
/// half_width_95, reps, seed, ci_method, build_id, error`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub schema_version: u32,
    pub config: usize,
    pub graph: String,
    pub alpha: String,
    pub target: String,
    pub apriori_max: bool,
    pub observable: Observable,
    pub statistic: String,
    pub parameter: Option<f64>,
    pub value: Option<f64>,
    pub half_width_95: Option<f64>,
    pub reps: u64,
    pub seed: u64,
    pub ci_method: Option<CiMethod>,
    pub build_id: String,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> Result<String, ExperimentError> {
        to_csv(&self.rows)
    }

    pub fn to_json(&self) -> Result<String, ExperimentError> {
        to_json("sweep", &self.rows)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

struct Cell {
    statistic: String,
    parameter: Option<f64>,
    value: f64,
    estimate: Option<Estimate>,
}

impl Cell {
    fn estimate(statistic: &str, parameter: Option<f64>, e: Estimate) -> Cell {
        Cell { statistic: statistic.into(), parameter, value: e.mean, estimate: Some(e) }
    }

    fn exact(statistic: &str, parameter: Option<f64>, value: f64) -> Cell {
        Cell { statistic: statistic.into(), parameter, value, estimate: None }
    }
}

fn evaluate(
    cfg: &ExperimentConfig,
    obs: Observable,
    exec: Execution,
) -> Result<Vec<Cell>, ExperimentError> {
    let theta_cfg = ThetaConfig::default();
    Ok(match obs {
        Observable::Accessibility => {
            vec![Cell::estimate("probability", None, mc_accessibility(cfg, exec)?)]
        }
        Observable::ReducedFppThreshold => {
            if cfg.thresholds.is_empty() {
                return Err(ExperimentError::Config("no thresholds given".into()));
            }
            mc_reduced_fpp_cdf(cfg, &cfg.thresholds, exec)?
                .into_iter()
                .map(|p| Cell::estimate("cdf", Some(p.threshold), p.estimate))
                .collect()
        }
        Observable::PathCount => vec![Cell::estimate("mean", None, mc_path_count(cfg, exec)?)],
        Observable::DescentCount => {
            vec![Cell::estimate("mean", None, mc_descent_count(cfg, exec)?)]
        }
        Observable::CtpStats => {
            let GraphSpec::Hypercube { n, oriented: false } = cfg.graph else {
                return Err(ExperimentError::Config("CTP runs need an unoriented hypercube".into()));
            };
            let g = cfg.graph.build()?;
            let target = cfg
                .target
                .fixed(&g)?
                .ok_or_else(|| ExperimentError::Config("CTP runs need a fixed target".into()))?;
            let t = match cfg.ctp_time {
                Some(t) => t,
                None => theta_n(n, target.weight(), &theta_cfg)?,
            };
            let e = estimate_sbp(n, target, t, cfg.reps, cfg.ctp_budget, cfg.seed, exec)?;
            vec![
                Cell::estimate("S", Some(t), e.s),
                Cell::estimate("B", Some(t), e.b),
                Cell::estimate("P", Some(t), e.p),
                Cell::estimate("alive", Some(t), e.alive),
                Cell::estimate("occupancy", Some(t), e.occupancy),
                Cell::exact("S_exp_minus_B_over_S", Some(t), e.lower_bound),
                Cell::exact("truncated", Some(t), e.truncated as f64),
            ]
        }
        Observable::ThetaCurve => theta_curve(0.0, 1.0, cfg.points, &theta_cfg)?
            .into_iter()
            .map(|(x, theta)| Cell::exact("theta", Some(x), theta))
            .collect(),
    })
}

/// Evaluate every observable of every configuration. Failures are recorded
/// in the `error` column and the sweep continues; an empty sweep or an
/// empty observable list is rejected up front.
pub fn run_sweep(configs: &[ExperimentConfig], exec: Execution) -> Result<SweepTable, ExperimentError> {
    if configs.is_empty() {
        return Err(ExperimentError::EmptySweep);
    }
    if let Some(i) = configs.iter().position(|c| c.observables.is_empty()) {
        return Err(ExperimentError::Config(format!("configuration {i} has no observables")));
    }
    let mut rows = Vec::new();
    for (index, cfg) in configs.iter().enumerate() {
        for &obs in &cfg.observables {
            let base = SweepRow {
                schema_version: SCHEMA_VERSION,
                config: index,
                graph: cfg.graph.to_string(),
                alpha: cfg.alpha.to_string(),
                target: cfg.target.to_string(),
                apriori_max: cfg.apriori_max,
                observable: obs,
                statistic: String::new(),
                parameter: None,
                value: None,
                half_width_95: None,
                reps: cfg.reps,
                seed: cfg.seed,
                ci_method: None,
                build_id: build_id().to_string(),
                error: None,
            };
            match cfg.validate().and_then(|_| evaluate(cfg, obs, exec)) {
                Ok(cells) => rows.extend(cells.into_iter().map(|c| SweepRow {
                    statistic: c.statistic,
                    parameter: c.parameter,
                    value: Some(c.value),
                    half_width_95: c.estimate.map(|e| e.half_width_95),
                    ci_method: c.estimate.map(|e| e.ci_method),
                    ..base.clone()
                })),
                Err(e) => rows.push(SweepRow { error: Some(e.to_string()), ..base }),
            }
        }
    }
    Ok(SweepTable { rows })
}

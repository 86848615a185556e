//! Monte Carlo estimators. Replication `r` draws everything from stream `r`
//! of the master seed, in the order: anchor, target, costs or fitnesses.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::coupling::fitness_from_times;
use crate::fpp::{site_frontier, CostDistribution, CostField};
use crate::graph::{GraphModel, VertexId};
use crate::landscape::{count_accessible_paths, is_accessible, min_descents, sample_landscape};
use crate::parallel::{replicate, Execution};
use crate::rng::{substream, StreamRng};

use super::config::{AccessPath, ExperimentConfig};
use super::estimate::Estimate;
use super::ExperimentError;

struct Draw {
    alpha: f64,
    target: VertexId,
    rng: StreamRng,
}

fn draw(cfg: &ExperimentConfig, g: &GraphModel, r: u64) -> Result<Draw, ExperimentError> {
    let mut rng = substream(cfg.seed, r);
    let alpha = cfg.alpha.draw(&mut rng);
    let target = cfg.target.draw(g, &mut rng)?;
    if cfg.apriori_max && target == g.source() {
        return Err(ExperimentError::Config("the a priori maximum cannot be the source".into()));
    }
    Ok(Draw { alpha, target, rng })
}

fn collect<T>(xs: Vec<Result<T, ExperimentError>>) -> Result<Vec<T>, ExperimentError> {
    xs.into_iter().collect()
}

/// Accessibility indicator for one replication, by the chosen path.
fn access_sample(
    cfg: &ExperimentConfig,
    g: &GraphModel,
    r: u64,
    path: AccessPath,
) -> Result<bool, ExperimentError> {
    let Draw { alpha, target, mut rng } = draw(cfg, g, r)?;
    let c = CostField::sample_site(g, CostDistribution::Uniform01, &mut rng);
    let top = cfg.apriori_max.then_some(target);
    match path {
        AccessPath::Fast => {
            let run = site_frontier(g, &c, g.source(), Some(1.0 - alpha))?;
            let t = if top.is_some() {
                g.in_neighbors(target).map(|u| run.times[u.index()]).fold(f64::INFINITY, f64::min)
            } else {
                run.times[target.index()]
            };
            Ok(alpha + t <= 1.0)
        }
        AccessPath::Slow => {
            let run = site_frontier(g, &c, g.source(), None)?;
            let l = fitness_from_times(g, &run.times, alpha, top);
            Ok(is_accessible(&l, target)?)
        }
    }
}

/// Per-replication accessibility indicators.
pub fn accessibility_indicators(
    cfg: &ExperimentConfig,
    path: AccessPath,
    exec: Execution,
) -> Result<Vec<bool>, ExperimentError> {
    cfg.validate()?;
    let g = cfg.graph.build()?;
    collect(replicate(exec, cfg.reps, |r| access_sample(cfg, &g, r, path)))
}

/// Probability that the target is accessible: with a fixed anchor this is
/// the conditional probability given the source fitness, with a uniform
/// anchor the unconditioned one. Both paths use the same coupled sample per
/// replication and give identical indicators.
pub fn mc_accessibility(cfg: &ExperimentConfig, exec: Execution) -> Result<Estimate, ExperimentError> {
    let hits = accessibility_indicators(cfg, cfg.access_path, exec)?;
    Ok(Estimate::from_indicators(&hits, cfg.seed))
}

#[derive(Clone, Debug, Serialize)]
pub struct CdfPoint {
    pub threshold: f64,
    pub estimate: Estimate,
}

/// `P(T'_V(source, target) <= tau)` for each threshold, with the cost law
/// of the configuration. Costs are inverse-CDF images of one uniform stream,
/// so exponential and uniform curves from one seed are pointwise ordered.
pub fn mc_reduced_fpp_cdf(
    cfg: &ExperimentConfig,
    thresholds: &[f64],
    exec: Execution,
) -> Result<Vec<CdfPoint>, ExperimentError> {
    cfg.validate()?;
    if thresholds.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(ExperimentError::Config("thresholds must be sorted".into()));
    }
    let g = cfg.graph.build()?;
    let limit = thresholds.last().copied();
    let samples = collect(replicate(exec, cfg.reps, |r| {
        let Draw { target, mut rng, .. } = draw(cfg, &g, r)?;
        if target == g.source() {
            return Err(ExperimentError::Config("reduced time needs a non-source target".into()));
        }
        let c = CostField::sample_site(&g, cfg.distribution, &mut rng);
        let run = site_frontier(&g, &c, g.source(), limit)?;
        Ok(g.in_neighbors(target).map(|u| run.times[u.index()]).fold(f64::INFINITY, f64::min))
    }))?;
    Ok(thresholds
        .iter()
        .map(|&tau| {
            let hits: Vec<bool> = samples.iter().map(|&t| t <= tau).collect();
            CdfPoint { threshold: tau, estimate: Estimate::from_indicators(&hits, cfg.seed) }
        })
        .collect())
}

/// Mean number of accessible paths to the target on House-of-Cards
/// landscapes, with the target fitness forced to 1 when `apriori_max`.
pub fn mc_path_count(cfg: &ExperimentConfig, exec: Execution) -> Result<Estimate, ExperimentError> {
    cfg.validate()?;
    let g = cfg.graph.build()?;
    let xs = collect(replicate(exec, cfg.reps, |r| {
        let Draw { alpha, target, mut rng } = draw(cfg, &g, r)?;
        let l = sample_landscape(&g, &mut rng, Some(alpha), cfg.apriori_max.then_some(target))?;
        let count = count_accessible_paths(&l, target, false)?;
        Ok(count.to_f64().unwrap_or(f64::INFINITY))
    }))?;
    Ok(Estimate::from_samples(&xs, cfg.seed))
}

/// Mean minimal number of descents to the target on House-of-Cards
/// landscapes.
pub fn mc_descent_count(cfg: &ExperimentConfig, exec: Execution) -> Result<Estimate, ExperimentError> {
    cfg.validate()?;
    let g = cfg.graph.build()?;
    let xs = collect(replicate(exec, cfg.reps, |r| {
        let Draw { alpha, target, mut rng } = draw(cfg, &g, r)?;
        let l = sample_landscape(&g, &mut rng, Some(alpha), cfg.apriori_max.then_some(target))?;
        Ok(f64::from(min_descents(&l, target)?))
    }))?;
    Ok(Estimate::from_samples(&xs, cfg.seed))
}

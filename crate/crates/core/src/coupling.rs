//! Coupling between first-passage site percolation with `U(0,1)` costs and
//! House-of-Cards accessibility.
//!
//! Given costs `c` and an anchor `alpha`, the coupled fitness is
//! `f(v) = frac(alpha + T(v))` where `T` is the site passage time from the
//! source. A vertex is then accessible exactly when `alpha + T(v) <= 1`.
//! Threshold tests below are written as `alpha + t <= 1.0` so that they use
//! the same floating-point sum as the fitness itself.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::experiments::stats::{chi_squared_two_sample, ks_uniform, pearson, ChiSquaredReport};
use crate::fpp::{
    frontier_sweep, site_passage_times, CostDistribution, CostField, FieldKind, FppError,
};
use crate::graph::{Edge, GraphModel, VertexId};
use crate::landscape::{
    accessible_set, check_alpha, is_accessible, min_descents, sample_landscape, FitnessLandscape,
    LandscapeError,
};
use crate::parallel::{replicate, Execution};
use crate::rng::substream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplingError {
    #[error(transparent)]
    Fpp(#[from] FppError),
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
    #[error("the coupling needs U(0,1) site costs")]
    NotUniformSiteCosts,
    #[error("the landscape must be anchored at the source")]
    NotAnchored,
    #[error("the landscape must not carry an a priori maximum")]
    HasAprioriMax,
    #[error("fitness values of vertices {0} and {1} are tied")]
    FitnessTie(VertexId, VertexId),
    #[error("the a priori maximum must differ from the source")]
    AprioriAtSource,
    #[error("at least {min} replications are required, got {got}")]
    TooFewReplications { min: u64, got: u64 },
}

/// `frac(s)`, except that `s == 1` maps to 1.
fn coupled_value(s: f64) -> f64 {
    if s == 1.0 {
        1.0
    } else {
        s - s.floor()
    }
}

/// Coupled fitness `f(v) = frac(alpha + T_V(source, v))`, with `f(v) = 1`
/// when the sum is exactly 1 and `f(apriori_max) = 1` when given.
pub fn fitness_from_costs(
    g: &GraphModel,
    c: &CostField,
    alpha: f64,
    apriori_max: Option<VertexId>,
) -> Result<FitnessLandscape, CouplingError> {
    check_alpha(alpha)?;
    if c.kind() != FieldKind::Site || c.distribution() != CostDistribution::Uniform01 {
        return Err(CouplingError::NotUniformSiteCosts);
    }
    if let Some(top) = apriori_max {
        g.check_vertex(top).map_err(LandscapeError::from)?;
        if top == g.source() {
            return Err(CouplingError::AprioriAtSource);
        }
    }
    let t = site_passage_times(g, c, g.source())?;
    Ok(fitness_from_times(g, t.times(), alpha, apriori_max))
}

pub(crate) fn fitness_from_times(
    g: &GraphModel,
    times: &[f64],
    alpha: f64,
    apriori_max: Option<VertexId>,
) -> FitnessLandscape {
    let mut fitness: Vec<f64> = times.iter().map(|&t| coupled_value(alpha + t)).collect();
    if let Some(top) = apriori_max {
        fitness[top.index()] = 1.0;
    }
    FitnessLandscape::from_parts_unchecked(g.clone(), fitness, Some(alpha), apriori_max)
}

/// Inverse of [`fitness_from_costs`]: rerun the frontier procedure and give
/// each newly assigned vertex `v` with parent `u` the cost
/// `frac(f(v) - alpha - T(u))`.
pub fn costs_from_fitness(l: &FitnessLandscape) -> Result<CostField, CouplingError> {
    let alpha = l.anchor().ok_or(CouplingError::NotAnchored)?;
    if l.apriori_max().is_some() {
        return Err(CouplingError::HasAprioriMax);
    }
    let g = l.graph();
    let order = l.sweep_order();
    for w in order.windows(2) {
        if l.values()[w[0] as usize] == l.values()[w[1] as usize] {
            return Err(CouplingError::FitnessTie(VertexId(w[0]), VertexId(w[1])));
        }
    }
    let mut costs = vec![0.0; g.vertex_count()];
    frontier_sweep(g, g.source(), None, |_, tu, v| {
        let x = l.fitness(v) - alpha - tu;
        let c = x - x.floor();
        costs[v.index()] = c;
        c
    })?;
    Ok(CostField::site(g, costs, CostDistribution::Uniform01)?)
}

/// Per-sample comparison of the accessible set with the passage-time
/// threshold set.
#[derive(Clone, Debug, Serialize)]
pub struct CouplingReport {
    pub alpha: f64,
    pub accessible_set: Vec<VertexId>,
    pub threshold_set: Vec<VertexId>,
    pub equal: bool,
    pub witness: Option<VertexId>,
}

/// Compare the accessible set of the coupled landscape built from `c` with
/// `{v : T_V(source, v) <= 1 - alpha}`.
pub fn coupling_report(
    g: &GraphModel,
    c: &CostField,
    alpha: f64,
) -> Result<CouplingReport, CouplingError> {
    let l = fitness_from_costs(g, c, alpha, None)?;
    let t = site_passage_times(g, c, g.source())?;
    let access = accessible_set(&l);
    let mut accessible = Vec::new();
    let mut threshold = Vec::new();
    let mut witness = None;
    for v in g.vertices() {
        let a = access.contains(v);
        let b = alpha + t.get(v) <= 1.0;
        if a {
            accessible.push(v);
        }
        if b {
            threshold.push(v);
        }
        if a != b && witness.is_none() {
            witness = Some(v);
        }
    }
    Ok(CouplingReport {
        alpha,
        accessible_set: accessible,
        threshold_set: threshold,
        equal: witness.is_none(),
        witness,
    })
}

/// Sample `U(0,1)` costs and check the coupling on them.
pub fn verify_equivalence<R: Rng + ?Sized>(
    g: &GraphModel,
    alpha: f64,
    rng: &mut R,
) -> Result<CouplingReport, CouplingError> {
    check_alpha(alpha)?;
    let c = CostField::sample_site(g, CostDistribution::Uniform01, rng);
    coupling_report(g, &c, alpha)
}

/// Outcome of one a priori maximum check.
#[derive(Copy, Clone, Debug, Serialize)]
pub struct AprioriCheck {
    pub accessible: bool,
    pub reduced_time: f64,
    pub within_threshold: bool,
}

impl AprioriCheck {
    pub fn agrees(&self) -> bool {
        self.accessible == self.within_threshold
    }
}

/// With `f(top)` forced to 1, compare accessibility of `top` with
/// `T'_V(source, top) <= 1 - alpha` on the given costs.
pub fn apriori_check(
    g: &GraphModel,
    c: &CostField,
    top: VertexId,
    alpha: f64,
) -> Result<AprioriCheck, CouplingError> {
    let l = fitness_from_costs(g, c, alpha, Some(top))?;
    let t = site_passage_times(g, c, g.source())?;
    let reduced_time = t.reduced(g, top)?;
    Ok(AprioriCheck {
        accessible: is_accessible(&l, top)?,
        reduced_time,
        within_threshold: alpha + reduced_time <= 1.0,
    })
}

/// Sample costs and report whether the a priori maximum equivalence holds.
pub fn verify_apriori_equivalence<R: Rng + ?Sized>(
    g: &GraphModel,
    top: VertexId,
    alpha: f64,
    rng: &mut R,
) -> Result<bool, CouplingError> {
    check_alpha(alpha)?;
    g.check_vertex(top).map_err(LandscapeError::from)?;
    if top == g.source() {
        return Err(CouplingError::AprioriAtSource);
    }
    let c = CostField::sample_site(g, CostDistribution::Uniform01, rng);
    Ok(apriori_check(g, &c, top, alpha)?.agrees())
}

/// `(min_descents(target), floor(alpha + T_V(source, target)))` on the
/// coupled landscape of `c`. The two agree on every sample.
pub fn coupled_descents(
    g: &GraphModel,
    c: &CostField,
    alpha: f64,
    target: VertexId,
) -> Result<(u32, u32), CouplingError> {
    let l = fitness_from_costs(g, c, alpha, None)?;
    let t = site_passage_times(g, c, g.source())?;
    let d = min_descents(&l, target)?;
    Ok((d, (alpha + t.get(target)).floor() as u32))
}

pub const MIN_DESCENT_REPS: u64 = 1000;

/// Two independent ensembles: `min_descents(target)` on House-of-Cards
/// landscapes anchored at `alpha`, and `floor(T_V(source, target) + alpha)`
/// on fresh `U(0,1)` costs, compared by a chi-squared homogeneity test.
/// Replication `r` uses streams `2r` and `2r + 1` of `seed`.
pub fn min_descents_distribution_check(
    g: &GraphModel,
    alpha: f64,
    target: VertexId,
    reps: u64,
    seed: u64,
    exec: Execution,
) -> Result<ChiSquaredReport, CouplingError> {
    check_alpha(alpha)?;
    g.check_vertex(target).map_err(LandscapeError::from)?;
    if reps < MIN_DESCENT_REPS {
        return Err(CouplingError::TooFewReplications { min: MIN_DESCENT_REPS, got: reps });
    }
    let pairs = replicate(exec, reps, |r| -> Result<(u32, u32), CouplingError> {
        let mut rng = substream(seed, 2 * r);
        let l = sample_landscape(g, &mut rng, Some(alpha), None)?;
        let a = min_descents(&l, target)?;
        let mut rng = substream(seed, 2 * r + 1);
        let c = CostField::sample_site(g, CostDistribution::Uniform01, &mut rng);
        let t = site_passage_times(g, &c, g.source())?;
        Ok((a, (alpha + t.get(target)).floor() as u32))
    });
    let pairs: Vec<(u32, u32)> = pairs.into_iter().collect::<Result<_, _>>()?;
    let (a, b): (Vec<u32>, Vec<u32>) = pairs.into_iter().unzip();
    Ok(chi_squared_two_sample(&a, &b))
}

/// Uniformity and pairwise independence of coupled fitnesses.
#[derive(Clone, Debug, Serialize)]
pub struct UniformityReport {
    pub reps: u64,
    /// KS p-value for each non-source vertex, in id order.
    pub ks_p_values: Vec<f64>,
    pub min_ks_p_value: f64,
    pub max_abs_correlation: f64,
    /// `4 / sqrt(reps)`.
    pub correlation_bound: f64,
}

/// Sample coupled landscapes and test each non-source fitness for `U(0,1)`
/// and every pair for correlation.
pub fn coupled_fitness_uniformity(
    g: &GraphModel,
    alpha: f64,
    reps: u64,
    seed: u64,
    exec: Execution,
) -> Result<UniformityReport, CouplingError> {
    check_alpha(alpha)?;
    let samples = replicate(exec, reps, |r| -> Result<Vec<f64>, CouplingError> {
        let mut rng = substream(seed, r);
        let c = CostField::sample_site(g, CostDistribution::Uniform01, &mut rng);
        Ok(fitness_from_costs(g, &c, alpha, None)?.values().to_vec())
    });
    let samples: Vec<Vec<f64>> = samples.into_iter().collect::<Result<_, _>>()?;
    let k = g.vertex_count();
    let columns: Vec<Vec<f64>> =
        (1..k).map(|v| samples.iter().map(|s| s[v]).collect()).collect();
    let ks_p_values: Vec<f64> = columns.iter().map(|c| ks_uniform(c).p_value).collect();
    let mut max_abs_correlation = 0.0f64;
    for i in 0..columns.len() {
        for j in i + 1..columns.len() {
            max_abs_correlation = max_abs_correlation.max(pearson(&columns[i], &columns[j]).abs());
        }
    }
    Ok(UniformityReport {
        reps,
        min_ks_p_value: ks_p_values.iter().copied().fold(1.0, f64::min),
        ks_p_values,
        max_abs_correlation,
        correlation_bound: 4.0 / (reps as f64).sqrt(),
    })
}

/// Vertex ids of the two-diamond graph: a source, two branches meeting at a
/// middle vertex, and two more branches meeting at the sink.
pub mod diamonds {
    pub const SOURCE: u32 = 0;
    pub const B1: u32 = 1;
    pub const B2: u32 = 2;
    pub const MIDDLE: u32 = 3;
    pub const D1: u32 = 4;
    pub const D2: u32 = 5;
    pub const SINK: u32 = 6;
}

/// Directed two-diamond graph. The source-to-sink path count of its
/// accessible subgraph is never 3, although 3 paths can have reduced
/// passage time at most 1.
pub fn two_diamond_graph() -> GraphModel {
    use diamonds::*;
    GraphModel::explicit(
        7,
        vec![
            Edge::directed(SOURCE, B1),
            Edge::directed(SOURCE, B2),
            Edge::directed(B1, MIDDLE),
            Edge::directed(B2, MIDDLE),
            Edge::directed(MIDDLE, D1),
            Edge::directed(MIDDLE, D2),
            Edge::directed(D1, SINK),
            Edge::directed(D2, SINK),
        ],
    )
    .expect("fixture graph is valid")
}

/// Number of simple source-to-`target` paths whose reduced site passage time
/// is at most `threshold`.
pub fn count_paths_within(
    g: &GraphModel,
    c: &CostField,
    target: VertexId,
    threshold: f64,
) -> Result<u64, CouplingError> {
    if c.kind() != FieldKind::Site {
        return Err(FppError::WrongFieldKind { expected: FieldKind::Site }.into());
    }
    g.check_vertex(target).map_err(LandscapeError::from)?;
    fn walk(
        g: &GraphModel,
        c: &CostField,
        v: VertexId,
        interior: f64,
        target: VertexId,
        threshold: f64,
        on_path: &mut [bool],
    ) -> u64 {
        let mut total = 0;
        for w in g.out_neighbors(v) {
            if on_path[w.index()] {
                continue;
            }
            if w == target {
                total += u64::from(interior <= threshold);
                continue;
            }
            let next = interior + c.site_cost(w);
            if next > threshold {
                continue;
            }
            on_path[w.index()] = true;
            total += walk(g, c, w, next, target, threshold, on_path);
            on_path[w.index()] = false;
        }
        total
    }
    let source = g.source();
    if target == source {
        return Ok(1);
    }
    let mut on_path = vec![false; g.vertex_count()];
    on_path[source.index()] = true;
    Ok(walk(g, c, source, 0.0, target, threshold, &mut on_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::count_accessible_paths;

    fn costs(g: &GraphModel, seed: u64) -> CostField {
        CostField::sample_site(g, CostDistribution::Uniform01, &mut substream(seed, 0))
    }

    #[test]
    fn source_gets_alpha_and_neighbors_get_costs() {
        let g = GraphModel::hypercube(4).unwrap();
        let c = costs(&g, 3);
        let l = fitness_from_costs(&g, &c, 0.0, None).unwrap();
        assert_eq!(l.fitness(VertexId::ZERO), 0.0);
        for v in g.out_neighbors(VertexId::ZERO) {
            assert_eq!(l.fitness(v), c.site_cost(v));
        }
        let l = fitness_from_costs(&g, &c, 0.3, None).unwrap();
        assert_eq!(l.fitness(VertexId::ZERO), 0.3);
    }

    #[test]
    fn exact_one_maps_to_one() {
        assert_eq!(coupled_value(1.0), 1.0);
        assert_eq!(coupled_value(1.25), 0.25);
        assert_eq!(coupled_value(0.5), 0.5);
    }

    #[test]
    fn round_trip_reproduces_costs() {
        let g = GraphModel::hypercube(3).unwrap();
        for seed in 0..200 {
            let c = costs(&g, seed);
            for alpha in [0.0, 0.37, 0.9] {
                let l = fitness_from_costs(&g, &c, alpha, None).unwrap();
                let back = costs_from_fitness(&l).unwrap();
                for v in g.vertices().skip(1) {
                    let d = (back.site_cost(v) - c.site_cost(v)).rem_euclid(1.0);
                    assert!(d.min(1.0 - d) < 1e-12, "seed {seed} vertex {v}");
                }
                let again = fitness_from_costs(&g, &back, alpha, None).unwrap();
                for v in g.vertices() {
                    let d = (again.fitness(v) - l.fitness(v)).rem_euclid(1.0);
                    assert!(d.min(1.0 - d) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ascending_landscape_costs_are_fractional() {
        let g = GraphModel::hypercube(3).unwrap();
        let values: Vec<f64> = (0..8).map(|i| i as f64 / 8.0).collect();
        let l = FitnessLandscape::from_values(g, values, Some(0.0), None).unwrap();
        let c = costs_from_fitness(&l).unwrap();
        assert!(c.values().iter().all(|x| (0.0..1.0).contains(x)));
    }

    #[test]
    fn neighbor_at_alpha_has_zero_cost() {
        let g = GraphModel::hypercube(2).unwrap();
        let l = FitnessLandscape::from_values(g, vec![0.4, 0.4, 0.7, 0.9], Some(0.4), None).unwrap();
        assert!(matches!(costs_from_fitness(&l), Err(CouplingError::FitnessTie(_, _))));
        let g = GraphModel::hypercube(2).unwrap();
        let l =
            FitnessLandscape::from_values(g, vec![0.4, 0.5, 0.7, 0.9], Some(0.4), None).unwrap();
        let c = costs_from_fitness(&l).unwrap();
        assert!((c.site_cost(VertexId(1)) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = GraphModel::hypercube(2).unwrap();
        let l = FitnessLandscape::from_values(g.clone(), vec![0.1, 0.2, 0.3, 0.4], None, None)
            .unwrap();
        assert!(matches!(costs_from_fitness(&l), Err(CouplingError::NotAnchored)));
        let c = costs(&g, 0);
        assert!(fitness_from_costs(&g, &c.to_exp1(), 0.1, None).is_err());
        assert!(matches!(
            verify_apriori_equivalence(&g, VertexId::ZERO, 0.2, &mut substream(0, 0)),
            Err(CouplingError::AprioriAtSource)
        ));
        assert!(verify_equivalence(&g, 1.5, &mut substream(0, 0)).is_err());
    }

    #[test]
    fn equivalence_on_small_cubes() {
        for n in 3..=6 {
            for oriented in [false, true] {
                let g = if oriented {
                    GraphModel::oriented_hypercube(n).unwrap()
                } else {
                    GraphModel::hypercube(n).unwrap()
                };
                for alpha in [0.0, 0.1, 0.5, 0.9] {
                    for seed in 0..30 {
                        let r = verify_equivalence(&g, alpha, &mut substream(seed, n as u64))
                            .unwrap();
                        assert!(r.equal, "n={n} alpha={alpha} seed={seed}");
                        assert_eq!(r.witness, None);
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_near_one_shrinks_to_source_neighborhood() {
        let g = GraphModel::hypercube(6).unwrap();
        for seed in 0..20 {
            let r = verify_equivalence(&g, 0.999_999, &mut substream(seed, 1)).unwrap();
            assert!(r.equal);
            assert!(r.accessible_set.contains(&VertexId::ZERO));
            assert!(r.accessible_set.len() <= 2);
        }
    }

    #[test]
    fn apriori_equivalence() {
        for n in 3..=6 {
            let g = GraphModel::hypercube(n).unwrap();
            for alpha in [0.0, 0.3, 0.8] {
                for seed in 0..30 {
                    for top in [VertexId::ones(n), VertexId(1), VertexId(3)] {
                        let mut rng = substream(seed, u64::from(top.0));
                        assert!(verify_apriori_equivalence(&g, top, alpha, &mut rng).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn apriori_neighbor_and_alpha_one() {
        let g = GraphModel::hypercube(4).unwrap();
        for seed in 0..10 {
            let c = costs(&g, seed);
            let r = apriori_check(&g, &c, VertexId(2), 0.7).unwrap();
            assert!(r.accessible && r.reduced_time == 0.0);
            let r = apriori_check(&g, &c, VertexId::ones(4), 1.0).unwrap();
            assert!(!r.accessible && !r.within_threshold);
        }
    }

    #[test]
    fn forcing_the_maximum_only_affects_later_vertices() {
        let g = GraphModel::hypercube(4).unwrap();
        let top = VertexId::ones(4);
        for seed in 0..100 {
            let c = costs(&g, seed);
            let plain = fitness_from_costs(&g, &c, 0.2, None).unwrap();
            let forced = fitness_from_costs(&g, &c, 0.2, Some(top)).unwrap();
            let (a, b) = (accessible_set(&plain), accessible_set(&forced));
            let ft = plain.fitness(top);
            for v in g.vertices() {
                if v != top && plain.fitness(v) < ft {
                    assert_eq!(a.contains(v), b.contains(v));
                }
            }
        }
    }

    #[test]
    fn coupled_descents_agree() {
        for g in [GraphModel::hypercube(3).unwrap(), GraphModel::oriented_hypercube(4).unwrap()] {
            let n = g.dimension().unwrap();
            for seed in 0..200 {
                let c = costs(&g, seed);
                for alpha in [0.0, 0.5, 0.95] {
                    let (d, f) = coupled_descents(&g, &c, alpha, VertexId::ones(n)).unwrap();
                    assert_eq!(d, f, "seed {seed} alpha {alpha}");
                }
            }
        }
    }

    #[test]
    fn descent_check_needs_reps() {
        let g = GraphModel::hypercube(3).unwrap();
        assert!(matches!(
            min_descents_distribution_check(&g, 0.5, VertexId(7), 10, 0, Execution::Sequential),
            Err(CouplingError::TooFewReplications { .. })
        ));
    }

    #[test]
    fn two_diamond_counts() {
        use diamonds::*;
        let g = two_diamond_graph();
        let c = CostField::site(
            &g,
            vec![0.0, 0.1, 0.5, 0.1, 0.1, 0.45, 0.3],
            CostDistribution::Uniform01,
        )
        .unwrap();
        assert_eq!(count_paths_within(&g, &c, VertexId(SINK), 1.0).unwrap(), 3);
        let l = fitness_from_costs(&g, &c, 0.0, None).unwrap();
        assert_ne!(count_accessible_paths(&l, VertexId(SINK), false).unwrap(), 3u32.into());
    }
}

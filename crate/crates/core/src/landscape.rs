//! House-of-Cards fitness landscapes and accessibility.
//!
//! Fitness ties have probability zero but can occur in floating point. The
//! conventions used throughout: accessibility needs strictly increasing
//! fitness, sweeps order equal fitness by ascending vertex id, and a step
//! to a vertex of equal fitness counts as a descent.

use std::cmp::Ordering;
use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, GraphModel, Path, VertexId};

/// Hypercube dimension above which exact path counting needs an explicit
/// override.
pub const PATH_COUNT_MAX_DIMENSION: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandscapeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("alpha = {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("the a priori maximum cannot be the source unless alpha = 1")]
    ContradictoryApriori,
    #[error("fitness {value} at vertex {vertex} is outside [0, 1]")]
    FitnessOutOfRange { vertex: VertexId, value: f64 },
    #[error("expected {expected} fitness values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("a priori maximum {0} must have fitness 1 and be the unique maximum")]
    AprioriNotMaximum(VertexId),
    #[error("anchor alpha = {alpha} disagrees with the source fitness {fitness}")]
    AnchorMismatch { alpha: f64, fitness: f64 },
    #[error("path counting on Q_{0} needs the override flag (limit {PATH_COUNT_MAX_DIMENSION})")]
    PathCountGuard(u32),
    #[error("vertex {0} cannot be reached from the source")]
    Unreachable(VertexId),
    #[error("landscape files are only defined for hypercubes")]
    NotHypercube,
    #[error("landscape file: {0}")]
    File(String),
}

/// Fitness values indexed by vertex id, with the conditioning that produced
/// them.
#[derive(Clone, Debug)]
pub struct FitnessLandscape {
    graph: GraphModel,
    fitness: Vec<f64>,
    anchor: Option<f64>,
    apriori_max: Option<VertexId>,
}

impl FitnessLandscape {
    /// Wrap precomputed fitness values, checking the model invariants.
    pub fn from_values(
        graph: GraphModel,
        fitness: Vec<f64>,
        anchor: Option<f64>,
        apriori_max: Option<VertexId>,
    ) -> Result<Self, LandscapeError> {
        if fitness.len() != graph.vertex_count() {
            return Err(LandscapeError::LengthMismatch {
                expected: graph.vertex_count(),
                got: fitness.len(),
            });
        }
        if let Some((i, &value)) =
            fitness.iter().enumerate().find(|(_, f)| !(0.0..=1.0).contains(*f))
        {
            return Err(LandscapeError::FitnessOutOfRange { vertex: VertexId(i as u32), value });
        }
        if let Some(alpha) = anchor {
            check_alpha(alpha)?;
            if fitness[0] != alpha {
                return Err(LandscapeError::AnchorMismatch { alpha, fitness: fitness[0] });
            }
        }
        if let Some(top) = apriori_max {
            graph.check_vertex(top)?;
            let others_below =
                fitness.iter().enumerate().all(|(i, &f)| i == top.index() || f < 1.0);
            if fitness[top.index()] != 1.0 || !others_below {
                return Err(LandscapeError::AprioriNotMaximum(top));
            }
        }
        Ok(FitnessLandscape { graph, fitness, anchor, apriori_max })
    }

    /// Skip the checks; used where the model permits ties at 1 (anchor 1
    /// with an a priori maximum, or a boundary passage time).
    pub(crate) fn from_parts_unchecked(
        graph: GraphModel,
        fitness: Vec<f64>,
        anchor: Option<f64>,
        apriori_max: Option<VertexId>,
    ) -> Self {
        FitnessLandscape { graph, fitness, anchor, apriori_max }
    }

    pub fn graph(&self) -> &GraphModel {
        &self.graph
    }

    pub fn fitness(&self, v: VertexId) -> f64 {
        self.fitness[v.index()]
    }

    pub fn values(&self) -> &[f64] {
        &self.fitness
    }

    pub fn anchor(&self) -> Option<f64> {
        self.anchor
    }

    pub fn apriori_max(&self) -> Option<VertexId> {
        self.apriori_max
    }

    /// Vertex with the largest fitness (largest id on ties).
    pub fn argmax(&self) -> VertexId {
        let mut best = 0;
        for (i, f) in self.fitness.iter().enumerate() {
            if *f >= self.fitness[best] {
                best = i;
            }
        }
        VertexId(best as u32)
    }

    pub fn to_file(&self) -> Result<LandscapeFile, LandscapeError> {
        let n = self.graph.dimension().ok_or(LandscapeError::NotHypercube)?;
        Ok(LandscapeFile {
            n,
            oriented: self.graph.is_oriented_hypercube(),
            alpha: self.anchor,
            apriori_max: self.apriori_max.map(|v| v.0),
            fitness: self.fitness.clone(),
        })
    }

    pub fn from_file(file: LandscapeFile) -> Result<Self, LandscapeError> {
        let graph = if file.oriented {
            GraphModel::oriented_hypercube(file.n)?
        } else {
            GraphModel::hypercube(file.n)?
        };
        FitnessLandscape::from_values(graph, file.fitness, file.alpha, file.apriori_max.map(VertexId))
    }

    pub fn to_json(&self) -> Result<String, LandscapeError> {
        serde_json::to_string(&self.to_file()?).map_err(|e| LandscapeError::File(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, LandscapeError> {
        let file: LandscapeFile =
            serde_json::from_str(text).map_err(|e| LandscapeError::File(e.to_string()))?;
        FitnessLandscape::from_file(file)
    }

    /// Vertex ids sorted by increasing fitness, ties by ascending id.
    pub(crate) fn sweep_order(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.fitness.len() as u32).collect();
        order.sort_by(|&a, &b| {
            self.fitness[a as usize]
                .total_cmp(&self.fitness[b as usize])
                .then(a.cmp(&b))
        });
        order
    }
}

/// On-disk landscape: `{n, oriented, alpha, apriori_max, fitness}` with
/// `fitness[v]` the fitness of vertex id `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeFile {
    pub n: u32,
    pub oriented: bool,
    pub alpha: Option<f64>,
    pub apriori_max: Option<u32>,
    pub fitness: Vec<f64>,
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), LandscapeError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(LandscapeError::AlphaOutOfRange(alpha))
    }
}

/// Draw iid `U(0,1)` fitnesses in vertex-id order, then overwrite the source
/// with `alpha` and the a priori maximum with 1.
pub fn sample_landscape<R: Rng + ?Sized>(
    g: &GraphModel,
    rng: &mut R,
    alpha: Option<f64>,
    apriori_max: Option<VertexId>,
) -> Result<FitnessLandscape, LandscapeError> {
    if let Some(a) = alpha {
        check_alpha(a)?;
    }
    if let Some(top) = apriori_max {
        g.check_vertex(top)?;
        if top == g.source() && alpha != Some(1.0) {
            return Err(LandscapeError::ContradictoryApriori);
        }
    }
    let mut fitness: Vec<f64> = (0..g.vertex_count()).map(|_| rng.sample(Open01)).collect();
    if let Some(a) = alpha {
        fitness[0] = a;
    }
    if let Some(top) = apriori_max {
        fitness[top.index()] = 1.0;
    }
    Ok(FitnessLandscape { graph: g.clone(), fitness, anchor: alpha, apriori_max })
}

/// Fitness strictly increasing along `p`.
pub fn path_is_accessible(l: &FitnessLandscape, p: &Path) -> bool {
    p.vertices().windows(2).all(|w| l.fitness(w[0]) < l.fitness(w[1]))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AccessMethod {
    SortedSweep,
}

/// The set of vertices accessible from the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessReport {
    accessible: Vec<bool>,
    count: usize,
    pub method: AccessMethod,
}

impl AccessReport {
    pub fn from_mask(accessible: Vec<bool>, method: AccessMethod) -> Self {
        let count = accessible.iter().filter(|a| **a).count();
        AccessReport { accessible, count, method }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.accessible.get(v.index()).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn mask(&self) -> &[bool] {
        &self.accessible
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.accessible
            .iter()
            .enumerate()
            .filter(|(_, a)| **a)
            .map(|(i, _)| VertexId(i as u32))
    }
}

/// Sweep vertices by increasing fitness; `v` is accessible iff it is the
/// source or has an already-accessible in-neighbor of strictly smaller
/// fitness.
pub fn accessible_set(l: &FitnessLandscape) -> AccessReport {
    let g = l.graph();
    let mut mark = vec![false; g.vertex_count()];
    let source = g.source();
    for v in l.sweep_order() {
        let v = VertexId(v);
        if v == source {
            mark[v.index()] = true;
            continue;
        }
        let fv = l.fitness(v);
        mark[v.index()] = g.in_neighbors(v).any(|u| mark[u.index()] && l.fitness(u) < fv);
    }
    AccessReport::from_mask(mark, AccessMethod::SortedSweep)
}

/// Whether `target` is accessible from the source. The source itself is
/// accessible through the one-vertex path.
pub fn is_accessible(l: &FitnessLandscape, target: VertexId) -> Result<bool, LandscapeError> {
    l.graph().check_vertex(target)?;
    Ok(accessible_set(l).contains(target))
}

/// Exact number of accessible paths from the source to `target`.
///
/// Accessible paths are self-avoiding, so they are the source-to-target
/// paths of the DAG of fitness-increasing arcs; counts are accumulated in
/// decreasing fitness order. Hypercubes above
/// [`PATH_COUNT_MAX_DIMENSION`] are refused unless `allow_large` is set.
pub fn count_accessible_paths(
    l: &FitnessLandscape,
    target: VertexId,
    allow_large: bool,
) -> Result<BigUint, LandscapeError> {
    let g = l.graph();
    g.check_vertex(target)?;
    if let Some(n) = g.dimension() {
        if n > PATH_COUNT_MAX_DIMENSION && !allow_large {
            return Err(LandscapeError::PathCountGuard(n));
        }
    }
    let ft = l.fitness(target);
    let mut paths: Vec<BigUint> = vec![BigUint::zero(); g.vertex_count()];
    paths[target.index()] = BigUint::one();
    for &v in l.sweep_order().iter().rev() {
        let v = VertexId(v);
        if v == target || l.fitness(v) >= ft {
            continue;
        }
        let fv = l.fitness(v);
        let mut total = BigUint::zero();
        for w in g.out_neighbors(v) {
            if l.fitness(w) > fv && !paths[w.index()].is_zero() {
                total += &paths[w.index()];
            }
        }
        paths[v.index()] = total;
    }
    Ok(std::mem::take(&mut paths[g.source().index()]))
}

/// Minimum number of non-ascending steps over all walks from the source to
/// `target`, by 0-1 breadth-first search.
pub fn min_descents(l: &FitnessLandscape, target: VertexId) -> Result<u32, LandscapeError> {
    let g = l.graph();
    g.check_vertex(target)?;
    let mut dist = vec![u32::MAX; g.vertex_count()];
    let mut queue = VecDeque::new();
    let source = g.source();
    dist[source.index()] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u.index()];
        let fu = l.fitness(u);
        for w in g.out_neighbors(u) {
            let step = match l.fitness(w).partial_cmp(&fu) {
                Some(Ordering::Greater) => 0,
                _ => 1,
            };
            if du + step < dist[w.index()] {
                dist[w.index()] = du + step;
                if step == 0 {
                    queue.push_front(w);
                } else {
                    queue.push_back(w);
                }
            }
        }
    }
    match dist[target.index()] {
        u32::MAX => Err(LandscapeError::Unreachable(target)),
        d => Ok(d),
    }
}

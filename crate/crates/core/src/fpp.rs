//! First-passage site and bond percolation.
//!
//! Site passage times are computed by the incremental frontier procedure:
//! keep the set `U` of vertices with assigned times, repeatedly take the arc
//! `(u, v)` with `u` in `U`, `v` outside, minimizing the time of `u`, and
//! assign `T(v) = T(u) + c(v)`. Ties go to the smaller parent id, then the
//! smaller child id. The procedure is also the engine behind the coupled
//! bond run and the fitness/cost coupling, which is why its assignment
//! order is exposed.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, GraphModel, Path, VertexId};
use crate::rng::exp1_from_uniform;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FppError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {0} is not reachable from the source")]
    Unreachable(VertexId),
    #[error("expected a {expected:?} cost field")]
    WrongFieldKind { expected: FieldKind },
    #[error("reduced passage time needs a target different from the source")]
    TargetIsSource,
    #[error("vertex {0} has no in-neighbor")]
    NoInNeighbor(VertexId),
    #[error("cost {value} at index {index} is negative or NaN")]
    NegativeCost { index: usize, value: f64 },
    #[error("expected {expected} cost values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Law of the costs in a field.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostDistribution {
    #[serde(alias = "uniform")]
    Uniform01,
    #[serde(alias = "exp")]
    Exp1,
}

impl CostDistribution {
    /// Map a `U(0,1)` variate to this law by its inverse CDF.
    pub fn from_uniform(self, u: f64) -> f64 {
        match self {
            CostDistribution::Uniform01 => u,
            CostDistribution::Exp1 => exp1_from_uniform(u),
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        self.from_uniform(rng.sample(Open01))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    /// One cost per vertex.
    Site,
    /// One weight per edge slot (see [`GraphModel::edge_slot`]).
    Bond,
}

/// Vertex costs or edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CostField {
    kind: FieldKind,
    distribution: CostDistribution,
    values: Vec<f64>,
}

impl CostField {
    pub fn site(
        g: &GraphModel,
        values: Vec<f64>,
        distribution: CostDistribution,
    ) -> Result<Self, FppError> {
        Self::checked(FieldKind::Site, g.vertex_count(), values, distribution)
    }

    /// Bond weights indexed by edge slot; entries of unused slots are ignored.
    pub fn bond(
        g: &GraphModel,
        values: Vec<f64>,
        distribution: CostDistribution,
    ) -> Result<Self, FppError> {
        Self::checked(FieldKind::Bond, g.edge_slot_count(), values, distribution)
    }

    fn checked(
        kind: FieldKind,
        expected: usize,
        values: Vec<f64>,
        distribution: CostDistribution,
    ) -> Result<Self, FppError> {
        if values.len() != expected {
            return Err(FppError::LengthMismatch { expected, got: values.len() });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(FppError::NegativeCost { index, value });
        }
        Ok(CostField { kind, distribution, values })
    }

    /// iid vertex costs drawn in vertex-id order.
    pub fn sample_site<R: Rng + ?Sized>(
        g: &GraphModel,
        distribution: CostDistribution,
        rng: &mut R,
    ) -> CostField {
        let values = (0..g.vertex_count()).map(|_| distribution.sample(rng)).collect();
        CostField { kind: FieldKind::Site, distribution, values }
    }

    /// iid edge weights drawn in slot order (unused slots get +inf).
    pub fn sample_bond<R: Rng + ?Sized>(
        g: &GraphModel,
        distribution: CostDistribution,
        rng: &mut R,
    ) -> CostField {
        let values = (0..g.edge_slot_count())
            .map(|s| if g.is_edge_slot(s) { distribution.sample(rng) } else { f64::INFINITY })
            .collect();
        CostField { kind: FieldKind::Bond, distribution, values }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn distribution(&self) -> CostDistribution {
        self.distribution
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn site_cost(&self, v: VertexId) -> f64 {
        debug_assert_eq!(self.kind, FieldKind::Site);
        self.values[v.index()]
    }

    pub fn edge_weight(&self, g: &GraphModel, u: VertexId, v: VertexId) -> Option<f64> {
        debug_assert_eq!(self.kind, FieldKind::Bond);
        g.edge_slot(u, v).map(|s| self.values[s])
    }

    /// The inverse-CDF image of a `U(0,1)` field under `Exp(1)`; pointwise
    /// at least as large as the original.
    pub fn to_exp1(&self) -> CostField {
        assert_eq!(self.distribution, CostDistribution::Uniform01);
        CostField {
            kind: self.kind,
            distribution: CostDistribution::Exp1,
            values: self.values.iter().map(|&u| exp1_from_uniform(u)).collect(),
        }
    }

    fn require(&self, kind: FieldKind) -> Result<(), FppError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(FppError::WrongFieldKind { expected: kind })
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PassageKind {
    Site,
    Bond,
}

/// First-passage times from one source to every vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct PassageTimes {
    pub source: VertexId,
    pub kind: PassageKind,
    times: Vec<f64>,
}

impl PassageTimes {
    pub fn new(source: VertexId, kind: PassageKind, times: Vec<f64>) -> Self {
        PassageTimes { source, kind, times }
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.times[v.index()]
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `min` of the times of the in-neighbors of `target`, i.e. the reduced
    /// site passage time when these are site times.
    pub fn reduced(&self, g: &GraphModel, target: VertexId) -> Result<f64, FppError> {
        g.check_vertex(target)?;
        if target == self.source {
            return Err(FppError::TargetIsSource);
        }
        g.in_neighbors(target)
            .map(|u| self.times[u.index()])
            .min_by(f64::total_cmp)
            .ok_or(FppError::NoInNeighbor(target))
    }
}

/// One step of the frontier procedure.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Assignment {
    pub parent: VertexId,
    pub child: VertexId,
    pub parent_time: f64,
    pub cost: f64,
}

/// Result of a frontier sweep: times plus the assignment log.
#[derive(Clone, Debug)]
pub struct FrontierRun {
    pub source: VertexId,
    pub times: Vec<f64>,
    pub order: Vec<Assignment>,
}

impl FrontierRun {
    pub fn into_passage_times(self) -> PassageTimes {
        PassageTimes::new(self.source, PassageKind::Site, self.times)
    }
}

/// Min-heap key on (time, vertex id).
#[derive(Copy, Clone, Debug)]
pub(crate) struct HeapKey {
    pub time: f64,
    pub id: u32,
}

impl PartialEq for HeapKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    // reversed so that BinaryHeap pops the smallest key
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then(other.id.cmp(&self.id))
    }
}

/// Run the frontier procedure from `source`. `cost_of(parent, parent_time,
/// child)` is called exactly once per assigned vertex, in assignment order,
/// and returns the cost added for `child`.
///
/// With `limit = Some(t)` the sweep stops once every remaining frontier
/// parent has time above `t`; unassigned vertices then hold `+inf` and all
/// vertices with time at most `t` are exact.
pub fn frontier_sweep<F>(
    g: &GraphModel,
    source: VertexId,
    limit: Option<f64>,
    mut cost_of: F,
) -> Result<FrontierRun, FppError>
where
    F: FnMut(VertexId, f64, VertexId) -> f64,
{
    g.check_vertex(source)?;
    let n = g.vertex_count();
    let mut times = vec![f64::INFINITY; n];
    let mut assigned = vec![false; n];
    let mut order = Vec::with_capacity(n.saturating_sub(1));
    let mut heap = BinaryHeap::new();
    times[source.index()] = 0.0;
    assigned[source.index()] = true;
    heap.push(HeapKey { time: 0.0, id: source.0 });
    'outer: while let Some(top) = heap.pop() {
        if limit.is_some_and(|t| top.time > t) {
            break;
        }
        let u = VertexId(top.id);
        for v in g.out_neighbors(u) {
            if assigned[v.index()] {
                continue;
            }
            if heap.peek().is_some_and(|k| *k > top) {
                // a just-assigned child now precedes u (equal time, smaller id)
                heap.push(top);
                continue 'outer;
            }
            let cost = cost_of(u, top.time, v);
            let t = top.time + cost;
            times[v.index()] = t;
            assigned[v.index()] = true;
            order.push(Assignment { parent: u, child: v, parent_time: top.time, cost });
            heap.push(HeapKey { time: t, id: v.0 });
        }
    }
    if limit.is_none() {
        if let Some(v) = assigned.iter().position(|a| !a) {
            return Err(FppError::Unreachable(VertexId(v as u32)));
        }
    }
    Ok(FrontierRun { source, times, order })
}

/// Exact site first-passage times `T_V(source, .)`.
pub fn site_passage_times(
    g: &GraphModel,
    c: &CostField,
    source: VertexId,
) -> Result<PassageTimes, FppError> {
    site_frontier(g, c, source, None).map(FrontierRun::into_passage_times)
}

/// Frontier sweep over site costs, optionally stopped at `limit`.
pub fn site_frontier(
    g: &GraphModel,
    c: &CostField,
    source: VertexId,
    limit: Option<f64>,
) -> Result<FrontierRun, FppError> {
    c.require(FieldKind::Site)?;
    if c.values.len() != g.vertex_count() {
        return Err(FppError::LengthMismatch { expected: g.vertex_count(), got: c.values.len() });
    }
    frontier_sweep(g, source, limit, |_, _, v| c.values[v.index()])
}

/// Reduced site passage time `T'_V(source, target)`: the minimum of
/// `T_V(source, u)` over in-neighbors `u` of `target`.
pub fn reduced_passage_time(
    g: &GraphModel,
    c: &CostField,
    source: VertexId,
    target: VertexId,
) -> Result<f64, FppError> {
    g.check_vertex(target)?;
    if target == source {
        return Err(FppError::TargetIsSource);
    }
    site_passage_times(g, c, source)?.reduced(g, target)
}

/// Bond first-passage times `T_E(source, .)` by label-setting.
pub fn bond_passage_times(
    g: &GraphModel,
    w: &CostField,
    source: VertexId,
) -> Result<PassageTimes, FppError> {
    w.require(FieldKind::Bond)?;
    g.check_vertex(source)?;
    let mut dist = vec![f64::INFINITY; g.vertex_count()];
    let mut done = vec![false; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[source.index()] = 0.0;
    heap.push(HeapKey { time: 0.0, id: source.0 });
    while let Some(HeapKey { time, id }) = heap.pop() {
        let u = VertexId(id);
        if done[u.index()] {
            continue;
        }
        done[u.index()] = true;
        for v in g.out_neighbors(u) {
            let slot = g.edge_slot(u, v).expect("out-neighbor has an edge slot");
            let t = time + w.values[slot];
            if t < dist[v.index()] {
                dist[v.index()] = t;
                heap.push(HeapKey { time: t, id: v.0 });
            }
        }
    }
    if let Some(v) = dist.iter().position(|d| d.is_infinite()) {
        return Err(FppError::Unreachable(VertexId(v as u32)));
    }
    Ok(PassageTimes::new(source, PassageKind::Bond, dist))
}

/// Output of [`coupled_bond_site_run`].
#[derive(Clone, Debug)]
pub struct CoupledBondSite {
    pub site: PassageTimes,
    pub bond: PassageTimes,
    pub site_costs: CostField,
    pub bond_weights: CostField,
    pub order: Vec<Assignment>,
}

/// Site and bond first-passage percolation driven by one variate stream.
///
/// The frontier procedure draws one fresh `U(0,1)` per assignment `(u, v)`;
/// it becomes the cost of `v` and the weight of the edge `u -> v`. Afterwards
/// the source cost and all edges not used by an assignment get fresh
/// independent weights, and bond times are re-minimized over the realized
/// weights. Every site time is the weight of some bond path, so
/// `bond[v] <= site[v]` for all `v`.
pub fn coupled_bond_site_run<R: Rng + ?Sized>(
    g: &GraphModel,
    rng: &mut R,
    source: VertexId,
) -> Result<CoupledBondSite, FppError> {
    let mut site = vec![f64::NAN; g.vertex_count()];
    let mut bond = vec![f64::NAN; g.edge_slot_count()];
    let run = frontier_sweep(g, source, None, |u, _, v| {
        let x: f64 = rng.sample(Open01);
        site[v.index()] = x;
        bond[g.edge_slot(u, v).expect("assignment follows an arc")] = x;
        x
    })?;
    site[source.index()] = rng.sample(Open01);
    for (slot, w) in bond.iter_mut().enumerate() {
        if !g.is_edge_slot(slot) {
            *w = f64::INFINITY;
        } else if w.is_nan() {
            *w = rng.sample(Open01);
        }
    }
    let site_costs = CostField::site(g, site, CostDistribution::Uniform01)?;
    let bond_weights = CostField::bond(g, bond, CostDistribution::Uniform01)?;
    let bond_times = bond_passage_times(g, &bond_weights, source)?;
    let order = run.order.clone();
    Ok(CoupledBondSite {
        site: run.into_passage_times(),
        bond: bond_times,
        site_costs,
        bond_weights,
        order,
    })
}

/// Site passage time of a path: the sum of the costs of all vertices but
/// the first, or of all but the first and last when `reduced`.
pub fn path_passage_time(c: &CostField, p: &Path, reduced: bool) -> Result<f64, FppError> {
    c.require(FieldKind::Site)?;
    let vs = p.vertices();
    let end = if reduced { vs.len().saturating_sub(1) } else { vs.len() };
    Ok(vs.get(1..end).unwrap_or(&[]).iter().map(|v| c.values[v.index()]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::rng::substream;

    fn line() -> GraphModel {
        GraphModel::explicit(3, vec![Edge::undirected(0, 1), Edge::undirected(1, 2)]).unwrap()
    }

    #[test]
    fn zero_costs_give_zero_times() {
        let g = GraphModel::hypercube(4).unwrap();
        let c = CostField::site(&g, vec![0.0; 16], CostDistribution::Uniform01).unwrap();
        let t = site_passage_times(&g, &c, VertexId::ZERO).unwrap();
        assert!(t.times().iter().all(|x| *x == 0.0));
        let w = CostField::bond(&g, vec![0.0; g.edge_slot_count()], CostDistribution::Uniform01)
            .unwrap();
        let b = bond_passage_times(&g, &w, VertexId::ZERO).unwrap();
        assert!(b.times().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn path_graph_times() {
        let g = line();
        let c = CostField::site(&g, vec![0.9, 0.3, 0.2], CostDistribution::Uniform01).unwrap();
        let t = site_passage_times(&g, &c, VertexId(0)).unwrap();
        assert!((t.get(VertexId(2)) - 0.5).abs() < 1e-15);
        assert_eq!(reduced_passage_time(&g, &c, VertexId(0), VertexId(2)).unwrap(), 0.3);
        assert_eq!(reduced_passage_time(&g, &c, VertexId(0), VertexId(1)).unwrap(), 0.0);
        assert!(matches!(
            reduced_passage_time(&g, &c, VertexId(0), VertexId(0)),
            Err(FppError::TargetIsSource)
        ));
    }

    #[test]
    fn no_in_neighbor_is_an_error() {
        let g = GraphModel::explicit(2, vec![Edge::directed(0, 1)]).unwrap();
        let c = CostField::site(&g, vec![0.1, 0.2], CostDistribution::Uniform01).unwrap();
        let t = site_passage_times(&g, &c, VertexId(0)).unwrap();
        assert!(t.reduced(&g, VertexId(1)).is_ok());
        // vertex 0 has no in-neighbor; from source 1 vertex 0 is unreachable
        assert!(matches!(
            site_passage_times(&g, &c, VertexId(1)),
            Err(FppError::Unreachable(VertexId(0)))
        ));
    }

    #[test]
    fn triangle_bond_times() {
        let g = GraphModel::explicit(
            3,
            vec![Edge::undirected(0, 1), Edge::undirected(1, 2), Edge::undirected(0, 2)],
        )
        .unwrap();
        let w = CostField::bond(&g, vec![1.0, 1.0, 3.0], CostDistribution::Uniform01).unwrap();
        let b = bond_passage_times(&g, &w, VertexId(0)).unwrap();
        assert_eq!(b.times(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn path_times() {
        let g = line();
        let c = CostField::site(&g, vec![0.4, 0.2, 0.7], CostDistribution::Uniform01).unwrap();
        let p = Path::new(&g, vec![VertexId(0), VertexId(1), VertexId(2)]).unwrap();
        assert!((path_passage_time(&c, &p, false).unwrap() - 0.9).abs() < 1e-15);
        assert_eq!(path_passage_time(&c, &p, true).unwrap(), 0.2);
        let q = Path::new(&g, vec![VertexId(1)]).unwrap();
        assert_eq!(path_passage_time(&c, &q, true).unwrap(), 0.0);
        assert_eq!(path_passage_time(&c, &q, false).unwrap(), 0.0);
    }

    #[test]
    fn fixed_point_and_monotone_assignment() {
        for (n, oriented) in [(5, false), (5, true), (8, false)] {
            let g = if oriented {
                GraphModel::oriented_hypercube(n).unwrap()
            } else {
                GraphModel::hypercube(n).unwrap()
            };
            for seed in 0..20 {
                let mut rng = substream(seed, 0);
                let c = CostField::sample_site(&g, CostDistribution::Uniform01, &mut rng);
                let run = site_frontier(&g, &c, VertexId::ZERO, None).unwrap();
                for v in g.vertices().skip(1) {
                    let best = g
                        .in_neighbors(v)
                        .map(|u| run.times[u.index()])
                        .fold(f64::INFINITY, f64::min);
                    assert_eq!(run.times[v.index()], best + c.site_cost(v));
                }
                assert!(run.order.windows(2).all(|w| w[0].parent_time <= w[1].parent_time));
                assert_eq!(run.order.len(), g.vertex_count() - 1);
            }
        }
    }

    #[test]
    fn bounded_sweep_is_exact_below_limit() {
        let g = GraphModel::hypercube(9).unwrap();
        for seed in 0..10 {
            let mut rng = substream(seed, 1);
            let c = CostField::sample_site(&g, CostDistribution::Uniform01, &mut rng);
            let full = site_frontier(&g, &c, VertexId::ZERO, None).unwrap();
            let part = site_frontier(&g, &c, VertexId::ZERO, Some(0.6)).unwrap();
            for v in g.vertices() {
                let (a, b) = (full.times[v.index()], part.times[v.index()]);
                if a <= 0.6 || b.is_finite() {
                    assert_eq!(a, b);
                } else {
                    assert!(b.is_infinite());
                }
            }
        }
    }

    #[test]
    fn exponential_costs_dominate() {
        let g = GraphModel::hypercube(6).unwrap();
        for seed in 0..50 {
            let mut rng = substream(seed, 2);
            let c = CostField::sample_site(&g, CostDistribution::Uniform01, &mut rng);
            let e = c.to_exp1();
            let tu = site_passage_times(&g, &c, VertexId::ZERO).unwrap();
            let te = site_passage_times(&g, &e, VertexId::ZERO).unwrap();
            for v in g.vertices() {
                assert!(te.get(v) >= tu.get(v));
            }
        }
    }

    #[test]
    fn coupled_run_single_edge() {
        let g = GraphModel::explicit(2, vec![Edge::undirected(0, 1)]).unwrap();
        let mut rng = substream(9, 0);
        let run = coupled_bond_site_run(&g, &mut rng, VertexId(0)).unwrap();
        assert_eq!(run.site.get(VertexId(1)), run.bond.get(VertexId(1)));
        assert_eq!(run.site.get(VertexId(1)), run.site_costs.site_cost(VertexId(1)));
    }

    #[test]
    fn coupled_run_bond_below_site() {
        for n in 3..=8 {
            let g = GraphModel::hypercube(n).unwrap();
            for seed in 0..20 {
                let mut rng = substream(seed, n as u64);
                let run = coupled_bond_site_run(&g, &mut rng, VertexId::ZERO).unwrap();
                for v in g.vertices() {
                    assert!(run.bond.get(v) <= run.site.get(v));
                }
                // the site half is an honest site percolation sample
                let again = site_passage_times(&g, &run.site_costs, VertexId::ZERO).unwrap();
                assert_eq!(again.times(), run.site.times());
            }
        }
    }

    #[test]
    fn coupled_run_exact_on_trees() {
        let g = GraphModel::regular_tree(3, 4).unwrap();
        for seed in 0..20 {
            let mut rng = substream(seed, 77);
            let run = coupled_bond_site_run(&g, &mut rng, VertexId::ZERO).unwrap();
            assert_eq!(run.site.times(), run.bond.times());
        }
    }

    #[test]
    fn invalid_fields_rejected() {
        let g = line();
        assert!(CostField::site(&g, vec![0.1, -0.2, 0.3], CostDistribution::Uniform01).is_err());
        assert!(CostField::site(&g, vec![0.1, 0.3], CostDistribution::Uniform01).is_err());
        let w = CostField::bond(&g, vec![0.1, 0.2], CostDistribution::Uniform01).unwrap();
        assert!(matches!(
            site_passage_times(&g, &w, VertexId(0)),
            Err(FppError::WrongFieldKind { expected: FieldKind::Site })
        ));
    }
}

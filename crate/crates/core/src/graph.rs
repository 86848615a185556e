//! Graph models and path utilities.
//!
//! Hypercube vertices are bit masks: bit `i` of a [`VertexId`] is coordinate
//! `i + 1`, so `VertexId::unit(0)` is the first standard basis vector.
//! Trees and user-supplied graphs are stored as [`ExplicitGraph`]s with
//! node-indexed vertices. The distinguished source vertex is always id 0.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest hypercube dimension accepted by the constructors.
pub const MAX_HYPERCUBE_DIMENSION: u32 = 30;

/// Largest number of vertices materialized for a regular rooted tree.
pub const MAX_TREE_VERTICES: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("hypercube dimension {0} outside 1..={MAX_HYPERCUBE_DIMENSION}")]
    Dimension(u32),
    #[error("vertex {vertex} is not a vertex of this graph ({vertex_count} vertices)")]
    InvalidVertex { vertex: VertexId, vertex_count: usize },
    #[error("vertices {0} and {1} have different dimensions")]
    DimensionMismatch(VertexId, VertexId),
    #[error("no arc from {0} to {1}")]
    NotAdjacent(VertexId, VertexId),
    #[error("a path needs at least one vertex")]
    EmptyPath,
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate arc {0} -> {1}")]
    DuplicateArc(VertexId, VertexId),
    #[error("vertex {0} is not reachable from the source")]
    Unreachable(VertexId),
    #[error("tree with degree {degree} and height {height} is too large or degenerate")]
    TreeSize { degree: u32, height: u32 },
    #[error("operation requires an unoriented hypercube")]
    NotUnorientedHypercube,
    #[error("gap {gap} out of range for a path with {len} vertices")]
    GapOutOfRange { gap: usize, len: usize },
}

/// A vertex: an `n`-bit mask on hypercubes, a node index otherwise.
#[derive(
    Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    pub const ZERO: VertexId = VertexId(0);

    /// The all-ones vertex of `Q_n`.
    pub fn ones(n: u32) -> VertexId {
        debug_assert!(n <= 32);
        VertexId(if n >= 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    /// Standard basis vector with coordinate `bit` (zero based) set.
    pub fn unit(bit: u32) -> VertexId {
        VertexId(1 << bit)
    }

    /// Number of coordinates equal to one.
    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    /// Coordinate-wise addition modulo two.
    pub fn xor(self, other: VertexId) -> VertexId {
        VertexId(self.0 ^ other.0)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// True if no bit at position `>= n` is set.
    pub fn fits(self, n: u32) -> bool {
        n >= 32 || self.0 >> n == 0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `|v|`, the Hamming weight.
pub fn hamming_weight(v: VertexId) -> u32 {
    v.weight()
}

/// `u + v` in `Q_n`, rejecting vertices with bits beyond dimension `n`.
pub fn vertex_add(n: u32, u: VertexId, v: VertexId) -> Result<VertexId, GraphError> {
    if !u.fits(n) || !v.fits(n) {
        return Err(GraphError::DimensionMismatch(u, v));
    }
    Ok(u.xor(v))
}

/// One line of an explicit edge list.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub directed: bool,
}

impl Edge {
    pub fn undirected(u: u32, v: u32) -> Edge {
        Edge { u: VertexId(u), v: VertexId(v), directed: false }
    }

    pub fn directed(u: u32, v: u32) -> Edge {
        Edge { u: VertexId(u), v: VertexId(v), directed: true }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ExplicitKind {
    General,
    RegularTree { degree: u32, height: u32 },
}

/// Node-indexed graph. Undirected edges are stored as two arcs sharing one
/// edge slot.
#[derive(Clone, Debug)]
pub struct ExplicitGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    // (neighbor, edge index), sorted by neighbor
    out_arcs: Vec<Vec<(u32, u32)>>,
    in_arcs: Vec<Vec<(u32, u32)>>,
    directed: bool,
    kind: ExplicitKind,
}

impl ExplicitGraph {
    fn build(vertex_count: usize, edges: Vec<Edge>, kind: ExplicitKind) -> Result<Self, GraphError> {
        let mut out_arcs = vec![Vec::new(); vertex_count];
        let mut in_arcs = vec![Vec::new(); vertex_count];
        let mut directed = false;
        for (idx, e) in edges.iter().enumerate() {
            for w in [e.u, e.v] {
                if w.index() >= vertex_count {
                    return Err(GraphError::InvalidVertex { vertex: w, vertex_count });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            directed |= e.directed;
            out_arcs[e.u.index()].push((e.v.0, idx as u32));
            in_arcs[e.v.index()].push((e.u.0, idx as u32));
            if !e.directed {
                out_arcs[e.v.index()].push((e.u.0, idx as u32));
                in_arcs[e.u.index()].push((e.v.0, idx as u32));
            }
        }
        for (u, arcs) in out_arcs.iter_mut().enumerate() {
            arcs.sort_unstable();
            if let Some(w) = arcs.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(GraphError::DuplicateArc(VertexId(u as u32), VertexId(w[0].0)));
            }
        }
        for arcs in in_arcs.iter_mut() {
            arcs.sort_unstable();
        }
        let g = ExplicitGraph { vertex_count, edges, out_arcs, in_arcs, directed, kind };
        g.check_reachable()?;
        Ok(g)
    }

    fn check_reachable(&self) -> Result<(), GraphError> {
        if self.vertex_count == 0 {
            return Err(GraphError::InvalidVertex { vertex: VertexId::ZERO, vertex_count: 0 });
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0u32];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(w, _) in &self.out_arcs[u as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(v) => Err(GraphError::Unreachable(VertexId(v as u32))),
            None => Ok(()),
        }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn kind(&self) -> ExplicitKind {
        self.kind
    }
}

/// The ambient graph of every computation in this crate.
#[derive(Clone, Debug)]
pub enum GraphModel {
    UnorientedHypercube { n: u32 },
    /// Every edge directed towards the endpoint with more ones.
    OrientedHypercube { n: u32 },
    Explicit(Arc<ExplicitGraph>),
}

impl GraphModel {
    pub fn hypercube(n: u32) -> Result<Self, GraphError> {
        check_dimension(n)?;
        Ok(GraphModel::UnorientedHypercube { n })
    }

    pub fn oriented_hypercube(n: u32) -> Result<Self, GraphError> {
        check_dimension(n)?;
        Ok(GraphModel::OrientedHypercube { n })
    }

    /// Graph from an edge list; every vertex must be reachable from vertex 0.
    pub fn explicit(vertex_count: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        Ok(GraphModel::Explicit(Arc::new(ExplicitGraph::build(
            vertex_count,
            edges,
            ExplicitKind::General,
        )?)))
    }

    /// Rooted tree where every vertex above generation `height` has
    /// `degree` children. Vertices are numbered breadth first, root 0.
    pub fn regular_tree(degree: u32, height: u32) -> Result<Self, GraphError> {
        let too_big = GraphError::TreeSize { degree, height };
        if degree == 0 {
            return Err(too_big);
        }
        let mut count: usize = 1;
        let mut level: usize = 1;
        for _ in 0..height {
            level = level.checked_mul(degree as usize).ok_or(too_big.clone())?;
            count = count.checked_add(level).ok_or(too_big.clone())?;
            if count > MAX_TREE_VERTICES {
                return Err(too_big);
            }
        }
        let edges = (1..count as u32)
            .map(|child| Edge::undirected((child - 1) / degree, child))
            .collect();
        Ok(GraphModel::Explicit(Arc::new(ExplicitGraph::build(
            count,
            edges,
            ExplicitKind::RegularTree { degree, height },
        )?)))
    }

    pub fn source(&self) -> VertexId {
        VertexId::ZERO
    }

    pub fn dimension(&self) -> Option<u32> {
        match self {
            GraphModel::UnorientedHypercube { n } | GraphModel::OrientedHypercube { n } => Some(*n),
            GraphModel::Explicit(_) => None,
        }
    }

    pub fn is_oriented_hypercube(&self) -> bool {
        matches!(self, GraphModel::OrientedHypercube { .. })
    }

    pub fn is_tree(&self) -> bool {
        matches!(self, GraphModel::Explicit(g) if matches!(g.kind, ExplicitKind::RegularTree { .. }))
    }

    pub fn has_directed_arcs(&self) -> bool {
        match self {
            GraphModel::UnorientedHypercube { .. } => false,
            GraphModel::OrientedHypercube { .. } => true,
            GraphModel::Explicit(g) => g.directed,
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            GraphModel::UnorientedHypercube { n } | GraphModel::OrientedHypercube { n } => 1usize << n,
            GraphModel::Explicit(g) => g.vertex_count,
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count() as u32).map(VertexId)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index() < self.vertex_count()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex { vertex: v, vertex_count: self.vertex_count() })
        }
    }

    /// All `w` with `v ~ w`, in ascending id order.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        self.check_vertex(v)?;
        Ok(self.out_neighbors(v).collect())
    }

    /// Out-neighbors in ascending id order. `v` must be a vertex.
    pub fn out_neighbors(&self, v: VertexId) -> Neighbors<'_> {
        debug_assert!(self.contains(v));
        match self {
            GraphModel::UnorientedHypercube { n } => Neighbors::cube(v, *n, true, true),
            GraphModel::OrientedHypercube { n } => Neighbors::cube(v, *n, false, true),
            GraphModel::Explicit(g) => Neighbors::List(g.out_arcs[v.index()].iter()),
        }
    }

    /// In-neighbors (`u` with `u ~ v`) in ascending id order.
    pub fn in_neighbors(&self, v: VertexId) -> Neighbors<'_> {
        debug_assert!(self.contains(v));
        match self {
            GraphModel::UnorientedHypercube { n } => Neighbors::cube(v, *n, true, true),
            GraphModel::OrientedHypercube { n } => Neighbors::cube(v, *n, true, false),
            GraphModel::Explicit(g) => Neighbors::List(g.in_arcs[v.index()].iter()),
        }
    }

    /// Whether `u ~ v`.
    pub fn has_arc(&self, u: VertexId, v: VertexId) -> bool {
        if !self.contains(u) || !self.contains(v) {
            return false;
        }
        match self {
            GraphModel::UnorientedHypercube { .. } => u.xor(v).weight() == 1,
            GraphModel::OrientedHypercube { .. } => u.xor(v).weight() == 1 && v.0 > u.0,
            GraphModel::Explicit(g) => {
                g.out_arcs[u.index()].binary_search_by_key(&v.0, |a| a.0).is_ok()
            }
        }
    }

    /// Size of the edge-slot index space used for bond weights.
    pub fn edge_slot_count(&self) -> usize {
        match self {
            GraphModel::UnorientedHypercube { n } | GraphModel::OrientedHypercube { n } => {
                (1usize << n) * *n as usize
            }
            GraphModel::Explicit(g) => g.edges.len(),
        }
    }

    /// Slot of the edge carrying arc `u -> v`. Both arcs of an undirected
    /// edge share one slot.
    pub fn edge_slot(&self, u: VertexId, v: VertexId) -> Option<usize> {
        if !self.has_arc(u, v) {
            return None;
        }
        match self {
            GraphModel::UnorientedHypercube { n } | GraphModel::OrientedHypercube { n } => {
                let bit = u.xor(v).0.trailing_zeros();
                let low = u.0.min(v.0) as usize;
                Some(low * *n as usize + bit as usize)
            }
            GraphModel::Explicit(g) => g.out_arcs[u.index()]
                .binary_search_by_key(&v.0, |a| a.0)
                .ok()
                .map(|i| g.out_arcs[u.index()][i].1 as usize),
        }
    }

    /// Whether a slot index corresponds to a real edge.
    pub fn is_edge_slot(&self, slot: usize) -> bool {
        match self {
            GraphModel::UnorientedHypercube { n } | GraphModel::OrientedHypercube { n } => {
                let n = *n as usize;
                slot < (1usize << n) * n && (slot / n) & (1 << (slot % n)) == 0
            }
            GraphModel::Explicit(g) => slot < g.edges.len(),
        }
    }
}

fn check_dimension(n: u32) -> Result<(), GraphError> {
    if n == 0 || n > MAX_HYPERCUBE_DIMENSION {
        Err(GraphError::Dimension(n))
    } else {
        Ok(())
    }
}

/// Ascending-order neighbor iterator.
#[derive(Clone, Debug)]
pub enum Neighbors<'a> {
    /// Clears set bits highest first, then sets unset bits lowest first;
    /// this enumerates `v ^ e_i` in ascending order.
    Cube { v: u32, down: u32, up: u32 },
    List(std::slice::Iter<'a, (u32, u32)>),
}

impl Neighbors<'_> {
    fn cube(v: VertexId, n: u32, down: bool, up: bool) -> Self {
        let mask = VertexId::ones(n).0;
        Neighbors::Cube {
            v: v.0,
            down: if down { v.0 } else { 0 },
            up: if up { !v.0 & mask } else { 0 },
        }
    }
}

impl Iterator for Neighbors<'_> {
    type Item = VertexId;

    fn next(&mut self) -> Option<VertexId> {
        match self {
            Neighbors::Cube { v, down, up } => {
                if *down != 0 {
                    let b = 31 - down.leading_zeros();
                    *down &= !(1 << b);
                    Some(VertexId(*v ^ (1 << b)))
                } else if *up != 0 {
                    let b = up.trailing_zeros();
                    *up &= *up - 1;
                    Some(VertexId(*v | (1 << b)))
                } else {
                    None
                }
            }
            Neighbors::List(it) => it.next().map(|a| VertexId(a.0)),
        }
    }
}

/// A nonempty vertex sequence whose consecutive elements are joined by arcs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    vertices: Vec<VertexId>,
}

impl Path {
    pub fn new(g: &GraphModel, vertices: Vec<VertexId>) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        for &v in &vertices {
            g.check_vertex(v)?;
        }
        for w in vertices.windows(2) {
            if !g.has_arc(w[0], w[1]) {
                return Err(GraphError::NotAdjacent(w[0], w[1]));
            }
        }
        Ok(Path { vertices })
    }

    /// Caller guarantees consecutive vertices are adjacent.
    pub(crate) fn from_vertices_unchecked(vertices: Vec<VertexId>) -> Self {
        Path { vertices }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Number of vertices (the length convention used for detours).
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn last(&self) -> VertexId {
        *self.vertices.last().expect("paths are nonempty")
    }

    pub fn into_vertices(self) -> Vec<VertexId> {
        self.vertices
    }
}

/// True iff no proper subsequence of `p` is a path with the same end points.
///
/// A subsequence keeping both ends skips from `v_i` to `v_j` with
/// `j >= i + 2` only along an arc, so minimality is the absence of such
/// "chords". A closed path (same first and last vertex, more than one
/// vertex) always contains the one-vertex path as a proper subsequence and
/// is never minimal.
pub fn is_vertex_minimal(g: &GraphModel, p: &Path) -> bool {
    let vs = p.vertices();
    if vs.len() > 1 && vs[0] == vs[vs.len() - 1] {
        return false;
    }
    for i in 0..vs.len() {
        for j in i + 2..vs.len() {
            if g.has_arc(vs[i], vs[j]) {
                return false;
            }
        }
    }
    true
}

/// A detour: the index range `start..=end` whose removal leaves a path.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Detour {
    pub start: usize,
    pub end: usize,
}

impl Detour {
    /// Number of removed vertices.
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Every detour `(i, j)`, `0 < i <= j < l`, in lexicographic order.
/// Overlapping detours are all reported.
pub fn detours(g: &GraphModel, p: &Path) -> Vec<Detour> {
    let vs = p.vertices();
    let l = vs.len();
    let mut out = Vec::new();
    if l < 3 {
        return out;
    }
    for start in 1..l - 1 {
        for end in start..l - 1 {
            if g.has_arc(vs[start - 1], vs[end + 1]) {
                out.push(Detour { start, end });
            }
        }
    }
    out
}

/// True iff every detour has length at most two.
pub fn is_almost_vertex_minimal(g: &GraphModel, p: &Path) -> bool {
    detours(g, p).iter().all(|d| d.len() <= 2)
}

/// Number of vertex pairs `(w1, w2)` that can be inserted between
/// `p[gap - 1]` and `p[gap]` of a path in the unoriented hypercube so that
/// the pair forms a length-two detour.
///
/// With `u = p[gap-1]`, `v = u + e_a` and `w1 = u + e_b`, `w2 = w1 + e_c`,
/// the pair is insertable iff `|e_a + e_b + e_c| = 1`: either `b = c`
/// (`w2 = u`, `n` choices of `b`), or `b != c` with `c = a` or `b = a`
/// (`n - 1` choices each). That is `3n - 2` in total.
pub fn count_detour_insertions(g: &GraphModel, p: &Path, gap: usize) -> Result<u64, GraphError> {
    let n = match g {
        GraphModel::UnorientedHypercube { n } => *n as u64,
        _ => return Err(GraphError::NotUnorientedHypercube),
    };
    if gap == 0 || gap >= p.len() {
        return Err(GraphError::GapOutOfRange { gap, len: p.len() });
    }
    let same_bit = n;
    let other_bit_twice = 2 * (n - 1);
    Ok(same_bit + other_bit_twice)
}

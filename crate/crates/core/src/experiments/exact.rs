//! Exact accessibility probabilities on tiny graphs by enumerating fitness
//! rank orders.

use num_rational::Ratio;

use crate::graph::{GraphModel, VertexId};

use super::ExperimentError;

pub const EXACT_MAX_VERTICES: usize = 9;

/// Probability that `target` is accessible under iid continuous fitnesses,
/// as the fraction of the equally likely rank orders that admit a
/// rank-increasing path. With `apriori_max` the target is ranked highest and
/// only the other vertices are permuted.
pub fn exact_accessibility_small(
    g: &GraphModel,
    target: VertexId,
    apriori_max: bool,
) -> Result<Ratio<u64>, ExperimentError> {
    g.check_vertex(target)?;
    let k = g.vertex_count();
    if k > EXACT_MAX_VERTICES {
        return Err(ExperimentError::TooLarge { vertices: k, max: EXACT_MAX_VERTICES });
    }
    if apriori_max && target == g.source() {
        return Err(ExperimentError::Config("the a priori maximum cannot be the source".into()));
    }
    if target == g.source() {
        return Ok(Ratio::from_integer(1));
    }
    let adjacency: Vec<Vec<usize>> =
        g.vertices().map(|v| g.out_neighbors(v).map(|w| w.index()).collect()).collect();
    // rank[v] for the permuted vertices; the target gets rank k - 1 when fixed
    let free: Vec<usize> =
        (0..k).filter(|&v| !(apriori_max && v == target.index())).collect();
    let mut ranks: Vec<usize> = (0..free.len()).collect();
    let mut rank = vec![0usize; k];
    let (mut hits, mut total) = (0u64, 0u64);
    for_each_permutation(&mut ranks, |perm| {
        for (slot, &v) in free.iter().enumerate() {
            rank[v] = perm[slot];
        }
        if apriori_max {
            rank[target.index()] = k - 1;
        }
        total += 1;
        if increasing_path_exists(&adjacency, &rank, g.source().index(), target.index()) {
            hits += 1;
        }
    });
    Ok(Ratio::new(hits, total))
}

fn increasing_path_exists(adj: &[Vec<usize>], rank: &[usize], from: usize, to: usize) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(u) = stack.pop() {
        if u == to {
            return true;
        }
        for &w in &adj[u] {
            if !seen[w] && rank[w] > rank[u] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

/// Heap's algorithm.
fn for_each_permutation<F: FnMut(&[usize])>(xs: &mut [usize], mut f: F) {
    let n = xs.len();
    let mut c = vec![0usize; n];
    f(xs);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                xs.swap(0, i);
            } else {
                xs.swap(c[i], i);
            }
            f(xs);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

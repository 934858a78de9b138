use fixedbitset::FixedBitSet;

use super::OrbitGraph;
use crate::error::{Result, SandpileError};

/// Kahn's algorithm; fails on a cycle.
pub fn topological_order(g: &OrbitGraph) -> Result<Vec<usize>> {
    let n = g.vertex_count();
    let mut indegree = vec![0usize; n];
    for (_, b) in g.edges() {
        indegree[b] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in g.successors(v) {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                stack.push(w);
            }
        }
    }
    if order.len() != n {
        return Err(SandpileError::Cyclic);
    }
    Ok(order)
}

/// Reflexive-transitive closure: `below[v]` holds every vertex reachable
/// from `v`, `above[v]` every vertex reaching `v`.
fn closures(g: &OrbitGraph, order: &[usize]) -> (Vec<FixedBitSet>, Vec<FixedBitSet>) {
    let n = g.vertex_count();
    let mut below = vec![FixedBitSet::with_capacity(n); n];
    for &v in order.iter().rev() {
        below[v].insert(v);
        for &w in g.successors(v) {
            let (head, tail) = if v < w {
                let (h, t) = below.split_at_mut(w);
                (&mut h[v], &t[0])
            } else {
                let (h, t) = below.split_at_mut(v);
                (&mut t[0], &h[w])
            };
            head.union_with(tail);
        }
    }
    let mut above = vec![FixedBitSet::with_capacity(n); n];
    for (v, set) in below.iter().enumerate() {
        for w in set.ones() {
            above[w].insert(v);
        }
    }
    (below, above)
}

/// Whether the set `common` has an element `x` whose own cone equals it,
/// i.e. a least (or greatest) element.
fn has_extremum(common: &FixedBitSet, cones: &[FixedBitSet]) -> bool {
    let size = common.count_ones(..);
    size > 0 && common.ones().any(|x| cones[x].count_ones(..) == size)
}

/// Whether the reachability order (`u >= v` when `v` is reachable from `u`)
/// is a lattice: every pair has a unique join and meet.
pub fn is_lattice(g: &OrbitGraph) -> Result<bool> {
    let order = topological_order(g)?;
    let (below, above) = closures(g, &order);
    let n = g.vertex_count();
    for a in 0..n {
        for b in (a + 1)..n {
            // For x in above[a] ∩ above[b], above[x] is a subset of the
            // intersection; a least element's cone is the whole set.
            let mut ups = above[a].clone();
            ups.intersect_with(&above[b]);
            if !has_extremum(&ups, &above) {
                return Ok(false);
            }
            let mut downs = below[a].clone();
            downs.intersect_with(&below[b]);
            if !has_extremum(&downs, &below) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Shortest and longest path lengths from the root to a sink.
pub fn path_lengths(g: &OrbitGraph) -> Result<Option<(usize, usize)>> {
    let Some(root) = g.root() else {
        return Ok(None);
    };
    let order = topological_order(g)?;
    let mut shortest = vec![usize::MAX; g.vertex_count()];
    let mut longest = vec![0usize; g.vertex_count()];
    for &v in order.iter().rev() {
        let succ = g.successors(v);
        if succ.is_empty() {
            shortest[v] = 0;
            continue;
        }
        shortest[v] = succ.iter().map(|&w| shortest[w]).min().unwrap_or(0) + 1;
        longest[v] = succ.iter().map(|&w| longest[w]).max().unwrap_or(0) + 1;
    }
    Ok(Some((shortest[root], longest[root])))
}

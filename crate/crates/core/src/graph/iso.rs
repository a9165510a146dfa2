//! Backtracking isomorphism test for small graphs.

use super::Graph;
use crate::error::{Error, Result};

pub const ISO_VERTEX_LIMIT: usize = 13;

fn vertex_invariants(g: &Graph) -> Vec<(usize, Vec<usize>)> {
    (0..g.n())
        .map(|v| {
            let mut nd: Vec<usize> = g.neighbors(v).map(|w| g.degree(w)).collect();
            nd.sort_unstable();
            (g.degree(v), nd)
        })
        .collect()
}

/// True iff an edge-preserving bijection between the vertex sets exists.
///
/// Candidates are pruned by degree and sorted neighbour-degree lists; the
/// search extends a partial map in an order where each new vertex is adjacent
/// to already-mapped ones whenever possible.
pub fn are_isomorphic(g1: &Graph, g2: &Graph) -> Result<bool> {
    for g in [g1, g2] {
        if g.n() > ISO_VERTEX_LIMIT {
            return Err(Error::TooLarge { what: "isomorphism oracle vertex count", got: g.n(), limit: ISO_VERTEX_LIMIT });
        }
    }
    if g1.n() != g2.n() || g1.edge_count() != g2.edge_count() {
        return Ok(false);
    }
    let inv1 = vertex_invariants(g1);
    let inv2 = vertex_invariants(g2);
    let (mut s1, mut s2) = (inv1.clone(), inv2.clone());
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return Ok(false);
    }

    let n = g1.n();
    let class_size = |v: usize| inv2.iter().filter(|x| **x == inv1[v]).count();
    let mut order = Vec::with_capacity(n);
    let mut placed = 0u32;
    while order.len() < n {
        // prefer vertices attached to the placed set, then small candidate classes, then high degree
        let next = (0..n)
            .filter(|&v| placed >> v & 1 == 0)
            .min_by_key(|&v| {
                let attached = g1.neighbor_mask(v) & placed != 0;
                (!attached, class_size(v), std::cmp::Reverse(g1.degree(v)), v)
            })
            .expect("unplaced vertex exists");
        placed |= 1 << next;
        order.push(next);
    }
    let candidates: Vec<Vec<usize>> =
        (0..n).map(|v| (0..n).filter(|&w| inv2[w] == inv1[v]).collect()).collect();

    let mut map = vec![usize::MAX; n];
    let mut used = 0u32;
    Ok(extend(g1, g2, &order, &candidates, 0, &mut map, &mut used))
}

fn extend(
    g1: &Graph,
    g2: &Graph,
    order: &[usize],
    candidates: &[Vec<usize>],
    depth: usize,
    map: &mut [usize],
    used: &mut u32,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    'cand: for &w in &candidates[v] {
        if *used >> w & 1 == 1 {
            continue;
        }
        for &u in &order[..depth] {
            if g1.has_edge(v, u) != g2.has_edge(w, map[u]) {
                continue 'cand;
            }
        }
        map[v] = w;
        *used |= 1 << w;
        if extend(g1, g2, order, candidates, depth + 1, map, used) {
            return true;
        }
        *used &= !(1 << w);
        map[v] = usize::MAX;
    }
    false
}

//! Built-in graph families: unlabeled trees and all graphs on a few vertices.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const TREE_VERTEX_LIMIT: usize = 10;
pub const GRAPH_VERTEX_LIMIT: usize = 6;

/// Parenthesis code of a rooted subtree, left-aligned in a `u64` so that
/// integer order is lexicographic order on equal-length prefixes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Code {
    bits: u64,
    len: u32,
}

impl Code {
    fn append(&mut self, other: Code) {
        self.bits |= other.bits >> self.len;
        self.len += other.len;
    }
}

fn rooted_code(adj: &[u16], v: usize, parent: usize) -> Code {
    let mut kids = [Code { bits: 0, len: 0 }; TREE_VERTEX_LIMIT];
    let mut k = 0;
    let mut rest = adj[v];
    while rest != 0 {
        let w = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if w != parent {
            kids[k] = rooted_code(adj, w, v);
            k += 1;
        }
    }
    kids[..k].sort_unstable_by(|a, b| b.cmp(a));
    let mut c = Code { bits: 1 << 63, len: 1 };
    for kid in &kids[..k] {
        c.append(*kid);
    }
    c.len += 1;
    c
}

/// AHU code rooted at the center, or the larger of the two center rootings.
fn tree_code(adj: &[u16]) -> u64 {
    let n = adj.len();
    if n == 1 {
        return rooted_code(adj, 0, usize::MAX).bits;
    }
    let mut deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
    let mut alive = n;
    let mut leaves: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    while alive > 2 {
        alive -= leaves.len();
        let mut next = Vec::new();
        for &l in &leaves {
            deg[l] = 0;
            let mut rest = adj[l];
            while rest != 0 {
                let w = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if deg[w] > 0 {
                    deg[w] -= 1;
                    if deg[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        leaves = next;
    }
    leaves.iter().map(|&c| rooted_code(adj, c, usize::MAX).bits).max().unwrap()
}

/// Rebuilds a tree from its parenthesis code, numbering vertices in preorder.
fn tree_from_code(code: u64, n: usize) -> Graph {
    let mut g = Graph::empty(n).expect("n in range");
    let mut stack: Vec<usize> = Vec::new();
    let mut next = 0;
    for i in 0..2 * n {
        if code >> (63 - i) & 1 == 1 {
            if let Some(&p) = stack.last() {
                g.add_edge(p, next).expect("fresh vertex");
            }
            stack.push(next);
            next += 1;
        } else {
            stack.pop();
        }
    }
    g
}

fn decode_pruefer(seq: &[u8], adj: &mut [u16]) {
    let n = adj.len();
    let mut deg = [1u8; TREE_VERTEX_LIMIT];
    for &s in seq {
        deg[s as usize] += 1;
    }
    adj.fill(0);
    let mut link = |a: usize, b: usize| {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    };
    for &s in seq {
        let leaf = (0..n).find(|&v| deg[v] == 1).unwrap();
        link(leaf, s as usize);
        deg[leaf] = 0;
        deg[s as usize] -= 1;
    }
    let mut ends = (0..n).filter(|&v| deg[v] == 1);
    let (a, b) = (ends.next().unwrap(), ends.next().unwrap());
    link(a, b);
}

/// One tree per isomorphism class on `n` vertices, in a fixed order.
///
/// Every labeled tree is visited through its Prüfer sequence and reduced to a
/// center-rooted canonical code; the distinct codes are decoded back into
/// graphs. There are `n^(n-2)` sequences, so `n = 10` takes a while.
pub fn enumerate_trees(n: usize) -> Result<Vec<Graph>> {
    if !(2..=TREE_VERTEX_LIMIT).contains(&n) {
        return Err(Error::TooLarge { what: "tree enumeration vertex count", got: n, limit: TREE_VERTEX_LIMIT });
    }
    if n == 2 {
        return Ok(vec![Graph::from_edges(2, [(0, 1)])?]);
    }
    let len = n - 2;
    let codes: BTreeSet<u64> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut seen = BTreeSet::new();
            let mut seq = vec![0u8; len];
            seq[0] = first as u8;
            let mut adj = vec![0u16; n];
            loop {
                decode_pruefer(&seq, &mut adj);
                seen.insert(tree_code(&adj));
                // odometer over seq[1..]
                let mut i = len;
                loop {
                    i -= 1;
                    if i == 0 {
                        return seen;
                    }
                    seq[i] += 1;
                    if (seq[i] as usize) < n {
                        break;
                    }
                    seq[i] = 0;
                }
            }
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    Ok(codes.into_iter().rev().map(|c| tree_from_code(c, n)).collect())
}

fn edge_slots(n: usize) -> Vec<(usize, usize)> {
    (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out
}

/// All graphs on `n` vertices up to isomorphism, one per class, each the
/// labeling with the smallest edge bitmask, in ascending bitmask order.
pub fn enumerate_graphs(n: usize) -> Result<Vec<Graph>> {
    if !(1..=GRAPH_VERTEX_LIMIT).contains(&n) {
        return Err(Error::TooLarge { what: "graph enumeration vertex count", got: n, limit: GRAPH_VERTEX_LIMIT });
    }
    let slots = edge_slots(n);
    let mut index = vec![vec![0usize; n]; n];
    for (k, &(i, j)) in slots.iter().enumerate() {
        index[i][j] = k;
        index[j][i] = k;
    }
    // slot k under each permutation
    let images: Vec<Vec<usize>> = permutations(n)
        .into_iter()
        .map(|p| slots.iter().map(|&(i, j)| index[p[i]][p[j]]).collect())
        .collect();
    let is_canonical = |mask: u32| {
        images.iter().all(|img| {
            let mut m = 0u32;
            let mut rest = mask;
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                m |= 1 << img[k];
            }
            m >= mask
        })
    };
    let masks: Vec<u32> = (0..1u32 << slots.len()).into_par_iter().filter(|&m| is_canonical(m)).collect();
    masks
        .into_iter()
        .map(|m| Graph::from_edges(n, slots.iter().enumerate().filter(|(k, _)| m >> k & 1 == 1).map(|(_, &e)| e)))
        .collect()
}

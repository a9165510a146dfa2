//! Simple undirected graphs on at most 32 vertices.
//!
//! Vertices are 0-indexed internally. Everything that faces a user (edge-list
//! text, fixture listings) is 1-indexed.

mod algebra;
mod fixtures;
mod format;
mod iso;

pub use algebra::{adjacency_power, char_poly, IntMatrix, IntPolynomial};
pub use fixtures::{fixture, fixture_edge_text, FIXTURE_NAMES};
pub use format::{encode_graph6, parse_edge_list, parse_graph6};
pub use iso::{are_isomorphic, ISO_VERTEX_LIMIT};

use crate::error::{Error, Result};

pub const MAX_VERTICES: usize = 32;

/// A simple undirected graph stored as one neighbour bitmask per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u32>,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::TooLarge { what: "vertex count", got: n, limit: MAX_VERTICES });
        }
        Ok(Graph { n, adj: vec![0; n] })
    }

    /// Builds a graph from 0-indexed pairs. Duplicate pairs collapse.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        for v in [a, b] {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v as i64 + 1, n: self.n });
            }
        }
        if a == b {
            return Err(Error::SelfLoop(a + 1));
        }
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    pub fn neighbor_mask(&self, v: usize) -> u32 {
        self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        BitIter(self.adj[v])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| BitIter(self.adj[i] & !((2u64 << i) - 1) as u32).map(move |j| (i, j)))
            .collect()
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.n);
        for (i, j) in self.edges() {
            m.set(i, j, 1);
            m.set(j, i, 1);
        }
        m
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let edges = self.edges().into_iter().map(|(a, b)| (perm[a], perm[b]));
        Graph::from_edges(self.n, edges).expect("permutation of a valid graph")
    }

    /// Edge list in 1-indexed `i,j;i,j` notation.
    pub fn to_edge_list(&self) -> String {
        self.edges()
            .iter()
            .map(|(a, b)| format!("{},{}", a + 1, b + 1))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![u8::MAX; self.n];
        for start in 0..self.n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for w in self.neighbors(v) {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[v];
                        stack.push(w);
                    } else if color[w] == color[v] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Iterates the set bits of a mask, lowest first.
#[derive(Clone, Copy)]
pub(crate) struct BitIter(pub u32);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

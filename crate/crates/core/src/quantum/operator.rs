use rayon::prelude::*;
use serde::Serialize;

use super::IsingParams;
use crate::classical::energy_magnetization_vectors;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Largest `n` for matrix-free quantum operators (dimension `2^24`).
pub const QUANTUM_VERTEX_LIMIT: usize = 24;

const PAR_THRESHOLD: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    /// `H_L(J, h) + Δ M_T`
    Transverse,
    /// `s H_L(J, h) + (1 − s) Δ M_T`
    Annealing,
}

/// Energy and magnetization of every basis state of a graph, shared by all
/// operators built on it.
#[derive(Clone, Debug)]
pub struct ClassicalDiagonal {
    n: usize,
    edges: usize,
    energy: Vec<i32>,
    magnetization: Vec<i32>,
}

impl ClassicalDiagonal {
    pub fn new(g: &Graph) -> Result<Self> {
        if g.n() > QUANTUM_VERTEX_LIMIT {
            return Err(Error::TooLarge { what: "quantum vertex count", got: g.n(), limit: QUANTUM_VERTEX_LIMIT });
        }
        let (energy, magnetization) = energy_magnetization_vectors(g)?;
        Ok(ClassicalDiagonal { n: g.n(), edges: g.edge_count(), energy, magnetization })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// `H_T(J, h, Δ)`.
    pub fn transverse<T: Scalar>(&self, p: &IsingParams<T>) -> QuantumOperator<T> {
        self.build(p.j, p.h, p.delta, T::one(), HamiltonianKind::Transverse)
    }

    /// `H_QA(J, h, Δ, s)`.
    pub fn annealing<T: Scalar>(&self, p: &IsingParams<T>, s: T) -> Result<QuantumOperator<T>> {
        if !(s >= T::zero() && s <= T::one()) {
            return Err(Error::InvalidArgument(format!("schedule s = {s} outside [0, 1]")));
        }
        Ok(self.build(p.j, p.h, p.delta, s, HamiltonianKind::Annealing))
    }

    fn build<T: Scalar>(&self, j: T, h: T, delta: T, s: T, kind: HamiltonianKind) -> QuantumOperator<T> {
        let (scale, amp) = match kind {
            HamiltonianKind::Transverse => (T::one(), delta),
            HamiltonianKind::Annealing => (s, (T::one() - s) * delta),
        };
        let sj = scale * j;
        let sh = scale * h;
        let diag = self
            .energy
            .par_iter()
            .zip(&self.magnetization)
            .map(|(&e, &m)| sj * T::from_i32(e).unwrap() + sh * T::from_i32(m).unwrap())
            .collect();
        QuantumOperator { n: self.n, diag, amp, kind }
    }
}

/// Real symmetric operator `D + a Σ_i X_i` on `2^n` basis states, where `D` is
/// diagonal and `X_i` flips bit `i`. The matrix is never materialized except
/// by [`QuantumOperator::to_dense`].
#[derive(Clone, Debug)]
pub struct QuantumOperator<T> {
    n: usize,
    diag: Vec<T>,
    amp: T,
    kind: HamiltonianKind,
}

impl<T: Scalar> QuantumOperator<T> {
    pub fn transverse(g: &Graph, p: &IsingParams<T>) -> Result<Self> {
        Ok(ClassicalDiagonal::new(g)?.transverse(p))
    }

    pub fn annealing(g: &Graph, p: &IsingParams<T>, s: T) -> Result<Self> {
        ClassicalDiagonal::new(g)?.annealing(p, s)
    }

    /// General constructor; `diag.len()` must be `2^n`.
    pub fn from_parts(n: usize, diag: Vec<T>, amp: T) -> Result<Self> {
        if n > QUANTUM_VERTEX_LIMIT || diag.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n.min(QUANTUM_VERTEX_LIMIT), got: diag.len() });
        }
        Ok(QuantumOperator { n, diag, amp, kind: HamiltonianKind::Transverse })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diag
    }

    pub fn flip_amplitude(&self) -> T {
        self.amp
    }

    pub fn kind(&self) -> HamiltonianKind {
        self.kind
    }

    pub fn is_diagonal(&self) -> bool {
        self.amp == T::zero()
    }

    /// `−H`, used to reach the top of the spectrum with a lowest-eigenvalue solver.
    pub fn negated(&self) -> Self {
        QuantumOperator { n: self.n, diag: self.diag.iter().map(|&d| -d).collect(), amp: -self.amp, kind: self.kind }
    }

    /// Upper bound on the spectral norm: `max |d| + n |a|`.
    pub fn norm_bound(&self) -> T {
        let dmax = self.diag.iter().fold(T::zero(), |m, d| m.max(d.abs()));
        dmax + T::from_usize(self.n).unwrap() * self.amp.abs()
    }

    /// `H v`.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.dim()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, v: &[T], out: &mut [T]) -> Result<()> {
        let dim = self.dim();
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
        }
        if out.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: out.len() });
        }
        let row = |sigma: usize| -> T {
            let mut flips = T::zero();
            for i in 0..self.n {
                flips = flips + v[sigma ^ (1 << i)];
            }
            self.diag[sigma] * v[sigma] + self.amp * flips
        };
        if dim >= PAR_THRESHOLD {
            out.par_chunks_mut(PAR_THRESHOLD).enumerate().for_each(|(c, chunk)| {
                let base = c * PAR_THRESHOLD;
                for (off, slot) in chunk.iter_mut().enumerate() {
                    *slot = row(base + off);
                }
            });
        } else {
            for (sigma, slot) in out.iter_mut().enumerate() {
                *slot = row(sigma);
            }
        }
        Ok(())
    }

    /// Row-major dense matrix. Intended for `n <= 13`.
    pub fn to_dense(&self) -> Vec<T> {
        let dim = self.dim();
        let mut a = vec![T::zero(); dim * dim];
        for sigma in 0..dim {
            a[sigma * dim + sigma] = self.diag[sigma];
            for i in 0..self.n {
                a[sigma * dim + (sigma ^ (1 << i))] = self.amp;
            }
        }
        a
    }
}

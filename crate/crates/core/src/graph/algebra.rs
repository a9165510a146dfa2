//! Exact integer matrix algebra: adjacency powers and characteristic polynomials.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::Graph;
use crate::error::{Error, Result};

/// Square matrix of 64-bit integers. Arithmetic is overflow-checked.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix { n, data: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: r.len() });
        }
        Ok(IntMatrix { n, data: rows.concat() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> i64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let n = self.n;
        let mut out = IntMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let prod = a.checked_mul(other.get(k, j)).ok_or(Error::Overflow("matrix product"))?;
                    let cell = &mut out.data[i * n + j];
                    *cell = cell.checked_add(prod).ok_or(Error::Overflow("matrix product"))?;
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `A^k` of the graph's adjacency matrix, `1 <= k <= 4`.
pub fn adjacency_power(g: &Graph, k: u32) -> Result<IntMatrix> {
    if !(1..=4).contains(&k) {
        return Err(Error::InvalidArgument(format!("adjacency power k={k} outside 1..=4")));
    }
    let a = g.adjacency();
    let mut p = a.clone();
    for _ in 1..k {
        p = p.checked_mul(&a)?;
    }
    Ok(p)
}

/// Dense univariate polynomial with arbitrary-precision integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IntPolynomial {
    #[serde(serialize_with = "ser_bigints")]
    coeffs: Vec<BigInt>,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for c in v {
        seq.serialize_element(&c.to_string())?;
    }
    seq.end()
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        let x = BigInt::from(x);
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * &x + c)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = d == 0 || !mag.is_one();
            match (show_mag, d) {
                (true, 0) => write!(f, "{mag}")?,
                (true, 1) => write!(f, "{mag}x")?,
                (true, _) => write!(f, "{mag}x^{d}")?,
                (false, 1) => write!(f, "x")?,
                (false, _) => write!(f, "x^{d}")?,
            }
        }
        Ok(())
    }
}

/// Characteristic polynomial `det(xI - M)` by the division-free Samuelson-Berkowitz recurrence.
///
/// All arithmetic is in arbitrary-precision integers, so two matrices are
/// cospectral exactly when the returned polynomials compare equal.
pub fn char_poly(m: &IntMatrix) -> IntPolynomial {
    let n = m.n();
    let big = |v: i64| BigInt::from(v);
    // Coefficients highest degree first, for the trailing principal submatrix.
    let mut p: Vec<BigInt> = vec![BigInt::one()];
    for k in (0..n).rev() {
        let rest: Vec<usize> = (k + 1..n).collect();
        let size = rest.len();
        // q = [1, -a, -R C, -R M C, ..., -R M^{size-1} C]
        let mut q = Vec::with_capacity(size + 2);
        q.push(BigInt::one());
        q.push(-big(m.get(k, k)));
        let mut v: Vec<BigInt> = rest.iter().map(|&i| big(m.get(i, k))).collect();
        for step in 0..size {
            let rc: BigInt = rest.iter().zip(&v).map(|(&j, vj)| big(m.get(k, j)) * vj).sum();
            q.push(-rc);
            if step + 1 < size {
                v = rest
                    .iter()
                    .map(|&i| rest.iter().zip(&v).map(|(&j, vj)| big(m.get(i, j)) * vj).sum())
                    .collect();
            }
        }
        let mut next = vec![BigInt::zero(); size + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, pj) in p.iter().enumerate().take(i + 1) {
                *slot += &q[i - j] * pj;
            }
        }
        p = next;
    }
    p.reverse();
    IntPolynomial::new(p)
}

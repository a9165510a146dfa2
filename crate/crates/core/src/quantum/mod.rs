//! Transverse-field and annealing Ising Hamiltonians on `2^n` spin states.
//!
//! Operators are matrix-free ([`QuantumOperator`]); spectra come from a dense
//! LAPACK path for `n <= 13` or from a restarted Lanczos solver for the lowest
//! few eigenvalues up to `n = 24`.

mod lanczos;
mod operator;
mod probe;
mod sweep;
mod tridiag;

pub use lanczos::{lowest_k_eigenvalues, LanczosOptions};
pub use operator::{ClassicalDiagonal, HamiltonianKind, QuantumOperator, QUANTUM_VERTEX_LIMIT};
pub use probe::{extremal_eigenvalues, quantum_cospectral_probe, ProbeMode, ProbeOptions, ProbePoint, ProbeReport, ProbeVerdict};
pub use sweep::{annealing_sweep, uniform_grid, ContinuityReport, SweepPoint, SweepTable};
pub use tridiag::{symmetric_eigen, tridiagonal_eigen};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest `n` accepted by [`full_spectrum_dense`].
pub const DENSE_VERTEX_LIMIT: usize = 13;

/// Couplings of `H_T` / `H_QA`. `s` and `beta` are only read by the
/// operations that need them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct IsingParams<T> {
    #[serde(rename = "J")]
    pub j: T,
    pub h: T,
    #[serde(rename = "Delta")]
    pub delta: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<T>,
}

impl<T: Scalar> IsingParams<T> {
    pub fn new(j: T, h: T, delta: T) -> Self {
        IsingParams { j, h, delta, s: None, beta: None }
    }

    pub fn unit() -> Self {
        Self::new(T::one(), T::one(), T::one())
    }

    pub fn with_s(mut self, s: T) -> Result<Self> {
        if !(s >= T::zero() && s <= T::one()) {
            return Err(Error::InvalidArgument(format!("schedule s = {s} outside [0, 1]")));
        }
        self.s = Some(s);
        Ok(self)
    }

    pub fn with_beta(mut self, beta: T) -> Result<Self> {
        if !(beta >= T::zero()) {
            return Err(Error::InvalidArgument(format!("beta must be >= 0, got {beta}")));
        }
        self.beta = Some(beta);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("J", self.j), ("h", self.h), ("Delta", self.delta)] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite")));
            }
        }
        if let Some(s) = self.s {
            self.with_s(s)?;
        }
        if let Some(b) = self.beta {
            self.with_beta(b)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Provenance {
    Dense,
    LanczosLowestK { k: usize },
}

/// Ascending eigenvalues with their origin. `residual` bounds `‖Hx − λx‖` for
/// every returned value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<T>,
    pub provenance: Provenance,
    pub residual: T,
}

impl<T: Scalar> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.provenance == Provenance::Dense
    }

    pub fn min(&self) -> Option<T> {
        self.eigenvalues.first().copied()
    }

    pub fn max(&self) -> Option<T> {
        self.eigenvalues.last().copied()
    }

    /// Ground energy and its multiplicity, counting eigenvalues within `tol` of the minimum.
    pub fn ground_state(&self, tol: T) -> Option<(T, usize)> {
        let e0 = self.min()?;
        Some((e0, self.eigenvalues.iter().take_while(|&&l| l - e0 <= tol).count()))
    }

    /// Largest absolute difference between two sorted spectra of equal length.
    pub fn max_abs_diff(&self, other: &Spectrum<T>) -> Result<T> {
        max_abs_diff(&self.eigenvalues, &other.eigenvalues)
    }
}

pub(crate) fn max_abs_diff<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(a.iter().zip(b).fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs())))
}

/// All `2^n` eigenvalues by dense symmetric diagonalization.
pub fn full_spectrum_dense<T: Scalar>(op: &QuantumOperator<T>) -> Result<Spectrum<T>> {
    if op.n() > DENSE_VERTEX_LIMIT {
        return Err(Error::TooLarge { what: "dense spectrum vertex count", got: op.n(), limit: DENSE_VERTEX_LIMIT });
    }
    let dim = op.dim();
    let eigenvalues = if op.is_diagonal() {
        let mut d = op.diagonal().to_vec();
        d.sort_by(|a, b| a.partial_cmp(b).expect("finite diagonal"));
        d
    } else {
        let mut a = op.to_dense();
        T::sym_eigvals(dim, &mut a)?
    };
    // Backward error of a stable dense solver.
    let residual = T::from_f64_lossy(64.0) * T::epsilon() * op.norm_bound() * T::from_usize(dim).unwrap().sqrt();
    Ok(Spectrum { eigenvalues, provenance: Provenance::Dense, residual })
}

/// `Z_T = Σ_i exp(−β λ_i)`; needs a complete spectrum.
pub fn quantum_partition_function<T: Scalar>(spec: &Spectrum<T>, beta: T) -> Result<T> {
    let (e0, shifted) = shifted_partition_function(spec, beta)?;
    let z = shifted * (-beta * e0).exp();
    if !z.is_finite() {
        return Err(Error::Overflow("quantum partition function"));
    }
    Ok(z)
}

/// `(E_0, Z_T e^{β E_0})`, which stays finite for large `β` and tends to the
/// ground-state multiplicity as `β → ∞`.
pub fn shifted_partition_function<T: Scalar>(spec: &Spectrum<T>, beta: T) -> Result<(T, T)> {
    if !spec.is_full() {
        return Err(Error::NeedsFullSpectrum);
    }
    if !(beta >= T::zero()) {
        return Err(Error::InvalidArgument(format!("beta must be >= 0, got {beta}")));
    }
    let e0 = spec.min().ok_or_else(|| Error::InvalidArgument("empty spectrum".into()))?;
    let sum = spec.eigenvalues.iter().map(|&l| (-beta * (l - e0)).exp()).sum();
    Ok((e0, sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{energy_magnetization_vectors, ObservableSet};
    use crate::graph::{fixture, parse_edge_list, Graph};

    fn k2() -> Graph {
        parse_edge_list("1,2", 2).unwrap()
    }

    /// Real roots of a monic cubic by bisection on sign changes.
    fn cubic_roots(c: [f64; 3]) -> Vec<f64> {
        let f = |x: f64| ((x + c[0]) * x + c[1]) * x + c[2];
        let mut roots = Vec::new();
        let mut prev = -50.0;
        let step = 1e-3;
        let mut x = prev + step;
        while x <= 50.0 {
            if f(prev).signum() != f(x).signum() {
                let (mut lo, mut hi) = (prev, x);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(lo).signum() == f(mid).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev = x;
            x += step;
        }
        roots
    }

    #[test]
    fn k2_full_spectrum() {
        let op = QuantumOperator::transverse(&k2(), &IsingParams::unit()).unwrap();
        let spec = full_spectrum_dense(&op).unwrap();
        let mut expect = cubic_roots([-1.0, -9.0, 1.0]);
        expect.push(-1.0);
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(spec.len(), 4);
        assert!(spec.max_abs_diff(&Spectrum { eigenvalues: expect, provenance: Provenance::Dense, residual: 0.0 }).unwrap() < 1e-12);
        assert!((spec.min().unwrap() + 2.6040).abs() < 5e-4);

        let z = quantum_partition_function(&spec, 1.0).unwrap();
        let direct: f64 = spec.eigenvalues.iter().map(|l| (-l).exp()).sum();
        assert!((z - direct).abs() < 1e-12 * direct);
        assert_eq!(quantum_partition_function(&spec, 0.0).unwrap(), 4.0);
    }

    #[test]
    fn classical_limit_is_sorted_diagonal() {
        let g = fixture("G3").unwrap();
        let op = QuantumOperator::transverse(&g, &IsingParams::new(1.0, 1.0, 0.0)).unwrap();
        let spec = full_spectrum_dense(&op).unwrap();
        let p = crate::classical::signature_polynomial(&g, &ObservableSet::energy_magnetization()).unwrap();
        let classical: Vec<f64> = p.linear_spectrum(&[1, 1]).expanded().into_iter().map(|x| x as f64).collect();
        assert_eq!(spec.eigenvalues, classical);
    }

    #[test]
    fn trace_identities() {
        let g = fixture("G4").unwrap();
        let (j, h, d) = (0.7, -1.3, 0.9);
        let op = QuantumOperator::transverse(&g, &IsingParams::new(j, h, d)).unwrap();
        let spec = full_spectrum_dense(&op).unwrap();
        let n = g.n() as f64;
        let sum: f64 = spec.eigenvalues.iter().sum();
        let sq: f64 = spec.eigenvalues.iter().map(|l| l * l).sum();
        let expect = 16.0 * (j * j * g.edge_count() as f64 + h * h * n + d * d * n);
        assert!(sum.abs() < 1e-9 * 16.0);
        assert!((sq - expect).abs() < 1e-8 * expect);
    }

    #[test]
    fn ground_multiplicity_asymptote() {
        // Δ = 0 with J = 1, h = 0 on a 4-cycle: two Néel ground states at e = −4.
        let c4 = parse_edge_list("1,2; 2,3; 3,4; 4,1", 4).unwrap();
        let op = QuantumOperator::transverse(&c4, &IsingParams::new(1.0, 0.0, 0.0)).unwrap();
        let spec = full_spectrum_dense(&op).unwrap();
        assert_eq!(spec.ground_state(1e-9), Some((-4.0, 2)));
        let (e0, w): (f64, f64) = shifted_partition_function(&spec, 50.0).unwrap();
        assert_eq!(e0, -4.0);
        assert!((w - 2.0).abs() < 1e-12);
        assert!(matches!(quantum_partition_function(&spec, 1e4), Err(Error::Overflow(_))));
    }

    #[test]
    fn partition_refuses_partial_spectrum() {
        let spec = Spectrum { eigenvalues: vec![-1.0f64], provenance: Provenance::LanczosLowestK { k: 1 }, residual: 1e-10 };
        assert!(matches!(quantum_partition_function(&spec, 1.0), Err(Error::NeedsFullSpectrum)));
    }

    #[test]
    fn dense_size_limit() {
        let g = Graph::empty(14).unwrap();
        let op = QuantumOperator::transverse(&g, &IsingParams::new(0.0, 1.0, 1.0)).unwrap();
        assert!(matches!(full_spectrum_dense(&op), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn f32_dense_matches_f64() {
        let g = fixture("G1").unwrap();
        let s64 = full_spectrum_dense(&QuantumOperator::<f64>::transverse(&g, &IsingParams::unit()).unwrap()).unwrap();
        let s32 = full_spectrum_dense(&QuantumOperator::<f32>::transverse(&g, &IsingParams::unit()).unwrap()).unwrap();
        for (a, b) in s64.eigenvalues.iter().zip(&s32.eigenvalues) {
            assert!((a - *b as f64).abs() < 1e-3);
        }
    }

    #[test]
    fn params_serde_and_validation() {
        let p = IsingParams::new(1.0f64, 0.5, 2.0).with_s(0.25).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"J":1.0,"h":0.5,"Delta":2.0,"s":0.25}"#);
        let back: IsingParams<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(IsingParams::new(1.0f64, 1.0, 1.0).with_s(-0.1).is_err());
        assert!(IsingParams::new(1.0f64, 1.0, 1.0).with_beta(-1.0).is_err());
        assert!(IsingParams::new(f64::NAN, 1.0, 1.0).validate().is_err());
    }

    #[test]
    fn diagonal_matches_energy_vectors() {
        let g = fixture("G13").unwrap();
        let (e, m) = energy_magnetization_vectors(&g).unwrap();
        let op = QuantumOperator::transverse(&g, &IsingParams::new(2.0, -1.0, 1.0)).unwrap();
        for s in (0..e.len()).step_by(97) {
            assert_eq!(op.diagonal()[s], 2.0 * e[s] as f64 - m[s] as f64);
        }
    }
}

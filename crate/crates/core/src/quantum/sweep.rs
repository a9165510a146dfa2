use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{lowest_k_eigenvalues, ClassicalDiagonal, IsingParams, LanczosOptions};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Dimension up to which grid points are solved concurrently.
const PAR_POINT_DIM: usize = 1 << 16;

/// `points` evenly spaced values from 0 to 1 inclusive.
pub fn uniform_grid<T: Scalar>(points: usize) -> Result<Vec<T>> {
    if points < 2 {
        return Err(Error::InvalidArgument(format!("grid needs at least 2 points, got {points}")));
    }
    let last = T::from_usize(points - 1).unwrap();
    Ok((0..points).map(|i| if i == points - 1 { T::one() } else { T::from_usize(i).unwrap() / last }).collect())
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SweepPoint<T> {
    pub s: T,
    pub lambda_min: Option<T>,
    /// `λ_i − λ_min` for `i = 1..=k`; empty when the solver failed.
    pub shifted: Vec<T>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SweepTable<T> {
    pub params: IsingParams<T>,
    pub k: usize,
    pub n: usize,
    /// `‖H_L(J, h)‖ = max_σ |J e_σ + h m_σ|`.
    pub longitudinal_norm: T,
    pub solver_tol: T,
    pub points: Vec<SweepPoint<T>>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ContinuityReport<T> {
    pub ok: bool,
    /// Largest `|Δ(λ_i − λ_min)| / bound` over adjacent grid points.
    pub worst_ratio: T,
    pub worst_interval: Option<(T, T)>,
    pub worst_index: Option<usize>,
}

impl<T: Scalar> SweepTable<T> {
    pub fn failures(&self) -> Vec<(T, &str)> {
        self.points.iter().filter_map(|p| p.error.as_deref().map(|e| (p.s, e))).collect()
    }

    /// CSV with header `s,index,lambda_shifted`; `index` is 1-based and
    /// `index = 1` is the ground state (always 0). Failed points emit no rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,index,lambda_shifted\n");
        for p in &self.points {
            for (i, v) in p.shifted.iter().enumerate() {
                writeln!(out, "{},{},{}", p.s, i + 1, v).unwrap();
            }
        }
        out
    }

    /// Checks every curve against the Weyl bound: between grid points each
    /// eigenvalue moves by at most `|Δs| (‖H_L‖ + |Δ| n)`, so a shifted one
    /// by at most twice that, plus solver error.
    pub fn check_continuity(&self) -> ContinuityReport<T> {
        let two = T::from_f64_lossy(2.0);
        let per_s = self.longitudinal_norm + self.params.delta.abs() * T::from_usize(self.n).unwrap();
        let mut report = ContinuityReport { ok: true, worst_ratio: T::zero(), worst_interval: None, worst_index: None };
        for w in self.points.windows(2) {
            if w[0].shifted.is_empty() || w[1].shifted.is_empty() {
                continue;
            }
            let bound = two * (w[1].s - w[0].s).abs() * per_s + T::from_f64_lossy(4.0) * self.solver_tol;
            for (i, (a, b)) in w[0].shifted.iter().zip(&w[1].shifted).enumerate() {
                let ratio = if bound > T::zero() { (*a - *b).abs() / bound } else { T::zero() };
                if ratio > report.worst_ratio {
                    report.worst_ratio = ratio;
                    report.worst_interval = Some((w[0].s, w[1].s));
                    report.worst_index = Some(i + 1);
                }
            }
        }
        report.ok = report.worst_ratio <= T::one();
        report
    }
}

/// The `k` lowest eigenvalues of `H_QA(g, J, h, Δ, s)` for every `s` in
/// `s_grid`, shifted by the ground energy. Solver failures are recorded per
/// point rather than aborting the sweep.
pub fn annealing_sweep<T: Scalar>(
    g: &Graph,
    params: &IsingParams<T>,
    s_grid: &[T],
    k: usize,
    opts: &LanczosOptions<T>,
) -> Result<SweepTable<T>> {
    params.validate()?;
    if s_grid.is_empty() {
        return Err(Error::InvalidArgument("empty schedule grid".into()));
    }
    if let Some(bad) = s_grid.iter().find(|s| !(**s >= T::zero() && **s <= T::one())) {
        return Err(Error::InvalidArgument(format!("schedule s = {bad} outside [0, 1]")));
    }
    let cd = ClassicalDiagonal::new(g)?;
    let dim = 1usize << g.n();
    if k == 0 || k > dim {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={dim}")));
    }
    let longitudinal_norm = cd.transverse(&IsingParams::new(params.j, params.h, T::zero())).norm_bound();

    let solve = |&s: &T| -> SweepPoint<T> {
        let result = cd.annealing(params, s).and_then(|op| lowest_k_eigenvalues(&op, k, opts));
        match result {
            Ok(spec) => {
                let l0 = spec.eigenvalues[0];
                SweepPoint { s, lambda_min: Some(l0), shifted: spec.eigenvalues.iter().map(|&l| l - l0).collect(), error: None }
            }
            Err(e) => SweepPoint { s, lambda_min: None, shifted: Vec::new(), error: Some(e.to_string()) },
        }
    };
    let points = if dim <= PAR_POINT_DIM { s_grid.par_iter().map(solve).collect() } else { s_grid.iter().map(solve).collect() };
    Ok(SweepTable { params: *params, k, n: g.n(), longitudinal_norm, solver_tol: opts.tol, points })
}

use serde::Serialize;

use super::{full_spectrum_dense, lowest_k_eigenvalues, max_abs_diff, IsingParams, LanczosOptions, QuantumOperator, DENSE_VERTEX_LIMIT};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeMode {
    /// Full spectra when `n <= 13`, extremal eigenvalues otherwise.
    Auto,
    Full,
    /// Smallest and largest eigenvalue only.
    Extremal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProbeVerdict {
    #[serde(rename = "distinguished")]
    Distinguished,
    #[serde(rename = "not distinguished on grid")]
    NotDistinguishedOnGrid,
}

impl std::fmt::Display for ProbeVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProbeVerdict::Distinguished => "distinguished",
            ProbeVerdict::NotDistinguishedOnGrid => "not distinguished on grid",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ProbeOptions<T> {
    /// Differences above this count as distinguishing; must be at least ten
    /// times the solver residual.
    pub tol: T,
    pub solver_tol: T,
    pub mode: ProbeMode,
    pub seed: u64,
}

impl<T: Scalar> Default for ProbeOptions<T> {
    fn default() -> Self {
        ProbeOptions { tol: T::from_f64_lossy(1e-8), solver_tol: T::from_f64_lossy(1e-10), mode: ProbeMode::Auto, seed: 0x5eed }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ProbePoint<T> {
    pub params: IsingParams<T>,
    pub max_abs_diff: T,
    pub verdict: ProbeVerdict,
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ProbeReport<T> {
    pub mode: ProbeMode,
    pub tol: T,
    pub solver_tol: T,
    pub points: Vec<ProbePoint<T>>,
    pub verdict: ProbeVerdict,
}

/// `(λ_min, λ_max)` via two lowest-eigenvalue solves on `H` and `−H`.
pub fn extremal_eigenvalues<T: Scalar>(op: &QuantumOperator<T>, opts: &LanczosOptions<T>) -> Result<(T, T)> {
    let lo = lowest_k_eigenvalues(op, 1, opts)?.eigenvalues[0];
    let hi = -lowest_k_eigenvalues(&op.negated(), 1, opts)?.eigenvalues[0];
    Ok((lo, hi))
}

/// Compares the `H_T` spectra of two graphs at each grid point. A pair is
/// "distinguished" as soon as one point differs by more than `tol`; the
/// opposite verdict only speaks for the grid.
pub fn quantum_cospectral_probe<T: Scalar>(
    g1: &Graph,
    g2: &Graph,
    grid: &[IsingParams<T>],
    opts: &ProbeOptions<T>,
) -> Result<ProbeReport<T>> {
    if g1.n() != g2.n() {
        return Err(Error::InvalidArgument(format!("graphs have {} and {} vertices", g1.n(), g2.n())));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty parameter grid".into()));
    }
    let ten = T::from_f64_lossy(10.0);
    if !(opts.tol >= ten * opts.solver_tol) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {} must be at least 10x the solver residual {}",
            opts.tol, opts.solver_tol
        )));
    }
    let mode = match opts.mode {
        ProbeMode::Auto if g1.n() <= DENSE_VERTEX_LIMIT => ProbeMode::Full,
        ProbeMode::Auto => ProbeMode::Extremal,
        m => m,
    };
    let lanczos = LanczosOptions { tol: opts.solver_tol, seed: opts.seed, ..LanczosOptions::default() };
    let mut points = Vec::with_capacity(grid.len());
    for p in grid {
        p.validate()?;
        let op1 = QuantumOperator::transverse(g1, p)?;
        let op2 = QuantumOperator::transverse(g2, p)?;
        let diff = match mode {
            ProbeMode::Full => {
                let s1 = full_spectrum_dense(&op1)?;
                let s2 = full_spectrum_dense(&op2)?;
                let residual = s1.residual.max(s2.residual);
                if !(opts.tol >= ten * residual) {
                    return Err(Error::InvalidArgument(format!(
                        "tolerance {} must be at least 10x the dense residual {residual}",
                        opts.tol
                    )));
                }
                max_abs_diff(&s1.eigenvalues, &s2.eigenvalues)?
            }
            _ => {
                let (a0, a1) = extremal_eigenvalues(&op1, &lanczos)?;
                let (b0, b1) = extremal_eigenvalues(&op2, &lanczos)?;
                (a0 - b0).abs().max((a1 - b1).abs())
            }
        };
        let verdict = if diff > opts.tol { ProbeVerdict::Distinguished } else { ProbeVerdict::NotDistinguishedOnGrid };
        points.push(ProbePoint { params: *p, max_abs_diff: diff, verdict });
    }
    let verdict = if points.iter().any(|p| p.verdict == ProbeVerdict::Distinguished) {
        ProbeVerdict::Distinguished
    } else {
        ProbeVerdict::NotDistinguishedOnGrid
    };
    Ok(ProbeReport { mode, tol: opts.tol, solver_tol: opts.solver_tol, points, verdict })
}

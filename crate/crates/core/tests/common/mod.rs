//! Shared helpers for the integration targets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use cospec::classical::{signature_polynomial, ObservableSet};
use cospec::graph::{are_isomorphic, Graph};
use cospec::quantum::{full_spectrum_dense, QuantumOperator};
use cospec::scan::{ScanLevel, ScanResult};

/// Equal-invariant pairs by brute force over all pairs, with the isomorphism
/// verdict. Quantum levels use dense spectra regardless of the scan mode.
pub fn all_pairs_oracle(gs: &[Graph], level: &ScanLevel, tol: f64) -> BTreeSet<(usize, usize, bool)> {
    let em = ObservableSet::energy_magnetization();
    let key = |g: &Graph| -> Vec<f64> {
        match level {
            ScanLevel::QuantumExtremal { params } | ScanLevel::QuantumFull { params } => {
                let s = full_spectrum_dense(&QuantumOperator::transverse(g, params).unwrap()).unwrap().eigenvalues;
                if matches!(level, ScanLevel::QuantumExtremal { .. }) {
                    vec![s[0], s[s.len() - 1]]
                } else {
                    s
                }
            }
            _ => Vec::new(),
        }
    };
    let quantum: Vec<Vec<f64>> = gs.iter().map(key).collect();
    let mut out = BTreeSet::new();
    for i in 0..gs.len() {
        for j in i + 1..gs.len() {
            let (a, b) = (&gs[i], &gs[j]);
            if a.n() != b.n() {
                continue;
            }
            let equal = match level {
                ScanLevel::EnergyMarginal => {
                    signature_polynomial(a, &em).unwrap().energy_spectrum() == signature_polynomial(b, &em).unwrap().energy_spectrum()
                }
                ScanLevel::Bivariate => signature_polynomial(a, &em).unwrap() == signature_polynomial(b, &em).unwrap(),
                ScanLevel::Multivariate { observables } => {
                    signature_polynomial(a, observables).unwrap() == signature_polynomial(b, observables).unwrap()
                }
                _ => quantum[i].iter().zip(&quantum[j]).all(|(x, y)| (x - y).abs() <= tol),
            };
            if equal {
                out.insert((i, j, are_isomorphic(a, b).unwrap()));
            }
        }
    }
    out
}

pub fn scan_equal_pairs(r: &ScanResult) -> BTreeSet<(usize, usize, bool)> {
    r.pairs
        .iter()
        .filter(|p| p.equal_invariant)
        .map(|p| (p.first, p.second, p.isomorphic.expect("small graphs are always filtered")))
        .collect()
}

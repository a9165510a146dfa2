//! Exact classical Ising invariants by exhaustive state enumeration.

mod observables;
mod polynomial;

pub use observables::{spin, state_observables, Observable, ObservableSet};
pub(crate) use observables::CompiledObservables;
pub use polynomial::{
    energy_magnetization_vectors, signature_polynomial, IntSpectrum, SignaturePolynomial, Term, ENUM_VERTEX_LIMIT,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{are_isomorphic, char_poly, Graph, ISO_VERTEX_LIMIT};
use crate::scalar::Scalar;

/// Integer `(J, h)` points at which the longitudinal spectra are compared
/// besides the full polynomial test.
pub const SAMPLED_COUPLINGS: &[(i64, i64)] = &[(1, 1), (1, 2), (2, 1), (1, -1), (2, 3), (3, -2), (1, 3)];

/// `Σ_terms count · exp(−β (J e + h m))`.
///
/// At `h = 0` this is the trace of `exp(−β J H(G))`. Returns
/// [`Error::Overflow`] rather than infinity when the sum leaves the scalar's range.
pub fn partition_function<T: Scalar>(p: &SignaturePolynomial, beta: T, j: T, h: T) -> Result<T> {
    if beta < T::zero() || beta.is_nan() {
        return Err(Error::InvalidArgument(format!("beta must be >= 0, got {beta}")));
    }
    if p.arity() < 2 {
        return Err(Error::InvalidArgument("partition function needs (e, m) terms".into()));
    }
    let mut z = T::zero();
    for (k, &c) in p.terms() {
        let energy = j * T::from_i64(k[0]).unwrap() + h * T::from_i64(k[1]).unwrap();
        z = z + T::from_u64(c).unwrap() * (-beta * energy).exp();
    }
    if !z.is_finite() {
        return Err(Error::Overflow("partition function"));
    }
    Ok(z)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampledEquality {
    pub j: i64,
    pub h: i64,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaEquality {
    pub k: u32,
    pub equal: bool,
}

/// Which classical invariants two graphs share.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub n: (usize, usize),
    pub edges: (usize, usize),
    /// Exact adjacency characteristic polynomials agree.
    pub adjacency_cospectral: bool,
    /// Energy multisets agree (for every J, since energies scale linearly).
    pub co_ising: bool,
    /// Bivariate `(e, m)` polynomials agree: equal `H_L` spectra for every `(J, h)`.
    pub longitudinal_co_ising: bool,
    /// `H_L` spectra agree at `J = h = 1`.
    pub longitudinal_unit_equal: bool,
    pub longitudinal_sampled: Vec<SampledEquality>,
    /// Requested observable set, e.g. `["e","m","omega2"]`.
    pub observables: Vec<String>,
    /// Full polynomials over the requested observables agree; `None` when only `(e, m)` was requested.
    pub multivariate_equal: Option<bool>,
    pub multivariate_by_order: Vec<OmegaEquality>,
    /// Isomorphism verdict, `None` above the oracle's size limit.
    pub isomorphic: Option<bool>,
}

/// Compares two graphs on every classical invariant level.
pub fn compare_invariants(g1: &Graph, g2: &Graph, obs: &ObservableSet) -> Result<InvariantReport> {
    let p1 = signature_polynomial(g1, obs)?;
    let p2 = signature_polynomial(g2, obs)?;
    let bi1 = p1.marginal(2)?;
    let bi2 = p2.marginal(2)?;
    let same_n = g1.n() == g2.n();
    let longitudinal_sampled = SAMPLED_COUPLINGS
        .iter()
        .map(|&(j, h)| SampledEquality { j, h, equal: bi1.linear_spectrum(&[j, h]) == bi2.linear_spectrum(&[j, h]) })
        .collect();
    let multivariate_by_order = obs
        .omega_orders()
        .into_iter()
        .map(|k| -> Result<OmegaEquality> { Ok(OmegaEquality { k, equal: p1.select_omega(k)? == p2.select_omega(k)? }) })
        .collect::<Result<Vec<_>>>()?;
    let isomorphic = if g1.n().max(g2.n()) <= ISO_VERTEX_LIMIT { Some(are_isomorphic(g1, g2)?) } else { None };
    Ok(InvariantReport {
        n: (g1.n(), g2.n()),
        edges: (g1.edge_count(), g2.edge_count()),
        adjacency_cospectral: same_n && char_poly(&g1.adjacency()) == char_poly(&g2.adjacency()),
        co_ising: same_n && bi1.energy_spectrum() == bi2.energy_spectrum(),
        longitudinal_co_ising: same_n && bi1.terms() == bi2.terms(),
        longitudinal_unit_equal: same_n && bi1.linear_spectrum(&[1, 1]) == bi2.linear_spectrum(&[1, 1]),
        longitudinal_sampled,
        observables: obs.labels(),
        multivariate_equal: (obs.arity() > 2).then(|| same_n && p1.terms() == p2.terms()),
        multivariate_by_order,
        isomorphic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fixture, parse_edge_list};
    use proptest::prelude::*;

    #[test]
    fn k2_partition_function() {
        let k2 = parse_edge_list("1,2", 2).unwrap();
        let p = signature_polynomial(&k2, &ObservableSet::energy_magnetization()).unwrap();
        assert_eq!(partition_function(&p, 0.0, 1.3, -0.7).unwrap(), 4.0);
        let z: f64 = partition_function(&p, 1.0, 1.0, 0.0).unwrap();
        let closed = 2.0 * (-1f64).exp() + 2.0 * 1f64.exp();
        assert!((z - closed).abs() < 1e-14);
        assert!((z - 6.1723).abs() < 1e-4);
        let z32: f32 = partition_function(&p, 1.0, 1.0, 0.0).unwrap();
        assert!((z32 as f64 - closed).abs() < 1e-5);
        assert!(matches!(partition_function(&p, 1e6, -1.0, 0.0), Err(Error::Overflow(_))));
        assert!(partition_function(&p, -1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn beta_zero_counts_states() {
        let g = fixture("G13").unwrap();
        let p = signature_polynomial(&g, &ObservableSet::energy_magnetization()).unwrap();
        assert_eq!(partition_function(&p, 0.0, 1.0, 1.0).unwrap(), 8192.0);
    }

    #[test]
    fn unit_coupling_identity_with_energy_only_form() {
        // Z(G; e^{-Jβ}, 1) == Σ_σ exp(-βJ e_σ)
        let g = fixture("G1").unwrap();
        let p = signature_polynomial(&g, &ObservableSet::energy_magnetization()).unwrap();
        let (beta, j) = (0.37f64, 1.1);
        let x = (-j * beta).exp();
        let via_poly: f64 = p.terms().iter().map(|(k, &c)| c as f64 * x.powi(k[0] as i32)).sum();
        let z: f64 = partition_function(&p, beta, j, 0.0).unwrap();
        assert!((via_poly - z).abs() < 1e-12 * z);
    }

    #[test]
    fn fixture_pair_reports() {
        let em = ObservableSet::energy_magnetization();
        let r = compare_invariants(&fixture("G3").unwrap(), &fixture("G4").unwrap(), &em).unwrap();
        assert!(r.co_ising && !r.longitudinal_co_ising);
        assert_eq!(r.isomorphic, Some(false));
        assert_eq!(r.multivariate_equal, None);

        let r = compare_invariants(&fixture("G1").unwrap(), &fixture("G2").unwrap(), &em).unwrap();
        assert!(!r.co_ising);
        assert!(r.longitudinal_unit_equal);
        assert!(!r.longitudinal_co_ising);
        assert!(r.longitudinal_sampled.iter().any(|s| !s.equal));

        let tri = ObservableSet::with_omegas(&[2]).unwrap();
        let r = compare_invariants(&fixture("G13").unwrap(), &fixture("G13p").unwrap(), &tri).unwrap();
        assert!(r.adjacency_cospectral && r.co_ising && r.longitudinal_co_ising);
        assert!(r.longitudinal_sampled.iter().all(|s| s.equal));
        assert_eq!(r.multivariate_equal, Some(false));
        assert_eq!(r.multivariate_by_order, vec![OmegaEquality { k: 2, equal: false }]);
        assert_eq!(r.isomorphic, Some(false));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn h0_partition_matches_direct_sum(n in 2usize..=10, bits in proptest::collection::vec(prop::bool::weighted(0.4), 45), beta in 0.0f64..3.0, j in -2.0f64..2.0) {
            let mut g = Graph::empty(n).unwrap();
            let mut k = 0;
            for b in 1..n { for a in 0..b { if bits[k] { g.add_edge(a, b).unwrap(); } k += 1; } }
            let p = signature_polynomial(&g, &ObservableSet::energy_magnetization()).unwrap();
            let z: f64 = partition_function(&p, beta, j, 0.0).unwrap();
            let direct: f64 = (0..1u64 << n)
                .map(|s| (-beta * j * state_observables(&g, s, &ObservableSet::energy_magnetization()).unwrap()[0] as f64).exp())
                .sum();
            prop_assert!((z - direct).abs() <= 1e-12 * direct);
        }
    }
}

//! Signature polynomials: state counts per observable tuple over all `2^n` spin states.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::observables::{CompiledObservables, ObservableSet};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest `n` accepted by the exhaustive enumeration.
pub const ENUM_VERTEX_LIMIT: usize = 28;

/// Above this many cells per worker the counts go to a hash map instead of a dense box.
const DENSE_CELL_LIMIT: usize = 1 << 22;

/// Sparse multivariate polynomial `Σ_σ Π_k z_k^{o_k(σ)}` with integer exponents,
/// stored as exponent tuple → number of states.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignaturePolynomial {
    observables: ObservableSet,
    n: usize,
    edge_count: usize,
    terms: BTreeMap<Vec<i64>, u64>,
}

/// One entry of the canonical serialized form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub exps: Vec<i64>,
    pub count: u64,
}

impl SignaturePolynomial {
    pub fn from_terms(
        observables: ObservableSet,
        n: usize,
        edge_count: usize,
        terms: BTreeMap<Vec<i64>, u64>,
    ) -> Result<Self> {
        if let Some(k) = terms.keys().find(|k| k.len() != observables.arity()) {
            return Err(Error::ArityMismatch(observables.arity(), k.len()));
        }
        Ok(SignaturePolynomial { observables, n, edge_count, terms })
    }

    pub fn observables(&self) -> &ObservableSet {
        &self.observables
    }

    pub fn arity(&self) -> usize {
        self.observables.arity()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, u64> {
        &self.terms
    }

    pub fn coefficient(&self, exps: &[i64]) -> u64 {
        self.terms.get(exps).copied().unwrap_or(0)
    }

    /// Total number of states counted.
    pub fn total(&self) -> u64 {
        self.terms.values().sum()
    }

    /// Sums counts with the same exponents. Associative and commutative.
    pub fn merge(&mut self, other: &SignaturePolynomial) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch(self.arity(), other.arity()));
        }
        for (k, c) in &other.terms {
            *self.terms.entry(k.clone()).or_insert(0) += c;
        }
        Ok(())
    }

    /// Keeps the listed leading observables only. `keep` must be a prefix length ≥ 1.
    pub fn marginal(&self, keep: usize) -> Result<SignaturePolynomial> {
        if keep == 0 || keep > self.arity() {
            return Err(Error::InvalidArgument(format!("marginal over {keep} of {} observables", self.arity())));
        }
        let obs = ObservableSet::from_list(self.observables.as_slice()[..keep].to_vec())?;
        if obs.arity() != keep {
            return Err(Error::InvalidArgument("marginal must keep energy and magnetization".into()));
        }
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            *terms.entry(k[..keep].to_vec()).or_insert(0) += c;
        }
        Ok(SignaturePolynomial { observables: obs, n: self.n, edge_count: self.edge_count, terms })
    }

    /// Drops every Ω observable except `Ω^k`, giving the `(e, m, Ω^k)` polynomial.
    pub fn select_omega(&self, k: u32) -> Result<SignaturePolynomial> {
        use super::observables::Observable;
        let pos = self
            .observables
            .as_slice()
            .iter()
            .position(|o| *o == Observable::Omega(k))
            .ok_or_else(|| Error::InvalidArgument(format!("polynomial has no omega{k} observable")))?;
        let mut terms = BTreeMap::new();
        for (key, c) in &self.terms {
            *terms.entry(vec![key[0], key[1], key[pos]]).or_insert(0) += c;
        }
        Ok(SignaturePolynomial {
            observables: ObservableSet::with_omegas(&[k])?,
            n: self.n,
            edge_count: self.edge_count,
            terms,
        })
    }

    /// Multiset of the first observable (energy at unit coupling).
    pub fn energy_spectrum(&self) -> IntSpectrum {
        self.linear_spectrum(&[1])
    }

    /// Multiset of `Σ_k c_k o_k` over all states, e.g. `[J, h]` gives the
    /// spectrum of `J·H + h·M` for integer couplings.
    pub fn linear_spectrum(&self, coeffs: &[i64]) -> IntSpectrum {
        let mut levels = BTreeMap::new();
        for (k, c) in &self.terms {
            let v: i64 = k.iter().zip(coeffs).map(|(x, a)| x * a).sum();
            *levels.entry(v).or_insert(0) += c;
        }
        IntSpectrum { levels }
    }

    /// Canonical serialized form: terms in ascending lexicographic exponent order.
    pub fn canonical_terms(&self) -> Vec<Term> {
        self.terms.iter().map(|(k, c)| Term { exps: k.clone(), count: *c }).collect()
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(&self.canonical_terms()).expect("terms serialize")
    }
}

/// Integer eigenvalue multiset as value → multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntSpectrum {
    pub levels: BTreeMap<i64, u64>,
}

impl IntSpectrum {
    pub fn total(&self) -> u64 {
        self.levels.values().sum()
    }

    /// All values in ascending order, repeated by multiplicity.
    pub fn expanded(&self) -> Vec<i64> {
        self.levels.iter().flat_map(|(&v, &c)| std::iter::repeat_n(v, c as usize)).collect()
    }

    pub fn min(&self) -> Option<i64> {
        self.levels.keys().next().copied()
    }
}

/// Counts all `2^n` states by observable tuple using a reflected Gray code.
///
/// Each step flips one spin (the ruler sequence) and updates every observable
/// in O(deg) time. The state space is split into contiguous Gray-code
/// segments that are counted independently and merged.
pub fn signature_polynomial(g: &Graph, obs: &ObservableSet) -> Result<SignaturePolynomial> {
    let n = g.n();
    if n > ENUM_VERTEX_LIMIT {
        return Err(Error::TooLarge { what: "enumeration vertex count", got: n, limit: ENUM_VERTEX_LIMIT });
    }
    let compiled = CompiledObservables::new(g, obs)?;
    let ranges = compiled.ranges();
    let total: u64 = 1 << n;

    let segments = segment_count(n);
    let seg_len = total / segments;
    let cells: usize = ranges.iter().map(|(lo, hi)| (hi - lo + 1) as usize).try_fold(1usize, |a, b| a.checked_mul(b)).unwrap_or(usize::MAX);
    let dense = cells.saturating_mul(segments.min(rayon::current_num_threads() as u64) as usize) <= DENSE_CELL_LIMIT * 4
        && cells <= DENSE_CELL_LIMIT;

    let partials: Vec<BTreeMap<Vec<i64>, u64>> = (0..segments)
        .into_par_iter()
        .map(|s| {
            let (start, end) = (s * seg_len, (s + 1) * seg_len);
            if dense {
                count_dense(&compiled, &ranges, cells, start, end)
            } else {
                count_sparse(&compiled, start, end)
            }
        })
        .collect();

    let mut terms = BTreeMap::new();
    for p in partials {
        for (k, c) in p {
            *terms.entry(k).or_insert(0) += c;
        }
    }
    Ok(SignaturePolynomial { observables: obs.clone(), n, edge_count: g.edge_count(), terms })
}

fn segment_count(n: usize) -> u64 {
    if n <= 14 {
        return 1;
    }
    let threads = rayon::current_num_threads().next_power_of_two() as u64;
    (threads * 4).min(1 << (n - 12))
}

#[inline]
fn gray(t: u64) -> u32 {
    (t ^ (t >> 1)) as u32
}

fn walk(compiled: &CompiledObservables, start: u64, end: u64, mut visit: impl FnMut(&[i64])) {
    let mut values = vec![0i64; compiled.arity()];
    let mut sigma = gray(start);
    compiled.evaluate(sigma, &mut values);
    visit(&values);
    for t in start + 1..end {
        let bit = t.trailing_zeros() as usize;
        compiled.flip(sigma, bit, &mut values);
        sigma ^= 1 << bit;
        visit(&values);
    }
}

fn count_dense(
    compiled: &CompiledObservables,
    ranges: &[(i64, i64)],
    cells: usize,
    start: u64,
    end: u64,
) -> BTreeMap<Vec<i64>, u64> {
    let mut strides = vec![0usize; ranges.len()];
    let mut acc = 1usize;
    for (k, (lo, hi)) in ranges.iter().enumerate().rev() {
        strides[k] = acc;
        acc *= (hi - lo + 1) as usize;
    }
    let lows: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut counts = vec![0u64; cells];
    walk(compiled, start, end, |v| {
        let idx: usize = v.iter().zip(&lows).zip(&strides).map(|((x, lo), st)| (x - lo) as usize * st).sum();
        counts[idx] += 1;
    });
    let mut out = BTreeMap::new();
    for (idx, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let key: Vec<i64> = strides
            .iter()
            .zip(ranges)
            .map(|(st, r)| r.0 + ((idx / st) % ((r.1 - r.0 + 1) as usize)) as i64)
            .collect();
        out.insert(key, c);
    }
    out
}

fn count_sparse(compiled: &CompiledObservables, start: u64, end: u64) -> BTreeMap<Vec<i64>, u64> {
    let mut map: HashMap<Vec<i64>, u64> = HashMap::new();
    walk(compiled, start, end, |v| {
        if let Some(c) = map.get_mut(v) {
            *c += 1;
        } else {
            map.insert(v.to_vec(), 1);
        }
    });
    map.into_iter().collect()
}

/// Energy and magnetization of every state, indexed by `σ`.
pub fn energy_magnetization_vectors(g: &Graph) -> Result<(Vec<i32>, Vec<i32>)> {
    let n = g.n();
    if n > ENUM_VERTEX_LIMIT {
        return Err(Error::TooLarge { what: "enumeration vertex count", got: n, limit: ENUM_VERTEX_LIMIT });
    }
    let upper: Vec<u32> = (0..n).map(|i| g.neighbor_mask(i) & !((2u64 << i) - 1) as u32).collect();
    let edges = g.edge_count() as i32;
    let dim = 1usize << n;
    let mut e = vec![0i32; dim];
    let mut m = vec![0i32; dim];
    e.par_iter_mut().zip(m.par_iter_mut()).enumerate().for_each(|(sigma, (es, ms))| {
        let sigma = sigma as u32;
        let mut unsatisfied = 0u32;
        for (i, &mask) in upper.iter().enumerate() {
            let flip = 0u32.wrapping_sub(sigma >> i & 1);
            unsatisfied += ((sigma ^ flip) & mask).count_ones();
        }
        *es = edges - 2 * unsatisfied as i32;
        *ms = n as i32 - 2 * sigma.count_ones() as i32;
    });
    Ok((e, m))
}

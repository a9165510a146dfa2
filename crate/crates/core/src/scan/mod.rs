//! Family scans for non-isomorphic graphs sharing an invariant.
//!
//! Each graph is reduced to a canonical serialization of the chosen invariant
//! and hashed into a bucket. Pairs that share a bucket are then compared
//! exactly and, for `n <= 13`, filtered through the isomorphism oracle. The
//! hash only ever narrows the candidate set.
//!
//! Quantum levels compare floating-point eigenvalues. They are rounded to
//! cells of width `tol` before hashing and every graph is looked up in the
//! neighbouring cells too, so no pair within `tol` is lost to a cell boundary.

mod enumerate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::BufRead;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use enumerate::{enumerate_graphs, enumerate_trees, GRAPH_VERTEX_LIMIT, TREE_VERTEX_LIMIT};

use crate::classical::{signature_polynomial, ObservableSet};
use crate::error::{Error, Result};
use crate::graph::{are_isomorphic, encode_graph6, parse_graph6, Graph, ISO_VERTEX_LIMIT};
use crate::quantum::{extremal_eigenvalues, full_spectrum_dense, max_abs_diff, IsingParams, LanczosOptions, QuantumOperator, DENSE_VERTEX_LIMIT};

/// First 128 bits of SHA-256 over a canonical byte string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub u128);

impl Fingerprint {
    pub fn of_bytes(bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        Fingerprint(u128::from_be_bytes(digest[..16].try_into().expect("16 bytes")))
    }
}

impl std::fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScanLevel {
    /// Spectrum of the classical Hamiltonian `H` (co-Ising).
    EnergyMarginal,
    /// Joint `(e, m)` polynomial (longitudinal co-Ising).
    Bivariate,
    Multivariate { observables: ObservableSet },
    /// `(λ_min, λ_max)` of `H_T` at fixed parameters.
    QuantumExtremal { params: IsingParams<f64> },
    /// Full dense `H_T` spectrum, `n <= 13` only.
    QuantumFull { params: IsingParams<f64> },
}

impl ScanLevel {
    pub fn name(&self) -> &'static str {
        match self {
            ScanLevel::EnergyMarginal => "energy-marginal",
            ScanLevel::Bivariate => "bivariate",
            ScanLevel::Multivariate { .. } => "multivariate",
            ScanLevel::QuantumExtremal { .. } => "quantum-extremal",
            ScanLevel::QuantumFull { .. } => "quantum-full",
        }
    }

    fn is_quantum(&self) -> bool {
        matches!(self, ScanLevel::QuantumExtremal { .. } | ScanLevel::QuantumFull { .. })
    }
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Eigenvalue agreement threshold and hashing cell width for quantum levels.
    pub tol: f64,
    pub solver_tol: f64,
    pub seed: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { tol: 1e-8, solver_tol: 1e-10, seed: 0x5eed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanPair {
    /// 0-based positions in the input.
    pub first: usize,
    pub second: usize,
    pub first_graph6: String,
    pub second_graph6: String,
    pub equal_invariant: bool,
    /// `None` when the pair was not checked: unequal invariants, or too many
    /// vertices for the isomorphism oracle ("unfiltered").
    pub isomorphic: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_diff: Option<f64>,
}

impl ScanPair {
    pub fn is_unfiltered(&self) -> bool {
        self.equal_invariant && self.isomorphic.is_none()
    }

    pub fn is_non_isomorphic_match(&self) -> bool {
        self.equal_invariant && self.isomorphic == Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub family: String,
    pub level: ScanLevel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub graphs: usize,
    pub graphs_by_vertex_count: BTreeMap<usize, usize>,
    pub buckets: usize,
    /// Every pair that shared a bucket, ordered by `(first, second)`.
    pub pairs: Vec<ScanPair>,
    pub equal_pairs: usize,
    pub non_isomorphic_pairs: usize,
    pub unfiltered_pairs: usize,
    /// Connected components of the equal-invariant relation with two or more
    /// members. For the exact levels these are the equivalence classes.
    pub classes: Vec<Vec<usize>>,
}

impl ScanResult {
    pub fn non_isomorphic(&self) -> impl Iterator<Item = &ScanPair> {
        self.pairs.iter().filter(|p| p.is_non_isomorphic_match())
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let by_n: Vec<String> = self.graphs_by_vertex_count.iter().map(|(n, c)| format!("n={n}:{c}")).collect();
        writeln!(out, "family            {}", self.family).unwrap();
        writeln!(out, "level             {}", self.level.name()).unwrap();
        writeln!(out, "graphs            {} ({})", self.graphs, by_n.join(" ")).unwrap();
        writeln!(out, "buckets           {}", self.buckets).unwrap();
        writeln!(out, "candidate pairs   {}", self.pairs.len()).unwrap();
        writeln!(out, "equal invariant   {}", self.equal_pairs).unwrap();
        writeln!(out, "non-isomorphic    {}", self.non_isomorphic_pairs).unwrap();
        writeln!(out, "unfiltered        {}", self.unfiltered_pairs).unwrap();
        const SHOWN: usize = 20;
        for p in self.non_isomorphic().take(SHOWN) {
            writeln!(out, "  {:>6} {:<12} {:>6} {}", p.first, p.first_graph6, p.second, p.second_graph6).unwrap();
        }
        if self.non_isomorphic_pairs > SHOWN {
            writeln!(out, "  ... {} more", self.non_isomorphic_pairs - SHOWN).unwrap();
        }
        out
    }
}

enum Invariant {
    Exact(String),
    Extremal(f64, f64),
    Full(Vec<f64>),
}

struct Entry {
    n: usize,
    invariant: Invariant,
}

fn compute_entry(g: &Graph, level: &ScanLevel, opts: &ScanOptions) -> Result<Entry> {
    let n = g.n();
    let invariant = match level {
        ScanLevel::EnergyMarginal => {
            let p = signature_polynomial(g, &ObservableSet::energy_magnetization())?;
            Invariant::Exact(serde_json::to_string(&p.energy_spectrum())?)
        }
        ScanLevel::Bivariate => Invariant::Exact(signature_polynomial(g, &ObservableSet::energy_magnetization())?.to_canonical_json()),
        ScanLevel::Multivariate { observables } => Invariant::Exact(signature_polynomial(g, observables)?.to_canonical_json()),
        ScanLevel::QuantumExtremal { params } => {
            let op = QuantumOperator::transverse(g, params)?;
            let lanczos = LanczosOptions { tol: opts.solver_tol, seed: opts.seed, ..LanczosOptions::default() };
            let (lo, hi) = extremal_eigenvalues(&op, &lanczos)?;
            Invariant::Extremal(lo, hi)
        }
        ScanLevel::QuantumFull { params } => {
            if n > DENSE_VERTEX_LIMIT {
                return Err(Error::TooLarge { what: "full-spectrum scan vertex count", got: n, limit: DENSE_VERTEX_LIMIT });
            }
            let s = full_spectrum_dense(&QuantumOperator::transverse(g, params)?)?;
            if !(opts.tol >= 10.0 * s.residual) {
                return Err(Error::InvalidArgument(format!("tolerance {} must be at least 10x the dense residual {}", opts.tol, s.residual)));
            }
            Invariant::Full(s.eigenvalues)
        }
    };
    Ok(Entry { n, invariant })
}

fn extremes(inv: &Invariant) -> (f64, f64) {
    match inv {
        Invariant::Extremal(lo, hi) => (*lo, *hi),
        Invariant::Full(v) => (v[0], v[v.len() - 1]),
        Invariant::Exact(_) => unreachable!("exact invariants are hashed directly"),
    }
}

fn cell_key(n: usize, cells: (i64, i64)) -> Fingerprint {
    Fingerprint::of_bytes(format!("{{\"n\":{n},\"cells\":[{},{}]}}", cells.0, cells.1).as_bytes())
}

fn exact_key(n: usize, json: &str) -> Fingerprint {
    Fingerprint::of_bytes(format!("{{\"n\":{n},\"invariant\":{json}}}").as_bytes())
}

/// Compares two entries exactly; returns the verdict and, for quantum
/// levels, the eigenvalue difference.
fn compare(a: &Entry, b: &Entry, tol: f64) -> Result<(bool, Option<f64>)> {
    if a.n != b.n {
        return Ok((false, None));
    }
    Ok(match (&a.invariant, &b.invariant) {
        (Invariant::Exact(x), Invariant::Exact(y)) => (x == y, None),
        (Invariant::Extremal(a0, a1), Invariant::Extremal(b0, b1)) => {
            let d = (a0 - b0).abs().max((a1 - b1).abs());
            (d <= tol, Some(d))
        }
        (Invariant::Full(x), Invariant::Full(y)) => {
            let d = max_abs_diff(x, y)?;
            (d <= tol, Some(d))
        }
        _ => unreachable!("entries of one scan share a level"),
    })
}

fn components(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().filter(|g| g.len() > 1).collect()
}

/// Scans a list of graphs. Output order depends only on input order.
pub fn scan_graphs(graphs: &[Graph], family: &str, level: &ScanLevel, opts: &ScanOptions) -> Result<ScanResult> {
    if level.is_quantum() && !(opts.tol >= 10.0 * opts.solver_tol && opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {} must be at least 10x the solver residual {}", opts.tol, opts.solver_tol)));
    }
    if let ScanLevel::QuantumExtremal { params } | ScanLevel::QuantumFull { params } = level {
        params.validate()?;
    }

    // phase 1: invariants and bucket keys
    let entries: Vec<Entry> = graphs.par_iter().map(|g| compute_entry(g, level, opts)).collect::<Result<_>>()?;

    let mut buckets: BTreeMap<Fingerprint, Vec<usize>> = BTreeMap::new();
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let own = match &e.invariant {
            Invariant::Exact(json) => {
                let key = exact_key(e.n, json);
                if let Some(members) = buckets.get(&key) {
                    candidates.extend(members.iter().map(|&j| (j, i)));
                }
                key
            }
            inv => {
                let (lo, hi) = extremes(inv);
                let cell = ((lo / opts.tol).round() as i64, (hi / opts.tol).round() as i64);
                let mut near = BTreeSet::new();
                for d0 in -1..=1 {
                    for d1 in -1..=1 {
                        if let Some(members) = buckets.get(&cell_key(e.n, (cell.0 + d0, cell.1 + d1))) {
                            near.extend(members.iter().copied());
                        }
                    }
                }
                candidates.extend(near.into_iter().map(|j| (j, i)));
                cell_key(e.n, cell)
            }
        };
        buckets.entry(own).or_default().push(i);
    }
    candidates.sort_unstable();

    // phase 2: exact comparison and isomorphism filter
    let pairs: Vec<ScanPair> = candidates
        .par_iter()
        .map(|&(a, b)| {
            let (equal, diff) = compare(&entries[a], &entries[b], opts.tol)?;
            let isomorphic = if equal && graphs[a].n() <= ISO_VERTEX_LIMIT { Some(are_isomorphic(&graphs[a], &graphs[b])?) } else { None };
            Ok(ScanPair {
                first: a,
                second: b,
                first_graph6: encode_graph6(&graphs[a]),
                second_graph6: encode_graph6(&graphs[b]),
                equal_invariant: equal,
                isomorphic,
                max_abs_diff: diff,
            })
        })
        .collect::<Result<_>>()?;

    let mut by_n = BTreeMap::new();
    for g in graphs {
        *by_n.entry(g.n()).or_insert(0) += 1;
    }
    let classes = components(graphs.len(), pairs.iter().filter(|p| p.equal_invariant).map(|p| (p.first, p.second)));
    Ok(ScanResult {
        family: family.to_string(),
        level: level.clone(),
        tol: level.is_quantum().then_some(opts.tol),
        graphs: graphs.len(),
        graphs_by_vertex_count: by_n,
        buckets: buckets.len(),
        equal_pairs: pairs.iter().filter(|p| p.equal_invariant).count(),
        non_isomorphic_pairs: pairs.iter().filter(|p| p.is_non_isomorphic_match()).count(),
        unfiltered_pairs: pairs.iter().filter(|p| p.is_unfiltered()).count(),
        pairs,
        classes,
    })
}

/// Reads graph6 records, one per line; blank lines are skipped. Any bad
/// record aborts the scan with its 1-based line number.
pub fn read_graph6_stream<R: BufRead>(reader: R) -> Result<Vec<Graph>> {
    let mut graphs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let g = parse_graph6(t).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::Parse { line: Some(i + 1), msg },
            other => Error::Parse { line: Some(i + 1), msg: other.to_string() },
        })?;
        graphs.push(g);
    }
    Ok(graphs)
}

pub fn scan_stream<R: BufRead>(reader: R, family: &str, level: &ScanLevel, opts: &ScanOptions) -> Result<ScanResult> {
    let graphs = read_graph6_stream(reader)?;
    scan_graphs(&graphs, family, level, opts)
}

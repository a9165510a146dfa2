use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::classical::ObservableSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub(crate) fn serialize_tuple_map<S: Serializer, V: Serialize>(map: &BTreeMap<Vec<i64>, V>, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a, V> {
        tuple: &'a [i64],
        value: &'a V,
    }
    let mut seq = s.serialize_seq(Some(map.len()))?;
    for (tuple, value) in map {
        seq.serialize_element(&Entry { tuple, value })?;
    }
    seq.end()
}

/// Counts `N_occ` per observable tuple, optionally with per-bin intervals on
/// the bin probability.
#[derive(Clone, Debug, PartialEq)]
pub struct SignatureHistogram {
    pub observables: ObservableSet,
    pub bins: BTreeMap<Vec<i64>, u64>,
    pub total: u64,
    pub ci: Option<BTreeMap<Vec<i64>, (f64, f64)>>,
}

/// One display row; the CSV and JSON forms are both built from these.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramRow {
    pub bin_index: usize,
    pub tuple: Vec<i64>,
    pub count: u64,
    pub probability: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

impl SignatureHistogram {
    pub fn new(observables: ObservableSet) -> Self {
        SignatureHistogram { observables, bins: BTreeMap::new(), total: 0, ci: None }
    }

    pub fn arity(&self) -> usize {
        self.observables.arity()
    }

    pub fn add(&mut self, tuple: &[i64]) -> Result<()> {
        self.add_count(tuple.to_vec(), 1)
    }

    pub fn add_count(&mut self, tuple: Vec<i64>, count: u64) -> Result<()> {
        if tuple.len() != self.arity() {
            return Err(Error::ArityMismatch(self.arity(), tuple.len()));
        }
        if count > 0 {
            *self.bins.entry(tuple).or_insert(0) += count;
            self.total += count;
            self.ci = None;
        }
        Ok(())
    }

    pub fn count(&self, tuple: &[i64]) -> u64 {
        self.bins.get(tuple).copied().unwrap_or(0)
    }

    /// Counts on tuples starting with `prefix`.
    pub fn marginal_count(&self, prefix: &[i64]) -> u64 {
        self.bins.iter().filter(|(t, _)| t.starts_with(prefix)).map(|(_, &c)| c).sum()
    }

    /// Adds another histogram's counts. Intervals are dropped since they no
    /// longer describe the merged sample.
    pub fn merge(&mut self, other: &SignatureHistogram) -> Result<()> {
        if self.observables != other.observables {
            return Err(Error::ArityMismatch(self.arity(), other.arity()));
        }
        for (t, &c) in &other.bins {
            *self.bins.entry(t.clone()).or_insert(0) += c;
        }
        self.total += other.total;
        self.ci = None;
        Ok(())
    }

    pub fn probabilities<T: Scalar>(&self) -> BTreeMap<Vec<i64>, T> {
        let n = T::from_u64(self.total.max(1)).unwrap();
        self.bins.iter().map(|(t, &c)| (t.clone(), T::from_u64(c).unwrap() / n)).collect()
    }

    pub fn rows(&self) -> Vec<HistogramRow> {
        let n = self.total.max(1) as f64;
        self.bins
            .iter()
            .enumerate()
            .map(|(i, (t, &c))| {
                let ci = self.ci.as_ref().and_then(|m| m.get(t)).copied();
                HistogramRow {
                    bin_index: i,
                    tuple: t.clone(),
                    count: c,
                    probability: c as f64 / n,
                    ci_low: ci.map(|x| x.0),
                    ci_high: ci.map(|x| x.1),
                }
            })
            .collect()
    }

    /// CSV `bin_index,<labels>,count,probability,ci_low,ci_high`; interval
    /// cells are empty without a bootstrap.
    pub fn to_csv(&self) -> String {
        let mut out = format!("bin_index,{},count,probability,ci_low,ci_high\n", self.observables.labels().join(","));
        let cell = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in self.rows() {
            let tuple: Vec<String> = r.tuple.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{},{},{},{},{},{}", r.bin_index, tuple.join(","), r.count, r.probability, cell(r.ci_low), cell(r.ci_high))
                .unwrap();
        }
        out
    }
}

impl Serialize for SignatureHistogram {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Mirror {
            observables: Vec<String>,
            total: u64,
            bins: Vec<HistogramRow>,
        }
        Mirror { observables: self.observables.labels(), total: self.total, bins: self.rows() }.serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinZ {
    pub tuple: Vec<i64>,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramComparison {
    pub total_variation: f64,
    pub support_equal: bool,
    /// Pooled two-proportion z-score per bin of the union support.
    pub per_bin_z: Vec<BinZ>,
}

pub fn compare_histograms(h1: &SignatureHistogram, h2: &SignatureHistogram) -> Result<HistogramComparison> {
    if h1.arity() != h2.arity() {
        return Err(Error::ArityMismatch(h1.arity(), h2.arity()));
    }
    let (p1, p2) = (h1.probabilities::<f64>(), h2.probabilities::<f64>());
    let total_variation = super::total_variation(p1.iter().map(|(t, &p)| (t, p)), p2.iter().map(|(t, &p)| (t, p)));
    let support_equal = h1.bins.keys().eq(h2.bins.keys());
    let (n1, n2) = (h1.total as f64, h2.total as f64);
    let mut keys: Vec<&Vec<i64>> = h1.bins.keys().chain(h2.bins.keys()).collect();
    keys.sort();
    keys.dedup();
    let per_bin_z = keys
        .into_iter()
        .map(|t| {
            let (c1, c2) = (h1.count(t) as f64, h2.count(t) as f64);
            let z = if n1 == 0.0 || n2 == 0.0 {
                0.0
            } else {
                let pooled = (c1 + c2) / (n1 + n2);
                let se = (pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)).sqrt();
                if se > 0.0 {
                    (c1 / n1 - c2 / n2) / se
                } else {
                    0.0
                }
            };
            BinZ { tuple: t.clone(), z }
        })
        .collect();
    Ok(HistogramComparison { total_variation, support_equal, per_bin_z })
}

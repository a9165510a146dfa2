//! Gibbs signature statistics: exact Boltzmann distributions over observable
//! tuples, Metropolis sampling, bootstrap intervals and histogram comparison.
//!
//! Bins are always ordered lexicographically on the observable tuple.

mod bootstrap;
mod histogram;
mod metropolis;

pub use bootstrap::bootstrap_ci;
pub use histogram::{compare_histograms, BinZ, HistogramComparison, HistogramRow, SignatureHistogram};
pub use metropolis::{acceptance_probability, metropolis_sample, metropolis_sample_with, transition_probability, MetropolisOptions};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::classical::{signature_polynomial, ObservableSet, SignaturePolynomial};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Classical Gibbs distribution `p(σ) ∝ exp(−β (J e_σ + h m_σ))` on a graph,
/// observed through an observable set.
#[derive(Clone, Debug)]
pub struct GibbsModel<T> {
    pub graph: Graph,
    pub j: T,
    pub h: T,
    pub beta: T,
    pub observables: ObservableSet,
}

impl<T: Scalar> GibbsModel<T> {
    pub fn new(graph: Graph, j: T, h: T, beta: T, observables: ObservableSet) -> Result<Self> {
        let m = GibbsModel { graph, j, h, beta, observables };
        m.validate()?;
        Ok(m)
    }

    pub fn with_beta(&self, beta: T) -> Result<Self> {
        GibbsModel::new(self.graph.clone(), self.j, self.h, beta, self.observables.clone())
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta >= T::zero()) || !self.beta.is_finite() {
            return Err(Error::InvalidArgument(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        if !self.j.is_finite() || !self.h.is_finite() {
            return Err(Error::InvalidArgument("couplings must be finite".into()));
        }
        Ok(())
    }

    /// `J e + h m`.
    pub fn energy(&self, e: i64, m: i64) -> T {
        self.j * T::from_i64(e).unwrap() + self.h * T::from_i64(m).unwrap()
    }
}

/// Exact probabilities per observable tuple.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SignatureDistribution<T> {
    pub observables: Vec<String>,
    #[serde(serialize_with = "histogram::serialize_tuple_map")]
    pub probabilities: BTreeMap<Vec<i64>, T>,
}

impl<T: Scalar> SignatureDistribution<T> {
    pub fn arity(&self) -> usize {
        self.observables.len()
    }

    pub fn probability(&self, tuple: &[i64]) -> T {
        self.probabilities.get(tuple).copied().unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        self.probabilities.values().copied().sum()
    }

    /// Mass on tuples whose first `k` entries are `prefix`.
    pub fn marginal_mass(&self, prefix: &[i64]) -> T {
        self.probabilities.iter().filter(|(t, _)| t.starts_with(prefix)).map(|(_, &p)| p).sum()
    }

    /// CSV `bin_index,<labels>,probability`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("bin_index,{},probability\n", self.observables.join(","));
        for (i, (t, p)) in self.probabilities.iter().enumerate() {
            let tuple: Vec<String> = t.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{i},{},{p}", tuple.join(",")).unwrap();
        }
        out
    }

    pub fn total_variation(&self, other: &SignatureDistribution<T>) -> Result<T> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch(self.arity(), other.arity()));
        }
        Ok(total_variation(
            self.probabilities.iter().map(|(t, &p)| (t, p)),
            other.probabilities.iter().map(|(t, &p)| (t, p)),
        ))
    }
}

/// `½ Σ |p − q|` over the union of two sorted supports.
pub(crate) fn total_variation<'a, T: Scalar>(
    a: impl Iterator<Item = (&'a Vec<i64>, T)>,
    b: impl Iterator<Item = (&'a Vec<i64>, T)>,
) -> T {
    let mut sum = T::zero();
    let mut a = a.peekable();
    let mut b = b.peekable();
    loop {
        let step = match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some(_), None) => a.next().unwrap().1,
            (None, Some(_)) => b.next().unwrap().1,
            (Some((ta, _)), Some((tb, _))) => match ta.cmp(tb) {
                std::cmp::Ordering::Less => a.next().unwrap().1,
                std::cmp::Ordering::Greater => b.next().unwrap().1,
                std::cmp::Ordering::Equal => {
                    let (pa, pb) = (a.next().unwrap().1, b.next().unwrap().1);
                    pa - pb
                }
            },
        };
        sum = sum + step.abs();
    }
    sum / T::from_f64_lossy(2.0)
}

/// Boltzmann weights of a signature polynomial, normalized with a
/// log-sum-exp shift so large `β` neither overflows nor underflows to 0/0.
pub fn distribution_from_polynomial<T: Scalar>(p: &SignaturePolynomial, j: T, h: T, beta: T) -> Result<SignatureDistribution<T>> {
    if p.arity() < 2 {
        return Err(Error::InvalidArgument("distribution needs (e, m) terms".into()));
    }
    if !(beta >= T::zero()) {
        return Err(Error::InvalidArgument(format!("beta must be >= 0, got {beta}")));
    }
    let log_weights: Vec<(&Vec<i64>, T)> = p
        .terms()
        .iter()
        .map(|(t, &c)| {
            let energy = j * T::from_i64(t[0]).unwrap() + h * T::from_i64(t[1]).unwrap();
            (t, T::from_u64(c).unwrap().ln() - beta * energy)
        })
        .collect();
    let shift = log_weights.iter().fold(T::neg_infinity(), |m, &(_, w)| m.max(w));
    let z: T = log_weights.iter().map(|&(_, w)| (w - shift).exp()).sum();
    let probabilities = log_weights.into_iter().map(|(t, w)| (t.clone(), (w - shift).exp() / z)).collect();
    Ok(SignatureDistribution { observables: p.observables().labels(), probabilities })
}

/// Exact distribution of the model's observable tuple by full enumeration.
pub fn exact_distribution<T: Scalar>(model: &GibbsModel<T>) -> Result<SignatureDistribution<T>> {
    let p = signature_polynomial(&model.graph, &model.observables)?;
    distribution_from_polynomial(&p, model.j, model.h, model.beta)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct TemperatureFit<T> {
    pub beta: T,
    pub total_variation: T,
}

/// Grid search for the `β` whose exact distribution is closest in total
/// variation to `target`; ties go to the smaller `β`.
pub fn fit_temperature<T: Scalar>(model: &GibbsModel<T>, target: &SignatureHistogram, beta_grid: &[T]) -> Result<TemperatureFit<T>> {
    if beta_grid.is_empty() {
        return Err(Error::InvalidArgument("empty beta grid".into()));
    }
    if target.arity() != model.observables.arity() {
        return Err(Error::ArityMismatch(model.observables.arity(), target.arity()));
    }
    if target.total == 0 {
        return Err(Error::InvalidArgument("target histogram is empty".into()));
    }
    let p = signature_polynomial(&model.graph, &model.observables)?;
    let empirical = target.probabilities::<T>();
    let mut best: Option<TemperatureFit<T>> = None;
    for &beta in beta_grid {
        let d = distribution_from_polynomial(&p, model.j, model.h, beta)?;
        let tv = total_variation(d.probabilities.iter().map(|(t, &q)| (t, q)), empirical.iter().map(|(t, &q)| (t, q)));
        let better = match best {
            None => true,
            Some(b) => tv < b.total_variation || (tv == b.total_variation && beta < b.beta),
        };
        if better {
            best = Some(TemperatureFit { beta, total_variation: tv });
        }
    }
    Ok(best.unwrap())
}

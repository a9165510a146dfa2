use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{GibbsModel, SignatureHistogram};
use crate::classical::{state_observables, CompiledObservables};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct MetropolisOptions {
    /// Recorded sweeps per chain; one sweep is `n` proposed flips.
    pub sweeps: usize,
    pub chains: usize,
    pub seed: u64,
    /// Unrecorded sweeps before recording; `None` means `sweeps / 10`.
    pub burn_in: Option<usize>,
}

impl MetropolisOptions {
    pub fn new(sweeps: usize, chains: usize, seed: u64) -> Self {
        MetropolisOptions { sweeps, chains, seed, burn_in: None }
    }
}

/// `min(1, exp(−β ΔE))`.
pub fn acceptance_probability<T: Scalar>(beta: T, delta_energy: T) -> T {
    if delta_energy <= T::zero() {
        T::one()
    } else {
        (-beta * delta_energy).exp()
    }
}

/// Probability that one proposal moves `sigma` to `sigma ^ (1 << i)`: the site
/// is picked with probability `1/(n+1)` and then accepted.
pub fn transition_probability<T: Scalar>(model: &GibbsModel<T>, sigma: u64, i: usize) -> Result<T> {
    let n = model.graph.n();
    if i >= n {
        return Err(Error::VertexOutOfRange { vertex: i as i64, n });
    }
    let em = crate::classical::ObservableSet::energy_magnetization();
    let before = state_observables(&model.graph, sigma, &em)?;
    let after = state_observables(&model.graph, sigma ^ (1 << i), &em)?;
    let de = model.energy(after[0], after[1]) - model.energy(before[0], before[1]);
    Ok(acceptance_probability(model.beta, de) / T::from_usize(n + 1).unwrap())
}

pub fn metropolis_sample<T: Scalar>(model: &GibbsModel<T>, sweeps: usize, chains: usize, seed: u64) -> Result<SignatureHistogram> {
    metropolis_sample_with(model, &MetropolisOptions::new(sweeps, chains, seed))
}

/// Single-spin-flip Metropolis with uniformly chosen sites. Every chain draws
/// from its own stream of one seeded generator, records one signature per
/// sweep after burn-in, and the chain histograms are summed.
///
/// Each proposal picks one of `n + 1` choices, the last being "stay". Without
/// that option a sweep of `n` always-accepted flips at `β = 0` preserves the
/// parity of the number of down spins and the recorded chain never mixes.
pub fn metropolis_sample_with<T: Scalar>(model: &GibbsModel<T>, opts: &MetropolisOptions) -> Result<SignatureHistogram> {
    if opts.sweeps == 0 || opts.chains == 0 {
        return Err(Error::InvalidArgument("sweeps and chains must be >= 1".into()));
    }
    let n = model.graph.n();
    if n == 0 {
        return Err(Error::InvalidArgument("graph has no vertices".into()));
    }
    let compiled = CompiledObservables::new(&model.graph, &model.observables)?;
    let burn_in = opts.burn_in.unwrap_or(opts.sweeps / 10);
    let state_mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };

    let run_chain = |chain: usize| -> Result<SignatureHistogram> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(chain as u64);
        let mut sigma: u32 = rng.random::<u32>() & state_mask;
        let mut values = vec![0i64; compiled.arity()];
        compiled.evaluate(sigma, &mut values);
        let mut counts = std::collections::BTreeMap::<Vec<i64>, u64>::new();
        for sweep in 0..burn_in + opts.sweeps {
            for _ in 0..n {
                let i = rng.random_range(0..=n);
                if i == n {
                    continue;
                }
                let (de, dm) = compiled.energy_magnetization_delta(sigma, i);
                let d_energy = model.energy(de, dm);
                let accept = d_energy <= T::zero() || T::from_f64_lossy(rng.random::<f64>()) < acceptance_probability(model.beta, d_energy);
                if accept {
                    compiled.flip(sigma, i, &mut values);
                    sigma ^= 1 << i;
                }
            }
            if sweep >= burn_in {
                match counts.get_mut(values.as_slice()) {
                    Some(c) => *c += 1,
                    None => {
                        counts.insert(values.clone(), 1);
                    }
                }
            }
        }
        let mut h = SignatureHistogram::new(model.observables.clone());
        for (t, c) in counts {
            h.add_count(t, c)?;
        }
        Ok(h)
    };

    let per_chain: Vec<SignatureHistogram> = (0..opts.chains).into_par_iter().map(run_chain).collect::<Result<_>>()?;
    let mut merged = SignatureHistogram::new(model.observables.clone());
    for h in &per_chain {
        merged.merge(h)?;
    }
    Ok(merged)
}

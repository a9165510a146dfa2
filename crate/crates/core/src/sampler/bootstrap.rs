use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::SignatureHistogram;
use crate::error::{Error, Result};

const LOW_QUANTILE: f64 = 0.16;
const HIGH_QUANTILE: f64 = 0.84;

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Per-bin 16–84 percentile intervals on the bin probability from
/// multinomial resampling of the recorded samples. Each resample draws the
/// bin counts as a chain of conditional binomials.
pub fn bootstrap_ci(h: &SignatureHistogram, resamples: usize, seed: u64) -> Result<SignatureHistogram> {
    if resamples < 2 {
        return Err(Error::InvalidArgument(format!("bootstrap needs at least 2 resamples, got {resamples}")));
    }
    if h.total == 0 {
        return Err(Error::InvalidArgument("cannot bootstrap an empty histogram".into()));
    }
    let counts: Vec<u64> = h.bins.values().copied().collect();
    let total = h.total;
    let mut draws = vec![Vec::with_capacity(resamples); counts.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..resamples {
        let mut left = total;
        let mut mass_left = total;
        for (b, &c) in counts.iter().enumerate() {
            let x = if b + 1 == counts.len() || left == 0 {
                left
            } else if c == mass_left {
                left
            } else {
                let p = c as f64 / mass_left as f64;
                Binomial::new(left, p).map_err(|e| Error::InvalidArgument(e.to_string()))?.sample(&mut rng)
            };
            draws[b].push(x as f64 / total as f64);
            left -= x;
            mass_left -= c;
        }
    }
    let ci: BTreeMap<Vec<i64>, (f64, f64)> = h
        .bins
        .keys()
        .zip(draws.iter_mut())
        .map(|(t, d)| {
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            (t.clone(), (quantile(d, LOW_QUANTILE), quantile(d, HIGH_QUANTILE)))
        })
        .collect();
    let mut out = h.clone();
    out.ci = Some(ci);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::ObservableSet;

    fn hist(entries: &[([i64; 2], u64)]) -> SignatureHistogram {
        let mut h = SignatureHistogram::new(ObservableSet::energy_magnetization());
        for (t, c) in entries {
            h.add_count(t.to_vec(), *c).unwrap();
        }
        h
    }

    #[test]
    fn quantiles() {
        let d = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&d, 0.5), 2.0);
        assert_eq!(quantile(&d, 0.0), 0.0);
        assert!((quantile(&d, 0.16) - 0.64).abs() < 1e-12);
    }

    #[test]
    fn single_bin_has_zero_width() {
        let h = bootstrap_ci(&hist(&[([1, 1], 40)]), 100, 1).unwrap();
        assert_eq!(h.ci.unwrap()[&vec![1, 1]], (1.0, 1.0));
    }

    #[test]
    fn intervals_cover_point_estimate_and_match_binomial_width() {
        let n = 100_000u64;
        let h = hist(&[([0, 0], 30_000), ([1, 0], 50_000), ([2, 0], 20_000)]);
        let b = bootstrap_ci(&h, 2000, 3).unwrap();
        let ci = b.ci.as_ref().unwrap();
        for (t, &c) in &h.bins {
            let p = c as f64 / n as f64;
            let (lo, hi) = ci[t];
            assert!(lo <= p && p <= hi);
            // ±1σ of a binomial proportion
            let sd = (p * (1.0 - p) / n as f64).sqrt();
            assert!(((hi - lo) / 2.0 - sd).abs() < 0.15 * sd, "{t:?}: {} vs {sd}", (hi - lo) / 2.0);
        }
        let rows = b.rows();
        assert!(rows.iter().all(|r| r.ci_low.is_some()));
    }

    #[test]
    fn widths_shrink_with_sample_size() {
        let small = hist(&[([0, 0], 4_000), ([1, 0], 6_000)]);
        let large = hist(&[([0, 0], 400_000), ([1, 0], 600_000)]);
        let w = |h: &SignatureHistogram| {
            let b = bootstrap_ci(h, 1000, 8).unwrap();
            let (lo, hi) = b.ci.unwrap()[&vec![0, 0]];
            hi - lo
        };
        let ratio = w(&small) / w(&large);
        assert!((ratio - 10.0).abs() < 1.5, "{ratio}");
    }

    #[test]
    fn homogeneous_halves_overlap() {
        let a = bootstrap_ci(&hist(&[([0, 0], 2_480), ([1, 0], 2_520)]), 5000, 1).unwrap();
        let b = bootstrap_ci(&hist(&[([0, 0], 2_510), ([1, 0], 2_490)]), 5000, 2).unwrap();
        for t in a.bins.keys() {
            let (alo, ahi) = a.ci.as_ref().unwrap()[t];
            let (blo, bhi) = b.ci.as_ref().unwrap()[t];
            assert!(alo <= bhi && blo <= ahi);
        }
    }

    #[test]
    fn deterministic_and_validated() {
        let h = hist(&[([0, 0], 3), ([1, 0], 5)]);
        assert_eq!(bootstrap_ci(&h, 50, 4).unwrap(), bootstrap_ci(&h, 50, 4).unwrap());
        assert!(bootstrap_ci(&h, 1, 4).is_err());
        assert!(bootstrap_ci(&hist(&[]), 10, 4).is_err());
    }
}

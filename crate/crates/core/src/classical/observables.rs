//! Diagonal observables evaluated on classical spin states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{adjacency_power, Graph};

/// Spin of vertex `i` in state `sigma`: `+1` for bit 0, `-1` for bit 1.
#[inline]
pub fn spin(sigma: u64, i: usize) -> i64 {
    1 - 2 * ((sigma >> i) & 1) as i64
}

/// A diagonal observable with integer eigenvalues at unit couplings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Observable {
    /// `e = Σ_{edges} s_i s_j`
    Energy,
    /// `m = Σ_i s_i`
    Magnetization,
    /// `Ω^k = Σ_{i,j} [A^k]_{ij} s_i s_j`, ordered pairs, diagonal included.
    Omega(u32),
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Energy => write!(f, "e"),
            Observable::Magnetization => write!(f, "m"),
            Observable::Omega(k) => write!(f, "omega{k}"),
        }
    }
}

impl From<Observable> for String {
    fn from(o: Observable) -> String {
        o.to_string()
    }
}

impl TryFrom<String> for Observable {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "e" | "energy" => Ok(Observable::Energy),
            "m" | "magnetization" => Ok(Observable::Magnetization),
            _ => {
                let k = t
                    .strip_prefix("omega")
                    .or_else(|| t.strip_prefix('o'))
                    .and_then(|k| k.parse::<u32>().ok())
                    .filter(|k| (1..=4).contains(k))
                    .ok_or_else(|| Error::Parse {
                        line: None,
                        msg: format!("unknown observable {s:?} (expected e, m, or omega1..omega4)"),
                    })?;
                Ok(Observable::Omega(k))
            }
        }
    }
}

/// Ordered list of observables. Always starts with energy and magnetization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObservableSet {
    observables: Vec<Observable>,
}

impl Default for ObservableSet {
    fn default() -> Self {
        Self::energy_magnetization()
    }
}

impl ObservableSet {
    pub const MAX_ARITY: usize = 8;

    pub fn energy_magnetization() -> Self {
        ObservableSet { observables: vec![Observable::Energy, Observable::Magnetization] }
    }

    /// `(e, m, Ω^k…)` for the given powers.
    pub fn with_omegas(ks: &[u32]) -> Result<Self> {
        let mut obs = vec![Observable::Energy, Observable::Magnetization];
        for &k in ks {
            if !(1..=4).contains(&k) {
                return Err(Error::InvalidArgument(format!("Ω^k needs 1 <= k <= 4, got {k}")));
            }
            obs.push(Observable::Omega(k));
        }
        Self::from_list(obs)
    }

    /// Accepts a list that starts with `e, m`; if they are missing they are prepended.
    pub fn from_list(list: Vec<Observable>) -> Result<Self> {
        let mut obs = vec![Observable::Energy, Observable::Magnetization];
        for o in list {
            if !obs.contains(&o) {
                obs.push(o);
            }
        }
        if obs.len() > Self::MAX_ARITY {
            return Err(Error::TooLarge { what: "observable count", got: obs.len(), limit: Self::MAX_ARITY });
        }
        Ok(ObservableSet { observables: obs })
    }

    pub fn arity(&self) -> usize {
        self.observables.len()
    }

    pub fn as_slice(&self) -> &[Observable] {
        &self.observables
    }

    pub fn omega_orders(&self) -> Vec<u32> {
        self.observables
            .iter()
            .filter_map(|o| match o {
                Observable::Omega(k) => Some(*k),
                _ => None,
            })
            .collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.observables.iter().map(|o| o.to_string()).collect()
    }
}

impl FromStr for ObservableSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let list = s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect::<Result<Vec<_>>>()?;
        Self::from_list(list)
    }
}

/// Observable values `(e, m, Ω^k…)` of one state, computed directly from the definitions.
pub fn state_observables(g: &Graph, sigma: u64, obs: &ObservableSet) -> Result<Vec<i64>> {
    let n = g.n();
    if n < 64 && sigma >> n != 0 {
        return Err(Error::InvalidArgument(format!("state {sigma} out of range for n = {n}")));
    }
    let s: Vec<i64> = (0..n).map(|i| spin(sigma, i)).collect();
    obs.as_slice()
        .iter()
        .map(|o| match o {
            Observable::Energy => Ok(g.edges().iter().map(|&(i, j)| s[i] * s[j]).sum()),
            Observable::Magnetization => Ok(s.iter().sum()),
            Observable::Omega(k) => {
                let ak = adjacency_power(g, *k)?;
                Ok((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| ak.get(i, j) * s[i] * s[j]).sum())
            }
        })
        .collect()
}

/// A quadratic spin form `c + Σ_{i<j} w_ij s_i s_j`, stored per vertex as
/// `(weight, neighbour mask)` groups so that flips cost one popcount per group.
#[derive(Clone, Debug)]
pub(crate) struct QuadraticForm {
    constant: i64,
    groups: Vec<Vec<(i64, u32)>>,
    range: (i64, i64),
}

impl QuadraticForm {
    fn from_weights(n: usize, constant: i64, w: impl Fn(usize, usize) -> i64) -> Self {
        let mut groups = vec![Vec::new(); n];
        let mut abs_sum = 0i64;
        for (i, group) in groups.iter_mut().enumerate() {
            let mut by_weight: Vec<(i64, u32)> = Vec::new();
            for j in 0..n {
                let wij = if i == j { 0 } else { w(i, j) };
                if wij == 0 {
                    continue;
                }
                if j > i {
                    abs_sum += wij.abs();
                }
                match by_weight.iter_mut().find(|(wt, _)| *wt == wij) {
                    Some((_, mask)) => *mask |= 1 << j,
                    None => by_weight.push((wij, 1 << j)),
                }
            }
            *group = by_weight;
        }
        QuadraticForm { constant, groups, range: (constant - abs_sum, constant + abs_sum) }
    }

    /// `Σ_j w_ij s_i s_j` for vertex `i` in state `sigma`.
    #[inline]
    fn local(&self, sigma: u32, i: usize) -> i64 {
        let flip = 0u32.wrapping_sub(sigma >> i & 1);
        let aligned = sigma ^ flip;
        self.groups[i]
            .iter()
            .map(|&(w, mask)| w * (mask.count_ones() as i64 - 2 * (aligned & mask).count_ones() as i64))
            .sum()
    }

    fn value(&self, sigma: u32) -> i64 {
        let twice: i64 = (0..self.groups.len()).map(|i| self.local(sigma, i)).sum();
        self.constant + twice / 2
    }

    /// Change in value when spin `i` flips.
    #[inline]
    fn flip_delta(&self, sigma: u32, i: usize) -> i64 {
        -2 * self.local(sigma, i)
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Compiled {
    Quadratic(QuadraticForm),
    Magnetization,
}

/// Observables prepared for one graph: fast full evaluation and O(deg) flip updates.
#[derive(Clone, Debug)]
pub(crate) struct CompiledObservables {
    n: usize,
    items: Vec<Compiled>,
}

impl CompiledObservables {
    pub(crate) fn new(g: &Graph, obs: &ObservableSet) -> Result<Self> {
        let n = g.n();
        let items = obs
            .as_slice()
            .iter()
            .map(|o| -> Result<Compiled> {
                Ok(match o {
                    Observable::Energy => {
                        Compiled::Quadratic(QuadraticForm::from_weights(n, 0, |i, j| g.has_edge(i, j) as i64))
                    }
                    Observable::Magnetization => Compiled::Magnetization,
                    Observable::Omega(k) => {
                        let ak = adjacency_power(g, *k)?;
                        Compiled::Quadratic(QuadraticForm::from_weights(n, ak.trace(), |i, j| 2 * ak.get(i, j)))
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompiledObservables { n, items })
    }

    pub(crate) fn arity(&self) -> usize {
        self.items.len()
    }

    /// Inclusive value bounds per observable.
    pub(crate) fn ranges(&self) -> Vec<(i64, i64)> {
        self.items
            .iter()
            .map(|c| match c {
                Compiled::Quadratic(q) => q.range,
                Compiled::Magnetization => (-(self.n as i64), self.n as i64),
            })
            .collect()
    }

    pub(crate) fn evaluate(&self, sigma: u32, out: &mut [i64]) {
        for (slot, c) in out.iter_mut().zip(&self.items) {
            *slot = match c {
                Compiled::Quadratic(q) => q.value(sigma),
                Compiled::Magnetization => self.n as i64 - 2 * sigma.count_ones() as i64,
            };
        }
    }

    /// `(Δe, Δm)` for flipping spin `i` of `sigma`; relies on `e, m` leading every set.
    #[inline]
    pub(crate) fn energy_magnetization_delta(&self, sigma: u32, i: usize) -> (i64, i64) {
        let de = match &self.items[0] {
            Compiled::Quadratic(q) => q.flip_delta(sigma, i),
            Compiled::Magnetization => unreachable!("energy leads every observable set"),
        };
        (de, -2 * spin(sigma as u64, i))
    }

    /// Updates `values` for flipping spin `i` of `sigma` (the pre-flip state).
    #[inline]
    pub(crate) fn flip(&self, sigma: u32, i: usize, values: &mut [i64]) {
        for (slot, c) in values.iter_mut().zip(&self.items) {
            *slot += match c {
                Compiled::Quadratic(q) => q.flip_delta(sigma, i),
                Compiled::Magnetization => -2 * spin(sigma as u64, i),
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fixture, parse_edge_list};

    #[test]
    fn k2_states() {
        let k2 = parse_edge_list("1,2", 2).unwrap();
        let em = ObservableSet::energy_magnetization();
        assert_eq!(state_observables(&k2, 0, &em).unwrap(), vec![1, 2]);
        assert_eq!(state_observables(&k2, 1, &em).unwrap(), vec![-1, 0]);
        assert!(state_observables(&k2, 4, &em).is_err());
    }

    #[test]
    fn omega1_is_twice_energy() {
        let g = fixture("G13").unwrap();
        let obs = ObservableSet::with_omegas(&[1]).unwrap();
        for sigma in (0..1u64 << 13).step_by(37) {
            let v = state_observables(&g, sigma, &obs).unwrap();
            assert_eq!(v[2], 2 * v[0]);
        }
    }

    #[test]
    fn compiled_matches_direct() {
        let g = fixture("G13p").unwrap();
        let obs = ObservableSet::with_omegas(&[1, 2, 3]).unwrap();
        let c = CompiledObservables::new(&g, &obs).unwrap();
        let mut vals = vec![0; obs.arity()];
        let ranges = c.ranges();
        for sigma in (0..1u32 << 13).step_by(11) {
            c.evaluate(sigma, &mut vals);
            assert_eq!(vals, state_observables(&g, sigma as u64, &obs).unwrap());
            for (v, (lo, hi)) in vals.iter().zip(&ranges) {
                assert!(lo <= v && v <= hi);
            }
            for i in 0..13 {
                let mut upd = vals.clone();
                c.flip(sigma, i, &mut upd);
                assert_eq!(upd, state_observables(&g, (sigma ^ 1 << i) as u64, &obs).unwrap());
            }
        }
    }

    #[test]
    fn parse_observable_lists() {
        let s: ObservableSet = "e,m,omega2".parse().unwrap();
        assert_eq!(s.as_slice(), &[Observable::Energy, Observable::Magnetization, Observable::Omega(2)]);
        let s: ObservableSet = "omega3".parse().unwrap();
        assert_eq!(s.labels(), vec!["e", "m", "omega3"]);
        assert!("omega5".parse::<ObservableSet>().is_err());
        assert!("q".parse::<ObservableSet>().is_err());
    }
}

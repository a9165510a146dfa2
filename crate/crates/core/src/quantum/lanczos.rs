//! Thick-restart Lanczos with full reorthogonalization and locking.
//!
//! Each cycle extends a Krylov basis orthogonal to the locked eigenvectors,
//! locks the Ritz pairs whose explicit residual is below tolerance, and
//! restarts from the lowest unconverged Ritz vectors plus the residual
//! direction. One Krylov space only sees one direction per eigenspace, so
//! further copies of a degenerate eigenvalue are found by repeated runs from
//! fresh random vectors; the search stops after a run that locks nothing new.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{tridiag::symmetric_eigen, Provenance, QuantumOperator, Spectrum};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const PAR_LEN: usize = 1 << 16;
const MEMORY_BUDGET: usize = 2 << 30;

#[derive(Clone, Debug)]
pub struct LanczosOptions<T> {
    /// Bound on `‖Hx − λx‖` for every returned pair.
    pub tol: T,
    pub seed: u64,
    pub max_restarts: usize,
    /// Krylov basis size per cycle; `None` picks `max(2k + 20, 50)`.
    pub basis: Option<usize>,
}

impl<T: Scalar> LanczosOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        LanczosOptions { tol, ..Self::default() }
    }
}

impl<T: Scalar> Default for LanczosOptions<T> {
    fn default() -> Self {
        LanczosOptions { tol: T::from_f64_lossy(1e-10), seed: 0x5eed, max_restarts: 500, basis: None }
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    if a.len() >= PAR_LEN {
        a.par_chunks(PAR_LEN).zip(b.par_chunks(PAR_LEN)).map(|(x, y)| dot(x, y)).sum()
    } else {
        a.iter().zip(b).map(|(&x, &y)| x * y).sum()
    }
}

/// `y += a x`
fn axpy<T: Scalar>(a: T, x: &[T], y: &mut [T]) {
    if y.len() >= PAR_LEN {
        y.par_chunks_mut(PAR_LEN).zip(x.par_chunks(PAR_LEN)).for_each(|(yc, xc)| axpy(a, xc, yc));
    } else {
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = *yi + a * xi;
        }
    }
}

fn scale<T: Scalar>(a: T, x: &mut [T]) {
    x.iter_mut().for_each(|v| *v = *v * a);
}

fn norm<T: Scalar>(x: &[T]) -> T {
    dot(x, x).sqrt()
}

/// Two passes of classical Gram–Schmidt against every vector in `sets`.
fn orthogonalize<T: Scalar>(w: &mut [T], sets: &[&[Vec<T>]]) {
    for _ in 0..2 {
        for set in sets {
            for q in set.iter() {
                let c = dot(w, q);
                axpy(-c, q, w);
            }
        }
    }
}

fn random_unit<T: Scalar>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<T> {
    let mut v: Vec<T> = (0..dim).map(|_| T::from_f64_lossy(rng.random_range(-1.0..1.0))).collect();
    let nv = norm(&v);
    scale(T::one() / nv, &mut v);
    v
}

/// `Σ_j V_j Y[j, col]`
fn ritz_vector<T: Scalar>(basis: &[Vec<T>], y: &[T], m: usize, col: usize) -> Vec<T> {
    let mut x = vec![T::zero(); basis[0].len()];
    for (j, v) in basis.iter().enumerate() {
        axpy(y[j * m + col], v, &mut x);
    }
    x
}

struct Locked<T> {
    vals: Vec<T>,
    vecs: Vec<Vec<T>>,
    worst_residual: Vec<T>,
}

impl<T: Scalar> Locked<T> {
    /// Inserts in sorted position and returns that position.
    fn insert(&mut self, val: T, vec: Vec<T>, res: T) -> usize {
        let at = self.vals.partition_point(|&v| v <= val);
        self.vals.insert(at, val);
        self.vecs.insert(at, vec);
        self.worst_residual.insert(at, res);
        at
    }

    fn truncate(&mut self, k: usize) {
        self.vals.truncate(k);
        self.vecs.truncate(k);
        self.worst_residual.truncate(k);
    }
}

/// The `k` smallest eigenvalues of `op` (ascending, with multiplicity).
pub fn lowest_k_eigenvalues<T: Scalar>(op: &QuantumOperator<T>, k: usize, opts: &LanczosOptions<T>) -> Result<Spectrum<T>> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={dim}")));
    }
    let provenance = Provenance::LanczosLowestK { k };
    if op.is_diagonal() {
        let mut d = op.diagonal().to_vec();
        d.sort_by(|a, b| a.partial_cmp(b).expect("finite diagonal"));
        d.truncate(k);
        return Ok(Spectrum { eigenvalues: d, provenance, residual: T::zero() });
    }
    let anorm = op.norm_bound();
    let tol = opts.tol;
    let floor = T::from_f64_lossy(10.0) * T::epsilon() * anorm;
    if !(tol >= floor) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} is below the attainable {floor}")));
    }
    let vec_bytes = dim * std::mem::size_of::<T>();
    let max_vectors = (MEMORY_BUDGET / vec_bytes).saturating_sub(2 * k + 8);
    let want = opts.basis.unwrap_or((2 * k + 20).max(50));
    let m_cap = want.min(max_vectors);
    if m_cap < 3 && dim > k + 2 {
        return Err(Error::TooLarge { what: "Krylov basis memory (vectors)", got: want + 2 * k, limit: max_vectors });
    }
    let m_cap = m_cap.max(2);
    let keep_cap = (k + 5).min(m_cap / 2).max(1);
    let breakdown = T::from_f64_lossy(100.0) * T::epsilon() * anorm;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked = Locked { vals: Vec::new(), vecs: Vec::new(), worst_residual: Vec::new() };
    let mut w = vec![T::zero(); dim];
    let mut coef = vec![T::zero(); m_cap];
    let mut cycles = 0usize;

    // A run starts from a fresh random vector and thick-restarts until its
    // lowest Ritz value settles above the k-th locked value. The search ends
    // after a run that locked nothing new.
    'runs: loop {
        let avail = dim - locked.vecs.len();
        if avail == 0 {
            break;
        }
        let m = m_cap.min(avail);
        let mut start = random_unit::<T>(&mut rng, dim);
        orthogonalize(&mut start, &[&locked.vecs]);
        let mut ns = norm(&start);
        let mut tries = 0;
        while ns <= T::from_f64_lossy(1e-8) {
            tries += 1;
            if tries > 8 {
                return Err(Error::NonConvergence("could not draw a start vector outside the locked space".into()));
            }
            start = random_unit(&mut rng, dim);
            orthogonalize(&mut start, &[&locked.vecs]);
            ns = norm(&start);
        }
        scale(T::one() / ns, &mut start);

        let mut basis = vec![start];
        // projected matrix, row-major with stride m_cap
        let mut proj = vec![T::zero(); m_cap * m_cap];
        let mut next = 0usize;
        let mut improved = false;

        loop {
            cycles += 1;
            if cycles > opts.max_restarts.max(1) {
                return Err(Error::NonConvergence(format!(
                    "Lanczos located {} of {k} eigenpairs within {} restarts",
                    locked.vals.len().min(k),
                    opts.max_restarts
                )));
            }
            let m = m.min(dim - locked.vecs.len());
            let mut beta_last = T::zero();
            let mut residual_vec = None;
            let mut i = next;
            loop {
                op.apply_into(&basis[i], &mut w)?;
                coef[..basis.len()].iter_mut().for_each(|c| *c = T::zero());
                for _ in 0..2 {
                    for q in &locked.vecs {
                        let c = dot(&w, q);
                        axpy(-c, q, &mut w);
                    }
                    for (j, q) in basis.iter().enumerate() {
                        let c = dot(&w, q);
                        axpy(-c, q, &mut w);
                        coef[j] = coef[j] + c;
                    }
                }
                for j in 0..basis.len() {
                    proj[j * m_cap + i] = coef[j];
                    proj[i * m_cap + j] = coef[j];
                }
                let b = norm(&w);
                if b <= breakdown {
                    break;
                }
                let mut v = w.clone();
                scale(T::one() / b, &mut v);
                if basis.len() >= m {
                    beta_last = b;
                    residual_vec = Some(v);
                    break;
                }
                proj[(i + 1) * m_cap + i] = b;
                proj[i * m_cap + i + 1] = b;
                basis.push(v);
                i += 1;
            }
            let mm = basis.len();
            let small: Vec<T> = (0..mm * mm).map(|t| proj[(t / mm) * m_cap + t % mm]).collect();
            let (theta, y) = symmetric_eigen(&small, mm)?;
            let estimate = |i: usize| (beta_last * y[(mm - 1) * mm + i]).abs();

            if locked.vals.len() >= k && estimate(0) <= tol && theta[0] >= locked.vals[k - 1] - tol {
                if improved {
                    continue 'runs;
                }
                break 'runs;
            }

            let mut kept = Vec::new();
            for i in 0..mm {
                if i < k && estimate(i) <= tol {
                    let mut x = ritz_vector(&basis, &y, mm, i);
                    let nx = norm(&x);
                    scale(T::one() / nx, &mut x);
                    op.apply_into(&x, &mut w)?;
                    let rq = dot(&x, &w);
                    axpy(-rq, &x, &mut w);
                    let res = norm(&w);
                    if res <= tol {
                        improved |= locked.insert(rq, x, res) < k;
                        locked.truncate(k);
                        continue;
                    }
                }
                if kept.len() < keep_cap {
                    kept.push(i);
                }
            }

            let Some(f) = residual_vec else {
                // Exhausted Krylov space: every Ritz pair in it is exact.
                if locked.vals.len() >= k && !improved {
                    break 'runs;
                }
                continue 'runs;
            };

            let mut fresh: Vec<Vec<T>> = kept
                .iter()
                .map(|&i| {
                    let mut x = ritz_vector(&basis, &y, mm, i);
                    let nx = norm(&x);
                    scale(T::one() / nx, &mut x);
                    x
                })
                .collect();
            let p = fresh.len();
            proj.iter_mut().for_each(|x| *x = T::zero());
            for (a, &i) in kept.iter().enumerate() {
                proj[a * m_cap + a] = theta[i];
                let s = beta_last * y[(mm - 1) * mm + i];
                proj[a * m_cap + p] = s;
                proj[p * m_cap + a] = s;
            }
            fresh.push(f);
            basis = fresh;
            next = p;
        }
    }

    if locked.vals.len() < k {
        return Err(Error::NonConvergence(format!("Lanczos located {} of {k} eigenpairs", locked.vals.len())));
    }
    debug_assert!(locked.worst_residual.iter().all(|&r| r <= tol));
    Ok(Spectrum { eigenvalues: locked.vals, provenance, residual: tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fixture, parse_edge_list, Graph};
    use crate::quantum::{full_spectrum_dense, IsingParams};
    use proptest::prelude::*;

    fn lowest(g: &Graph, p: IsingParams<f64>, k: usize) -> Vec<f64> {
        let op = QuantumOperator::transverse(g, &p).unwrap();
        lowest_k_eigenvalues(&op, k, &LanczosOptions::default()).unwrap().eigenvalues
    }

    #[test]
    fn k2_ground_state() {
        let k2 = parse_edge_list("1,2", 2).unwrap();
        let l = lowest(&k2, IsingParams::unit(), 1);
        assert!((l[0] + 2.6040).abs() < 5e-4);
        let all = lowest(&k2, IsingParams::unit(), 4);
        let dense = full_spectrum_dense(&QuantumOperator::transverse(&k2, &IsingParams::unit()).unwrap()).unwrap();
        for (a, b) in all.iter().zip(&dense.eigenvalues) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn single_spin() {
        let g = Graph::empty(1).unwrap();
        let l = lowest(&g, IsingParams::new(0.0, 1.0, 1.0), 2);
        let r = 2f64.sqrt();
        assert!((l[0] + r).abs() < 1e-12 && (l[1] - r).abs() < 1e-12);
    }

    #[test]
    fn free_spins_degenerate_levels() {
        // Δ Σ X_i on 3 spins: levels −3, −1 (×3), 1 (×3), 3.
        let g = Graph::empty(3).unwrap();
        let l = lowest(&g, IsingParams::new(0.0, 0.0, 1.0), 5);
        let expect = [-3.0, -1.0, -1.0, -1.0, 1.0];
        for (a, b) in l.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10, "{l:?}");
        }
    }

    #[test]
    fn highly_degenerate_free_spins_n10() {
        let g = Graph::empty(10).unwrap();
        let l = lowest(&g, IsingParams::new(0.0, 0.0, 0.5), 12);
        assert!((l[0] + 5.0).abs() < 1e-10);
        for v in &l[1..11] {
            assert!((v + 4.0).abs() < 1e-10, "{l:?}");
        }
        assert!((l[11] + 3.0).abs() < 1e-10);
    }

    #[test]
    fn diagonal_shortcut() {
        let g = fixture("G3").unwrap();
        let op = QuantumOperator::transverse(&g, &IsingParams::new(1.0, 1.0, 0.0)).unwrap();
        let s = lowest_k_eigenvalues(&op, 3, &LanczosOptions::default()).unwrap();
        assert_eq!(s.residual, 0.0);
        let mut d = op.diagonal().to_vec();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(s.eigenvalues, d[..3].to_vec());
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = fixture("G3").unwrap();
        let op = QuantumOperator::transverse(&g, &IsingParams::unit()).unwrap();
        assert!(lowest_k_eigenvalues(&op, 0, &LanczosOptions::default()).is_err());
        assert!(lowest_k_eigenvalues(&op, 17, &LanczosOptions::default()).is_err());
        assert!(lowest_k_eigenvalues(&op, 1, &LanczosOptions::with_tol(1e-20)).is_err());
        let capped = LanczosOptions { max_restarts: 1, basis: Some(6), ..LanczosOptions::default() };
        let tiny = LanczosOptions { basis: Some(2), ..LanczosOptions::default() };
        assert!(matches!(lowest_k_eigenvalues(&op, 4, &tiny), Err(Error::TooLarge { .. })));
        assert!(matches!(lowest_k_eigenvalues(&op, 4, &capped), Err(Error::NonConvergence(_))));
    }

    #[test]
    fn g13_lowest_twenty_against_dense() {
        let g = fixture("G13").unwrap();
        let op = QuantumOperator::transverse(&g, &IsingParams::unit()).unwrap();
        let lz = lowest_k_eigenvalues(&op, 20, &LanczosOptions::<f64>::default()).unwrap();
        // Residual bound implies eigenvalue error ≤ tol; compare with a second seed.
        let other = lowest_k_eigenvalues(&op, 20, &LanczosOptions { seed: 99, ..LanczosOptions::default() }).unwrap();
        for (a, b) in lz.eigenvalues.iter().zip(&other.eigenvalues) {
            assert!((a - b).abs() < 2e-10);
        }
    }

    #[test]
    fn f32_solver() {
        let k2 = parse_edge_list("1,2", 2).unwrap();
        let op = QuantumOperator::<f32>::transverse(&k2, &IsingParams::unit()).unwrap();
        let s = lowest_k_eigenvalues(&op, 1, &LanczosOptions::with_tol(1e-4)).unwrap();
        assert!((s.eigenvalues[0] + 2.6040).abs() < 1e-3);
    }

    fn random_graph(seed: u64, n: usize, p: f64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Graph::empty(n).unwrap();
        for b in 1..n {
            for a in 0..b {
                if rng.random_bool(p) {
                    g.add_edge(a, b).unwrap();
                }
            }
        }
        g
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn matches_dense_up_to_n10(seed in any::<u64>(), n in 2usize..=10, k in 1usize..=8,
                                   j in -2i32..=2, h in -2i32..=2, d in 1i32..=3) {
            let g = random_graph(seed, n, 0.4);
            let p = IsingParams::new(j as f64, h as f64, d as f64 * 0.5);
            let op = QuantumOperator::transverse(&g, &p).unwrap();
            let k = k.min(op.dim());
            let lz = lowest_k_eigenvalues(&op, k, &LanczosOptions { seed, ..LanczosOptions::default() }).unwrap();
            let dense = full_spectrum_dense(&op).unwrap();
            for (a, b) in lz.eigenvalues.iter().zip(&dense.eigenvalues) {
                prop_assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", lz.eigenvalues, &dense.eigenvalues[..k]);
            }
        }

        #[test]
        fn relabel_invariant(seed in any::<u64>(), n in 3usize..=9) {
            use rand::seq::SliceRandom;
            let g = random_graph(seed, n, 0.5);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
            let h = g.permuted(&perm);
            let a = lowest(&g, IsingParams::unit(), 6.min(1 << n));
            let b = lowest(&h, IsingParams::unit(), 6.min(1 << n));
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }
    }
}

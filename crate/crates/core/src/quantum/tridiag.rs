//! Small dense symmetric eigenproblems: Householder reduction to tridiagonal
//! form followed by implicit QL iteration.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal `diag`
/// and off-diagonal `off` (`off[i]` couples rows `i` and `i + 1`).
///
/// Returns ascending eigenvalues and the eigenvectors as columns of a
/// row-major `n x n` matrix (`vecs[row * n + col]`).
pub fn tridiagonal_eigen<T: Scalar>(diag: &[T], off: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n - 1, got: off.len() });
    }
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let e = off.iter().copied().chain(std::iter::once(T::zero())).collect();
    tql2(diag.to_vec(), e, v)
}

/// Eigen-decomposition of a dense symmetric `n x n` matrix (row-major; only
/// symmetric input is meaningful). Output layout as in [`tridiagonal_eigen`].
pub fn symmetric_eigen<T: Scalar>(a: &[T], n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, got: a.len() });
    }
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let (d, e, v) = tred2(a, n);
    tql2(d, e, v)
}

/// Householder tridiagonalization. Returns the diagonal, the off-diagonal
/// (`e[i]` couples `i` and `i + 1`, `e[n - 1] = 0`) and the accumulated
/// orthogonal transform.
fn tred2<T: Scalar>(a: &[T], n: usize) -> (Vec<T>, Vec<T>, Vec<T>) {
    let mut v = a.to_vec();
    let at = |i: usize, j: usize| i * n + j;
    let mut d: Vec<T> = (0..n).map(|j| v[at(n - 1, j)]).collect();
    let mut e = vec![T::zero(); n];
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for dk in &d[..i] {
            scale = scale + dk.abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = T::zero();
                v[at(j, i)] = T::zero();
            }
        } else {
            for dk in &mut d[..i] {
                *dk = *dk / scale;
                h = h + *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for ej in &mut e[..i] {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g = g + v[at(k, j)] * d[k];
                    e[k] = e[k] + v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] = v[at(k, j)] - (f * e[k] + g * d[k]);
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g = g + v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] = v[at(k, j)] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = T::zero();
    }
    v[at(n - 1, n - 1)] = T::one();
    // shift so that e[i] couples i and i + 1
    e.remove(0);
    e.push(T::zero());
    (d, e, v)
}

/// Implicit QL on `(d, e)`, applying the rotations to the columns of `v`.
fn tql2<T: Scalar>(mut d: Vec<T>, mut e: Vec<T>, mut v: Vec<T>) -> Result<(Vec<T>, Vec<T>)> {
    let n = d.len();
    let two = T::one() + T::one();
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let max_iter = 60 * n.max(1);

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::NonConvergence("tridiagonal QL iteration".into()));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let vk1 = v[k * n + i + 1];
                        let vk = v[k * n + i];
                        v[k * n + i + 1] = s * vk + c * vk1;
                        v[k * n + i] = c * vk - s * vk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let vals: Vec<T> = order.iter().map(|&i| d[i]).collect();
    let mut vecs = vec![T::zero(); n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vecs[row * n + new_col] = v[row * n + old_col];
        }
    }
    Ok((vals, vecs))
}

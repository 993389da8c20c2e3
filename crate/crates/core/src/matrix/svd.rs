//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! One-sided Jacobi orthogonalises the columns of the working copy in place;
//! on convergence every pair of columns is orthogonal to within a *relative*
//! tolerance, so singular values carry high relative accuracy and the left
//! singular vectors come out orthonormal without a separate QR step.

use num_complex::Complex64;

use super::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Singular values `σ_1 ≥ … ≥ σ_r ≥ 0`, `r = min(rows, cols)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    pub(crate) fn from_sorted(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `σ_{i+1}` in one-based notation.
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Largest singular value (operator norm).
    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Sum of the `k` largest singular values (Ky Fan k-norm).
    pub fn partial_sum(&self, k: usize) -> f64 {
        self.values.iter().take(k).sum()
    }

    /// Sum of all singular values (trace norm).
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `A = U · diag(s) · V*` with `U` (`rows × r`) and `V` (`cols × r`) having
/// orthonormal columns.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: SingularSpectrum,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let r = self.s.len();
        let us = ComplexMatrix::from_fn(self.u.rows(), r, |i, j| self.u.get(i, j) * self.s.get(j));
        &us * &self.v.adjoint()
    }
}

/// Column-major working copy; `m` rows, `n` columns.
struct Work {
    m: usize,
    n: usize,
    cols: Vec<Complex64>,
}

impl Work {
    fn col(&self, j: usize) -> &[Complex64] {
        &self.cols[j * self.m..(j + 1) * self.m]
    }
}

fn column_major(a: &ComplexMatrix) -> Work {
    let (m, n) = a.shape();
    let mut cols = Vec::with_capacity(m * n);
    for j in 0..n {
        for i in 0..m {
            cols.push(a.get(i, j));
        }
    }
    Work { m, n, cols }
}

fn rotate(buf: &mut [Complex64], len: usize, p: usize, q: usize, c: f64, s: f64, phase_conj: Complex64) {
    let (head, tail) = buf.split_at_mut(q * len);
    let xp = &mut head[p * len..(p + 1) * len];
    let xq = &mut tail[..len];
    for (x, y) in xp.iter_mut().zip(xq.iter_mut()) {
        let a = *x;
        let b = *y * phase_conj;
        *x = a * c - b * s;
        *y = a * s + b * c;
    }
}

/// Column norms at or below this are treated as rounding noise and left
/// unrotated.
fn negligible_norm(a: &ComplexMatrix) -> f64 {
    16.0 * f64::EPSILON * a.rows() as f64 * a.frobenius_norm()
}

/// Runs Jacobi sweeps on a tall (`m ≥ n`) matrix. Returns the orthogonalised
/// columns and, if requested, the accumulated right rotation (column-major
/// `n × n`).
fn jacobi(a: &ComplexMatrix, want_v: bool) -> Result<(Work, Option<Vec<Complex64>>)> {
    let mut w = column_major(a);
    let (m, n) = (w.m, w.n);
    debug_assert!(m >= n);
    let mut v = want_v.then(|| {
        let mut v = vec![ZERO; n * n];
        for i in 0..n {
            v[i * n + i] = Complex64::new(1.0, 0.0);
        }
        v
    });
    let tol = f64::EPSILON * m as f64;

    let mut norms: Vec<f64> = (0..n).map(|j| w.col(j).iter().map(|z| z.norm_sqr()).sum()).collect();
    // Rotating noise columns against large ones can cycle without converging.
    let negligible = negligible_norm(a).powi(2);
    for sweep in 0.. {
        if sweep == MAX_SWEEPS {
            return Err(Error::Numerical(format!(
                "Jacobi SVD did not converge within {MAX_SWEEPS} sweeps for a {m}x{n} matrix"
            )));
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma: Complex64 = w.col(p).iter().zip(w.col(q)).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w.cols, m, p, q, c, s, phase_conj);
                if let Some(v) = v.as_mut() {
                    rotate(v, n, p, q, c, s, phase_conj);
                }
                norms[p] = w.col(p).iter().map(|z| z.norm_sqr()).sum();
                norms[q] = w.col(q).iter().map(|z| z.norm_sqr()).sum();
            }
        }
        if !rotated {
            break;
        }
    }
    Ok((w, v))
}

fn nonincreasing_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

/// Fills the columns flagged in `missing` with unit vectors orthogonal to all
/// other columns (Gram–Schmidt against the standard basis, applied twice).
fn complete_orthonormal(cols: &mut [Vec<Complex64>], missing: &[bool]) {
    let m = cols.first().map_or(0, Vec::len);
    for j in 0..cols.len() {
        if !missing[j] {
            continue;
        }
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for e in 0..m {
            let mut x = vec![ZERO; m];
            x[e] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for (l, c) in cols.iter().enumerate() {
                    if l == j || (missing[l] && l > j) {
                        continue;
                    }
                    let proj = super::inner(c, &x);
                    for (xi, ci) in x.iter_mut().zip(c) {
                        *xi -= proj * ci;
                    }
                }
            }
            let nrm = super::vec_norm(&x);
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, x));
            }
            if nrm > 0.5 {
                break;
            }
        }
        let (nrm, x) = best.expect("m > 0");
        cols[j] = x.into_iter().map(|z| z / nrm).collect();
    }
}

/// Thin SVD of a tall matrix.
fn svd_tall(a: &ComplexMatrix) -> Result<Svd> {
    let (m, n) = a.shape();
    let (w, v) = jacobi(a, true)?;
    let v = v.expect("requested");
    let sigma: Vec<f64> = (0..n).map(|j| super::vec_norm(w.col(j))).collect();
    let order = nonincreasing_order(&sigma);
    let smax = sigma[order[0]];
    let cutoff = (smax * f64::EPSILON).max(negligible_norm(a));

    let mut ucols = Vec::with_capacity(n);
    let mut missing = Vec::with_capacity(n);
    for &j in &order {
        let s = sigma[j];
        if s > cutoff && s > f64::MIN_POSITIVE {
            ucols.push(w.col(j).iter().map(|z| z / s).collect::<Vec<_>>());
            missing.push(false);
        } else {
            ucols.push(vec![ZERO; m]);
            missing.push(true);
        }
    }
    complete_orthonormal(&mut ucols, &missing);
    let vcols: Vec<Vec<Complex64>> = order.iter().map(|&j| v[j * n..(j + 1) * n].to_vec()).collect();
    let values = order.iter().map(|&j| sigma[j]).collect();
    Ok(Svd {
        u: ComplexMatrix::from_columns(&ucols)?,
        s: SingularSpectrum::from_sorted(values),
        v: ComplexMatrix::from_columns(&vcols)?,
    })
}

/// Singular value decomposition `A = U · diag(σ) · V*`.
///
/// Returns thin factors: for an `m × n` input, `U` is `m × r` and `V` is
/// `n × r` with `r = min(m, n)`. Fails with [`Error::Numerical`] if the
/// Jacobi sweeps do not converge.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.adjoint())?;
        Ok(Svd { u: t.v, s: t.s, v: t.u })
    }
}

/// Singular values only; skips accumulating the rotations.
pub fn singular_values(a: &ComplexMatrix) -> Result<SingularSpectrum> {
    let tall;
    let a = if a.rows() >= a.cols() {
        a
    } else {
        tall = a.adjoint();
        &tall
    };
    let (w, _) = jacobi(a, false)?;
    let mut values: Vec<f64> = (0..w.n).map(|j| super::vec_norm(w.col(j))).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(SingularSpectrum::from_sorted(values))
}

/// Splits a square `A` as `A = X* Y` with `X = diag(√σ) U*` and
/// `Y = diag(√σ) V*`, so that `c_i(X)` and `c_i(Y)` are balanced.
pub fn factor_sqrt(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::shape("square matrix", format!("{}x{}", a.rows(), a.cols())));
    }
    let Svd { u, s, v } = svd(a)?;
    let n = a.rows();
    let root: Vec<f64> = s.values().iter().map(|x| x.sqrt()).collect();
    let x = ComplexMatrix::from_fn(n, n, |i, j| u.get(j, i).conj() * root[i]);
    let y = ComplexMatrix::from_fn(n, n, |i, j| v.get(j, i).conj() * root[i]);
    Ok((x, y))
}

//! Weighted vector k-norms, their dual, weighted Ky Fan norms and the
//! column-length norm `‖A‖_{c,k}^w = Σ_{i≤k} w_i c_i(A)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{column_norms, singular_values, ComplexMatrix};

/// A weight `w_1 ≥ … ≥ w_n ≥ 0` together with the active prefix length `k`,
/// where `w_k > 0`. Entries past `k` may be zero and are ignored by the norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    entries: Vec<f64>,
    k: usize,
}

impl Weight {
    pub fn new(entries: Vec<f64>, k: usize) -> Result<Self> {
        if k == 0 || k > entries.len() {
            return Err(Error::domain(format!(
                "weight prefix length k = {k} must lie in 1..={}",
                entries.len()
            )));
        }
        if entries.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::domain("weight entries must be finite and nonnegative"));
        }
        if entries.windows(2).any(|p| p[0] < p[1]) {
            return Err(Error::domain("weight entries must be nonincreasing"));
        }
        if entries[k - 1] <= 0.0 {
            return Err(Error::domain(format!("weight entry w_{k} must be strictly positive")));
        }
        Ok(Self { entries, k })
    }

    /// `w = (1, …, 1)` of length `k`; the unweighted k-norm.
    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![1.0; k], k)
    }

    /// Uses every entry: `k = entries.len()`.
    pub fn full(entries: Vec<f64>) -> Result<Self> {
        let k = entries.len();
        Self::new(entries, k)
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `Σ_{i=1}^{j} w_i` for `1 ≤ j ≤ k`.
    pub fn prefix_sum(&self, j: usize) -> f64 {
        assert!(j >= 1 && j <= self.k, "prefix length {j} outside 1..={}", self.k);
        self.entries[..j].iter().sum()
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n < self.k {
            return Err(Error::domain(format!(
                "dimension {n} is smaller than the weight prefix length {}",
                self.k
            )));
        }
        Ok(())
    }
}

/// Absolute values sorted nonincreasing.
fn sorted_abs(x: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    a.sort_by(|p, q| q.total_cmp(p));
    a
}

/// Unweighted `‖x‖_(j)`: sum of the `j` largest absolute entries.
pub fn vector_k_norm(x: &[f64], j: usize) -> f64 {
    sorted_abs(x).iter().take(j).sum()
}

/// `‖x‖_(k)^w = Σ_{i≤k} w_i |x|_i↓`.
pub fn weighted_vector_k_norm(x: &[f64], w: &Weight) -> Result<f64> {
    w.check_dim(x.len())?;
    Ok(weighted_sum(&sorted_abs(x), w))
}

fn weighted_sum(sorted: &[f64], w: &Weight) -> f64 {
    w.entries[..w.k].iter().zip(sorted).map(|(a, b)| a * b).sum()
}

/// The dual of the weighted vector k-norm,
/// `max { ‖x‖_(1)/W_1, …, ‖x‖_(k−1)/W_{k−1}, ‖x‖_(n)/W_k }` where `W_j` is
/// the j-th prefix sum of the weight.
pub fn dual_weighted_vector_k_norm(x: &[f64], w: &Weight) -> Result<f64> {
    w.check_dim(x.len())?;
    Ok(dual_from_sorted(&sorted_abs(x), w))
}

fn dual_from_sorted(sorted: &[f64], w: &Weight) -> f64 {
    let mut best = sorted.iter().sum::<f64>() / w.prefix_sum(w.k);
    let (mut partial, mut wsum) = (0.0, 0.0);
    for (s, e) in sorted.iter().zip(&w.entries).take(w.k - 1) {
        partial += s;
        wsum += e;
        best = best.max(partial / wsum);
    }
    best
}

fn check_square(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::shape("square matrix", format!("{}x{}", a.rows(), a.cols())));
    }
    Ok(())
}

/// `‖A‖_(k)^w = Σ_{i≤k} w_i σ_i(A)`.
pub fn weighted_kyfan_norm(a: &ComplexMatrix, w: &Weight) -> Result<f64> {
    check_square(a)?;
    w.check_dim(a.rows())?;
    Ok(weighted_sum(singular_values(a)?.values(), w))
}

/// Unweighted Ky Fan k-norm, the sum of the `k` largest singular values.
pub fn kyfan_norm(a: &ComplexMatrix, k: usize) -> Result<f64> {
    weighted_kyfan_norm(a, &Weight::uniform(k)?)
}

/// `‖A‖_{c,k}^w = Σ_{i≤k} w_i c_i(A)`.
pub fn weighted_column_norm(a: &ComplexMatrix, w: &Weight) -> Result<f64> {
    check_square(a)?;
    w.check_dim(a.rows())?;
    Ok(weighted_sum(column_norms(a)?.lengths(), w))
}

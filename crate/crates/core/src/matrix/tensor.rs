//! Kronecker products and the partial trace over the first tensor factor.
//!
//! Convention (0-based): `(A ⊗ B)[i·m + k, j·m + l] = A[i, j] · B[k, l]` for
//! `B` of size `m × m`. The partial trace is defined against the same
//! layout, so that `Tr₁(A ⊗ B) = Tr(A) · B`.

use super::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Kronecker product of two square matrices.
pub fn kronecker(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || !b.is_square() {
        return Err(Error::shape(
            "square operands",
            format!("{}x{} and {}x{}", a.rows(), a.cols(), b.rows(), b.cols()),
        ));
    }
    let (n, m) = (a.rows(), b.rows());
    Ok(ComplexMatrix::from_fn(n * m, n * m, |r, c| {
        let (i, k) = (r / m, r % m);
        let (j, l) = (c / m, c % m);
        a.get(i, j) * b.get(k, l)
    }))
}

/// `Tr₁` on an `n² × n²` matrix: `T[k, l] = Σ_i M[i·n + k, i·n + l]`.
pub fn partial_trace_first(m: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let dim = n
        .checked_mul(n)
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::domain(format!("invalid factor dimension {n}")))?;
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::domain(format!(
            "partial trace needs an {dim}x{dim} matrix for factor size {n}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            let mut acc = ZERO;
            for i in 0..n {
                acc += m.get(i * n + k, i * n + l);
            }
            out.set(k, l, acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    fn sample(n: usize, salt: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| {
            Complex64::new((i as f64 * 1.3 + j as f64 * 0.7 + salt).sin(), (i as f64 - 2.0 * j as f64 + salt).cos())
        })
    }

    /// Direct index summation over all (i, k, l), independent of
    /// [`partial_trace_first`].
    fn tr1_oracle(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let n = a.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                let mut acc = ZERO;
                for i in 0..n {
                    acc += a.get(i, i) * b.get(k, l);
                }
                out.set(k, l, acc);
            }
        }
        out
    }

    #[test]
    fn identity_kron_is_block_diagonal() {
        let b = sample(2, 0.3);
        let k = kronecker(&ComplexMatrix::identity(2), &b).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expected = if r / 2 == c / 2 { b.get(r % 2, c % 2) } else { ZERO };
                assert_eq!(k.get(r, c), expected);
            }
        }
    }

    #[test]
    fn mixed_product_and_trace() {
        let (a, b) = (sample(3, 0.1), sample(3, 1.7));
        let i3 = ComplexMatrix::identity(3);
        let lhs = &kronecker(&a, &i3).unwrap() * &kronecker(&i3, &b).unwrap();
        let rhs = kronecker(&a, &b).unwrap();
        assert!((lhs - rhs.clone()).frobenius_norm() < 1e-13);
        assert!((rhs.trace() - a.trace() * b.trace()).norm() < 1e-13);
    }

    #[test]
    fn partial_trace_identities() {
        let (a, b) = (sample(3, 0.4), sample(3, 2.2));
        let t = partial_trace_first(&kronecker(&a, &b).unwrap(), 3).unwrap();
        assert!((t - tr1_oracle(&a, &b)).frobenius_norm() < 1e-13);

        let t = partial_trace_first(&ComplexMatrix::identity(4), 2).unwrap();
        assert_eq!(t, ComplexMatrix::identity(2).scale(2.0));

        let i3 = ComplexMatrix::identity(3);
        let m = kronecker(&b, &i3).unwrap() - kronecker(&i3, &b).unwrap();
        let expected = i3.scale_complex(b.trace()) - b.scale(3.0);
        assert!((partial_trace_first(&m, 3).unwrap() - expected).frobenius_norm() < 1e-13);
    }

    #[test]
    fn partial_trace_rejects_bad_dimensions() {
        assert!(partial_trace_first(&ComplexMatrix::identity(5), 2).is_err());
        assert!(partial_trace_first(&ComplexMatrix::identity(4), 0).is_err());
        assert!(kronecker(&ComplexMatrix::zeros(2, 3), &ComplexMatrix::identity(2)).is_err());
    }
}

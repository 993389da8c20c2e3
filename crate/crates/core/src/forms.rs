//! Masked entrywise bilinear forms `(A • B)_ij = m_ij a_ij b_ij`.
//!
//! The Hadamard product (`m ≡ 1`) and the Fan product (`m_ii = −1`, `m_ij = 1`
//! otherwise) are the two instances of interest. For a symmetric mask the
//! right-adjoint form, defined by `Tr((A • B) C) = Tr((B •_R C) A)`, is simply
//! `B •_R C = Bᵀ • C`.
//!
//! The Fan product factors as `A ⋆ B = Φ(A) Ψ(B)` through the block maps
//! [`phi`] and [`psi`], both of which are contractive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{vec_norm, ComplexMatrix, ZERO};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntrywiseForm {
    name: String,
    n: usize,
    mask: Vec<f64>,
}

impl EntrywiseForm {
    /// A form from an explicit row-major `n × n` real mask.
    pub fn from_mask(name: impl Into<String>, n: usize, mask: Vec<f64>) -> Result<Self> {
        if n == 0 || mask.len() != n * n {
            return Err(Error::shape(format!("{n}x{n} mask"), format!("{} entries", mask.len())));
        }
        if mask.iter().any(|m| !m.is_finite()) {
            return Err(Error::domain("mask entries must be finite"));
        }
        Ok(Self {
            name: name.into(),
            n,
            mask,
        })
    }

    /// The Hadamard product `∘`.
    pub fn hadamard(n: usize) -> Self {
        Self::scaled_hadamard(n, 1.0).with_name("hadamard")
    }

    /// `c · (A ∘ B)`; for `c > 1` it breaks every inequality the Hadamard
    /// product satisfies, which makes it a useful negative control.
    pub fn scaled_hadamard(n: usize, c: f64) -> Self {
        Self {
            name: format!("hadamard*{c}"),
            n,
            mask: vec![c; n * n],
        }
    }

    /// The Fan product `⋆`: Hadamard with the diagonal negated.
    pub fn fan(n: usize) -> Self {
        let mask = (0..n * n).map(|p| if p / n == p % n { -1.0 } else { 1.0 }).collect();
        Self {
            name: "fan".into(),
            n,
            mask,
        }
    }

    fn with_name(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> &[f64] {
        &self.mask
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (i + 1..n).all(|j| self.mask[i * n + j] == self.mask[j * n + i]))
    }

    fn check_operands(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
        let want = (self.n, self.n);
        for m in [a, b] {
            if m.shape() != want {
                return Err(Error::shape(
                    format!("{}x{} operands for form {}", self.n, self.n, self.name),
                    format!("{}x{}", m.rows(), m.cols()),
                ));
            }
        }
        Ok(())
    }
}

/// `(A • B)_ij = m_ij a_ij b_ij`.
pub fn apply_form(f: &EntrywiseForm, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    f.check_operands(a, b)?;
    let n = f.n;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| a.get(i, j) * b.get(i, j) * f.mask[i * n + j]))
}

/// The right-adjoint form `B •_R C = Bᵀ • C`, valid for symmetric masks.
pub fn right_adjoint_apply(f: &EntrywiseForm, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !f.is_symmetric() {
        return Err(Error::domain(format!(
            "form {} has an asymmetric mask; the transpose formula for its right adjoint does not apply",
            f.name
        )));
    }
    apply_form(f, &b.transpose(), c)
}

/// `diag(x)` with the entry at `pos` negated.
pub fn theta_at(x: &[Complex64], pos: usize) -> ComplexMatrix {
    let d: Vec<Complex64> = x.iter().enumerate().map(|(i, &z)| if i == pos { -z } else { z }).collect();
    ComplexMatrix::from_diag(&d)
}

/// `Θ(x) = diag(−x_1, x_2, …, x_n)`.
pub fn theta(x: &[Complex64]) -> ComplexMatrix {
    theta_at(x, 0)
}

fn check_square(a: &ComplexMatrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::shape("square matrix", format!("{}x{}", a.rows(), a.cols())));
    }
    Ok(a.rows())
}

/// `Φ(A) = (Θ_1(a_1) | … | Θ_n(a_n))`, an `n × n²` block row, where block
/// `j` is `diag(a_j)` with its j-th entry negated. With this placement of the
/// sign, `Φ(A) Ψ(B) = A ⋆ B`.
pub fn phi(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = check_square(a)?;
    Ok(ComplexMatrix::from_fn(n, n * n, |i, c| {
        let (j, l) = (c / n, c % n);
        if i != l {
            ZERO
        } else if i == j {
            -a.get(i, j)
        } else {
            a.get(i, j)
        }
    }))
}

/// `Ψ(B) = b_1 ⊕ … ⊕ b_n`, the `n² × n` block diagonal stacking of the
/// columns of `B`.
pub fn psi(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = check_square(b)?;
    Ok(ComplexMatrix::from_fn(n * n, n, |r, j| {
        let (block, i) = (r / n, r % n);
        if block == j {
            b.get(i, j)
        } else {
            ZERO
        }
    }))
}

/// Scales column `i` of `X` by `conj(u_i)` and column `j` of `Y` by
/// `conj(v_j)`, so that `Xs* Ys = (X* Y) ∘ (u v*)`.
pub fn column_scale_factorization(
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    u: &[Complex64],
    v: &[Complex64],
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = check_square(x)?;
    if y.shape() != (n, n) || u.len() != n || v.len() != n {
        return Err(Error::shape(
            format!("{n}x{n} matrices and length-{n} vectors"),
            format!("Y {}x{}, |u| = {}, |v| = {}", y.rows(), y.cols(), u.len(), v.len()),
        ));
    }
    for (name, w) in [("u", u), ("v", v)] {
        let nrm = vec_norm(w);
        if (nrm - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("{name} must be a unit vector, has norm {nrm}")));
        }
    }
    let xs = ComplexMatrix::from_fn(n, n, |i, j| x.get(i, j) * u[j].conj());
    let ys = ComplexMatrix::from_fn(n, n, |i, j| y.get(i, j) * v[j].conj());
    Ok((xs, ys))
}

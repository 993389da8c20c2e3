//! Seeded random matrix ensembles and the extreme-point candidate families
//! `E_j` (signed coordinate vectors), `R_j` (rank-j partial isometries) and
//! `C_j` (j unit columns).
//!
//! Every generator comes in two forms: one taking a [`SeededStream`] (the
//! reproducible public entry point) and a `*_with` form drawing from any
//! [`Rng`], used when one trial needs several correlated samples from a single
//! stream.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{svd, ComplexMatrix, Svd, ZERO};
use crate::norms::{dual_weighted_vector_k_norm, weighted_vector_k_norm, Weight};

/// Identifies the sampling algorithm so stored seeds can be replayed
/// meaningfully across versions.
pub const GENERATOR_ID: &str = "chacha20[seed_from_u64+set_stream]/rand_distr-0.5-standard-normal/v1";

/// Largest candidate enumeration allowed by [`sign_vectors`] and friends.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// A reproducible random stream: ChaCha20 keyed by `master_seed`, with
/// `stream_index` selecting an independent stream. Parallel code assigns one
/// index per trial so results do not depend on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// The same master seed on a different stream.
    pub fn with_index(&self, stream_index: u64) -> Self {
        Self::new(self.master_seed, stream_index)
    }

    /// A new master seed derived from this one and `label` (FNV-1a over the
    /// label, then a SplitMix64 finaliser), keeping unrelated suites that
    /// share a user seed on disjoint streams.
    pub fn derive(&self, label: &str) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        let mut z = self.master_seed ^ h;
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        Self::new(z ^ (z >> 31), self.stream_index)
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard complex Gaussian, `E|z|² = 1`.
fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_unit_vector_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| complex_normal(rng)).collect();
        let nrm = crate::matrix::vec_norm(&v);
        if nrm > 1e-12 {
            return v.into_iter().map(|z| z / nrm).collect();
        }
    }
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

pub fn ginibre(n: usize, s: &SeededStream) -> ComplexMatrix {
    ginibre_with(n, &mut s.rng())
}

/// Haar unitary: Gram–Schmidt (applied twice) on a Ginibre sample. The
/// triangular factor then has a positive real diagonal, which is the phase
/// normalisation that makes the distribution rotation invariant.
pub fn haar_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre_with(n, rng);
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for qc in &q {
                let proj = crate::matrix::inner(qc, &v);
                for (vi, qi) in v.iter_mut().zip(qc) {
                    *vi -= proj * qi;
                }
            }
        }
        let nrm = crate::matrix::vec_norm(&v);
        q.push(v.into_iter().map(|z| z / nrm).collect());
    }
    ComplexMatrix::from_columns(&q).expect("n columns of length n")
}

pub fn haar_unitary(n: usize, s: &SeededStream) -> ComplexMatrix {
    haar_unitary_with(n, &mut s.rng())
}

/// GUE-style Hermitian matrix `(G + G*) / 2`.
pub fn random_hermitian_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre_with(n, rng);
    hermitian_part(&g)
}

pub fn random_hermitian(n: usize, s: &SeededStream) -> ComplexMatrix {
    random_hermitian_with(n, &mut s.rng())
}

pub(crate) fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| (a.get(i, j) + a.get(j, i).conj()) * 0.5)
}

/// `U · diag(t) · V*` with Haar `U`, `V` and `t_i ~ Uniform[0, 1]`.
pub fn random_contraction_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let u = haar_unitary_with(n, rng);
    let v = haar_unitary_with(n, rng);
    let t: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let ud = ComplexMatrix::from_fn(n, n, |i, j| u.get(i, j) * t[j]);
    &ud * &v.adjoint()
}

pub fn random_contraction(n: usize, s: &SeededStream) -> ComplexMatrix {
    random_contraction_with(n, &mut s.rng())
}

/// Two Hermitian matrices sharing a Haar eigenbasis, with independent
/// standard normal eigenvalues.
pub fn commuting_hermitian_pair_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (ComplexMatrix, ComplexMatrix) {
    let w = haar_unitary_with(n, rng);
    let a: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    let b: Vec<f64> = (0..n).map(|_| normal(rng)).collect();
    (conjugate_diag(&w, &a), conjugate_diag(&w, &b))
}

pub fn commuting_hermitian_pair(n: usize, s: &SeededStream) -> (ComplexMatrix, ComplexMatrix) {
    commuting_hermitian_pair_with(n, &mut s.rng())
}

/// Hermitian `W · diag(d) · W*`, symmetrised to remove rounding asymmetry.
pub(crate) fn conjugate_diag(w: &ComplexMatrix, d: &[f64]) -> ComplexMatrix {
    let n = w.rows();
    let wd = ComplexMatrix::from_fn(n, n, |i, j| w.get(i, j) * d[j]);
    hermitian_part(&(&wd * &w.adjoint()))
}

/// Independent columns, each a uniform unit direction scaled by a length
/// drawn from `Uniform[0, 1]`.
pub fn random_subunit_columns_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            let len: f64 = rng.random();
            random_unit_vector_with(n, rng).into_iter().map(|z| z * len).collect()
        })
        .collect();
    ComplexMatrix::from_columns(&cols).expect("square")
}

pub fn random_subunit_columns(n: usize, s: &SeededStream) -> ComplexMatrix {
    random_subunit_columns_with(n, &mut s.rng())
}

fn check_rank(n: usize, j: usize) -> Result<()> {
    if j == 0 || j > n {
        return Err(Error::domain(format!("rank/count j = {j} must lie in 1..={n}")));
    }
    Ok(())
}

/// Rank-`j` partial isometry `U · D_j · V*` with Haar `U`, `V`.
pub fn sample_partial_isometry_with<R: Rng + ?Sized>(n: usize, j: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_rank(n, j)?;
    let u = haar_unitary_with(n, rng);
    let v = haar_unitary_with(n, rng);
    let ud = ComplexMatrix::from_fn(n, n, |r, c| if c < j { u.get(r, c) } else { ZERO });
    Ok(&ud * &v.adjoint())
}

pub fn sample_partial_isometry(n: usize, j: usize, s: &SeededStream) -> Result<ComplexMatrix> {
    sample_partial_isometry_with(n, j, &mut s.rng())
}

/// An element of `C_j`: `j` uniformly chosen column positions hold independent
/// uniform unit vectors, the rest are zero.
pub fn sample_unit_columns_with<R: Rng + ?Sized>(n: usize, j: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_rank(n, j)?;
    let mut cols = vec![vec![ZERO; n]; n];
    let mut positions = index::sample(rng, n, j).into_vec();
    positions.sort_unstable();
    for p in positions {
        cols[p] = random_unit_vector_with(n, rng);
    }
    ComplexMatrix::from_columns(&cols)
}

pub fn sample_unit_columns(n: usize, j: usize, s: &SeededStream) -> Result<ComplexMatrix> {
    sample_unit_columns_with(n, j, &mut s.rng())
}

/// A random weight of length `n`: `k ~ Uniform{1..n}`, positive nonincreasing
/// head of length `k`, and a tail that is zero half of the time.
pub fn random_weight_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Weight {
    let k = rng.random_range(1..=n);
    let zero_tail = rng.random_bool(0.5);
    let mut e: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    e.sort_by(|a, b| b.total_cmp(a));
    if zero_tail {
        e[k..].iter_mut().for_each(|x| *x = 0.0);
    }
    Weight::new(e, k).expect("constructed weight is valid")
}

fn binomial(n: usize, j: usize) -> u128 {
    let j = j.min(n - j);
    (0..j).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn sign_vector_count(n: usize, j: usize) -> u128 {
    binomial(n, j).saturating_mul(1u128 << j.min(127))
}

/// All of `E_j`: vectors in ℝⁿ with exactly `j` nonzero coordinates, each ±1.
/// Ordered by support (lexicographic) then sign pattern.
pub fn sign_vectors(n: usize, j: usize) -> Result<Vec<Vec<f64>>> {
    let flat = sign_vectors_flat(n, j)?;
    Ok(flat.chunks(n).map(<[f64]>::to_vec).collect())
}

fn sign_vectors_flat(n: usize, j: usize) -> Result<Vec<f64>> {
    check_rank(n, j)?;
    let count = sign_vector_count(n, j);
    if count > ENUMERATION_LIMIT {
        return Err(Error::Budget {
            required: count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut out = Vec::with_capacity(count as usize * n);
    let mut support: Vec<usize> = (0..j).collect();
    loop {
        for signs in 0u32..(1 << j) {
            let start = out.len();
            out.resize(start + n, 0.0);
            for (b, &p) in support.iter().enumerate() {
                out[start + p] = if signs >> b & 1 == 1 { -1.0 } else { 1.0 };
            }
        }
        // next combination in lexicographic order
        let Some(i) = (0..j).rev().find(|&i| support[i] < n - j + i) else {
            break;
        };
        support[i] += 1;
        for t in i + 1..j {
            support[t] = support[t - 1] + 1;
        }
    }
    Ok(out)
}

type SignCache = Mutex<HashMap<(usize, usize), Arc<Vec<f64>>>>;

fn cached_sign_vectors(n: usize, j: usize) -> Result<Arc<Vec<f64>>> {
    static CACHE: OnceLock<SignCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().expect("cache poisoned").get(&(n, j)) {
        return Ok(Arc::clone(v));
    }
    let v = Arc::new(sign_vectors_flat(n, j)?);
    cache.lock().expect("cache poisoned").insert((n, j), Arc::clone(&v));
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Signed coordinate vectors.
    E,
    /// Partial isometries.
    R,
    /// Matrices with unit columns.
    C,
}

/// Which scaled family `scale · F_j` an element was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleTag {
    pub family: Family,
    pub j: usize,
    pub scale: f64,
}

/// The scaled families making up the candidate extreme points of a weighted
/// k-norm ball in dimension `n`: `(W_j)⁻¹ F_j` for `j < k`, and
/// `(W_k)⁻¹ F_n`.
pub fn candidate_families(w: &Weight, n: usize, family: Family) -> Vec<ScaleTag> {
    let k = w.k();
    (1..k)
        .map(|j| ScaleTag {
            family,
            j,
            scale: 1.0 / w.prefix_sum(j),
        })
        .chain(std::iter::once(ScaleTag {
            family,
            j: n,
            scale: 1.0 / w.prefix_sum(k),
        }))
        .collect()
}

/// A finite set of candidate extreme points in ℝⁿ, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    dim: usize,
    data: Vec<f64>,
    tags: Vec<ScaleTag>,
}

impl CandidateSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn element(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn tag(&self, i: usize) -> ScaleTag {
        self.tags[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], ScaleTag)> {
        self.data.chunks(self.dim).zip(self.tags.iter().copied())
    }
}

fn validate_dim(w: &Weight, n: usize) -> Result<()> {
    if n < w.k() {
        return Err(Error::domain(format!("dimension {n} is below the weight prefix length {}", w.k())));
    }
    let total: u128 = (1..w.k())
        .chain(std::iter::once(n))
        .map(|j| sign_vector_count(n, j))
        .fold(0u128, u128::saturating_add);
    if total > ENUMERATION_LIMIT {
        return Err(Error::Budget {
            required: total,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

/// Enumerates `⋃_{j<k} (W_j)⁻¹ E_j ∪ (W_k)⁻¹ E_n`, checking that every
/// element lies on the unit sphere of the weighted k-norm.
pub fn vector_ball_candidates(w: &Weight, n: usize) -> Result<CandidateSet> {
    validate_dim(w, n)?;
    let mut data = Vec::new();
    let mut tags = Vec::new();
    for tag in candidate_families(w, n, Family::E) {
        let base = cached_sign_vectors(n, tag.j)?;
        data.extend(base.iter().map(|x| x * tag.scale));
        tags.extend(std::iter::repeat_n(tag, base.len() / n));
    }
    let set = CandidateSet { dim: n, data, tags };
    for (x, tag) in set.iter() {
        let norm = weighted_vector_k_norm(x, w)?;
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Numerical(format!(
                "candidate from family E_{} has norm {norm}, expected 1",
                tag.j
            )));
        }
    }
    Ok(set)
}

/// Maximum of `⟨c, x⟩` over the enumerated candidate set.
pub fn candidate_support(c: &[f64], w: &Weight) -> Result<f64> {
    let n = c.len();
    validate_dim(w, n)?;
    let mut best = f64::NEG_INFINITY;
    for tag in candidate_families(w, n, Family::E) {
        let base = cached_sign_vectors(n, tag.j)?;
        let m = base
            .chunks(n)
            .map(|x| x.iter().zip(c).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        best = best.max(m * tag.scale);
    }
    Ok(best)
}

/// `|max_{x ∈ candidates} ⟨c, x⟩ − ‖c‖_(k)*^w|`. A linear functional attains
/// its maximum over a ball at extreme points, so this vanishes exactly when
/// the candidate families and the dual-norm formula agree.
pub fn support_function_gap(c: &[f64], w: &Weight) -> Result<f64> {
    let support = candidate_support(c, w)?;
    let dual = dual_weighted_vector_k_norm(c, w)?;
    Ok((support - dual).abs())
}

/// `Re Tr(C* X)`.
pub fn real_trace_pairing(c: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
    c.data().iter().zip(x.data()).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Matrix analogue of [`support_function_gap`] for the weighted Ky Fan ball.
///
/// For each scaled family `(W_j)⁻¹ R_j` the best aligned partial isometry
/// `U_j V_j*` is built from the singular vectors of `C` and `Re Tr(C* X)` is
/// evaluated on it; the largest value is compared with the dual norm of
/// `σ(C)`. Additionally `samples` random scaled partial isometries must not
/// beat that maximum. Returns the larger of the gap and any such excess.
pub fn matrix_ball_support_gap(c: &ComplexMatrix, w: &Weight, samples: usize, s: &SeededStream) -> Result<f64> {
    if !c.is_square() {
        return Err(Error::shape("square matrix", format!("{}x{}", c.rows(), c.cols())));
    }
    let n = c.rows();
    if n < w.k() {
        return Err(Error::domain(format!("dimension {n} is below the weight prefix length {}", w.k())));
    }
    let Svd { u, s: sigma, v } = svd(c)?;
    let families = candidate_families(w, n, Family::R);
    let mut best = f64::NEG_INFINITY;
    for tag in &families {
        let uj = ComplexMatrix::from_fn(n, n, |r, col| if col < tag.j { u.get(r, col) } else { ZERO });
        let aligned = &uj * &v.adjoint();
        best = best.max(real_trace_pairing(c, &aligned) * tag.scale);
    }
    let dual = dual_weighted_vector_k_norm(sigma.values(), w)?;
    let mut gap = (best - dual).abs();

    let mut rng = s.rng();
    for _ in 0..samples {
        let tag = families[rng.random_range(0..families.len())];
        let x = sample_partial_isometry_with(n, tag.j, &mut rng)?;
        let value = real_trace_pairing(c, &x) * tag.scale;
        gap = gap.max(value - best);
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{column_norms, singular_values};
    use crate::norms::{weighted_column_norm, weighted_kyfan_norm};

    #[test]
    fn sign_vector_examples() {
        assert_eq!(
            sign_vectors(2, 1).unwrap(),
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]
        );
        let e22 = sign_vectors(2, 2).unwrap();
        assert_eq!(e22.len(), 4);
        assert!(e22.iter().all(|v| v.iter().all(|x| x.abs() == 1.0)));
        assert_eq!(sign_vectors(4, 2).unwrap().len(), 24);
        assert!(matches!(sign_vectors(30, 15), Err(Error::Budget { .. })));
        assert!(sign_vectors(3, 0).is_err());
    }

    #[test]
    fn haar_unitary_properties() {
        let s = SeededStream::new(11, 3);
        for n in 1..=8 {
            let u = haar_unitary(n, &s);
            assert!(u.unitarity_residual() <= 1e-12 * n as f64);
            for x in singular_values(&u).unwrap().values() {
                assert!((x - 1.0).abs() < 1e-12);
            }
        }
        let a = haar_unitary(5, &s);
        let b = haar_unitary(5, &s);
        assert_eq!(a.data(), b.data());
        assert_ne!(a.data(), haar_unitary(5, &s.with_index(4)).data());
    }

    #[test]
    fn derived_streams_differ() {
        let s = SeededStream::new(42, 0);
        assert_ne!(s.derive("a").master_seed, s.derive("b").master_seed);
        assert_eq!(s.derive("a"), s.derive("a"));
    }

    #[test]
    fn partial_isometry_samples() {
        let s = SeededStream::new(5, 0);
        let u = sample_partial_isometry(4, 4, &s).unwrap();
        assert!(u.unitarity_residual() < 1e-12);
        for j in 1..=4 {
            let p = sample_partial_isometry(4, j, &s.with_index(j as u64)).unwrap();
            let sv = singular_values(&p).unwrap();
            for (i, x) in sv.values().iter().enumerate() {
                let expected = if i < j { 1.0 } else { 0.0 };
                assert!((x - expected).abs() < 1e-12, "{:?}", sv);
            }
            assert!((sv.total() - j as f64).abs() < 1e-10);
        }
        assert!(sample_partial_isometry(3, 0, &s).is_err());
    }

    #[test]
    fn unit_column_samples() {
        let s = SeededStream::new(9, 1);
        for j in 1..=5 {
            let m = sample_unit_columns(5, j, &s).unwrap();
            let c = column_norms(&m).unwrap();
            for (i, x) in c.lengths().iter().enumerate() {
                let expected = if i < j { 1.0 } else { 0.0 };
                assert!((x - expected).abs() < 1e-12);
            }
            assert_eq!(m, sample_unit_columns(5, j, &s).unwrap());
        }
        // C_n / k is on the unit sphere of ‖·‖_{c,k} with unit weights.
        let full = sample_unit_columns(5, 5, &s).unwrap();
        for k in 1..=5 {
            let w = Weight::uniform(k).unwrap();
            let v = weighted_column_norm(&full.scale(1.0 / k as f64), &w).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn plumbing_generators() {
        let s = SeededStream::new(77, 2);
        let g = ginibre(4, &s);
        assert_eq!(g, ginibre(4, &s));
        assert_eq!(g.shape(), (4, 4));
        let h = random_hermitian(4, &s);
        assert!(h.is_hermitian(0.0));
        let c = random_contraction(6, &s);
        assert!(singular_values(&c).unwrap().max() <= 1.0 + 1e-12);
        let (a, b) = commuting_hermitian_pair(5, &s);
        assert!(a.is_hermitian(0.0) && b.is_hermitian(0.0));
        let comm = &a * &b - &b * &a;
        assert!(comm.frobenius_norm() <= 1e-10 * (1.0 + a.frobenius_norm() * b.frobenius_norm()));
        let sub = random_subunit_columns(5, &s);
        assert!(sub.column_lengths().iter().all(|&l| l <= 1.0 + 1e-15));
        assert_eq!(sub, random_subunit_columns(5, &s));
    }

    #[test]
    fn vector_candidates_examples() {
        let set = vector_ball_candidates(&Weight::uniform(2).unwrap(), 2).unwrap();
        assert_eq!(set.len(), 8);
        for (x, _) in set.iter() {
            let nrm = weighted_vector_k_norm(x, &Weight::uniform(2).unwrap()).unwrap();
            assert!((nrm - 1.0).abs() < 1e-15);
        }
        let w = Weight::full(vec![2.0, 1.0]).unwrap();
        let set = vector_ball_candidates(&w, 2).unwrap();
        let scales: Vec<(usize, f64)> = set.iter().map(|(_, t)| (t.j, t.scale)).collect();
        assert_eq!(&scales[..4], &[(1, 0.5); 4]);
        assert_eq!(&scales[4..], &[(2, 1.0 / 3.0); 4]);
        let set = vector_ball_candidates(&Weight::full(vec![4.0]).unwrap(), 3).unwrap();
        assert!(set.iter().all(|(_, t)| t.j == 3 && t.scale == 0.25));
        assert_eq!(set.len(), 8);
    }

    #[test]
    fn support_function_examples() {
        let w = Weight::uniform(2).unwrap();
        assert!((candidate_support(&[1.0, 0.0, 0.0], &w).unwrap() - 1.0).abs() < 1e-15);
        assert!((candidate_support(&[1.0, 1.0, 1.0], &w).unwrap() - 1.5).abs() < 1e-15);
        let mut rng = SeededStream::new(1, 0).rng();
        for _ in 0..200 {
            let c: Vec<f64> = (0..3).map(|_| normal(&mut rng)).collect();
            assert!(support_function_gap(&c, &w).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn matrix_support_examples() {
        let c = ComplexMatrix::from_real_diag(&[3.0, 2.0, 1.0]);
        let s = SeededStream::new(3, 0);
        assert!(matrix_ball_support_gap(&c, &Weight::uniform(2).unwrap(), 50, &s).unwrap() <= 1e-10);
        assert!(matrix_ball_support_gap(&c, &Weight::full(vec![1.5]).unwrap(), 50, &s).unwrap() <= 1e-10);
        let g = ginibre(5, &s);
        let w = Weight::full(vec![3.0, 2.0, 0.5]).unwrap();
        assert!(matrix_ball_support_gap(&g, &w, 200, &s).unwrap() <= 1e-10);
    }

    #[test]
    fn matrix_candidates_lie_on_unit_sphere() {
        let s = SeededStream::new(8, 0);
        let mut rng = s.rng();
        let w = Weight::full(vec![3.0, 2.0, 2.0, 0.5]).unwrap();
        for tag in candidate_families(&w, 5, Family::R) {
            let x = sample_partial_isometry_with(5, tag.j, &mut rng).unwrap();
            let nrm = weighted_kyfan_norm(&x.scale(tag.scale), &w).unwrap();
            assert!((nrm - 1.0).abs() < 1e-12);
        }
    }
}

//! Partial-trace operators on `ℂⁿ ⊗ ℂⁿ` and a randomized search for
//! counterexamples to two open singular value bounds.
//!
//! For Hermitian `A`, `B` let
//! `L(A, B) = Tr₁[(A ⊗ I + I ⊗ A)(B ⊗ I − I ⊗ B)]` and
//! `T(B) = Tr₁(B ⊗ I − I ⊗ B) = Tr(B)·I − n·B`. The questions ask whether,
//! for every `k`,
//!
//! * Question 1: `‖L‖_(k) ≤ 2 σ_1(A) ‖T‖_(k)`,
//! * Question 2: `‖L‖_(k) ≤ 2 Σ_{i≤k} σ_i(A) σ_i(T)`.
//!
//! Both hold when `A` and `B` commute. Nothing here can settle them; the
//! search only reports the best margin it reached.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{haar_unitary_with, SeededStream, GENERATOR_ID};
use crate::error::{Error, Result};
use crate::matrix::{kronecker, partial_trace_first, singular_values, ComplexMatrix, ZERO};
use crate::suite::{KSelect, DEFAULT_TOLERANCE};

/// Largest allowed `max |a_ij − conj(a_ji)|` for a Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Allowed disagreement between the brute-force and closed-form `L`,
/// relative to `max(1, ‖A‖_F ‖B‖_F)`.
pub const CROSS_CHECK_TOL: f64 = 1e-10;

pub const NO_COUNTEREXAMPLE: &str = "no counterexample found within budget";
pub const CANDIDATE_FOUND: &str = "counterexample candidate found (margin above tolerance)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Question {
    One,
    Two,
}

impl From<Question> for u8 {
    fn from(q: Question) -> u8 {
        match q {
            Question::One => 1,
            Question::Two => 2,
        }
    }
}

impl TryFrom<u8> for Question {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            _ => Err(Error::Parse(format!("question must be 1 or 2, got {v}"))),
        }
    }
}

impl FromStr for Question {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<u8>()
            .map_err(|_| Error::Parse(format!("question must be 1 or 2, got {s:?}")))
            .and_then(Self::try_from)
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

fn check_hermitian(name: &str, m: &ComplexMatrix) -> Result<()> {
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::domain(format!(
            "{name} must be Hermitian within {HERMITIAN_TOL:e}, defect is {defect:e}"
        )));
    }
    Ok(())
}

fn check_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<usize> {
    check_hermitian("A", a)?;
    check_hermitian("B", b)?;
    if a.shape() != b.shape() {
        return Err(Error::shape(
            format!("{0}x{0} B", a.rows()),
            format!("{}x{}", b.rows(), b.cols()),
        ));
    }
    Ok(a.rows())
}

/// A Hermitian pair together with the question and `k` it is scored under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct QuestionInstance {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub n: usize,
    pub question: Question,
    pub k: usize,
}

#[derive(Deserialize)]
struct RawInstance {
    a: ComplexMatrix,
    b: ComplexMatrix,
    n: usize,
    question: Question,
    k: usize,
}

impl TryFrom<RawInstance> for QuestionInstance {
    type Error = Error;

    fn try_from(r: RawInstance) -> Result<Self> {
        let inst = Self::new(r.a, r.b, r.question, r.k)?;
        if inst.n != r.n {
            return Err(Error::shape(format!("n = {}", inst.n), format!("n = {}", r.n)));
        }
        Ok(inst)
    }
}

impl QuestionInstance {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, question: Question, k: usize) -> Result<Self> {
        let n = check_pair(&a, &b)?;
        if k == 0 || k > n {
            return Err(Error::domain(format!("k = {k} must lie in 1..={n}")));
        }
        Ok(Self { a, b, n, question, k })
    }
}

/// `Tr₁[(A ⊗ I + I ⊗ A)(B ⊗ I − I ⊗ B)]` evaluated literally on `ℂ^{n²}`.
pub fn lhs_operator_brute(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = check_pair(a, b)?;
    let id = ComplexMatrix::identity(n);
    let left = kronecker(a, &id)?.try_add(&kronecker(&id, a)?)?;
    let right = kronecker(b, &id)?.try_sub(&kronecker(&id, b)?)?;
    partial_trace_first(&left.matmul(&right)?, n)
}

/// `Tr(AB)·I − Tr(A)·B + Tr(B)·A − n·AB`.
pub fn lhs_operator_closed(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = check_pair(a, b)?;
    Ok(closed_form(a, b, n))
}

fn closed_form(a: &ComplexMatrix, b: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let ab = a * b;
    let (tr_ab, tr_a, tr_b) = (ab.trace(), a.trace(), b.trace());
    let nf = n as f64;
    ComplexMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { tr_ab } else { ZERO };
        diag - tr_a * b.get(i, j) + tr_b * a.get(i, j) - ab.get(i, j) * nf
    })
}

/// `L(A, B)`, computed both ways; fails if the two disagree.
pub fn lhs_operator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let brute = lhs_operator_brute(a, b)?;
    let closed = lhs_operator_closed(a, b)?;
    let residual = (&brute - &closed).frobenius_norm();
    let scale = (a.frobenius_norm() * b.frobenius_norm()).max(1.0);
    if residual > CROSS_CHECK_TOL * scale {
        return Err(Error::Numerical(format!(
            "partial-trace cross-check failed: brute force and closed form differ by {residual:e}"
        )));
    }
    Ok(closed)
}

/// `Tr(B)·I − n·B`.
pub fn tr1_difference(b: &ComplexMatrix) -> ComplexMatrix {
    let n = b.rows();
    let tr = b.trace();
    ComplexMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { tr } else { ZERO };
        diag - b.get(i, j) * n as f64
    })
}

/// Margins `lhs − rhs` for `k = 1..=n` (index `k − 1`).
pub fn question_margins(a: &ComplexMatrix, b: &ComplexMatrix, question: Question) -> Result<Vec<f64>> {
    let n = check_pair(a, b)?;
    margins_unchecked(a, b, n, question)
}

fn margins_unchecked(a: &ComplexMatrix, b: &ComplexMatrix, n: usize, question: Question) -> Result<Vec<f64>> {
    let l = singular_values(&closed_form(a, b, n))?;
    let t = singular_values(&tr1_difference(b))?;
    let sa = singular_values(a)?;
    let mut out = Vec::with_capacity(n);
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for i in 0..n {
        lhs += l.get(i);
        rhs += match question {
            Question::One => 2.0 * sa.max() * t.get(i),
            Question::Two => 2.0 * sa.get(i) * t.get(i),
        };
        out.push(lhs - rhs);
    }
    Ok(out)
}

/// `lhs − rhs` of the instance's question at its `k`. Positive values are
/// counterexample candidates.
pub fn question_margin(inst: &QuestionInstance) -> Result<f64> {
    let n = check_pair(&inst.a, &inst.b)?;
    if inst.k == 0 || inst.k > n {
        return Err(Error::domain(format!("k = {} must lie in 1..={n}", inst.k)));
    }
    Ok(margins_unchecked(&inst.a, &inst.b, n, inst.question)?[inst.k - 1])
}

/// The worst margin among the admitted `k`, with that `k` (ties go to the
/// smallest `k`).
pub fn worst_margin(a: &ComplexMatrix, b: &ComplexMatrix, question: Question, k: KSelect) -> Result<(f64, usize)> {
    let margins = question_margins(a, b, question)?;
    select_worst(&margins, k)
}

fn select_worst(margins: &[f64], k: KSelect) -> Result<(f64, usize)> {
    match k {
        KSelect::Only(j) if j == 0 || j > margins.len() => {
            Err(Error::domain(format!("k = {j} must lie in 1..={}", margins.len())))
        }
        KSelect::Only(j) => Ok((margins[j - 1], j)),
        KSelect::All => Ok(margins
            .iter()
            .enumerate()
            .fold((f64::NEG_INFINITY, 0), |(bm, bk), (i, &m)| if m > bm { (m, i + 1) } else { (bm, bk) })),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub question: Question,
    pub n: usize,
    pub k: KSelect,
    /// Total number of margin evaluations, shared across restarts.
    pub budget: u64,
    pub restarts: u64,
    pub seed: u64,
    /// Restrict to commuting pairs `W diag(a) W*`, `W diag(b) W*`.
    pub commuting: bool,
    pub tolerance: f64,
}

impl SearchConfig {
    pub fn new(question: Question, n: usize, budget: u64, seed: u64) -> Self {
        Self {
            question,
            n,
            k: KSelect::All,
            budget,
            restarts: 8,
            seed,
            commuting: false,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    fn strategy(&self) -> String {
        let space = if self.commuting {
            "commuting pairs (shared Haar eigenbasis, perturbed eigenvalues)"
        } else {
            "Hermitian pairs (real diagonal + complex strict upper triangle)"
        };
        format!(
            "multi-start greedy coordinate ascent over {space}; Gaussian steps, step halving on stagnation, \
             unit Frobenius normalisation; {} restarts",
            self.restarts
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub question: Question,
    pub n: usize,
    pub k_policy: KSelect,
    #[serde(with = "crate::report::extended_f64")]
    pub best_margin: f64,
    /// The `k` at which `best_margin` was attained (0 if nothing was evaluated).
    pub best_k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<QuestionInstance>,
    pub evaluations: u64,
    pub restarts: u64,
    pub budget: u64,
    pub commuting: bool,
    pub tolerance: f64,
    pub strategy: String,
    pub master_seed: u64,
    pub generator: String,
    pub outcome: String,
    pub elapsed_seconds: f64,
}

impl SearchResult {
    pub fn found_candidate(&self) -> bool {
        self.witness.is_some()
    }
}

/// Real coordinates of a search point.
#[derive(Clone)]
enum Point {
    /// `n²` reals per matrix: the diagonal, then (re, im) of each entry
    /// above it, row by row.
    General { a: Vec<f64>, b: Vec<f64> },
    /// Eigenvalues under the fixed unitary `w`.
    Commuting { w: ComplexMatrix, a: Vec<f64>, b: Vec<f64> },
}

fn hermitian_from_params(n: usize, p: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::from_real_diag(&p[..n]);
    let mut idx = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = Complex64::new(p[idx], p[idx + 1]);
            m.set(i, j, z);
            m.set(j, i, z.conj());
            idx += 2;
        }
    }
    m
}

fn normalise(v: &mut [f64]) {
    let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nrm > 0.0 {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
}

impl Point {
    fn random(n: usize, commuting: bool, rng: &mut ChaCha20Rng) -> Self {
        let mut draw = |len: usize| {
            let mut v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
            normalise(&mut v);
            v
        };
        if commuting {
            let (a, b) = (draw(n), draw(n));
            Point::Commuting {
                w: haar_unitary_with(n, rng),
                a,
                b,
            }
        } else {
            Point::General {
                a: draw(n * n),
                b: draw(n * n),
            }
        }
    }

    fn matrices(&self, n: usize) -> (ComplexMatrix, ComplexMatrix) {
        match self {
            Point::General { a, b } => (hermitian_from_params(n, a), hermitian_from_params(n, b)),
            Point::Commuting { w, a, b } => (
                crate::ensembles::conjugate_diag(w, a),
                crate::ensembles::conjugate_diag(w, b),
            ),
        }
    }

    fn dims(&self) -> usize {
        match self {
            Point::General { a, .. } | Point::Commuting { a, .. } => a.len(),
        }
    }

    /// Moves coordinate `c` (of the concatenated parameter vector) by `delta`
    /// and renormalises the matrix it belongs to.
    fn perturbed(&self, c: usize, delta: f64) -> Self {
        let mut next = self.clone();
        let d = self.dims();
        let (Point::General { a, b } | Point::Commuting { a, b, .. }) = &mut next;
        let v = if c < d { a } else { b };
        v[c % d] += delta;
        normalise(v);
        next
    }
}

struct RestartOutcome {
    margin: f64,
    k: usize,
    point: Option<Point>,
    evaluations: u64,
}

fn score(p: &Point, cfg: &SearchConfig) -> Result<(f64, usize)> {
    let (a, b) = p.matrices(cfg.n);
    let margins = margins_unchecked(&a, &b, cfg.n, cfg.question)?;
    let (m, k) = select_worst(&margins, cfg.k)?;
    Ok((if m.is_nan() { f64::NEG_INFINITY } else { m }, k))
}

fn run_restart(cfg: &SearchConfig, budget: u64, stream: SeededStream) -> Result<RestartOutcome> {
    let mut out = RestartOutcome {
        margin: f64::NEG_INFINITY,
        k: 0,
        point: None,
        evaluations: 0,
    };
    if budget == 0 {
        return Ok(out);
    }
    let mut rng = stream.rng();
    let mut point = Point::random(cfg.n, cfg.commuting, &mut rng);
    let (mut best, mut best_k) = score(&point, cfg)?;
    out.evaluations = 1;
    let coords = 2 * point.dims();
    let patience = coords as u64;
    let mut step = 0.5;
    let mut stale = 0;
    while out.evaluations < budget {
        let c = rng.random_range(0..coords);
        let delta = step * rng.sample::<f64, _>(StandardNormal);
        let cand = point.perturbed(c, delta);
        let (m, k) = score(&cand, cfg)?;
        out.evaluations += 1;
        if m > best {
            (best, best_k, point) = (m, k, cand);
            stale = 0;
        } else {
            stale += 1;
            if stale >= patience {
                step *= 0.5;
                stale = 0;
                if step < 1e-9 {
                    step = 0.5;
                }
            }
        }
    }
    let (a, b) = point.matrices(cfg.n);
    lhs_operator(&a, &b)?;
    out.margin = best;
    out.k = best_k;
    out.point = Some(point);
    Ok(out)
}

/// Multi-start greedy search maximising the question margin.
///
/// The budget is split as evenly as possible across restarts, which run in
/// parallel on streams indexed by restart number; the best restart wins, ties
/// going to the lowest index. A witness is attached only when the best margin
/// exceeds `cfg.tolerance`.
pub fn search_counterexample(cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    if let KSelect::Only(k) = cfg.k {
        if k > cfg.n {
            return Err(Error::domain(format!("k = {k} must lie in 1..={}", cfg.n)));
        }
    }
    let start = Instant::now();
    let restarts = cfg.restarts.max(1);
    let base = SeededStream::new(cfg.seed, 0).derive(&format!(
        "ptrace/q{}/n={}/{}",
        cfg.question,
        cfg.n,
        if cfg.commuting { "commuting" } else { "general" }
    ));
    let outcomes = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let share = cfg.budget / restarts + u64::from(r < cfg.budget % restarts);
            run_restart(cfg, share, base.with_index(r)).map(|o| (r, o))
        })
        .collect::<Result<Vec<_>>>()?;

    let evaluations = outcomes.iter().map(|(_, o)| o.evaluations).sum();
    let best = outcomes
        .into_iter()
        .filter(|(_, o)| o.point.is_some())
        .reduce(|x, y| if y.1.margin > x.1.margin { y } else { x });

    let (best_margin, best_k, witness) = match best {
        Some((_, o)) => {
            let witness = if o.margin > cfg.tolerance {
                let (a, b) = o.point.as_ref().expect("filtered").matrices(cfg.n);
                Some(QuestionInstance::new(a, b, cfg.question, o.k)?)
            } else {
                None
            };
            (o.margin, o.k, witness)
        }
        None => (f64::NEG_INFINITY, 0, None),
    };

    Ok(SearchResult {
        question: cfg.question,
        n: cfg.n,
        k_policy: cfg.k,
        best_margin,
        best_k,
        outcome: if witness.is_some() { CANDIDATE_FOUND } else { NO_COUNTEREXAMPLE }.into(),
        witness,
        evaluations,
        restarts,
        budget: cfg.budget,
        commuting: cfg.commuting,
        tolerance: cfg.tolerance,
        strategy: cfg.strategy(),
        master_seed: cfg.seed,
        generator: GENERATOR_ID.into(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Largest margin of either question over `samples` random commuting
/// Hermitian pairs and every `k`.
pub fn commuting_regression(n: usize, samples: u64, seed: u64) -> Result<f64> {
    let base = SeededStream::new(seed, 0).derive(&format!("ptrace/commuting/n={n}"));
    (0..samples)
        .into_par_iter()
        .map(|t| {
            let mut rng = base.with_index(t).rng();
            let (a, b) = crate::ensembles::commuting_hermitian_pair_with(n, &mut rng);
            let mut worst = f64::NEG_INFINITY;
            for q in [Question::One, Question::Two] {
                for m in question_margins(&a, &b, q)? {
                    worst = worst.max(m);
                }
            }
            Ok(worst)
        })
        .try_reduce(|| f64::NEG_INFINITY, |x, y| Ok(x.max(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{haar_unitary, random_hermitian, random_hermitian_with};
    use rand::SeedableRng;

    fn pair(n: usize, seed: u64) -> (ComplexMatrix, ComplexMatrix) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (random_hermitian_with(n, &mut rng), random_hermitian_with(n, &mut rng))
    }

    #[test]
    fn identity_substitutions() {
        let b = random_hermitian(3, &SeededStream::new(1, 0));
        let i3 = ComplexMatrix::identity(3);
        let t = tr1_difference(&b);
        let l = lhs_operator(&i3, &b).unwrap();
        assert!((&l - &t.scale(2.0)).frobenius_norm() < 1e-12);
        assert!(lhs_operator(&b, &i3).unwrap().frobenius_norm() < 1e-12);
        for k in 1..=3 {
            let m = question_margin(&QuestionInstance::new(i3.clone(), b.clone(), Question::One, k).unwrap()).unwrap();
            assert!(m.abs() < 1e-12, "k = {k}: {m}");
            let m = question_margin(&QuestionInstance::new(b.clone(), i3.clone(), Question::Two, k).unwrap()).unwrap();
            assert_eq!(m, 0.0);
        }
    }

    #[test]
    fn tr1_difference_matches_partial_trace() {
        let b = random_hermitian(4, &SeededStream::new(2, 0));
        let id = ComplexMatrix::identity(4);
        let direct = partial_trace_first(&(kronecker(&b, &id).unwrap() - kronecker(&id, &b).unwrap()), 4).unwrap();
        assert!((&direct - &tr1_difference(&b)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn brute_force_matches_closed_form() {
        for seed in 0..20 {
            let (a, b) = pair(1 + (seed as usize % 5), seed);
            let r = (lhs_operator_brute(&a, &b).unwrap() - lhs_operator_closed(&a, &b).unwrap()).frobenius_norm();
            assert!(r <= 1e-10, "{r}");
        }
    }

    #[test]
    fn rejects_non_hermitian_and_bad_k() {
        let mut a = ComplexMatrix::identity(2);
        a.set(0, 1, Complex64::new(1.0, 0.0));
        let b = ComplexMatrix::identity(2);
        assert!(lhs_operator(&a, &b).is_err());
        assert!(QuestionInstance::new(a, b.clone(), Question::One, 1).is_err());
        assert!(QuestionInstance::new(b.clone(), b.clone(), Question::One, 3).is_err());
        assert!(QuestionInstance::new(b.clone(), ComplexMatrix::identity(3), Question::One, 1).is_err());
        assert!("3".parse::<Question>().is_err());
    }

    #[test]
    fn commuting_pairs_satisfy_both_questions() {
        for n in 1..=5 {
            assert!(commuting_regression(n, 50, 11).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn margins_invariant_under_unitary_conjugation() {
        let (a, b) = pair(4, 5);
        let w = haar_unitary(4, &SeededStream::new(9, 0));
        let conj = |m: &ComplexMatrix| crate::ensembles::hermitian_part(&(&(&w * m) * &w.adjoint()));
        for q in [Question::One, Question::Two] {
            let before = question_margins(&a, &b, q).unwrap();
            let after = question_margins(&conj(&a), &conj(&b), q).unwrap();
            for (x, y) in before.iter().zip(&after) {
                assert!((x - y).abs() <= 1e-9, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn zero_budget_is_a_sentinel() {
        let r = search_counterexample(&SearchConfig::new(Question::One, 3, 0, 1)).unwrap();
        assert_eq!(r.best_margin, f64::NEG_INFINITY);
        assert_eq!(r.evaluations, 0);
        assert!(r.witness.is_none());
        assert_eq!(r.outcome, NO_COUNTEREXAMPLE);
        let text = crate::report::to_json_string(&r);
        assert!(text.contains("\"best_margin\": \"-inf\""), "{text}");
        let back: SearchResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back.best_margin, f64::NEG_INFINITY);
    }

    #[test]
    fn search_is_deterministic_and_spends_its_budget() {
        let mut cfg = SearchConfig::new(Question::Two, 3, 203, 4);
        cfg.restarts = 4;
        let mut a = search_counterexample(&cfg).unwrap();
        let mut b = search_counterexample(&cfg).unwrap();
        assert_eq!(a.evaluations, 203);
        a.elapsed_seconds = 0.0;
        b.elapsed_seconds = 0.0;
        assert_eq!(a, b);
        assert!(a.best_k >= 1 && a.best_k <= 3);
        cfg.commuting = true;
        let c = search_counterexample(&cfg).unwrap();
        assert!(c.best_margin <= 1e-8, "{}", c.best_margin);
        assert!(c.witness.is_none());
    }

    #[test]
    fn witness_reevaluates_to_best_margin() {
        // A negative tolerance turns whatever point the search ends on into a
        // witness.
        let mut cfg = SearchConfig::new(Question::One, 3, 300, 8);
        cfg.tolerance = -10.0;
        let r = search_counterexample(&cfg).unwrap();
        let w = r.witness.as_ref().expect("tolerance below any margin");
        assert!((question_margin(w).unwrap() - r.best_margin).abs() <= 1e-10);
        let text = crate::report::to_json_string(&r);
        let back: SearchResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back.witness, r.witness);
    }
}

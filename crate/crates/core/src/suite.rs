//! Randomized checkers for the singular value inequalities, plus the exact
//! Fan-product counterexample.
//!
//! Each inequality is an [`Inequality`]: it knows how to draw one trial
//! instance from a random stream and how to evaluate `(lhs, rhs)` for every
//! relevant `k`. [`run_check`] drives the trials in parallel, one stream per
//! trial index, and aggregates them into a [`CheckReport`]. Aggregation only
//! uses max / count / lowest-index tie-breaking, so reports do not depend on
//! scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{
    ginibre_with, haar_unitary_with, random_contraction_with, random_subunit_columns_with, random_unit_vector_with,
    sample_partial_isometry_with, sample_unit_columns_with, SeededStream, GENERATOR_ID,
};
use crate::error::{Error, Result};
use crate::forms::{apply_form, right_adjoint_apply, EntrywiseForm};
use crate::matrix::{column_norms, factor_sqrt, singular_values, svd, ComplexMatrix, SingularSpectrum};
use crate::report::to_json_string;

/// Relative slack used throughout: an inequality holds when
/// `lhs ≤ rhs + tol · max(1, rhs)`.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

pub fn holds(lhs: f64, rhs: f64, tol: f64) -> bool {
    lhs <= rhs + tol * rhs.abs().max(1.0)
}

/// Named matrices making up one trial.
pub type Instance = BTreeMap<String, ComplexMatrix>;

/// One `(lhs, rhs)` pair at a given `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl Term {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// Result of evaluating an instance: the inequality terms, and optional
/// hypothesis probe values (used by the Horn–Mathias–Nakamura checker).
#[derive(Debug, Clone, Default)]
pub struct Evaluation {
    pub terms: Vec<Term>,
    pub probes: Vec<f64>,
}

pub trait Inequality: Sync {
    /// Stable identifier used in reports and on the command line.
    fn id(&self) -> String;

    fn sample(&self, n: usize, trial: u64, rng: &mut ChaCha20Rng) -> Result<Instance>;

    fn evaluate(&self, inst: &Instance) -> Result<Evaluation>;

    /// Names of the probe values, if any.
    fn probe_names(&self) -> &'static [&'static str] {
        &[]
    }
}

fn sv(m: &ComplexMatrix) -> Result<SingularSpectrum> {
    singular_values(m)
}

fn get<'a>(inst: &'a Instance, key: &str) -> Result<&'a ComplexMatrix> {
    inst.get(key)
        .ok_or_else(|| Error::domain(format!("instance is missing matrix {key:?}")))
}

fn instance<const N: usize>(items: [(&str, ComplexMatrix); N]) -> Instance {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// `Σ_{i≤k} σ_i(L)` against `Σ_{i≤k} r_i` for every `k`.
fn partial_sum_terms(lhs: &SingularSpectrum, rhs: &[f64]) -> Vec<Term> {
    let (mut l, mut r) = (0.0, 0.0);
    lhs.values()
        .iter()
        .zip(rhs)
        .enumerate()
        .map(|(i, (a, b))| {
            l += a;
            r += b;
            Term { k: i + 1, lhs: l, rhs: r }
        })
        .collect()
}

fn products(a: &SingularSpectrum, b: &SingularSpectrum) -> Vec<f64> {
    a.values().iter().zip(b.values()).map(|(x, y)| x * y).collect()
}

/// `|Tr(AB)| ≤ Σ σ_i(A) σ_i(B)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct VonNeumann;

impl Inequality for VonNeumann {
    fn id(&self) -> String {
        "von-neumann".into()
    }

    fn sample(&self, n: usize, _trial: u64, rng: &mut ChaCha20Rng) -> Result<Instance> {
        Ok(instance([("A", ginibre_with(n, rng)), ("B", ginibre_with(n, rng))]))
    }

    fn evaluate(&self, inst: &Instance) -> Result<Evaluation> {
        let (a, b) = (get(inst, "A")?, get(inst, "B")?);
        let lhs = (a * b).trace().norm();
        let rhs = products(&sv(a)?, &sv(b)?).iter().sum();
        Ok(Evaluation {
            terms: vec![Term { k: a.rows(), lhs, rhs }],
            probes: vec![],
        })
    }
}

/// `Σ_{i≤k} σ_i(AB) ≤ Σ_{i≤k} σ_i(A) σ_i(B)`; `k = n` is the trace-norm case.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProductFamily;

impl Inequality for ProductFamily {
    fn id(&self) -> String {
        "product-family".into()
    }

    fn sample(&self, n: usize, _trial: u64, rng: &mut ChaCha20Rng) -> Result<Instance> {
        Ok(instance([("A", ginibre_with(n, rng)), ("B", ginibre_with(n, rng))]))
    }

    fn evaluate(&self, inst: &Instance) -> Result<Evaluation> {
        let (a, b) = (get(inst, "A")?, get(inst, "B")?);
        Ok(Evaluation {
            terms: partial_sum_terms(&sv(&(a * b))?, &products(&sv(a)?, &sv(b)?)),
            probes: vec![],
        })
    }
}

/// `Σ_{i≤k} σ_i(A ∘ B) ≤ Σ_{i≤k} σ_i(A) σ_i(B)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HadamardFamily;

impl Inequality for HadamardFamily {
    fn id(&self) -> String {
        "hadamard-family".into()
    }

    fn sample(&self, n: usize, _trial: u64, rng: &mut ChaCha20Rng) -> Result<Instance> {
        Ok(instance([("A", ginibre_with(n, rng)), ("B", ginibre_with(n, rng))]))
    }

    fn evaluate(&self, inst: &Instance) -> Result<Evaluation> {
        let (a, b) = (get(inst, "A")?, get(inst, "B")?);
        Ok(Evaluation {
            terms: partial_sum_terms(&sv(&a.hadamard(b)?)?, &products(&sv(a)?, &sv(b)?)),
            probes: vec![],
        })
    }
}

/// How the factors of `A = X* Y` are produced in the Ando–Horn–Johnson check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factorization {
    /// `X`, `Y` sampled directly; every fourth trial has a zero column in `X`.
    Given,
    /// `A` sampled, then split with [`factor_sqrt`].
    Sqrt,
}

impl FromStr for Factorization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "given" => Ok(Self::Given),
            "sqrt" => Ok(Self::Sqrt),
            other => Err(Error::Parse(format!("unknown factorization {other:?} (expected given or sqrt)"))),
        }
    }
}

/// `Σ_{i≤k} σ_i(X*Y ∘ B) ≤ Σ_{i≤k} c_i(X) c_i(Y) σ_i(B)`.
#[derive(Debug, Clone, Copy)]
pub struct AndoHornJohnson {
    pub factorization: Factorization,
}

impl Inequality for AndoHornJohnson {
    fn id(&self) -> String {
        match self.factorization {
            Factorization::Given => "ahj".into(),
            Factorization::Sqrt => "ahj-sqrt".into(),
        }
    }

    fn sample(&self, n: usize, trial: u64, rng: &mut ChaCha20Rng) -> Result<Instance> {
        match self.factorization {
            Factorization::Given => {
                let mut x = ginibre_with(n, rng);
                let y = ginibre_with(n, rng);
                let b = ginibre_with(n, rng);
                if trial % 4 == 3 {
                    let col = rng.random_range(0..n);
                    x = ComplexMatrix::from_fn(n, n, |i, j| if j == col { Complex64::new(0.0, 0.0) } else { x.get(i, j) });
                }
                Ok(instance([("X", x), ("Y", y), ("B", b)]))
            }
            Factorization::Sqrt => {
                let a = ginibre_with(n, rng);
                let b = ginibre_with(n, rng);
                let (x, y) = factor_sqrt(&a)?;
                Ok(instance([("A", a), ("X", x), ("Y", y), ("B", b)]))
            }
        }
    }

    fn evaluate(&self, inst: &Instance) -> Result<Evaluation> {
        let (x, y, b) = (get(inst, "X")?, get(inst, "Y")?, get(inst, "B")?);
        let prod = (&x.adjoint() * y).hadamard(b)?;
        let (cx, cy, sb) = (column_norms(x)?, column_norms(y)?, sv(b)?);
        let rhs: Vec<f64> = (0..sb.len()).map(|i| cx.get(i) * cy.get(i) * sb.get(i)).collect();
        Ok(Evaluation {
            terms: partial_sum_terms(&sv(&prod)?, &rhs),
            probes: vec![],
        })
    }
}

/// The fixed 3×3 instance showing that the contraction lemma fails for the Fan
/// product: `X = Y = J/√3` and an orthogonal `U`.
pub fn fan_counterexample_inputs() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let x = ComplexMatrix::ones(3, 3).scale(1.0 / 3f64.sqrt());
    let u = ComplexMatrix::from_real(3, 3, &[2.0, 1.0, 2.0, -2.0, 2.0, 1.0, 1.0, 2.0, -2.0])
        .expect("finite")
        .scale(1.0 / 3.0);
    (x.clone(), x, u)
}

/// `σ_1((X*Y) • S) ≤ 1` whenever `c_i(X), c_i(Y) ≤ 1` and `S` is a
/// contraction. True for the Hadamard product, false for the Fan product.
///
/// Even trials use exactly unit columns, odd trials sub-unit columns; `S` is a
/// Haar unitary on every other trial and a random contraction otherwise. For
/// the Fan mask at `n = 3`, trial 0 is replaced by the known counterexample.
#[derive(Debug, Clone)]
pub struct ContractionLemma {
    pub form: EntrywiseForm,
}

impl Inequality for ContractionLemma {
    fn id(&self) -> String {
        match self.form.name() {
            "hadamard" => "lemma31".into(),
            other => format!("lemma31-{other}"),
        }
    }

    fn sample(&self, n: usize, trial: u64, rng: &mut ChaCha20Rng) -> Result<Instance> {
        if trial == 0 && n == 3 && self.form == EntrywiseForm::fan(3) {
            let (x, y, u) = fan_counterexample_inputs();
            return Ok(instance([("X", x), ("Y", y), ("S", u)]));
        }
        let (x, y) = if trial.is_multiple_of(2) {
            (sample_unit_columns_with(n, n, rng)?, sample_unit_columns_with(n, n, rng)?)
        } else {
            (random_subunit_columns_with(n, rng), random_subunit_columns_with(n, rng))
        };
        let s = if trial % 4 >= 2 {
            haar_unitary_with(n, rng)
        } else {
            random_contraction_with(n, rng)
        };
        Ok(instance([("X", x), ("Y", y), ("S", s)]))
    }

    fn evaluate(&self, inst: &Instance) -> Result<Evaluation> {
        let (x, y, s) = (get(inst, "X")?, get(inst, "Y")?, get(inst, "S")?);
        let lhs = sv(&apply_form(&self.form, &(&x.adjoint() * y), s)?)?.max();
        Ok(Evaluation {
            terms: vec![Term { k: 1, lhs, rhs: 1.0 }],
            probes: vec![],
        })
    }
}

/// `Σ_i σ_i((X*Y) ∘ Q) ≤ 1` for unit-column `X`, `Y` and rank-one partial
/// isometry `Q = u v*`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RankOneLemma;

impl Inequality for RankOneLemma {
    fn id(&self) -> String {
        "lemma32".into()
    }

    fn sample(&self, n: usize, _trial: u64, rng: &mut ChaCha20Rng) -> Result<Instance> {
        let x = sample_unit_columns_with(n, n, rng)?;
        let y = sample_unit_columns_with(n, n, rng)?;
        let u = ComplexMatrix::column_vector(&random_unit_vector_with(n, rng));
        let v = ComplexMatrix::column_vector(&random_unit_vector_with(n, rng));
        Ok(instance([("X", x), ("Y", y), ("u", u), ("v", v)]))
    }

    fn evaluate(&self, inst: &Instance) -> Result<Evaluation> {
        let (x, y, u, v) = (get(inst, "X")?, get(inst, "Y")?, get(inst, "u")?, get(inst, "v")?);
        let q = u * &v.adjoint();
        let lhs = sv(&(&x.adjoint() * y).hadamard(&q)?)?.total();
        Ok(Evaluation {
            terms: vec![Term { k: x.rows(), lhs, rhs: 1.0 }],
            probes: vec![],
        })
    }
}

/// The Horn–Mathias–Nakamura characterisation for a masked form `•`: the
/// family `Σ_{i≤k} σ_i(A • B) ≤ Σ_{i≤k} σ_i(A) σ_i(B)` holds iff
/// `σ_1(A • B)` and `σ_1(A •_R B)` are both bounded by `σ_1(A) σ_1(B)`.
///
/// Trials cycle through four contraction ensembles: random contractions, Haar
/// unitaries, rank-one partial isometries and diagonal unitaries. The probe
/// values are the two hypothesis ratios.
#[derive(Debug, Clone)]
pub struct HornMathiasNakamura {
    pub form: EntrywiseForm,
}

impl HornMathiasNakamura {
    pub fn new(form: EntrywiseForm) -> Result<Self> {
        if !form.is_symmetric() {
            return Err(Error::domain(format!("form {} has an asymmetric mask", form.name())));
        }
        Ok(Self { form })
    }
}

fn diagonal_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let d: Vec<Complex64> = (0..n)
        .map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU))
        .collect();
    ComplexMatrix::from_diag(&d)
}

impl Inequality for HornMathiasNakamura {
    fn id(&self) -> String {
        format!("hmn-{}", self.form.name())
    }

    fn sample(&self, n: usize, trial: u64, rng: &mut ChaCha20Rng) -> Result<Instance> {
        let draw = |rng: &mut ChaCha20Rng| -> Result<ComplexMatrix> {
            Ok(match trial % 4 {
                0 => random_contraction_with(n, rng),
                1 => haar_unitary_with(n, rng),
                2 => sample_partial_isometry_with(n, 1, rng)?,
                _ => diagonal_unitary(n, rng),
            })
        };
        let a = draw(rng)?;
        let b = draw(rng)?;
        Ok(instance([("A", a), ("B", b)]))
    }

    fn evaluate(&self, inst: &Instance) -> Result<Evaluation> {
        let (a, b) = (get(inst, "A")?, get(inst, "B")?);
        let (sa, sb) = (sv(a)?, sv(b)?);
        let prod = sv(&apply_form(&self.form, a, b)?)?;
        let adj = sv(&right_adjoint_apply(&self.form, a, b)?)?;
        let scale = sa.max() * sb.max();
        let ratio = |s: &SingularSpectrum| if scale > 0.0 { s.max() / scale } else { 0.0 };
        Ok(Evaluation {
            probes: vec![ratio(&prod), ratio(&adj)],
            terms: partial_sum_terms(&prod, &products(&sa, &sb)),
        })
    }

    fn probe_names(&self) -> &'static [&'static str] {
        &["sigma1_form_ratio", "sigma1_right_adjoint_ratio"]
    }
}

/// `σ_1(A ⋆ B) ≤ σ_1(A) σ_1(B)` and `σ_1(Aᵀ ⋆ B) ≤ σ_1(A) σ_1(B)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FanSigmaOne;

impl Inequality for FanSigmaOne {
    fn id(&self) -> String {
        "fan-sigma1".into()
    }

    fn sample(&self, n: usize, _trial: u64, rng: &mut ChaCha20Rng) -> Result<Instance> {
        Ok(instance([("A", ginibre_with(n, rng)), ("B", ginibre_with(n, rng))]))
    }

    fn evaluate(&self, inst: &Instance) -> Result<Evaluation> {
        let (a, b) = (get(inst, "A")?, get(inst, "B")?);
        let fan = EntrywiseForm::fan(a.rows());
        let rhs = sv(a)?.max() * sv(b)?.max();
        let direct = sv(&apply_form(&fan, a, b)?)?.max();
        let transposed = sv(&apply_form(&fan, &a.transpose(), b)?)?.max();
        Ok(Evaluation {
            terms: vec![Term { k: 1, lhs: direct, rhs }, Term { k: 1, lhs: transposed, rhs }],
            probes: vec![],
        })
    }
}

/// Which `k` values a run reports on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KSelect {
    #[default]
    All,
    #[serde(untagged)]
    Only(usize),
}

impl FromStr for KSelect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(Self::All);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Self::Only(k)),
            _ => Err(Error::Parse(format!("invalid k {s:?} (expected \"all\" or a positive integer)"))),
        }
    }
}

impl fmt::Display for KSelect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::All => f.write_str("all"),
            Self::Only(k) => write!(f, "{k}"),
        }
    }
}

impl KSelect {
    fn admits(&self, k: usize) -> bool {
        match self {
            Self::All => true,
            Self::Only(j) => *j == k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub k: KSelect,
}

impl SuiteConfig {
    pub fn new(n: usize, trials: u64, seed: u64) -> Self {
        Self {
            n,
            trials,
            seed,
            tolerance: DEFAULT_TOLERANCE,
            k: KSelect::All,
        }
    }
}

/// Inputs of one trial together with the `k` and margin it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: u64,
    pub k: usize,
    #[serde(with = "crate::report::extended_f64")]
    pub margin: f64,
    pub matrices: Instance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMargin {
    pub k: usize,
    #[serde(with = "crate::report::extended_f64")]
    pub worst_margin: f64,
}

/// Maximum observed hypothesis ratio. Labelled as an observation, never a
/// proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSummary {
    pub name: String,
    #[serde(with = "crate::report::extended_f64")]
    pub max_ratio: f64,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub inequality_id: String,
    pub n: usize,
    pub k_range: Vec<usize>,
    pub trials: u64,
    pub violations: u64,
    /// Largest `lhs − rhs` over all trials and `k`; positive means the
    /// inequality was exceeded (though possibly within tolerance).
    #[serde(with = "crate::report::extended_f64")]
    pub worst_margin: f64,
    pub per_k: Vec<KMargin>,
    pub tolerance: f64,
    pub master_seed: u64,
    pub generator: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<ProbeSummary>,
    /// For checkers with hypothesis probes: whether "all hypotheses observed
    /// ≤ 1 + tol" agrees with "no family violations".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistent_with_iff: Option<bool>,
    /// Worst trial, kept when at least one violation occurred.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub elapsed_seconds: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// JSON body with wall-time fields zeroed, for replay comparisons.
    pub fn body_json(&self) -> String {
        let mut r = self.clone();
        r.elapsed_seconds = 0.0;
        to_json_string(&r)
    }
}

#[derive(Clone)]
struct Aggregate {
    violations: u64,
    per_k: BTreeMap<usize, f64>,
    probes: Vec<f64>,
    /// (margin, trial, k, instance) of the worst trial, ties to the lowest
    /// trial index.
    worst: Option<(f64, u64, usize, Instance)>,
}

impl Aggregate {
    fn empty(n_probes: usize) -> Self {
        Self {
            violations: 0,
            per_k: BTreeMap::new(),
            probes: vec![f64::NEG_INFINITY; n_probes],
            worst: None,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.violations += other.violations;
        for (k, m) in other.per_k {
            let e = self.per_k.entry(k).or_insert(f64::NEG_INFINITY);
            *e = e.max(m);
        }
        for (a, b) in self.probes.iter_mut().zip(other.probes) {
            *a = a.max(b);
        }
        self.worst = match (self.worst, other.worst) {
            (None, w) | (w, None) => w,
            (Some(a), Some(b)) => {
                let b_wins = b.0 > a.0 || (b.0 == a.0 && b.1 < a.1);
                Some(if b_wins { b } else { a })
            }
        };
        self
    }
}

fn nan_as_violation(m: f64) -> f64 {
    if m.is_nan() {
        f64::INFINITY
    } else {
        m
    }
}

/// The random stream a checker uses for trial `trial`.
pub fn trial_stream(id: &str, n: usize, seed: u64, trial: u64) -> SeededStream {
    SeededStream::new(seed, 0).derive(&format!("{id}/n={n}")).with_index(trial)
}

/// Runs `cfg.trials` independent trials of `ineq` and aggregates them.
pub fn run_check(ineq: &dyn Inequality, cfg: &SuiteConfig) -> Result<CheckReport> {
    if cfg.n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let start = Instant::now();
    let id = ineq.id();
    let n_probes = ineq.probe_names().len();
    let agg = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<Aggregate> {
            let mut rng = trial_stream(&id, cfg.n, cfg.seed, t).rng();
            let inst = ineq.sample(cfg.n, t, &mut rng)?;
            let eval = ineq.evaluate(&inst)?;
            let mut agg = Aggregate::empty(n_probes);
            let mut trial_worst: Option<(f64, usize)> = None;
            let mut violated = false;
            for term in eval.terms.iter().filter(|t| cfg.k.admits(t.k)) {
                let m = nan_as_violation(term.margin());
                let e = agg.per_k.entry(term.k).or_insert(f64::NEG_INFINITY);
                *e = e.max(m);
                if term.margin().is_nan() || !holds(term.lhs, term.rhs, cfg.tolerance) {
                    violated = true;
                }
                if trial_worst.is_none_or(|(w, _)| m > w) {
                    trial_worst = Some((m, term.k));
                }
            }
            for (a, b) in agg.probes.iter_mut().zip(&eval.probes) {
                *a = a.max(*b);
            }
            agg.violations = u64::from(violated);
            if violated {
                let (m, k) = trial_worst.expect("a violated trial has a term");
                agg.worst = Some((m, t, k, inst));
            }
            Ok(agg)
        })
        .try_reduce(|| Aggregate::empty(n_probes), |a, b| Ok(a.merge(b)))?;

    let worst_margin = agg.per_k.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let probes: Vec<ProbeSummary> = ineq
        .probe_names()
        .iter()
        .zip(&agg.probes)
        .map(|(name, &max_ratio)| ProbeSummary {
            name: (*name).to_string(),
            max_ratio,
            status: if holds(max_ratio, 1.0, cfg.tolerance) {
                "no violation observed".into()
            } else {
                "violated".into()
            },
        })
        .collect();
    let consistent_with_iff = (!probes.is_empty()).then(|| {
        let hypotheses_hold = probes.iter().all(|p| holds(p.max_ratio, 1.0, cfg.tolerance));
        hypotheses_hold == (agg.violations == 0)
    });

    Ok(CheckReport {
        inequality_id: id,
        n: cfg.n,
        k_range: agg.per_k.keys().copied().collect(),
        trials: cfg.trials,
        violations: agg.violations,
        worst_margin,
        per_k: agg
            .per_k
            .iter()
            .map(|(&k, &worst_margin)| KMargin { k, worst_margin })
            .collect(),
        tolerance: cfg.tolerance,
        master_seed: cfg.seed,
        generator: GENERATOR_ID.into(),
        probes,
        consistent_with_iff,
        witness: agg.worst.map(|(margin, trial, k, matrices)| Witness {
            trial,
            k,
            margin,
            matrices,
        }),
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Recomputes the margin a witness recorded.
pub fn reevaluate(ineq: &dyn Inequality, w: &Witness) -> Result<f64> {
    let eval = ineq.evaluate(&w.matrices)?;
    eval.terms
        .iter()
        .filter(|t| t.k == w.k)
        .map(|t| nan_as_violation(t.margin()))
        .reduce(f64::max)
        .ok_or_else(|| Error::domain(format!("witness k = {} not produced by {}", w.k, ineq.id())))
}

pub fn check_von_neumann(n: usize, trials: u64, seed: u64) -> Result<CheckReport> {
    run_check(&VonNeumann, &SuiteConfig::new(n, trials, seed))
}

pub fn check_product_family(n: usize, trials: u64, seed: u64) -> Result<CheckReport> {
    run_check(&ProductFamily, &SuiteConfig::new(n, trials, seed))
}

pub fn check_hadamard_family(n: usize, trials: u64, seed: u64) -> Result<CheckReport> {
    run_check(&HadamardFamily, &SuiteConfig::new(n, trials, seed))
}

pub fn check_ahj(n: usize, trials: u64, seed: u64, factorization: Factorization) -> Result<CheckReport> {
    run_check(&AndoHornJohnson { factorization }, &SuiteConfig::new(n, trials, seed))
}

pub fn check_lemma31(form: &EntrywiseForm, n: usize, trials: u64, seed: u64) -> Result<CheckReport> {
    run_check(&ContractionLemma { form: form.clone() }, &SuiteConfig::new(n, trials, seed))
}

pub fn check_lemma32(n: usize, trials: u64, seed: u64) -> Result<CheckReport> {
    run_check(&RankOneLemma, &SuiteConfig::new(n, trials, seed))
}

pub fn check_hmn(form: &EntrywiseForm, n: usize, trials: u64, seed: u64) -> Result<CheckReport> {
    run_check(&HornMathiasNakamura::new(form.clone())?, &SuiteConfig::new(n, trials, seed))
}

pub fn check_fan_sigma1(n: usize, trials: u64, seed: u64) -> Result<CheckReport> {
    run_check(&FanSigmaOne, &SuiteConfig::new(n, trials, seed))
}

/// Stable identifiers of the checkers exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityId {
    VonNeumann,
    ProductFamily,
    HadamardFamily,
    Ahj,
    Lemma31,
    Lemma32,
    HmnHadamard,
    HmnFan,
    FanSigma1,
}

impl InequalityId {
    pub const ALL: [InequalityId; 9] = [
        Self::VonNeumann,
        Self::ProductFamily,
        Self::HadamardFamily,
        Self::Ahj,
        Self::Lemma31,
        Self::Lemma32,
        Self::HmnHadamard,
        Self::HmnFan,
        Self::FanSigma1,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::VonNeumann => "von-neumann",
            Self::ProductFamily => "product-family",
            Self::HadamardFamily => "hadamard-family",
            Self::Ahj => "ahj",
            Self::Lemma31 => "lemma31",
            Self::Lemma32 => "lemma32",
            Self::HmnHadamard => "hmn-hadamard",
            Self::HmnFan => "hmn-fan",
            Self::FanSigma1 => "fan-sigma1",
        }
    }

    /// The inequality in words, for `--help` and table output.
    pub fn statement(&self) -> &'static str {
        match self {
            Self::VonNeumann => "von Neumann trace inequality |Tr AB| <= sum s_i(A) s_i(B)",
            Self::ProductFamily => "Ky Fan products: sum_{i<=k} s_i(AB) <= sum_{i<=k} s_i(A) s_i(B), all k (k = n: trace norm)",
            Self::HadamardFamily => "Hadamard products: sum_{i<=k} s_i(A o B) <= sum_{i<=k} s_i(A) s_i(B), all k",
            Self::Ahj => "Ando-Horn-Johnson: sum_{i<=k} s_i(X*Y o B) <= sum_{i<=k} c_i(X) c_i(Y) s_i(B), all k",
            Self::Lemma31 => "contraction lemma: c_i(X), c_i(Y) <= 1 and s_1(S) <= 1 imply s_1(X*Y o S) <= 1",
            Self::Lemma32 => "rank-one lemma: unit columns and Q = uv* imply trace norm of X*Y o Q <= 1",
            Self::HmnHadamard => "Horn-Mathias-Nakamura characterisation for the Hadamard product",
            Self::HmnFan => "Horn-Mathias-Nakamura characterisation for the Fan product",
            Self::FanSigma1 => "Fan product operator norm: s_1(A * B), s_1(A^T * B) <= s_1(A) s_1(B)",
        }
    }

    /// Builds the checker for dimension `n`.
    pub fn checker(&self, n: usize, factorization: Factorization, lemma31_form: Option<&EntrywiseForm>) -> Result<Box<dyn Inequality>> {
        Ok(match self {
            Self::VonNeumann => Box::new(VonNeumann),
            Self::ProductFamily => Box::new(ProductFamily),
            Self::HadamardFamily => Box::new(HadamardFamily),
            Self::Ahj => Box::new(AndoHornJohnson { factorization }),
            Self::Lemma31 => Box::new(ContractionLemma {
                form: lemma31_form.cloned().unwrap_or_else(|| EntrywiseForm::hadamard(n)),
            }),
            Self::Lemma32 => Box::new(RankOneLemma),
            Self::HmnHadamard => Box::new(HornMathiasNakamura::new(EntrywiseForm::hadamard(n))?),
            Self::HmnFan => Box::new(HornMathiasNakamura::new(EntrywiseForm::fan(n))?),
            Self::FanSigma1 => Box::new(FanSigmaOne),
        })
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown inequality id {s:?}")))
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of reproducing the Fan-product counterexample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanCounterexample {
    /// `‖U*U − I‖_F`.
    pub unitarity_residual: f64,
    /// Singular values of `(X*Y) ⋆ U`.
    pub spectrum: Vec<f64>,
    pub sigma1: f64,
    /// `σ_1((X*Y) ⋆ U) − c_1(X) c_1(Y) σ_1(U)`: the `k = 1` analogue of the
    /// Ando–Horn–Johnson bound for the Fan product.
    pub ahj_k1_margin: f64,
    /// The contraction-lemma trial, with margin `σ_1 − 1`.
    pub witness: Witness,
}

pub fn reproduce_fan_counterexample() -> Result<FanCounterexample> {
    let (x, y, u) = fan_counterexample_inputs();
    let fan = EntrywiseForm::fan(3);
    let product = apply_form(&fan, &(&x.adjoint() * &y), &u)?;
    let spectrum = sv(&product)?;
    let sigma1 = spectrum.max();
    let ahj_rhs = column_norms(&x)?.get(0) * column_norms(&y)?.get(0) * sv(&u)?.max();
    let lemma = ContractionLemma { form: fan };
    let matrices = instance([("X", x), ("Y", y), ("S", u.clone())]);
    let margin = lemma.evaluate(&matrices)?.terms[0].margin();
    Ok(FanCounterexample {
        unitarity_residual: u.unitarity_residual(),
        spectrum: spectrum.values().to_vec(),
        sigma1,
        ahj_k1_margin: sigma1 - ahj_rhs,
        witness: Witness {
            trial: 0,
            k: 1,
            margin,
            matrices,
        },
    })
}

/// The equality case of the trace inequality: with `B = Σ σ_i u_i v_i*`, the
/// rank-one partial isometry `A = v_1 u_1*` gives `|Tr(AB)| = σ_1(B)`.
/// Returns `A`, `|Tr(AB)|` and `σ_1(B)`.
pub fn von_neumann_extremal(b: &ComplexMatrix) -> Result<(ComplexMatrix, f64, f64)> {
    if !b.is_square() {
        return Err(Error::shape("square matrix", format!("{}x{}", b.rows(), b.cols())));
    }
    let d = svd(b)?;
    let u1 = ComplexMatrix::column_vector(&d.u.column(0));
    let v1 = ComplexMatrix::column_vector(&d.v.column(0));
    let a = &v1 * &u1.adjoint();
    let value = (&a * b).trace().norm();
    Ok((a, value, d.s.max()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(pairs: Vec<(&str, ComplexMatrix)>) -> Instance {
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    #[test]
    fn tolerance_policy() {
        assert!(holds(1.0 + 5e-9, 1.0, 1e-8));
        assert!(!holds(1.0 + 2e-8, 1.0, 1e-8));
        assert!(holds(100.0 + 5e-7, 100.0, 1e-8));
        assert!(!holds(100.0 + 2e-6, 100.0, 1e-8));
    }

    #[test]
    fn identity_equality_cases() {
        let i2 = ComplexMatrix::identity(2);
        let e = VonNeumann.evaluate(&inst(vec![("A", i2.clone()), ("B", i2.clone())])).unwrap();
        assert!((e.terms[0].lhs - 2.0).abs() < 1e-15 && (e.terms[0].rhs - 2.0).abs() < 1e-15);

        let d = ComplexMatrix::from_real_diag(&[2.0, 1.0]);
        let e = ProductFamily.evaluate(&inst(vec![("A", d.clone()), ("B", d.clone())])).unwrap();
        for t in &e.terms {
            assert!(t.margin().abs() < 1e-14, "{t:?}");
        }
        assert_eq!(e.terms.last().unwrap().k, 2);
    }

    #[test]
    fn hadamard_with_all_ones_has_slack() {
        let j = ComplexMatrix::ones(3, 3);
        let b = ComplexMatrix::from_real(3, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 3.0, 2.0, 2.0, 1.0]).unwrap();
        let e = HadamardFamily.evaluate(&inst(vec![("A", j), ("B", b.clone())])).unwrap();
        let sb = singular_values(&b).unwrap();
        assert!((e.terms[0].lhs - sb.get(0)).abs() < 1e-13);
        // σ(J) = (3, 0, 0): rhs stays at 3 σ_1(B).
        for t in &e.terms {
            assert!((t.rhs - 3.0 * sb.get(0)).abs() < 1e-12);
            assert!(t.margin() < 0.0);
        }
        // diagonal operands: rearrangement bound
        let a = ComplexMatrix::from_real_diag(&[1.0, 3.0, 2.0]);
        let b = ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let e = HadamardFamily.evaluate(&inst(vec![("A", a), ("B", b)])).unwrap();
        let lhs: Vec<f64> = e.terms.iter().map(|t| t.lhs).collect();
        let rhs: Vec<f64> = e.terms.iter().map(|t| t.rhs).collect();
        assert_eq!(lhs.iter().map(|x| x.round()).collect::<Vec<_>>(), vec![4.0, 7.0, 10.0]);
        assert_eq!(rhs.iter().map(|x| x.round()).collect::<Vec<_>>(), vec![9.0, 13.0, 14.0]);
    }

    #[test]
    fn ahj_identity_factors_and_zero_columns() {
        let i3 = ComplexMatrix::identity(3);
        let b = ComplexMatrix::from_real(3, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 3.0, 2.0, 2.0, 1.0]).unwrap();
        let ahj = AndoHornJohnson {
            factorization: Factorization::Given,
        };
        let e = ahj.evaluate(&inst(vec![("X", i3.clone()), ("Y", i3.clone()), ("B", b.clone())])).unwrap();
        assert!(e.terms.iter().all(|t| holds(t.lhs, t.rhs, 1e-12)));
        let x = ComplexMatrix::from_real(3, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let e = ahj.evaluate(&inst(vec![("X", x), ("Y", i3), ("B", b)])).unwrap();
        assert!(e.terms.iter().all(|t| holds(t.lhs, t.rhs, 1e-12)));
    }

    #[test]
    fn lemma32_identity_rank_one() {
        let i3 = ComplexMatrix::identity(3);
        let e1 = ComplexMatrix::from_real(3, 1, &[1.0, 0.0, 0.0]).unwrap();
        let e = RankOneLemma
            .evaluate(&inst(vec![("X", i3.clone()), ("Y", i3), ("u", e1.clone()), ("v", e1)]))
            .unwrap();
        assert!((e.terms[0].lhs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fan_counterexample_values() {
        let r = reproduce_fan_counterexample().unwrap();
        let root = 13f64.sqrt() / 3.0;
        assert!(r.unitarity_residual <= 1e-12);
        assert!((r.sigma1 - root).abs() <= 1e-9);
        for (got, want) in r.spectrum.iter().zip([root, root, 1.0 / 3.0]) {
            assert!((got - want).abs() <= 1e-9);
        }
        assert!((r.ahj_k1_margin - (root - 1.0)).abs() <= 1e-9);
        assert!((r.witness.margin - (root - 1.0)).abs() <= 1e-9);
        let lemma = ContractionLemma {
            form: EntrywiseForm::fan(3),
        };
        assert!((reevaluate(&lemma, &r.witness).unwrap() - r.witness.margin).abs() <= 1e-12);
    }

    #[test]
    fn fan_lemma31_finds_the_counterexample() {
        let r = check_lemma31(&EntrywiseForm::fan(3), 3, 64, 1).unwrap();
        assert!(r.violations >= 1);
        assert!(r.worst_margin >= 13f64.sqrt() / 3.0 - 1.0 - 1e-12);
        assert_eq!(r.inequality_id, "lemma31-fan");
        let w = r.witness.as_ref().unwrap();
        let lemma = ContractionLemma {
            form: EntrywiseForm::fan(3),
        };
        assert!((reevaluate(&lemma, w).unwrap() - w.margin).abs() <= 1e-12);
    }

    #[test]
    fn scaled_hadamard_witnesses_both_directions() {
        let r = check_hmn(&EntrywiseForm::scaled_hadamard(3, 2.0), 3, 200, 5).unwrap();
        assert!(r.violations > 0);
        assert!(r.probes.iter().any(|p| p.max_ratio > 1.5));
        assert_eq!(r.consistent_with_iff, Some(true));
        let r = check_hmn(&EntrywiseForm::hadamard(3), 3, 200, 5).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.probes.iter().all(|p| p.max_ratio <= 1.0 + 1e-8 && p.status == "no violation observed"));
        assert_eq!(r.consistent_with_iff, Some(true));
        assert!(check_hmn(&EntrywiseForm::from_mask("skew", 2, vec![1.0, 0.0, 1.0, 1.0]).unwrap(), 2, 1, 0).is_err());
    }

    #[test]
    fn small_suites_pass_and_replay() {
        for id in InequalityId::ALL {
            let chk = id.checker(4, Factorization::Given, None).unwrap();
            let cfg = SuiteConfig::new(4, 100, 7);
            let a = run_check(chk.as_ref(), &cfg).unwrap();
            assert_eq!(a.violations, 0, "{id}: {a:?}");
            let b = run_check(chk.as_ref(), &cfg).unwrap();
            assert_eq!(a.body_json(), b.body_json());
        }
    }

    #[test]
    fn k_filter_restricts_report() {
        let mut cfg = SuiteConfig::new(4, 20, 3);
        cfg.k = KSelect::Only(2);
        let r = run_check(&ProductFamily, &cfg).unwrap();
        assert_eq!(r.k_range, vec![2]);
        assert_eq!("all".parse::<KSelect>().unwrap(), KSelect::All);
        assert_eq!("3".parse::<KSelect>().unwrap(), KSelect::Only(3));
        assert!("0".parse::<KSelect>().is_err());
    }

    #[test]
    fn ids_round_trip() {
        for id in InequalityId::ALL {
            assert_eq!(id.as_str().parse::<InequalityId>().unwrap(), id);
        }
        assert!("bogus".parse::<InequalityId>().is_err());
    }

    #[test]
    fn extremal_rank_one() {
        let b = ComplexMatrix::from_real(3, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 3.0, 2.0, 2.0, 1.0]).unwrap();
        let (a, value, s1) = von_neumann_extremal(&b).unwrap();
        assert!((value - s1).abs() <= 1e-10);
        let sa = singular_values(&a).unwrap();
        assert!((sa.get(0) - 1.0).abs() < 1e-12 && sa.get(1) < 1e-12);
    }
}

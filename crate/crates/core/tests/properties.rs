use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use svineq::ensembles::{
    ginibre_with, haar_unitary_with, random_hermitian_with, random_weight_with, sample_partial_isometry_with,
};
use svineq::forms::{apply_form, right_adjoint_apply, EntrywiseForm};
use svineq::matrix::{factor_sqrt, kronecker, partial_trace_first, singular_values, svd};
use svineq::norms::{dual_weighted_vector_k_norm, weighted_kyfan_norm, weighted_vector_k_norm};
use svineq::ptrace::{question_margins, Question};
use svineq::suite::{
    reevaluate, run_check, AndoHornJohnson, ContractionLemma, Factorization, Inequality, SuiteConfig,
};
use svineq::ComplexMatrix;

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn rect(rows: usize, cols: usize, r: &mut ChaCha20Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal)))
}

fn nalgebra_singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let m = DMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j));
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn singular_values_match_nalgebra(seed in any::<u64>(), rows in 1usize..9, cols in 1usize..9) {
        let a = rect(rows, cols, &mut rng(seed));
        let ours = singular_values(&a).unwrap();
        let theirs = nalgebra_singular_values(&a);
        prop_assert!(close(ours.values(), &theirs, 1e-12 * (1.0 + theirs[0])), "{:?} vs {:?}", ours.values(), theirs);
    }

    #[test]
    fn svd_factors_reconstruct(seed in any::<u64>(), rows in 1usize..9, cols in 1usize..9, rank in 1usize..9) {
        let mut r = rng(seed);
        let rank = rank.min(rows).min(cols);
        let a = &rect(rows, rank, &mut r) * &rect(rank, cols, &mut r);
        let d = svd(&a).unwrap();
        prop_assert!(d.u.unitarity_residual() < 1e-12);
        prop_assert!(d.v.unitarity_residual() < 1e-12);
        prop_assert!((d.reconstruct() - a.clone()).frobenius_norm() <= 1e-12 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn singular_values_are_unitarily_invariant(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let a = ginibre_with(n, &mut r);
        let u = haar_unitary_with(n, &mut r);
        let v = haar_unitary_with(n, &mut r);
        let s = singular_values(&a).unwrap();
        let t = singular_values(&(&(&u * &a) * &v)).unwrap();
        prop_assert!(close(s.values(), t.values(), 1e-12 * (1.0 + s.max())));
    }

    #[test]
    fn factor_sqrt_rows_carry_the_spectrum(seed in any::<u64>(), n in 1usize..9) {
        let a = ginibre_with(n, &mut rng(seed));
        let (x, y) = factor_sqrt(&a).unwrap();
        let sigma = singular_values(&a).unwrap();
        prop_assert!((&(&x.adjoint() * &y) - &a).frobenius_norm() <= 1e-10 * (1.0 + sigma.max()));
        let d = ComplexMatrix::from_real_diag(sigma.values());
        prop_assert!((&(&x * &x.adjoint()) - &d).frobenius_norm() <= 1e-12 * (1.0 + sigma.max()));
        prop_assert!((&(&y * &y.adjoint()) - &d).frobenius_norm() <= 1e-12 * (1.0 + sigma.max()));
    }

    #[test]
    fn partial_trace_is_adjoint_to_tensoring(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let m = rect(n * n, n * n, &mut r);
        let x = ginibre_with(n, &mut r);
        let lhs = (&partial_trace_first(&m, n).unwrap() * &x).trace();
        let rhs = (&m * &kronecker(&ComplexMatrix::identity(n), &x).unwrap()).trace();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + m.frobenius_norm() * x.frobenius_norm()));
    }

    #[test]
    fn weighted_norms_are_norms(seed in any::<u64>(), n in 1usize..9, c in -3.0f64..3.0) {
        let mut r = rng(seed);
        let w = random_weight_with(n, &mut r);
        let a = ginibre_with(n, &mut r);
        let b = ginibre_with(n, &mut r);
        let na = weighted_kyfan_norm(&a, &w).unwrap();
        let nb = weighted_kyfan_norm(&b, &w).unwrap();
        let nab = weighted_kyfan_norm(&(&a + &b), &w).unwrap();
        prop_assert!(nab <= na + nb + 1e-12 * (na + nb));
        let scaled = weighted_kyfan_norm(&a.scale(c), &w).unwrap();
        prop_assert!((scaled - c.abs() * na).abs() <= 1e-12 * (1.0 + na));
        prop_assert!(na > 0.0);
    }

    #[test]
    fn dual_norm_bounds_the_pairing(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let w = random_weight_with(n, &mut r);
        let x: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
        let y: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
        let pairing: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let bound = weighted_vector_k_norm(&x, &w).unwrap() * dual_weighted_vector_k_norm(&y, &w).unwrap();
        prop_assert!(pairing <= bound + 1e-12 * (1.0 + bound));
    }

    #[test]
    fn right_adjoint_trace_identity(seed in any::<u64>(), n in 1usize..9, fan in any::<bool>()) {
        let mut r = rng(seed);
        let f = if fan { EntrywiseForm::fan(n) } else { EntrywiseForm::hadamard(n) };
        let (a, b, c) = (ginibre_with(n, &mut r), ginibre_with(n, &mut r), ginibre_with(n, &mut r));
        let lhs = (&apply_form(&f, &a, &b).unwrap() * &c).trace();
        let rhs = (&right_adjoint_apply(&f, &b, &c).unwrap() * &a).trace();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + a.frobenius_norm() * b.frobenius_norm() * c.frobenius_norm()));
    }

    #[test]
    fn question_margins_invariant_under_conjugation(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let a = random_hermitian_with(n, &mut r);
        let b = random_hermitian_with(n, &mut r);
        let w = haar_unitary_with(n, &mut r);
        let conj = |m: &ComplexMatrix| {
            let t = &(&w * m) * &w.adjoint();
            ComplexMatrix::from_fn(n, n, |i, j| (t.get(i, j) + t.get(j, i).conj()) * 0.5)
        };
        for q in [Question::One, Question::Two] {
            let before = question_margins(&a, &b, q).unwrap();
            let after = question_margins(&conj(&a), &conj(&b), q).unwrap();
            prop_assert!(close(&before, &after, 1e-9));
        }
    }

    #[test]
    fn ahj_partial_sums_are_monotone(seed in any::<u64>(), n in 1usize..9, trial in 0u64..8, sqrt in any::<bool>()) {
        let chk = AndoHornJohnson {
            factorization: if sqrt { Factorization::Sqrt } else { Factorization::Given },
        };
        let inst = chk.sample(n, trial, &mut rng(seed)).unwrap();
        let terms = chk.evaluate(&inst).unwrap().terms;
        prop_assert_eq!(terms.len(), n);
        for w in terms.windows(2) {
            prop_assert!(w[1].lhs >= w[0].lhs && w[1].rhs >= w[0].rhs);
        }
    }
}

#[test]
fn nalgebra_agrees_on_partial_isometries() {
    let mut r = rng(3);
    for n in 1..=8 {
        for j in 1..=n {
            let p = sample_partial_isometry_with(n, j, &mut r).unwrap();
            let expected: Vec<f64> = (0..n).map(|i| if i < j { 1.0 } else { 0.0 }).collect();
            assert!(close(&nalgebra_singular_values(&p), &expected, 1e-12));
            assert!(close(singular_values(&p).unwrap().values(), &expected, 1e-12));
        }
    }
}

#[test]
fn witnesses_reevaluate_to_recorded_margin() {
    let chk = ContractionLemma {
        form: EntrywiseForm::fan(3),
    };
    let report = run_check(&chk, &SuiteConfig::new(3, 40, 2)).unwrap();
    let w = report.witness.as_ref().expect("the Fan form violates the contraction lemma");
    assert!((reevaluate(&chk, w).unwrap() - w.margin).abs() <= 1e-12);

    let text = svineq::report::to_json_string(&report);
    let back: svineq::suite::CheckReport = serde_json::from_str(&text).unwrap();
    let w2 = back.witness.unwrap();
    assert!((reevaluate(&chk, &w2).unwrap() - w.margin).abs() <= 1e-12);
}

//! Decomposition and operator invariants checked against independent
//! oracles: a two-sided Jacobi eigensolver for spectra, rank-one
//! expansions for the inverse operator, and dense Kronecker products.

#![allow(clippy::needless_range_loop)]

mod common;

use common::{jacobi_eigenvalues, rel_err};
use crospec_core::forward_model::{
    decompose, inverse_operator, resolution_matrix, synthesize, KroneckerSvd,
};
use crospec_core::mat::{kronecker_dense, rmat_mul_cvec, CMat, RMat};
use crospec_core::regularizers::filter_factors;
use crospec_core::rng::SplitMix64;
use crospec_core::{FilterSpec, SpectrumSpec, SyntheticSpec};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn singular_values_match_gram_eigensolver() {
    let mut rng = SplitMix64::new(2718);
    let g = RMat::from_fn(5, 8, |_, _| rng.next_gaussian());
    let model = decompose(&g).unwrap();
    let gram = g.mul(&g.transpose());
    let eigs = jacobi_eigenvalues(&gram);
    for (s, e) in model.sigma().iter().zip(eigs) {
        assert!(rel_err(*s, e.max(0.0).sqrt()) < 1e-8, "{s} vs {}", e.sqrt());
    }
}

#[test]
fn inverse_operator_equals_rank_one_expansion() {
    let model = synthesize(&SyntheticSpec {
        m: 4,
        n: 7,
        spectrum: SpectrumSpec::Geometric {
            sigma1: 2.0,
            ratio: 0.55,
        },
        seed: 31,
    })
    .unwrap();
    for filter in [
        FilterSpec::Tikhonov { lambda: 0.8 },
        FilterSpec::Tsvd { retained: 2 },
    ] {
        let w = inverse_operator(&model, &filter).unwrap();
        let phi = filter_factors(&model, &filter).unwrap();
        let mut expansion = RMat::zeros(7, 4);
        for i in 0..4 {
            let coef = phi[i] / model.sigma()[i];
            for r in 0..7 {
                for c in 0..4 {
                    expansion.set(
                        r,
                        c,
                        expansion.get(r, c) + coef * model.v().get(r, i) * model.u().get(c, i),
                    );
                }
            }
        }
        let defect = w.sub(&expansion).frobenius_norm() / expansion.frobenius_norm();
        assert!(defect < 1e-10, "{filter:?}: defect {defect}");
    }
}

#[test]
fn resolution_matrix_symmetric_with_filter_spectrum() {
    let model = synthesize(&SyntheticSpec {
        m: 3,
        n: 6,
        spectrum: SpectrumSpec::Explicit(vec![2.5, 1.2, 0.4]),
        seed: 8,
    })
    .unwrap();
    let filter = FilterSpec::Tikhonov { lambda: 0.6 };
    let r = resolution_matrix(&model, &filter).unwrap();
    assert!(r.sub(&r.transpose()).frobenius_norm() < 1e-12);

    let mut expected: Vec<f64> = filter_factors(&model, &filter).unwrap();
    expected.extend(std::iter::repeat_n(0.0, 3));
    expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let eigs = jacobi_eigenvalues(&r);
    for (e, x) in eigs.iter().zip(&expected) {
        assert!((e - x).abs() < 1e-10, "eig {e} vs phi {x}");
    }
}

#[test]
fn kronecker_inverse_application_matches_dense_oracle() {
    // (W ⊗ W) vec(A) = vec(W A Wᵗ) at tiny sizes.
    let model = synthesize(&SyntheticSpec {
        m: 3,
        n: 5,
        spectrum: SpectrumSpec::Explicit(vec![1.8, 0.9, 0.3]),
        seed: 77,
    })
    .unwrap();
    let w = inverse_operator(&model, &FilterSpec::Tikhonov { lambda: 0.2 }).unwrap();
    let dense = kronecker_dense(&w, &w);
    let mut rng = SplitMix64::new(5);
    let a = CMat::from_fn(3, 3, |_, _| {
        Complex64::new(rng.next_gaussian(), rng.next_gaussian())
    });
    let lhs = rmat_mul_cvec(&dense, &a.vectorized());
    let rhs = a.sandwich_real(&w).vectorized();
    for (x, y) in lhs.iter().zip(&rhs) {
        assert!((x - y).norm() < 1e-10);
    }
}

#[test]
fn kronecker_forward_application_matches_dense_oracle() {
    let model = synthesize(&SyntheticSpec {
        m: 4,
        n: 6,
        spectrum: SpectrumSpec::Geometric {
            sigma1: 1.0,
            ratio: 0.6,
        },
        seed: 13,
    })
    .unwrap();
    let kron = KroneckerSvd::new(&model);
    let dense = kron.dense_operator().unwrap();
    let mut rng = SplitMix64::new(6);
    let s = CMat::from_fn(6, 6, |_, _| {
        Complex64::new(rng.next_gaussian(), rng.next_gaussian())
    });
    let implicit = kron.apply(&s).unwrap().vectorized();
    let explicit = rmat_mul_cvec(&dense, &s.vectorized());
    for (x, y) in implicit.iter().zip(&explicit) {
        assert!((x - y).norm() < 1e-10);
    }
    // Products are exact pairwise products of the singular values.
    for entry in kron.singular_products() {
        assert_eq!(
            entry.product,
            model.sigma()[entry.i] * model.sigma()[entry.j]
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tikhonov_filters_strictly_decrease_in_lambda(
        seed in 0u64..1000,
        l1 in 1e-4f64..10.0,
        delta in 1e-3f64..10.0,
    ) {
        let model = synthesize(&SyntheticSpec {
            m: 3,
            n: 4,
            spectrum: SpectrumSpec::Geometric { sigma1: 1.5, ratio: 0.5 },
            seed,
        })
        .unwrap();
        let lo = filter_factors(&model, &FilterSpec::Tikhonov { lambda: l1 }).unwrap();
        let hi = filter_factors(&model, &FilterSpec::Tikhonov { lambda: l1 + delta }).unwrap();
        for (a, b) in lo.iter().zip(&hi) {
            prop_assert!(a > b);
        }
    }

    #[test]
    fn filter_factors_stay_in_unit_interval(
        lambda in 0.0f64..1e6,
        retained in 1usize..=4,
    ) {
        let model = synthesize(&SyntheticSpec {
            m: 4,
            n: 5,
            spectrum: SpectrumSpec::Explicit(vec![3.0, 1.4, 0.9, 0.2]),
            seed: 3,
        })
        .unwrap();
        for phi in filter_factors(&model, &FilterSpec::Tikhonov { lambda }).unwrap() {
            prop_assert!((0.0..=1.0).contains(&phi));
            prop_assert!(phi > 0.0);
        }
        for phi in filter_factors(&model, &FilterSpec::Tsvd { retained }).unwrap() {
            prop_assert!(phi == 0.0 || phi == 1.0);
        }
    }
}

use dewkit::families::{
    alpha_samples, family_2xn, orthogonal_family, recommended_sample_count, span_certificate, ORTHO_TOL,
};
use dewkit::fixtures::{v1_product_families, v1_subspace, V1Params};
use dewkit::random::{gaussian_vector, random_hermitian, random_psd_on, random_unit_vector, rng_for};
use dewkit::subspace::{
    certify_ces, complement, max_ces_dimension, random_ces, random_subspace, reduced_support, CesOptions, Side,
};
use dewkit::tensor::{
    is_psd, matrix_rank, min_eigenvalue, numerical_rank, partial_transpose, schmidt, BipartiteDims, CMat, CVec,
    ProductVector, RANK_TOL,
};
use dewkit::witness::{dew_from_q, optimality_analysis, zero_set, OptimalityOptions, OptimalityStatus, ZERO_SET_TOL};
use num_complex::Complex64;
use proptest::prelude::*;

fn dims_strategy() -> impl Strategy<Value = BipartiteDims> {
    (2usize..4, 2usize..5).prop_map(|(a, b)| BipartiteDims::new(a, b).unwrap())
}

fn max_abs(x: &CMat) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_transpose_is_trace_preserving_involution(d in dims_strategy(), seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let h = random_hermitian(&mut rng, d.total());
        let g = partial_transpose(&h, &d).unwrap();
        prop_assert!(max_abs(&(partial_transpose(&g, &d).unwrap() - &h)) <= 1e-12);
        prop_assert!((g.trace() - h.trace()).norm() <= 1e-12);
        prop_assert!(max_abs(&(&g - g.adjoint())) <= 1e-12);
    }

    #[test]
    fn schmidt_coefficients_sorted_and_rank_bounded(d in dims_strategy(), seed in any::<u64>()) {
        let psi = gaussian_vector(&mut rng_for(seed, 0), d.total());
        let s = schmidt(&psi, &d).unwrap();
        prop_assert!(s.coefficients.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.schmidt_rank <= d.m());
        prop_assert!((s.reconstruct() - &psi).norm() <= 1e-10 * psi.norm().max(1.0));
        let norm2: f64 = s.coefficients.iter().map(|c| c * c).sum();
        prop_assert!((norm2 - psi.norm_squared()).abs() <= 1e-10 * psi.norm_squared());
    }

    #[test]
    fn rank_is_invariant_under_local_invertible_maps(d in dims_strategy(), k in 1usize..4, seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let vs: Vec<CVec> = (0..k).map(|_| gaussian_vector(&mut rng, d.total())).collect();
        let a = dewkit::random::gaussian_matrix(&mut rng, d.m(), d.m());
        let b = dewkit::random::gaussian_matrix(&mut rng, d.n(), d.n());
        let ab = a.kronecker(&b);
        let mapped: Vec<CVec> = vs.iter().map(|v| &ab * v).collect();
        prop_assert_eq!(numerical_rank(&vs, RANK_TOL), numerical_rank(&mapped, RANK_TOL));
    }

    #[test]
    fn complement_is_an_involution(d in dims_strategy(), k in 1usize..5, seed in any::<u64>()) {
        let k = k.min(d.total() - 1);
        let v = random_subspace(d, k, seed, 0);
        let perp = complement(&v);
        prop_assert_eq!(perp.dim(), d.total() - k);
        let back = complement(&perp);
        prop_assert!(max_abs(&(back.projector() - v.projector())) <= 1e-10);
    }

    #[test]
    fn reduced_supports_keep_trace_and_positivity(d in dims_strategy(), seed in any::<u64>()) {
        let v = random_subspace(d, 2, seed, 1);
        let q = random_psd_on(&mut rng_for(seed, 2), v.basis());
        for side in [Side::First, Side::Second] {
            let r = reduced_support(&q, &d, side).unwrap();
            prop_assert!((r.trace() - q.trace()).norm() <= 1e-12);
            prop_assert!(is_psd(&r, 1e-12).unwrap());
        }
    }

    #[test]
    fn canonical_form_is_scale_invariant(seed in any::<u64>(), re in 0.1f64..3.0, im in -3.0f64..3.0) {
        let mut rng = rng_for(seed, 0);
        let pv = ProductVector::new(random_unit_vector(&mut rng, 3), random_unit_vector(&mut rng, 4));
        let z = Complex64::new(re, im);
        let scaled = ProductVector::new(&pv.e * z, &pv.f * (Complex64::new(2.5, 0.0) / z));
        let (a, b) = (pv.canonical(), scaled.canonical());
        prop_assert_eq!(a.chart(), b.chart());
        prop_assert!((&a.e - &b.e).norm() < 1e-10 && (&a.f - &b.f).norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn certification_is_stable_across_seeds(k in 1usize..3, seed in any::<u64>()) {
        let d = BipartiteDims::new(2, 3).unwrap();
        let (v, _) = random_ces(d, k, &CesOptions::with_seed(seed)).unwrap();
        for s in 1..4u64 {
            prop_assert!(certify_ces(&v, &CesOptions::with_seed(seed.wrapping_add(s))).is_ces);
        }
    }

    #[test]
    fn above_the_bound_a_product_vector_exists(n in 2usize..5, seed in any::<u64>()) {
        let d = BipartiteDims::new(2, n).unwrap();
        let v = random_subspace(d, max_ces_dimension(&d) + 1, seed, 3);
        let cert = certify_ces(&v, &CesOptions::with_seed(seed));
        prop_assert!(!cert.is_ces);
        prop_assert!(cert.max_product_overlap >= 1.0 - 1e-7);
    }

    #[test]
    fn extra_samples_do_not_raise_the_span(n in 3usize..6, seed in any::<u64>()) {
        let d = BipartiteDims::new(2, n).unwrap();
        let opts = CesOptions::with_seed(seed);
        let (v, _) = random_ces(d, n - 1, &opts).unwrap();
        let base = recommended_sample_count(&d, n - 1);
        let small = span_certificate(&family_2xn(&v, &alpha_samples(base), &opts).unwrap()).unwrap();
        let large = family_2xn(&v, &alpha_samples(3 * base), &opts).unwrap();
        prop_assert!(large.max_overlap_with(&v) < ORTHO_TOL);
        let large = span_certificate(&large).unwrap();
        prop_assert_eq!(small.family_span_dim, large.family_span_dim);
        prop_assert_eq!(small.pc_span_dim, large.pc_span_dim);
    }

    #[test]
    fn lower_dimensional_ces_still_spans(n in 4usize..7, k in 1usize..3, seed in any::<u64>()) {
        let d = BipartiteDims::new(2, n).unwrap();
        let opts = CesOptions::with_seed(seed);
        let (v, _) = random_ces(d, k, &opts).unwrap();
        let fam = family_2xn(&v, &alpha_samples(recommended_sample_count(&d, k)), &opts).unwrap();
        prop_assert_eq!(span_certificate(&fam).unwrap().pc_span_dim, 2 * n);
    }

    #[test]
    fn two_dimensional_ces_in_three_by_three_spans(seed in any::<u64>()) {
        let d = BipartiteDims::new(3, 3).unwrap();
        let opts = CesOptions::with_seed(seed);
        let (v, _) = random_ces(d, 2, &opts).unwrap();
        let fam = orthogonal_family(&v, recommended_sample_count(&d, 2), &opts).unwrap();
        prop_assert!(fam.max_overlap_with(&v) < ORTHO_TOL);
        prop_assert_eq!(span_certificate(&fam).unwrap().pc_span_dim, 9);
    }

    #[test]
    fn ces_supported_witnesses_on_qubit_qudit_are_optimal(n in 2usize..6, k in 1usize..5, seed in any::<u64>()) {
        let d = BipartiteDims::new(2, n).unwrap();
        let k = 1 + (k - 1) % (n - 1);
        let (v, _) = random_ces(d, k, &CesOptions::with_seed(seed)).unwrap();
        let q = random_psd_on(&mut rng_for(seed, 5), v.basis());
        let w = dew_from_q(&q, d).unwrap();
        let report = optimality_analysis(&w, &OptimalityOptions::with_seed(seed)).unwrap();
        prop_assert_eq!(report.status, OptimalityStatus::OptimalCertified);
        prop_assert_eq!(report.pw_span_dim, Some(2 * n));
    }

    #[test]
    fn zero_set_members_vanish(seed in any::<u64>()) {
        let d = BipartiteDims::new(3, 3).unwrap();
        let (v, _) = random_ces(d, 2, &CesOptions::with_seed(seed)).unwrap();
        let q = random_psd_on(&mut rng_for(seed, 6), v.basis());
        let w = dew_from_q(&q, d).unwrap();
        let fam = zero_set(&w, &CesOptions::with_seed(seed)).unwrap();
        prop_assert!(!fam.is_empty());
        for s in &fam.samples {
            let x = s.pv.embed().normalize();
            prop_assert!(dewkit::tensor::expectation(w.matrix(), &x).abs() < ZERO_SET_TOL);
        }
    }
}

#[test]
fn v1_witnesses_have_seven_dimensional_zero_sets() {
    let p = V1Params::real(1.0, 2.0, 0.0, 1.0);
    let (v, _) = v1_subspace(&p).unwrap();
    let d = v.dims();
    let closed = v1_product_families(&p, &alpha_samples(25)).unwrap();
    let closed_pc = closed.conjugated();
    let closed_rank = numerical_rank(&closed_pc, RANK_TOL);
    assert_eq!(closed_rank, 7);
    for t in 0..20u64 {
        let q = random_psd_on(&mut rng_for(77, t), v.basis());
        assert_eq!(matrix_rank(&q, RANK_TOL), 3);
        assert!(min_eigenvalue(&partial_transpose(&q, &d).unwrap()).unwrap() < -1e-6, "trial {t}: Q is PPT");
        let fam = zero_set(&dew_from_q(&q, d).unwrap(), &CesOptions::with_seed(t)).unwrap();
        let members = fam.embedded();
        assert_eq!(numerical_rank(&members, RANK_TOL), 7, "trial {t}");
        let mut union = closed_pc.clone();
        union.extend(members);
        assert_eq!(numerical_rank(&union, RANK_TOL), 7, "trial {t}: zero set leaves the closed-form span");
    }
}

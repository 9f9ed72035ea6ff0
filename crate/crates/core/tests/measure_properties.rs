use normcoh::axioms::{check_b2, check_b3, check_b4, check_c3, falsify, random_b3_instance, FalsifyConfig};
use normcoh::catalog::usi_catalog;
use normcoh::channels::{apply_channel, random_incoherent_kraus, selective_outcomes, KrausSet};
use normcoh::measures::{c_nu_min_diag, c_qp};
use normcoh::oracles::{
    check_contraction, check_lagrange_inequality, check_perm_inequality, cover_from_kraus, extreme_point_witness,
    random_cover, random_feasible_weights, random_positive_vector, random_unit_lqp_matrix, CoverInstance,
    ExtremePoint,
};
use normcoh::random::{
    complex_normal, conjugate, ginibre, random_density, random_density_any_rank, random_diagonal_unitary,
    random_permutation, random_probability, seeded,
};
use normcoh::{
    ComplexMatrix, CoherenceMeasure, DensityState, DiagonalState, MeasureMethod, MeasureSpec, NormSpec, PExponent,
    SolverConfig, C64,
};
use proptest::prelude::*;

fn sufficient_p() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(1.25), Just(1.5), Just(1.75), Just(2.0), 1.0..2.0f64]
}

fn kraus(n: usize, seed: u64) -> KrausSet {
    let mut rng = seeded(seed ^ 0x5eed);
    loop {
        let rows = rand::Rng::random_range(&mut rng, 1..=8usize);
        let ops = rand::Rng::random_range(&mut rng, 1..=4usize);
        if rows * ops >= n {
            return random_incoherent_kraus(n, rows, ops, seed).unwrap();
        }
    }
}

fn measures() -> Vec<MeasureSpec> {
    let mut v: Vec<MeasureSpec> = usi_catalog()
        .into_iter()
        .map(|n| MeasureSpec::min_diag(n, SolverConfig::default()).unwrap())
        .collect();
    for (q, p) in [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (f64::INFINITY, 1.0)] {
        v.push(MeasureSpec::c_qp(q, p).unwrap());
    }
    v.push(MeasureSpec::new(NormSpec::lqp(1.0, 1.5).unwrap(), MeasureMethod::MinDiag(SolverConfig::default())).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn absolute_min_diag_matches_closed_form(seed in any::<u64>(), n in 2usize..5, q in prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)], p in 1.0..4.0f64) {
        let rho = random_density(n, &mut seeded(seed));
        let cfg = SolverConfig::default();
        let norm = NormSpec::lqp(q, p).unwrap();
        let r = c_nu_min_diag(&rho, &norm, &cfg).unwrap();
        let exact = c_qp(&rho, PExponent::new(q).unwrap(), PExponent::new(p).unwrap());
        prop_assert!((r.value - exact).abs() <= cfg.tolerance * 100.0, "{} vs {exact}", r.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn measures_are_permutation_and_phase_invariant(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = seeded(seed);
        let rho = random_density(n, &mut rng);
        let perm = random_permutation(n, &mut rng);
        let permuted = DensityState::new(&rho.hermitian().as_matrix().permute_similarity(&perm).unwrap()).unwrap();
        let phased = DensityState::new(&conjugate(rho.hermitian().as_matrix(), &random_diagonal_unitary(n, &mut rng))).unwrap();
        for m in measures() {
            let base = m.coherence(&rho).unwrap();
            let tol = if m.is_closed_form() { 1e-12 } else { 1e-7 };
            prop_assert!((m.coherence(&permuted).unwrap() - base).abs() <= tol, "{}", m.describe());
            prop_assert!((m.coherence(&phased).unwrap() - base).abs() <= tol, "{}", m.describe());
        }
    }

    #[test]
    fn faithfulness(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = seeded(seed);
        let diag = DensityState::incoherent(&DiagonalState::new(random_probability(n, &mut rng)).unwrap());
        let rho = random_density(n, &mut rng);
        for m in measures() {
            prop_assert!(m.coherence(&diag).unwrap() < 1e-7, "{}", m.describe());
            let c = m.coherence(&rho).unwrap();
            prop_assert!(c >= 0.0);
            if rho.hermitian().as_matrix().off_diagonal_mass() >= 1e-8 {
                prop_assert!(c >= 1e-7, "{}: {c}", m.describe());
            }
        }
    }

    #[test]
    fn convexity(seed in any::<u64>(), n in 1usize..5, count in 2usize..4) {
        let mut rng = seeded(seed);
        let states: Vec<DensityState> = (0..count).map(|_| random_density_any_rank(n, &mut rng)).collect();
        let weights = random_probability(count, &mut rng);
        for m in measures() {
            let r = check_b4(&m, &states, &weights, 1e-8).unwrap();
            prop_assert!(!r.is_violated(), "{}: {}", m.describe(), r.gap);
        }
    }

    #[test]
    fn minimizer_certificate(seed in any::<u64>(), n in 2usize..5) {
        let rho = random_density(n, &mut seeded(seed));
        for m in measures() {
            let r = m.compute(&rho).unwrap();
            let mut shifted = rho.hermitian().as_matrix().clone();
            for (i, x) in r.minimizer.iter().enumerate() {
                shifted[(i, i)] -= C64::new(*x, 0.0);
            }
            prop_assert!((m.norm().eval(&shifted).unwrap() - r.value).abs() <= 1e-12, "{}", m.describe());
        }
    }
}

proptest! {
    #[test]
    fn closed_form_is_block_additive(seed in any::<u64>(), a in 1usize..4, b in 1usize..4, w in 0.0..1.0f64, p in 1.0..5.0f64) {
        let mut rng = seeded(seed);
        let (r1, r2) = (random_density(a, &mut rng), random_density(b, &mut rng));
        let r = check_c3(&MeasureSpec::c_qp(1.0, p).unwrap(), &r1, &r2, w, 1e-9).unwrap();
        prop_assert!(r.gap <= 1e-9);
    }

    #[test]
    fn selective_outcomes_sum_to_channel(seed in any::<u64>(), n in 1usize..7) {
        let rho = random_density_any_rank(n, &mut seeded(seed));
        let k = kraus(n, seed);
        let full = apply_channel(&k, &rho).unwrap();
        let mut acc = ComplexMatrix::zeros(k.output_dim(), k.output_dim());
        for o in selective_outcomes(&k, &rho).unwrap() {
            if let Some(s) = o.state {
                acc = acc.add(&s.hermitian().as_matrix().scale(o.probability)).unwrap();
            }
        }
        prop_assert!(acc.max_abs_diff(full.hermitian().as_matrix()) < 1e-10);
        prop_assert!((full.hermitian().as_matrix().trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn incoherent_channels_keep_diagonals(seed in any::<u64>(), n in 1usize..7) {
        let sigma = DiagonalState::new(random_probability(n, &mut seeded(seed))).unwrap();
        let out = apply_channel(&kraus(n, seed), &DensityState::incoherent(&sigma)).unwrap();
        prop_assert!(out.hermitian().as_matrix().off_diagonal_mass() < 1e-10);
    }

    #[test]
    fn column_map_round_trip(seed in any::<u64>(), n in 1usize..7) {
        let k = kraus(n, seed);
        prop_assert_eq!(k.column_map().reconstruct(k.output_dim()), k.operators().to_vec());
    }

    #[test]
    fn sufficient_exponents_pass_b2_b3(seed in any::<u64>(), p in sufficient_p()) {
        let cfg = FalsifyConfig::default();
        let (rho, k) = random_b3_instance(&mut seeded(seed), &cfg).unwrap();
        let m = MeasureSpec::c_qp(1.0, p).unwrap();
        let b3 = check_b3(&m, &rho, &k, 1e-7).unwrap();
        prop_assert!(!b3.is_violated(), "{}", b3.gap);
        let b2 = check_b2(&m, &rho, &k, 1e-7).unwrap();
        prop_assert!(!b2.is_violated(), "{}", b2.gap);
    }

    #[test]
    fn perm_inequality_holds(seed in any::<u64>(), n in 1usize..9, p in 1.0..2.0f64) {
        let mut rng = seeded(seed);
        let inst = CoverInstance::new(n, random_cover(n, &mut rng), random_positive_vector(n, &mut rng), None).unwrap();
        prop_assert!(check_perm_inequality(&inst, PExponent::new(p).unwrap()).unwrap() <= 1e-10);
    }

    #[test]
    fn lagrange_inequality_holds(seed in any::<u64>(), n in 1usize..7, p in 1.0..2.0f64) {
        let mut rng = seeded(seed);
        let omega = random_cover(n, &mut rng);
        let v = random_positive_vector(n, &mut rng);
        if let Some(b) = random_feasible_weights(&omega, &v, &mut rng, 64) {
            let inst = CoverInstance::new(n, omega, v, Some(b)).unwrap();
            prop_assert!(check_lagrange_inequality(&inst, PExponent::new(p).unwrap()).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn kraus_covers_pass_both_lemmas(seed in any::<u64>(), n in 1usize..7, p in sufficient_p()) {
        let mut rng = seeded(seed);
        let v: Vec<C64> = (0..n).map(|_| complex_normal(&mut rng)).collect();
        let l2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = v.into_iter().map(|z| z / l2).collect();
        let inst = cover_from_kraus(&kraus(n, seed), &v).unwrap();
        let p = PExponent::new(p).unwrap();
        prop_assert!(check_perm_inequality(&inst, p).unwrap() <= 1e-10);
        prop_assert!(check_lagrange_inequality(&inst, p).unwrap() <= 1e-10);
    }

    #[test]
    fn contraction_holds(seed in any::<u64>(), n in 1usize..7, p in sufficient_p()) {
        let a = ginibre(n, n, &mut seeded(seed));
        prop_assert!(check_contraction(&a, &kraus(n, seed), PExponent::new(p).unwrap()).unwrap() <= 1e-10);
    }

    #[test]
    fn extreme_witnesses_separate(seed in any::<u64>(), n in 2usize..5, p in prop_oneof![Just(f64::INFINITY), 1.0..6.0f64]) {
        let p = PExponent::new(p).unwrap();
        let b = random_unit_lqp_matrix(n, p, &mut seeded(seed)).unwrap();
        let ExtremePoint::Witnesses { first, second, epsilon, .. } = extreme_point_witness(&b, p).unwrap() else {
            panic!("matrix has two nonzero columns");
        };
        prop_assert!(first.add(&second).unwrap().scale(0.5).max_abs_diff(&b) <= 1e-12);
        let bound = 2.0 * epsilon / (n as f64).powf(1.0 / p.value());
        prop_assert!(first.max_abs_diff(&second) >= bound * (1.0 - 1e-12));
        if (n as f64).powf(1.0 / p.value()) <= 4.0 {
            prop_assert!(first.max_abs_diff(&second) >= epsilon / 2.0);
        }
    }
}

#[test]
fn falsify_is_deterministic() {
    let m = MeasureSpec::c_qp(1.0, 3.0).unwrap();
    let a = falsify(&m, 20, 7).unwrap();
    let b = falsify(&m, 20, 7).unwrap();
    assert_eq!(a, b);
    assert!(!a.is_empty());
}

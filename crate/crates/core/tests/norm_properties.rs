use normcoh::catalog::all_norms;
use normcoh::eigen::eigenvalues_hermitian;
use normcoh::norms::{lqp_norm, schatten_norm, vector_lp};
use normcoh::random::{conjugate, ginibre, random_hermitian, random_permutation, random_unitary, seeded};
use normcoh::{diag_part, direct_sum, ComplexMatrix, HermitianMatrix, NormSpec, PExponent, C64};
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = PExponent> {
    prop_oneof![
        Just(PExponent::ONE),
        Just(PExponent::TWO),
        Just(PExponent::INFINITY),
        (1.0..6.0f64).prop_map(|p| PExponent::new(p).unwrap()),
    ]
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n * n).prop_map(move |v| {
        ComplexMatrix::new(n, n, v.into_iter().map(|(re, im)| C64::new(re, im)).collect()).unwrap()
    })
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

proptest! {
    #[test]
    fn direct_sum_spectrum_is_union(seed in any::<u64>(), a in 1usize..4, b in 1usize..4) {
        let mut rng = seeded(seed);
        let (x, y) = (random_hermitian(a, &mut rng), random_hermitian(b, &mut rng));
        let joint = eigenvalues_hermitian(&direct_sum(&[x.clone(), y.clone()]).unwrap()).unwrap().eigenvalues;
        let mut parts = eigenvalues_hermitian(&x).unwrap().eigenvalues;
        parts.extend(eigenvalues_hermitian(&y).unwrap().eigenvalues);
        for (u, v) in joint.iter().zip(sorted(parts)) {
            prop_assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn spectrum_is_permutation_invariant(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = seeded(seed);
        let h = random_hermitian(n, &mut rng);
        let perm = random_permutation(n, &mut rng);
        let moved = HermitianMatrix::new(h.as_matrix().permute_similarity(&perm).unwrap()).unwrap();
        let (e1, e2) = (eigenvalues_hermitian(&h).unwrap(), eigenvalues_hermitian(&moved).unwrap());
        for (u, v) in e1.eigenvalues.iter().zip(&e2.eigenvalues) {
            prop_assert!((u - v).abs() < 1e-9);
        }
        prop_assert!(e1.residual < 1e-9);
    }

    #[test]
    fn diag_part_keeps_trace(a in matrix(4)) {
        prop_assert_eq!(diag_part(&a).unwrap().trace(), a.trace());
    }

    #[test]
    fn norm_axioms(seed in any::<u64>(), n in 1usize..6, s in -3.0..3.0f64) {
        let mut rng = seeded(seed);
        let (a, b) = (random_hermitian(n, &mut rng), random_hermitian(n, &mut rng));
        let (a, b) = (a.as_matrix(), b.as_matrix());
        for norm in all_norms() {
            let na = norm.eval(a).unwrap();
            prop_assert!(na >= 0.0);
            let scaled = norm.eval(&a.scale(s)).unwrap();
            prop_assert!((scaled - s.abs() * na).abs() <= 1e-9 * (1.0 + na), "{}", norm.label());
            let sum = norm.eval(&a.add(b).unwrap()).unwrap();
            prop_assert!(sum <= na + norm.eval(b).unwrap() + 1e-9, "{}", norm.label());
        }
    }

    #[test]
    fn lqp_is_absolute(a in matrix(4), q in exponent(), p in exponent()) {
        prop_assert_eq!(lqp_norm(&a, q, p), lqp_norm(&a.abs_entries(), q, p));
    }

    #[test]
    fn lpp_is_entrywise(a in matrix(3), p in exponent()) {
        let flat = vector_lp(a.data(), p);
        prop_assert!((lqp_norm(&a, p, p) - flat).abs() <= 1e-12 * (1.0 + flat));
    }

    #[test]
    fn schatten_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..6, p in exponent()) {
        let mut rng = seeded(seed);
        let a = random_hermitian(n, &mut rng);
        let u = random_unitary(n, &mut rng);
        let moved = conjugate(a.as_matrix(), &u);
        let (x, y) = (schatten_norm(a.as_matrix(), p).unwrap(), schatten_norm(&moved, p).unwrap());
        prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x));
    }

    #[test]
    fn gauge_norms_are_permutation_invariant(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = seeded(seed);
        let a = random_hermitian(n, &mut rng);
        let perm = random_permutation(n, &mut rng);
        let moved = a.as_matrix().permute_similarity(&perm).unwrap();
        for norm in [NormSpec::ky_fan(1, 8).unwrap(), NormSpec::ky_fan(3, 8).unwrap(), NormSpec::numerical_radius(8)] {
            let (x, y) = (norm.eval(a.as_matrix()).unwrap(), norm.eval(&moved).unwrap());
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x));
        }
    }

    #[test]
    fn non_square_rejected_by_spectral_norms(seed in any::<u64>()) {
        let a = ginibre(2, 3, &mut seeded(seed));
        prop_assert!(NormSpec::trace_norm().eval(&a).is_err());
    }
}

//! Seeded samplers for states, unitaries and probability vectors.
//!
//! Everything takes an explicit RNG; [`seeded`] gives the portable ChaCha
//! stream used throughout the crate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::eigen;
use crate::matrix::{ComplexMatrix, DensityState, HermitianMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex normal (independent real and imaginary parts).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Matrix with i.i.d. complex normal entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("shape is consistent")
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    let g = ginibre(n, n, rng);
    HermitianMatrix::from_trusted(g.add(&g.adjoint()).expect("square").scale(0.5))
}

/// Random Hermitian matrix with zero trace.
pub fn random_traceless_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    let h = random_hermitian(n, rng);
    let shift = h.trace().re / n as f64;
    HermitianMatrix::from_trusted(h.as_matrix().sub(&ComplexMatrix::identity(n).scale(shift)).expect("square"))
}

/// Density matrix `G G† / tr(G G†)` from a `n × rank` Ginibre factor.
pub fn random_density_with_rank<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> DensityState {
    let g = ginibre(n, rank.max(1), rng);
    let m = g.matmul(&g.adjoint()).expect("shapes agree");
    let tr = m.trace().re;
    DensityState::from_trusted(m.scale(1.0 / tr))
}

/// Full-rank random density matrix.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityState {
    random_density_with_rank(n, n, rng)
}

/// Random density matrix whose rank is drawn uniformly from `1..=n`.
pub fn random_density_any_rank<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityState {
    let rank = rng.random_range(1..=n);
    random_density_with_rank(n, rank, rng)
}

/// Uniform point of the probability simplex (flat Dirichlet).
pub fn random_probability<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// Diagonal unitary with uniform random phases.
pub fn random_diagonal_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        u[(i, i)] = C64::from_polar(1.0, phi);
    }
    u
}

/// Unitary `exp(iH)` for a random Hermitian `H`, via Jacobi diagonalization.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let h = random_hermitian(n, rng);
    let (vals, v) = eigen::eigh(&h);
    let mut d = ComplexMatrix::zeros(n, n);
    for (i, &l) in vals.iter().enumerate() {
        d[(i, i)] = C64::from_polar(1.0, l);
    }
    v.matmul(&d)
        .and_then(|vd| vd.matmul(&v.adjoint()))
        .expect("square factors")
}

/// `U† A U`.
pub fn conjugate(a: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    u.adjoint()
        .matmul(a)
        .and_then(|m| m.matmul(u))
        .expect("shapes agree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = seeded(3);
        for n in 1..6 {
            let u = random_unitary(n, &mut rng);
            let uu = u.adjoint().matmul(&u).unwrap();
            assert!(uu.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn densities_validate() {
        let mut rng = seeded(11);
        for n in 1..7 {
            let rho = random_density_any_rank(n, &mut rng);
            assert!(crate::matrix::validate_density(&rho).is_ok());
        }
    }

    #[test]
    fn probability_sums_to_one() {
        let w = random_probability(5, &mut seeded(0));
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(w.iter().all(|&x| x >= 0.0));
    }
}

//! Named test states and norm catalogs.
//!
//! Every catalog state is a weighted direct sum `⊕ w_i ρ_i` of normalized
//! blocks; the blocks are kept so decomposition-based checks and the
//! symmetry-reduced solver can use them.

use crate::error::Result;
use crate::matrix::{ComplexMatrix, DensityState, HermitianMatrix, C64};
use crate::measures::is_circulant_invariant;
use crate::norms::NormSpec;

/// Largest dimension the shipped gauge-norm generators cover.
pub const CATALOG_MAX_DIM: usize = 8;

#[derive(Clone, Debug)]
pub struct CatalogState {
    pub label: String,
    pub state: DensityState,
    /// `(weight, normalized block)` pairs; `state = ⊕ weight·block`.
    pub blocks: Vec<(f64, DensityState)>,
}

impl CatalogState {
    pub fn from_blocks(label: &str, blocks: Vec<(f64, DensityState)>) -> Result<Self> {
        let parts: Vec<(f64, &DensityState)> = blocks.iter().map(|(w, b)| (*w, b)).collect();
        let state = DensityState::weighted_direct_sum(&parts)?;
        Ok(Self {
            label: label.to_string(),
            state,
            blocks,
        })
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    /// Blocks scaled by their weights, as taken by
    /// [`c_nu_symmetric`](crate::measures::c_nu_symmetric).
    pub fn weighted_blocks(&self) -> Vec<HermitianMatrix> {
        self.blocks.iter().map(|(w, b)| b.hermitian().scale(*w)).collect()
    }

    /// Whether every block is invariant under its basic circulant.
    pub fn is_circulant_symmetric(&self) -> bool {
        self.blocks.iter().all(|(_, b)| is_circulant_invariant(b))
    }
}

/// `J_n / n`.
pub fn j_state(n: usize) -> DensityState {
    DensityState::maximally_coherent(n).expect("n is positive")
}

/// The 1×1 state `[1]`; with weight zero it contributes a `[0]` block.
pub fn unit_block() -> DensityState {
    j_state(1)
}

fn pure_state(amplitudes: &[C64]) -> DensityState {
    let n = amplitudes.len();
    let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = amplitudes[i] * amplitudes[j].conj() / norm2;
        }
    }
    DensityState::new(&m).expect("rank-one projector")
}

/// The shipped test states.
pub fn catalog_states() -> Vec<CatalogState> {
    let half = 0.5;
    let third = 1.0 / 3.0;
    let mk = |label: &str, blocks: Vec<(f64, DensityState)>| {
        CatalogState::from_blocks(label, blocks).expect("catalog weights are a probability vector")
    };
    vec![
        mk("J2/2", vec![(1.0, j_state(2))]),
        mk("J3/3", vec![(1.0, j_state(3))]),
        mk("J4/4", vec![(1.0, j_state(4))]),
        mk("J3/3+[0]", vec![(1.0, j_state(3)), (0.0, unit_block())]),
        mk("J2/2+0_2", vec![(1.0, j_state(2)), (0.0, unit_block()), (0.0, unit_block())]),
        mk("J2/4+J2/4", vec![(half, j_state(2)), (half, j_state(2))]),
        mk("J2/6+J2/3", vec![(third, j_state(2)), (2.0 * third, j_state(2))]),
        mk("J2/3+[1/3]", vec![(2.0 * third, j_state(2)), (third, unit_block())]),
        mk(
            "J2/6+J2/6+J2/6",
            vec![(third, j_state(2)), (third, j_state(2)), (third, j_state(2))],
        ),
        mk(
            "J2/4+J3/6+[0]",
            vec![(half, j_state(2)), (half, j_state(3)), (0.0, unit_block())],
        ),
        mk(
            "J2/6+J2/4+J2/12",
            vec![(third, j_state(2)), (half, j_state(2)), (1.0 / 6.0, j_state(2))],
        ),
        mk(
            "psi(1,2,2i)/3",
            vec![(
                1.0,
                pure_state(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 2.0)]),
            )],
        ),
        mk(
            "psi(1,1+i,0,2)",
            vec![(
                1.0,
                pure_state(&[
                    C64::new(1.0, 0.0),
                    C64::new(1.0, 1.0),
                    C64::new(0.0, 0.0),
                    C64::new(2.0, 0.0),
                ]),
            )],
        ),
    ]
}

pub fn catalog_state(label: &str) -> Option<CatalogState> {
    catalog_states().into_iter().find(|s| s.label == label)
}

/// The unitary-similarity-invariant catalog: Schatten
/// `p ∈ {1, 1.5, 2, 3, ∞}`, Ky Fan 1 and 2, and the Hermitian numerical radius.
pub fn usi_catalog() -> Vec<NormSpec> {
    let mut out: Vec<NormSpec> = [1.0, 1.5, 2.0, 3.0, f64::INFINITY]
        .iter()
        .map(|&p| NormSpec::schatten(p).expect("p ≥ 1"))
        .collect();
    out.push(NormSpec::ky_fan(1, CATALOG_MAX_DIM).expect("k ≥ 1"));
    out.push(NormSpec::ky_fan(2, CATALOG_MAX_DIM).expect("k ≥ 1"));
    out.push(NormSpec::numerical_radius(CATALOG_MAX_DIM));
    out
}

/// Absolute norms `ℓ_{q,p}` used in cross-checks.
pub fn lqp_catalog() -> Vec<NormSpec> {
    [
        (1.0, 1.0),
        (1.0, 1.5),
        (1.0, 2.0),
        (1.0, 3.0),
        (1.0, f64::INFINITY),
        (2.0, 2.0),
        (2.0, 1.0),
        (f64::INFINITY, 1.0),
    ]
    .iter()
    .map(|&(q, p)| NormSpec::lqp(q, p).expect("exponents ≥ 1"))
    .collect()
}

pub fn all_norms() -> Vec<NormSpec> {
    let mut v = usi_catalog();
    v.extend(lqp_catalog());
    v
}

//! Coherence measures induced by norms.
//!
//! `C_ν(ρ) = min { ν(ρ − σ) : σ diagonal density matrix }`. For absolute norms
//! the minimum sits at `σ = ρ_diag`, which gives the closed form
//! `C_{q,p}(ρ) = ℓ_{q,p}(ρ − ρ_diag)`. Other norms go through the simplex
//! solver in [`crate::solver`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{diag_part, ComplexMatrix, DensityState, DiagonalState, HermitianMatrix, C64};
use crate::norms::{lqp_norm, NormSpec, PExponent};
use crate::solver::{minimize_convex, BoxDomain, Simplex, SolverConfig, SolverTrace};

/// Residual below which a block counts as invariant under its basic circulant.
pub const CIRCULANT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureMethod {
    /// `ν(ρ − ρ_diag)`; only valid for absolute norms.
    ClosedForm,
    /// Nearest diagonal state by numerical minimization.
    MinDiag(SolverConfig),
    /// `min { ν(ρ − D) : D ≥ 0 diagonal }`, i.e. `min ν(ρ − tσ)` over `t ≥ 0`.
    Yu(SolverConfig),
}

/// A norm plus the way its coherence measure is evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasureSpec", into = "RawMeasureSpec")]
pub struct MeasureSpec {
    norm: NormSpec,
    method: MeasureMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum MethodTag {
    ClosedForm,
    MinDiag,
    Yu,
}

#[derive(Serialize, Deserialize)]
struct RawMeasureSpec {
    #[serde(flatten)]
    norm: NormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    method: Option<MethodTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    solver: Option<SolverConfig>,
}

impl TryFrom<RawMeasureSpec> for MeasureSpec {
    type Error = Error;

    fn try_from(raw: RawMeasureSpec) -> Result<Self> {
        let cfg = raw.solver.unwrap_or_default();
        let tag = raw.method.unwrap_or(if raw.norm.is_absolute() {
            MethodTag::ClosedForm
        } else {
            MethodTag::MinDiag
        });
        let method = match tag {
            MethodTag::ClosedForm => MeasureMethod::ClosedForm,
            MethodTag::MinDiag => MeasureMethod::MinDiag(cfg),
            MethodTag::Yu => MeasureMethod::Yu(cfg),
        };
        Self::new(raw.norm, method)
    }
}

impl From<MeasureSpec> for RawMeasureSpec {
    fn from(m: MeasureSpec) -> Self {
        let (method, solver) = match m.method {
            MeasureMethod::ClosedForm => (MethodTag::ClosedForm, None),
            MeasureMethod::MinDiag(c) => (MethodTag::MinDiag, Some(c)),
            MeasureMethod::Yu(c) => (MethodTag::Yu, Some(c)),
        };
        Self {
            norm: m.norm,
            method: Some(method),
            solver,
        }
    }
}

impl MeasureSpec {
    pub fn new(norm: NormSpec, method: MeasureMethod) -> Result<Self> {
        if method == MeasureMethod::ClosedForm && !norm.is_absolute() {
            return Err(Error::Config(format!(
                "closed form needs an absolute norm, got {}",
                norm.label()
            )));
        }
        match &method {
            MeasureMethod::MinDiag(c) | MeasureMethod::Yu(c) => c.validate()?,
            MeasureMethod::ClosedForm => {}
        }
        Ok(Self { norm, method })
    }

    /// `C_{q,p}` via its closed form.
    pub fn c_qp(q: f64, p: f64) -> Result<Self> {
        Self::new(NormSpec::lqp(q, p)?, MeasureMethod::ClosedForm)
    }

    pub fn min_diag(norm: NormSpec, cfg: SolverConfig) -> Result<Self> {
        Self::new(norm, MeasureMethod::MinDiag(cfg))
    }

    pub fn trace_norm() -> Self {
        Self {
            norm: NormSpec::trace_norm(),
            method: MeasureMethod::MinDiag(SolverConfig::default()),
        }
    }

    /// Modified trace-norm measure `min { ‖ρ − tσ‖_1 : t ≥ 0, σ incoherent }`.
    pub fn yu(cfg: SolverConfig) -> Result<Self> {
        Self::new(NormSpec::trace_norm(), MeasureMethod::Yu(cfg))
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    pub fn method(&self) -> &MeasureMethod {
        &self.method
    }

    pub fn method_name(&self) -> &'static str {
        match self.method {
            MeasureMethod::ClosedForm => "closed_form",
            MeasureMethod::MinDiag(_) => "min_diag",
            MeasureMethod::Yu(_) => "yu",
        }
    }

    pub fn is_closed_form(&self) -> bool {
        self.method == MeasureMethod::ClosedForm
    }

    /// Value, minimizer and solver trace.
    pub fn compute(&self, rho: &DensityState) -> Result<MinimizationResult> {
        match &self.method {
            MeasureMethod::ClosedForm => {
                let (q, p) = match self.norm {
                    NormSpec::Lqp { q, p } => (q, p),
                    _ => unreachable!("checked in MeasureSpec::new"),
                };
                Ok(MinimizationResult {
                    value: c_qp(rho, q, p),
                    minimizer: rho.diagonal_state().entries().to_vec(),
                    trace: SolverTrace {
                        iterations: 0,
                        final_step: 0.0,
                        starts: 0,
                        lower_bound: None,
                    },
                })
            }
            MeasureMethod::MinDiag(cfg) => c_nu_min_diag(rho, &self.norm, cfg),
            MeasureMethod::Yu(cfg) => yu_with_norm(rho, &self.norm, cfg),
        }
    }
}

/// Anything that assigns a coherence value to a state.
pub trait CoherenceMeasure {
    fn coherence(&self, rho: &DensityState) -> Result<f64>;
    fn describe(&self) -> String;
}

impl CoherenceMeasure for MeasureSpec {
    fn coherence(&self, rho: &DensityState) -> Result<f64> {
        Ok(self.compute(rho)?.value)
    }

    fn describe(&self) -> String {
        format!("{} ({})", self.norm.label(), self.method_name())
    }
}

/// A measure rescaled by a positive constant.
#[derive(Clone, Debug)]
pub struct Scaled<M> {
    pub inner: M,
    pub factor: f64,
}

impl<M: CoherenceMeasure> CoherenceMeasure for Scaled<M> {
    fn coherence(&self, rho: &DensityState) -> Result<f64> {
        Ok(self.factor * self.inner.coherence(rho)?)
    }

    fn describe(&self) -> String {
        format!("{} x {}", self.factor, self.inner.describe())
    }
}

impl<M: CoherenceMeasure + ?Sized> CoherenceMeasure for &M {
    fn coherence(&self, rho: &DensityState) -> Result<f64> {
        (**self).coherence(rho)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// Result of a nearest-diagonal minimization. `value` is `ν(ρ − diag(minimizer))`
/// re-evaluated at the returned point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizationResult {
    pub value: f64,
    /// Diagonal of the minimizer (a probability vector except for the Yu
    /// measure, where it is any nonnegative diagonal).
    pub minimizer: Vec<f64>,
    pub trace: SolverTrace,
}

impl MinimizationResult {
    pub fn minimizer_state(&self) -> Result<DiagonalState> {
        DiagonalState::new(self.minimizer.clone())
    }
}

/// `ℓ_{q,p}(ρ − ρ_diag)`.
pub fn c_qp(rho: &DensityState, q: PExponent, p: PExponent) -> f64 {
    let off = rho.sub(&diag_part(rho).expect("square")).expect("same shape");
    lqp_norm(&off, q, p)
}

fn minus_diagonal(rho: &ComplexMatrix, d: &[f64]) -> ComplexMatrix {
    let mut m = rho.clone();
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] -= C64::new(x, 0.0);
    }
    m
}

/// `min { ν(ρ − σ) : σ ∈ I_n }` by numerical minimization. Seeds, in order:
/// `ρ_diag`, the uniform state, the best coarse-grid point, then random
/// restarts.
pub fn c_nu_min_diag(rho: &DensityState, norm: &NormSpec, cfg: &SolverConfig) -> Result<MinimizationResult> {
    let n = rho.dim();
    let m: &ComplexMatrix = rho;
    let f = |x: &[f64]| norm.eval_hermitian(&minus_diagonal(m, x));
    let seeds = [
        rho.diagonal_state().entries().to_vec(),
        vec![1.0 / n as f64; n],
    ];
    let out = minimize_convex(&Simplex(n), f, diagonal_oracle(m, norm), &seeds, cfg)?;
    Ok(MinimizationResult {
        value: out.value,
        minimizer: out.x,
        trace: out.trace,
    })
}

/// `x ↦ (ν(ρ − diag x), g)` with `g` a subgradient in `x`.
fn diagonal_oracle<'a>(m: &'a ComplexMatrix, norm: &'a NormSpec) -> impl FnMut(&[f64]) -> Result<(f64, Vec<f64>)> + 'a {
    move |x| {
        let (v, d) = norm.diagonal_subgradient(&minus_diagonal(m, x))?;
        Ok((v, d.into_iter().map(|g| -g).collect()))
    }
}

/// Minimizer of [`c_nu_min_diag`]; for absolute norms this is `ρ_diag`
/// exactly.
pub fn nearest_diag_minimizer(rho: &DensityState, norm: &NormSpec, cfg: &SolverConfig) -> Result<DiagonalState> {
    if norm.is_absolute() {
        return Ok(rho.diagonal_state());
    }
    c_nu_min_diag(rho, norm, cfg)?.minimizer_state()
}

/// Checks `R†BR = B` for the basic circulant `R` of the block size.
pub fn is_circulant_invariant(block: &ComplexMatrix) -> bool {
    circulant_residual(block) < CIRCULANT_TOL
}

fn circulant_residual(block: &ComplexMatrix) -> f64 {
    let l = block.rows();
    let perm: Vec<usize> = (0..l).map(|j| (j + l - 1) % l).collect();
    block
        .permute_similarity(&perm)
        .map_or(f64::INFINITY, |m| m.max_abs_diff(block))
}

/// Coherence of `ρ = ρ_1 ⊕ ⋯ ⊕ ρ_k` with circulant-invariant blocks, minimizing
/// only over `σ = s_1 I ⊕ ⋯ ⊕ s_k I`. Blocks are unnormalized (their traces sum
/// to one); identical blocks share one `s`.
pub fn c_nu_symmetric(blocks: &[HermitianMatrix], norm: &NormSpec, cfg: &SolverConfig) -> Result<MinimizationResult> {
    if blocks.is_empty() {
        return Err(Error::Argument("no blocks".into()));
    }
    for (i, b) in blocks.iter().enumerate() {
        let r = circulant_residual(b);
        if !(r < CIRCULANT_TOL) {
            return Err(Error::Precondition(format!(
                "block {i} is not invariant under its basic circulant (residual {r:e})"
            )));
        }
    }
    let rho = DensityState::new(crate::matrix::direct_sum(blocks)?.as_matrix())?;

    // group identical blocks
    let mut group_of = Vec::with_capacity(blocks.len());
    let mut reps: Vec<usize> = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        let g = reps
            .iter()
            .position(|&r| blocks[r].dim() == b.dim() && blocks[r].max_abs_diff(b) <= 1e-12);
        match g {
            Some(g) => group_of.push(g),
            None => {
                group_of.push(reps.len());
                reps.push(i);
            }
        }
    }
    let k = reps.len();
    let mut group_dim = vec![0usize; k];
    let mut group_mass = vec![0.0; k];
    for (b, &g) in blocks.iter().zip(&group_of) {
        group_dim[g] += b.dim();
        group_mass[g] += b.trace().re;
    }
    let expand = |t: &[f64]| -> Vec<f64> {
        blocks
            .iter()
            .zip(&group_of)
            .flat_map(|(b, &g)| std::iter::repeat_n(t[g] / group_dim[g] as f64, b.dim()))
            .collect()
    };
    let m: &ComplexMatrix = &rho;
    let f = |t: &[f64]| norm.eval_hermitian(&minus_diagonal(m, &expand(t)));
    let n = rho.dim() as f64;
    let seeds = [
        group_mass.clone(),
        group_dim.iter().map(|&d| d as f64 / n).collect(),
    ];
    let oracle = |t: &[f64]| -> Result<(f64, Vec<f64>)> {
        let (v, d) = norm.diagonal_subgradient(&minus_diagonal(m, &expand(t)))?;
        let mut g = vec![0.0; k];
        for (&di, gi) in d.iter().zip(blocks.iter().zip(&group_of).flat_map(|(b, &g)| std::iter::repeat_n(g, b.dim()))) {
            g[gi] -= di / group_dim[gi] as f64;
        }
        Ok((v, g))
    };
    let out = minimize_convex(&Simplex(k), f, oracle, &seeds, cfg)?;
    let minimizer = expand(&out.x);
    let value = norm.eval_hermitian(&minus_diagonal(m, &minimizer))?;
    Ok(MinimizationResult {
        value,
        minimizer,
        trace: out.trace,
    })
}

/// Modified trace-norm measure `min { ‖ρ − tσ‖_1 : t ≥ 0, σ ∈ I_n }`.
pub fn yu_modified_measure(rho: &DensityState, cfg: &SolverConfig) -> Result<MinimizationResult> {
    yu_with_norm(rho, &NormSpec::trace_norm(), cfg)
}

/// `min { ν(ρ − D) : D diagonal, D ≥ 0 }` over the box
/// `0 ≤ D_ii ≤ 2·max_j ρ_jj + 1`. For the trace norm the optimum lies in it:
/// `|ρ_ii − D_ii| ≤ ‖ρ − D‖_1 ≤ ‖ρ − 0‖_1 = 1`.
pub fn yu_with_norm(rho: &DensityState, norm: &NormSpec, cfg: &SolverConfig) -> Result<MinimizationResult> {
    let n = rho.dim();
    let diag = rho.diagonal_state();
    let max_diag = diag.entries().iter().cloned().fold(0.0, f64::max);
    let upper = 2.0 * max_diag + 1.0;
    let m: &ComplexMatrix = rho;
    let f = |x: &[f64]| norm.eval_hermitian(&minus_diagonal(m, x));
    let seeds = [diag.entries().to_vec(), vec![0.0; n]];
    let out = minimize_convex(&BoxDomain(vec![upper; n]), f, diagonal_oracle(m, norm), &seeds, cfg)?;
    Ok(MinimizationResult {
        value: out.value,
        minimizer: out.x,
        trace: out.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{direct_sum, make_all_ones};

    fn j_over(n: usize, s: f64) -> HermitianMatrix {
        make_all_ones(n).unwrap().scale(s)
    }

    fn state(h: HermitianMatrix) -> DensityState {
        DensityState::new(h.as_matrix()).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let rho = state(j_over(2, 0.5));
        assert_eq!(c_qp(&rho, PExponent::ONE, PExponent::ONE), 1.0);
        let a = state(direct_sum(&[j_over(2, 0.25), j_over(2, 0.25)]).unwrap());
        for q in [1.0, 1.5, 2.0, 3.0] {
            for p in [1.0, 2.0, f64::INFINITY] {
                let v = c_qp(&a, PExponent::new(q).unwrap(), PExponent::new(p).unwrap());
                assert!((v - 4f64.powf(1.0 / q) / 4.0).abs() < 1e-15);
            }
        }
        for n in 1..6usize {
            let rho = DensityState::maximally_coherent(n + 1).unwrap();
            for p in [1.0, 1.5, 2.0] {
                let v = c_qp(&rho, PExponent::ONE, PExponent::new(p).unwrap());
                assert!((v - (n as f64).powf(1.0 / p)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn trace_norm_catalog_values() {
        let cfg = SolverConfig::default();
        let r = c_nu_min_diag(&state(j_over(2, 0.5)), &NormSpec::trace_norm(), &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);

        let rho = state(direct_sum(&[j_over(3, 1.0 / 3.0), HermitianMatrix::from_real_diag(&[0.0])]).unwrap());
        let r = c_nu_min_diag(&rho, &NormSpec::trace_norm(), &cfg).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-8, "{}", r.value);
        let want = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0];
        for (a, b) in r.minimizer.iter().zip(&want) {
            assert!((a - b).abs() < 1e-4, "{:?}", r.minimizer);
        }
    }

    #[test]
    fn diagonal_states_have_zero_coherence() {
        let sigma = DiagonalState::new(vec![0.2, 0.5, 0.3]).unwrap();
        let rho = DensityState::incoherent(&sigma);
        for norm in [NormSpec::trace_norm(), NormSpec::schatten(2.0).unwrap(), NormSpec::lqp(1.0, 2.0).unwrap()] {
            let r = c_nu_min_diag(&rho, &norm, &SolverConfig::default()).unwrap();
            assert_eq!(r.value, 0.0);
            assert_eq!(r.minimizer, sigma.entries());
        }
        let y = yu_modified_measure(&rho, &SolverConfig::default()).unwrap();
        assert_eq!(y.value, 0.0);
    }

    #[test]
    fn symmetric_reduction_examples() {
        let cfg = SolverConfig::default();
        let r = c_nu_symmetric(
            &[j_over(3, 1.0 / 3.0), HermitianMatrix::from_real_diag(&[0.0])],
            &NormSpec::trace_norm(),
            &cfg,
        )
        .unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-9);

        let blocks = [j_over(2, 0.25), j_over(2, 0.25)];
        let r = c_nu_symmetric(&blocks, &NormSpec::trace_norm(), &cfg).unwrap();
        let rho = state(direct_sum(&blocks).unwrap());
        let off = rho.sub(&diag_part(&rho).unwrap()).unwrap();
        let want = NormSpec::trace_norm().eval(&off).unwrap();
        assert!((r.value - want).abs() < 1e-12);
        assert_eq!(r.minimizer, vec![0.25; 4]);

        let r = c_nu_symmetric(&[j_over(2, 0.5)], &NormSpec::trace_norm(), &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_rejects_non_circulant() {
        let b = HermitianMatrix::from_real_diag(&[0.7, 0.3]);
        assert!(matches!(
            c_nu_symmetric(&[b], &NormSpec::trace_norm(), &SolverConfig::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn nearest_minimizer_examples() {
        let cfg = SolverConfig::default();
        let rho = state(direct_sum(&[j_over(3, 1.0 / 3.0), HermitianMatrix::from_real_diag(&[0.0])]).unwrap());
        let abs = nearest_diag_minimizer(&rho, &NormSpec::lqp(1.0, f64::INFINITY).unwrap(), &cfg).unwrap();
        assert_eq!(abs, rho.diagonal_state());
        let m = nearest_diag_minimizer(&rho, &NormSpec::trace_norm(), &cfg).unwrap();
        for (a, b) in m.entries().iter().zip([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]) {
            assert!((a - b).abs() < 1e-4);
        }
        let rho = state(direct_sum(&[j_over(2, 0.25), j_over(2, 0.25)]).unwrap());
        let m = nearest_diag_minimizer(&rho, &NormSpec::trace_norm(), &cfg).unwrap();
        for a in m.entries() {
            assert!((a - 0.25).abs() < 1e-4, "{:?}", m.entries());
        }
    }

    #[test]
    fn closed_form_requires_absolute_norm() {
        assert!(MeasureSpec::new(NormSpec::trace_norm(), MeasureMethod::ClosedForm).is_err());
    }

    #[test]
    fn measure_spec_json() {
        let m: MeasureSpec = serde_json::from_str(r#"{"tag":"lqp","q":1,"p":2}"#).unwrap();
        assert!(m.is_closed_form());
        let m: MeasureSpec = serde_json::from_str(r#"{"tag":"schatten","p":1,"method":"min_diag"}"#).unwrap();
        assert_eq!(m.method_name(), "min_diag");
        let m: MeasureSpec = serde_json::from_str(r#"{"tag":"schatten","p":"inf"}"#).unwrap();
        assert_eq!(m.method_name(), "min_diag");
        let m: MeasureSpec =
            serde_json::from_str(r#"{"tag":"schatten","p":1,"method":"yu","solver":{"restarts":2}}"#).unwrap();
        assert_eq!(m.method, MeasureMethod::Yu(SolverConfig { restarts: 2, ..SolverConfig::default() }));
        let back: MeasureSpec = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<MeasureSpec>(r#"{"tag":"schatten","p":1,"method":"closed_form"}"#).is_err());
    }
}

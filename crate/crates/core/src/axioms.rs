//! Axiom checks for coherence measures.
//!
//! Each check returns an [`AxiomReport`] whose `gap` is positive exactly when
//! the axiom fails, by that amount. A report is `violated` when the gap exceeds
//! its tolerance.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::{j_state, unit_block};
use crate::channels::{apply_channel, necessity_family, random_incoherent_kraus, selective_outcomes, KrausSet};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, DensityState, TRACE_TOL};
use crate::measures::{CoherenceMeasure, MeasureMethod, MeasureSpec, Scaled};
use crate::norms::{NormSpec, PExponent};
use crate::random::{random_density_any_rank, random_probability, seeded, SeededRng};
use crate::solver::SolverConfig;

use rand::Rng;

/// Default violation tolerance.
pub const VIOLATION_TOL: f64 = 1e-7;

/// Witnesses for states above this dimension record only their parameters.
const WITNESS_MAX_DIM: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axiom {
    B1,
    B2,
    B3,
    B4,
    C3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub verdict: Verdict,
    /// Positive means violated by this much.
    pub gap: f64,
    pub tolerance: f64,
    pub witness: Value,
}

impl AxiomReport {
    pub fn new(axiom: Axiom, gap: f64, tolerance: f64, witness: Value) -> Self {
        let verdict = if gap > tolerance {
            Verdict::Violated
        } else {
            Verdict::Holds
        };
        Self {
            axiom,
            verdict,
            gap,
            tolerance,
            witness,
        }
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

fn matrix_witness(m: &ComplexMatrix) -> Value {
    if m.rows() <= WITNESS_MAX_DIM {
        serde_json::to_value(m).unwrap_or(Value::Null)
    } else {
        json!({ "dim": m.rows() })
    }
}

fn kraus_witness(k: &KrausSet) -> Value {
    if k.input_dim().max(k.output_dim()) <= WITNESS_MAX_DIM {
        serde_json::to_value(k).unwrap_or(Value::Null)
    } else {
        json!({ "ops": k.len(), "rows": k.output_dim(), "cols": k.input_dim() })
    }
}

/// (B1): `C(ρ) ≥ 0`, and `C(σ) = 0` for incoherent `σ`.
pub fn check_b1<M: CoherenceMeasure + ?Sized>(measure: &M, rho: &DensityState, tol: f64) -> Result<AxiomReport> {
    let c = measure.coherence(rho)?;
    let incoherent = rho.is_incoherent(1e-14);
    let gap = if incoherent { c.abs() } else { -c };
    Ok(AxiomReport::new(
        Axiom::B1,
        gap,
        tol,
        json!({ "measure": measure.describe(), "rho": matrix_witness(rho), "value": c, "incoherent": incoherent }),
    ))
}

/// (B2): `C(Λ(ρ)) ≤ C(ρ)`.
pub fn check_b2<M: CoherenceMeasure + ?Sized>(measure: &M, rho: &DensityState, k: &KrausSet, tol: f64) -> Result<AxiomReport> {
    let before = measure.coherence(rho)?;
    let after = measure.coherence(&apply_channel(k, rho)?)?;
    Ok(AxiomReport::new(
        Axiom::B2,
        after - before,
        tol,
        json!({
            "measure": measure.describe(),
            "rho": matrix_witness(rho),
            "kraus": kraus_witness(k),
            "before": before,
            "after": after,
        }),
    ))
}

/// (B3): `Σ_j p_j C(ρ_j) ≤ C(ρ)`; zero-probability branches are skipped.
pub fn check_b3<M: CoherenceMeasure + ?Sized>(measure: &M, rho: &DensityState, k: &KrausSet, tol: f64) -> Result<AxiomReport> {
    let c = measure.coherence(rho)?;
    let outcomes = selective_outcomes(k, rho)?;
    let mut averaged = 0.0;
    let mut probabilities = Vec::with_capacity(outcomes.len());
    let mut values = Vec::with_capacity(outcomes.len());
    for o in &outcomes {
        probabilities.push(o.probability);
        match &o.state {
            Some(s) => {
                let v = measure.coherence(s)?;
                averaged += o.probability * v;
                values.push(Some(v));
            }
            None => values.push(None),
        }
    }
    Ok(AxiomReport::new(
        Axiom::B3,
        averaged - c,
        tol,
        json!({
            "measure": measure.describe(),
            "rho": matrix_witness(rho),
            "kraus": kraus_witness(k),
            "coherence": c,
            "averaged": averaged,
            "probabilities": probabilities,
            "outcome_values": values,
        }),
    ))
}

fn mixture(states: &[DensityState], weights: &[f64]) -> Result<DensityState> {
    let Some(first) = states.first() else {
        return Err(Error::Argument("no states to mix".into()));
    };
    if states.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: states.len(),
            found: weights.len(),
        });
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::Argument("negative mixture weight".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > TRACE_TOL {
        return Err(Error::Argument(format!("mixture weights sum to {total}")));
    }
    let n = first.dim();
    let mut acc = ComplexMatrix::zeros(n, n);
    for (s, &w) in states.iter().zip(weights) {
        if s.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.dim(),
            });
        }
        acc = acc.add(&s.scale(w))?;
    }
    Ok(DensityState::from_trusted(acc))
}

/// (B4): `C(Σ_j p_j ρ_j) ≤ Σ_j p_j C(ρ_j)`.
pub fn check_b4<M: CoherenceMeasure + ?Sized>(
    measure: &M,
    states: &[DensityState],
    weights: &[f64],
    tol: f64,
) -> Result<AxiomReport> {
    let mix = mixture(states, weights)?;
    let lhs = measure.coherence(&mix)?;
    let mut rhs = 0.0;
    for (s, &w) in states.iter().zip(weights) {
        rhs += w * measure.coherence(s)?;
    }
    Ok(AxiomReport::new(
        Axiom::B4,
        lhs - rhs,
        tol,
        json!({
            "measure": measure.describe(),
            "states": states.iter().map(|s| matrix_witness(s)).collect::<Vec<_>>(),
            "weights": weights,
            "mixture_value": lhs,
            "averaged": rhs,
        }),
    ))
}

/// (C3): `C(p_1 ρ_1 ⊕ p_2 ρ_2) = p_1 C(ρ_1) + p_2 C(ρ_2)`; the gap is the
/// absolute difference.
pub fn check_c3<M: CoherenceMeasure + ?Sized>(
    measure: &M,
    rho1: &DensityState,
    rho2: &DensityState,
    p1: f64,
    tol: f64,
) -> Result<AxiomReport> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::Argument(format!("weight {p1} outside [0, 1]")));
    }
    let p2 = 1.0 - p1;
    let joint = DensityState::weighted_direct_sum(&[(p1, rho1), (p2, rho2)])?;
    let lhs = measure.coherence(&joint)?;
    let c1 = measure.coherence(rho1)?;
    let c2 = measure.coherence(rho2)?;
    let rhs = p1 * c1 + p2 * c2;
    Ok(AxiomReport::new(
        Axiom::C3,
        (lhs - rhs).abs(),
        tol,
        json!({
            "measure": measure.describe(),
            "rho1": matrix_witness(rho1),
            "rho2": matrix_witness(rho2),
            "p1": p1,
            "direct_sum_value": lhs,
            "weighted_sum": rhs,
        }),
    ))
}

/// The three direct-sum decompositions used against unitarily invariant
/// norms: `(ρ_1, ρ_2, p_1, label)`.
pub fn usi_decompositions() -> Vec<(DensityState, DensityState, f64, &'static str)> {
    let j2 = j_state(2);
    let j2_pair = DensityState::weighted_direct_sum(&[(0.5, &j2), (0.5, &j2)]).expect("valid weights");
    let j3_pad = DensityState::weighted_direct_sum(&[(1.0, &j_state(3)), (0.0, &unit_block())]).expect("valid weights");
    vec![
        (j2.clone(), j2.clone(), 0.5, "J2/2 (+) J2/2 @ 1/2"),
        (j2.clone(), j2_pair, 1.0 / 3.0, "J2/2 (+) (J2/4+J2/4) @ 1/3"),
        (j2, j3_pad, 0.5, "J2/2 (+) (J3/3+[0]) @ 1/2"),
    ]
}

/// Runs (C3) on [`usi_decompositions`] for the min-diag measure of `norm`,
/// rescaled so that `C(J_2/2) = 1`. Rejects non-USI norms and norms that
/// vanish on `J_2/2 − I_2/2`.
pub fn usi_catalog_c3_test(norm: &NormSpec, cfg: &SolverConfig) -> Result<Vec<AxiomReport>> {
    if !norm.is_usi() {
        return Err(Error::Precondition(format!(
            "{} is not unitary-similarity invariant",
            norm.label()
        )));
    }
    let inner = MeasureSpec::min_diag(norm.clone(), *cfg)?;
    let base = inner.coherence(&j_state(2))?;
    if base < 1e-12 {
        return Err(Error::Precondition(format!(
            "{} is degenerate on 2x2 trace-zero matrices (C(J2/2) = {base:e})",
            norm.label()
        )));
    }
    let measure = Scaled {
        inner,
        factor: 1.0 / base,
    };
    usi_decompositions()
        .iter()
        .map(|(r1, r2, p1, label)| {
            let mut rep = check_c3(&measure, r1, r2, *p1, VIOLATION_TOL)?;
            rep.witness["decomposition"] = json!(label);
            rep.witness["normalization"] = json!(base);
            Ok(rep)
        })
        .collect()
}

/// `f(n, θ) = C_{1,p}(K_1AK_1†) + C_{1,p}(K_2AK_2†) − C_{1,p}(A)` for
/// `A = J_{n+1}` and the two-operator family of [`necessity_family`], in
/// closed form. Positive values are (B3) violations of `C_{1,p}`.
pub fn f_n_theta(n: usize, theta: f64, p: PExponent) -> Result<f64> {
    if n == 0 {
        return Err(Error::Argument("n must be positive".into()));
    }
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::Argument(format!("theta {theta} outside (0, pi/2)")));
    }
    let nf = n as f64;
    let (s, c) = theta.sin_cos();
    if p.is_infinite() {
        let ones = if n > 1 { 1.0 } else { 0.0 };
        let k1 = s * s * nf * ones;
        let k2 = c + nf * if n > 1 { c.max(c * c) } else { c };
        return Ok(k1 + k2 - (nf + 1.0));
    }
    let p = p.value();
    let a = (nf + 1.0) * nf.powf(1.0 / p);
    let k1 = s * s * nf * (nf - 1.0).powf(1.0 / p);
    let k2 = c * nf.powf(1.0 / p) + nf * ((nf - 1.0) * c.powf(2.0 * p) + c.powf(p)).powf(1.0 / p);
    Ok(k1 + k2 - a)
}

/// Values of `cos θ` tried at every `n` by [`necessity_sweep`].
pub const SWEEP_COSINES: [f64; 4] = [0.5, 0.2, 0.1, 0.05];
/// Upper end of the `n` sweep.
pub const SWEEP_MAX_N: usize = 1 << 16;

/// Geometric grid `n_k = round(2·2^{k/4})` up to `max_n`, deduplicated.
pub fn sweep_dimensions(max_n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for k in 0.. {
        let n = (2.0 * 2f64.powf(k as f64 / 4.0)).round() as usize;
        if n > max_n {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityHit {
    pub n: usize,
    pub cos_theta: f64,
    pub theta: f64,
    /// Closed-form `f(n, θ)`.
    pub f: f64,
    /// `(n+1)` times the (B3) gap measured on `J_{n+1}/(n+1)`.
    pub scaled_gap: f64,
    pub report: AxiomReport,
}

/// Sweeps `n` over [`sweep_dimensions`] (outer) and `cos θ` over
/// [`SWEEP_COSINES`] (inner) for the first point where the normalized (B3) gap
/// `f(n, θ)/(n+1)` of `C_{1,p}` exceeds `tol`, then confirms it by running
/// [`check_b3`] on `J_{n+1}/(n+1)`.
pub fn necessity_sweep(p: PExponent, max_n: usize, tol: f64) -> Result<Option<NecessityHit>> {
    for n in sweep_dimensions(max_n) {
        for &c in &SWEEP_COSINES {
            let theta = c.acos();
            let f = f_n_theta(n, theta, p)?;
            if f / (n as f64 + 1.0) > tol {
                let measure = MeasureSpec::new(NormSpec::Lqp { q: PExponent::ONE, p }, MeasureMethod::ClosedForm)?;
                let rho = j_state(n + 1);
                let mut report = check_b3(&measure, &rho, &necessity_family(n, theta), tol)?;
                report.witness["n"] = json!(n);
                report.witness["theta"] = json!(theta);
                report.witness["cos_theta"] = json!(c);
                report.witness["f_closed_form"] = json!(f);
                return Ok(Some(NecessityHit {
                    n,
                    cos_theta: c,
                    theta,
                    f,
                    scaled_gap: report.gap * (n as f64 + 1.0),
                    report,
                }));
            }
        }
    }
    Ok(None)
}

/// Options for [`falsify_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct FalsifyConfig {
    pub trials: usize,
    pub seed: u64,
    /// Largest state dimension for random instances.
    pub max_dim: usize,
    pub max_rows: usize,
    pub max_ops: usize,
    pub tolerance: f64,
}

impl Default for FalsifyConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 0,
            max_dim: 6,
            max_rows: 8,
            max_ops: 4,
            tolerance: VIOLATION_TOL,
        }
    }
}

/// Per-trial seed, decorrelated from the base seed with a splitmix step.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random `(ρ, Kraus set)` instance: `n ≤ max_dim`, `N ≤ max_rows`,
/// `m ≤ max_ops` with `N·m ≥ n`.
pub fn random_b3_instance(rng: &mut SeededRng, cfg: &FalsifyConfig) -> Result<(DensityState, KrausSet)> {
    let n = rng.random_range(1..=cfg.max_dim);
    let (rows, ops) = loop {
        let rows = rng.random_range(1..=cfg.max_rows);
        let ops = rng.random_range(1..=cfg.max_ops);
        if rows * ops >= n {
            break (rows, ops);
        }
    };
    let rho = random_density_any_rank(n, rng);
    let k = random_incoherent_kraus(n, rows, ops, rng.random())?;
    Ok((rho, k))
}

/// Random mixture instance: 2 to 4 states of a common dimension `≤ max_dim`.
pub fn random_b4_instance(rng: &mut SeededRng, cfg: &FalsifyConfig) -> (Vec<DensityState>, Vec<f64>) {
    let n = rng.random_range(1..=cfg.max_dim);
    let count = rng.random_range(2..=4);
    let states = (0..count).map(|_| random_density_any_rank(n, rng)).collect();
    (states, random_probability(count, rng))
}

/// [`falsify_with`] with default dimensions and tolerance.
pub fn falsify(measure: &MeasureSpec, trials: usize, seed: u64) -> Result<Vec<AxiomReport>> {
    falsify_with(
        measure,
        &FalsifyConfig {
            trials,
            seed,
            ..FalsifyConfig::default()
        },
    )
}

/// Searches for axiom violations of `measure`:
///
/// * the (C3) decompositions of [`usi_decompositions`] (normalized via
///   [`usi_catalog_c3_test`] for USI norms),
/// * `trials` random (B3) instances and `trials` random (B4) mixtures,
/// * for closed-form `C_{1,p}`, the [`necessity_sweep`].
///
/// Returns only violations, largest gap first; ties keep discovery order.
/// Random trials are sharded across threads; each trial draws from its own
/// seed, so the result does not depend on the thread count.
pub fn falsify_with(measure: &MeasureSpec, cfg: &FalsifyConfig) -> Result<Vec<AxiomReport>> {
    let mut found = Vec::new();
    let tagged = |mut r: AxiomReport, source: &str, index: Option<usize>| {
        r.witness["source"] = json!(source);
        if let Some(i) = index {
            r.witness["trial"] = json!(i);
        }
        r
    };

    match measure.method() {
        MeasureMethod::MinDiag(solver) if measure.norm().is_usi() => {
            for r in usi_catalog_c3_test(measure.norm(), solver)? {
                found.push(tagged(r, "catalog_c3", None));
            }
        }
        _ => {
            for (r1, r2, p1, label) in usi_decompositions() {
                let mut r = check_c3(measure, &r1, &r2, p1, cfg.tolerance)?;
                r.witness["decomposition"] = json!(label);
                found.push(tagged(r, "catalog_c3", None));
            }
        }
    }

    let run_trial = |i: usize| -> Result<[AxiomReport; 2]> {
        let mut rng = seeded(trial_seed(cfg.seed, 2 * i as u64));
        let (rho, k) = random_b3_instance(&mut rng, cfg)?;
        let b3 = tagged(check_b3(measure, &rho, &k, cfg.tolerance)?, "random_b3", Some(i));

        let mut rng = seeded(trial_seed(cfg.seed, 2 * i as u64 + 1));
        let (states, weights) = random_b4_instance(&mut rng, cfg);
        let b4 = tagged(check_b4(measure, &states, &weights, cfg.tolerance)?, "random_b4", Some(i));
        Ok([b3, b4])
    };
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .clamp(1, cfg.trials.max(1));
    let chunk = cfg.trials.div_ceil(workers).max(1);
    let shards: Vec<Result<Vec<AxiomReport>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let run_trial = &run_trial;
                s.spawn(move || {
                    let mut out = Vec::new();
                    for i in w * chunk..((w + 1) * chunk).min(cfg.trials) {
                        out.extend(run_trial(i)?);
                    }
                    Ok(out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("falsify worker panicked")).collect()
    });
    for shard in shards {
        found.extend(shard?);
    }

    if let (MeasureMethod::ClosedForm, NormSpec::Lqp { q, p }) = (measure.method(), measure.norm()) {
        if q.value() == 1.0 {
            if let Some(hit) = necessity_sweep(*p, SWEEP_MAX_N, cfg.tolerance)? {
                found.push(tagged(hit.report, "necessity_sweep", None));
            }
        }
    }

    let mut violations: Vec<AxiomReport> = found.into_iter().filter(AxiomReport::is_violated).collect();
    violations.sort_by(|a, b| b.gap.total_cmp(&a.gap));
    Ok(violations)
}

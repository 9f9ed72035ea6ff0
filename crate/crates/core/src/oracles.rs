//! Brute-force and randomized checks of the norm inequalities behind the
//! `ℓ_{1,p}` results, plus a grid oracle for the simplex solver.
//!
//! Subsets of `{0, …, n−1}` are bitmasks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{random_incoherent_kraus, stacked_isometry, KrausSet};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, DensityState, C64};
use crate::norms::{lqp_norm, real_lp, NormSpec, PExponent};
use crate::random::{complex_normal, ginibre, seeded, SeededRng};

/// Subset constraints are checked exhaustively up to this `n`.
pub const EXHAUSTIVE_MAX_N: usize = 12;
/// Cover constraints hold up to this slack.
pub const COVER_TOL: f64 = 1e-10;
/// Largest dimension [`brute_force_min_diag`] accepts.
pub const BRUTE_FORCE_MAX_DIM: usize = 4;

/// A cover `Ω` of `{0, …, n−1}` with a nonnegative vector `v` and optional
/// weights `b_σ`, one per member of `Ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverInstance {
    n: usize,
    omega: Vec<u64>,
    v: Vec<f64>,
    b: Option<Vec<f64>>,
}

fn mask_members(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

impl CoverInstance {
    /// Validates the cover and, when `b` is given, the weight constraints
    /// `Σ b = ℓ_2(v)²` and `Σ_{σ⊆τ} b_σ ≤ ℓ_2(v_τ)²` (every `τ` for
    /// `n ≤ 12`).
    pub fn new(n: usize, omega: Vec<u64>, v: Vec<f64>, b: Option<Vec<f64>>) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::Argument(format!("cover size {n} outside 1..=63")));
        }
        let full = (1u64 << n) - 1;
        if omega.is_empty() || omega.iter().any(|&s| s == 0 || s & !full != 0) {
            return Err(Error::Precondition("cover members must be nonempty subsets of {0..n-1}".into()));
        }
        if omega.iter().fold(0, |acc, s| acc | s) != full {
            return Err(Error::Precondition("subsets do not cover {0..n-1}".into()));
        }
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        if v.iter().any(|x| !(*x >= 0.0)) {
            return Err(Error::Precondition("v must be nonnegative".into()));
        }
        let inst = Self { n, omega, v, b };
        if let Some(b) = &inst.b {
            if b.len() != inst.omega.len() {
                return Err(Error::DimensionMismatch {
                    expected: inst.omega.len(),
                    found: b.len(),
                });
            }
            if b.iter().any(|x| !(*x >= 0.0)) {
                return Err(Error::Precondition("b must be nonnegative".into()));
            }
            let excess = inst.weight_excess();
            if excess > COVER_TOL {
                return Err(Error::Precondition(format!(
                    "weights violate the subset constraints by {excess:e}"
                )));
            }
        }
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> &[u64] {
        &self.omega
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn b(&self) -> Option<&[f64]> {
        self.b.as_deref()
    }

    pub fn subset(&self, mask: u64) -> Vec<f64> {
        mask_members(mask).map(|i| self.v[i]).collect()
    }

    fn mass(&self, mask: u64) -> f64 {
        mask_members(mask).map(|i| self.v[i] * self.v[i]).sum()
    }

    /// Largest violation of the weight constraints (≤ 0 when feasible); the
    /// total-mass equality counts in both directions.
    pub fn weight_excess(&self) -> f64 {
        let Some(b) = &self.b else { return f64::NEG_INFINITY };
        let full = (1u64 << self.n) - 1;
        let total: f64 = b.iter().sum();
        let mut worst = (total - self.mass(full)).abs();
        let check = |tau: u64| -> f64 {
            let inside: f64 = self
                .omega
                .iter()
                .zip(b)
                .filter(|(s, _)| *s & !tau == 0)
                .map(|(_, w)| w)
                .sum();
            inside - self.mass(tau)
        };
        if self.n <= EXHAUSTIVE_MAX_N {
            for tau in 1..full {
                worst = worst.max(check(tau));
            }
        } else {
            for &s in &self.omega {
                worst = worst.max(check(s));
            }
        }
        worst
    }
}

fn check_exponent(p: PExponent) -> Result<f64> {
    let v = p.value();
    if v > 2.0 {
        return Err(Error::Precondition(format!("exponent {p} outside [1, 2]")));
    }
    Ok(v)
}

/// `(max_{σ∈Ω} ℓ_p(v_σ))^{p−2} ℓ_2(v)² − ℓ_p(v)^p`; nonpositive for
/// `p ∈ [1, 2]`. Weights, if present, are ignored.
pub fn check_perm_inequality(inst: &CoverInstance, p: PExponent) -> Result<f64> {
    let pv = check_exponent(p)?;
    if inst.v.contains(&0.0) {
        return Err(Error::Precondition("v has a zero entry".into()));
    }
    let top = inst
        .omega
        .iter()
        .map(|&s| real_lp(&inst.subset(s), p))
        .fold(0.0, f64::max);
    let l2sq: f64 = inst.v.iter().map(|x| x * x).sum();
    Ok(top.powf(pv - 2.0) * l2sq - real_lp(&inst.v, p).powf(pv))
}

/// `Σ_{σ∈Ω, v_σ≠0} ℓ_p(v_σ)^{p−2} b_σ − ℓ_p(v)^p`; nonpositive for
/// `p ∈ [1, 2]` and feasible weights.
pub fn check_lagrange_inequality(inst: &CoverInstance, p: PExponent) -> Result<f64> {
    let pv = check_exponent(p)?;
    let Some(b) = &inst.b else {
        return Err(Error::Precondition("instance has no weights".into()));
    };
    if inst.v.iter().all(|&x| x == 0.0) {
        return Err(Error::Precondition("v is zero".into()));
    }
    let excess = inst.weight_excess();
    if excess > COVER_TOL {
        return Err(Error::Precondition(format!("weights infeasible by {excess:e}")));
    }
    let mut lhs = 0.0;
    for (&s, &w) in inst.omega.iter().zip(b) {
        let l = real_lp(&inst.subset(s), p);
        if l > 0.0 {
            lhs += l.powf(pv - 2.0) * w;
        }
    }
    Ok(lhs - real_lp(&inst.v, p).powf(pv))
}

/// Cover built from the stacked isometry `F`: one member per distinct
/// nonzero row pattern, `b_σ = Σ |(Fv)_i|²` over rows with pattern `σ`, and
/// instance vector `|v|`. Zero rows are skipped.
pub fn cover_from_kraus(k: &KrausSet, v: &[C64]) -> Result<CoverInstance> {
    let n = k.input_dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.len() });
    }
    let l2: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (l2 - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!("v has l2 norm {l2}, expected 1")));
    }
    let f = stacked_isometry(k);
    let mut omega: Vec<u64> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    for i in 0..f.rows() {
        let mut mask = 0u64;
        let mut w = C64::new(0.0, 0.0);
        for (j, &vj) in v.iter().enumerate() {
            let x = f[(i, j)];
            if x != C64::new(0.0, 0.0) {
                mask |= 1 << j;
                w += x * vj;
            }
        }
        if mask == 0 {
            continue;
        }
        match omega.iter().position(|&s| s == mask) {
            Some(idx) => b[idx] += w.norm_sqr(),
            None => {
                omega.push(mask);
                b.push(w.norm_sqr());
            }
        }
    }
    CoverInstance::new(n, omega, v.iter().map(|z| z.norm()).collect(), Some(b))
}

/// `Σ_k ℓ_{1,p}(K_k A K_k†) − ℓ_{1,p}(A)`; nonpositive for `p ∈ [1, 2]`.
pub fn check_contraction(a: &ComplexMatrix, k: &KrausSet, p: PExponent) -> Result<f64> {
    check_exponent(p)?;
    if !a.is_square() || a.rows() != k.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: k.input_dim(),
            found: a.rows(),
        });
    }
    let mut image = 0.0;
    for op in 0..k.len() {
        image += lqp_norm(&k.conjugate_by(op, a)?, PExponent::ONE, p);
    }
    Ok(image - lqp_norm(a, PExponent::ONE, p))
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExtremePoint {
    /// Exactly one nonzero column.
    Extreme,
    /// `B = (first + second)/2` with both on the unit sphere.
    Witnesses {
        first: ComplexMatrix,
        second: ComplexMatrix,
        epsilon: f64,
        columns: (usize, usize),
    },
}

/// For `B` on the unit `ℓ_{1,p}` sphere with at least two nonzero columns
/// `b_1, b_2`, returns the pair obtained by scaling them by
/// `1 ± ε/ℓ_p(b_i)` in opposite directions, `ε = ½ min ℓ_p(b_i)`.
pub fn extreme_point_witness(b: &ComplexMatrix, p: PExponent) -> Result<ExtremePoint> {
    let norm = lqp_norm(b, PExponent::ONE, p);
    if norm == 0.0 {
        return Err(Error::Precondition("zero matrix is not on the unit sphere".into()));
    }
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!("l_{{1,p}} norm is {norm}, expected 1")));
    }
    let col_norms: Vec<f64> = (0..b.cols())
        .map(|j| {
            let c: Vec<C64> = b.column(j).collect();
            crate::norms::vector_lp(&c, p)
        })
        .collect();
    let nonzero: Vec<usize> = (0..b.cols()).filter(|&j| col_norms[j] > 0.0).collect();
    if nonzero.len() < 2 {
        return Ok(ExtremePoint::Extreme);
    }
    let (j1, j2) = (nonzero[0], nonzero[1]);
    let epsilon = 0.5 * col_norms[j1].min(col_norms[j2]);
    let scaled = |s1: f64, s2: f64| {
        let mut m = b.clone();
        for i in 0..b.rows() {
            m[(i, j1)] *= s1;
            m[(i, j2)] *= s2;
        }
        m
    };
    let (r1, r2) = (epsilon / col_norms[j1], epsilon / col_norms[j2]);
    Ok(ExtremePoint::Witnesses {
        first: scaled(1.0 + r1, 1.0 - r2),
        second: scaled(1.0 - r1, 1.0 + r2),
        epsilon,
        columns: (j1, j2),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub value: f64,
    pub minimizer: Vec<f64>,
    /// `ν(I_n)/(resolution − 1)`: every simplex point is within `1/(resolution−1)`
    /// of a grid point in max-norm, and `ν(D) ≤ max|d_i|·ν(I)` for diagonal `D`.
    pub error_bound: f64,
    pub evaluations: usize,
}

fn visit_compositions(parts: &mut Vec<usize>, left: usize, slots: usize, visit: &mut dyn FnMut(&[usize])) {
    if parts.len() + 1 == slots {
        parts.push(left);
        visit(parts);
        parts.pop();
        return;
    }
    for k in 0..=left {
        parts.push(k);
        visit_compositions(parts, left - k, slots, visit);
        parts.pop();
    }
}

/// Minimum of `ν(ρ − σ)` over the simplex lattice with `resolution` points per
/// axis. Refuses dimensions above [`BRUTE_FORCE_MAX_DIM`].
pub fn brute_force_min_diag(rho: &DensityState, norm: &NormSpec, resolution: usize) -> Result<BruteForceResult> {
    let n = rho.dim();
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: BRUTE_FORCE_MAX_DIM,
        });
    }
    if resolution < 2 {
        return Err(Error::Argument("resolution must be at least 2".into()));
    }
    let m = resolution - 1;
    let mut best = (f64::INFINITY, vec![]);
    let mut evaluations = 0;
    let mut failure = None;
    let base = rho.hermitian().as_matrix();
    let mut work = base.clone();
    visit_compositions(&mut Vec::with_capacity(n), m, n, &mut |c| {
        if failure.is_some() {
            return;
        }
        for (i, &k) in c.iter().enumerate() {
            work[(i, i)] = base[(i, i)] - C64::new(k as f64 / m as f64, 0.0);
        }
        evaluations += 1;
        match norm.eval(&work) {
            Ok(v) if v < best.0 => best = (v, c.iter().map(|&k| k as f64 / m as f64).collect()),
            Ok(_) => {}
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let lipschitz = norm.eval(&ComplexMatrix::identity(n))?;
    Ok(BruteForceResult {
        value: best.0,
        minimizer: best.1,
        error_bound: lipschitz / m as f64,
        evaluations,
    })
}

/// Random cover: `|Ω| ∈ 1..=2n`, members with each index kept with
/// probability ½ (empty draws rejected), then singletons added for any
/// uncovered index.
pub fn random_cover(n: usize, rng: &mut SeededRng) -> Vec<u64> {
    let count = rng.random_range(1..=2 * n);
    let mut omega: Vec<u64> = Vec::with_capacity(count);
    while omega.len() < count {
        let s = (0..n).filter(|_| rng.random_bool(0.5)).fold(0u64, |acc, i| acc | 1 << i);
        if s != 0 {
            omega.push(s);
        }
    }
    let covered = omega.iter().fold(0, |acc, s| acc | s);
    for i in 0..n {
        if covered >> i & 1 == 0 {
            omega.push(1 << i);
        }
    }
    omega
}

/// Positive vector with entries spread over two decades.
pub fn random_positive_vector(n: usize, rng: &mut SeededRng) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(-2.0 * rng.random::<f64>())).collect()
}

/// Feasible weights for `(Ω, v)` by rejection: positive draws biased by
/// `ℓ_2(v_σ)²`, scaled to total `ℓ_2(v)²`, kept if every subset constraint
/// holds. `None` after `attempts` rejections.
pub fn random_feasible_weights(omega: &[u64], v: &[f64], rng: &mut SeededRng, attempts: usize) -> Option<Vec<f64>> {
    let n = v.len();
    let total: f64 = v.iter().map(|x| x * x).sum();
    for _ in 0..attempts {
        let raw: Vec<f64> = omega
            .iter()
            .map(|&s| {
                let cap: f64 = mask_members(s).map(|i| v[i] * v[i]).sum();
                -rng.random::<f64>().ln() * cap
            })
            .collect();
        let s: f64 = raw.iter().sum();
        if !(s > 0.0) {
            continue;
        }
        let b: Vec<f64> = raw.iter().map(|x| x * total / s).collect();
        if let Ok(inst) = CoverInstance::new(n, omega.to_vec(), v.to_vec(), Some(b.clone())) {
            if inst.weight_excess() <= 0.0 {
                return Some(b);
            }
        }
    }
    None
}

fn random_unit_vector(n: usize, rng: &mut SeededRng) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
    let l2 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / l2).collect()
}

/// Worst margin of one randomized oracle check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleLine {
    pub check: String,
    pub p: f64,
    pub instances: usize,
    /// Largest `LHS − RHS` seen; the inequality asserts ≤ 0.
    pub worst_margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub seed: u64,
    pub lines: Vec<OracleLine>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSuiteConfig {
    pub instances: usize,
    pub seed: u64,
    pub exponents: Vec<f64>,
    /// Cover dimension bound for the perm check.
    pub perm_max_n: usize,
    /// Cover dimension bound for the weighted check.
    pub lagrange_max_n: usize,
    /// State dimension bound for contraction and Kraus-derived covers.
    pub matrix_max_n: usize,
    pub tolerance: f64,
}

impl Default for OracleSuiteConfig {
    fn default() -> Self {
        Self {
            instances: 10_000,
            seed: 0,
            exponents: vec![1.0, 1.3, 1.7, 2.0],
            perm_max_n: 8,
            lagrange_max_n: 6,
            matrix_max_n: 6,
            tolerance: 1e-10,
        }
    }
}

fn random_kraus_for(n: usize, rng: &mut SeededRng) -> Result<KrausSet> {
    loop {
        let rows = rng.random_range(1..=8);
        let ops = rng.random_range(1..=4);
        if rows * ops >= n {
            return random_incoherent_kraus(n, rows, ops, rng.random());
        }
    }
}

/// Runs the perm, weighted-cover, contraction and Kraus-cover checks for
/// every exponent in the config, `instances` times each.
pub fn run_oracle_suite(cfg: &OracleSuiteConfig) -> Result<OracleSummary> {
    let mut lines = Vec::new();
    for (pi, &pv) in cfg.exponents.iter().enumerate() {
        let p = PExponent::new(pv)?;
        let mut rng = seeded(cfg.seed ^ (pi as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut record = |check: &str, worst: f64| {
            lines.push(OracleLine {
                check: check.to_string(),
                p: pv,
                instances: cfg.instances,
                worst_margin: worst,
                tolerance: cfg.tolerance,
                pass: worst <= cfg.tolerance,
            });
        };

        let mut worst = f64::NEG_INFINITY;
        for _ in 0..cfg.instances {
            let n = rng.random_range(1..=cfg.perm_max_n);
            let omega = random_cover(n, &mut rng);
            let inst = CoverInstance::new(n, omega, random_positive_vector(n, &mut rng), None)?;
            worst = worst.max(check_perm_inequality(&inst, p)?);
        }
        record("perm", worst);

        let mut worst = f64::NEG_INFINITY;
        let mut done = 0;
        while done < cfg.instances {
            let n = rng.random_range(1..=cfg.lagrange_max_n);
            let omega = random_cover(n, &mut rng);
            let v = random_positive_vector(n, &mut rng);
            if let Some(b) = random_feasible_weights(&omega, &v, &mut rng, 64) {
                let inst = CoverInstance::new(n, omega, v, Some(b))?;
                worst = worst.max(check_lagrange_inequality(&inst, p)?);
                done += 1;
            }
        }
        record("lagrange", worst);

        let mut worst = f64::NEG_INFINITY;
        for _ in 0..cfg.instances {
            let n = rng.random_range(1..=cfg.matrix_max_n);
            let k = random_kraus_for(n, &mut rng)?;
            let a = ginibre(n, n, &mut rng);
            worst = worst.max(check_contraction(&a, &k, p)?);
        }
        record("contraction", worst);

        let (mut worst_perm, mut worst_lag) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for _ in 0..cfg.instances {
            let n = rng.random_range(1..=cfg.matrix_max_n);
            let k = random_kraus_for(n, &mut rng)?;
            let inst = cover_from_kraus(&k, &random_unit_vector(n, &mut rng))?;
            worst_perm = worst_perm.max(check_perm_inequality(&inst, p)?);
            worst_lag = worst_lag.max(check_lagrange_inequality(&inst, p)?);
        }
        record("kraus_cover_perm", worst_perm);
        record("kraus_cover_lagrange", worst_lag);
    }
    let pass = lines.iter().all(|l| l.pass);
    Ok(OracleSummary {
        seed: cfg.seed,
        lines,
        pass,
    })
}

/// Random matrix on the unit `ℓ_{1,p}` sphere with at least two nonzero
/// columns; each column is kept with probability 0.7.
pub fn random_unit_lqp_matrix(n: usize, p: PExponent, rng: &mut SeededRng) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::Argument("need at least two columns".into()));
    }
    let mut b = ginibre(n, n, rng);
    let keep: Vec<bool> = loop {
        let k: Vec<bool> = (0..n).map(|_| rng.random_bool(0.7)).collect();
        if k.iter().filter(|&&x| x).count() >= 2 {
            break k;
        }
    };
    for (j, _) in keep.iter().enumerate().filter(|(_, kept)| !**kept) {
        for i in 0..n {
            b[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    let norm = lqp_norm(&b, PExponent::ONE, p);
    Ok(b.scale(1.0 / norm))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremeSuiteSummary {
    pub matrices: usize,
    /// Largest entry of `(first + second)/2 − B`.
    pub worst_average_error: f64,
    /// Largest `|ℓ_{1,p}(witness) − 1|`.
    pub worst_unit_error: f64,
    /// Smallest ratio of the witness separation (max entry difference) to
    /// its lower bound `2ε/n^{1/p}`.
    pub min_separation_ratio: f64,
    pub pass: bool,
}

/// Runs [`extreme_point_witness`] on `count` random matrices with
/// `n ∈ 2..=6` and `p` cycling through `{1, 1.5, 2, 3, ∞}`.
pub fn run_extreme_point_suite(count: usize, seed: u64) -> Result<ExtremeSuiteSummary> {
    let mut rng = seeded(seed);
    let exponents = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
    let mut out = ExtremeSuiteSummary {
        matrices: count,
        worst_average_error: 0.0,
        worst_unit_error: 0.0,
        min_separation_ratio: f64::INFINITY,
        pass: true,
    };
    for t in 0..count {
        let p = PExponent::new(exponents[t % exponents.len()])?;
        let n = rng.random_range(2..=6);
        let b = random_unit_lqp_matrix(n, p, &mut rng)?;
        match extreme_point_witness(&b, p)? {
            ExtremePoint::Witnesses { first, second, epsilon, .. } => {
                let avg = first.add(&second)?.scale(0.5).max_abs_diff(&b);
                let unit = (lqp_norm(&first, PExponent::ONE, p) - 1.0)
                    .abs()
                    .max((lqp_norm(&second, PExponent::ONE, p) - 1.0).abs());
                let bound = 2.0 * epsilon / (n as f64).powf(1.0 / p.value());
                out.worst_average_error = out.worst_average_error.max(avg);
                out.worst_unit_error = out.worst_unit_error.max(unit);
                out.min_separation_ratio = out.min_separation_ratio.min(first.max_abs_diff(&second) / bound);
            }
            ExtremePoint::Extreme => out.pass = false,
        }
    }
    out.pass &= out.worst_average_error <= 1e-12
        && out.worst_unit_error <= 1e-10
        && out.min_separation_ratio >= 1.0 - 1e-12;
    Ok(out)
}

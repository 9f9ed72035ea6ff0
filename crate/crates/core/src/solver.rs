//! Derivative-free convex minimization over the probability simplex or a box.
//!
//! Every start runs projected subgradient descent with normalized steps
//! `a/√k` and central finite-difference subgradients. The two best endpoints
//! are then polished by exact (golden-section) line searches along pairwise
//! exchange directions `e_i − e_j` (coordinate directions on a box) and fresh
//! random feasible directions, until a full round gains less than a small
//! fraction of the tolerance. The objective is convex, so the best polished
//! endpoint is accepted.
//!
//! When the caller can supply exact subgradients, [`minimize_convex`] follows
//! up with a deep-cut ellipsoid method on the affine hull of the domain. Every
//! evaluated center `c` with subgradient `g` certifies the lower bound
//! `f(c) − √(gᵀPg)`, so the run stops once the incumbent is within the
//! tolerance of the best certified bound.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random::{seeded, SeededRng};

const FD_STEP: f64 = 1e-6;
const STALL_PATIENCE: usize = 30;
const POLISHED_STARTS: usize = 2;
const RANDOM_DIRECTIONS: usize = 6;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    pub grid_resolution: usize,
    /// Seed of the random restarts and random polishing directions.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 10_000,
            restarts: 8,
            grid_resolution: 64,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 || self.grid_resolution == 0 {
            return Err(Error::Config(
                "max_iterations and grid_resolution must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-run solver trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    pub iterations: usize,
    pub final_step: f64,
    pub starts: usize,
    /// Certified lower bound on the minimum, when subgradients were available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct SolverOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub trace: SolverTrace,
}

/// Feasible region of the minimization.
pub(crate) trait Domain {
    fn dim(&self) -> usize;
    fn project(&self, x: &mut [f64]);
    /// Removes the component of `g` normal to the affine hull.
    fn to_tangent(&self, g: &mut [f64]);
    /// `[lo, hi]` such that `x + t·d` is feasible for all `t` in it.
    fn line_bounds(&self, x: &[f64], d: &[f64]) -> (f64, f64);
    fn random_point(&self, rng: &mut SeededRng) -> Vec<f64>;
    /// Coarse grid with at most `budget` points (at least the vertices).
    fn grid(&self, budget: usize) -> Vec<Vec<f64>>;
    fn axis_directions(&self) -> Vec<Vec<f64>>;
    fn width(&self) -> f64;
    /// A point, an orthonormal basis of the affine hull's directions, and a
    /// radius such that the ball around the point contains the domain.
    fn enclosing_ball(&self) -> (Vec<f64>, Vec<Vec<f64>>, f64);
    /// Most violated constraint `a·z ≤ b` at `x`, if any.
    fn violated(&self, x: &[f64]) -> Option<(Vec<f64>, f64)>;
}

/// `{x ≥ 0, Σ x = 1}`.
pub(crate) struct Simplex(pub usize);

impl Domain for Simplex {
    fn dim(&self) -> usize {
        self.0
    }

    fn project(&self, x: &mut [f64]) {
        project_simplex(x);
    }

    fn to_tangent(&self, g: &mut [f64]) {
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        g.iter_mut().for_each(|v| *v -= mean);
    }

    fn line_bounds(&self, x: &[f64], d: &[f64]) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (&xi, &di) in x.iter().zip(d) {
            if di > 0.0 {
                lo = lo.max(-xi / di);
            } else if di < 0.0 {
                hi = hi.min(-xi / di);
            }
        }
        (lo.min(0.0), hi.max(0.0))
    }

    fn random_point(&self, rng: &mut SeededRng) -> Vec<f64> {
        crate::random::random_probability(self.0, rng)
    }

    fn grid(&self, budget: usize) -> Vec<Vec<f64>> {
        let n = self.0;
        let mut m = 1;
        while m < budget && lattice_size(n, m + 1) <= budget as f64 {
            m += 1;
        }
        let mut out = Vec::new();
        let mut counts = vec![0usize; n];
        fill_compositions(&mut counts, 0, m, &mut |c| {
            out.push(c.iter().map(|&k| k as f64 / m as f64).collect())
        });
        out
    }

    fn axis_directions(&self) -> Vec<Vec<f64>> {
        let n = self.0;
        let mut dirs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut d = vec![0.0; n];
                d[i] = 1.0;
                d[j] = -1.0;
                dirs.push(d);
            }
        }
        dirs
    }

    fn width(&self) -> f64 {
        1.0
    }

    fn enclosing_ball(&self) -> (Vec<f64>, Vec<Vec<f64>>, f64) {
        let n = self.0;
        // Helmert basis of {Σ z = 0}
        let basis = (1..n)
            .map(|k| {
                let scale = 1.0 / ((k * (k + 1)) as f64).sqrt();
                let mut v = vec![0.0; n];
                v[..k].iter_mut().for_each(|x| *x = scale);
                v[k] = -(k as f64) * scale;
                v
            })
            .collect();
        let radius = (1.0 - 1.0 / n as f64).sqrt() * (1.0 + 1e-6);
        (vec![1.0 / n as f64; n], basis, radius)
    }

    fn violated(&self, x: &[f64]) -> Option<(Vec<f64>, f64)> {
        let (i, &xi) = x.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
        (xi < 0.0).then(|| {
            let mut a = vec![0.0; x.len()];
            a[i] = -1.0;
            (a, 0.0)
        })
    }
}

/// `{0 ≤ x_i ≤ upper_i}`.
pub(crate) struct BoxDomain(pub Vec<f64>);

impl Domain for BoxDomain {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn project(&self, x: &mut [f64]) {
        for (xi, &u) in x.iter_mut().zip(&self.0) {
            *xi = xi.clamp(0.0, u);
        }
    }

    fn to_tangent(&self, _g: &mut [f64]) {}

    fn line_bounds(&self, x: &[f64], d: &[f64]) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for ((&xi, &di), &u) in x.iter().zip(d).zip(&self.0) {
            if di > 0.0 {
                lo = lo.max(-xi / di);
                hi = hi.min((u - xi) / di);
            } else if di < 0.0 {
                hi = hi.min(-xi / di);
                lo = lo.max((u - xi) / di);
            }
        }
        (lo.min(0.0), hi.max(0.0))
    }

    fn random_point(&self, rng: &mut SeededRng) -> Vec<f64> {
        self.0.iter().map(|&u| rng.random_range(0.0..=u)).collect()
    }

    fn grid(&self, budget: usize) -> Vec<Vec<f64>> {
        let n = self.0.len();
        let mut per_axis = 2usize;
        while ((per_axis + 1) as f64).powi(n as i32) <= budget as f64 {
            per_axis += 1;
        }
        let total = per_axis.pow(n as u32);
        (0..total)
            .map(|mut idx| {
                self.0
                    .iter()
                    .map(|&u| {
                        let k = idx % per_axis;
                        idx /= per_axis;
                        u * k as f64 / (per_axis - 1) as f64
                    })
                    .collect()
            })
            .collect()
    }

    fn axis_directions(&self) -> Vec<Vec<f64>> {
        let n = self.0.len();
        (0..n)
            .map(|i| {
                let mut d = vec![0.0; n];
                d[i] = 1.0;
                d
            })
            .collect()
    }

    fn width(&self) -> f64 {
        self.0.iter().cloned().fold(0.0, f64::max)
    }

    fn enclosing_ball(&self) -> (Vec<f64>, Vec<Vec<f64>>, f64) {
        let n = self.0.len();
        let basis = (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                v
            })
            .collect();
        let radius = 0.5 * self.0.iter().map(|u| u * u).sum::<f64>().sqrt() * (1.0 + 1e-6);
        (self.0.iter().map(|u| u / 2.0).collect(), basis, radius)
    }

    fn violated(&self, x: &[f64]) -> Option<(Vec<f64>, f64)> {
        let mut worst: Option<(usize, f64, bool)> = None;
        for (i, (&xi, &u)) in x.iter().zip(&self.0).enumerate() {
            for (excess, upper) in [(-xi, false), (xi - u, true)] {
                if excess > 0.0 && worst.is_none_or(|w| excess > w.1) {
                    worst = Some((i, excess, upper));
                }
            }
        }
        worst.map(|(i, _, upper)| {
            let mut a = vec![0.0; x.len()];
            if upper {
                a[i] = 1.0;
                (a, self.0[i])
            } else {
                a[i] = -1.0;
                (a, 0.0)
            }
        })
    }
}

fn lattice_size(n: usize, m: usize) -> f64 {
    // C(m + n − 1, n − 1)
    let mut c = 1.0;
    for i in 1..n {
        c *= (m + i) as f64 / i as f64;
    }
    c
}

fn fill_compositions(counts: &mut [usize], pos: usize, left: usize, f: &mut impl FnMut(&[usize])) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        f(counts);
        return;
    }
    for k in 0..=left {
        counts[pos] = k;
        fill_compositions(counts, pos + 1, left - k, f);
    }
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub(crate) fn project_simplex(x: &mut [f64]) {
    if x.iter().all(|&v| v >= 0.0) && (x.iter().sum::<f64>() - 1.0).abs() <= 1e-14 {
        return;
    }
    let mut u: Vec<f64> = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let t = (cum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    x.iter_mut().for_each(|v| *v = (*v - theta).max(0.0));
}

struct Counter<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Counter<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evals += 1;
        (self.f)(x)
    }
}

/// Minimizes `f` over `domain`, starting from `seeds`, the best grid point and
/// `cfg.restarts` random points. Ties go to the earliest start.
pub(crate) fn minimize<D, F>(domain: &D, f: F, seeds: &[Vec<f64>], cfg: &SolverConfig) -> Result<SolverOutcome>
where
    D: Domain,
    F: FnMut(&[f64]) -> Result<f64>,
{
    cfg.validate()?;
    let n = domain.dim();
    let mut obj = Counter { f, evals: 0 };
    let mut rng = seeded(cfg.seed);

    let mut starts: Vec<Vec<f64>> = seeds
        .iter()
        .map(|s| {
            let mut s = s.clone();
            domain.project(&mut s);
            s
        })
        .collect();
    let mut grid_best: Option<(f64, Vec<f64>)> = None;
    for g in domain.grid(cfg.grid_resolution) {
        let v = obj.eval(&g)?;
        if grid_best.as_ref().is_none_or(|(b, _)| v < *b) {
            grid_best = Some((v, g));
        }
    }
    if let Some((_, g)) = grid_best {
        starts.push(g);
    }
    for _ in 0..cfg.restarts {
        starts.push(domain.random_point(&mut rng));
    }

    if n == 1 {
        let x = starts.swap_remove(0);
        let value = obj.eval(&x)?;
        return Ok(SolverOutcome {
            x,
            value,
            trace: SolverTrace {
                iterations: 0,
                final_step: 0.0,
                starts: 1,
                lower_bound: None,
            },
        });
    }

    let descent_budget = (cfg.max_iterations / 4).max(1);
    let mut endpoints = Vec::with_capacity(starts.len());
    let mut iterations = 0;
    for (idx, start) in starts.iter().enumerate() {
        let (v, x, it) = subgradient_descent(domain, &mut obj, start, descent_budget)?;
        iterations += it;
        endpoints.push((v, idx, x));
    }
    endpoints.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut best: Option<(f64, usize, Vec<f64>, f64)> = None;
    let mut any_converged = false;
    for (v, idx, x) in endpoints.into_iter().take(POLISHED_STARTS) {
        let polished = polish(domain, &mut obj, x, v, cfg, &mut rng)?;
        iterations += polished.iterations;
        any_converged |= polished.converged;
        let better = match &best {
            None => true,
            Some((bv, bidx, _, _)) => polished.value < *bv || (polished.value == *bv && idx < *bidx),
        };
        if better {
            best = Some((polished.value, idx, polished.x, polished.last_step));
        }
    }
    let (value, _, x, final_step) = best.expect("at least one start");
    if !any_converged || !value.is_finite() {
        return Err(Error::NonConvergence {
            best_value: value,
            iterations,
        });
    }
    let value = obj.eval(&x)?;
    Ok(SolverOutcome {
        x,
        value,
        trace: SolverTrace {
            iterations,
            final_step,
            starts: starts.len(),
            lower_bound: None,
        },
    })
}

/// [`minimize`] followed by ellipsoid refinement with the subgradient oracle
/// `oracle(x) = (f(x), g)`, `g ∈ ∂f(x)`.
pub(crate) fn minimize_convex<D, F, G>(
    domain: &D,
    f: F,
    oracle: G,
    seeds: &[Vec<f64>],
    cfg: &SolverConfig,
) -> Result<SolverOutcome>
where
    D: Domain,
    F: FnMut(&[f64]) -> Result<f64>,
    G: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut out = minimize(domain, f, seeds, cfg)?;
    let cut = ellipsoid(domain, oracle, (out.value, out.x.clone()), cfg)?;
    out.trace.iterations += cut.iterations;
    out.trace.lower_bound = Some(cut.lower_bound.min(out.value.min(cut.value)));
    if cut.value < out.value {
        out.value = cut.value;
        out.x = cut.x;
    }
    Ok(out)
}

struct CutOutcome {
    value: f64,
    x: Vec<f64>,
    lower_bound: f64,
    iterations: usize,
}

/// Ellipsoid `{c + y : yᵀP⁻¹y ≤ 1}` in basis coordinates.
struct Ellipsoid {
    center: Vec<f64>,
    shape: Vec<Vec<f64>>,
}

impl Ellipsoid {
    fn ball(dim: usize, radius: f64) -> Self {
        let shape = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { radius * radius } else { 0.0 }).collect())
            .collect();
        Self {
            center: vec![0.0; dim],
            shape,
        }
    }

    fn apply(&self, g: &[f64]) -> Vec<f64> {
        self.shape.iter().map(|row| row.iter().zip(g).map(|(a, b)| a * b).sum()).collect()
    }

    /// `√(gᵀPg)`, or `None` once numerical error makes it non-positive.
    fn width_along(&self, g: &[f64]) -> Option<f64> {
        let q: f64 = self.apply(g).iter().zip(g).map(|(a, b)| a * b).sum();
        (q > 0.0 && q.is_finite()).then(|| q.sqrt())
    }

    /// Keeps `{y : g·(y − c) ≤ −depth}`; `false` if that leaves nothing.
    fn cut(&mut self, g: &[f64], depth: f64) -> bool {
        let d = self.center.len() as f64;
        let Some(width) = self.width_along(g) else {
            return false;
        };
        let alpha = depth / width;
        if alpha >= 1.0 {
            return false;
        }
        let pg: Vec<f64> = self.apply(g).into_iter().map(|v| v / width).collect();
        if self.center.len() == 1 {
            // interval [c − r, c + r] intersected with the half-line
            let r = self.shape[0][0].sqrt();
            let toward = -pg[0].signum();
            let (lo, hi) = (self.center[0] - r, self.center[0] + r);
            let edge = self.center[0] + toward * alpha * r;
            let (lo, hi) = if toward > 0.0 { (edge, hi) } else { (lo, edge) };
            self.center[0] = 0.5 * (lo + hi);
            self.shape[0][0] = (0.5 * (hi - lo)).powi(2);
            return true;
        }
        let step = (1.0 + d * alpha) / (d + 1.0);
        for (c, v) in self.center.iter_mut().zip(&pg) {
            *c -= step * v;
        }
        let scale = d * d * (1.0 - alpha * alpha) / (d * d - 1.0);
        let rank_one = 2.0 * (1.0 + d * alpha) / ((d + 1.0) * (1.0 + alpha));
        let n = self.center.len();
        for i in 0..n {
            for j in i..n {
                let v = scale * (self.shape[i][j] - rank_one * pg[i] * pg[j]);
                self.shape[i][j] = v;
                self.shape[j][i] = v;
            }
        }
        true
    }
}

fn ellipsoid<D, G>(domain: &D, mut oracle: G, incumbent: (f64, Vec<f64>), cfg: &SolverConfig) -> Result<CutOutcome>
where
    D: Domain,
    G: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let (origin, basis, radius) = domain.enclosing_ball();
    let (mut best, mut best_x) = incumbent;
    let mut lower = f64::NEG_INFINITY;
    let mut ell = Ellipsoid::ball(basis.len(), radius);
    let to_point = |y: &[f64]| -> Vec<f64> {
        let mut x = origin.clone();
        for (b, &yk) in basis.iter().zip(y) {
            x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += yk * bi);
        }
        x
    };
    let project = |v: &[f64]| -> Vec<f64> {
        basis.iter().map(|b| b.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
    };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    if basis.is_empty() {
        let (v, _) = oracle(&origin)?;
        return Ok(if v < best {
            CutOutcome { value: v, x: origin, lower_bound: v, iterations: 1 }
        } else {
            CutOutcome { value: best, x: best_x, lower_bound: v, iterations: 1 }
        });
    }

    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let x = to_point(&ell.center);
        if let Some((a, b)) = domain.violated(&x) {
            if !ell.cut(&project(&a), dot(&a, &x) - b) {
                break;
            }
            continue;
        }
        let (v, g) = oracle(&x)?;
        if v < best {
            best = v;
            best_x = x;
        }
        let gy = project(&g);
        let Some(width) = ell.width_along(&gy) else {
            // zero tangent subgradient: the center is a minimizer
            lower = lower.max(v);
            break;
        };
        lower = lower.max(v - width);
        if best - lower <= cfg.tolerance {
            break;
        }
        if !ell.cut(&gy, v - best) {
            lower = lower.max(best);
            break;
        }
    }
    Ok(CutOutcome {
        value: best,
        x: best_x,
        lower_bound: lower,
        iterations,
    })
}

fn subgradient_descent<D: Domain, F: FnMut(&[f64]) -> Result<f64>>(
    domain: &D,
    obj: &mut Counter<F>,
    start: &[f64],
    budget: usize,
) -> Result<(f64, Vec<f64>, usize)> {
    let n = domain.dim();
    let a = 0.5 * domain.width();
    let mut x = start.to_vec();
    let mut best_x = x.clone();
    let mut best = obj.eval(&x)?;
    let mut g = vec![0.0; n];
    let mut probe = x.clone();
    let mut stall = 0;
    let mut k = 0;
    while k < budget {
        k += 1;
        for i in 0..n {
            probe.copy_from_slice(&x);
            probe[i] = x[i] + FD_STEP;
            let up = obj.eval(&probe)?;
            probe[i] = x[i] - FD_STEP;
            let down = obj.eval(&probe)?;
            g[i] = (up - down) / (2.0 * FD_STEP);
        }
        domain.to_tangent(&mut g);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-14) {
            break;
        }
        let step = a / (k as f64).sqrt() / norm;
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= step * gi;
        }
        domain.project(&mut x);
        let v = obj.eval(&x)?;
        if v < best {
            best = v;
            best_x.copy_from_slice(&x);
            stall = 0;
        } else {
            stall += 1;
            if stall >= STALL_PATIENCE {
                break;
            }
        }
    }
    Ok((best, best_x, k))
}

struct Polished {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    last_step: f64,
    converged: bool,
}

fn polish<D: Domain, F: FnMut(&[f64]) -> Result<f64>>(
    domain: &D,
    obj: &mut Counter<F>,
    mut x: Vec<f64>,
    mut value: f64,
    cfg: &SolverConfig,
    rng: &mut SeededRng,
) -> Result<Polished> {
    let n = domain.dim();
    let axes = domain.axis_directions();
    let threshold = 1e-3 * cfg.tolerance;
    let mut iterations = 0;
    let mut last_step = 0.0;
    let mut quiet_rounds = 0;
    let mut trial = vec![0.0; n];
    while iterations < cfg.max_iterations {
        let mut gained = 0.0;
        let random_dirs = (0..RANDOM_DIRECTIONS).map(|_| {
            let mut d: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            domain.to_tangent(&mut d);
            d
        });
        let dirs: Vec<Vec<f64>> = axes.iter().cloned().chain(random_dirs).collect();
        for d in &dirs {
            iterations += 1;
            let (lo, hi) = domain.line_bounds(&x, d);
            if hi - lo < 1e-15 {
                continue;
            }
            let mut phi = |t: f64| -> Result<f64> {
                for ((ti, xi), di) in trial.iter_mut().zip(&x).zip(d) {
                    *ti = xi + t * di;
                }
                clamp_roundoff(&mut trial);
                obj.eval(&trial)
            };
            let (t, v) = golden_section(&mut phi, lo, hi)?;
            if v < value {
                gained += value - v;
                value = v;
                for (xi, di) in x.iter_mut().zip(d) {
                    *xi += t * di;
                }
                clamp_roundoff(&mut x);
                last_step = t.abs();
            }
        }
        if gained <= threshold {
            quiet_rounds += 1;
            if quiet_rounds >= 2 {
                return Ok(Polished {
                    x,
                    value,
                    iterations,
                    last_step,
                    converged: true,
                });
            }
        } else {
            quiet_rounds = 0;
        }
    }
    Ok(Polished {
        x,
        value,
        iterations,
        last_step,
        converged: false,
    })
}

/// Points on feasible segments only need roundoff below zero clamped.
fn clamp_roundoff(x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v = v.max(0.0));
}

/// Minimum of a convex function on `[lo, hi]`; also compares the endpoints
/// and `t = 0`.
fn golden_section(phi: &mut impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let mut a = lo;
    let mut b = hi;
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = phi(c)?;
    let mut fd = phi(d)?;
    let tol = 1e-13 * (1.0 + (hi - lo).abs());
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = phi(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = phi(d)?;
        }
    }
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for t in [lo, hi, 0.0] {
        let v = phi(t)?;
        if v < best.1 {
            best = (t, v);
        }
    }
    Ok(best)
}

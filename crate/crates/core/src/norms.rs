//! Vector and matrix norms: `ℓ_p`, `ℓ_{q,p}`, Schatten-p and gauge-defined
//! unitary-similarity-invariant norms.
//!
//! A gauge USI norm on `n×n` Hermitian matrices is described by a generator
//! list. The gauge set is the closure of the generators under global sign flip
//! and coordinate permutation, and the norm is
//!
//! ```text
//! ‖A‖ = max { Σ_j d_j λ_j(A) : d in the gauge set }
//! ```
//!
//! with `λ_1 ≥ ⋯ ≥ λ_n`. By the rearrangement inequality the maximum over the
//! permutations of one generator `g` pairs `sort_desc(g)` with the descending
//! eigenvalues, so only `g` and `−g` need to be tried per generator.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::eigen;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix, C64, HERMITIAN_TOL, MAX_SPECTRAL_DIM};

/// Exponent in `[1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct PExponent(f64);

impl PExponent {
    pub const ONE: Self = Self(1.0);
    pub const TWO: Self = Self(2.0);
    pub const INFINITY: Self = Self(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value >= 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::Argument(format!("exponent {value} is not in [1, inf]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = PExponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number >= 1 or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<PExponent, E> {
                PExponent::new(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<PExponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<PExponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<PExponent, E> {
                match v.trim().to_ascii_lowercase().as_str() {
                    "inf" | "infinity" | "∞" => Ok(PExponent::INFINITY),
                    other => other
                        .parse::<f64>()
                        .map_err(E::custom)
                        .and_then(|x| self.visit_f64(x)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// A norm on square matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum NormSpec {
    /// `ℓ_q` of the column `ℓ_p` norms.
    Lqp { q: PExponent, p: PExponent },
    /// `ℓ_p` of the singular values (eigenvalue moduli on Hermitian input).
    Schatten { p: PExponent },
    /// Gauge-defined USI norm; generators keyed by dimension.
    GaugeUsi {
        #[serde(deserialize_with = "dim_keyed")]
        generators: BTreeMap<usize, Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

// Map keys arrive as strings once serde buffers a tagged enum.
fn dim_keyed<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<usize, Vec<Vec<f64>>>, D::Error> {
    let raw = BTreeMap::<String, Vec<Vec<f64>>>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| {
            k.trim()
                .parse::<usize>()
                .map(|n| (n, v))
                .map_err(|_| de::Error::custom(format!("generator key {k:?} is not a dimension")))
        })
        .collect()
}

impl NormSpec {
    pub fn lqp(q: f64, p: f64) -> Result<Self> {
        Ok(Self::Lqp {
            q: PExponent::new(q)?,
            p: PExponent::new(p)?,
        })
    }

    pub fn schatten(p: f64) -> Result<Self> {
        Ok(Self::Schatten {
            p: PExponent::new(p)?,
        })
    }

    pub fn trace_norm() -> Self {
        Self::Schatten { p: PExponent::ONE }
    }

    /// Sum of the `k` largest singular values, for dimensions `1..=max_dim`.
    ///
    /// The gauge set is every vector with `min(k, n)` entries equal to `±1`
    /// and zeros elsewhere; up to permutation and global sign it is spanned by
    /// the generators with `j` plus-ones and `k − j` minus-ones.
    pub fn ky_fan(k: usize, max_dim: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Argument("Ky Fan index must be positive".into()));
        }
        let generators = (1..=max_dim)
            .map(|n| {
                let kk = k.min(n);
                let gens = (0..=kk)
                    .map(|plus| {
                        let mut g = vec![0.0; n];
                        g[..plus].fill(1.0);
                        g[plus..kk].fill(-1.0);
                        g
                    })
                    .collect();
                (n, gens)
            })
            .collect();
        Ok(Self::GaugeUsi {
            generators,
            label: Some(format!("ky_fan_{k}")),
        })
    }

    /// Numerical radius restricted to Hermitian input, `max_j |λ_j|`; gauge set
    /// `{±(1,0,…,0)P}`.
    pub fn numerical_radius(max_dim: usize) -> Self {
        let generators = (1..=max_dim)
            .map(|n| {
                let mut g = vec![0.0; n];
                g[0] = 1.0;
                (n, vec![g])
            })
            .collect();
        Self::GaugeUsi {
            generators,
            label: Some("numerical_radius".into()),
        }
    }

    pub fn is_absolute(&self) -> bool {
        matches!(self, Self::Lqp { .. })
    }

    pub fn is_usi(&self) -> bool {
        !self.is_absolute()
    }

    pub fn label(&self) -> String {
        match self {
            Self::Lqp { q, p } => format!("l_{{{q},{p}}}"),
            Self::Schatten { p } => format!("schatten_{p}"),
            Self::GaugeUsi { label, .. } => label.clone().unwrap_or_else(|| "gauge_usi".into()),
        }
    }

    /// Evaluates the norm. Spectral norms require Hermitian input.
    pub fn eval(&self, a: &ComplexMatrix) -> Result<f64> {
        match self {
            Self::Lqp { q, p } => Ok(lqp_norm(a, *q, *p)),
            Self::Schatten { p } => schatten_norm(a, *p),
            Self::GaugeUsi { generators, .. } => {
                gauge_usi_norm(&HermitianMatrix::new(a.clone())?, generators)
            }
        }
    }

    /// Evaluates the norm on a matrix known to be Hermitian; skips the
    /// structure check.
    pub(crate) fn eval_hermitian(&self, a: &ComplexMatrix) -> Result<f64> {
        match self {
            Self::Lqp { q, p } => Ok(lqp_norm(a, *q, *p)),
            Self::Schatten { p } => {
                spectral_guard(a.rows())?;
                Ok(schatten_from_eigenvalues(&eigen::eigenvalues(a), *p))
            }
            Self::GaugeUsi { generators, .. } => {
                spectral_guard(a.rows())?;
                let gens = generators_for(generators, a.rows())?;
                Ok(gauge_from_eigenvalues(&eigen::eigenvalues(a), gens))
            }
        }
    }
}

impl NormSpec {
    /// Value at a Hermitian `a` and a subgradient of `t ↦ ν(a + diag(t))` at
    /// `t = 0`.
    pub(crate) fn diagonal_subgradient(&self, a: &ComplexMatrix) -> Result<(f64, Vec<f64>)> {
        match self {
            Self::Lqp { q, p } => Ok(lqp_diagonal_subgradient(a, *q, *p)),
            Self::Schatten { p } => {
                spectral_guard(a.rows())?;
                let (ev, u) = eigen::eigh(a);
                let value = real_lp(&ev, *p);
                Ok((value, spectral_diagonal(&u, &schatten_weights(&ev, *p, value))))
            }
            Self::GaugeUsi { generators, .. } => {
                spectral_guard(a.rows())?;
                let gens = generators_for(generators, a.rows())?;
                let (ev, u) = eigen::eigh(a);
                let (value, w) = gauge_argmax(&ev, gens);
                Ok((value, spectral_diagonal(&u, &w)))
            }
        }
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Gradient of `‖λ‖_p` (a subgradient where it is not differentiable).
fn schatten_weights(ev: &[f64], p: PExponent, value: f64) -> Vec<f64> {
    let mut w = vec![0.0; ev.len()];
    if value == 0.0 {
        return w;
    }
    if p.is_infinite() {
        let top = (0..ev.len()).max_by(|&i, &j| ev[i].abs().total_cmp(&ev[j].abs())).expect("nonempty");
        w[top] = sign(ev[top]);
    } else {
        let pv = p.value();
        for (wi, &l) in w.iter_mut().zip(ev) {
            *wi = if pv == 1.0 {
                sign(l)
            } else {
                sign(l) * (l.abs() / value).powf(pv - 1.0)
            };
        }
    }
    w
}

/// `diag(U · diag(w) · U†)`.
fn spectral_diagonal(u: &ComplexMatrix, w: &[f64]) -> Vec<f64> {
    (0..u.rows())
        .map(|i| w.iter().enumerate().map(|(j, wj)| wj * u[(i, j)].norm_sqr()).sum())
        .collect()
}

fn lqp_diagonal_subgradient(a: &ComplexMatrix, q: PExponent, p: PExponent) -> (f64, Vec<f64>) {
    let n = a.cols();
    let cols: Vec<f64> = (0..n)
        .map(|j| lp_of_moduli(a.column(j).map(|z| z.norm()), p))
        .collect();
    let value = real_lp(&cols, q);
    let mut d = vec![0.0; n];
    if value == 0.0 {
        return (value, d);
    }
    let outer: Vec<f64> = if q.is_infinite() {
        let top = (0..n).max_by(|&i, &j| cols[i].total_cmp(&cols[j])).expect("nonempty");
        (0..n).map(|j| if j == top { 1.0 } else { 0.0 }).collect()
    } else {
        cols.iter().map(|&c| (c / value).powf(q.value() - 1.0)).collect()
    };
    for j in 0..n.min(a.rows()) {
        let x = a[(j, j)].re;
        let c = cols[j];
        if c == 0.0 || outer[j] == 0.0 {
            continue;
        }
        let inner = if p.is_infinite() {
            if x.abs() >= c { sign(x) } else { 0.0 }
        } else {
            sign(x) * (x.abs() / c).powf(p.value() - 1.0)
        };
        d[j] = outer[j] * inner;
    }
    (value, d)
}

fn spectral_guard(n: usize) -> Result<()> {
    if n > MAX_SPECTRAL_DIM {
        Err(Error::DimensionTooLarge {
            dim: n,
            max: MAX_SPECTRAL_DIM,
        })
    } else {
        Ok(())
    }
}

fn generators_for(map: &BTreeMap<usize, Vec<Vec<f64>>>, n: usize) -> Result<&[Vec<f64>]> {
    let gens = map
        .get(&n)
        .filter(|g| !g.is_empty())
        .ok_or_else(|| Error::Config(format!("no gauge generators for dimension {n}")))?;
    if let Some(bad) = gens.iter().find(|g| g.len() != n) {
        return Err(Error::Config(format!(
            "generator of length {} listed under dimension {n}",
            bad.len()
        )));
    }
    Ok(gens)
}

fn lp_of_moduli(moduli: impl Iterator<Item = f64> + Clone, p: PExponent) -> f64 {
    let p = p.value();
    if p.is_infinite() {
        moduli.fold(0.0, f64::max)
    } else if p == 1.0 {
        moduli.sum()
    } else if p == 2.0 {
        moduli.map(|x| x * x).sum::<f64>().sqrt()
    } else {
        let m = moduli.clone().fold(0.0, f64::max);
        if m == 0.0 {
            return 0.0;
        }
        m * moduli.map(|x| (x / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `ℓ_p` norm of a complex vector.
pub fn vector_lp(v: &[C64], p: PExponent) -> f64 {
    lp_of_moduli(v.iter().map(|z| z.norm()), p)
}

/// `ℓ_p` norm of a real vector.
pub fn real_lp(v: &[f64], p: PExponent) -> f64 {
    lp_of_moduli(v.iter().map(|x| x.abs()), p)
}

/// `ℓ_{q,p}(A) = ℓ_q(ℓ_p(A_1), …, ℓ_p(A_n))` over the columns `A_j`.
pub fn lqp_norm(a: &ComplexMatrix, q: PExponent, p: PExponent) -> f64 {
    let cols: Vec<f64> = (0..a.cols())
        .map(|j| lp_of_moduli(a.column(j).map(|z| z.norm()), p))
        .collect();
    real_lp(&cols, q)
}

/// Schatten p-norm of a Hermitian matrix, computed from its eigenvalues.
pub fn schatten_norm(a: &ComplexMatrix, p: PExponent) -> Result<f64> {
    let r = a.hermitian_residual();
    if !(r < HERMITIAN_TOL) {
        return Err(Error::Structure(format!(
            "Schatten norm needs Hermitian input (residual {r:e})"
        )));
    }
    spectral_guard(a.rows())?;
    let h = HermitianMatrix::new(a.clone())?;
    Ok(schatten_from_eigenvalues(&eigen::eigenvalues(&h), p))
}

fn schatten_from_eigenvalues(ev: &[f64], p: PExponent) -> f64 {
    real_lp(ev, p)
}

/// Gauge USI norm of a Hermitian matrix.
pub fn gauge_usi_norm(
    a: &HermitianMatrix,
    generators: &BTreeMap<usize, Vec<Vec<f64>>>,
) -> Result<f64> {
    spectral_guard(a.dim())?;
    let gens = generators_for(generators, a.dim())?;
    Ok(gauge_from_eigenvalues(&eigen::eigenvalues(a), gens))
}

/// `max_g max(Σ sort_desc(g)_j λ_j, Σ sort_desc(−g)_j λ_j)` for descending `λ`.
fn gauge_from_eigenvalues(ev: &[f64], gens: &[Vec<f64>]) -> f64 {
    gauge_argmax(ev, gens).0
}

/// The gauge maximum and the maximizing weight vector, aligned with `ev`.
fn gauge_argmax(ev: &[f64], gens: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let n = ev.len();
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    let mut sorted = vec![0.0; n];
    for g in gens {
        sorted.copy_from_slice(g);
        sorted.sort_by(|a, b| b.total_cmp(a));
        let plus: f64 = sorted.iter().zip(ev).map(|(d, l)| d * l).sum();
        // sort_desc(−g)_j = −sort_desc(g)_{n−1−j}
        let minus: f64 = sorted.iter().rev().zip(ev).map(|(d, l)| -d * l).sum();
        if plus > best.0 {
            best = (plus, sorted.clone());
        }
        if minus > best.0 {
            best = (minus, sorted.iter().rev().map(|d| -d).collect());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::make_all_ones;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn p(x: f64) -> PExponent {
        PExponent::new(x).unwrap()
    }

    #[test]
    fn vector_examples() {
        assert_eq!(vector_lp(&[c(3.0), c(4.0)], PExponent::TWO), 5.0);
        assert_eq!(vector_lp(&[c(1.0), c(-2.0), c(2.0)], PExponent::INFINITY), 2.0);
        for q in [1.0, 1.5, 2.0, 3.0, 7.0] {
            let v = vector_lp(&[c(1.0); 4], p(q));
            assert!((v - 4f64.powf(1.0 / q)).abs() < 1e-15);
        }
    }

    #[test]
    fn exponent_rejects_below_one() {
        assert!(PExponent::new(0.5).is_err());
        assert!(PExponent::new(f64::NAN).is_err());
        assert!(PExponent::new(f64::INFINITY).is_ok());
    }

    #[test]
    fn lqp_examples() {
        for n in 1..6usize {
            let j = make_all_ones(n + 1).unwrap();
            let off = j.sub(&HermitianMatrix::from_real_diag(&vec![1.0; n + 1])).unwrap();
            for pp in [1.0, 1.5, 2.0, 4.0] {
                let v = lqp_norm(&off, PExponent::ONE, p(pp));
                let want = (n + 1) as f64 * (n as f64).powf(1.0 / pp);
                assert!((v - want).abs() < 1e-12 * want, "n={n} p={pp}");
            }
            assert_eq!(lqp_norm(&j, PExponent::ONE, PExponent::INFINITY), (n + 1) as f64);
        }
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 0.5, 0.5, 0.0]).unwrap();
        assert_eq!(lqp_norm(&a, PExponent::ONE, PExponent::TWO), 1.0);
    }

    #[test]
    fn schatten_examples() {
        let j2 = make_all_ones(2).unwrap();
        let a = j2
            .sub(&HermitianMatrix::from_real_diag(&[1.0, 1.0]))
            .unwrap()
            .scale(0.5);
        assert!((schatten_norm(&a, PExponent::ONE).unwrap() - 1.0).abs() < 1e-15);
        let j3 = make_all_ones(3).unwrap();
        assert!((schatten_norm(&j3, PExponent::ONE).unwrap() - 3.0).abs() < 1e-14);
        assert!((schatten_norm(&j2, PExponent::TWO).unwrap() - 2.0).abs() < 1e-15);
        let nh = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(schatten_norm(&nh, PExponent::ONE), Err(Error::Structure(_))));
    }

    #[test]
    fn gauge_examples() {
        let a = HermitianMatrix::from_real_diag(&[0.5, 0.0, 0.0, -0.5]);
        let gens = BTreeMap::from([(4, vec![vec![1.0, 1.0, -1.0, -1.0]])]);
        assert!((gauge_usi_norm(&a, &gens).unwrap() - 1.0).abs() < 1e-15);

        let nr = NormSpec::numerical_radius(4);
        let b = HermitianMatrix::from_real_diag(&[0.3, 0.1, -0.2, -0.7]);
        assert!((nr.eval(&b).unwrap() - 0.7).abs() < 1e-15);

        let kf2 = NormSpec::ky_fan(2, 4).unwrap();
        assert!((kf2.eval(&b).unwrap() - 1.0).abs() < 1e-15);

        let missing = BTreeMap::from([(3, vec![vec![1.0, 0.0, 0.0]])]);
        assert!(matches!(gauge_usi_norm(&a, &missing), Err(Error::Config(_))));
    }

    #[test]
    fn norm_spec_json() {
        let s: NormSpec = serde_json::from_str(r#"{"tag":"lqp","q":1,"p":"inf"}"#).unwrap();
        assert_eq!(s, NormSpec::Lqp { q: PExponent::ONE, p: PExponent::INFINITY });
        let s: NormSpec = serde_json::from_str(r#"{"tag":"schatten","p":1}"#).unwrap();
        assert_eq!(s, NormSpec::trace_norm());
        let s: NormSpec =
            serde_json::from_str(r#"{"tag":"gauge_usi","generators":{"4":[[1,1,-1,-1]]}}"#)
                .unwrap();
        assert!(s.is_usi());
        let back: NormSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<NormSpec>(r#"{"tag":"lqp","q":0.5,"p":1}"#).is_err());
    }

    #[test]
    fn diagonal_subgradient_inequality() {
        use crate::random::{random_hermitian, seeded};
        use rand::Rng;
        let mut rng = seeded(31);
        let mut norms = crate::catalog::all_norms();
        norms.extend([NormSpec::lqp(2.0, 1.5).unwrap(), NormSpec::lqp(f64::INFINITY, 3.0).unwrap()]);
        for n in 1..=4 {
            for norm in &norms {
                let a = random_hermitian(n, &mut rng);
                let a = a.as_matrix();
                let (v, d) = norm.diagonal_subgradient(a).unwrap();
                assert!((v - norm.eval(a).unwrap()).abs() < 1e-12);
                for _ in 0..20 {
                    let t: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let mut shifted = a.clone();
                    for (i, x) in t.iter().enumerate() {
                        shifted[(i, i)] += c(*x);
                    }
                    let linear: f64 = d.iter().zip(&t).map(|(g, x)| g * x).sum();
                    assert!(norm.eval(&shifted).unwrap() >= v + linear - 1e-10, "{}", norm.label());
                }
            }
        }
    }
}

//! Incoherent operations as Kraus sets.
//!
//! A Kraus set `{K_1, …, K_m}` (each `N × n`) is incoherent when every column
//! of every operator has at most one nonzero entry, so `K_k e_j = c_kj e_σk(j)`.
//! That column map is extracted at validation and drives the `O(m n²)`
//! application routines.

use rand::Rng;
use serde::de;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, DensityState, C64};
use crate::random::{complex_normal, random_unitary, seeded};

/// Entries with modulus at or below this are treated as zero.
pub const ENTRY_TOL: f64 = 1e-12;
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Outcomes with probability at or below this carry no post-measurement state.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// `K_k e_j = coefficient(k, j) · e_target(k, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnMap {
    entries: Vec<Vec<Option<(usize, C64)>>>,
}

impl ColumnMap {
    pub fn target(&self, op: usize, col: usize) -> Option<usize> {
        self.entries[op][col].map(|(r, _)| r)
    }

    pub fn coefficient(&self, op: usize, col: usize) -> C64 {
        self.entries[op][col].map_or(C64::new(0.0, 0.0), |(_, c)| c)
    }

    /// Nonzero `(column, row, coefficient)` triples of one operator.
    pub fn nonzeros(&self, op: usize) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.entries[op]
            .iter()
            .enumerate()
            .filter_map(|(j, e)| e.map(|(r, c)| (j, r, c)))
    }

    /// Operators rebuilt from the map, `rows × n` each.
    pub fn reconstruct(&self, rows: usize) -> Vec<ComplexMatrix> {
        self.entries
            .iter()
            .enumerate()
            .map(|(k, cols)| {
                let mut m = ComplexMatrix::zeros(rows, cols.len());
                for (j, r, c) in self.nonzeros(k) {
                    m[(r, j)] = c;
                }
                m
            })
            .collect()
    }
}

/// A validated incoherent Kraus set.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    ops: Vec<ComplexMatrix>,
    map: ColumnMap,
}

/// One branch of a selective measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelOutcome {
    pub probability: f64,
    /// Normalized post-measurement state; `None` when the branch has
    /// probability at most [`ZERO_PROBABILITY`].
    pub state: Option<DensityState>,
}

impl KrausSet {
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn column_map(&self) -> &ColumnMap {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.ops[0].cols()
    }

    pub fn output_dim(&self) -> usize {
        self.ops[0].rows()
    }

    fn check_input(&self, rho: &ComplexMatrix) -> Result<()> {
        if rho.rows() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: rho.rows(),
            });
        }
        Ok(())
    }

    /// `K_k A K_k†`, using the column map.
    pub fn conjugate_by(&self, op: usize, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_input(a)?;
        let n_out = self.output_dim();
        let mut out = ComplexMatrix::zeros(n_out, n_out);
        let nz: Vec<_> = self.map.nonzeros(op).collect();
        for &(j, r, c) in &nz {
            for &(jj, rr, cc) in &nz {
                out[(r, rr)] += c * a[(j, jj)] * cc.conj();
            }
        }
        Ok(out)
    }

    /// `tr(K_k ρ K_k†) = Σ_j |c_kj|² ρ_jj`.
    pub fn probability(&self, op: usize, rho: &ComplexMatrix) -> Result<f64> {
        self.check_input(rho)?;
        Ok(self
            .map
            .nonzeros(op)
            .map(|(j, _, c)| c.norm_sqr() * rho[(j, j)].re)
            .sum())
    }
}

/// Validates an incoherent Kraus set and extracts its column map. Entries with
/// modulus ≤ [`ENTRY_TOL`] are zeroed first.
pub fn validate_incoherent(ops: Vec<ComplexMatrix>) -> Result<KrausSet> {
    let Some(first) = ops.first() else {
        return Err(Error::Argument("empty Kraus set".into()));
    };
    let (rows, cols) = (first.rows(), first.cols());
    if let Some(k) = ops.iter().position(|k| k.rows() != rows || k.cols() != cols) {
        return Err(Error::Argument(format!(
            "operator {k} is {}x{}, expected {rows}x{cols}",
            ops[k].rows(),
            ops[k].cols()
        )));
    }
    let mut cleaned = Vec::with_capacity(ops.len());
    let mut entries = Vec::with_capacity(ops.len());
    for (k, op) in ops.into_iter().enumerate() {
        let mut op = op;
        let mut per_col = Vec::with_capacity(cols);
        for j in 0..cols {
            let mut hit = None;
            let mut nonzeros = 0;
            for i in 0..rows {
                if op[(i, j)].norm() <= ENTRY_TOL {
                    op[(i, j)] = C64::new(0.0, 0.0);
                } else {
                    nonzeros += 1;
                    hit = Some((i, op[(i, j)]));
                }
            }
            if nonzeros > 1 {
                return Err(Error::CoherentColumn {
                    operator: k,
                    column: j,
                    nonzeros,
                });
            }
            per_col.push(hit);
        }
        cleaned.push(op);
        entries.push(per_col);
    }
    let set = KrausSet {
        ops: cleaned,
        map: ColumnMap { entries },
    };
    let residual = completeness_residual(&set);
    if !(residual <= COMPLETENESS_TOL) {
        return Err(Error::Completeness { residual });
    }
    Ok(set)
}

/// `max |Σ_k K_k†K_k − I|` entrywise.
pub fn completeness_residual(set: &KrausSet) -> f64 {
    let f = stacked_isometry(set);
    let n = set.input_dim();
    let mut gram = ComplexMatrix::zeros(n, n);
    for r in 0..f.rows() {
        let nz: Vec<(usize, C64)> = (0..n).filter_map(|j| {
            let v = f[(r, j)];
            (v != C64::new(0.0, 0.0)).then_some((j, v))
        }).collect();
        for &(a, x) in &nz {
            for &(b, y) in &nz {
                gram[(a, b)] += x.conj() * y;
            }
        }
    }
    gram.max_abs_diff(&ComplexMatrix::identity(n))
}

/// `Σ_k K_k ρ K_k†`.
pub fn apply_channel(set: &KrausSet, rho: &DensityState) -> Result<DensityState> {
    let n_out = set.output_dim();
    let mut out = ComplexMatrix::zeros(n_out, n_out);
    for k in 0..set.len() {
        let part = set.conjugate_by(k, rho)?;
        out = out.add(&part)?;
    }
    Ok(DensityState::from_trusted(out))
}

/// Branches `(p_k, K_k ρ K_k† / p_k)` of the selective measurement.
pub fn selective_outcomes(set: &KrausSet, rho: &DensityState) -> Result<Vec<ChannelOutcome>> {
    (0..set.len())
        .map(|k| {
            let p = set.probability(k, rho)?;
            let state = if p > ZERO_PROBABILITY {
                Some(DensityState::from_trusted(set.conjugate_by(k, rho)?.scale(1.0 / p)))
            } else {
                None
            };
            Ok(ChannelOutcome {
                probability: p.max(0.0),
                state,
            })
        })
        .collect()
}

/// `K_1 = sin θ · I_n ⊕ [0]`, `K_2 = cos θ · I_n ⊕ [1]`.
pub fn necessity_family(n: usize, theta: f64) -> KrausSet {
    let (s, c) = theta.sin_cos();
    let mut d1 = vec![s; n];
    d1.push(0.0);
    let mut d2 = vec![c; n];
    d2.push(1.0);
    validate_incoherent(vec![ComplexMatrix::from_diag(&d1), ComplexMatrix::from_diag(&d2)])
        .expect("sin² + cos² = 1")
}

/// Complete dephasing `{E_11, …, E_nn}`.
pub fn dephasing(n: usize) -> KrausSet {
    let ops = (0..n)
        .map(|i| {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            ComplexMatrix::from_diag(&d)
        })
        .collect();
    validate_incoherent(ops).expect("projectors sum to the identity")
}

pub fn identity_channel(n: usize) -> KrausSet {
    validate_incoherent(vec![ComplexMatrix::identity(n)]).expect("identity is complete")
}

/// Single-operator channel `{P}` with `P e_j = e_perm[j]`.
pub fn permutation_channel(perm: &[usize]) -> Result<KrausSet> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Argument("not a permutation".into()));
        }
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for (j, &p) in perm.iter().enumerate() {
        m[(p, j)] = C64::new(1.0, 0.0);
    }
    validate_incoherent(vec![m])
}

/// Seeded random incoherent Kraus set of `m` operators, each `rows × n`.
///
/// Columns are dealt into small groups. A group of size `g` picks `g`
/// operators and one free row in each, and fills those `g` stacked rows with
/// a random `g × g` unitary, so the group's columns are orthonormal while
/// sharing rows. Each column may also get one private row in another
/// operator. Rows are never shared between groups and each stacked column is
/// normalized, so the stacked matrix is an isometry by construction.
pub fn random_incoherent_kraus(n: usize, rows: usize, m: usize, seed: u64) -> Result<KrausSet> {
    if n == 0 || rows == 0 || m == 0 {
        return Err(Error::Argument("Kraus shape must be positive".into()));
    }
    if rows * m < n {
        return Err(Error::Argument(format!(
            "{m} operators with {rows} rows cannot hold {n} orthonormal incoherent columns"
        )));
    }
    let mut rng = seeded(seed);
    let mut free: Vec<Vec<usize>> = vec![(0..rows).collect(); m];
    let mut ops = vec![ComplexMatrix::zeros(rows, n); m];

    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }

    fn take_row(free: &mut Vec<usize>, rng: &mut impl Rng) -> usize {
        let i = rng.random_range(0..free.len());
        free.swap_remove(i)
    }

    let mut placed = 0;
    while placed < n {
        let available: Vec<usize> = (0..m).filter(|&k| !free[k].is_empty()).collect();
        let remaining = n - placed;
        let g_max = available.len().min(remaining).min(3);
        let g = rng.random_range(1..=g_max);
        let mut chosen = available;
        for i in 0..g {
            let pick = rng.random_range(i..chosen.len());
            chosen.swap(i, pick);
        }
        chosen.truncate(g);
        let shared: Vec<(usize, usize)> = chosen.iter().map(|&k| (k, take_row(&mut free[k], &mut rng))).collect();
        let u = random_unitary(g, &mut rng);
        let cols = &order[placed..placed + g];
        placed += g;

        for (t, &j) in cols.iter().enumerate() {
            let mut col: Vec<(usize, usize, C64)> =
                shared.iter().enumerate().map(|(s, &(k, r))| (k, r, u[(s, t)])).collect();
            let spare = free.iter().map(Vec::len).sum::<usize>().saturating_sub(n - placed);
            let others: Vec<usize> = (0..m).filter(|k| !chosen.contains(k) && !free[*k].is_empty()).collect();
            if spare > 0 && !others.is_empty() && rng.random_bool(0.5) {
                let k = others[rng.random_range(0..others.len())];
                let r = take_row(&mut free[k], &mut rng);
                col.push((k, r, complex_normal(&mut rng)));
            }
            let norm = col.iter().map(|(_, _, c)| c.norm_sqr()).sum::<f64>().sqrt();
            for (k, r, c) in col {
                ops[k][(r, j)] = c / norm;
            }
        }
    }
    validate_incoherent(ops)
}

/// `F = [K_1; …; K_m]`.
pub fn stacked_isometry(set: &KrausSet) -> ComplexMatrix {
    let (rows, n) = (set.output_dim(), set.input_dim());
    let mut f = ComplexMatrix::zeros(rows * set.len(), n);
    for (k, op) in set.ops.iter().enumerate() {
        for i in 0..rows {
            for j in 0..n {
                f[(k * rows + i, j)] = op[(i, j)];
            }
        }
    }
    f
}

#[derive(Serialize, Deserialize)]
struct KrausRepr {
    ops: Vec<ComplexMatrix>,
}

impl Serialize for KrausSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KrausRepr { ops: self.ops.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for KrausSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = KrausRepr::deserialize(d)?;
        validate_incoherent(r.ops).map_err(de::Error::custom)
    }
}

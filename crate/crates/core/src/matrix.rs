//! Dense complex matrices and the validated Hermitian / density-state wrappers
//! built on top of them.
//!
//! Every state-like type here is immutable once constructed. Validation happens
//! at construction; downstream code can rely on the invariants without
//! re-checking.

use std::ops::{Deref, Index, IndexMut};

use num_complex::Complex64;

use crate::eigen;
use crate::error::{DensityViolation, Error, Result};

pub type C64 = Complex64;

/// Largest dimension accepted by structural operations (construction, products,
/// channel application, closed-form norms).
pub const MAX_DIM: usize = 4096;

/// Largest dimension accepted by anything that needs eigenvalues.
pub const MAX_SPECTRAL_DIM: usize = 256;

/// Entrywise tolerance for `A = A†`.
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

fn check_dim(dim: usize, max: usize) -> Result<()> {
    if dim > max {
        Err(Error::DimensionTooLarge { dim, max })
    } else {
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Argument(format!("empty shape {rows}x{cols}")));
        }
        check_dim(rows.max(cols), MAX_DIM)?;
        if data.len() != rows * cols {
            return Err(Error::Argument(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, re: &[f64]) -> Result<Self> {
        Self::new(rows, cols, re.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Argument("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = C64> + Clone + '_ {
        (0..self.rows).map(move |i| self.data[i * self.cols + j])
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Argument(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    /// Entrywise modulus, as a complex matrix with zero imaginary parts.
    pub fn abs_entries(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| C64::new(a.norm(), 0.0)).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the off-diagonal part.
    pub fn off_diagonal_mass(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// Largest entrywise deviation `|a_ij - conj(a_ji)|`. Non-square matrices
    /// report infinity.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut r: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `P† A P` where `P e_j = e_{perm[j]}`.
    pub fn permute_similarity(&self, perm: &[usize]) -> Result<Self> {
        if !self.is_square() || perm.len() != self.rows {
            return Err(Error::Argument("permutation does not match matrix".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(perm[i], perm[j])];
            }
        }
        Ok(out)
    }

    /// Copy with the rows and columns of `indices` kept, in order.
    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        let mut out = Self::zeros(k, k);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    /// Symmetrized copy `(A + A†)/2`; square input only.
    fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] = C64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..self.cols {
                let v = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// A square matrix equal to its adjoint.
///
/// Inputs within [`HERMITIAN_TOL`] of Hermitian are symmetrized on
/// construction; anything further away is rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Structure(format!(
                "{}x{} matrix is not square",
                m.rows, m.cols
            )));
        }
        let r = m.hermitian_residual();
        if !(r < HERMITIAN_TOL) {
            return Err(Error::Structure(format!(
                "matrix is not Hermitian (residual {r:e})"
            )));
        }
        Ok(Self(m.symmetrized()))
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        Self(ComplexMatrix::from_diag(d))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        Ok(Self(self.0.sub(&rhs.0)?))
    }

    /// Assumes `m` is Hermitian up to roundoff; used for results of operations
    /// that preserve Hermiticity algebraically.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        debug_assert!(m.is_square());
        Self(m.symmetrized())
    }
}

impl Deref for HermitianMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState(HermitianMatrix);

impl DensityState {
    /// Same as [`validate_density`].
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        validate_density(m)
    }

    /// `J_n / n`, the maximally coherent pure state.
    pub fn maximally_coherent(n: usize) -> Result<Self> {
        Ok(Self(make_all_ones(n)?.scale(1.0 / n as f64)))
    }

    pub fn incoherent(sigma: &DiagonalState) -> Self {
        Self(HermitianMatrix::from_real_diag(sigma.entries()))
    }

    /// `p_1 ρ_1 ⊕ p_2 ρ_2 ⊕ ⋯`; weights must be a probability vector.
    pub fn weighted_direct_sum(parts: &[(f64, &DensityState)]) -> Result<Self> {
        if parts.iter().any(|(p, _)| !(*p >= 0.0)) {
            return Err(Error::Argument("negative weight".into()));
        }
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::Argument(format!("weights sum to {total}")));
        }
        let blocks: Vec<HermitianMatrix> = parts.iter().map(|(p, r)| r.0.scale(*p)).collect();
        Ok(Self(direct_sum(&blocks)?))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    /// Diagonal entries as a [`DiagonalState`].
    pub fn diagonal_state(&self) -> DiagonalState {
        let d: Vec<f64> = self.0.diagonal().iter().map(|z| z.re.max(0.0)).collect();
        DiagonalState::normalized_unchecked(d)
    }

    pub fn is_incoherent(&self, tol: f64) -> bool {
        self.0.off_diagonal_mass() < tol
    }

    /// Caller guarantees the density invariants hold up to roundoff (channel
    /// outputs, mixtures of valid states).
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(HermitianMatrix::from_trusted(m))
    }
}

impl Deref for DensityState {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Diagonal density matrix, stored as its diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalState(Vec<f64>);

impl DiagonalState {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Argument("empty diagonal".into()));
        }
        if let Some(x) = diag.iter().find(|x| !(**x >= 0.0)) {
            return Err(Error::Argument(format!("negative diagonal entry {x}")));
        }
        let s: f64 = diag.iter().sum();
        if (s - 1.0).abs() > TRACE_TOL {
            return Err(Error::Argument(format!("diagonal sums to {s}")));
        }
        Ok(Self(diag))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub(crate) fn normalized_unchecked(diag: Vec<f64>) -> Self {
        Self(diag)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_diag(&self.0)
    }
}

/// Descending eigenvalues of a Hermitian matrix plus the eigen-residual
/// `max_j ‖A x_j − λ_j x_j‖₂` of the retained eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    pub residual: f64,
}

/// `J_n`, the all-ones matrix.
pub fn make_all_ones(n: usize) -> Result<HermitianMatrix> {
    if n == 0 {
        return Err(Error::Argument("dimension must be positive".into()));
    }
    check_dim(n, MAX_DIM)?;
    Ok(HermitianMatrix(ComplexMatrix {
        rows: n,
        cols: n,
        data: vec![C64::new(1.0, 0.0); n * n],
    }))
}

/// Block-diagonal matrix with the given blocks.
pub fn direct_sum(blocks: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    if blocks.is_empty() {
        return Err(Error::Argument("direct sum of no blocks".into()));
    }
    let n: usize = blocks.iter().map(HermitianMatrix::dim).sum();
    check_dim(n, MAX_DIM)?;
    let mut out = ComplexMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                out[(off + i, off + j)] = b[(i, j)];
            }
        }
        off += b.dim();
    }
    Ok(HermitianMatrix(out))
}

/// `A_diag`: same shape, off-diagonal entries zeroed.
pub fn diag_part(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::Argument(format!(
            "diag_part of a {}x{} matrix",
            a.rows, a.cols
        )));
    }
    let mut out = ComplexMatrix::zeros(a.rows, a.cols);
    for i in 0..a.rows {
        out[(i, i)] = a[(i, i)];
    }
    Ok(out)
}

/// Accepts `a` iff it is Hermitian, trace one and positive semidefinite within
/// the module tolerances. Every failed invariant is reported.
pub fn validate_density(a: &ComplexMatrix) -> Result<DensityState> {
    if !a.is_square() {
        return Err(Error::Density(vec![DensityViolation::NotSquare {
            rows: a.rows,
            cols: a.cols,
        }]));
    }
    check_dim(a.rows, MAX_SPECTRAL_DIM)?;
    let mut violations = Vec::new();
    let residual = a.hermitian_residual();
    if !(residual < HERMITIAN_TOL) {
        violations.push(DensityViolation::NotHermitian { residual });
    }
    let tr = a.trace();
    if !((tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL) {
        violations.push(DensityViolation::Trace { trace: tr.re });
    }
    let sym = a.symmetrized();
    if residual.is_finite() {
        let ev = eigen::eigenvalues(&sym);
        if let Some(&min) = ev.last() {
            if min < -PSD_TOL {
                violations.push(DensityViolation::NegativeEigenvalue { eigenvalue: min });
            }
        }
    }
    if violations.is_empty() {
        Ok(DensityState(HermitianMatrix(sym)))
    } else {
        Err(Error::Density(violations))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(m: &ComplexMatrix) -> Vec<f64> {
        m.data().iter().map(|z| z.re).collect()
    }

    #[test]
    fn all_ones_small() {
        assert_eq!(re(&make_all_ones(2).unwrap()), vec![1.0; 4]);
        assert!(make_all_ones(0).is_err());
        let j3 = make_all_ones(3).unwrap();
        assert!(validate_density(&j3.scale(1.0 / 3.0)).is_ok());
    }

    #[test]
    fn direct_sum_layout() {
        let j2 = make_all_ones(2).unwrap().scale(0.5);
        let zero = HermitianMatrix::from_real_diag(&[0.0]);
        let s = direct_sum(&[j2, zero]).unwrap();
        assert_eq!(
            re(&s),
            vec![0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0]
        );
        assert!(direct_sum(&[]).is_err());
    }

    #[test]
    fn diag_part_examples() {
        let j2 = make_all_ones(2).unwrap();
        assert_eq!(diag_part(&j2).unwrap(), ComplexMatrix::identity(2));
        let d = ComplexMatrix::from_diag(&[0.2, 0.3, 0.5]);
        assert_eq!(diag_part(&d).unwrap(), d);
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(diag_part(&rect).is_err());
    }

    #[test]
    fn validate_density_rejections() {
        let j2 = make_all_ones(2).unwrap();
        assert!(validate_density(&j2.scale(0.5)).is_ok());
        match validate_density(&j2) {
            Err(Error::Density(v)) => {
                assert_eq!(v.len(), 1);
                assert!(matches!(v[0], DensityViolation::Trace { .. }));
            }
            other => panic!("{other:?}"),
        }
        match validate_density(&ComplexMatrix::from_diag(&[1.5, -0.5])) {
            Err(Error::Density(v)) => {
                assert!(matches!(v[0], DensityViolation::NegativeEigenvalue { .. }))
            }
            other => panic!("{other:?}"),
        }
        // both trace and positivity fail
        match validate_density(&ComplexMatrix::from_diag(&[1.5, -0.7])) {
            Err(Error::Density(v)) => assert_eq!(v.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hermitian_symmetrizes_small_residual() {
        let mut m = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        m[(0, 1)] += C64::new(1e-14, 0.0);
        let h = HermitianMatrix::new(m.clone()).unwrap();
        assert_eq!(h.hermitian_residual(), 0.0);
        m[(0, 1)] += C64::new(1e-9, 0.0);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::Structure(_))));
    }

    #[test]
    fn trace_of_diag_part_is_exact() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.1, 0.2),
                C64::new(3.0, 1.0),
                C64::new(-2.0, 0.5),
                C64::new(0.7, -0.1),
            ],
        )
        .unwrap();
        assert_eq!(diag_part(&m).unwrap().trace(), m.trace());
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            make_all_ones(MAX_DIM + 1),
            Err(Error::DimensionTooLarge { .. })
        ));
    }
}

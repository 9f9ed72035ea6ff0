//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! Each rotation is a unitary `U` acting on the `(p, q)` plane,
//!
//! ```text
//! U_pp = c    U_pq = s·e^{iφ}
//! U_qp = −s·e^{−iφ}    U_qq = c
//! ```
//!
//! where `a_pq = r·e^{iφ}` and `t = s/c` is the small root of
//! `t² + 2τt − 1 = 0`, `τ = (a_qq − a_pp)/(2r)`. This annihilates `a_pq` in
//! `U†AU`. Sweeps stop once the off-diagonal Frobenius mass drops below
//! `1e-13·‖A‖_F`.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, EigenResult, HermitianMatrix, C64, MAX_SPECTRAL_DIM};

const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

/// Descending eigenvalues of `a` with the eigen-residual of the computed basis.
pub fn eigenvalues_hermitian(a: &HermitianMatrix) -> Result<EigenResult> {
    if a.dim() > MAX_SPECTRAL_DIM {
        return Err(Error::DimensionTooLarge {
            dim: a.dim(),
            max: MAX_SPECTRAL_DIM,
        });
    }
    let (values, vectors) = eigh(a);
    let n = a.dim();
    let mut residual: f64 = 0.0;
    for (j, &lambda) in values.iter().enumerate() {
        let mut r2 = 0.0;
        for i in 0..n {
            let mut ax = C64::new(0.0, 0.0);
            for k in 0..n {
                ax += a[(i, k)] * vectors[(k, j)];
            }
            r2 += (ax - vectors[(i, j)] * lambda).norm_sqr();
        }
        residual = residual.max(r2.sqrt());
    }
    Ok(EigenResult {
        eigenvalues: values,
        residual,
    })
}

/// Descending eigenvalues only. `a` must be Hermitian (not re-checked).
pub(crate) fn eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let mut w = a.clone();
    jacobi(&mut w, None);
    sorted_diagonal(&w).0
}

/// Eigenvalues (descending) and the matching unitary of column eigenvectors.
pub(crate) fn eigh(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.rows();
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    jacobi(&mut w, Some(&mut v));
    let (values, order) = sorted_diagonal(&w);
    let mut sorted = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            sorted[(i, dst)] = v[(i, src)];
        }
    }
    (values, sorted)
}

fn sorted_diagonal(w: &ComplexMatrix) -> (Vec<f64>, Vec<usize>) {
    let n = w.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].re.total_cmp(&w[(i, i)].re));
    (order.iter().map(|&i| w[(i, i)].re).collect(), order)
}

fn off_diagonal_norm(w: &ComplexMatrix) -> f64 {
    w.off_diagonal_mass()
}

fn jacobi(w: &mut ComplexMatrix, mut v: Option<&mut ComplexMatrix>) {
    let n = w.rows();
    let scale = w.frobenius_norm();
    if n < 2 || scale == 0.0 {
        return;
    }
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(w) < OFF_DIAGONAL_TOL * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = w[(p, q)];
                let r = apq.norm();
                if r == 0.0 || r < 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = w[(p, p)].re;
                let aqq = w[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let upq = phase * s;
                let uqp = -phase.conj() * s;
                // A ← A U (columns p, q)
                for k in 0..n {
                    let akp = w[(k, p)];
                    let akq = w[(k, q)];
                    w[(k, p)] = akp * c + akq * uqp;
                    w[(k, q)] = akp * upq + akq * c;
                }
                // A ← U† A (rows p, q)
                for k in 0..n {
                    let apk = w[(p, k)];
                    let aqk = w[(q, k)];
                    w[(p, k)] = apk * c + aqk * uqp.conj();
                    w[(q, k)] = apk * upq.conj() + aqk * c;
                }
                w[(p, q)] = C64::new(0.0, 0.0);
                w[(q, p)] = C64::new(0.0, 0.0);
                w[(p, p)] = C64::new(w[(p, p)].re, 0.0);
                w[(q, q)] = C64::new(w[(q, q)].re, 0.0);
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c + vkq * uqp;
                        v[(k, q)] = vkp * upq + vkq * c;
                    }
                }
            }
        }
    }
}

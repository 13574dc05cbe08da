//! Fixed-size dense matrix kernels for two-mode covariance analysis.
//!
//! Everything here is sized for the 4x4 problems the rest of the crate
//! works with: real symmetric eigenvalues, Hermitian eigenvalues (via the
//! standard 8x8 real-symmetric embedding), determinants, inverses and
//! tolerance-aware positive-semidefinite margins. The eigensolver is cyclic
//! Jacobi; at these sizes it is unconditionally robust, so no external
//! linear algebra dependency is pulled in.
//!
//! Tolerance conventions:
//! * symmetry / Hermiticity are validated relative to the largest entry,
//! * PSD margins compare the smallest eigenvalue against
//!   `-tol * max(1, scale)` where `scale` is the spectral radius,
//! * every eigen call verifies the reconstruction residual
//!   `A v - v diag(w)` before returning.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default relative tolerance for positive-semidefiniteness checks.
pub const TOL_PSD: f64 = 1e-10;
/// Relative tolerance for symmetry and Hermiticity validation.
pub const TOL_SYMMETRY: f64 = 1e-12;
/// Relative determinant threshold below which a matrix counts as singular.
pub const TOL_SINGULAR: f64 = 1e-12;
/// Relative bound on the accepted eigen reconstruction residual.
const TOL_EIG_RESIDUAL: f64 = 1e-10;
/// Sweep cap for the Jacobi iteration; exceeding it is reported as an error.
const MAX_JACOBI_SWEEPS: usize = 100;

/// 2x2 real matrix, row major.
pub type Mat2 = [[f64; 2]; 2];

pub fn mul2(l: &Mat2, r: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = l[i][0] * r[0][j] + l[i][1] * r[1][j];
        }
    }
    out
}

pub fn transpose2(m: &Mat2) -> Mat2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

pub fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Planar rotation `[[cos t, sin t], [-sin t, cos t]]` (determinant one).
pub fn rotation2(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[c, s], [-s, c]]
}

/// 4x4 real matrix, row major. Entries are validated finite at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4 {
    e: [[f64; 4]; 4],
}

impl Mat4 {
    pub fn new(entries: [[f64; 4]; 4]) -> Result<Self> {
        for (i, row) in entries.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Mat4 { e: entries })
    }

    pub fn zero() -> Self {
        Mat4 { e: [[0.0; 4]; 4] }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.e[i][i] = 1.0;
        }
        m
    }

    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.e[i][i] = d[i];
        }
        m
    }

    /// Assembles `[[a, c], [c^T, b]]` from 2x2 blocks (a symmetric layout).
    pub fn from_blocks(a: &Mat2, c: &Mat2, b: &Mat2) -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] = a[i][j];
                m.e[i][j + 2] = c[i][j];
                m.e[i + 2][j] = c[j][i];
                m.e[i + 2][j + 2] = b[i][j];
            }
        }
        m
    }

    pub fn entries(&self) -> &[[f64; 4]; 4] {
        &self.e
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.e[i][j]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.e[i][j] = self.e[j][i];
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Mat4) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += self.e[i][k] * rhs.e[k][j];
                }
                out.e[i][j] = acc;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat4) -> Self {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.e[i][j] += rhs.e[i][j];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Mat4) -> Self {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.e[i][j] -= rhs.e[i][j];
            }
        }
        out
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.e[i][j] *= k;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for row in &self.e {
            for x in row {
                m = m.max(x.abs());
            }
        }
        m
    }

    /// Worst symmetry deviation together with its location.
    pub fn symmetry_deviation(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..4 {
            for j in (i + 1)..4 {
                let d = (self.e[i][j] - self.e[j][i]).abs();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }

    pub fn require_symmetric(&self) -> Result<()> {
        let tol = TOL_SYMMETRY * (1.0 + self.max_abs());
        let (dev, i, j) = self.symmetry_deviation();
        if dev > tol {
            return Err(Error::NotSymmetric {
                row: i,
                col: j,
                deviation: dev,
                tol,
            });
        }
        Ok(())
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let mut a = self.e;
        let mut sign = 1.0;
        let mut det = 1.0;
        for k in 0..4 {
            let mut piv = k;
            for i in (k + 1)..4 {
                if a[i][k].abs() > a[piv][k].abs() {
                    piv = i;
                }
            }
            if a[piv][k] == 0.0 {
                return 0.0;
            }
            if piv != k {
                a.swap(piv, k);
                sign = -sign;
            }
            det *= a[k][k];
            for i in (k + 1)..4 {
                let f = a[i][k] / a[k][k];
                for j in k..4 {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        sign * det
    }

    /// Inverse via Gauss-Jordan with partial pivoting.
    ///
    /// Refuses matrices whose determinant is below the singularity threshold
    /// and verifies the `self * inverse = identity` product before returning.
    pub fn inverse(&self) -> Result<Mat4> {
        let scale = self.max_abs();
        let tol = TOL_SINGULAR * (1.0 + scale.powi(4));
        let det = self.det();
        if det.abs() <= tol {
            return Err(Error::Singular { det, tol });
        }
        let mut a = self.e;
        let mut inv = Mat4::identity().e;
        for k in 0..4 {
            let mut piv = k;
            for i in (k + 1)..4 {
                if a[i][k].abs() > a[piv][k].abs() {
                    piv = i;
                }
            }
            a.swap(piv, k);
            inv.swap(piv, k);
            let d = a[k][k];
            for j in 0..4 {
                a[k][j] /= d;
                inv[k][j] /= d;
            }
            for i in 0..4 {
                if i == k {
                    continue;
                }
                let f = a[i][k];
                if f != 0.0 {
                    for j in 0..4 {
                        a[i][j] -= f * a[k][j];
                        inv[i][j] -= f * inv[k][j];
                    }
                }
            }
        }
        let inv = Mat4 { e: inv };
        let product = self.mul(&inv);
        let mut residual = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                residual = residual.max((product.e[i][j] - want).abs());
            }
        }
        if residual > 1e-9 {
            return Err(Error::BadResidual {
                residual,
                bound: 1e-9,
            });
        }
        Ok(inv)
    }

    /// Eigenvalues of a symmetric matrix, ascending.
    pub fn sym_eigenvalues(&self) -> Result<[f64; 4]> {
        self.require_symmetric()?;
        let (vals, _) = jacobi(&self.e)?;
        Ok(vals)
    }

    /// Eigenvalues and matching orthonormal eigenvectors (as columns).
    pub fn sym_eigen(&self) -> Result<([f64; 4], Mat4)> {
        self.require_symmetric()?;
        let (vals, vecs) = jacobi(&self.e)?;
        Ok((vals, Mat4 { e: vecs }))
    }

    /// PSD margin at the given relative tolerance.
    pub fn psd_margin(&self, tol: f64) -> Result<PsdMargin> {
        let vals = self.sym_eigenvalues()?;
        Ok(PsdMargin::from_eigenvalues(&vals, tol))
    }
}

/// 4x4 complex Hermitian matrix.
///
/// The constructor validates Hermiticity against the largest entry norm and
/// then stores the exactly Hermitian part `(m + m^dagger) / 2`, so downstream
/// code can rely on real diagonals.
#[derive(Clone, Copy, Debug)]
pub struct HermMat4 {
    e: [[Complex64; 4]; 4],
}

impl HermMat4 {
    pub fn new(entries: [[Complex64; 4]; 4]) -> Result<Self> {
        let mut scale = 0.0f64;
        for row in &entries {
            for x in row {
                if !x.re.is_finite() || !x.im.is_finite() {
                    return Err(Error::NonFinite { row: 0, col: 0 });
                }
                scale = scale.max(x.norm());
            }
        }
        let tol = TOL_SYMMETRY * (1.0 + scale);
        let mut dev = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                dev = dev.max((entries[i][j] - entries[j][i].conj()).norm());
            }
        }
        if dev > tol {
            return Err(Error::NotHermitian {
                deviation: dev,
                tol,
            });
        }
        let mut e = entries;
        for i in 0..4 {
            for j in 0..4 {
                e[i][j] = (entries[i][j] + entries[j][i].conj()) * 0.5;
            }
        }
        Ok(HermMat4 { e })
    }

    /// Builds `re + i*im` from real and imaginary parts.
    pub fn from_re_im(re: &Mat4, im: &Mat4) -> Result<Self> {
        let mut e = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                e[i][j] = Complex64::new(re.at(i, j), im.at(i, j));
            }
        }
        Self::new(e)
    }

    pub fn entries(&self) -> &[[Complex64; 4]; 4] {
        &self.e
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for row in &self.e {
            for x in row {
                m = m.max(x.norm());
            }
        }
        m
    }

    /// Determinant; the imaginary residue of the complex elimination must be
    /// negligible for a Hermitian input and is discarded.
    pub fn det(&self) -> f64 {
        let mut a = self.e;
        let mut sign = 1.0;
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..4 {
            let mut piv = k;
            for i in (k + 1)..4 {
                if a[i][k].norm_sqr() > a[piv][k].norm_sqr() {
                    piv = i;
                }
            }
            if a[piv][k].norm_sqr() == 0.0 {
                return 0.0;
            }
            if piv != k {
                a.swap(piv, k);
                sign = -sign;
            }
            det *= a[k][k];
            for i in (k + 1)..4 {
                let f = a[i][k] / a[k][k];
                for j in k..4 {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        let det = det * sign;
        debug_assert!(
            det.im.abs() <= 1e-10 * (1.0 + self.max_abs().powi(4)),
            "imaginary residue {} too large for a Hermitian determinant",
            det.im
        );
        det.re
    }

    /// Eigenvalues, ascending. Computed through the 8x8 real-symmetric
    /// embedding `[[re, -im], [im, re]]`, whose spectrum is the Hermitian
    /// spectrum with every eigenvalue doubled; the duplicates are dropped by
    /// taking every second entry of the sorted list.
    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        let mut big = [[0.0f64; 8]; 8];
        for i in 0..4 {
            for j in 0..4 {
                big[i][j] = self.e[i][j].re;
                big[i][j + 4] = -self.e[i][j].im;
                big[i + 4][j] = self.e[i][j].im;
                big[i + 4][j + 4] = self.e[i][j].re;
            }
        }
        let (vals, _) = jacobi(&big)?;
        Ok([vals[0], vals[2], vals[4], vals[6]])
    }

    pub fn psd_margin(&self, tol: f64) -> Result<PsdMargin> {
        let vals = self.eigenvalues()?;
        Ok(PsdMargin::from_eigenvalues(&vals, tol))
    }
}

/// Outcome of a positive-semidefiniteness check.
///
/// `is_psd` holds exactly when `min_eigenvalue >= -tol * max(1, scale)`,
/// where `scale` is the largest eigenvalue magnitude and `tol` is the
/// relative tolerance passed at construction.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PsdMargin {
    pub min_eigenvalue: f64,
    pub scale: f64,
    pub is_psd: bool,
}

impl PsdMargin {
    pub fn from_eigenvalues(evals: &[f64], tol: f64) -> Self {
        let mut min = f64::INFINITY;
        let mut scale = 0.0f64;
        for &v in evals {
            min = min.min(v);
            scale = scale.max(v.abs());
        }
        PsdMargin {
            min_eigenvalue: min,
            scale,
            is_psd: min >= -tol * scale.max(1.0),
        }
    }

    /// True when the minimum eigenvalue sits inside the `tol`-band around
    /// zero, i.e. the check cannot distinguish the matrix from a boundary
    /// case at this tolerance.
    pub fn in_boundary_band(&self, tol: f64) -> bool {
        self.min_eigenvalue.abs() <= tol * self.scale.max(1.0)
    }
}

/// Cyclic Jacobi iteration for a small symmetric matrix.
///
/// Returns eigenvalues ascending together with the accumulated rotation
/// matrix whose columns are the matching eigenvectors. The reconstruction
/// residual `A v - v diag(w)` is verified against the contract bound before
/// returning; hitting the sweep cap reports non-convergence instead of
/// handing back a partial answer.
fn jacobi<const N: usize>(input: &[[f64; N]; N]) -> Result<([f64; N], [[f64; N]; N])> {
    let mut a = *input;
    let mut v = [[0.0f64; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut scale = 0.0f64;
    for row in input {
        for x in row {
            scale = scale.max(x.abs());
        }
    }

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..N {
            for q in (p + 1)..N {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= f64::EPSILON * (1.0 + scale) {
            converged = true;
            break;
        }
        for p in 0..(N - 1) {
            for q in (p + 1)..N {
                let apq = a[p][q];
                // Rotations on entries already at round-off level only churn noise.
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for i in 0..N {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = aip - s * (aiq + tau * aip);
                    a[p][i] = a[i][p];
                    a[i][q] = aiq + s * (aip - tau * aiq);
                    a[q][i] = a[i][q];
                }
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = vip - s * (viq + tau * vip);
                    row[q] = viq + s * (vip - tau * viq);
                }
            }
        }
    }
    if !converged {
        let mut off = 0.0f64;
        for p in 0..N {
            for q in (p + 1)..N {
                off += a[p][q] * a[p][q];
            }
        }
        return Err(Error::NoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
            off: off.sqrt(),
        });
    }

    // Sort eigenvalues ascending, carrying eigenvector columns along.
    let mut idx: Vec<usize> = (0..N).collect();
    idx.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let mut vals = [0.0f64; N];
    let mut vecs = [[0.0f64; N]; N];
    for (new, &old) in idx.iter().enumerate() {
        vals[new] = a[old][old];
        for i in 0..N {
            vecs[i][new] = v[i][old];
        }
    }

    let bound = TOL_EIG_RESIDUAL * (1.0 + scale);
    let mut residual = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            let mut av = 0.0;
            for k in 0..N {
                av += input[i][k] * vecs[k][j];
            }
            residual = residual.max((av - vecs[i][j] * vals[j]).abs());
        }
    }
    if residual > bound {
        return Err(Error::BadResidual { residual, bound });
    }

    Ok((vals, vecs))
}

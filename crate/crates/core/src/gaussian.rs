//! Two-mode Gaussian state model.
//!
//! States are described by 4x4 covariance matrices in the quadrature
//! ordering `(q1, p1, q2, p2)` with vacuum variance 1/2, so the vacuum state
//! is `I/2` and the uncertainty relation reads `V + (i/2) Omega >= 0` with
//! `Omega = diag(J, J)`, `J = [[0, 1], [-1, 0]]`. All I/O and every function
//! in this crate uses that ordering; there is no runtime reordering.
//!
//! The module provides the covariance matrix type and its basic tests
//! (physicality, partial transpose, P-representability), local symplectic
//! transformations, the reduction to the two-mode standard form
//! `(a, b, c1, c2)`, and construction plus Monte Carlo sampling of the
//! Gaussian P-representation for states that admit one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::smallmat::{det2, mul2, transpose2, HermMat4, Mat2, Mat4, PsdMargin, TOL_PSD};

/// Single-mode symplectic unit `J = [[0, 1], [-1, 0]]`.
pub fn j_block() -> Mat2 {
    [[0.0, 1.0], [-1.0, 0.0]]
}

/// Two-mode symplectic form `Omega = diag(J, J)` in `(q1, p1, q2, p2)`
/// ordering. Antisymmetric with `Omega^2 = -I`.
pub fn omega() -> Mat4 {
    let j = j_block();
    Mat4::from_blocks(&j, &[[0.0; 2]; 2], &j)
}

/// Sign selector for the uncertainty form `V + (i/2) diag(J, +/-J)`:
/// `Plus` is the physicality instance, `Minus` the partial-transpose one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Covariance matrix of a two-mode Gaussian state.
///
/// Validated symmetric (relative tolerance 1e-12) and finite at
/// construction. Physicality is *not* part of the type invariant; unphysical
/// matrices are representable so they can be diagnosed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceMatrix {
    m: Mat4,
}

impl CovarianceMatrix {
    pub fn new(m: Mat4) -> Result<Self> {
        m.require_symmetric()?;
        Ok(CovarianceMatrix { m })
    }

    pub fn from_entries(entries: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(Mat4::new(entries)?)
    }

    /// Vacuum state `I/2`.
    pub fn vacuum() -> Self {
        CovarianceMatrix {
            m: Mat4::identity().scale(0.5),
        }
    }

    /// Builds the standard-form layout
    /// `diag(a, a, b, b)` with `V[0][2] = c1`, `V[1][3] = c2` directly.
    /// No canonicalization is applied; the entries land where given.
    pub fn from_standard_params(a: f64, b: f64, c1: f64, c2: f64) -> Result<Self> {
        Self::from_entries([
            [a, 0.0, c1, 0.0],
            [0.0, a, 0.0, c2],
            [c1, 0.0, b, 0.0],
            [0.0, c2, 0.0, b],
        ])
    }

    /// Two-mode squeezed vacuum with squeezing parameter `r`:
    /// `a = b = cosh(2r)/2`, `c1 = -c2 = sinh(2r)/2`. Entangled for every
    /// `r != 0`.
    pub fn two_mode_squeezed_vacuum(r: f64) -> Self {
        let a = (2.0 * r).cosh() / 2.0;
        let c = (2.0 * r).sinh() / 2.0;
        Self::from_standard_params(a, a, c, -c)
            .expect("squeezed-vacuum entries are finite and symmetric")
    }

    pub fn mat(&self) -> &Mat4 {
        &self.m
    }

    pub fn entries(&self) -> &[[f64; 4]; 4] {
        self.m.entries()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.m.at(i, j)
    }

    /// Mode-1 block `A` of `V = [[A, C], [C^T, B]]`.
    pub fn block_a(&self) -> Mat2 {
        [
            [self.at(0, 0), self.at(0, 1)],
            [self.at(1, 0), self.at(1, 1)],
        ]
    }

    /// Mode-2 block `B`.
    pub fn block_b(&self) -> Mat2 {
        [
            [self.at(2, 2), self.at(2, 3)],
            [self.at(3, 2), self.at(3, 3)],
        ]
    }

    /// Cross block `C`.
    pub fn block_c(&self) -> Mat2 {
        [
            [self.at(0, 2), self.at(0, 3)],
            [self.at(1, 2), self.at(1, 3)],
        ]
    }

    /// Partial transpose with respect to mode 2: conjugation by
    /// `diag(1, 1, 1, -1)` (momentum flip `p2 -> -p2`). Exact sign flips,
    /// so applying it twice reproduces the input bit for bit.
    pub fn partial_transpose(&self) -> Self {
        const L: [f64; 4] = [1.0, 1.0, 1.0, -1.0];
        let mut e = *self.m.entries();
        for (i, row) in e.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x *= L[i] * L[j];
            }
        }
        CovarianceMatrix {
            m: Mat4::new(e).expect("sign flips preserve finiteness"),
        }
    }

    /// The Hermitian uncertainty form `V + (i/2) diag(J, +/-J)`.
    pub fn uncertainty_matrix(&self, sign: Sign) -> HermMat4 {
        let s = 0.5 * sign.factor();
        let im = Mat4::new([
            [0.0, 0.5, 0.0, 0.0],
            [-0.5, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, s],
            [0.0, 0.0, -s, 0.0],
        ])
        .expect("constant form");
        HermMat4::from_re_im(&self.m, &im)
            .expect("real symmetric part plus antisymmetric imaginary part is Hermitian")
    }

    /// Physicality check: PSD margin of `V + (i/2) Omega` at relative
    /// tolerance `tol`.
    pub fn is_physical(&self, tol: f64) -> Result<PsdMargin> {
        self.uncertainty_matrix(Sign::Plus).psd_margin(tol)
    }

    /// P-representability precondition: PSD margin of `V - I/2`.
    pub fn p_condition(&self, tol: f64) -> Result<PsdMargin> {
        self.m.sub(&Mat4::identity().scale(0.5)).psd_margin(tol)
    }

    /// Congruence `S V S^T` by a local symplectic transformation.
    ///
    /// The product is explicitly symmetrized afterwards; mathematically a
    /// no-op, it stops round-off from accumulating across compositions.
    pub fn apply_symplectic(&self, s: &LocalSymplectic) -> Self {
        let sm = s.matrix();
        let product = sm.mul(&self.m).mul(&sm.transpose());
        let mut e = [[0.0; 4]; 4];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = 0.5 * (product.at(i, j) + product.at(j, i));
            }
        }
        CovarianceMatrix {
            m: Mat4::new(e).expect("symplectic image of a finite matrix is finite"),
        }
    }

    /// Reduces a physical covariance matrix to standard form.
    ///
    /// Returns the canonical parameters together with the local symplectic
    /// `S` such that `apply_symplectic(self, S)` is the standard-form matrix
    /// (within 1e-9 elementwise). Canonical orientation: `c1 >= |c2| >= 0`,
    /// with `c2` carrying the sign of the original `c1 * c2` product.
    pub fn to_standard_form(&self, tol: f64) -> Result<(StandardForm, LocalSymplectic)> {
        let physical = self.is_physical(tol)?;
        if !physical.is_psd {
            return Err(Error::Unphysical {
                min_eigenvalue: physical.min_eigenvalue,
            });
        }

        // Stage 1: rotate each mode to diagonalize its local block, then
        // squeeze (det 1) to balance the diagonal to sqrt(det) * I.
        let s1 = balance_mode(&self.block_a())?;
        let s2 = balance_mode(&self.block_b())?;
        let stage1 = LocalSymplectic { s1, s2 };
        let v1 = self.apply_symplectic(&stage1);

        // Stage 2: with both local blocks proportional to the identity, one
        // residual rotation per mode is still free; use it to diagonalize
        // the cross block (rotation-only SVD, determinant sign kept in the
        // second diagonal entry).
        let (o1, o2) = cross_block_rotations(&v1.block_c());
        let stage2 = LocalSymplectic {
            s1: mul2(&o1, &stage1.s1),
            s2: mul2(&o2, &stage1.s2),
        };
        let v2 = self.apply_symplectic(&stage2);

        // Stage 3: canonical orientation. A pi/2 rotation on both modes
        // swaps c1 and c2; a pi rotation on mode 1 flips both signs. Both
        // preserve a*I local blocks and the product c1*c2.
        let (c1, c2) = (v2.at(0, 2), v2.at(1, 3));
        let mut extra1 = [[1.0, 0.0], [0.0, 1.0]];
        let mut extra2 = [[1.0, 0.0], [0.0, 1.0]];
        let mut c1_now = c1;
        if c1.abs() < c2.abs() {
            let j = j_block();
            extra1 = j;
            extra2 = j;
            c1_now = c2;
        }
        if c1_now < 0.0 {
            extra1 = mul2(&[[-1.0, 0.0], [0.0, -1.0]], &extra1);
        }
        let total = LocalSymplectic {
            s1: mul2(&extra1, &stage2.s1),
            s2: mul2(&extra2, &stage2.s2),
        };
        let v_std = self.apply_symplectic(&total);

        let a = 0.5 * (v_std.at(0, 0) + v_std.at(1, 1));
        let b = 0.5 * (v_std.at(2, 2) + v_std.at(3, 3));
        let c1 = v_std.at(0, 2);
        let c2 = v_std.at(1, 3);
        let form = StandardForm::new(a, b, c1, c2)?;

        // Everything off the standard-form pattern must be round-off.
        let pattern = form.to_matrix();
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((v_std.at(i, j) - pattern.at(i, j)).abs());
            }
        }
        if worst > 1e-9 * (1.0 + v_std.m.max_abs()) {
            return Err(Error::ReductionFailed { deviation: worst });
        }

        Ok((form, total))
    }

    /// Builds the Gaussian P-representation of this state.
    ///
    /// Requires a strictly positive `V - I/2` (smallest eigenvalue at least
    /// 1e-8); boundary states have a distributional P-function this
    /// representation cannot express.
    pub fn build_p_function(&self) -> Result<GaussianPFunction> {
        const REQUIRED: f64 = 1e-8;
        let margin = self.p_condition(TOL_PSD)?;
        if margin.min_eigenvalue < REQUIRED {
            return Err(Error::NotPRepresentable {
                min_eigenvalue: margin.min_eigenvalue,
                required: REQUIRED,
            });
        }
        let sigma = self.m.sub(&Mat4::identity().scale(0.5));
        let precision = sigma.inverse()?;
        let norm_factor = precision.det().sqrt() / (4.0 * std::f64::consts::PI.powi(2));
        Ok(GaussianPFunction {
            precision,
            mean: [0.0; 4],
            norm_factor,
        })
    }
}

/// Per-mode rotation followed by a balancing squeeze: maps the local block
/// to `sqrt(det) * I`.
fn balance_mode(block: &Mat2) -> Result<Mat2> {
    let alpha = block[0][0];
    let beta = block[1][1];
    let gamma = 0.5 * (block[0][1] + block[1][0]);
    let theta = 0.5 * (2.0 * gamma).atan2(alpha - beta);
    let r = crate::smallmat::rotation2(theta);
    let d = mul2(&mul2(&r, block), &transpose2(&r));
    let (d0, d1) = (d[0][0], d[1][1]);
    if d0 <= 0.0 || d1 <= 0.0 {
        return Err(Error::domain(
            "standard-form reduction",
            format!("local block not positive definite (eigenvalues {d0:.3e}, {d1:.3e})"),
        ));
    }
    let s = (d1 / d0).powf(0.25);
    Ok(mul2(&[[s, 0.0], [0.0, 1.0 / s]], &r))
}

/// Rotation-only SVD of the cross block: returns rotations `(o1, o2)` with
/// `o1 * c * o2^T = diag(s1, s2_signed)`, `s1 >= |s2_signed|`, and
/// `s2_signed` carrying the sign of `det c`.
fn cross_block_rotations(c: &Mat2) -> (Mat2, Mat2) {
    let eye = [[1.0, 0.0], [0.0, 1.0]];
    let g = mul2(c, &transpose2(c));
    let theta = 0.5 * (2.0 * g[0][1]).atan2(g[0][0] - g[1][1]);
    let mut o1 = crate::smallmat::rotation2(theta);
    let gd = mul2(&mul2(&o1, &g), &transpose2(&o1));
    if gd[0][0] < gd[1][1] {
        // Compose an extra quarter turn so the larger singular value leads.
        o1 = mul2(&j_block(), &o1);
    }
    let n = mul2(&o1, c);
    let sigma1 = n[0][0].hypot(n[0][1]);
    if sigma1 == 0.0 {
        return (eye, eye);
    }
    let u = [n[0][0] / sigma1, n[0][1] / sigma1];
    // Second row of o2 is the exact perpendicular of the first, so o2 is a
    // rotation by construction and the (0, 1) entry of the product vanishes
    // identically.
    let o2 = [[u[0], u[1]], [-u[1], u[0]]];
    (o1, o2)
}

/// Two-mode standard form `(a, b, c1, c2)`: local blocks `a*I`, `b*I` and
/// cross block `diag(c1, c2)`.
///
/// Canonical orientation is enforced at construction: `c1 >= |c2| >= 0`,
/// `c2` keeps the sign of the original `c1 * c2` product. Both are local
/// symplectic relabelings (mode rotations by pi/2 and pi), so every
/// criterion is invariant under them. `a, b >= 0` is required; values below
/// the vacuum limit 1/2 are representable so unphysical parameter sets can
/// be diagnosed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StandardForm {
    a: f64,
    b: f64,
    c1: f64,
    c2: f64,
}

impl StandardForm {
    pub fn new(a: f64, b: f64, c1: f64, c2: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c1", c1), ("c2", c2)] {
            if !v.is_finite() {
                return Err(Error::domain(
                    "standard form",
                    format!("{name} is not finite"),
                ));
            }
        }
        if a < 0.0 || b < 0.0 {
            return Err(Error::domain(
                "standard form",
                format!("a and b must be nonnegative (got a = {a}, b = {b})"),
            ));
        }
        let hi = c1.abs().max(c2.abs());
        let lo = c1.abs().min(c2.abs());
        let product = c1 * c2;
        let c2_canonical = if product == 0.0 {
            0.0
        } else {
            lo * product.signum()
        };
        Ok(StandardForm {
            a,
            b,
            c1: hi,
            c2: c2_canonical,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Correlation ratio `t = |c2| / c1`, in `[0, 1]` by canonicality.
    /// Undefined (None) when the cross block vanishes.
    pub fn t(&self) -> Option<f64> {
        if self.c1 == 0.0 {
            None
        } else {
            Some(self.c2.abs() / self.c1)
        }
    }

    pub fn to_matrix(&self) -> CovarianceMatrix {
        CovarianceMatrix::from_standard_params(self.a, self.b, self.c1, self.c2)
            .expect("canonical parameters are finite")
    }
}

/// Block-diagonal symplectic transformation `diag(s1, s2)` with unit
/// determinant 2x2 blocks (every such block is a one-mode symplectic).
#[derive(Clone, Copy, Debug)]
pub struct LocalSymplectic {
    s1: Mat2,
    s2: Mat2,
}

impl LocalSymplectic {
    pub fn new(s1: Mat2, s2: Mat2) -> Result<Self> {
        let (d1, d2) = (det2(&s1), det2(&s2));
        if (d1 - 1.0).abs() > 1e-10 || (d2 - 1.0).abs() > 1e-10 {
            return Err(Error::NotSymplectic { det1: d1, det2: d2 });
        }
        Ok(LocalSymplectic { s1, s2 })
    }

    pub fn identity() -> Self {
        let eye = [[1.0, 0.0], [0.0, 1.0]];
        LocalSymplectic { s1: eye, s2: eye }
    }

    /// Independent mode rotations.
    pub fn rotation(theta1: f64, theta2: f64) -> Self {
        LocalSymplectic {
            s1: crate::smallmat::rotation2(theta1),
            s2: crate::smallmat::rotation2(theta2),
        }
    }

    pub fn block1(&self) -> &Mat2 {
        &self.s1
    }

    pub fn block2(&self) -> &Mat2 {
        &self.s2
    }

    pub fn matrix(&self) -> Mat4 {
        let mut e = [[0.0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] = self.s1[i][j];
                e[i + 2][j + 2] = self.s2[i][j];
            }
        }
        Mat4::new(e).expect("finite blocks")
    }

    /// Composition `next` after `self`.
    pub fn then(&self, next: &LocalSymplectic) -> Self {
        LocalSymplectic {
            s1: mul2(&next.s1, &self.s1),
            s2: mul2(&next.s2, &self.s2),
        }
    }

    /// Exact block inverse (adjugate over determinant).
    pub fn inverse(&self) -> Self {
        LocalSymplectic {
            s1: inv2(&self.s1),
            s2: inv2(&self.s2),
        }
    }
}

fn inv2(m: &Mat2) -> Mat2 {
    let d = det2(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

/// Local squeezing parameters `(r1, r2)`, both positive. The induced
/// symplectic is `diag(sqrt(r1), 1/sqrt(r1)) (+) diag(sqrt(r2), 1/sqrt(r2))`,
/// which maps the standard form `(a, b, c1, c2)` to
/// `diag(a r1, a/r1, b r2, b/r2)` with cross entries `c1 sqrt(r1 r2)` and
/// `c2 / sqrt(r1 r2)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SqueezeParams {
    pub r1: f64,
    pub r2: f64,
}

impl SqueezeParams {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if !(r1.is_finite() && r2.is_finite() && r1 > 0.0 && r2 > 0.0) {
            return Err(Error::domain(
                "squeeze parameters",
                format!("r1 and r2 must be positive and finite (got {r1}, {r2})"),
            ));
        }
        Ok(SqueezeParams { r1, r2 })
    }

    pub fn to_symplectic(&self) -> LocalSymplectic {
        let (a, b) = (self.r1.sqrt(), self.r2.sqrt());
        LocalSymplectic {
            s1: [[a, 0.0], [0.0, 1.0 / a]],
            s2: [[b, 0.0], [0.0, 1.0 / b]],
        }
    }
}

/// Gaussian P-representation `P(x) = norm_factor * exp(-x^T precision x / 2)`
/// over the coherent-amplitude quadratures, with
/// `precision = (V - I/2)^{-1}` and `norm_factor = sqrt(det precision)/(4 pi^2)`.
#[derive(Clone, Copy, Debug)]
pub struct GaussianPFunction {
    pub precision: Mat4,
    pub mean: [f64; 4],
    pub norm_factor: f64,
}

impl GaussianPFunction {
    /// Monte Carlo moment reconstruction: draws `n` coherent amplitudes from
    /// the P-distribution and returns their sample covariance plus `I/2`
    /// (each coherent state contributes vacuum noise). Deterministic for a
    /// fixed seed (ChaCha8 stream).
    pub fn moments(&self, n: usize, seed: u64) -> Result<CovarianceMatrix> {
        if n < 1000 {
            return Err(Error::domain(
                "P-function moments",
                format!("need at least 1000 samples for a stable covariance (got {n})"),
            ));
        }
        let sigma = self.precision.inverse()?;
        let l = cholesky4(&sigma)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sum = [0.0f64; 4];
        let mut prod = [[0.0f64; 4]; 4];
        for _ in 0..n {
            let z: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let mut x = self.mean;
            for i in 0..4 {
                for k in 0..=i {
                    x[i] += l[i][k] * z[k];
                }
            }
            for i in 0..4 {
                sum[i] += x[i];
                for j in 0..4 {
                    prod[i][j] += x[i] * x[j];
                }
            }
        }
        let nf = n as f64;
        let mean: [f64; 4] = std::array::from_fn(|i| sum[i] / nf);
        let mut cov = [[0.0f64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                cov[i][j] = (prod[i][j] - nf * mean[i] * mean[j]) / (nf - 1.0);
                if i == j {
                    cov[i][j] += 0.5;
                }
            }
        }
        CovarianceMatrix::from_entries(cov)
    }
}

/// Lower-triangular Cholesky factor of a positive definite 4x4 matrix.
fn cholesky4(m: &Mat4) -> Result<[[f64; 4]; 4]> {
    let mut l = [[0.0f64; 4]; 4];
    for i in 0..4 {
        for j in 0..=i {
            let mut acc = m.at(i, j);
            for k in 0..j {
                acc -= l[i][k] * l[j][k];
            }
            if i == j {
                if acc <= 0.0 {
                    return Err(Error::domain(
                        "Cholesky factorization",
                        format!("pivot {i} is not positive ({acc:.3e})"),
                    ));
                }
                l[i][j] = acc.sqrt();
            } else {
                l[i][j] = acc / l[j][j];
            }
        }
    }
    Ok(l)
}

//! Separability criteria for two-mode Gaussian states.
//!
//! Everything here works on the standard form `(a, b, c1, c2)` with
//! `t = |c2| / c1` or directly on covariance matrices:
//!
//! * a closed-form bound `c1_max(a, b, t)` on the larger cross correlation,
//!   the supremum of `c1` over separable states with the given `(a, b, t)`;
//! * the local squeezing parameters `(r1, r2)` that attain the bound, with
//!   the two residual identities the optimum must satisfy;
//! * the P-representation bound expressions for arbitrary squeezings, which
//!   the brute-force oracle maximizes independently;
//! * the Simon determinant margin and the full PPT eigenvalue check
//!   (ground truth for two-mode Gaussian separability);
//! * the DGCZ variance-product margins, both in standard form and after
//!   local squeezing;
//! * quadratic-form margins over explicit probe vectors, the pointwise view
//!   of the uncertainty conditions;
//! * an aggregate verdict combining all of the above.
//!
//! Margins are signed reals so boundary behavior stays testable; booleans
//! are derived views using a caller-supplied tolerance.
//!
//! The `*_with_d` variants exist for fault injection only: they perturb the
//! discriminant polynomial `D` by a relative amount before use, so the test
//! suite can prove it would catch a wrong `D`. A perturbation of zero is the
//! normal path.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, Sign, SqueezeParams, StandardForm};
use crate::smallmat::{mul2, transpose2, Mat2, PsdMargin};

/// Slack accepted on the `a, b >= 1/2` and `t in [0, 1]` domain edges,
/// absorbing round-off from upstream standard-form reductions. Genuine
/// violations beyond the slack are rejected.
const DOMAIN_SLACK: f64 = 1e-9;

/// Relative threshold below which a radicand factor counts as exactly zero.
/// Factors like `a*r1 - 1/2` vanish identically at `a = 1/2` or `t = 1`;
/// round-off there would otherwise be amplified by the square root.
const SNAP_TOL: f64 = 1e-13;

fn snap_zero(x: f64, scale: f64) -> f64 {
    if x.abs() <= SNAP_TOL * scale.abs().max(1.0) {
        0.0
    } else {
        x
    }
}

/// Validates `a, b >= 1/2` and `t in [0, 1]` up to `DOMAIN_SLACK`, returning
/// `t` clamped into the closed interval.
fn standard_domain(a: f64, b: f64, t: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && t.is_finite()) {
        return Err(Error::domain(
            "standard-form criteria",
            format!("non-finite input (a = {a}, b = {b}, t = {t})"),
        ));
    }
    if a < 0.5 - DOMAIN_SLACK || b < 0.5 - DOMAIN_SLACK {
        return Err(Error::domain(
            "standard-form criteria",
            format!("a and b must be at least 1/2 (got a = {a}, b = {b})"),
        ));
    }
    if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&t) {
        return Err(Error::domain(
            "standard-form criteria",
            format!("t must lie in [0, 1] (got {t})"),
        ));
    }
    Ok(t.clamp(0.0, 1.0))
}

/// Discriminant polynomial `D(a, b, t) = a^2 b^2 (1 - t^2)^2 + t (a + b t)(a t + b)`,
/// nonnegative on the whole domain. Its square root drives both the
/// correlation bound and the optimal squeezing parameters.
pub fn d_polynomial(a: f64, b: f64, t: f64) -> Result<f64> {
    let t = standard_domain(a, b, t)?;
    let one_minus = 1.0 - t * t;
    Ok(a * a * b * b * one_minus * one_minus + t * (a + b * t) * (a * t + b))
}

/// Closed-form separability bound on the larger cross correlation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExplicitBound {
    /// Supremum of `c1` over separable standard forms with this `(a, b, t)`.
    pub c1_max: f64,
    /// `sqrt(D(a, b, t))`, the single radical entering the bound.
    pub sqrt_d: f64,
    /// `2ab(1 + t^2) + t - 2 sqrt(D)`, evaluated in cancellation-free form.
    pub numerator: f64,
}

/// Separability bound `c1_max(a, b, t)`.
///
/// The naive form `sqrt(2ab(1 + t^2) + t - 2 sqrt(D)) / (2t)` loses all
/// precision as `t -> 0` and is undefined at `t = 0`. The implementation
/// uses the algebraically identical representation
///
/// ```text
/// c1_max = sqrt((4a^2 - 1)(4b^2 - 1) / (2ab(1 + t^2) + t + 2 sqrt(D))) / 2
/// ```
///
/// which follows from `(2ab(1+t^2) + t)^2 - 4D = t^2 (4a^2 - 1)(4b^2 - 1)`
/// and is uniform over the whole domain, reproducing the analytic `t = 0`
/// limit `sqrt((4a^2 - 1)(4b^2 - 1)) / (4 sqrt(ab))` with no branch.
pub fn explicit_bound(a: f64, b: f64, t: f64) -> Result<ExplicitBound> {
    explicit_bound_with_d(a, b, t, 0.0)
}

/// Fault-injection variant of [`explicit_bound`]: uses `D * (1 + d_fault)`
/// in place of the discriminant. Exists so the verification suite can show
/// that a perturbed discriminant is caught; `d_fault = 0` is the normal
/// path.
pub fn explicit_bound_with_d(a: f64, b: f64, t: f64, d_fault: f64) -> Result<ExplicitBound> {
    let t = standard_domain(a, b, t)?;
    let d = d_polynomial(a, b, t)? * (1.0 + d_fault);
    if d < 0.0 {
        return Err(Error::domain(
            "explicit bound",
            format!("discriminant became negative ({d:.3e}) under fault {d_fault}"),
        ));
    }
    let sqrt_d = d.sqrt();
    let sum = 2.0 * a * b * (1.0 + t * t) + t;
    let denominator = sum + 2.0 * sqrt_d;
    let f1 = snap_zero(4.0 * a * a - 1.0, 4.0 * a * a).max(0.0);
    let f2 = snap_zero(4.0 * b * b - 1.0, 4.0 * b * b).max(0.0);
    let ratio = f1 * f2 / denominator;
    Ok(ExplicitBound {
        c1_max: 0.5 * ratio.sqrt(),
        sqrt_d,
        numerator: t * t * ratio,
    })
}

/// Local squeezing parameters attaining the separability bound, together
/// with the residuals of the two identities that characterize the optimum.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OptimalSqueeze {
    pub r1: f64,
    pub r2: f64,
    /// Residual of the identity equating the q-side and p-side bound
    /// expressions at the optimum:
    /// `(a - 1/(2 r1))(b - 1/(2 r2)) - (a - r1/2)(b - r2/2) / t^2`.
    /// At `t = 0` the cross-multiplied form
    /// `t^2 (a - 1/(2 r1))(b - 1/(2 r2)) - (a - r1/2)(b - r2/2)` is stored
    /// instead, which the `t = 0` optimum `(2a, 2b)` satisfies exactly.
    pub residual_balance: f64,
    /// Residual of the identity equating both modes' margin ratios:
    /// `(a r1 - 1/2)(b / r2 - 1/2) - (b r2 - 1/2)(a / r1 - 1/2)`.
    pub residual_ratio: f64,
}

impl OptimalSqueeze {
    pub fn params(&self) -> SqueezeParams {
        SqueezeParams::new(self.r1, self.r2).expect("optimal squeezing parameters are positive")
    }
}

/// Optimal squeezing parameters
/// `r1 = (ab(1 - t^2) + sqrt(D)) / (a t + b)`,
/// `r2 = (ab(1 - t^2) + sqrt(D)) / (a + b t)`.
/// At `t = 0` they reduce to `(2a, 2b)`; at `t = 1` both equal 1.
pub fn optimal_squeezing(a: f64, b: f64, t: f64) -> Result<OptimalSqueeze> {
    optimal_squeezing_with_d(a, b, t, 0.0)
}

/// Fault-injection variant of [`optimal_squeezing`]; see
/// [`explicit_bound_with_d`].
pub fn optimal_squeezing_with_d(a: f64, b: f64, t: f64, d_fault: f64) -> Result<OptimalSqueeze> {
    let t = standard_domain(a, b, t)?;
    let d = d_polynomial(a, b, t)? * (1.0 + d_fault);
    if d < 0.0 {
        return Err(Error::domain(
            "optimal squeezing",
            format!("discriminant became negative ({d:.3e}) under fault {d_fault}"),
        ));
    }
    let core = a * b * (1.0 - t * t) + d.sqrt();
    let r1 = core / (a * t + b);
    let r2 = core / (a + b * t);
    let residual_balance = if t > 0.0 {
        balance_residual(a, b, t, r1, r2)
    } else {
        -(a - r1 / 2.0) * (b - r2 / 2.0)
    };
    Ok(OptimalSqueeze {
        r1,
        r2,
        residual_balance,
        residual_ratio: ratio_residual(a, b, r1, r2),
    })
}

fn balance_residual(a: f64, b: f64, t: f64, r1: f64, r2: f64) -> f64 {
    (a - 1.0 / (2.0 * r1)) * (b - 1.0 / (2.0 * r2)) - (a - r1 / 2.0) * (b - r2 / 2.0) / (t * t)
}

fn ratio_residual(a: f64, b: f64, r1: f64, r2: f64) -> f64 {
    (a * r1 - 0.5) * (b / r2 - 0.5) - (b * r2 - 0.5) * (a / r1 - 0.5)
}

/// Residuals of the two boundary identities at an arbitrary squeezing:
/// the balance identity (see [`OptimalSqueeze::residual_balance`]) and the
/// ratio identity (see [`OptimalSqueeze::residual_ratio`]), in that order.
/// Both vanish exactly at the optimal parameters. The balance identity
/// divides by `t^2`, so `t = 0` is rejected.
pub fn boundary_residuals(a: f64, b: f64, t: f64, squeeze: &SqueezeParams) -> Result<(f64, f64)> {
    let t = standard_domain(a, b, t)?;
    if t == 0.0 {
        return Err(Error::domain(
            "boundary residuals",
            "the balance identity divides by t^2 and is singular at t = 0",
        ));
    }
    let (r1, r2) = (squeeze.r1, squeeze.r2);
    Ok((
        balance_residual(a, b, t, r1, r2),
        ratio_residual(a, b, r1, r2),
    ))
}

/// P-representation bound expressions at a given squeezing.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PRepBounds {
    /// Bound on `c1` from the q-quadrature block:
    /// `sqrt((a r1 - 1/2)(b r2 - 1/2) / (r1 r2))`.
    pub expr_q: f64,
    /// Bound on `c1` from the p-quadrature block:
    /// `sqrt((a/r1 - 1/2)(b/r2 - 1/2) r1 r2) / t`. At `t = 0` the p block
    /// imposes no bound on `c1`: positive infinity when both factors are
    /// nonnegative, zero (clamped) otherwise.
    pub expr_p: f64,
    /// A q-side radicand factor was negative and the expression was
    /// clamped to zero (the squeezing is infeasible on that side).
    pub clamped_q: bool,
    /// Same for the p side.
    pub clamped_p: bool,
}

/// Evaluates the two P-representation bound expressions at squeezing
/// `(r1, r2)`. A separable decomposition at this squeezing admits
/// `c1` up to `min(expr_q, expr_p)`; the optimum equalizes the two.
/// Radicand factors within round-off of zero are snapped to exact zero
/// before multiplication (see `SNAP_TOL`).
pub fn p_rep_bound_expressions(
    a: f64,
    b: f64,
    t: f64,
    squeeze: &SqueezeParams,
) -> Result<PRepBounds> {
    let t = standard_domain(a, b, t)?;
    let (r1, r2) = (squeeze.r1, squeeze.r2);
    let q1 = snap_zero(a * r1 - 0.5, a * r1);
    let q2 = snap_zero(b * r2 - 0.5, b * r2);
    let p1 = snap_zero(a / r1 - 0.5, a / r1);
    let p2 = snap_zero(b / r2 - 0.5, b / r2);

    let (expr_q, clamped_q) = if q1 < 0.0 || q2 < 0.0 {
        (0.0, true)
    } else {
        ((q1 * q2 / (r1 * r2)).sqrt(), false)
    };
    let (expr_p, clamped_p) = if p1 < 0.0 || p2 < 0.0 {
        (0.0, true)
    } else if t == 0.0 {
        (f64::INFINITY, false)
    } else {
        ((p1 * p2 * r1 * r2).sqrt() / t, false)
    };
    Ok(PRepBounds {
        expr_q,
        expr_p,
        clamped_q,
        clamped_p,
    })
}

/// Simon determinant margin
/// `4(ab - c1^2)(ab - c2^2) - (a^2 + b^2) - 2|c1 c2| + 1/4`.
/// Nonnegative exactly where the PPT condition holds for physically
/// admissible parameters; see [`ppt_full`] for the eigenvalue ground truth.
pub fn simon_det_margin(sf: &StandardForm) -> f64 {
    let (a, b, c1, c2) = (sf.a(), sf.b(), sf.c1(), sf.c2());
    let ab = a * b;
    4.0 * (ab - c1 * c1) * (ab - c2 * c2) - (a * a + b * b) - 2.0 * (c1 * c2).abs() + 0.25
}

/// Determinant of the uncertainty form `V + (i/2) diag(J, +/-J)` as a real
/// number. A nonnegative determinant does *not* imply the matrix is PSD
/// (eigenvalues can go negative in pairs); [`ppt_full`] is the reliable
/// check, and the oracle's counterexample search exhibits the gap.
pub fn ppt_det(v: &CovarianceMatrix, sign: Sign) -> f64 {
    v.uncertainty_matrix(sign).det()
}

/// Full PPT check: PSD margin of the partially transposed state's
/// uncertainty form. For two-mode Gaussian states `is_psd` here is
/// equivalent to separability.
pub fn ppt_full(v: &CovarianceMatrix, tol: f64) -> Result<PsdMargin> {
    v.partial_transpose().is_physical(tol)
}

fn dot2(x: &[f64; 2], y: &[f64; 2]) -> f64 {
    x[0] * y[0] + x[1] * y[1]
}

fn matv2(m: &Mat2, x: &[f64; 2]) -> [f64; 2] {
    [
        m[0][0] * x[0] + m[0][1] * x[1],
        m[1][0] * x[0] + m[1][1] * x[1],
    ]
}

/// `x^T M y`.
fn quad2(m: &Mat2, x: &[f64; 2], y: &[f64; 2]) -> f64 {
    dot2(x, &matv2(m, y))
}

/// `J x` with `J = [[0, 1], [-1, 0]]`.
fn j_apply(x: &[f64; 2]) -> [f64; 2] {
    [x[1], -x[0]]
}

/// `J^T x`.
#[cfg(test)]
fn jt_apply(x: &[f64; 2]) -> [f64; 2] {
    [-x[1], x[0]]
}

/// Pointwise uncertainty margin over real probe vectors `(d, f, g, h)`:
///
/// ```text
/// d'Ad + f'Bf + 2 d'Cf + g'Ag + h'Bh +/- 2 g'Ch - |d'Jg| - |f'Jh|
/// ```
///
/// where `A, B, C` are the blocks of `v` and the sign selects the relative
/// orientation of the two probe pairs. Nonnegativity over all vectors of
/// one sign instance is the physicality condition; over the other, the PPT
/// condition. A negative value is an explicit entanglement (or
/// unphysicality) witness.
pub fn quadratic_form_margin(
    v: &CovarianceMatrix,
    d: &[f64; 2],
    f: &[f64; 2],
    g: &[f64; 2],
    h: &[f64; 2],
    sign: Sign,
) -> f64 {
    let a = v.block_a();
    let b = v.block_b();
    let c = v.block_c();
    quad2(&a, d, d)
        + quad2(&b, f, f)
        + 2.0 * quad2(&c, d, f)
        + quad2(&a, g, g)
        + quad2(&b, h, h)
        + sign.factor() * 2.0 * quad2(&c, g, h)
        - dot2(d, &j_apply(g)).abs()
        - dot2(f, &j_apply(h)).abs()
}

/// Two-probe specialization of [`quadratic_form_margin`] obtained by the
/// substitution `g = J^T d`, `h = +/- J^T f`:
///
/// ```text
/// d'Ad + f'Bf + 2 d'Cf + d'JAJ'd + f'JBJ'f +/- 2 d'JCJ'f - (d'd + f'f)
/// ```
///
/// A weaker condition than the four-probe form (it scans a submanifold of
/// probes), but already strong enough to witness many entangled states.
pub fn weaker_condition_margin(
    v: &CovarianceMatrix,
    d: &[f64; 2],
    f: &[f64; 2],
    sign: Sign,
) -> f64 {
    let j = crate::gaussian::j_block();
    let jt = transpose2(&j);
    let conj = |m: &Mat2| mul2(&mul2(&j, m), &jt);
    let a = v.block_a();
    let b = v.block_b();
    let c = v.block_c();
    quad2(&a, d, d)
        + quad2(&b, f, f)
        + 2.0 * quad2(&c, d, f)
        + quad2(&conj(&a), d, d)
        + quad2(&conj(&b), f, f)
        + sign.factor() * 2.0 * quad2(&conj(&c), d, f)
        - (dot2(d, d) + dot2(f, f))
}

/// DGCZ variance-sum margin in standard form:
/// `sqrt((2a - 1)(2b - 1)) - (|c1| + |c2|)`. Nonnegative for every
/// separable state; strictly weaker than the explicit bound except at
/// `t = 1`.
pub fn dgcz_standard_margin(sf: &StandardForm) -> Result<f64> {
    let t = sf.t().unwrap_or(0.0);
    let _ = standard_domain(sf.a(), sf.b(), t)?;
    let f1 = snap_zero(2.0 * sf.a() - 1.0, 2.0 * sf.a()).max(0.0);
    let f2 = snap_zero(2.0 * sf.b() - 1.0, 2.0 * sf.b()).max(0.0);
    Ok((f1 * f2).sqrt() - (sf.c1().abs() + sf.c2().abs()))
}

/// The bound on `c1` implied by the DGCZ standard-form criterion:
/// `sqrt((2a - 1)(2b - 1)) / (1 + t)`. Always at least [`explicit_bound`],
/// with equality exactly at `t = 1`.
pub fn dgcz_standard_bound(a: f64, b: f64, t: f64) -> Result<f64> {
    let t = standard_domain(a, b, t)?;
    let f1 = snap_zero(2.0 * a - 1.0, 2.0 * a).max(0.0);
    let f2 = snap_zero(2.0 * b - 1.0, 2.0 * b).max(0.0);
    Ok((f1 * f2).sqrt() / (1.0 + t))
}

/// A DGCZ-type margin together with a flag recording whether any radicand
/// had to be clamped at zero (which makes the value a conservative
/// substitute, not the printed formula).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DgczMargin {
    pub value: f64,
    pub clamped: bool,
}

fn clamped_radical(x: f64, y: f64, clamped: &mut bool) -> f64 {
    if x < 0.0 || y < 0.0 {
        *clamped = true;
        0.0
    } else {
        (x * y).sqrt()
    }
}

/// DGCZ margin evaluated after local squeezing by `(r1, r2)`:
///
/// ```text
/// sqrt((a r1 - 1/2)(b r2 - 1/2)) + sqrt((a/r1 - 1/2)(b/r2 - 1/2))
///   - (sqrt(r1 r2) |c1| + |c2| / sqrt(r1 r2))
/// ```
///
/// At the optimal squeezing of a boundary state both radical terms equal
/// the corresponding correlation terms and the margin vanishes.
pub fn dgcz_squeezed_margin(sf: &StandardForm, squeeze: &SqueezeParams) -> DgczMargin {
    let (a, b) = (sf.a(), sf.b());
    let (r1, r2) = (squeeze.r1, squeeze.r2);
    let mut clamped = false;
    let q = clamped_radical(
        snap_zero(a * r1 - 0.5, a * r1),
        snap_zero(b * r2 - 0.5, b * r2),
        &mut clamped,
    );
    let p = clamped_radical(
        snap_zero(a / r1 - 0.5, a / r1),
        snap_zero(b / r2 - 0.5, b / r2),
        &mut clamped,
    );
    let root = (r1 * r2).sqrt();
    DgczMargin {
        value: q + p - (root * sf.c1().abs() + sf.c2().abs() / root),
        clamped,
    }
}

/// Difference of the two squeezed-margin brackets:
///
/// ```text
/// [sqrt((a r1 - 1/2)(b r2 - 1/2)) - sqrt(r1 r2) |c1|]
///   - [sqrt((a/r1 - 1/2)(b/r2 - 1/2)) - |c2| / sqrt(r1 r2)]
/// ```
///
/// Zero when both sides of the squeezed criterion are equally tight, as
/// they are at the optimal squeezing of a boundary state. `(r1, r2)` are
/// treated as independent inputs; no relation between them is assumed.
pub fn dgcz_extra_residual(sf: &StandardForm, squeeze: &SqueezeParams) -> DgczMargin {
    let (a, b) = (sf.a(), sf.b());
    let (r1, r2) = (squeeze.r1, squeeze.r2);
    let mut clamped = false;
    let q = clamped_radical(
        snap_zero(a * r1 - 0.5, a * r1),
        snap_zero(b * r2 - 0.5, b * r2),
        &mut clamped,
    );
    let p = clamped_radical(
        snap_zero(a / r1 - 0.5, a / r1),
        snap_zero(b / r2 - 0.5, b / r2),
        &mut clamped,
    );
    let root = (r1 * r2).sqrt();
    DgczMargin {
        value: (q - root * sf.c1().abs()) - (p - sf.c2().abs() / root),
        clamped,
    }
}

/// Classification of a covariance matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Separable,
    Entangled,
    Unphysical,
    /// The PPT margin sits inside the tolerance band around zero; the state
    /// is on (or numerically indistinguishable from) the separability
    /// boundary.
    Boundary,
}

/// Everything the criteria have to say about one physical state.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CriteriaReport {
    pub standard_form: StandardForm,
    /// `t = |c2| / c1`, taken as 0 when the cross block vanishes.
    pub t_effective: f64,
    pub simon_det_margin: f64,
    pub explicit_bound: ExplicitBound,
    pub optimal_squeeze: OptimalSqueeze,
    /// DGCZ margin of the standard form itself.
    pub dgcz_margin: f64,
    /// DGCZ margin after the optimal squeezing.
    pub dgcz_squeezed_margin: DgczMargin,
    /// PSD margin of `V' - I/2` for the optimally squeezed standard form:
    /// nonnegative exactly when that state admits a Gaussian
    /// P-representation, which certifies separability.
    pub p_rep_after_optimal_squeeze: PsdMargin,
}

/// Aggregate separability report. `criteria` is present exactly when the
/// state is physical; the verdict itself comes from the PPT eigenvalues
/// (ground truth), and the remaining margins must agree with it outside the
/// boundary band.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeparabilityReport {
    pub physical: PsdMargin,
    pub ppt_full: PsdMargin,
    pub verdict: Verdict,
    /// Relative tolerance used for every positivity decision in this report.
    pub tol: f64,
    pub criteria: Option<CriteriaReport>,
}

/// Runs the full criteria stack on a covariance matrix.
///
/// Unphysical inputs get verdict `Unphysical` and no criteria report.
/// Physical inputs are reduced to standard form and every margin is
/// evaluated; the verdict is `Boundary` when the PPT margin is within the
/// tolerance band of zero, otherwise `Separable`/`Entangled` per its sign.
pub fn separability_verdict(v: &CovarianceMatrix, tol: f64) -> Result<SeparabilityReport> {
    let physical = v.is_physical(tol)?;
    let ppt = ppt_full(v, tol)?;
    if !physical.is_psd {
        return Ok(SeparabilityReport {
            physical,
            ppt_full: ppt,
            verdict: Verdict::Unphysical,
            tol,
            criteria: None,
        });
    }
    let verdict = if ppt.in_boundary_band(tol) {
        Verdict::Boundary
    } else if ppt.is_psd {
        Verdict::Separable
    } else {
        Verdict::Entangled
    };
    let (sf, _) = v.to_standard_form(tol)?;
    let t = sf.t().unwrap_or(0.0);
    let explicit = explicit_bound(sf.a(), sf.b(), t)?;
    let optimal = optimal_squeezing(sf.a(), sf.b(), t)?;
    let squeezed = sf
        .to_matrix()
        .apply_symplectic(&optimal.params().to_symplectic());
    Ok(SeparabilityReport {
        physical,
        ppt_full: ppt,
        verdict,
        tol,
        criteria: Some(CriteriaReport {
            standard_form: sf,
            t_effective: t,
            simon_det_margin: simon_det_margin(&sf),
            explicit_bound: explicit,
            optimal_squeeze: optimal,
            dgcz_margin: dgcz_standard_margin(&sf)?,
            dgcz_squeezed_margin: dgcz_squeezed_margin(&sf, &optimal.params()),
            p_rep_after_optimal_squeeze: squeezed.p_condition(tol)?,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smallmat::{Mat4, TOL_PSD};

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() <= tol,
            "got {got}, want {want} (tol {tol})"
        );
    }

    fn sf(a: f64, b: f64, c1: f64, c2: f64) -> StandardForm {
        StandardForm::new(a, b, c1, c2).unwrap()
    }

    #[test]
    fn d_polynomial_values() {
        assert_close(d_polynomial(1.0, 1.0, 1.0).unwrap(), 4.0, 1e-15);
        assert_close(
            d_polynomial(1.3, 0.8, 0.0).unwrap(),
            1.3 * 1.3 * 0.8 * 0.8,
            1e-15,
        );
        let t: f64 = 0.3;
        assert_close(
            d_polynomial(0.5, 0.5, t).unwrap(),
            (1.0 + t).powi(4) / 16.0,
            1e-15,
        );
    }

    #[test]
    fn d_polynomial_domain() {
        assert!(d_polynomial(0.4, 1.0, 0.5).is_err());
        assert!(d_polynomial(1.0, 1.0, 1.2).is_err());
        assert!(d_polynomial(1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn explicit_bound_values() {
        assert_close(explicit_bound(1.0, 1.0, 1.0).unwrap().c1_max, 0.5, 1e-12);
        assert_close(
            explicit_bound(1.0, 1.0, 0.5).unwrap().c1_max,
            0.6339746,
            1e-7,
        );
        assert_close(explicit_bound(1.0, 1.0, 0.0).unwrap().c1_max, 0.75, 1e-12);
        // a at the vacuum limit admits no correlation at all.
        assert_eq!(explicit_bound(0.5, 2.0, 0.7).unwrap().c1_max, 0.0);
    }

    #[test]
    fn explicit_bound_matches_naive_form() {
        // Away from t = 0 the cancellation-prone textbook expression agrees.
        let (a, b, t) = (1.7, 0.9, 0.6);
        let bound = explicit_bound(a, b, t).unwrap();
        let d = d_polynomial(a, b, t).unwrap();
        let naive = (2.0 * a * b * (1.0 + t * t) + t - 2.0 * d.sqrt()).sqrt() / (2.0 * t);
        assert_close(bound.c1_max, naive, 1e-12);
        assert_close(bound.sqrt_d, d.sqrt(), 1e-15);
        assert_close(
            bound.numerator,
            2.0 * a * b * (1.0 + t * t) + t - 2.0 * d.sqrt(),
            1e-12,
        );
    }

    #[test]
    fn optimal_squeezing_values() {
        let opt = optimal_squeezing(1.0, 1.0, 0.5).unwrap();
        assert_close(opt.r1, 1.3660254, 1e-7);
        assert_close(opt.r2, 1.3660254, 1e-7);
        assert!(opt.residual_balance.abs() <= 1e-10);
        assert!(opt.residual_ratio.abs() <= 1e-10);

        let corner = optimal_squeezing(1.2, 0.7, 0.0).unwrap();
        assert_close(corner.r1, 2.4, 1e-12);
        assert_close(corner.r2, 1.4, 1e-12);
        assert!(corner.residual_balance.abs() <= 1e-12);

        // r1 pins to 1 exactly on the a = 1/2 edge and at t = 1.
        assert_close(optimal_squeezing(0.5, 1.0, 0.4).unwrap().r1, 1.0, 1e-12);
        let unit = optimal_squeezing(1.5, 0.8, 1.0).unwrap();
        assert_close(unit.r1, 1.0, 1e-12);
        assert_close(unit.r2, 1.0, 1e-12);
    }

    #[test]
    fn boundary_residuals_at_unit_squeeze() {
        let squeeze = SqueezeParams::new(1.0, 1.0).unwrap();
        let (balance, ratio) = boundary_residuals(1.0, 1.0, 0.5, &squeeze).unwrap();
        assert_close(balance, -0.75, 1e-15);
        assert_close(ratio, 0.0, 1e-15);
        assert!(boundary_residuals(1.0, 1.0, 0.0, &squeeze).is_err());
    }

    #[test]
    fn p_rep_expression_values() {
        let unit = SqueezeParams::new(1.0, 1.0).unwrap();
        let bounds = p_rep_bound_expressions(1.0, 1.0, 0.5, &unit).unwrap();
        assert_close(bounds.expr_q, 0.5, 1e-15);
        assert_close(bounds.expr_p, 1.0, 1e-15);
        assert!(!bounds.clamped_q && !bounds.clamped_p);

        // r = (2a, 2b) zeroes the p radicand exactly: bound 0 for t > 0,
        // unconstrained at t = 0.
        let full = SqueezeParams::new(2.0, 2.0).unwrap();
        let at_half = p_rep_bound_expressions(1.0, 1.0, 0.5, &full).unwrap();
        assert_eq!(at_half.expr_p, 0.0);
        assert!(!at_half.clamped_p);
        let at_zero = p_rep_bound_expressions(1.0, 1.0, 0.0, &full).unwrap();
        assert_eq!(at_zero.expr_p, f64::INFINITY);
        assert_close(at_zero.expr_q, 0.75, 1e-12);

        // Past the feasible range the p side clamps.
        let over = SqueezeParams::new(3.0, 3.0).unwrap();
        let clamped = p_rep_bound_expressions(1.0, 1.0, 0.0, &over).unwrap();
        assert_eq!(clamped.expr_p, 0.0);
        assert!(clamped.clamped_p);
    }

    #[test]
    fn triple_equality_at_optimum() {
        let opt = optimal_squeezing(1.0, 1.0, 0.5).unwrap();
        let bounds = p_rep_bound_expressions(1.0, 1.0, 0.5, &opt.params()).unwrap();
        let c1_max = explicit_bound(1.0, 1.0, 0.5).unwrap().c1_max;
        assert_close(bounds.expr_q, bounds.expr_p, 1e-9);
        assert_close(bounds.expr_q, c1_max, 1e-9);
    }

    #[test]
    fn simon_margin_values() {
        assert_close(simon_det_margin(&sf(1.0, 1.0, 0.0, 0.0)), 2.25, 1e-15);
        assert_close(simon_det_margin(&sf(1.0, 1.0, 0.75, 0.0)), 0.0, 1e-15);
        assert_close(simon_det_margin(&sf(0.5, 0.5, 0.0, 0.0)), 0.0, 1e-15);
    }

    #[test]
    fn simon_margin_is_scaled_uncertainty_det() {
        // 4 det[V + (i/2) diag(J, eJ)] with e the sign of c1 c2 reproduces
        // the margin, tying the algebraic form to the determinant it came
        // from.
        for (c1, c2, sign) in [(0.5, -0.3, Sign::Minus), (0.4, 0.2, Sign::Plus)] {
            let form = sf(1.1, 0.9, c1, c2);
            let det = ppt_det(&form.to_matrix(), sign);
            assert_close(simon_det_margin(&form), 4.0 * det, 1e-12);
        }
    }

    #[test]
    fn ppt_det_values() {
        let vac = CovarianceMatrix::vacuum();
        assert_close(ppt_det(&vac, Sign::Plus), 0.0, 1e-14);
        let one = CovarianceMatrix::new(Mat4::identity()).unwrap();
        assert_close(ppt_det(&one, Sign::Plus), 9.0 / 16.0, 1e-14);
        assert_close(ppt_det(&one, Sign::Minus), 9.0 / 16.0, 1e-14);
    }

    #[test]
    fn ppt_full_cases() {
        let one = CovarianceMatrix::new(Mat4::identity()).unwrap();
        assert!(ppt_full(&one, TOL_PSD).unwrap().is_psd);

        let tmsv = CovarianceMatrix::two_mode_squeezed_vacuum(0.5);
        let margin = ppt_full(&tmsv, TOL_PSD).unwrap();
        assert!(!margin.is_psd);
        assert!(margin.min_eigenvalue < -0.1);

        // (1, 1, 0.5, -0.5) sits exactly on the separability boundary.
        let edge = CovarianceMatrix::from_standard_params(1.0, 1.0, 0.5, -0.5).unwrap();
        let margin = ppt_full(&edge, TOL_PSD).unwrap();
        assert!(margin.is_psd);
        assert!(margin.in_boundary_band(TOL_PSD));
    }

    #[test]
    fn quadratic_form_witnesses() {
        let one = CovarianceMatrix::new(Mat4::identity()).unwrap();
        let zero = [0.0, 0.0];
        let margin =
            quadratic_form_margin(&one, &[1.0, 0.0], &zero, &[0.0, 1.0], &zero, Sign::Plus);
        assert_close(margin, 1.0, 1e-15);

        // EPR-adapted probes witness two-mode squeezed vacuum entanglement:
        // margin = (s^2 + u^2) e^{-2r} - 2 s u < 0 at s = u.
        let tmsv = CovarianceMatrix::two_mode_squeezed_vacuum(0.5);
        let s = 0.5;
        let margin = quadratic_form_margin(
            &tmsv,
            &[s, 0.0],
            &[-s, 0.0],
            &[0.0, s],
            &[0.0, s],
            Sign::Plus,
        );
        assert_close(margin, 2.0 * s * s * ((-1.0f64).exp() - 1.0), 1e-12);
        assert!(margin < 0.0);
    }

    #[test]
    fn weaker_condition_matches_substitution() {
        let base = CovarianceMatrix::from_standard_params(1.1, 0.9, 0.3, -0.2).unwrap();
        let v = base.apply_symplectic(&crate::gaussian::LocalSymplectic::rotation(0.3, -0.7));
        let d = [0.3, -0.7];
        let f = [0.5, 0.2];
        for sign in [Sign::Plus, Sign::Minus] {
            let got = weaker_condition_margin(&v, &d, &f, sign);
            let g = jt_apply(&d);
            let mut h = jt_apply(&f);
            h = [sign.factor() * h[0], sign.factor() * h[1]];
            let want = quadratic_form_margin(&v, &d, &f, &g, &h, Sign::Plus);
            assert_close(got, want, 1e-12);
        }
        // V = I with a unit probe on one side: 1 + 1 - 1.
        let one = CovarianceMatrix::new(Mat4::identity()).unwrap();
        assert_close(
            weaker_condition_margin(&one, &[1.0, 0.0], &[0.0, 0.0], Sign::Plus),
            1.0,
            1e-15,
        );
    }

    #[test]
    fn dgcz_margin_values() {
        assert_close(
            dgcz_standard_margin(&sf(1.0, 1.0, 0.0, 0.0)).unwrap(),
            1.0,
            1e-15,
        );
        assert_close(
            dgcz_standard_margin(&sf(1.0, 1.0, 2.0 / 3.0, 1.0 / 3.0)).unwrap(),
            0.0,
            1e-15,
        );
        assert!(dgcz_standard_margin(&sf(0.4, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn dgcz_bound_meets_explicit_bound_at_t1() {
        let (a, b) = (1.4, 2.2);
        let dgcz = dgcz_standard_bound(a, b, 1.0).unwrap();
        let explicit = explicit_bound(a, b, 1.0).unwrap().c1_max;
        assert_close(dgcz, explicit, 1e-12);
        // And it majorizes strictly away from t = 1.
        assert!(
            dgcz_standard_bound(a, b, 0.3).unwrap() > explicit_bound(a, b, 0.3).unwrap().c1_max
        );
    }

    #[test]
    fn dgcz_squeezed_values() {
        let unit = SqueezeParams::new(1.0, 1.0).unwrap();
        let form = sf(1.0, 1.0, 0.3, 0.15);
        let margin = dgcz_squeezed_margin(&form, &unit);
        assert_close(margin.value, 0.55, 1e-15);
        assert!(!margin.clamped);
        let extra = dgcz_extra_residual(&form, &unit);
        assert_close(extra.value, -0.15, 1e-15);
        assert!(!extra.clamped);

        // Vacuum boundary: everything zero.
        let vac = dgcz_squeezed_margin(&sf(0.5, 0.5, 0.0, 0.0), &unit);
        assert_close(vac.value, 0.0, 1e-15);
    }

    #[test]
    fn dgcz_squeezed_vanishes_on_boundary_state() {
        let (a, b, t) = (1.0, 1.0, 0.5);
        let c1 = explicit_bound(a, b, t).unwrap().c1_max;
        let form = sf(a, b, c1, t * c1);
        let opt = optimal_squeezing(a, b, t).unwrap();
        let margin = dgcz_squeezed_margin(&form, &opt.params());
        assert_close(margin.value, 0.0, 1e-9);
        let extra = dgcz_extra_residual(&form, &opt.params());
        assert_close(extra.value, 0.0, 1e-9);
    }

    #[test]
    fn verdict_separable_identity() {
        let one = CovarianceMatrix::new(Mat4::identity()).unwrap();
        let report = separability_verdict(&one, TOL_PSD).unwrap();
        assert_eq!(report.verdict, Verdict::Separable);
        let criteria = report.criteria.unwrap();
        assert!(criteria.simon_det_margin > 0.0);
        assert!(criteria.dgcz_margin > 0.0);
        assert!(criteria.p_rep_after_optimal_squeeze.is_psd);
        assert_eq!(criteria.t_effective, 0.0);
    }

    #[test]
    fn verdict_entangled_squeezed_vacuum() {
        let tmsv = CovarianceMatrix::two_mode_squeezed_vacuum(0.5);
        let report = separability_verdict(&tmsv, TOL_PSD).unwrap();
        assert_eq!(report.verdict, Verdict::Entangled);
        let criteria = report.criteria.unwrap();
        assert!(!criteria.p_rep_after_optimal_squeeze.is_psd);
        assert!(criteria.simon_det_margin < 0.0);
        assert!(criteria.standard_form.c1() > criteria.explicit_bound.c1_max);
    }

    #[test]
    fn verdict_unphysical_has_no_criteria() {
        let v = CovarianceMatrix::new(Mat4::identity().scale(0.25)).unwrap();
        let report = separability_verdict(&v, TOL_PSD).unwrap();
        assert_eq!(report.verdict, Verdict::Unphysical);
        assert!(report.criteria.is_none());
    }

    #[test]
    fn verdict_boundary_state() {
        let edge = CovarianceMatrix::from_standard_params(1.0, 1.0, 0.5, -0.5).unwrap();
        let report = separability_verdict(&edge, TOL_PSD).unwrap();
        assert_eq!(report.verdict, Verdict::Boundary);
    }

    #[test]
    fn verdict_uncorrelated_product_state() {
        let v = CovarianceMatrix::from_standard_params(0.7, 2.0, 0.0, 0.0).unwrap();
        let report = separability_verdict(&v, TOL_PSD).unwrap();
        assert_eq!(report.verdict, Verdict::Separable);
        let criteria = report.criteria.unwrap();
        assert_eq!(criteria.t_effective, 0.0);
        assert_eq!(criteria.standard_form.c1(), 0.0);
    }
}

//! Left and right sides of the Hadamard-type inequalities.
//!
//! Notation used throughout: `f_a = f(a)`, `f_b = f(b)`, `f_am = f(a/m)`,
//! `f_bm = f(b/m)`, and the ratios
//!
//! ```text
//! φ = f_a / f_bm^m        ℓ = f_b / f_am^m        θ = φ·ℓ
//! ```
//!
//! Products and powers of function values are formed from their logarithms
//! so `f(b/m)^m` never overflows on its own.
//!
//! | bound | left side | right side |
//! |-------|-----------|------------|
//! | [`bound_eq4`]  | `(1/(b−a))∫f` | `min{L(f_a, f_bm^m), L(f_b, f_am^m)}` |
//! | [`bound_eq11_pair`] | `f((a+b)/2)` | `(1/(b−a))∫G(f(x), f((a+b−x)/m)^m)` |
//! | [`bound_eq22_pair`] | `(1/(b−a))∫G(f(x), f(a+b−x))` | printed: `L(f_a f_b, (f_am f_bm)^m)`; corrected: `L(√(f_a f_b), (f_am f_bm)^(m/2))` |
//! | [`bound_eq31`] | `(1/(b−a))∫f` | `min{f_bm^m·M(α), f_am^m·T(α)}` |
//! | [`bound_eq42`] | as eq22 | printed: `(f_am f_bm)^m·S(θ)`; corrected: `(f_am f_bm)^(m/2)·S(√θ)` |

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{ClassParams, ClassifyError};
use crate::funcspec::{EvalError, FunctionExpr};
use crate::means::{arithmetic_mean, geometric_mean, logarithmic_mean, logarithmic_mean_ln, MeanError};
use crate::quadrature::{mean_of, Interval, QuadError, QuadResult};

/// Ratios within this relative distance of 1 take the `ratio = 1` branch.
pub const RATIO_ONE_REL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error(transparent)]
    Params(#[from] ClassifyError),
    #[error("ratio {0} must be finite and > 0")]
    InvalidRatio(f64),
    #[error("alpha {0} outside (0, 1]")]
    InvalidAlpha(f64),
}

/// Which right-hand side to use for the square-root bounds (eq22, eq42).
///
/// `Printed` is the bound with exponents `t` and `m(1−t)`; `Corrected`
/// carries the halved exponents `t/2` and `m(1−t)/2` that the pointwise
/// geometric-mean step actually produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Printed,
    #[default]
    Corrected,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Printed => "printed",
            Variant::Corrected => "corrected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InapplicableReason {
    RatioAboveOne,
    HypothesisUnchecked,
}

/// One side of an inequality. Closed-form sides have `err_est = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundSide {
    Applicable { value: f64, err_est: f64 },
    Inapplicable(InapplicableReason),
}

impl BoundSide {
    pub fn exact(value: f64) -> Self {
        BoundSide::Applicable { value, err_est: 0.0 }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            BoundSide::Applicable { value, .. } => Some(value),
            BoundSide::Inapplicable(_) => None,
        }
    }

    pub fn err_est(&self) -> f64 {
        match *self {
            BoundSide::Applicable { err_est, .. } => err_est,
            BoundSide::Inapplicable(_) => 0.0,
        }
    }

    pub fn is_applicable(&self) -> bool {
        matches!(self, BoundSide::Applicable { .. })
    }

    fn scale(self, factor: f64) -> Self {
        match self {
            BoundSide::Applicable { value, err_est } => {
                BoundSide::Applicable { value: value * factor, err_est: err_est * factor }
            }
            other => other,
        }
    }

    /// Minimum over applicable sides; inapplicable if none is.
    fn min_of(sides: &[BoundSide]) -> BoundSide {
        sides
            .iter()
            .filter_map(|s| s.value().map(|v| (v, *s)))
            .fold(None, |best: Option<(f64, BoundSide)>, (v, s)| match best {
                Some((bv, _)) if bv <= v => best,
                _ => Some((v, s)),
            })
            .map(|(_, s)| s)
            .unwrap_or(BoundSide::Inapplicable(InapplicableReason::RatioAboveOne))
    }
}

/// `φ`, `ℓ`, `θ` for a function, an interval and `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSet {
    pub phi: f64,
    pub ell: f64,
    pub theta: f64,
}

/// Logs of the four anchor values every closed-form side is built from.
#[derive(Debug, Clone, Copy)]
struct Anchors {
    ln_fa: f64,
    ln_fb: f64,
    ln_fam: f64,
    ln_fbm: f64,
    m: f64,
}

impl Anchors {
    fn new(f: &FunctionExpr, iv: Interval, m: f64) -> Result<Self, BoundsError> {
        let (a, b) = (iv.a(), iv.b());
        Ok(Anchors {
            ln_fa: f.ln_evaluate(a)?,
            ln_fb: f.ln_evaluate(b)?,
            ln_fam: f.ln_evaluate(a / m)?,
            ln_fbm: f.ln_evaluate(b / m)?,
            m,
        })
    }

    fn ln_phi(&self) -> f64 {
        self.ln_fa - self.m * self.ln_fbm
    }

    fn ln_ell(&self) -> f64 {
        self.ln_fb - self.m * self.ln_fam
    }

    fn ln_theta(&self) -> f64 {
        self.ln_phi() + self.ln_ell()
    }
}

fn check_m(m: f64) -> Result<f64, BoundsError> {
    Ok(ClassParams::new(1.0, m)?.m())
}

/// Computes `φ = f(a)/f(b/m)^m`, `ℓ = f(b)/f(a/m)^m` and `θ = φ·ℓ`.
pub fn ratio_set(f: &FunctionExpr, iv: Interval, m: f64) -> Result<RatioSet, BoundsError> {
    let anchors = Anchors::new(f, iv, check_m(m)?)?;
    Ok(RatioSet {
        phi: anchors.ln_phi().exp(),
        ell: anchors.ln_ell().exp(),
        theta: anchors.ln_theta().exp(),
    })
}

/// The factor `∫₀¹ r^(αt) dt`, i.e. `1` at `r = 1` and
/// `(r^α − 1)/(α ln r)` for `0 < r < 1`.
///
/// This single kernel gives `M(α)` (with `r = φ`), `T(α)` (with `r = ℓ`) and
/// `S(α)` (with `r = θ`, or `√θ` for the corrected eq42). Ratios above 1
/// are outside the case split and come back inapplicable.
pub fn exp_mean_factor(r: f64, alpha: f64) -> Result<BoundSide, BoundsError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(BoundsError::InvalidRatio(r));
    }
    check_alpha(alpha)?;
    if (r - 1.0).abs() <= RATIO_ONE_REL {
        return Ok(BoundSide::exact(1.0));
    }
    Ok(exp_mean_factor_ln(r.ln(), alpha))
}

fn check_alpha(alpha: f64) -> Result<(), BoundsError> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(BoundsError::InvalidAlpha(alpha))
    }
}

/// [`exp_mean_factor`] from `ln r`.
fn exp_mean_factor_ln(ln_r: f64, alpha: f64) -> BoundSide {
    if ln_r.abs() <= RATIO_ONE_REL {
        return BoundSide::exact(1.0);
    }
    if ln_r > 0.0 {
        return BoundSide::Inapplicable(InapplicableReason::RatioAboveOne);
    }
    let s = alpha * ln_r;
    BoundSide::exact(s.exp_m1() / s)
}

/// Left side from quadrature, right side in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralBound {
    pub lhs: QuadResult,
    pub rhs: BoundSide,
}

/// Pointwise value at the left, integral on the right (eq11).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointBound {
    pub lhs: f64,
    pub rhs: QuadResult,
}

/// An [`IntegralBound`] whose right side is a minimum of two branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchBound {
    pub lhs: QuadResult,
    pub rhs: BoundSide,
    pub branches: [BoundSide; 2],
}

/// `√(u·v^m)` from `ln u` and `ln v`.
#[inline]
fn half_log_product(ln_u: f64, m: f64, ln_v: f64) -> f64 {
    (0.5 * (ln_u + m * ln_v)).exp()
}

/// `(1/(b−a))∫ₐᵇ G(f(x), f(a+b−x)) dx`.
fn mean_reflected_g(f: &FunctionExpr, iv: Interval, tol: f64) -> Result<QuadResult, BoundsError> {
    reflected_integral(f, iv, 1.0, tol)
}

/// `(1/(b−a))∫ₐᵇ √(f(x)·f((a+b−x)/m)^m) dx`.
fn reflected_integral(f: &FunctionExpr, iv: Interval, m: f64, tol: f64) -> Result<QuadResult, BoundsError> {
    let s = iv.a() + iv.b();
    let g = |x: f64| -> Result<f64, EvalError> {
        let ln_u = f.ln_evaluate(x)?;
        let ln_v = f.ln_evaluate((s - x) / m)?;
        Ok(half_log_product(ln_u, m, ln_v))
    };
    Ok(mean_of(g, iv, tol)?)
}

/// Mean-integral bound by logarithmic means of the endpoint/reflected values.
pub fn bound_eq4(f: &FunctionExpr, iv: Interval, m: f64, tol: f64) -> Result<BranchBound, BoundsError> {
    let m = check_m(m)?;
    let an = Anchors::new(f, iv, m)?;
    let lhs = mean_of(|x| f.evaluate(x), iv, tol)?;
    let first = BoundSide::exact(logarithmic_mean_ln(an.ln_fa, m * an.ln_fbm)?);
    let second = BoundSide::exact(logarithmic_mean_ln(an.ln_fb, m * an.ln_fam)?);
    Ok(BranchBound { lhs, rhs: BoundSide::min_of(&[first, second]), branches: [first, second] })
}

/// Midpoint value against the mean of `G(f(x), f((a+b−x)/m)^m)`.
pub fn bound_eq11_pair(f: &FunctionExpr, iv: Interval, m: f64, tol: f64) -> Result<PointBound, BoundsError> {
    let m = check_m(m)?;
    let lhs = f.evaluate(arithmetic_mean(iv.a(), iv.b()))?;
    let rhs = reflected_integral(f, iv, m, tol)?;
    Ok(PointBound { lhs, rhs })
}

/// Mean of `G(f(x), f(a+b−x))` against a logarithmic mean of products.
pub fn bound_eq22_pair(
    f: &FunctionExpr,
    iv: Interval,
    m: f64,
    tol: f64,
    variant: Variant,
) -> Result<IntegralBound, BoundsError> {
    let m = check_m(m)?;
    let an = Anchors::new(f, iv, m)?;
    let lhs = mean_reflected_g(f, iv, tol)?;
    let ln_top = an.ln_fa + an.ln_fb;
    let ln_bottom = m * (an.ln_fam + an.ln_fbm);
    let rhs = match variant {
        Variant::Printed => logarithmic_mean_ln(ln_top, ln_bottom)?,
        Variant::Corrected => logarithmic_mean_ln(0.5 * ln_top, 0.5 * ln_bottom)?,
    };
    Ok(IntegralBound { lhs, rhs: BoundSide::exact(rhs) })
}

/// Mean integral against `min{f(b/m)^m·M(α), f(a/m)^m·T(α)}`.
pub fn bound_eq31(f: &FunctionExpr, iv: Interval, params: ClassParams, tol: f64) -> Result<BranchBound, BoundsError> {
    let (alpha, m) = (params.alpha(), params.m());
    let an = Anchors::new(f, iv, m)?;
    let lhs = mean_of(|x| f.evaluate(x), iv, tol)?;
    let first = exp_mean_factor_ln(an.ln_phi(), alpha).scale((m * an.ln_fbm).exp());
    let second = exp_mean_factor_ln(an.ln_ell(), alpha).scale((m * an.ln_fam).exp());
    Ok(BranchBound { lhs, rhs: BoundSide::min_of(&[first, second]), branches: [first, second] })
}

/// Mean of `G(f(x), f(a+b−x))` against `(f(a/m)f(b/m))^m·S(α)` (printed) or
/// `(f(a/m)f(b/m))^(m/2)·S(α)` evaluated at `√θ` (corrected).
pub fn bound_eq42(
    f: &FunctionExpr,
    iv: Interval,
    params: ClassParams,
    tol: f64,
    variant: Variant,
) -> Result<IntegralBound, BoundsError> {
    let (alpha, m) = (params.alpha(), params.m());
    let an = Anchors::new(f, iv, m)?;
    let lhs = mean_reflected_g(f, iv, tol)?;
    let ln_bottom = m * (an.ln_fam + an.ln_fbm);
    let rhs = match variant {
        Variant::Printed => exp_mean_factor_ln(an.ln_theta(), alpha).scale(ln_bottom.exp()),
        Variant::Corrected => exp_mean_factor_ln(0.5 * an.ln_theta(), alpha).scale((0.5 * ln_bottom).exp()),
    };
    Ok(IntegralBound { lhs, rhs })
}

/// A labeled chain of values expected to be non-decreasing left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainValues {
    pub terms: Vec<ChainTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTerm {
    pub label: String,
    pub value: f64,
    pub err_est: f64,
}

impl ChainValues {
    fn push(&mut self, label: &str, value: f64, err_est: f64) {
        self.terms.push(ChainTerm { label: label.to_string(), value, err_est });
    }

    pub fn values(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.value).collect()
    }

    /// Smallest `next − previous` over consecutive terms.
    pub fn min_step(&self) -> f64 {
        self.terms.windows(2).map(|w| w[1].value - w[0].value).fold(f64::INFINITY, f64::min)
    }

    pub fn max_err_est(&self) -> f64 {
        self.terms.iter().map(|t| t.err_est).fold(0.0, f64::max)
    }
}

pub const DR1_LABELS: [&str; 3] = ["f(A(a,b))", "mean G(f(x),f(a+b-x))", "G(f(a),f(b))"];
pub const DR2_LABELS: [&str; 6] = [
    "f((a+b)/2)",
    "exp(mean ln f)",
    "mean G(f(x),f(a+b-x))",
    "mean f",
    "L(f(a),f(b))",
    "A(f(a),f(b))",
];

/// `f(A(a,b)) ≤ (1/(b−a))∫G(f(x),f(a+b−x)) ≤ G(f(a),f(b))`.
pub fn chain_dr1(f: &FunctionExpr, iv: Interval, tol: f64) -> Result<ChainValues, BoundsError> {
    let (fa, fb) = (f.evaluate(iv.a())?, f.evaluate(iv.b())?);
    let mid = f.evaluate(arithmetic_mean(iv.a(), iv.b()))?;
    let g = mean_reflected_g(f, iv, tol)?;
    let mut chain = ChainValues { terms: Vec::with_capacity(3) };
    chain.push(DR1_LABELS[0], mid, 0.0);
    chain.push(DR1_LABELS[1], g.value, g.err_est);
    chain.push(DR1_LABELS[2], geometric_mean(fa, fb), 0.0);
    Ok(chain)
}

/// The six-term chain from the midpoint value up to the arithmetic mean of
/// the endpoint values.
pub fn chain_dr2(f: &FunctionExpr, iv: Interval, tol: f64) -> Result<ChainValues, BoundsError> {
    let (fa, fb) = (f.evaluate(iv.a())?, f.evaluate(iv.b())?);
    let mid = f.evaluate(arithmetic_mean(iv.a(), iv.b()))?;
    let mean_ln = mean_of(|x| f.ln_evaluate(x), iv, tol)?;
    let geo = mean_ln.value.exp();
    let g = mean_reflected_g(f, iv, tol)?;
    let mean_f = mean_of(|x| f.evaluate(x), iv, tol)?;
    let mut chain = ChainValues { terms: Vec::with_capacity(6) };
    chain.push(DR2_LABELS[0], mid, 0.0);
    // d/ds e^s = e^s
    chain.push(DR2_LABELS[1], geo, geo * mean_ln.err_est);
    chain.push(DR2_LABELS[2], g.value, g.err_est);
    chain.push(DR2_LABELS[3], mean_f.value, mean_f.err_est);
    chain.push(DR2_LABELS[4], logarithmic_mean(fa, fb)?, 0.0);
    chain.push(DR2_LABELS[5], arithmetic_mean(fa, fb), 0.0);
    Ok(chain)
}

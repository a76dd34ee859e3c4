//! Adaptive Simpson quadrature.
//!
//! Every integral the verifier needs goes through [`integrate`]. A panel is
//! accepted when the two-half Simpson estimate differs from the whole-panel
//! estimate by at most `15·tol_local`; the accepted value carries the
//! Richardson correction `(S_fine − S_coarse)/15`, and `|S_fine − S_coarse|/15`
//! is added to the error estimate. The local tolerance is split in
//! proportion to panel length, so the sum of local tolerances never exceeds
//! the requested absolute tolerance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funcspec::{EvalError, FunctionExpr};

/// Maximum recursion depth of the panel bisection.
pub const MAX_DEPTH: u32 = 60;
/// Panels are always split at least this many times before acceptance.
pub const MIN_DEPTH: u32 = 3;
/// Smallest absolute tolerance accepted by [`integrate`].
pub const MIN_TOL: f64 = 1e-13;

/// An integration interval `[a, b]` with `0 ≤ a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid interval [{a}, {b}]: need finite 0 <= a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("tolerance {0} below the minimum {MIN_TOL}")]
    InvalidTolerance(f64),
    #[error("integrand failed at x = {x}: {source}")]
    Integrand {
        x: f64,
        #[source]
        source: EvalError,
    },
    #[error("integrand is not finite at x = {x} (value {value})")]
    NonFinite { x: f64, value: f64 },
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, QuadError> {
        if a.is_finite() && b.is_finite() && 0.0 <= a && a < b {
            Ok(Interval { a, b })
        } else {
            Err(QuadError::InvalidInterval { a, b })
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

/// Outcome of an integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    /// Accumulated Richardson error estimate.
    pub err_est: f64,
    /// Number of integrand evaluations.
    pub evals: usize,
    /// False when some panel hit [`MAX_DEPTH`] without meeting its local
    /// tolerance. Such panels contribute `|S_fine − S_coarse|` (not `/15`) to
    /// `err_est`.
    pub converged: bool,
}

impl QuadResult {
    fn scaled(self, factor: f64) -> Self {
        QuadResult { value: self.value * factor, err_est: self.err_est * factor.abs(), ..self }
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

struct Simpson<F> {
    g: F,
    value: f64,
    err_est: f64,
    evals: usize,
    converged: bool,
}

impl<F> Simpson<F>
where
    F: FnMut(f64) -> Result<f64, EvalError>,
{
    fn eval(&mut self, x: f64) -> Result<f64, QuadError> {
        self.evals += 1;
        let value = (self.g)(x).map_err(|source| QuadError::Integrand { x, source })?;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(QuadError::NonFinite { x, value })
        }
    }

    fn refine(&mut self, p: Panel, tol: f64, depth: u32) -> Result<(), QuadError> {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let fine = left + right;
        let delta = fine - p.whole;
        // differences at the level of rounding noise cannot shrink further
        let noise_floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        let accept = depth >= MIN_DEPTH && (delta.abs() <= 15.0 * tol || delta.abs() <= noise_floor);
        if accept {
            self.value += fine + delta / 15.0;
            self.err_est += delta.abs() / 15.0;
            return Ok(());
        }
        let splittable = lm > p.a && m > lm && rm > m && p.b > rm;
        if depth >= MAX_DEPTH || !splittable {
            self.value += fine + delta / 15.0;
            self.err_est += delta.abs();
            self.converged = false;
            return Ok(());
        }
        let half = 0.5 * tol;
        self.refine(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, half, depth + 1)?;
        self.refine(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, half, depth + 1)
    }
}

/// Integrates `g` over `iv` to absolute tolerance `tol`.
///
/// Deterministic: the panel tree is traversed depth-first, left to right,
/// and the result is bitwise reproducible.
pub fn integrate<F>(g: F, iv: Interval, tol: f64) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64) -> Result<f64, EvalError>,
{
    if !(tol >= MIN_TOL) || !tol.is_finite() {
        return Err(QuadError::InvalidTolerance(tol));
    }
    let mut s = Simpson { g, value: 0.0, err_est: 0.0, evals: 0, converged: true };
    let (a, b) = (iv.a, iv.b);
    let m = 0.5 * (a + b);
    let fa = s.eval(a)?;
    let fm = s.eval(m)?;
    let fb = s.eval(b)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    s.refine(Panel { a, b, fa, fm, fb, whole }, tol, 0)?;
    Ok(QuadResult { value: s.value, err_est: s.err_est, evals: s.evals, converged: s.converged })
}

/// Convenience wrapper for infallible integrands; non-finite values are
/// still reported as [`QuadError::NonFinite`].
pub fn integrate_fn<F>(mut g: F, iv: Interval, tol: f64) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64) -> f64,
{
    integrate(move |x| Ok(g(x)), iv, tol)
}

/// `(1/(b−a))·∫ₐᵇ f(x) dx`, with the error estimate scaled likewise.
pub fn mean_integral(f: &FunctionExpr, iv: Interval, tol: f64) -> Result<QuadResult, QuadError> {
    integrate(|x| f.evaluate(x), iv, tol).map(|r| r.scaled(1.0 / iv.width()))
}

/// `(1/(b−a))·∫ₐᵇ g(x) dx` for an arbitrary fallible integrand.
pub fn mean_of<F>(g: F, iv: Interval, tol: f64) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64) -> Result<f64, EvalError>,
{
    integrate(g, iv, tol).map(|r| r.scaled(1.0 / iv.width()))
}

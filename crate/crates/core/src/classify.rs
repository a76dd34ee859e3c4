//! Sampled membership certificates for the m-logarithmically convex and
//! (α,m)-logarithmically convex classes.
//!
//! A function `f` on `[0, D]` is m-logarithmically convex when
//!
//! ```text
//! f(t·x + m(1−t)·y) ≤ f(x)^t · f(y)^(m(1−t))          for all x, y ∈ [0, D], t ∈ [0, 1]
//! ```
//!
//! and (α,m)-logarithmically convex when the exponents are `t^α` and
//! `m(1−t^α)` instead. The checkers test the inequality on a uniform
//! `n × n × n` grid (endpoints included) plus `n³` pseudo-random triples
//! drawn from a seeded ChaCha stream. A pass is a *sampled certificate*,
//! valid on the tested points only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funcspec::{EvalError, FunctionExpr};

pub const DEFAULT_GRID_N: usize = 33;
pub const DEFAULT_TOL_REL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0x5EED;

/// `(α, m) ∈ (0, 1] × (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    alpha: f64,
    m: f64,
}

impl ClassParams {
    pub fn new(alpha: f64, m: f64) -> Result<Self, ClassifyError> {
        let unit = |v: f64| v > 0.0 && v <= 1.0;
        if unit(alpha) && unit(m) {
            Ok(ClassParams { alpha, m })
        } else {
            Err(ClassifyError::InvalidParams { alpha, m })
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> f64 {
        self.m
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("class parameters (alpha={alpha}, m={m}) outside (0,1] x (0,1]")]
    InvalidParams { alpha: f64, m: f64 },
    #[error("domain upper bound {0} must be finite and > 0")]
    InvalidDomain(f64),
    #[error("grid_n = {0} is below the minimum of 3")]
    GridTooSmall(usize),
    #[error("tol_rel = {0} must be finite and >= 0")]
    InvalidTolerance(f64),
    #[error("evaluation failed for triple (x={x}, y={y}, t={t}): {source}")]
    Eval {
        x: f64,
        y: f64,
        t: f64,
        #[source]
        source: EvalError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub grid_n: usize,
    pub tol_rel: f64,
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { grid_n: DEFAULT_GRID_N, tol_rel: DEFAULT_TOL_REL, seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassVerdict {
    Pass,
    Fail,
}

/// A sampled triple at which the defining inequality fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`.
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: ClassVerdict,
    /// The violating triple with the largest deficit; ties go to the
    /// lexicographically smallest `(x, y, t)`.
    pub worst_violation: Option<Violation>,
    pub samples: usize,
}

impl ClassificationReport {
    pub fn label(&self) -> &'static str {
        match self.verdict {
            ClassVerdict::Pass => "sampled certificate",
            ClassVerdict::Fail => "refuted",
        }
    }
}

/// Which class to test. `alpha == 1` is the m-logarithmically convex class.
#[derive(Debug, Clone, Copy)]
struct Exponents {
    alpha: f64,
    m: f64,
}

impl Exponents {
    #[inline]
    fn weight(&self, t: f64) -> f64 {
        if self.alpha == 1.0 {
            t
        } else {
            t.powf(self.alpha)
        }
    }

    /// `f(x)^w · f(y)^(m(1−w))` from the logs of `f(x)` and `f(y)`, with the
    /// endpoint conventions `w = 1 → f(x)` and `w = 0 → f(y)^m`.
    #[inline]
    fn rhs(&self, w: f64, fx: f64, ln_fx: f64, fy: f64, ln_fy: f64) -> f64 {
        if w == 1.0 {
            fx
        } else if w == 0.0 {
            if self.m == 1.0 {
                fy
            } else {
                (self.m * ln_fy).exp()
            }
        } else {
            (w * ln_fx + self.m * (1.0 - w) * ln_fy).exp()
        }
    }
}

/// Checks the m-logarithmic convexity inequality on `[0, domain_upper]`.
pub fn check_m_log_convex(
    f: &FunctionExpr,
    domain_upper: f64,
    m: f64,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport, ClassifyError> {
    let params = ClassParams::new(1.0, m)?;
    run(f, domain_upper, Exponents { alpha: 1.0, m: params.m }, opts)
}

/// Checks the (α,m)-logarithmic convexity inequality on `[0, domain_upper]`.
/// With `α = 1` the result is identical to [`check_m_log_convex`].
pub fn check_alpha_m_log_convex(
    f: &FunctionExpr,
    domain_upper: f64,
    params: ClassParams,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport, ClassifyError> {
    run(f, domain_upper, Exponents { alpha: params.alpha, m: params.m }, opts)
}

/// Evaluates one side pair of the defining inequality at a triple, for
/// re-verifying certificates independently of the sampling loop.
pub fn evaluate_triple(
    f: &FunctionExpr,
    params: ClassParams,
    x: f64,
    y: f64,
    t: f64,
) -> Result<(f64, f64), EvalError> {
    let e = Exponents { alpha: params.alpha, m: params.m };
    let fx = f.evaluate(x)?;
    let fy = f.evaluate(y)?;
    let lhs = f.evaluate(t * x + params.m * (1.0 - t) * y)?;
    Ok((lhs, e.rhs(e.weight(t), fx, fx.ln(), fy, fy.ln())))
}

#[derive(Clone, Copy)]
struct Sample {
    x: f64,
    fx: f64,
    ln_fx: f64,
}

fn sample(f: &FunctionExpr, x: f64, triple: (f64, f64, f64)) -> Result<Sample, ClassifyError> {
    let fx = f.evaluate(x).map_err(|source| ClassifyError::Eval {
        x: triple.0,
        y: triple.1,
        t: triple.2,
        source,
    })?;
    Ok(Sample { x, fx, ln_fx: fx.ln() })
}

/// Keeps the violation with the largest deficit, ties to the smallest (x, y, t).
fn better(a: Option<Violation>, b: Option<Violation>) -> Option<Violation> {
    match (a, b) {
        (None, v) | (v, None) => v,
        (Some(a), Some(b)) => {
            let key = |v: &Violation| (v.x, v.y, v.t);
            let pick_b = b.deficit > a.deficit
                || (b.deficit == a.deficit && key(&b).partial_cmp(&key(&a)) == Some(std::cmp::Ordering::Less));
            Some(if pick_b { b } else { a })
        }
    }
}

fn test_triple(
    f: &FunctionExpr,
    e: &Exponents,
    tol_rel: f64,
    sx: Sample,
    sy: Sample,
    t: f64,
    w: f64,
) -> Result<Option<Violation>, ClassifyError> {
    let z = t * sx.x + e.m * (1.0 - t) * sy.x;
    let lhs = f
        .evaluate(z)
        .map_err(|source| ClassifyError::Eval { x: sx.x, y: sy.x, t, source })?;
    let rhs = e.rhs(w, sx.fx, sx.ln_fx, sy.fx, sy.ln_fx);
    if lhs > rhs * (1.0 + tol_rel) {
        Ok(Some(Violation { x: sx.x, y: sy.x, t, lhs, rhs, deficit: lhs - rhs }))
    } else {
        Ok(None)
    }
}

/// First error in sequential order, else the reduced violation.
fn fold_ordered(chunks: Vec<Result<Option<Violation>, ClassifyError>>) -> Result<Option<Violation>, ClassifyError> {
    let mut worst = None;
    for chunk in chunks {
        worst = better(worst, chunk?);
    }
    Ok(worst)
}

fn run(
    f: &FunctionExpr,
    domain_upper: f64,
    e: Exponents,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport, ClassifyError> {
    if !(domain_upper.is_finite() && domain_upper > 0.0) {
        return Err(ClassifyError::InvalidDomain(domain_upper));
    }
    if opts.grid_n < 3 {
        return Err(ClassifyError::GridTooSmall(opts.grid_n));
    }
    if !(opts.tol_rel.is_finite() && opts.tol_rel >= 0.0) {
        return Err(ClassifyError::InvalidTolerance(opts.tol_rel));
    }
    let n = opts.grid_n;
    let steps = (n - 1) as f64;
    // i/(n−1) is correctly rounded, so the grid for 2k+1 contains the grid for k+1
    let unit: Vec<f64> = (0..n).map(|i| i as f64 / steps).collect();
    let nodes = unit
        .iter()
        .map(|&u| {
            let x = domain_upper * u;
            sample(f, x, (x, x, 0.0))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let weights: Vec<f64> = unit.iter().map(|&t| e.weight(t)).collect();

    let grid_chunks: Vec<_> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst = None;
            for j in 0..n {
                for (&t, &w) in unit.iter().zip(&weights) {
                    worst = better(worst, test_triple(f, &e, opts.tol_rel, nodes[i], nodes[j], t, w)?);
                }
            }
            Ok(worst)
        })
        .collect();
    let grid_worst = fold_ordered(grid_chunks)?;

    let count = n * n * n;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let triples: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| {
            let x = domain_upper * rng.gen::<f64>();
            let y = domain_upper * rng.gen::<f64>();
            let t = rng.gen::<f64>();
            (x, y, t)
        })
        .collect();
    let random_chunks: Vec<_> = triples
        .par_chunks(1024)
        .map(|chunk| {
            let mut worst = None;
            for &(x, y, t) in chunk {
                let sx = sample(f, x, (x, y, t))?;
                let sy = sample(f, y, (x, y, t))?;
                worst = better(worst, test_triple(f, &e, opts.tol_rel, sx, sy, t, e.weight(t))?);
            }
            Ok(worst)
        })
        .collect();
    let worst = better(grid_worst, fold_ordered(random_chunks)?);

    Ok(ClassificationReport {
        verdict: if worst.is_some() { ClassVerdict::Fail } else { ClassVerdict::Pass },
        worst_violation: worst,
        samples: 2 * count,
    })
}

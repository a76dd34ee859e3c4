//! Verdicts, parameter sweeps and minimum-margin search.
//!
//! Every verified inequality becomes an [`InequalityReport`] with
//! `margin = rhs − lhs` (for chains, the smallest consecutive step). The
//! verdict is decided against
//!
//! ```text
//! margin_tol = 10·quad_err + 1e-9·max(1, |lhs|, |rhs|)
//! ```
//!
//! so quadrature noise alone never produces `violated`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, BoundSide, BoundsError, Variant};
use crate::classify::{self, ClassParams, ClassVerdict, ClassifyOptions, Violation};
use crate::funcspec::{Family, FamilyError, FamilySpec, FunctionExpr};
use crate::quadrature::Interval;

/// Relative floor of the verdict tolerance.
pub const MARGIN_REL_FLOOR: f64 = 1e-9;
/// Multiplier on the quadrature error estimate in the verdict tolerance.
pub const MARGIN_QUAD_FACTOR: f64 = 10.0;
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("unknown theorem `{0}` (expected dr1, dr2, eq4, eq11, eq22, eq31 or eq42)")]
    UnknownTheorem(String),
    #[error("search budget must be at least 1")]
    ZeroBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Dr1,
    Dr2,
    Eq4,
    Eq11,
    Eq22,
    Eq31,
    Eq42,
}

impl Theorem {
    pub const ALL: [Theorem; 7] =
        [Theorem::Dr1, Theorem::Dr2, Theorem::Eq4, Theorem::Eq11, Theorem::Eq22, Theorem::Eq31, Theorem::Eq42];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::Dr1 => "dr1",
            Theorem::Dr2 => "dr2",
            Theorem::Eq4 => "eq4",
            Theorem::Eq11 => "eq11",
            Theorem::Eq22 => "eq22",
            Theorem::Eq31 => "eq31",
            Theorem::Eq42 => "eq42",
        }
    }

    pub fn has_variants(self) -> bool {
        matches!(self, Theorem::Eq22 | Theorem::Eq42)
    }

    /// The class whose membership the inequality assumes.
    pub fn hypothesis(self) -> Hypothesis {
        match self {
            Theorem::Dr1 | Theorem::Dr2 => Hypothesis::LogConvex,
            Theorem::Eq4 | Theorem::Eq11 | Theorem::Eq22 => Hypothesis::MLogConvex,
            Theorem::Eq31 | Theorem::Eq42 => Hypothesis::AlphaMLogConvex,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Theorem {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| VerifyError::UnknownTheorem(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Ordinary log-convexity (m = 1) on `[0, b]`.
    LogConvex,
    /// m-log-convexity on `[0, b/m]`.
    MLogConvex,
    /// (α,m)-log-convexity on `[0, b/m]`.
    AlphaMLogConvex,
}

/// The variant tag stored in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReportVariant {
    #[serde(rename = "printed")]
    Printed,
    #[serde(rename = "corrected")]
    Corrected,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl ReportVariant {
    fn of(theorem: Theorem, variant: Variant) -> Self {
        match (theorem.has_variants(), variant) {
            (false, _) => ReportVariant::NotApplicable,
            (true, Variant::Printed) => ReportVariant::Printed,
            (true, Variant::Corrected) => ReportVariant::Corrected,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ReportVariant::Printed => "printed",
            ReportVariant::Corrected => "corrected",
            ReportVariant::NotApplicable => "n/a",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Inapplicable,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inapplicable => "inapplicable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    Skipped,
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisSummary {
    pub status: HypothesisStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_violation: Option<Violation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl HypothesisSummary {
    pub fn skipped() -> Self {
        HypothesisSummary { status: HypothesisStatus::Skipped, class: None, samples: None, worst_violation: None, detail: None }
    }
}

/// The outcome of verifying one inequality at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem: Theorem,
    pub variant: ReportVariant,
    pub params: ReportParams,
    pub hypothesis: HypothesisSummary,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub quad_err: f64,
    pub verdict: Verdict,
    /// Present only for inconclusive reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// `10·quad_err + 1e-9·max(1, |lhs|, |rhs|)`.
pub fn margin_tolerance(lhs: f64, rhs: f64, quad_err: f64) -> f64 {
    MARGIN_QUAD_FACTOR * quad_err + MARGIN_REL_FLOOR * 1f64.max(lhs.abs()).max(rhs.abs())
}

/// The verdict rule. `margin` is `rhs − lhs` for two-sided bounds and the
/// smallest consecutive step for chains.
pub fn decide(lhs: Option<f64>, rhs: Option<f64>, margin: Option<f64>, quad_err: f64) -> Verdict {
    match (lhs, rhs, margin) {
        (None, _, _) => Verdict::Inconclusive,
        (Some(_), None, _) => Verdict::Inapplicable,
        (Some(l), Some(r), Some(mg)) if mg.is_finite() => {
            if mg >= -margin_tolerance(l, r, quad_err) {
                Verdict::Holds
            } else {
                Verdict::Violated
            }
        }
        _ => Verdict::Inconclusive,
    }
}

impl InequalityReport {
    /// Re-applies [`decide`] to the stored numbers.
    pub fn replay_verdict(&self) -> Verdict {
        if self.diagnostic.is_some() {
            return Verdict::Inconclusive;
        }
        decide(self.lhs, self.rhs, self.margin, self.quad_err)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Absolute quadrature tolerance.
    pub tol: f64,
    pub check_hypothesis: bool,
    pub classify: ClassifyOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tol: DEFAULT_TOL, check_hypothesis: true, classify: ClassifyOptions::default() }
    }
}

/// Runs the classifier matching `theorem`'s hypothesis on `[0, b/m]`.
pub fn check_hypothesis(
    theorem: Theorem,
    f: &FunctionExpr,
    iv: Interval,
    params: ClassParams,
    opts: &ClassifyOptions,
) -> HypothesisSummary {
    let kind = theorem.hypothesis();
    let (alpha, m) = match kind {
        Hypothesis::LogConvex => (1.0, 1.0),
        Hypothesis::MLogConvex => (1.0, params.m()),
        Hypothesis::AlphaMLogConvex => (params.alpha(), params.m()),
    };
    classify_point(f, iv.b() / m, alpha, m, kind, opts)
}

fn classify_point(
    f: &FunctionExpr,
    upper: f64,
    alpha: f64,
    m: f64,
    kind: Hypothesis,
    opts: &ClassifyOptions,
) -> HypothesisSummary {
    let (class, result) = match kind {
        Hypothesis::LogConvex | Hypothesis::MLogConvex => {
            (format!("m-log-convex(m={m:?}) on [0,{upper:?}]"), classify::check_m_log_convex(f, upper, m, opts))
        }
        Hypothesis::AlphaMLogConvex => (
            format!("(alpha,m)-log-convex(alpha={alpha:?},m={m:?}) on [0,{upper:?}]"),
            ClassParams::new(alpha, m).and_then(|p| classify::check_alpha_m_log_convex(f, upper, p, opts)),
        ),
    };
    match result {
        Ok(report) => HypothesisSummary {
            status: match report.verdict {
                ClassVerdict::Pass => HypothesisStatus::Pass,
                ClassVerdict::Fail => HypothesisStatus::Fail,
            },
            class: Some(class),
            samples: Some(report.samples),
            worst_violation: report.worst_violation,
            detail: None,
        },
        Err(err) => HypothesisSummary {
            status: HypothesisStatus::Error,
            class: Some(class),
            samples: None,
            worst_violation: None,
            detail: Some(err.to_string()),
        },
    }
}

struct Sides {
    lhs: f64,
    rhs: Option<f64>,
    margin: Option<f64>,
    quad_err: f64,
}

fn two_sided(lhs: f64, rhs: BoundSide, quad_err: f64) -> Sides {
    let rhs = rhs.value();
    Sides { lhs, rhs, margin: rhs.map(|r| r - lhs), quad_err }
}

fn compute_sides(
    theorem: Theorem,
    variant: Variant,
    f: &FunctionExpr,
    iv: Interval,
    params: ClassParams,
    tol: f64,
) -> Result<Sides, BoundsError> {
    let m = params.m();
    Ok(match theorem {
        Theorem::Dr1 | Theorem::Dr2 => {
            let chain = if theorem == Theorem::Dr1 { bounds::chain_dr1(f, iv, tol)? } else { bounds::chain_dr2(f, iv, tol)? };
            let first = chain.terms.first().map(|t| t.value).unwrap_or(f64::NAN);
            let last = chain.terms.last().map(|t| t.value).unwrap_or(f64::NAN);
            Sides { lhs: first, rhs: Some(last), margin: Some(chain.min_step()), quad_err: chain.max_err_est() }
        }
        Theorem::Eq4 => {
            let r = bounds::bound_eq4(f, iv, m, tol)?;
            two_sided(r.lhs.value, r.rhs, r.lhs.err_est)
        }
        Theorem::Eq11 => {
            let r = bounds::bound_eq11_pair(f, iv, m, tol)?;
            two_sided(r.lhs, BoundSide::exact(r.rhs.value), r.rhs.err_est)
        }
        Theorem::Eq22 => {
            let r = bounds::bound_eq22_pair(f, iv, m, tol, variant)?;
            two_sided(r.lhs.value, r.rhs, r.lhs.err_est)
        }
        Theorem::Eq31 => {
            let r = bounds::bound_eq31(f, iv, params, tol)?;
            two_sided(r.lhs.value, r.rhs, r.lhs.err_est)
        }
        Theorem::Eq42 => {
            let r = bounds::bound_eq42(f, iv, params, tol, variant)?;
            two_sided(r.lhs.value, r.rhs, r.lhs.err_est)
        }
    })
}

/// Computes both sides and the verdict with a precomputed hypothesis summary.
pub fn verify_with_hypothesis(
    theorem: Theorem,
    variant: Variant,
    f: &FunctionExpr,
    iv: Interval,
    params: ClassParams,
    tol: f64,
    hypothesis: HypothesisSummary,
    family: Option<FamilySpec>,
) -> InequalityReport {
    let report_params = ReportParams { a: iv.a(), b: iv.b(), alpha: params.alpha(), m: params.m(), family };
    let variant_tag = ReportVariant::of(theorem, variant);
    match compute_sides(theorem, variant, f, iv, params, tol) {
        Ok(s) => InequalityReport {
            theorem,
            variant: variant_tag,
            params: report_params,
            hypothesis,
            lhs: Some(s.lhs),
            rhs: s.rhs,
            margin: s.margin,
            quad_err: s.quad_err,
            verdict: decide(Some(s.lhs), s.rhs, s.margin, s.quad_err),
            diagnostic: None,
        },
        Err(err) => InequalityReport {
            theorem,
            variant: variant_tag,
            params: report_params,
            hypothesis,
            lhs: None,
            rhs: None,
            margin: None,
            quad_err: 0.0,
            verdict: Verdict::Inconclusive,
            diagnostic: Some(err.to_string()),
        },
    }
}

/// Verifies one inequality for `f` on `iv`.
///
/// With `opts.check_hypothesis`, the matching classifier runs first and its
/// summary is attached; the verdict is computed either way.
pub fn verify_theorem(
    theorem: Theorem,
    variant: Variant,
    f: &FunctionExpr,
    iv: Interval,
    params: ClassParams,
    opts: &VerifyOptions,
) -> InequalityReport {
    let hypothesis = if opts.check_hypothesis {
        check_hypothesis(theorem, f, iv, params, &opts.classify)
    } else {
        HypothesisSummary::skipped()
    };
    verify_with_hypothesis(theorem, variant, f, iv, params, opts.tol, hypothesis, None)
}

/// A family with a list of values per parameter; members are the Cartesian
/// product in canonical parameter order.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyGrid {
    pub family: Family,
    pub params: BTreeMap<String, Vec<f64>>,
}

impl FamilyGrid {
    pub fn new<'a>(family: Family, params: impl IntoIterator<Item = (&'a str, Vec<f64>)>) -> Self {
        FamilyGrid { family, params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect() }
    }

    pub fn members(&self) -> Vec<FamilySpec> {
        let mut out = vec![BTreeMap::new()];
        for (name, values) in &self.params {
            out = out
                .into_iter()
                .flat_map(|partial: BTreeMap<String, f64>| {
                    values.iter().map(move |&v| {
                        let mut next = partial.clone();
                        next.insert(name.clone(), v);
                        next
                    })
                })
                .collect();
        }
        out.into_iter().map(|params| FamilySpec { name: self.family.name().to_string(), params }).collect()
    }
}

/// The Cartesian grid a sweep runs over. `(a, b)` pairs with `a ≥ b` are
/// skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub families: Vec<FamilySpec>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub alpha: Vec<f64>,
    pub m: Vec<f64>,
    pub theorems: Vec<Theorem>,
    pub variant: Variant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub tol: f64,
    /// Classify each (family member, b/m, α, m) once and attach the result.
    pub check_hypothesis: bool,
    pub classify: ClassifyOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { tol: DEFAULT_TOL, check_hypothesis: false, classify: ClassifyOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMargin {
    pub value: f64,
    pub theorem: Theorem,
    pub params: ReportParams,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub holds: usize,
    pub violated: usize,
    pub inapplicable: usize,
    pub inconclusive: usize,
}

impl VerdictCounts {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Holds => self.holds += 1,
            Verdict::Violated => self.violated += 1,
            Verdict::Inapplicable => self.inapplicable += 1,
            Verdict::Inconclusive => self.inconclusive += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub reports: Vec<InequalityReport>,
    pub min_margin: Option<MinMargin>,
    pub counts: VerdictCounts,
}

impl SweepSummary {
    pub fn from_reports(reports: Vec<InequalityReport>) -> Self {
        let mut counts = VerdictCounts::default();
        let mut min_margin: Option<MinMargin> = None;
        for r in &reports {
            counts.add(r.verdict);
            if let Some(mg) = r.margin {
                if min_margin.as_ref().is_none_or(|best| mg < best.value) {
                    min_margin = Some(MinMargin { value: mg, theorem: r.theorem, params: r.params.clone() });
                }
            }
        }
        SweepSummary { reports, min_margin, counts }
    }
}

fn check_unit(name: &str, v: f64) -> Result<(), VerifyError> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(VerifyError::InvalidParam(format!("{name} = {v} outside (0, 1]")))
    }
}

struct Point<'a> {
    family: usize,
    iv: Interval,
    params: ClassParams,
    theorem: Theorem,
    f: &'a FunctionExpr,
}

/// Identity of one classifier run: family member, upper bound, α, m, and
/// which class.
type ClassKey = (usize, u64, u64, u64, bool);

fn class_key(p: &Point<'_>) -> (ClassKey, Hypothesis, f64, f64, f64) {
    let kind = p.theorem.hypothesis();
    let (alpha, m) = match kind {
        Hypothesis::LogConvex => (1.0, 1.0),
        Hypothesis::MLogConvex => (1.0, p.params.m()),
        Hypothesis::AlphaMLogConvex => (p.params.alpha(), p.params.m()),
    };
    let upper = p.iv.b() / m;
    let alpha_class = kind == Hypothesis::AlphaMLogConvex;
    ((p.family, upper.to_bits(), alpha.to_bits(), m.to_bits(), alpha_class), kind, upper, alpha, m)
}

/// Evaluates every grid point in lexicographic order
/// (family, a, b, α, m, theorem). Results do not depend on thread count.
pub fn sweep(grid: &SweepGrid, opts: &SweepOptions) -> Result<SweepSummary, VerifyError> {
    let funcs = grid.families.iter().map(FamilySpec::instantiate).collect::<Result<Vec<_>, _>>()?;
    for &alpha in &grid.alpha {
        check_unit("alpha", alpha)?;
    }
    for &m in &grid.m {
        check_unit("m", m)?;
    }
    let mut points = Vec::new();
    for (fi, f) in funcs.iter().enumerate() {
        for &a in &grid.a {
            for &b in &grid.b {
                if !(a < b) {
                    continue;
                }
                let iv = Interval::new(a, b).map_err(|e| VerifyError::InvalidParam(e.to_string()))?;
                for &alpha in &grid.alpha {
                    for &m in &grid.m {
                        let params = ClassParams::new(alpha, m).map_err(|e| VerifyError::InvalidParam(e.to_string()))?;
                        for &theorem in &grid.theorems {
                            points.push(Point { family: fi, iv, params, theorem, f });
                        }
                    }
                }
            }
        }
    }

    let hypotheses: HashMap<ClassKey, HypothesisSummary> = if opts.check_hypothesis {
        let mut jobs = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for p in &points {
            let (key, kind, upper, alpha, m) = class_key(p);
            if seen.insert(key) {
                jobs.push((key, p.f, kind, upper, alpha, m));
            }
        }
        jobs.par_iter()
            .map(|&(key, f, kind, upper, alpha, m)| (key, classify_point(f, upper, alpha, m, kind, &opts.classify)))
            .collect()
    } else {
        HashMap::new()
    };

    let reports: Vec<InequalityReport> = points
        .par_iter()
        .map(|p| {
            let hypothesis = if opts.check_hypothesis {
                hypotheses[&class_key(p).0].clone()
            } else {
                HypothesisSummary::skipped()
            };
            verify_with_hypothesis(
                p.theorem,
                grid.variant,
                p.f,
                p.iv,
                p.params,
                opts.tol,
                hypothesis,
                Some(grid.families[p.family].clone()),
            )
        })
        .collect();
    Ok(SweepSummary::from_reports(reports))
}

/// A closed range; `lo == hi` pins the coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub fn new(lo: f64, hi: f64) -> Self {
        Range { lo, hi }
    }

    pub fn fixed(v: f64) -> Self {
        Range { lo: v, hi: v }
    }

    fn is_free(&self) -> bool {
        self.hi > self.lo
    }

    fn at(&self, u: f64) -> f64 {
        if self.is_free() {
            self.lo + u * (self.hi - self.lo)
        } else {
            self.lo
        }
    }
}

/// Parameter box for [`search_min_margin`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBox {
    pub family: Family,
    pub family_ranges: BTreeMap<String, Range>,
    pub a: Range,
    pub b: Range,
    pub alpha: Range,
    pub m: Range,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Total number of inequality evaluations.
    pub budget: usize,
    pub tol: f64,
    /// Seeds the lattice shift.
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: 200, tol: DEFAULT_TOL, seed: classify::DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_params: Option<ReportParams>,
    pub best_margin: Option<f64>,
    pub report: Option<InequalityReport>,
    pub evaluations: usize,
}

/// Golden-ratio step of the golden-section search, `(√5 − 1)/2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Additive-recurrence lattice generators: `1/φ_d^(j+1)` where `φ_d` is the
/// positive root of `x^(d+1) = x + 1`.
fn lattice_generators(d: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|j| phi.powi(-(j as i32))).collect()
}

struct Searcher<'a> {
    bx: &'a SearchBox,
    theorem: Theorem,
    variant: Variant,
    tol: f64,
    free: Vec<&'a str>,
    evaluations: usize,
    budget: usize,
    best: Option<(f64, InequalityReport)>,
}

impl<'a> Searcher<'a> {
    fn range(&self, name: &str) -> Range {
        match name {
            "a" => self.bx.a,
            "b" => self.bx.b,
            "alpha" => self.bx.alpha,
            "m" => self.bx.m,
            other => self.bx.family_ranges[other],
        }
    }

    fn coords(&self, u: &[f64]) -> BTreeMap<&'a str, f64> {
        let mut all: BTreeMap<&str, f64> = BTreeMap::new();
        for name in ["a", "b", "alpha", "m"].into_iter().chain(self.bx.family_ranges.keys().map(String::as_str)) {
            all.insert(name, self.range(name).lo);
        }
        for (name, &ui) in self.free.iter().zip(u) {
            all.insert(name, self.range(name).at(ui));
        }
        all
    }

    /// Margin at a unit-cube point, `+∞` when infeasible, inapplicable or
    /// inconclusive.
    fn point_report(&self, u: &[f64]) -> Option<InequalityReport> {
        let c = self.coords(u);
        let spec = FamilySpec {
            name: self.bx.family.name().to_string(),
            params: self
                .bx
                .family_ranges
                .keys()
                .map(|k| (k.clone(), c[k.as_str()]))
                .collect(),
        };
        let f = spec.instantiate().ok()?;
        let iv = Interval::new(c["a"], c["b"]).ok()?;
        let params = ClassParams::new(c["alpha"], c["m"]).ok()?;
        Some(verify_with_hypothesis(
            self.theorem,
            self.variant,
            &f,
            iv,
            params,
            self.tol,
            HypothesisSummary::skipped(),
            Some(spec),
        ))
    }

    fn score(report: &Option<InequalityReport>) -> f64 {
        report
            .as_ref()
            .filter(|r| r.verdict != Verdict::Inconclusive)
            .and_then(|r| r.margin)
            .unwrap_or(f64::INFINITY)
    }

    fn offer(&mut self, report: Option<InequalityReport>) -> f64 {
        let s = Self::score(&report);
        if s.is_finite() && self.best.as_ref().is_none_or(|(b, _)| s < *b) {
            self.best = Some((s, report.expect("finite score implies a report")));
        }
        s
    }

    fn eval(&mut self, u: &[f64]) -> Option<f64> {
        if self.evaluations >= self.budget {
            return None;
        }
        self.evaluations += 1;
        let report = self.point_report(u);
        Some(self.offer(report))
    }
}

/// Looks for the smallest margin of `theorem` over `bx`.
///
/// A shifted additive-recurrence lattice of `⌈budget/2⌉` points seeds the
/// incumbent; the rest of the budget goes to cyclic coordinate-wise
/// golden-section refinement around it, with the bracket halving after each
/// sweep over the coordinates. Deterministic for a fixed seed. The result
/// is the smallest margin observed, not a certified global minimum.
pub fn search_min_margin(
    bx: &SearchBox,
    theorem: Theorem,
    variant: Variant,
    opts: &SearchOptions,
) -> Result<SearchResult, VerifyError> {
    if opts.budget == 0 {
        return Err(VerifyError::ZeroBudget);
    }
    let names = bx.family.param_names();
    for key in bx.family_ranges.keys() {
        if !names.contains(&key.as_str()) {
            return Err(FamilyError::UnexpectedParam { family: bx.family.name(), param: key.clone() }.into());
        }
    }
    for name in names {
        if !bx.family_ranges.contains_key(*name) {
            return Err(FamilyError::MissingParam { family: bx.family.name(), param: name }.into());
        }
    }
    for (name, r) in [("a", bx.a), ("b", bx.b), ("alpha", bx.alpha), ("m", bx.m)]
        .into_iter()
        .chain(bx.family_ranges.iter().map(|(k, r)| (k.as_str(), *r)))
    {
        if !(r.lo.is_finite() && r.hi.is_finite() && r.lo <= r.hi) {
            return Err(VerifyError::InvalidParam(format!("range for {name} is [{}, {}]", r.lo, r.hi)));
        }
    }
    check_unit("alpha", bx.alpha.lo).and(check_unit("alpha", bx.alpha.hi))?;
    check_unit("m", bx.m.lo).and(check_unit("m", bx.m.hi))?;
    if bx.a.lo < 0.0 {
        return Err(VerifyError::InvalidParam(format!("a range starts below 0 at {}", bx.a.lo)));
    }

    let mut free: Vec<&str> = Vec::new();
    for name in ["a", "b", "alpha", "m"] {
        let r = match name {
            "a" => bx.a,
            "b" => bx.b,
            "alpha" => bx.alpha,
            _ => bx.m,
        };
        if r.is_free() {
            free.push(name);
        }
    }
    free.extend(bx.family_ranges.iter().filter(|(_, r)| r.is_free()).map(|(k, _)| k.as_str()));
    let d = free.len();

    let mut s = Searcher {
        bx,
        theorem,
        variant,
        tol: opts.tol,
        free,
        evaluations: 0,
        budget: opts.budget,
        best: None,
    };

    if d == 0 {
        s.eval(&[]);
        return Ok(s.finish());
    }

    // coarse pass
    let coarse = opts.budget.div_ceil(2);
    let gens = lattice_generators(d);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shift: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
    let lattice: Vec<Vec<f64>> = (0..coarse)
        .map(|i| {
            gens.iter()
                .zip(&shift)
                .map(|(g, s0)| (s0 + (i as f64 + 1.0) * g).fract())
                .collect()
        })
        .collect();
    let reports: Vec<Option<InequalityReport>> = lattice.par_iter().map(|u| s.point_report(u)).collect();
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    for (u, report) in lattice.iter().zip(reports) {
        s.evaluations += 1;
        let score = s.offer(report);
        if score.is_finite() && incumbent.as_ref().is_none_or(|(b, _)| score < *b) {
            incumbent = Some((score, u.clone()));
        }
    }

    // refinement
    let Some((mut best_score, mut center)) = incumbent else {
        return Ok(s.finish());
    };
    let mut half_width = 0.25;
    'outer: loop {
        for j in 0..d {
            let lo = (center[j] - half_width).max(0.0);
            let hi = (center[j] + half_width).min(1.0);
            let Some((score, uj)) = golden_section(&mut s, &center, j, lo, hi, 8) else {
                break 'outer;
            };
            if score < best_score {
                best_score = score;
                center[j] = uj;
            }
            if s.evaluations >= s.budget {
                break 'outer;
            }
        }
        half_width *= 0.5;
        if half_width < 1e-12 {
            half_width = 0.25;
        }
    }
    Ok(s.finish())
}

/// Minimizes along coordinate `j` on `[lo, hi]` with up to `iters` golden
/// steps. Returns the best (score, coordinate) seen, or `None` if the
/// budget ran out before any evaluation.
fn golden_section(
    s: &mut Searcher<'_>,
    center: &[f64],
    j: usize,
    mut lo: f64,
    mut hi: f64,
    iters: usize,
) -> Option<(f64, f64)> {
    let mut probe = center.to_vec();
    let mut at = |s: &mut Searcher<'_>, x: f64| {
        probe[j] = x;
        s.eval(&probe)
    };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = at(s, x1)?;
    let mut best = (f1, x1);
    let Some(mut f2) = at(s, x2) else {
        return Some(best);
    };
    if f2 < best.0 {
        best = (f2, x2);
    }
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            let Some(v) = at(s, x1) else { break };
            f1 = v;
            if f1 < best.0 {
                best = (f1, x1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            let Some(v) = at(s, x2) else { break };
            f2 = v;
            if f2 < best.0 {
                best = (f2, x2);
            }
        }
    }
    Some(best)
}

impl Searcher<'_> {
    fn finish(self) -> SearchResult {
        match self.best {
            Some((margin, report)) => SearchResult {
                best_params: Some(report.params.clone()),
                best_margin: Some(margin),
                report: Some(report),
                evaluations: self.evaluations,
            },
            None => SearchResult { best_params: None, best_margin: None, report: None, evaluations: self.evaluations },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspec::parse;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn p(alpha: f64, m: f64) -> ClassParams {
        ClassParams::new(alpha, m).unwrap()
    }

    #[test]
    fn eq4_equality_case_holds() {
        let r = verify_theorem(Theorem::Eq4, Variant::Corrected, &parse("exp(x)").unwrap(), unit(), p(1.0, 1.0), &VerifyOptions::default());
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.margin.unwrap().abs() <= 1e-8);
        assert_eq!(r.hypothesis.status, HypothesisStatus::Pass);
        assert_eq!(r.variant, ReportVariant::NotApplicable);
    }

    #[test]
    fn printed_eq22_constant_counterexample() {
        let opts = VerifyOptions { check_hypothesis: false, ..VerifyOptions::default() };
        let r = verify_theorem(Theorem::Eq22, Variant::Printed, &parse("0.5").unwrap(), unit(), p(1.0, 1.0), &opts);
        assert_eq!(r.verdict, Verdict::Violated);
        assert!((r.margin.unwrap() + 0.25).abs() <= 1e-12);
        assert_eq!(r.hypothesis.status, HypothesisStatus::Skipped);
    }

    #[test]
    fn eq31_unit_constant() {
        let r = verify_theorem(Theorem::Eq31, Variant::Corrected, &parse("1").unwrap(), Interval::new(0.5, 1.5).unwrap(), p(0.3, 0.6), &VerifyOptions::default());
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.margin, Some(0.0));
    }

    #[test]
    fn inapplicable_when_both_ratios_exceed_one() {
        // a constant c > 1 with m < 1 gives φ = ℓ = c^(1−m) > 1
        let opts = VerifyOptions { check_hypothesis: false, ..VerifyOptions::default() };
        let r = verify_theorem(Theorem::Eq31, Variant::Corrected, &parse("2").unwrap(), unit(), p(0.5, 0.5), &opts);
        assert_eq!(r.verdict, Verdict::Inapplicable);
        assert_eq!(r.rhs, None);
        assert_eq!(r.margin, None);
    }

    #[test]
    fn evaluation_failure_is_inconclusive() {
        let opts = VerifyOptions { check_hypothesis: true, ..VerifyOptions::default() };
        let r = verify_theorem(Theorem::Eq4, Variant::Corrected, &parse("ln(x)+1").unwrap(), unit(), p(1.0, 1.0), &opts);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.diagnostic.is_some());
        assert_eq!(r.hypothesis.status, HypothesisStatus::Error);
        assert_eq!(r.replay_verdict(), Verdict::Inconclusive);
    }

    #[test]
    fn verdict_rule_boundaries() {
        let tol = margin_tolerance(2.0, 3.0, 1e-6);
        assert_eq!(tol, 10.0 * 1e-6 + 3e-9);
        assert_eq!(decide(Some(2.0), Some(3.0), Some(-tol), 1e-6), Verdict::Holds);
        assert_eq!(decide(Some(2.0), Some(3.0), Some(-tol * 1.0001), 1e-6), Verdict::Violated);
        assert_eq!(decide(Some(2.0), None, None, 0.0), Verdict::Inapplicable);
        assert_eq!(decide(None, None, None, 0.0), Verdict::Inconclusive);
    }

    #[test]
    fn chains_report_min_step() {
        let r = verify_theorem(Theorem::Dr2, Variant::Corrected, &parse("exp(x^2)").unwrap(), unit(), p(1.0, 1.0), &VerifyOptions::default());
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.margin.unwrap() > 0.0);
        assert!(r.margin.unwrap() < r.rhs.unwrap() - r.lhs.unwrap());
    }

    #[test]
    fn family_grid_members_in_order() {
        let g = FamilyGrid::new(Family::ExpAffine, [("k", vec![1.0, 2.0]), ("c", vec![0.5, 0.25])]);
        let names: Vec<String> = g.members().iter().map(ToString::to_string).collect();
        assert_eq!(
            names,
            ["exp_affine(c=0.5,k=1.0)", "exp_affine(c=0.5,k=2.0)", "exp_affine(c=0.25,k=1.0)", "exp_affine(c=0.25,k=2.0)"]
        );
    }

    fn exp_linear_grid() -> SweepGrid {
        SweepGrid {
            families: FamilyGrid::new(Family::ExpLinear, [("k", vec![0.5, 1.0, 2.0])]).members(),
            a: vec![0.0],
            b: vec![1.0],
            alpha: vec![1.0],
            m: vec![0.5, 1.0],
            theorems: vec![Theorem::Eq4],
            variant: Variant::Corrected,
        }
    }

    #[test]
    fn sweep_exp_linear_eq4() {
        let s = sweep(&exp_linear_grid(), &SweepOptions::default()).unwrap();
        assert_eq!(s.reports.len(), 6);
        assert_eq!(s.counts.holds, 6);
        // equality case: the margin is quadrature noise around zero
        assert!(s.min_margin.as_ref().unwrap().value >= -1e-9);
    }

    #[test]
    fn sweep_constant_printed_eq22() {
        let grid = SweepGrid {
            families: FamilyGrid::new(Family::Const, [("c", vec![0.25, 0.5, 0.75])]).members(),
            a: vec![0.0],
            b: vec![1.0],
            alpha: vec![1.0],
            m: vec![1.0],
            theorems: vec![Theorem::Eq22],
            variant: Variant::Printed,
        };
        let s = sweep(&grid, &SweepOptions::default()).unwrap();
        assert_eq!(s.counts.violated, 3);
        let mm = s.min_margin.unwrap();
        assert!((mm.value + 0.25).abs() <= 1e-12);
        assert_eq!(mm.params.family.unwrap().params["c"], 0.5);
    }

    #[test]
    fn empty_sweep() {
        let grid = SweepGrid { families: vec![], ..exp_linear_grid() };
        let s = sweep(&grid, &SweepOptions::default()).unwrap();
        assert!(s.reports.is_empty() && s.min_margin.is_none());
        let grid = SweepGrid { a: vec![1.0], b: vec![0.5], ..exp_linear_grid() };
        assert!(sweep(&grid, &SweepOptions::default()).unwrap().reports.is_empty());
    }

    #[test]
    fn sweep_rejects_illegal_values() {
        let grid = SweepGrid { m: vec![0.0], ..exp_linear_grid() };
        assert!(sweep(&grid, &SweepOptions::default()).is_err());
        let grid = SweepGrid { families: vec![FamilySpec::new("const", [("c", -1.0)])], ..exp_linear_grid() };
        assert!(sweep(&grid, &SweepOptions::default()).is_err());
    }

    fn const_box() -> SearchBox {
        SearchBox {
            family: Family::Const,
            family_ranges: [("c".to_string(), Range::new(0.1, 0.9))].into_iter().collect(),
            a: Range::fixed(0.0),
            b: Range::fixed(1.0),
            alpha: Range::fixed(1.0),
            m: Range::fixed(1.0),
        }
    }

    #[test]
    fn search_finds_quadratic_minimum() {
        let r = search_min_margin(&const_box(), Theorem::Eq22, Variant::Printed, &SearchOptions { budget: 200, ..SearchOptions::default() }).unwrap();
        assert_eq!(r.evaluations, 200);
        assert!((r.best_margin.unwrap() + 0.25).abs() <= 1e-9);
        let c = r.best_params.unwrap().family.unwrap().params["c"];
        assert!((c - 0.5).abs() <= 1e-4);
    }

    #[test]
    fn search_budget_one() {
        let r = search_min_margin(&const_box(), Theorem::Eq22, Variant::Printed, &SearchOptions { budget: 1, ..SearchOptions::default() }).unwrap();
        assert_eq!(r.evaluations, 1);
        let c = r.best_params.as_ref().unwrap().family.as_ref().unwrap().params["c"];
        assert!((r.best_margin.unwrap() - (c * c - c)).abs() <= 1e-12);
        assert!(search_min_margin(&const_box(), Theorem::Eq22, Variant::Printed, &SearchOptions { budget: 0, ..SearchOptions::default() }).is_err());
    }

    #[test]
    fn search_is_deterministic() {
        let bx = SearchBox {
            family: Family::ExpAffine,
            family_ranges: [("c".to_string(), Range::new(0.2, 1.0)), ("k".to_string(), Range::new(-1.0, 2.0))].into_iter().collect(),
            a: Range::new(0.0, 0.5),
            b: Range::fixed(1.0),
            alpha: Range::new(0.3, 1.0),
            m: Range::new(0.4, 1.0),
        };
        let opts = SearchOptions { budget: 60, ..SearchOptions::default() };
        let r1 = search_min_margin(&bx, Theorem::Eq31, Variant::Corrected, &opts).unwrap();
        let r2 = search_min_margin(&bx, Theorem::Eq31, Variant::Corrected, &opts).unwrap();
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
        assert_eq!(r1.evaluations, 60);
    }

    #[test]
    fn lattice_generators_are_golden_in_one_dimension() {
        let g = lattice_generators(1);
        assert!((g[0] - INV_PHI).abs() < 1e-15);
    }
}

//! Numerical verification of Hadamard-type integral inequalities for
//! m-logarithmically convex and (α,m)-logarithmically convex functions.
//!
//! The crate is organized bottom-up:
//!
//! - [`funcspec`]: a small expression language for positive functions of `x`
//!   plus a registry of parametric families used by sweeps.
//! - [`means`]: arithmetic, geometric and logarithmic means.
//! - [`quadrature`]: adaptive Simpson integration with error estimates.
//! - [`classify`]: sampled membership certificates for the function classes.
//! - [`bounds`]: left and right sides of every inequality, including the
//!   `printed` and `corrected` variants of the square-root bounds.
//! - [`verify`]: verdicts, sweeps and minimum-margin search.
//! - [`report`] and [`cli`]: JSON/CSV/table output and the command-line front end.
//!
//! ```
//! use hhverify::{funcspec, quadrature::Interval, verify::{self, Theorem, Verdict, VerifyOptions}};
//! use hhverify::{bounds::Variant, classify::ClassParams};
//!
//! let f = funcspec::parse("exp(x)").unwrap();
//! let iv = Interval::new(0.0, 1.0).unwrap();
//! let params = ClassParams::new(1.0, 1.0).unwrap();
//! let report = verify::verify_theorem(Theorem::Eq4, Variant::Corrected, &f, iv, params, &VerifyOptions::default());
//! assert_eq!(report.verdict, Verdict::Holds);
//! assert!(report.margin.unwrap().abs() < 1e-8);
//! ```

pub mod bounds;
pub mod classify;
pub mod cli;
pub mod funcspec;
pub mod means;
pub mod quadrature;
pub mod report;
pub mod verify;

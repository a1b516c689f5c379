//! Magnitude-based inference for small-sample sport-science data.
//!
//! The crate turns two groups (or pre/post pairs) into the full reporting
//! quartet: mean difference with its confidence interval, p-value, percent
//! difference on the log pathway and a standardized effect size. Each
//! effect is then judged against a smallest worthwhile change, yielding the
//! chances that it is negative, trivial or positive and a plain-language
//! descriptor. A seeded replication engine shows how much p-values move
//! between repeats of the same experiment.
//!
//! ```
//! use mbi_core::descriptive::Sample;
//! use mbi_core::effects::{compare_independent, ComparisonConfig};
//! use mbi_core::mbi::{infer, MbiConfig};
//!
//! let a = Sample::new("control", vec![41.0, 44.5, 39.8, 43.1, 40.2]).unwrap();
//! let b = Sample::new("trained", vec![45.2, 47.9, 44.0, 46.3, 48.8]).unwrap();
//! let result = compare_independent(&a, &b, &ComparisonConfig::default()).unwrap();
//! let inference = infer(&result, &MbiConfig::default()).unwrap();
//! assert!(inference.p_positive > 0.9);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod descriptive;
pub mod effects;
pub mod error;
pub mod mbi;
pub mod report;
pub mod simulate;
pub mod specfun;

pub use error::{Error, Result};

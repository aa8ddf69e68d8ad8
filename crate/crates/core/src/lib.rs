//! Schröder's four bracketing problems as weighted tree measures.
//!
//! The crate models word and set bracketings as rooted trees, counts them
//! exactly through the functional equation of their generating function,
//! samples them exactly (recursive method and conditioned Galton–Watson
//! rejection), computes the characteristic-system constants, and runs
//! Monte Carlo experiments against the known limit laws.

pub mod analytics;
pub mod bracket;
pub mod counting;
pub mod error;
pub mod experiments;
pub mod measures;
pub mod real;
pub mod rng;
pub mod sampling;
pub mod series;
pub mod tree;
pub mod weights;

pub use bracket::BracketingKind;
pub use error::{Error, Result};
pub use series::TruncatedSeries;
pub use tree::{Tree, TreeStats};
pub use weights::{Family, Flavor, WeightSeq};

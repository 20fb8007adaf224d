//! Parametric LTL model checking for finite discrete-time Markov chains.
//!
//! Formulas may carry bounds `F[<=x]` whose variables are synthesized: the
//! library decides whether some valuation meets a probability threshold and
//! computes the antichain of minimal valuations.

pub mod error;
pub mod formula;
pub mod fx;
pub mod graph;
pub mod markov;
pub mod oracle;
pub mod buchi;
pub mod cli;
pub mod diamond;
pub mod reach;
pub mod valuation;

pub use error::{Error, Result};

//! Scaling analysis of trading volume.
//!
//! The pipeline runs from raw trades to scaling exponents:
//!
//! * [`ingest`] aggregates ticks into fixed-interval volume series over the
//!   continuous auction session.
//! * [`intraday`] estimates the intraday pattern and divides it out.
//! * [`fluctuation`] computes DFA / MF-DFA fluctuation functions, the
//!   generalized Hurst exponents and the singularity spectrum.
//! * [`scaling`] fits Taylor's law and the cross-sectional Hurst trend.
//! * [`synth`] generates series with known exponents for validation.
//! * [`cli`] drives all of the above from the command line.

pub mod cli;
pub mod error;
pub mod fluctuation;
pub mod ingest;
pub mod intraday;
pub mod output;
pub mod scaling;
pub mod synth;

pub use error::{Error, Result};

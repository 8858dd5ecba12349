//! Estimation of a piecewise, integral form of Okun's law.
//!
//! Unemployment changes are modeled as `du = a + b·dlnG`, with `dlnG` the
//! log growth of real GDP per capita in percent per year. Integrated from an
//! anchor year this gives
//!
//! ```text
//! u(t) = u(t_k) + b_k·Σ dlnG(s) + a_k·(t − t_k),   s = t_k+1 ..= t
//! ```
//!
//! inside each segment `k`. Segment boundaries follow definitional breaks in
//! the price and output statistics, detected from the gap between
//! cumulative CPI and GDP-deflator inflation.
//!
//! * [`timeseries`]: series types, growth, normalization, cumulative inflation
//! * [`breakdetect`]: difference curves, hinge break search, CPI/deflator bridge
//! * [`okun`]: fitting, break search, evaluation, prediction, simulation
//! * [`sources`]: cross-provider GDP audits
//! * [`io`]: CSV snapshots and manifests

pub mod breakdetect;
pub mod error;
pub mod io;
pub mod okun;
pub mod sources;
pub mod timeseries;

mod linalg;
mod placement;

pub use error::{Error, ErrorClass, Result};
pub use linalg::LineFit;
pub use placement::RMS_TIE_TOLERANCE;

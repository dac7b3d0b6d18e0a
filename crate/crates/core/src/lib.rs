//! Exact and brute-force solvers for choosing `k` points of a finite metric
//! space with least Riesz `s`-energy `sum_{i<j} d(i,j)^-s`.
//!
//! * [`ultrametric`]: an `O(n k^2)` tree program for ultrametrics.
//! * [`line_mpd`]: max-min dispersion on the line.
//! * [`reductions`]: clique and geometric independent set reductions, and the
//!   exponent above which energy minimizers maximize the minimum distance.
//! * [`bounds`]: near-field gap and far-field budget for disc packings.
//! * [`oracle`]: exhaustive enumeration used as ground truth.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod line_mpd;
pub mod metric;
pub mod oracle;
pub mod random;
pub mod reductions;
pub mod ultrametric;

pub use error::{Error, Result};
pub use metric::{mpd, riesz_energy, Exponent, MetricInstance, Subset};
pub use oracle::{brute_force_mpd, brute_force_riesz, OracleConfig, OracleResult};
pub use ultrametric::{solve_ultrametric, UltrametricTree};

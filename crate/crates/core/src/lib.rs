//! Codeword distribution of distributed arithmetic coding (DAC) for
//! equiprobable binary sources, along the proper decoding path.
//!
//! The density `f(u)` of the codeword value `u ∈ [0, 1)` can be obtained in
//! four independent ways here:
//!
//! * [`solver`]: fixed-point iteration on a uniform grid, valid for any rate;
//! * [`analytic`]: the exact form at `q = 1/√2`, a piecewise power-law
//!   approximation for `1/√2 <= q <= 0.85`, and a Gaussian for `q → 1`;
//! * [`empirical`]: Monte Carlo histograms of encoded random sequences,
//!   built on the [`codec`] encoder.
//!
//! ```
//! use dac_dist::{codec::OverlapSpec, solver::{solve, SolverConfig}};
//!
//! let spec = OverlapSpec::from_q(0.8).unwrap();
//! let config = SolverConfig::new(10_000, 1e-10, 1_000).unwrap();
//! let (dist, report) = solve(&spec, &config).unwrap();
//! assert!(report.converged);
//! assert_eq!(dist.values().len(), 10_001);
//! ```

pub mod analytic;
pub mod cli;
pub mod codec;
pub mod empirical;
mod error;
pub mod solver;
pub mod table;

pub use error::{Error, Result};

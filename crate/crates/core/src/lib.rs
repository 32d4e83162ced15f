//! Bayesian accuracy bounds (BCRB, extended Ziv-Zakai, Weiss-Weinstein) for
//! position estimation with a uniform map prior on a union of rectangles,
//! and Monte Carlo RMSE of the MMSE, MAP and ML estimators they bound.
//!
//! ```
//! use mapbound::bounds::{all_bounds_1d, WwbSearchConfig, DEFAULT_JS};
//! use mapbound::geometry::SegmentUnion;
//!
//! let support = SegmentUnion::new([(0.0, 1.0), (2.0, 3.0)]).unwrap();
//! let [bcrb, ezzb, wwb] = all_bounds_1d(&support, 3.0, DEFAULT_JS, &WwbSearchConfig::default()).unwrap();
//! assert!(bcrb.b_x < ezzb.b_x && ezzb.b_x < wwb.b_x);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod figures;
pub mod geometry;
pub mod mapfile;
pub mod montecarlo;
pub mod output;
pub mod rng;
pub mod specfun;

pub use error::{Error, Result};

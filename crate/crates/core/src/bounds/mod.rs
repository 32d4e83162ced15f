//! Bayesian lower bounds on the per-axis MSE of map-aware estimators.
//!
//! Three families are provided for uniform maps observed through the
//! Gaussian positional model:
//!
//! * BCRB, from the Bayesian Fisher information (prior + observations);
//! * EZZB, the extended Ziv-Zakai bound, via the `zeta` / `zeta_ov` kernels;
//! * WWB, the Weiss-Weinstein bound, via a 1-D search over the test shift.
//!
//! Generic engines work on [`SegmentUnion`]s (1-D) and [`RectMap`]s (2-D,
//! strip by strip). [`presets`] holds the closed forms of the two reference
//! maps, which the generic engines must reproduce.

mod bcrb;
mod ezzb;
pub mod presets;
mod wwb;

use thiserror::Error;

use crate::geometry::{GeometryError, RectMap, SegmentUnion};
use crate::specfun::NumericError;

pub use bcrb::{bcrb, bcrb_1d, prior_fim_1d, prior_fim_2d, CondFim, PriorFim};
pub use ezzb::{ezzb_1d, ezzb_1d_bruteforce, ezzb_2d};
pub use wwb::{lambda_gamma_1d, wwb_1d, wwb_2d, WwbResult, WwbSearchConfig};

/// Default scalar Fisher information of the edge-smoothing function.
pub const DEFAULT_JS: f64 = 12.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("smoothing information j_s must be positive, got {0}")]
    NonpositiveJs(f64),
    #[error("noise standard deviation must be positive, got {0}")]
    NonpositiveSigma(f64),
    #[error("map dimension `{name}` must be positive, got {value}")]
    NonpositiveWidth { name: &'static str, value: f64 },
    #[error("negative gap {0}")]
    NegativeGap(f64),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl BoundsError {
    pub fn is_numeric(&self) -> bool {
        matches!(self, BoundsError::Numeric(NumericError::QuadratureNoConvergence { .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundFamily {
    Bcrb,
    Ezzb,
    Wwb,
}

impl BoundFamily {
    pub const ALL: [BoundFamily; 3] = [BoundFamily::Bcrb, BoundFamily::Ezzb, BoundFamily::Wwb];

    pub fn name(self) -> &'static str {
        match self {
            BoundFamily::Bcrb => "bcrb",
            BoundFamily::Ezzb => "ezzb",
            BoundFamily::Wwb => "wwb",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bcrb" => Some(BoundFamily::Bcrb),
            "ezzb" => Some(BoundFamily::Ezzb),
            "wwb" => Some(BoundFamily::Wwb),
            _ => None,
        }
    }
}

/// Where the WWB supremum was found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WwbDiagnostics {
    pub h_opt_x: f64,
    pub h_opt_y: Option<f64>,
    /// Objective evaluations spent on the search (both axes).
    pub evaluations: usize,
    /// Set when some candidate had a vanishing denominator and was skipped.
    pub degenerate: bool,
}

/// Diagonal bound `{b_x, b_y}` in m². `b_y` is `None` for 1-D supports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair {
    pub b_x: f64,
    pub b_y: Option<f64>,
    pub family: BoundFamily,
    pub diagnostics: Option<WwbDiagnostics>,
}

impl BoundPair {
    pub fn trace(&self) -> f64 {
        self.b_x + self.b_y.unwrap_or(0.0)
    }
}

fn check_sigma(sigma: f64) -> Result<(), BoundsError> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(BoundsError::NonpositiveSigma(sigma))
    }
}

fn check_js(j_s: f64) -> Result<(), BoundsError> {
    if j_s.is_finite() && j_s > 0.0 {
        Ok(())
    } else {
        Err(BoundsError::NonpositiveJs(j_s))
    }
}

/// All three families for a 1-D support under noise `sigma`.
pub fn all_bounds_1d(
    support: &SegmentUnion,
    sigma: f64,
    j_s: f64,
    cfg: &WwbSearchConfig,
) -> Result<[BoundPair; 3], BoundsError> {
    check_sigma(sigma)?;
    let b = bcrb_1d(prior_fim_1d(support, j_s)?, sigma.powi(-2));
    let z = ezzb_1d(support, sigma)?;
    let w = wwb_1d(support, sigma, cfg)?;
    Ok([
        BoundPair { b_x: b, b_y: None, family: BoundFamily::Bcrb, diagnostics: None },
        BoundPair { b_x: z, b_y: None, family: BoundFamily::Ezzb, diagnostics: None },
        w.into_pair(),
    ])
}

/// All three families for a rectangular map.
pub fn all_bounds_2d(
    map: &RectMap,
    sigma_x: f64,
    sigma_y: f64,
    j_s: f64,
    cfg: &WwbSearchConfig,
) -> Result<[BoundPair; 3], BoundsError> {
    check_sigma(sigma_x)?;
    check_sigma(sigma_y)?;
    let cond = CondFim { j_zx: sigma_x.powi(-2), j_zy: sigma_y.powi(-2) };
    Ok([bcrb(&prior_fim_2d(map, j_s)?, &cond), ezzb_2d(map, sigma_x, sigma_y)?, wwb_2d(map, sigma_x, sigma_y, cfg)?])
}

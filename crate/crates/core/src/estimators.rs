//! Observation models and the MMSE / MAP / ML position estimators.

use rand_core::RngCore;
use thiserror::Error;

use crate::geometry::{Point, Rect, RectMap, SegmentUnion};
use crate::rng::std_normal;
use crate::specfun::{norm_mass, norm_pdf};

/// Total posterior mass below which MMSE falls back to the nearest support point.
pub const MASS_FLOOR: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("noise standard deviation must be positive, got {0}")]
    NonpositiveSigma(f64),
    #[error("ranging needs at least 3 anchors, got {0}")]
    TooFewAnchors(usize),
    #[error("non-finite anchor {0}")]
    BadAnchor(usize),
    #[error("grid step must be positive, got {0}")]
    NonpositiveStep(f64),
    #[error("no grid point of step {step} falls inside the support")]
    EmptyGrid { step: f64 },
    #[error("{0}")]
    Unsupported(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Mmse,
    Map,
    Ml,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [EstimatorKind::Mmse, EstimatorKind::Map, EstimatorKind::Ml];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Mmse => "mmse",
            EstimatorKind::Map => "map",
            EstimatorKind::Ml => "ml",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mmse" => Some(EstimatorKind::Mmse),
            "map" => Some(EstimatorKind::Map),
            "ml" => Some(EstimatorKind::Ml),
            _ => None,
        }
    }
}

fn check_sigma(sigma: f64) -> Result<(), EstimatorError> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(EstimatorError::NonpositiveSigma(sigma))
    }
}

/// `z = p + n`, independent zero-mean Gaussian noise per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianObsModel {
    sigma_x: f64,
    sigma_y: f64,
}

impl GaussianObsModel {
    pub fn new(sigma_x: f64, sigma_y: f64) -> Result<Self, EstimatorError> {
        check_sigma(sigma_x)?;
        check_sigma(sigma_y)?;
        Ok(Self { sigma_x, sigma_y })
    }

    pub fn isotropic(sigma: f64) -> Result<Self, EstimatorError> {
        Self::new(sigma, sigma)
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    pub fn sigma_y(&self) -> f64 {
        self.sigma_y
    }

    pub fn observe<R: RngCore>(&self, p: Point, rng: &mut R) -> Point {
        let nx = std_normal(rng);
        let ny = std_normal(rng);
        Point::new(p.x + self.sigma_x * nx, p.y + self.sigma_y * ny)
    }
}

/// `z_i = |p - a_i| + n_i` for every anchor `a_i`, common noise `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangingObsModel {
    anchors: Vec<Point>,
    sigma: f64,
}

impl RangingObsModel {
    pub fn new(anchors: Vec<Point>, sigma: f64) -> Result<Self, EstimatorError> {
        check_sigma(sigma)?;
        if anchors.len() < 3 {
            return Err(EstimatorError::TooFewAnchors(anchors.len()));
        }
        if let Some(i) = anchors.iter().position(|a| !(a.x.is_finite() && a.y.is_finite())) {
            return Err(EstimatorError::BadAnchor(i));
        }
        Ok(Self { anchors, sigma })
    }

    /// Anchors at the four corners of `rect`, counter-clockwise from the lower left.
    pub fn at_corners(rect: &Rect, sigma: f64) -> Result<Self, EstimatorError> {
        let corners = vec![
            Point::new(rect.x_lo, rect.y_lo),
            Point::new(rect.x_hi, rect.y_lo),
            Point::new(rect.x_hi, rect.y_hi),
            Point::new(rect.x_lo, rect.y_hi),
        ];
        Self::new(corners, sigma)
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn observe<R: RngCore>(&self, p: Point, rng: &mut R) -> Vec<f64> {
        self.anchors.iter().map(|a| p.dist(a) + self.sigma * std_normal(rng)).collect()
    }

    /// Sum of squared range residuals; the negative log-likelihood up to
    /// scale and offset.
    pub fn residual(&self, z: &[f64], p: Point) -> f64 {
        self.anchors.iter().zip(z).map(|(a, zi)| (zi - p.dist(a)).powi(2)).sum()
    }
}

/// MMSE output; `fallback` marks the far-field case where every segment
/// mass underflowed and the nearest support point was returned instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmseEstimate<T> {
    pub value: T,
    pub fallback: bool,
}

/// Mass and first-moment offset of `N(z, sigma²)` on `[lo, hi]`, in units of
/// the standardised variable: `(P[lo <= X <= hi], E[(X - z)/sigma; lo <= X <= hi])`.
#[inline]
fn truncated(lo: f64, hi: f64, z: f64, sigma: f64) -> (f64, f64) {
    let a = (lo - z) / sigma;
    let b = (hi - z) / sigma;
    (norm_mass(a, b), norm_pdf(a) - norm_pdf(b))
}

/// Posterior mean of a uniform prior on `support` given `z = x + N(0, sigma²)`.
pub fn mmse_1d(support: &SegmentUnion, z: f64, sigma: f64) -> Result<MmseEstimate<f64>, EstimatorError> {
    check_sigma(sigma)?;
    let mut mass = 0.0;
    let mut moment = 0.0;
    for s in support.segments() {
        let (c, m) = truncated(s.lo(), s.hi(), z, sigma);
        mass += c;
        moment += m;
    }
    if !(mass >= MASS_FLOOR) {
        return Ok(MmseEstimate { value: support.nearest(z), fallback: true });
    }
    let x = z + sigma * moment / mass;
    Ok(MmseEstimate { value: x.clamp(support.lo(), support.hi()), fallback: false })
}

/// Nearest support point; equidistant ties go to the lower segment.
pub fn map_1d(support: &SegmentUnion, z: f64, sigma: f64) -> Result<f64, EstimatorError> {
    check_sigma(sigma)?;
    Ok(support.nearest(z))
}

/// Posterior mean on a rectangular map, rectangle by rectangle.
pub fn mmse_2d(map: &RectMap, z: Point, model: &GaussianObsModel) -> MmseEstimate<Point> {
    let (sx, sy) = (model.sigma_x, model.sigma_y);
    let mut mass = 0.0;
    let mut mom_x = 0.0;
    let mut mom_y = 0.0;
    for r in map.rects() {
        let (cx, mx) = truncated(r.x_lo, r.x_hi, z.x, sx);
        let (cy, my) = truncated(r.y_lo, r.y_hi, z.y, sy);
        mass += cx * cy;
        mom_x += mx * cy;
        mom_y += cx * my;
    }
    if !(mass >= MASS_FLOOR) {
        return MmseEstimate { value: map_2d_gaussian(map, z, model), fallback: true };
    }
    let bb = map.bounding_box();
    let p = Point::new(z.x + sx * mom_x / mass, z.y + sy * mom_y / mass);
    MmseEstimate { value: bb.clamp(p), fallback: false }
}

/// Support point closest to `z` in the noise-weighted metric; ties go to the
/// lowest rectangle index.
pub fn map_2d_gaussian(map: &RectMap, z: Point, model: &GaussianObsModel) -> Point {
    let mut best = z;
    let mut best_d = f64::INFINITY;
    for r in map.rects() {
        let c = r.clamp(z);
        let d = ((c.x - z.x) / model.sigma_x).powi(2) + ((c.y - z.y) / model.sigma_y).powi(2);
        if d < best_d {
            best_d = d;
            best = c;
            if d == 0.0 {
                break;
            }
        }
    }
    best
}

/// Points of a square lattice searched by the ranging estimators, plus the
/// region a refinement probe must stay in.
#[derive(Debug, Clone)]
pub struct SearchGrid {
    points: Vec<Point>,
    step: f64,
    constraint: Option<RectMap>,
}

/// Refinement probes per side around the best lattice point.
const REFINE_SIDE: i32 = 10;

impl SearchGrid {
    fn lattice(rect: &Rect, step: f64) -> Result<(usize, usize), EstimatorError> {
        if !(step.is_finite() && step > 0.0) {
            return Err(EstimatorError::NonpositiveStep(step));
        }
        let nx = (rect.width() / step + 1e-9).floor() as usize + 1;
        let ny = (rect.height() / step + 1e-9).floor() as usize + 1;
        Ok((nx, ny))
    }

    /// Lattice anchored at the bounding-box lower-left corner, restricted
    /// to the support.
    pub fn over_support(map: &RectMap, step: f64) -> Result<Self, EstimatorError> {
        let bb = map.bounding_box();
        let (nx, ny) = Self::lattice(&bb, step)?;
        let mut points = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let p = Point::new(bb.x_lo + i as f64 * step, bb.y_lo + j as f64 * step);
                if map.contains(p) {
                    points.push(p);
                }
            }
        }
        if points.is_empty() {
            return Err(EstimatorError::EmptyGrid { step });
        }
        Ok(Self { points, step, constraint: Some(map.clone()) })
    }

    /// Unconstrained lattice over `rect`.
    pub fn over_rect(rect: &Rect, step: f64) -> Result<Self, EstimatorError> {
        let (nx, ny) = Self::lattice(rect, step)?;
        let points = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| Point::new(rect.x_lo + i as f64 * step, rect.y_lo + j as f64 * step)))
            .collect();
        Ok(Self { points, step, constraint: None })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Minimiser of `cost` over the lattice, then over a `step/10` sub-lattice
    /// spanning `±step` around it. Ties keep the earliest point.
    pub fn argmin<F: Fn(Point) -> f64>(&self, cost: F) -> Point {
        self.argmin_indexed(|i| cost(self.points[i]), &cost)
    }

    /// As [`SearchGrid::argmin`], with the lattice pass costed by point index.
    fn argmin_indexed<G: Fn(usize) -> f64, F: Fn(Point) -> f64>(&self, lattice_cost: G, cost: F) -> Point {
        let mut best = self.points[0];
        let mut best_c = f64::INFINITY;
        for (i, &p) in self.points.iter().enumerate() {
            let c = lattice_cost(i);
            if c < best_c {
                best_c = c;
                best = p;
            }
        }
        let fine = self.step / REFINE_SIDE as f64;
        let center = best;
        for j in -REFINE_SIDE..=REFINE_SIDE {
            for i in -REFINE_SIDE..=REFINE_SIDE {
                if i == 0 && j == 0 {
                    continue;
                }
                let p = Point::new(center.x + i as f64 * fine, center.y + j as f64 * fine);
                if let Some(m) = &self.constraint {
                    if !m.contains(p) {
                        continue;
                    }
                }
                let c = cost(p);
                if c < best_c {
                    best_c = c;
                    best = p;
                }
            }
        }
        best
    }
}

/// A search grid with the anchor distances of every lattice point cached,
/// for repeated ranging estimates with one model.
#[derive(Debug, Clone)]
pub struct RangingSearch {
    grid: SearchGrid,
    model: RangingObsModel,
    dists: Vec<f64>,
}

impl RangingSearch {
    pub fn new(grid: SearchGrid, model: RangingObsModel) -> Self {
        let dists = grid.points.iter().flat_map(|p| model.anchors.iter().map(move |a| p.dist(a))).collect();
        Self { grid, model, dists }
    }

    pub fn model(&self) -> &RangingObsModel {
        &self.model
    }

    /// Same result as `grid.argmin(|p| model.residual(z, p))`.
    pub fn estimate(&self, z: &[f64]) -> Point {
        let k = self.model.anchors.len();
        self.grid.argmin_indexed(
            |i| self.dists[i * k..(i + 1) * k].iter().zip(z).map(|(d, zi)| (zi - d).powi(2)).sum(),
            |p| self.model.residual(z, p),
        )
    }
}

/// Default lattice step of the ranging estimators.
pub fn default_grid_step(sigma: f64) -> f64 {
    sigma / 10.0
}

/// Ranging MAP: likelihood maximiser over the support lattice.
pub fn map_2d_ranging(grid: &SearchGrid, z: &[f64], model: &RangingObsModel) -> Point {
    grid.argmin(|p| model.residual(z, p))
}

/// Lattice for the ranging ML search: the bounding box inflated by `3 sigma`.
pub fn ml_ranging_grid(map: &RectMap, model: &RangingObsModel, step: f64) -> Result<SearchGrid, EstimatorError> {
    SearchGrid::over_rect(&map.bounding_box().inflate(3.0 * model.sigma), step)
}

/// Ranging ML: unconstrained likelihood maximiser.
pub fn ml_ranging(grid: &SearchGrid, z: &[f64], model: &RangingObsModel) -> Point {
    grid.argmin(|p| model.residual(z, p))
}

/// Gaussian ML is the observation itself.
pub fn ml_gaussian(z: Point) -> Point {
    z
}

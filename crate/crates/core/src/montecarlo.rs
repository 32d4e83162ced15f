//! Reproducible Monte Carlo RMSE experiments and parameter sweeps.
//!
//! Trials are grouped in fixed chunks of [`CHUNK`]; chunks run in parallel
//! on the current rayon pool and their partial sums are merged in chunk
//! order, so every result is bit-identical for any thread count.

use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{all_bounds_1d, all_bounds_2d, presets, BoundFamily, BoundPair, BoundsError, WwbSearchConfig};
use crate::estimators::{
    default_grid_step, map_1d, map_2d_gaussian, map_2d_ranging, ml_ranging, ml_ranging_grid, mmse_1d, mmse_2d,
    EstimatorError, EstimatorKind, GaussianObsModel, RangingObsModel, RangingSearch, SearchGrid,
};
use crate::geometry::{Point, RectMap, SegmentUnion};
use crate::rng::{seek, substream, uniform_open};

/// Trials per parallel work unit.
pub const CHUNK: u64 = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("number of runs must be at least 1")]
    NoRuns,
    #[error("{0}")]
    Unsupported(&'static str),
    #[error("unknown sweep parameter `{0}` (expected sigma, dx, w, w2 or rho)")]
    UnknownParam(String),
    #[error("sweep parameter `{param}` does not apply to this map")]
    ParamNotApplicable { param: &'static str },
    #[error("trial {trial}: {source}")]
    Trial { trial: u64, source: EstimatorError },
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Support of the uniform prior, 1-D or 2-D.
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    Line(SegmentUnion),
    Plane(RectMap),
}

impl Support {
    pub fn is_plane(&self) -> bool {
        matches!(self, Support::Plane(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObsModel {
    Gaussian(GaussianObsModel),
    Ranging(RangingObsModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Where true positions are drawn from.
    pub truth: Support,
    /// Map assumed by the estimator; `None` means the true support.
    pub prior: Option<Support>,
    pub model: ObsModel,
    pub estimator: EstimatorKind,
    pub n_runs: u64,
    pub master_seed: u64,
    /// Substream id; sweeps use the row index.
    pub row: u64,
    /// Lattice step of the ranging estimators; default `sigma / 10`.
    pub grid_step: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(truth: Support, model: ObsModel, estimator: EstimatorKind, n_runs: u64, master_seed: u64) -> Self {
        Self { truth, prior: None, model, estimator, n_runs, master_seed, row: 0, grid_step: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentResult {
    pub mse_x: f64,
    pub mse_y: Option<f64>,
    /// Standard errors of the MSE estimates.
    pub se_mse_x: f64,
    pub se_mse_y: Option<f64>,
    pub se_mse_total: f64,
    pub rmse_x: f64,
    pub rmse_y: Option<f64>,
    /// `sqrt(mse_x + mse_y)`.
    pub rmse_total: f64,
    /// Delta-method standard errors of the RMSE values.
    pub se_rmse_x: f64,
    pub se_rmse_y: Option<f64>,
    pub se_rmse_total: f64,
    pub n_runs: u64,
    pub master_seed: u64,
    /// Trials where MMSE fell back to the nearest support point.
    pub fallbacks: u64,
}

/// Uniform draw over a rectangular map: rectangle by area, then uniform inside.
pub fn sample_in_map<R: RngCore>(map: &RectMap, rng: &mut R) -> Point {
    let rects = map.rects();
    let mut t = uniform_open(rng) * map.area();
    let mut pick = rects.len() - 1;
    for (i, r) in rects.iter().enumerate() {
        let a = r.area();
        if t < a {
            pick = i;
            break;
        }
        t -= a;
    }
    let r = &rects[pick];
    let u = uniform_open(rng);
    let v = uniform_open(rng);
    Point::new(r.x_lo + u * r.width(), r.y_lo + v * r.height())
}

/// Uniform draw over a union of segments.
pub fn sample_in_segments<R: RngCore>(support: &SegmentUnion, rng: &mut R) -> f64 {
    let segs = support.segments();
    let mut t = uniform_open(rng) * support.total_width();
    let mut pick = segs.len() - 1;
    for (i, s) in segs.iter().enumerate() {
        if t < s.width() {
            pick = i;
            break;
        }
        t -= s.width();
    }
    let s = &segs[pick];
    s.lo() + uniform_open(rng) * s.width()
}

/// Uniform draw over either kind of support; 1-D draws have `y = 0`.
pub fn sample_uniform<R: RngCore>(support: &Support, rng: &mut R) -> Point {
    match support {
        Support::Line(s) => Point::new(sample_in_segments(s, rng), 0.0),
        Support::Plane(m) => sample_in_map(m, rng),
    }
}

/// Estimator with its precomputed state.
enum Prepared<'a> {
    Line { prior: &'a SegmentUnion, sigma: f64, kind: EstimatorKind },
    Gaussian { prior: &'a RectMap, model: GaussianObsModel, kind: EstimatorKind },
    Ranging(RangingSearch),
}

/// Squared errors of one trial and whether MMSE fell back.
struct TrialOutcome {
    ex2: f64,
    ey2: f64,
    fallback: bool,
}

impl Prepared<'_> {
    fn trial(&self, truth: &Support, rng: &mut ChaCha8Rng) -> Result<TrialOutcome, EstimatorError> {
        let p = sample_uniform(truth, rng);
        match self {
            Prepared::Line { prior, sigma, kind } => {
                let z = p.x + sigma * crate::rng::std_normal(rng);
                let (x, fallback) = match kind {
                    EstimatorKind::Mmse => {
                        let e = mmse_1d(prior, z, *sigma)?;
                        (e.value, e.fallback)
                    }
                    EstimatorKind::Map => (map_1d(prior, z, *sigma)?, false),
                    EstimatorKind::Ml => (z, false),
                };
                Ok(TrialOutcome { ex2: (x - p.x).powi(2), ey2: 0.0, fallback })
            }
            Prepared::Gaussian { prior, model, kind } => {
                let z = model.observe(p, rng);
                let (e, fallback) = match kind {
                    EstimatorKind::Mmse => {
                        let e = mmse_2d(prior, z, model);
                        (e.value, e.fallback)
                    }
                    EstimatorKind::Map => (map_2d_gaussian(prior, z, model), false),
                    EstimatorKind::Ml => (z, false),
                };
                Ok(TrialOutcome { ex2: (e.x - p.x).powi(2), ey2: (e.y - p.y).powi(2), fallback })
            }
            Prepared::Ranging(search) => {
                let z = search.model().observe(p, rng);
                let e = search.estimate(&z);
                Ok(TrialOutcome { ex2: (e.x - p.x).powi(2), ey2: (e.y - p.y).powi(2), fallback: false })
            }
        }
    }
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared<'_>, McError> {
    let prior = cfg.prior.as_ref().unwrap_or(&cfg.truth);
    if prior.is_plane() != cfg.truth.is_plane() {
        return Err(McError::Unsupported("prior and true support must have the same dimension"));
    }
    Ok(match (prior, &cfg.model) {
        (Support::Line(s), ObsModel::Gaussian(g)) => {
            Prepared::Line { prior: s, sigma: g.sigma_x(), kind: cfg.estimator }
        }
        (Support::Line(_), ObsModel::Ranging(_)) => {
            return Err(McError::Unsupported("the ranging model needs a 2-D map"));
        }
        (Support::Plane(m), ObsModel::Gaussian(g)) => Prepared::Gaussian { prior: m, model: *g, kind: cfg.estimator },
        (Support::Plane(m), ObsModel::Ranging(r)) => {
            let step = cfg.grid_step.unwrap_or_else(|| default_grid_step(r.sigma()));
            let grid = match cfg.estimator {
                EstimatorKind::Map => SearchGrid::over_support(m, step)?,
                EstimatorKind::Ml => ml_ranging_grid(m, r, step)?,
                EstimatorKind::Mmse => {
                    return Err(McError::Unsupported("MMSE is only available for the gaussian model"));
                }
            };
            Prepared::Ranging(RangingSearch::new(grid, r.clone()))
        }
    })
}

#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    n: u64,
    sx: f64,
    sx2: f64,
    sy: f64,
    sy2: f64,
    st: f64,
    st2: f64,
    fallbacks: u64,
}

impl Partial {
    fn push(&mut self, o: &TrialOutcome) {
        let t = o.ex2 + o.ey2;
        self.n += 1;
        self.sx += o.ex2;
        self.sx2 += o.ex2 * o.ex2;
        self.sy += o.ey2;
        self.sy2 += o.ey2 * o.ey2;
        self.st += t;
        self.st2 += t * t;
        self.fallbacks += o.fallback as u64;
    }

    fn merge(&mut self, o: &Partial) {
        self.n += o.n;
        self.sx += o.sx;
        self.sx2 += o.sx2;
        self.sy += o.sy;
        self.sy2 += o.sy2;
        self.st += o.st;
        self.st2 += o.st2;
        self.fallbacks += o.fallbacks;
    }
}

/// `(mean, standard error of the mean)` from a sum and a sum of squares.
fn mean_se(n: u64, s: f64, s2: f64) -> (f64, f64) {
    let nf = n as f64;
    let mean = s / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = ((s2 - s * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

fn rmse_se(mse: f64, se_mse: f64) -> (f64, f64) {
    let r = mse.sqrt();
    (r, if r > 0.0 { se_mse / (2.0 * r) } else { 0.0 })
}

/// Runs `cfg.n_runs` trials and reports per-axis and overall RMSE.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, McError> {
    if cfg.n_runs == 0 {
        return Err(McError::NoRuns);
    }
    let prepared = prepare(cfg)?;
    let n_chunks = cfg.n_runs.div_ceil(CHUNK);
    let partials: Vec<Result<Partial, McError>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(cfg.n_runs);
            let mut rng = substream(cfg.master_seed, cfg.row, start);
            let mut part = Partial::default();
            for trial in start..end {
                seek(&mut rng, trial);
                let o = prepared.trial(&cfg.truth, &mut rng).map_err(|source| McError::Trial { trial, source })?;
                part.push(&o);
            }
            Ok(part)
        })
        .collect();
    let mut total = Partial::default();
    for p in partials {
        total.merge(&p?);
    }

    let n = total.n;
    let (mse_x, se_mse_x) = mean_se(n, total.sx, total.sx2);
    let (rmse_x, se_rmse_x) = rmse_se(mse_x, se_mse_x);
    let (mse_t, se_mse_total) = mean_se(n, total.st, total.st2);
    let plane = cfg.truth.is_plane();
    let (mse_y, se_mse_y, rmse_y, se_rmse_y, rmse_total, se_rmse_total) = if plane {
        let (m, s) = mean_se(n, total.sy, total.sy2);
        let (r, rs) = rmse_se(m, s);
        let (_, ts) = rmse_se(mse_t, se_mse_total);
        (Some(m), Some(s), Some(r), Some(rs), (mse_x + m).sqrt(), ts)
    } else {
        (None, None, None, None, rmse_x, se_rmse_x)
    };
    Ok(ExperimentResult {
        mse_x,
        mse_y,
        se_mse_x,
        se_mse_y,
        se_mse_total,
        rmse_x,
        rmse_y,
        rmse_total,
        se_rmse_x,
        se_rmse_y,
        se_rmse_total,
        n_runs: n,
        master_seed: cfg.master_seed,
        fallbacks: total.fallbacks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Sigma,
    Dx,
    W,
    W2,
    /// `w / sigma` of map #1, varied through sigma.
    Rho,
}

impl SweepParam {
    pub fn parse(s: &str) -> Result<Self, McError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sigma" => Ok(SweepParam::Sigma),
            "dx" => Ok(SweepParam::Dx),
            "w" => Ok(SweepParam::W),
            "w2" => Ok(SweepParam::W2),
            "rho" => Ok(SweepParam::Rho),
            _ => Err(McError::UnknownParam(s.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Sigma => "sigma",
            SweepParam::Dx => "dx",
            SweepParam::W => "w",
            SweepParam::W2 => "w2",
            SweepParam::Rho => "rho",
        }
    }

    /// Column header with unit.
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::Sigma => "sigma_m",
            SweepParam::Dx => "dx_m",
            SweepParam::W => "w_m",
            SweepParam::W2 => "w2_m",
            SweepParam::Rho => "rho",
        }
    }
}

/// Parametric map of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    /// Two segments of width `w` separated by `dx`.
    Map1 { w: f64, dx: f64 },
    /// L-shaped map; with `area` set, `h1` follows `w2` to keep the area fixed.
    Map2 { w1: f64, w2: f64, h1: f64, h2: f64, area: Option<f64> },
    /// Any fixed support.
    Fixed(Support),
}

impl Scenario {
    fn with(&self, param: SweepParam, value: f64) -> Result<Scenario, McError> {
        Ok(match (self.clone(), param) {
            (s, SweepParam::Sigma) => s,
            (Scenario::Map1 { dx, .. }, SweepParam::W) => Scenario::Map1 { w: value, dx },
            (Scenario::Map1 { w, .. }, SweepParam::Dx) => Scenario::Map1 { w, dx: value },
            (s @ Scenario::Map1 { .. }, SweepParam::Rho) => s,
            (Scenario::Map2 { w1, h1, h2, area, .. }, SweepParam::W2) => {
                let h1 = match area {
                    Some(a) => presets::map2_h1_for_area(a, w1, value, h2)?,
                    None => h1,
                };
                Scenario::Map2 { w1, w2: value, h1, h2, area }
            }
            (_, p) => return Err(McError::ParamNotApplicable { param: p.name() }),
        })
    }

    pub fn support(&self) -> Result<Support, McError> {
        Ok(match self {
            Scenario::Map1 { w, dx } => Support::Line(presets::map1_support(*w, *dx)?),
            Scenario::Map2 { w1, w2, h1, h2, .. } => Support::Plane(presets::map2_map(*w1, *w2, *h1, *h2)?),
            Scenario::Fixed(s) => s.clone(),
        })
    }

    /// Extra geometry column printed by sweeps (`h1` of an area-preserving map #2).
    fn derived(&self) -> Option<(&'static str, f64)> {
        match self {
            Scenario::Map2 { h1, area: Some(_), .. } => Some(("h1_m", *h1)),
            _ => None,
        }
    }
}

/// Observation model of a sweep, instantiated per row once sigma is known.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Gaussian,
    /// Anchors at the corners of the true support's bounding box.
    RangingCorners,
    Ranging(Vec<Point>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenario: Scenario,
    pub sigma: f64,
    pub model: ModelSpec,
    /// Estimators assume the bounding box of the true map instead of the map.
    pub bounding_box_prior: bool,
    pub estimators: Vec<EstimatorKind>,
    pub bounds: Vec<BoundFamily>,
    pub j_s: f64,
    pub wwb: WwbSearchConfig,
    pub n_runs: u64,
    pub master_seed: u64,
    pub grid_step: Option<f64>,
    /// Substream id of the first row.
    pub row_offset: u64,
}

impl SweepSpec {
    pub fn new(scenario: Scenario, sigma: f64) -> Self {
        Self {
            scenario,
            sigma,
            model: ModelSpec::Gaussian,
            bounding_box_prior: false,
            estimators: EstimatorKind::ALL.to_vec(),
            bounds: BoundFamily::ALL.to_vec(),
            j_s: crate::bounds::DEFAULT_JS,
            wwb: WwbSearchConfig::default(),
            n_runs: 10_000,
            master_seed: 0,
            grid_step: None,
            row_offset: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub sigma: f64,
    /// Derived geometry column, if the scenario has one.
    pub derived: Option<(&'static str, f64)>,
    pub plane: bool,
    pub bounds: Vec<BoundPair>,
    pub results: Vec<(EstimatorKind, ExperimentResult)>,
}

fn bounding_box_support(s: &Support) -> Result<Support, McError> {
    Ok(match s {
        Support::Line(u) => Support::Line(SegmentUnion::new([(u.lo(), u.hi())]).map_err(BoundsError::from)?),
        Support::Plane(m) => Support::Plane(RectMap::new(vec![m.bounding_box()]).map_err(BoundsError::from)?),
    })
}

/// Bounds of the selected families under the Gaussian model.
pub fn bounds_for(
    support: &Support,
    sigma: f64,
    j_s: f64,
    wwb: &WwbSearchConfig,
    families: &[BoundFamily],
) -> Result<Vec<BoundPair>, McError> {
    if families.is_empty() {
        return Ok(Vec::new());
    }
    let all = match support {
        Support::Line(s) => all_bounds_1d(s, sigma, j_s, wwb)?,
        Support::Plane(m) => all_bounds_2d(m, sigma, sigma, j_s, wwb)?,
    };
    Ok(families.iter().map(|f| all[BoundFamily::ALL.iter().position(|g| g == f).unwrap()]).collect())
}

/// One row per value; all estimators of a row share the row's substream.
pub fn sweep(spec: &SweepSpec, param: SweepParam, values: &[f64]) -> Result<Vec<SweepRow>, McError> {
    if spec.n_runs == 0 && !spec.estimators.is_empty() {
        return Err(McError::NoRuns);
    }
    if param == SweepParam::Rho && !matches!(spec.scenario, Scenario::Map1 { .. }) {
        return Err(McError::ParamNotApplicable { param: "rho" });
    }
    if !matches!(spec.model, ModelSpec::Gaussian) && !spec.bounds.is_empty() {
        return Err(McError::Unsupported("bounds are available for the gaussian model only"));
    }
    let mut rows = Vec::with_capacity(values.len());
    for (i, &value) in values.iter().enumerate() {
        let scenario = spec.scenario.with(param, value)?;
        let sigma = match (param, &scenario) {
            (SweepParam::Sigma, _) => value,
            (SweepParam::Rho, Scenario::Map1 { w, .. }) => w / value,
            _ => spec.sigma,
        };
        let truth = scenario.support()?;
        let bounds = bounds_for(&truth, sigma, spec.j_s, &spec.wwb, &spec.bounds)?;
        let model = match &spec.model {
            ModelSpec::Gaussian => ObsModel::Gaussian(GaussianObsModel::isotropic(sigma)?),
            ModelSpec::RangingCorners => match &truth {
                Support::Plane(m) => ObsModel::Ranging(RangingObsModel::at_corners(&m.bounding_box(), sigma)?),
                Support::Line(_) => return Err(McError::Unsupported("the ranging model needs a 2-D map")),
            },
            ModelSpec::Ranging(a) => ObsModel::Ranging(RangingObsModel::new(a.clone(), sigma)?),
        };
        let prior = if spec.bounding_box_prior { Some(bounding_box_support(&truth)?) } else { None };
        let mut results = Vec::with_capacity(spec.estimators.len());
        for &kind in &spec.estimators {
            let cfg = ExperimentConfig {
                truth: truth.clone(),
                prior: prior.clone(),
                model: model.clone(),
                estimator: kind,
                n_runs: spec.n_runs,
                master_seed: spec.master_seed,
                row: spec.row_offset + i as u64,
                grid_step: spec.grid_step,
            };
            results.push((kind, run_experiment(&cfg)?));
        }
        rows.push(SweepRow { value, sigma, derived: scenario.derived(), plane: truth.is_plane(), bounds, results });
    }
    Ok(rows)
}

/// Ranging MAP on a single observation, for callers outside the Monte Carlo loop.
pub fn ranging_map_estimate(map: &RectMap, z: &[f64], model: &RangingObsModel, step: f64) -> Result<Point, McError> {
    let grid = SearchGrid::over_support(map, step)?;
    Ok(map_2d_ranging(&grid, z, model))
}

/// Ranging ML on a single observation.
pub fn ranging_ml_estimate(map: &RectMap, z: &[f64], model: &RangingObsModel, step: f64) -> Result<Point, McError> {
    let grid = ml_ranging_grid(map, model, step)?;
    Ok(ml_ranging(&grid, z, model))
}

//! Command-line front end: `bounds`, `simulate`, `sweep`, `presets`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{all_bounds_1d, all_bounds_2d, presets, BoundFamily, WwbSearchConfig, DEFAULT_JS};
use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, GaussianObsModel, RangingObsModel};
use crate::figures::{self, FigureOptions, DEFAULT_SIGMA};
use crate::geometry::{Point, RectMap, SegmentUnion};
use crate::mapfile::{floor_plan, load_map, MapFile};
use crate::montecarlo::{
    run_experiment, sweep, ExperimentConfig, ModelSpec, ObsModel, Scenario, Support, SweepParam, SweepSpec,
};
use crate::output::{bounds_table, experiment_table, sweep_table, Table};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "MAPBOUND_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mapbound", version, about = "Accuracy bounds and Monte Carlo RMSE for map-aware positioning")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// BCRB, EZZB and WWB of a map under Gaussian position noise.
    Bounds(BoundsArgs),
    /// Monte Carlo RMSE of one or more estimators.
    Simulate(SimulateArgs),
    /// Bounds and RMSE over a parameter grid, or a figure preset.
    Sweep(SweepArgs),
    /// Write a built-in map as a JSON map file.
    Presets(PresetsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetName {
    Map1,
    Map2,
    Floor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelName {
    Gaussian,
    Ranging,
}

#[derive(Debug, Clone, Default, Args)]
struct PresetParams {
    /// map1: segment width (m) [default 1]
    #[arg(long)]
    w: Option<f64>,
    /// map1: gap between the segments (m) [default 1]
    #[arg(long)]
    dx: Option<f64>,
    /// map2: width of the upper block (m) [default 5]
    #[arg(long)]
    w1: Option<f64>,
    /// map2: extra width of the base (m) [default 5]
    #[arg(long)]
    w2: Option<f64>,
    /// map2: base height (m) [default 5, or derived from --area]
    #[arg(long)]
    h1: Option<f64>,
    /// map2: height of the upper block (m) [default 5]
    #[arg(long)]
    h2: Option<f64>,
    /// map2: keep this area (m²) by deriving h1 from w1, w2, h2
    #[arg(long, conflicts_with = "h1")]
    area: Option<f64>,
    /// Replace the map by its bounding box
    #[arg(long)]
    bounding_box: bool,
}

#[derive(Debug, Clone, Args)]
struct MapSource {
    /// JSON map file
    #[arg(long, conflicts_with = "preset")]
    map: Option<PathBuf>,
    /// Built-in map
    #[arg(long, value_enum)]
    preset: Option<PresetName>,
    #[command(flatten)]
    params: PresetParams,
}

#[derive(Debug, Clone, Args)]
struct NoiseArgs {
    /// Noise standard deviation on both axes (m) [default 3]
    #[arg(long)]
    sigma: Option<f64>,
    /// Noise standard deviation along x (m), overrides --sigma
    #[arg(long)]
    sigma_x: Option<f64>,
    /// Noise standard deviation along y (m), overrides --sigma
    #[arg(long)]
    sigma_y: Option<f64>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: MapSource,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Fisher information of the edge-smoothing function
    #[arg(long, default_value_t = DEFAULT_JS)]
    js: f64,
    /// Bound families (bcrb, ezzb, wwb)
    #[arg(long, value_delimiter = ',', default_value = "bcrb,ezzb,wwb")]
    family: Vec<String>,
    /// Output file (default: standard output)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct McArgs {
    /// Observation model
    #[arg(long, value_enum, default_value_t = ModelName::Gaussian)]
    model: ModelName,
    /// Ranging anchors: `corners` or `x1,y1;x2,y2;...`
    #[arg(long, default_value = "corners")]
    anchors: String,
    /// Trials per estimate
    #[arg(long, default_value_t = 10_000)]
    runs: u64,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Lattice step of the ranging estimators (m) [default sigma/10]
    #[arg(long)]
    grid_step: Option<f64>,
    /// Estimators assume the bounding box instead of the map
    #[arg(long)]
    prior_bounding_box: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: MapSource,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Estimators (mmse, map, ml)
    #[arg(long, value_delimiter = ',', default_value = "mmse")]
    estimator: Vec<String>,
    #[command(flatten)]
    mc: McArgs,
    /// Output file (default: standard output)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Reproduce the data of a published figure (4 to 8)
    #[arg(long, conflicts_with_all = ["param", "values", "map", "preset"])]
    figure: Option<u32>,
    #[command(flatten)]
    source: MapSource,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Swept parameter: sigma, dx, w, w2 or rho
    #[arg(long)]
    param: Option<String>,
    /// Values: comma-separated numbers and `start:step:end` ranges
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    /// Estimators (mmse, map, ml)
    #[arg(long, value_delimiter = ',')]
    estimator: Option<Vec<String>>,
    /// Bound families (bcrb, ezzb, wwb, or `none`)
    #[arg(long, value_delimiter = ',')]
    family: Option<Vec<String>>,
    /// Fisher information of the edge-smoothing function
    #[arg(long, default_value_t = DEFAULT_JS)]
    js: f64,
    #[command(flatten)]
    mc: McArgs,
    /// Output file (default: standard output)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PresetsArgs {
    #[arg(value_enum)]
    name: PresetName,
    #[command(flatten)]
    params: PresetParams,
    /// Output file (default: standard output)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(format!("--{name} must be positive, got {v}")))
    }
}

impl NoiseArgs {
    fn resolve(&self) -> Result<(f64, f64)> {
        let s = positive("sigma", self.sigma.unwrap_or(DEFAULT_SIGMA))?;
        let sx = positive("sigma-x", self.sigma_x.unwrap_or(s))?;
        let sy = positive("sigma-y", self.sigma_y.unwrap_or(s))?;
        Ok((sx, sy))
    }
}

impl PresetParams {
    fn reject(&self, preset: PresetName, names: &[(&str, bool)]) -> Result<()> {
        for (name, set) in names {
            if *set {
                return Err(Error::invalid(format!(
                    "--{name} does not apply to preset {}",
                    preset.to_possible_value().unwrap().get_name()
                )));
            }
        }
        Ok(())
    }

    fn scenario(&self, preset: PresetName) -> Result<Scenario> {
        let p = self;
        match preset {
            PresetName::Map1 => {
                p.reject(
                    preset,
                    &[
                        ("w1", p.w1.is_some()),
                        ("w2", p.w2.is_some()),
                        ("h1", p.h1.is_some()),
                        ("h2", p.h2.is_some()),
                        ("area", p.area.is_some()),
                    ],
                )?;
                let w = p.w.unwrap_or(1.0);
                let dx = p.dx.unwrap_or(1.0);
                presets::map1_support(w, dx)?;
                Ok(Scenario::Map1 { w, dx })
            }
            PresetName::Map2 => {
                p.reject(preset, &[("w", p.w.is_some()), ("dx", p.dx.is_some())])?;
                let (w1, w2, h2) = (p.w1.unwrap_or(5.0), p.w2.unwrap_or(5.0), p.h2.unwrap_or(5.0));
                let h1 = match p.area {
                    Some(a) => presets::map2_h1_for_area(a, w1, w2, h2)?,
                    None => p.h1.unwrap_or(5.0),
                };
                presets::map2_map(w1, w2, h1, h2)?;
                Ok(Scenario::Map2 { w1, w2, h1, h2, area: p.area })
            }
            PresetName::Floor => {
                p.reject(
                    preset,
                    &[
                        ("w", p.w.is_some()),
                        ("dx", p.dx.is_some()),
                        ("w1", p.w1.is_some()),
                        ("w2", p.w2.is_some()),
                        ("h1", p.h1.is_some()),
                        ("h2", p.h2.is_some()),
                        ("area", p.area.is_some()),
                    ],
                )?;
                Ok(Scenario::Fixed(Support::Plane(floor_plan())))
            }
        }
    }

    fn any_set(&self) -> bool {
        [self.w, self.dx, self.w1, self.w2, self.h1, self.h2, self.area].iter().any(Option::is_some)
    }
}

fn bounding_box(s: &Support) -> Result<Support> {
    Ok(match s {
        Support::Line(u) => Support::Line(SegmentUnion::new([(u.lo(), u.hi())])?),
        Support::Plane(m) => Support::Plane(RectMap::new(vec![m.bounding_box()])?),
    })
}

impl MapSource {
    fn scenario(&self) -> Result<Scenario> {
        let sc = match (&self.map, self.preset) {
            (Some(path), None) => {
                if self.params.any_set() {
                    return Err(Error::invalid("preset dimensions cannot be combined with --map"));
                }
                Scenario::Fixed(load_map(path)?)
            }
            (None, Some(p)) => self.params.scenario(p)?,
            _ => return Err(Error::invalid("exactly one map source is required: --map FILE or --preset NAME")),
        };
        if self.params.bounding_box {
            return Ok(Scenario::Fixed(bounding_box(&sc.support()?)?));
        }
        Ok(sc)
    }
}

fn families(names: &[String]) -> Result<Vec<BoundFamily>> {
    if names.len() == 1 && names[0].trim().eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    names
        .iter()
        .map(|n| {
            BoundFamily::parse(n)
                .ok_or_else(|| Error::invalid(format!("unknown bound family `{n}` (expected bcrb, ezzb or wwb)")))
        })
        .collect()
}

fn estimators(names: &[String]) -> Result<Vec<EstimatorKind>> {
    names
        .iter()
        .map(|n| {
            EstimatorKind::parse(n)
                .ok_or_else(|| Error::invalid(format!("unknown estimator `{n}` (expected mmse, map or ml)")))
        })
        .collect()
}

fn parse_anchors(spec: &str) -> Result<Option<Vec<Point>>> {
    if spec.trim().eq_ignore_ascii_case("corners") {
        return Ok(None);
    }
    let bad = || Error::invalid(format!("--anchors: expected `corners` or `x1,y1;x2,y2;...`, got `{spec}`"));
    spec.split(';')
        .map(|pair| {
            let mut it = pair.split(',').map(|v| v.trim().parse::<f64>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(x)), Some(Ok(y)), None) if x.is_finite() && y.is_finite() => Ok(Point::new(x, y)),
                _ => Err(bad()),
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// Numbers and inclusive `start:step:end` ranges separated by commas.
pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || Error::invalid(format!("--values: cannot parse `{item}`"));
        let parts: Vec<f64> =
            item.split(':').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
        match parts.as_slice() {
            [v] if v.is_finite() => out.push(*v),
            [a, s, b] if a.is_finite() && b.is_finite() && s.is_finite() && *s > 0.0 => {
                out.extend(figures::range_inclusive(*a, *s, *b));
            }
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

impl McArgs {
    fn check(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::invalid("--runs must be at least 1"));
        }
        if let Some(s) = self.grid_step {
            positive("grid-step", s)?;
        }
        Ok(())
    }

    fn model_spec(&self) -> Result<ModelSpec> {
        Ok(match self.model {
            ModelName::Gaussian => ModelSpec::Gaussian,
            ModelName::Ranging => match parse_anchors(&self.anchors)? {
                None => ModelSpec::RangingCorners,
                Some(a) => ModelSpec::Ranging(a),
            },
        })
    }
}

fn cannot_write(p: &std::path::Path, e: io::Error) -> Error {
    Error::invalid(format!("cannot write {}: {e}", p.display()))
}

fn emit(table: &Table, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(p) => {
            let write = || -> io::Result<()> {
                let mut f = BufWriter::new(File::create(p)?);
                table.write(&mut f)?;
                f.flush()
            };
            write().map_err(|e| cannot_write(p, e))?;
        }
        None => {
            let stdout = io::stdout();
            table.write(stdout.lock())?;
        }
    }
    Ok(())
}

fn cmd_bounds(a: &BoundsArgs) -> Result<()> {
    let support = a.source.scenario()?.support()?;
    let (sx, sy) = a.noise.resolve()?;
    positive("js", a.js)?;
    let fams = families(&a.family)?;
    let cfg = WwbSearchConfig::default();
    let all = match &support {
        Support::Line(s) => all_bounds_1d(s, sx, a.js, &cfg)?,
        Support::Plane(m) => all_bounds_2d(m, sx, sy, a.js, &cfg)?,
    };
    let chosen: Vec<_> = all.into_iter().filter(|b| fams.contains(&b.family)).collect();
    emit(&bounds_table(&chosen), a.output.as_ref())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    a.mc.check()?;
    let truth = a.source.scenario()?.support()?;
    let (sx, sy) = a.noise.resolve()?;
    let kinds = estimators(&a.estimator)?;
    let model = match a.mc.model_spec()? {
        ModelSpec::Gaussian => ObsModel::Gaussian(GaussianObsModel::new(sx, sy)?),
        spec => {
            if sx != sy {
                return Err(Error::invalid("the ranging model takes a single --sigma"));
            }
            let Support::Plane(m) = &truth else {
                return Err(Error::invalid("the ranging model needs a 2-D map"));
            };
            match spec {
                ModelSpec::Ranging(anchors) => ObsModel::Ranging(RangingObsModel::new(anchors, sx)?),
                _ => ObsModel::Ranging(RangingObsModel::at_corners(&m.bounding_box(), sx)?),
            }
        }
    };
    let prior = if a.mc.prior_bounding_box { Some(bounding_box(&truth)?) } else { None };
    let mut t: Option<Table> = None;
    for kind in kinds {
        let cfg = ExperimentConfig {
            truth: truth.clone(),
            prior: prior.clone(),
            model: model.clone(),
            estimator: kind,
            n_runs: a.mc.runs,
            master_seed: a.mc.seed,
            row: 0,
            grid_step: a.mc.grid_step,
        };
        let r = run_experiment(&cfg)?;
        let model_name = match a.mc.model {
            ModelName::Gaussian => "gaussian",
            ModelName::Ranging => "ranging",
        };
        let part = experiment_table(&[("estimator", kind.name().into()), ("model", model_name.into())], &[r]);
        match &mut t {
            None => t = Some(part),
            Some(t) => t.rows.extend(part.rows),
        }
    }
    emit(&t.unwrap_or_default(), a.output.as_ref())
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    a.mc.check()?;
    if let Some(n) = a.figure {
        let opts = FigureOptions { n_runs: a.mc.runs, master_seed: a.mc.seed };
        return emit(&figures::figure(n, &opts)?, a.output.as_ref());
    }
    let param =
        SweepParam::parse(a.param.as_deref().ok_or_else(|| Error::invalid("--param is required without --figure"))?)?;
    let values =
        parse_values(a.values.as_deref().ok_or_else(|| Error::invalid("--values is required without --figure"))?)?;
    let scenario = a.source.scenario()?;
    let (sx, sy) = a.noise.resolve()?;
    if sx != sy {
        return Err(Error::invalid("sweeps take a single --sigma"));
    }
    if param == SweepParam::Sigma || param == SweepParam::Rho {
        if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::invalid(format!("--values: {} must be positive, got {v}", param.name())));
        }
    }
    positive("js", a.js)?;
    let plane = scenario.support()?.is_plane();
    let mut spec = SweepSpec::new(scenario, sx);
    spec.model = a.mc.model_spec()?;
    let ranging = !matches!(spec.model, ModelSpec::Gaussian);
    spec.estimators = match &a.estimator {
        Some(e) => estimators(e)?,
        None if ranging => vec![EstimatorKind::Map, EstimatorKind::Ml],
        None => EstimatorKind::ALL.to_vec(),
    };
    spec.bounds = match &a.family {
        Some(f) => families(f)?,
        None if ranging => Vec::new(),
        None => BoundFamily::ALL.to_vec(),
    };
    spec.bounding_box_prior = a.mc.prior_bounding_box;
    spec.j_s = a.js;
    spec.n_runs = a.mc.runs;
    spec.master_seed = a.mc.seed;
    spec.grid_step = a.mc.grid_step;
    let rows = sweep(&spec, param, &values)?;
    emit(&sweep_table(param.column(), plane, &rows), a.output.as_ref())
}

fn cmd_presets(a: &PresetsArgs) -> Result<()> {
    let mut support = a.params.scenario(a.name)?.support()?;
    if a.params.bounding_box {
        support = bounding_box(&support)?;
    }
    let json = MapFile::from_support(&support).to_json();
    match &a.output {
        Some(p) => std::fs::write(p, json).map_err(|e| cannot_write(p, e))?,
        None => io::stdout().lock().write_all(json.as_bytes())?,
    }
    Ok(())
}

/// Applies `MAPBOUND_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| Error::invalid(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    // A pool may already exist when called twice in one process; keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cli: &Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Presets(a) => cmd_presets(a),
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! Sweep presets reproducing the data behind the published figures.
//!
//! Parameters stated with each figure are hard-coded; grids the figures
//! leave unstated (the SNR axis of figure 4, the `w2` values of figure 7)
//! are fixed choices documented on each function.

use crate::bounds::BoundFamily;
use crate::estimators::EstimatorKind;
use crate::mapfile::floor_plan;
use crate::montecarlo::{sweep, McError, ModelSpec, Scenario, Support, SweepParam, SweepRow, SweepSpec};
use crate::output::{fmt_f64, sweep_table, Table};

pub const FIGURES: [u32; 5] = [4, 5, 6, 7, 8];

/// Noise standard deviation assumed unless a figure says otherwise (m).
pub const DEFAULT_SIGMA: f64 = 3.0;

/// `start, start + step, ...` up to `end` inclusive (with a 1e-9 relative slack).
pub fn range_inclusive(start: f64, step: f64, end: f64) -> Vec<f64> {
    let n = ((end - start) / step * (1.0 + 1e-9) + 1e-9).floor();
    if !(n >= 0.0) {
        return Vec::new();
    }
    (0..=n as usize).map(|i| start + i as f64 * step).collect()
}

/// `n` points log-spaced between `10^a` and `10^b`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![10f64.powf(a)];
    }
    (0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
}

/// Figure 4 SNR axis: `rho = w / sigma` on 31 log-spaced points over [10^-1.5, 10^1.5].
pub fn fig4_rho() -> Vec<f64> {
    logspace(-1.5, 1.5, 31)
}

/// Figure 5 gap axis: 0.25 m steps up to 15 m, plus 20 m and 30 m.
pub fn fig5_dx() -> Vec<f64> {
    let mut v = range_inclusive(0.25, 0.25, 15.0);
    v.extend([20.0, 30.0]);
    v
}

pub fn fig6_w() -> Vec<f64> {
    range_inclusive(0.5, 0.5, 9.0)
}

pub fn fig6_dx() -> Vec<f64> {
    range_inclusive(0.5, 0.5, 12.0)
}

/// Figure 7 axis: `w2` from 1 m to 15 m in 1 m steps.
pub fn fig7_w2() -> Vec<f64> {
    range_inclusive(1.0, 1.0, 15.0)
}

pub const FIG7_AREA: f64 = 75.0;

pub fn fig8_sigma() -> Vec<f64> {
    range_inclusive(1.0, 1.0, 6.0)
}

/// Common knobs of every figure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    pub n_runs: u64,
    pub master_seed: u64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self { n_runs: 10_000, master_seed: 0 }
    }
}

fn base(scenario: Scenario, sigma: f64, opts: &FigureOptions) -> SweepSpec {
    let mut s = SweepSpec::new(scenario, sigma);
    s.n_runs = opts.n_runs;
    s.master_seed = opts.master_seed;
    s
}

/// Map #1 (w = 1 m, dx = 1 m) against the SNR.
pub fn fig4(opts: &FigureOptions) -> Result<Table, McError> {
    let spec = base(Scenario::Map1 { w: 1.0, dx: 1.0 }, DEFAULT_SIGMA, opts);
    Ok(sweep_table(SweepParam::Rho.column(), false, &sweep(&spec, SweepParam::Rho, &fig4_rho())?))
}

/// Map #1 (w = 1 m, sigma = 3 m) against the gap.
pub fn fig5(opts: &FigureOptions) -> Result<Table, McError> {
    let spec = base(Scenario::Map1 { w: 1.0, dx: 1.0 }, DEFAULT_SIGMA, opts);
    Ok(sweep_table(SweepParam::Dx.column(), false, &sweep(&spec, SweepParam::Dx, &fig5_dx())?))
}

/// MMSE RMSE of map #1 over the (w, dx) grid, sigma = 3 m.
pub fn fig6_rows(opts: &FigureOptions) -> Result<Vec<(f64, SweepRow)>, McError> {
    let dxs = fig6_dx();
    let mut out = Vec::new();
    for (i, w) in fig6_w().into_iter().enumerate() {
        let mut spec = base(Scenario::Map1 { w, dx: 1.0 }, DEFAULT_SIGMA, opts);
        spec.estimators = vec![EstimatorKind::Mmse];
        spec.bounds = Vec::new();
        spec.row_offset = (i * dxs.len()) as u64;
        out.extend(sweep(&spec, SweepParam::Dx, &dxs)?.into_iter().map(|r| (w, r)));
    }
    Ok(out)
}

pub fn fig6(opts: &FigureOptions) -> Result<Table, McError> {
    let mut t = Table::new(["w_m", "dx_m", "rmse_mmse_m", "se_mmse_m"]);
    for (w, r) in fig6_rows(opts)? {
        let e = &r.results[0].1;
        t.push_numbers(&[w, r.value, e.rmse_total, e.se_rmse_total]);
    }
    Ok(t)
}

/// Map #2 (w1 = h2 = 5 m, area 75 m², sigma = 3 m) against `w2`: BCRB
/// components with MMSE and ML RMSE.
pub fn fig7(opts: &FigureOptions) -> Result<Table, McError> {
    let w2 = fig7_w2();
    let h1 = (FIG7_AREA - 25.0) / (5.0 + w2[0]);
    let mut spec = base(Scenario::Map2 { w1: 5.0, w2: w2[0], h1, h2: 5.0, area: Some(FIG7_AREA) }, DEFAULT_SIGMA, opts);
    spec.bounds = vec![BoundFamily::Bcrb];
    spec.estimators = vec![EstimatorKind::Mmse, EstimatorKind::Ml];
    Ok(sweep_table(SweepParam::W2.column(), true, &sweep(&spec, SweepParam::W2, &w2)?))
}

/// The four MAP configurations of figure 8, in column order.
pub const FIG8_CASES: [(&str, bool, bool); 4] = [
    ("gaussian_map", false, false),
    ("gaussian_bbox", false, true),
    ("ranging_map", true, false),
    ("ranging_bbox", true, true),
];

/// MAP RMSE on the floor plan against sigma, for Gaussian / ranging
/// observations and detailed / bounding-box priors. Anchors sit at the
/// bounding-box corners; positions are always drawn from the detailed map.
pub fn fig8(opts: &FigureOptions) -> Result<Table, McError> {
    let sigmas = fig8_sigma();
    let mut cols = vec!["sigma_m".to_string()];
    let mut per_case = Vec::new();
    for (name, ranging, bbox) in FIG8_CASES {
        let mut spec = base(Scenario::Fixed(Support::Plane(floor_plan())), DEFAULT_SIGMA, opts);
        spec.model = if ranging { ModelSpec::RangingCorners } else { ModelSpec::Gaussian };
        spec.bounding_box_prior = bbox;
        spec.estimators = vec![EstimatorKind::Map];
        spec.bounds = Vec::new();
        per_case.push(sweep(&spec, SweepParam::Sigma, &sigmas)?);
        cols.extend([format!("rmse_map_{name}_m"), format!("se_map_{name}_m")]);
    }
    let mut t = Table { columns: cols, rows: Vec::new() };
    for (i, &s) in sigmas.iter().enumerate() {
        let mut row = vec![fmt_f64(s)];
        for rows in &per_case {
            let e = &rows[i].results[0].1;
            row.extend([fmt_f64(e.rmse_total), fmt_f64(e.se_rmse_total)]);
        }
        t.rows.push(row);
    }
    Ok(t)
}

pub fn figure(n: u32, opts: &FigureOptions) -> Result<Table, McError> {
    match n {
        4 => fig4(opts),
        5 => fig5(opts),
        6 => fig6(opts),
        7 => fig7(opts),
        8 => fig8(opts),
        _ => Err(McError::Unsupported("figure presets exist for figures 4 to 8")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(fig5_dx().len(), 62);
        assert_eq!(fig5_dx()[59], 15.0);
        assert_eq!(fig6_w().len(), 18);
        assert_eq!(fig6_dx().len(), 24);
        assert_eq!(fig7_w2(), (1..=15).map(f64::from).collect::<Vec<_>>());
        let r = fig4_rho();
        assert_eq!(r.len(), 31);
        assert!((r[15] - 1.0).abs() < 1e-15);
        assert!(range_inclusive(1.0, 1.0, 0.0).is_empty());
    }

    #[test]
    fn small_figure_runs() {
        let opts = FigureOptions { n_runs: 20, master_seed: 1 };
        let t = fig7(&opts).unwrap();
        assert_eq!(t.rows.len(), 15);
        assert_eq!(&t.columns[..3], ["w2_m", "h1_m", "sigma_m"]);
        assert!(figure(3, &opts).is_err());
    }
}

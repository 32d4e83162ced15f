//! Acceptance criteria. Each test prints one `PASS`/`FAIL criterion N` line
//! (written straight to stdout so it survives output capture) and then
//! asserts the same verdict.

use std::io::Write;
use std::time::{Duration, Instant};

use mapbound::bounds::presets::{map1_bounds, map1_support, map2_bounds, map2_map};
use mapbound::bounds::{
    all_bounds_1d, all_bounds_2d, ezzb_1d, ezzb_1d_bruteforce, ezzb_2d, lambda_gamma_1d, prior_fim_2d, wwb_1d,
    WwbSearchConfig,
};
use mapbound::estimators::{mmse_1d, mmse_2d, EstimatorKind, GaussianObsModel};
use mapbound::figures::{self, FigureOptions};
use mapbound::geometry::{Point, Rect, RectMap, SegmentUnion};
use mapbound::montecarlo::{sweep, Scenario, SweepParam, SweepSpec};
use mapbound::rng::{substream, uniform_open};

const RUNS: u64 = 10_000;

fn report(n: u32, pass: bool, elapsed: Duration, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("{verdict} criterion {n}: {detail} [{:.2} s]\n", elapsed.as_secs_f64());
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {n} failed: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn opts() -> FigureOptions {
    FigureOptions { n_runs: RUNS, master_seed: 0 }
}

#[test]
fn criterion_1_closed_forms_match_generic_engines() {
    let t = Instant::now();
    let cfg = WwbSearchConfig::default();
    let sigmas = [0.1, 0.5, 1.0, 3.0, 10.0];
    let map1_geom = [(0.3, 0.2), (1.0, 1.0), (1.0, 8.0), (2.5, 0.7), (5.0, 12.0)];
    let map2_geom =
        [(5.0, 5.0, 5.0, 5.0), (1.0, 2.0, 3.0, 4.0), (4.0, 0.5, 2.0, 6.0), (2.0, 9.0, 1.0, 1.5), (0.7, 0.7, 8.0, 0.4)];
    let mut worst: f64 = 0.0;
    for &sigma in &sigmas {
        for &(w, dx) in &map1_geom {
            let closed = map1_bounds(w, dx, sigma, 12.0, &cfg).unwrap();
            let generic = all_bounds_1d(&map1_support(w, dx).unwrap(), sigma, 12.0, &cfg).unwrap();
            for (c, g) in closed.iter().zip(&generic) {
                worst = worst.max(rel(g.b_x, c.b_x));
            }
        }
        for &(w1, w2, h1, h2) in &map2_geom {
            let closed = map2_bounds(w1, w2, h1, h2, sigma, 12.0, &cfg).unwrap();
            let generic = all_bounds_2d(&map2_map(w1, w2, h1, h2).unwrap(), sigma, sigma, 12.0, &cfg).unwrap();
            for (c, g) in closed.iter().zip(&generic) {
                worst = worst.max(rel(g.b_x, c.b_x)).max(rel(g.b_y.unwrap(), c.b_y.unwrap()));
            }
        }
    }
    let el = t.elapsed();
    let pass = worst <= 1e-12 && el < Duration::from_secs(1);
    report(1, pass, el, &format!("max relative deviation {worst:.2e} (limit 1e-12) over 2 x 5x5 grids"));
}

#[test]
fn criterion_2_ezzb_limits() {
    let t = Instant::now();
    let unit = RectMap::new(vec![Rect::new(0.0, 0.0, 1.0, 1.0)]).unwrap();
    let z = |s: f64| ezzb_2d(&unit, s, s).unwrap().b_x;
    let low_snr = z(1000.0);
    let in_band = (low_snr - 1.0 / 12.0).abs() <= 1e-3 / 12.0;
    let ratios: Vec<f64> = [0.1, 0.05, 0.02, 0.01].iter().map(|&s| z(s) / (s * s)).collect();
    let last = ratios[3];
    let high_ok = (0.9..1.0).contains(&last);
    let monotone = ratios.windows(2).all(|w| w[1] > w[0]);
    let el = t.elapsed();
    let pass = in_band && high_ok && monotone && el < Duration::from_secs(1);
    report(
        2,
        pass,
        el,
        &format!("Z(sigma=1000)={low_snr:.6} (1/12={:.6}); Z/sigma^2 at 0.1,0.05,0.02,0.01 = {ratios:.4?}", 1.0 / 12.0),
    );
}

#[test]
fn criterion_3_gap_sweep() {
    let t = Instant::now();
    let table = figures::fig5(&opts()).unwrap();
    let dx = table.column_f64("dx_m").unwrap();
    let ml = table.column_f64("rmse_ml_m").unwrap();
    let mmse = table.column_f64("rmse_mmse_m").unwrap();

    let ml_dev = ml.iter().map(|v| (v - 3.0).abs()).fold(0.0, f64::max);
    let at30 = mmse[dx.iter().position(|&d| d == 30.0).unwrap()];
    let (mut arg, mut peak) = (0.0, f64::NEG_INFINITY);
    for (d, v) in dx.iter().zip(&mmse) {
        if d.fract() == 0.0 && (1.0..=15.0).contains(d) && *v > peak {
            (arg, peak) = (*d, *v);
        }
    }
    let el = t.elapsed();
    let pass =
        ml_dev <= 0.05 && (at30 - 0.289).abs() <= 0.01 && (6.0..=10.0).contains(&arg) && el < Duration::from_secs(120);
    report(
        3,
        pass,
        el,
        &format!("max |ML RMSE - 3| = {ml_dev:.4} (<= 0.05); MMSE RMSE at dx=30: {at30:.4} (0.289 +- 0.01); MMSE peak at dx={arg} ({peak:.3} m, want [6, 10])"),
    );
}

#[test]
fn criterion_4_mmse_surface_peak() {
    let t = Instant::now();
    let rows = figures::fig6_rows(&opts()).unwrap();
    let (mut peak, mut at) = (f64::NEG_INFINITY, (0.0, 0.0));
    for (w, r) in &rows {
        let v = r.results[0].1.rmse_total;
        if v > peak {
            peak = v;
            at = (*w, r.value);
        }
    }
    let el = t.elapsed();
    let pass = (peak - 2.6).abs() <= 0.15 && el < Duration::from_secs(1800);
    report(
        4,
        pass,
        el,
        &format!("max MMSE RMSE {peak:.3} m at w={}, dx={} over {} cells (2.6 +- 0.15)", at.0, at.1, rows.len()),
    );
}

#[test]
fn criterion_5_area_preserving_map2() {
    let t = Instant::now();
    let table = figures::fig7(&opts()).unwrap();
    let mmse = table.column_f64("rmse_mmse_m").unwrap();
    let ml = table.column_f64("rmse_ml_m").unwrap();
    let bx = table.column_f64("sqrt_bcrb_x_m").unwrap();
    let by = table.column_f64("sqrt_bcrb_y_m").unwrap();
    let ratio = ml.iter().zip(&mmse).map(|(a, b)| a / b).sum::<f64>() / ml.len() as f64;
    let bx_up = bx.windows(2).all(|w| w[1] > w[0]);
    let by_down = by.windows(2).all(|w| w[1] < w[0]);
    let el = t.elapsed();
    let pass = (ratio - 1.21).abs() <= 0.04 && bx_up && by_down && el < Duration::from_secs(300);
    report(
        5,
        pass,
        el,
        &format!("mean ML/MMSE RMSE ratio {ratio:.4} (1.21 +- 0.04); sqrt(B_x) increasing: {bx_up}; sqrt(B_y) decreasing: {by_down}"),
    );
}

#[test]
fn criterion_6_low_snr_ordering() {
    let t = Instant::now();
    let mut spec = SweepSpec::new(Scenario::Map1 { w: 1.0, dx: 1.0 }, 3.0);
    spec.n_runs = RUNS;
    spec.estimators = vec![EstimatorKind::Mmse];
    let row = &sweep(&spec, SweepParam::Sigma, &[3.0]).unwrap()[0];
    let [b, z, w] = [row.bounds[0].b_x, row.bounds[1].b_x, row.bounds[2].b_x];
    let e = &row.results[0].1;
    let ceiling = e.mse_x + 3.0 * e.se_mse_x;
    let el = t.elapsed();
    let pass = b < z && z < w && w <= ceiling && el < Duration::from_secs(60);
    report(
        6,
        pass,
        el,
        &format!("B={b:.5} < Z={z:.5} < W={w:.5} <= MSE(MMSE)+3se = {:.5}+{:.5}", e.mse_x, 3.0 * e.se_mse_x),
    );
}

#[test]
fn criterion_7_high_snr_collapse() {
    let t = Instant::now();
    let sigma = 0.05;
    let mut spec = SweepSpec::new(Scenario::Map1 { w: 1.0, dx: 1.0 }, sigma);
    spec.n_runs = RUNS;
    let row = &sweep(&spec, SweepParam::Sigma, &[sigma]).unwrap()[0];
    let var = sigma * sigma;
    let bound_dev: Vec<(String, f64)> =
        row.bounds.iter().map(|b| (b.family.name().to_string(), b.b_x / var - 1.0)).collect();
    let rmse_dev: Vec<(String, f64)> =
        row.results.iter().map(|(k, e)| (k.name().to_string(), e.rmse_total / sigma - 1.0)).collect();
    let ok = |v: &[(String, f64)]| v.iter().all(|(_, d)| d.abs() <= 0.05);
    let el = t.elapsed();
    let pass = ok(&bound_dev) && ok(&rmse_dev) && el < Duration::from_secs(60);
    let fmt =
        |v: &[(String, f64)]| v.iter().map(|(n, d)| format!("{n} {:+.1}%", 100.0 * d)).collect::<Vec<_>>().join(", ");
    report(
        7,
        pass,
        el,
        &format!("bounds vs sigma^2: {}; RMSE vs sigma: {} (each within 5%)", fmt(&bound_dev), fmt(&rmse_dev)),
    );
}

// Deterministic random cases for the oracle criterion.
struct Draws(rand_chacha::ChaCha8Rng);

impl Draws {
    fn new(case: u64) -> Self {
        Self(substream(2024, 8, case))
    }
    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * uniform_open(&mut self.0)
    }
    fn segments(&mut self, max_n: usize) -> SegmentUnion {
        let n = 1 + (self.range(0.0, max_n as f64) as usize).min(max_n - 1);
        let mut x = self.range(-10.0, 10.0);
        let mut pairs = Vec::new();
        for _ in 0..n {
            let w = self.range(0.1, 5.0);
            pairs.push((x, x + w));
            x += w + self.range(0.05, 5.0);
        }
        SegmentUnion::new(pairs).unwrap()
    }
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn wwb_ratio(s: &SegmentUnion, sigma: f64, h: f64) -> f64 {
    let (lam, gam) = lambda_gamma_1d(s, h);
    let den = lam - (-h * h / (2.0 * sigma * sigma)).exp() * gam;
    if lam <= 0.0 || den <= 1e-300 {
        return 0.0;
    }
    h * h * (-h * h / (4.0 * sigma * sigma)).exp() * lam * lam / (2.0 * s.total_width() * den)
}

#[test]
fn criterion_8_oracle_suite() {
    let t = Instant::now();

    let mut ezzb_bad = 0;
    for case in 0..50 {
        let mut d = Draws::new(case);
        let s = d.segments(5);
        let sigma = d.range(0.2, 6.0);
        if ezzb_1d_bruteforce(&s, sigma).unwrap() < ezzb_1d(&s, sigma).unwrap() - 1e-9 {
            ezzb_bad += 1;
        }
    }

    let gauss = |t: f64, s: f64| (-0.5 * (t / s).powi(2)).exp();
    let mut mmse_worst: f64 = 0.0;
    for case in 0..100 {
        let mut d = Draws::new(100 + case);
        let sigma = d.range(0.2, 5.0);
        if case % 2 == 0 {
            let s = d.segments(4);
            let z = d.range(s.lo() - sigma, s.hi() + sigma);
            let (mut m0, mut m1) = (0.0, 0.0);
            for seg in s.segments() {
                m0 += simpson(|x| gauss(x - z, sigma), seg.lo(), seg.hi(), 4000);
                m1 += simpson(|x| x * gauss(x - z, sigma), seg.lo(), seg.hi(), 4000);
            }
            let want = m1 / m0;
            let got = mmse_1d(&s, z, sigma).unwrap().value;
            mmse_worst = mmse_worst.max((got - want).abs() / want.abs().max(1.0));
        } else {
            let (w1, w2, h1, h2) = (d.range(0.5, 6.0), d.range(0.5, 6.0), d.range(0.5, 6.0), d.range(0.5, 6.0));
            let map = map2_map(w1, w2, h1, h2).unwrap();
            let z = Point::new(d.range(-2.0, w1 + w2 + 2.0), d.range(-2.0, h1 + h2 + 2.0));
            let (mut m0, mut mx, mut my) = (0.0, 0.0, 0.0);
            for r in map.rects() {
                let ix0 = simpson(|x| gauss(x - z.x, sigma), r.x_lo, r.x_hi, 2000);
                let ix1 = simpson(|x| x * gauss(x - z.x, sigma), r.x_lo, r.x_hi, 2000);
                let iy0 = simpson(|y| gauss(y - z.y, sigma), r.y_lo, r.y_hi, 2000);
                let iy1 = simpson(|y| y * gauss(y - z.y, sigma), r.y_lo, r.y_hi, 2000);
                m0 += ix0 * iy0;
                mx += ix1 * iy0;
                my += ix0 * iy1;
            }
            let got = mmse_2d(&map, z, &GaussianObsModel::isotropic(sigma).unwrap()).value;
            mmse_worst = mmse_worst
                .max((got.x - mx / m0).abs() / (mx / m0).abs().max(1.0))
                .max((got.y - my / m0).abs() / (my / m0).abs().max(1.0));
        }
    }

    let cfg = WwbSearchConfig::default();
    let mut wwb_worst: f64 = 0.0;
    for case in 0..20 {
        let mut d = Draws::new(300 + case);
        let s = d.segments(4);
        let sigma = d.range(0.2, 6.0);
        let got = wwb_1d(&s, sigma, &cfg).unwrap().value;
        let (lo, hi) = (cfg.h_min_factor * sigma.min(s.span()), s.span() + 5.0 * sigma);
        let n = 1_000_000;
        let step = (hi - lo) / (n - 1) as f64;
        let (mut best, mut at) = (f64::NEG_INFINITY, lo);
        for i in 0..n {
            let h = lo + i as f64 * step;
            let v = wwb_ratio(&s, sigma, h);
            if v > best {
                (best, at) = (v, h);
            }
        }
        let (a, b) = ((at - step).max(lo), (at + step).min(hi));
        for i in 0..=20_000 {
            best = best.max(wwb_ratio(&s, sigma, a + (b - a) * i as f64 / 20_000.0));
        }
        wwb_worst = wwb_worst.max(rel(got, best));
    }

    let trace = |g: f64| {
        let j = prior_fim_2d(&RectMap::new(vec![Rect::new(0.0, 0.0, 3.0 * g, 3.0 / g)]).unwrap(), 12.0).unwrap();
        1.0 / j.j_x + 1.0 / j.j_y
    };
    let square = trace(1.0);
    let square_ok = (0..=300).all(|i| trace(0.25 * 16f64.powf(i as f64 / 300.0)) >= square * (1.0 - 1e-15));

    let el = t.elapsed();
    let pass = ezzb_bad == 0 && mmse_worst <= 1e-6 && wwb_worst <= 1e-6 && square_ok && el < Duration::from_secs(300);
    report(
        8,
        pass,
        el,
        &format!(
            "brute-force EZZB violations {ezzb_bad}/50; MMSE vs quadrature worst {mmse_worst:.1e} (100 cases); WWB vs dense grid worst {wwb_worst:.1e} (20 cases); square optimal: {square_ok}"
        ),
    );
}

#[test]
fn criterion_9_floor_plan_priors() {
    let t = Instant::now();
    let table = figures::fig8(&opts()).unwrap();
    let col = |n: &str| table.column_f64(&format!("rmse_map_{n}_m")).unwrap();
    let (g_map, g_bb, r_map, r_bb) =
        (col("gaussian_map"), col("gaussian_bbox"), col("ranging_map"), col("ranging_bbox"));
    let ranging_better = r_map.iter().zip(&g_map).all(|(r, g)| r <= g);
    // sigma = 3 is the third row
    let gap_g = rel(g_bb[2], g_map[2]);
    let gap_r = rel(r_bb[2], r_map[2]);
    let el = t.elapsed();
    let pass = ranging_better && gap_g < 0.15 && gap_r < 0.15 && el < Duration::from_secs(600);
    report(
        9,
        pass,
        el,
        &format!(
            "ranging MAP <= gaussian MAP at every sigma: {ranging_better} (ranging {r_map:.3?} vs gaussian {g_map:.3?}); bbox vs map at sigma=3: gaussian {:.1}%, ranging {:.1}% (< 15%)",
            100.0 * gap_g,
            100.0 * gap_r
        ),
    );
}

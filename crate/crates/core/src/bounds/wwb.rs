use crate::geometry::{Axis, RectMap, SegmentUnion};
use crate::specfun::{omega, omega_ov};

use super::{check_sigma, BoundFamily, BoundPair, BoundsError, WwbDiagnostics};

/// Search settings for the supremum over the test shift `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WwbSearchConfig {
    /// Smallest shift probed, as a multiple of `min(sigma, span)`.
    pub h_min_factor: f64,
    /// Points of the geometric grid.
    pub coarse_points: usize,
    /// Golden-section iterations per refined bracket.
    pub refine_iters: usize,
}

impl Default for WwbSearchConfig {
    fn default() -> Self {
        Self { h_min_factor: 1e-4, coarse_points: 400, refine_iters: 60 }
    }
}

/// Result of a single-axis WWB evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WwbResult {
    pub value: f64,
    pub h_opt: f64,
    pub evaluations: usize,
    pub degenerate: bool,
}

impl WwbResult {
    pub fn into_pair(self) -> BoundPair {
        BoundPair {
            b_x: self.value,
            b_y: None,
            family: BoundFamily::Wwb,
            diagnostics: Some(WwbDiagnostics {
                h_opt_x: self.h_opt,
                h_opt_y: None,
                evaluations: self.evaluations,
                degenerate: self.degenerate,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Term {
    /// `weight * omega(w, h)`
    Own { weight: f64, w: f64 },
    /// `weight * omega_ov(gap, w1, w2, h)`
    Pair { weight: f64, gap: f64, w1: f64, w2: f64 },
}

/// Piecewise-linear `lambda(h)` (double overlap) and `gamma(h)` (triple
/// overlap) of one axis, as weighted sums of `omega` / `omega_ov` terms.
#[derive(Debug, Clone, Default)]
pub(crate) struct OverlapProfile {
    lambda: Vec<Term>,
    /// `(weight, w)` contributing `2 * weight * omega(w/2, h)`.
    gamma: Vec<(f64, f64)>,
    /// Prior normalisation: `2 * W` in 1-D, `2 * A` in 2-D.
    norm: f64,
    span: f64,
}

impl OverlapProfile {
    pub(crate) fn new(norm: f64) -> Self {
        Self { norm, ..Self::default() }
    }

    pub(crate) fn own(&mut self, weight: f64, w: f64) -> &mut Self {
        self.lambda.push(Term::Own { weight, w });
        self.span = self.span.max(w);
        self
    }

    pub(crate) fn pair(&mut self, weight: f64, gap: f64, w1: f64, w2: f64) -> &mut Self {
        self.lambda.push(Term::Pair { weight, gap, w1, w2 });
        self.span = self.span.max(gap + w1 + w2);
        self
    }

    pub(crate) fn half(&mut self, weight: f64, w: f64) -> &mut Self {
        self.gamma.push((weight, w));
        self
    }

    fn push_slice(&mut self, slice: &SegmentUnion, weight: f64) {
        for s in slice.segments() {
            self.own(weight, s.width());
        }
        for (gap, before, after) in slice.gaps() {
            self.pair(weight, gap, before, after);
        }
        for s in slice.segments() {
            self.half(weight, s.width());
        }
    }

    fn from_support(support: &SegmentUnion) -> Self {
        let mut p = Self::new(2.0 * support.total_width());
        p.push_slice(support, 1.0);
        p
    }

    fn from_map(map: &RectMap, axis: Axis) -> Self {
        let mut p = Self::new(2.0 * map.area());
        for st in map.strips(axis) {
            p.push_slice(&st.slice, st.height());
        }
        p
    }

    fn lambda(&self, h: f64) -> f64 {
        self.lambda
            .iter()
            .map(|t| match *t {
                Term::Own { weight, w } => weight * omega(w, h),
                Term::Pair { weight, gap, w1, w2 } => weight * omega_ov(gap, w1, w2, h),
            })
            .sum()
    }

    fn gamma(&self, h: f64) -> f64 {
        2.0 * self.gamma.iter().map(|&(weight, w)| weight * omega(0.5 * w, h)).sum::<f64>()
    }

    /// Kinks of `lambda` and `gamma`.
    fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for t in &self.lambda {
            match *t {
                Term::Own { w, .. } => out.push(w),
                Term::Pair { gap, w1, w2, .. } => {
                    let (long, short) = if w1 >= w2 { (w1, w2) } else { (w2, w1) };
                    out.extend([gap, gap + short, gap + long, gap + long + short]);
                }
            }
        }
        out.extend(self.gamma.iter().map(|&(_, w)| 0.5 * w));
        out
    }

    /// WWB ratio at shift `h`; `None` when the denominator vanishes.
    fn objective(&self, sigma: f64, h: f64) -> Option<f64> {
        let lam = self.lambda(h);
        if lam <= 0.0 {
            return Some(0.0);
        }
        let gam = self.gamma(h);
        let x = h * h / (2.0 * sigma * sigma);
        // lambda - exp(-x) gamma, written to avoid cancellation at small h
        let den = (lam - gam) + (-(-x).exp_m1()) * gam;
        if !(den > 1e-300) {
            return None;
        }
        Some(h * h * (-0.5 * x).exp() * lam * lam / (self.norm * den))
    }

    /// Supremum of the objective over `h`.
    pub(crate) fn maximize(&self, sigma: f64, cfg: &WwbSearchConfig) -> WwbResult {
        let h_lo = cfg.h_min_factor * sigma.min(self.span);
        let h_hi = self.span + 5.0 * sigma;
        let n = cfg.coarse_points.max(2);
        let ratio = (h_hi / h_lo).powf(1.0 / (n - 1) as f64);
        let mut cands: Vec<f64> = (0..n).map(|i| h_lo * ratio.powi(i as i32)).collect();
        cands[n - 1] = h_hi;
        cands.extend(self.breakpoints().into_iter().filter(|&b| b > h_lo && b < h_hi));
        cands.sort_by(f64::total_cmp);
        cands.dedup();

        let mut degenerate = false;
        let mut evaluations = 0usize;
        let mut eval = |h: f64| -> f64 {
            evaluations += 1;
            match self.objective(sigma, h) {
                Some(v) => v,
                None => {
                    degenerate = true;
                    f64::NEG_INFINITY
                }
            }
        };

        let vals: Vec<f64> = cands.iter().map(|&h| eval(h)).collect();
        let mut best = (f64::NEG_INFINITY, h_lo);
        for (&h, &v) in cands.iter().zip(&vals) {
            if v > best.0 {
                best = (v, h);
            }
        }
        let threshold = 0.9 * best.0;
        for i in 0..cands.len() {
            let v = vals[i];
            let left = if i > 0 { vals[i - 1] } else { f64::NEG_INFINITY };
            let right = vals.get(i + 1).copied().unwrap_or(f64::NEG_INFINITY);
            if !(v > 0.0 && v >= threshold && v >= left && v >= right) {
                continue;
            }
            if i > 0 {
                let r = golden_max(&mut eval, cands[i - 1], cands[i], cfg.refine_iters);
                if r.0 > best.0 {
                    best = r;
                }
            }
            if i + 1 < cands.len() {
                let r = golden_max(&mut eval, cands[i], cands[i + 1], cfg.refine_iters);
                if r.0 > best.0 {
                    best = r;
                }
            }
        }
        let value = if best.0.is_finite() { best.0.max(0.0) } else { 0.0 };
        WwbResult { value, h_opt: best.1, evaluations, degenerate }
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`; returns the
/// best `(value, h)` seen at interior probes.
fn golden_max<F: FnMut(f64) -> f64>(f: &mut F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc >= fd { (fc, c) } else { (fd, d) };
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc > best.0 {
                best = (fc, c);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd > best.0 {
                best = (fd, d);
            }
        }
    }
    best
}

/// `(lambda(h), gamma(h))` of a 1-D support.
pub fn lambda_gamma_1d(support: &SegmentUnion, h: f64) -> (f64, f64) {
    let p = OverlapProfile::from_support(support);
    (p.lambda(h), p.gamma(h))
}

pub fn wwb_1d(support: &SegmentUnion, sigma: f64, cfg: &WwbSearchConfig) -> Result<WwbResult, BoundsError> {
    check_sigma(sigma)?;
    Ok(OverlapProfile::from_support(support).maximize(sigma, cfg))
}

pub fn wwb_2d(map: &RectMap, sigma_x: f64, sigma_y: f64, cfg: &WwbSearchConfig) -> Result<BoundPair, BoundsError> {
    check_sigma(sigma_x)?;
    check_sigma(sigma_y)?;
    let x = OverlapProfile::from_map(map, Axis::X).maximize(sigma_x, cfg);
    let y = OverlapProfile::from_map(map, Axis::Y).maximize(sigma_y, cfg);
    Ok(BoundPair {
        b_x: x.value,
        b_y: Some(y.value),
        family: BoundFamily::Wwb,
        diagnostics: Some(WwbDiagnostics {
            h_opt_x: x.h_opt,
            h_opt_y: Some(y.h_opt),
            evaluations: x.evaluations + y.evaluations,
            degenerate: x.degenerate || y.degenerate,
        }),
    })
}

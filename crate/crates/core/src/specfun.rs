//! Special functions and quadrature behind the bound formulas.
//!
//! `zeta` and `zeta_ov` are the EZZB kernels: integrals of
//! `u * erfc(u / (2*sqrt(2)))` against a triangular (single segment) or
//! trapezoidal (pair of segments across a gap) weight. `omega` and
//! `omega_ov` are the matching overlap lengths used by the WWB.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("non-finite input")]
    NonFinite,
    #[error("negative SNR {0}")]
    NegativeSnr(f64),
    #[error("negative argument {0}")]
    NegativeArgument(f64),
    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    QuadratureNoConvergence { a: f64, b: f64 },
}

/// `2*sqrt(2)`, the scale inside the EZZB erfc kernel.
pub const KERNEL_SCALE: f64 = 2.0 * SQRT_2;

/// Past `u = TAIL_CUTOFF` the kernel erfc is below 1e-300.
pub const TAIL_CUTOFF: f64 = 27.0 * KERNEL_SCALE;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-9, max_depth: 60 }
    }
}

/// Complementary error function. Clamps to 2 / 0 beyond `|x| > 30`.
pub fn erfc(x: f64) -> Result<f64, NumericError> {
    if !x.is_finite() {
        return Err(NumericError::NonFinite);
    }
    Ok(erfc_unchecked(x))
}

#[inline]
pub(crate) fn erfc_unchecked(x: f64) -> f64 {
    if x > 30.0 {
        0.0
    } else if x < -30.0 {
        2.0
    } else {
        libm::erfc(x)
    }
}

/// Standard normal density.
#[inline]
pub fn norm_pdf(t: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * t * t).exp()
}

/// Standard normal upper tail `Q(t) = 1 - Phi(t)`, accurate in both tails.
#[inline]
pub fn norm_sf(t: f64) -> f64 {
    0.5 * erfc_unchecked(t * FRAC_1_SQRT_2)
}

/// `Phi(b) - Phi(a)` for `a <= b`, without cancellation in either tail.
#[inline]
pub fn norm_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        norm_sf(a) - norm_sf(b)
    } else if b <= 0.0 {
        norm_sf(-b) - norm_sf(-a)
    } else {
        1.0 - norm_sf(-a) - norm_sf(b)
    }
}

/// Standard normal quantile for `p` in (0, 1).
pub fn norm_quantile(p: f64) -> f64 {
    -SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p)
}

// 15-point Kronrod / 7-point Gauss abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// One Gauss-Kronrod 7/15 panel: (kronrod estimate, |kronrod - gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
pub fn adaptive_quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64, NumericError> {
    if !a.is_finite() || !b.is_finite() {
        return Err(NumericError::NonFinite);
    }
    if b < a {
        return Err(NumericError::NegativeArgument(b - a));
    }
    if b == a {
        return Ok(0.0);
    }
    let (whole, _) = gk15(&f, a, b);
    let target = cfg.abs_tol.max(cfg.rel_tol * whole.abs());
    refine(&f, a, b, target, cfg.max_depth)
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64, NumericError> {
    let (est, err) = gk15(f, a, b);
    if !est.is_finite() {
        return Err(NumericError::NonFinite);
    }
    if err <= tol {
        return Ok(est);
    }
    if depth == 0 {
        return Err(NumericError::QuadratureNoConvergence { a, b });
    }
    let m = 0.5 * (a + b);
    Ok(refine(f, a, m, 0.5 * tol, depth - 1)? + refine(f, m, b, 0.5 * tol, depth - 1)?)
}

#[inline]
fn kernel(u: f64) -> f64 {
    u * erfc_unchecked(u / KERNEL_SCALE)
}

/// Integral of `weight(u) * kernel(u)` over `[lo, hi]`, truncated at the tail cutoff.
fn kernel_integral<W: Fn(f64) -> f64>(weight: W, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<f64, NumericError> {
    let hi = hi.min(TAIL_CUTOFF);
    if hi <= lo {
        return Ok(0.0);
    }
    adaptive_quad(|u| weight(u) * kernel(u), lo, hi, cfg)
}

/// `zeta(rho) = int_0^rho (rho - u) u erfc(u / 2sqrt2) du`.
pub fn zeta(rho: f64) -> Result<f64, NumericError> {
    zeta_with(rho, &QuadConfig::default())
}

pub fn zeta_with(rho: f64, cfg: &QuadConfig) -> Result<f64, NumericError> {
    if !rho.is_finite() {
        return Err(NumericError::NonFinite);
    }
    if rho < 0.0 {
        return Err(NumericError::NegativeSnr(rho));
    }
    kernel_integral(|u| rho - u, 0.0, rho, cfg)
}

/// Kernel integral over the trapezoidal overlap profile of two segments
/// (normalised widths `rho1`, `rho2`) separated by a normalised gap.
/// Symmetric in `rho1`, `rho2`.
pub fn zeta_ov(rho_gap: f64, rho1: f64, rho2: f64) -> Result<f64, NumericError> {
    zeta_ov_with(rho_gap, rho1, rho2, &QuadConfig::default())
}

pub fn zeta_ov_with(rho_gap: f64, rho1: f64, rho2: f64, cfg: &QuadConfig) -> Result<f64, NumericError> {
    for v in [rho_gap, rho1, rho2] {
        if !v.is_finite() {
            return Err(NumericError::NonFinite);
        }
        if v < 0.0 {
            return Err(NumericError::NegativeArgument(v));
        }
    }
    let (long, short) = if rho1 >= rho2 { (rho1, rho2) } else { (rho2, rho1) };
    if short == 0.0 {
        return Ok(0.0);
    }
    let d = rho_gap;
    let total = d + long + short;
    let rising = kernel_integral(|u| u - d, d, d + short, cfg)?;
    let plateau = kernel_integral(|_| short, d + short, d + long, cfg)?;
    let falling = kernel_integral(|u| total - u, d + long, total, cfg)?;
    Ok(rising + plateau + falling)
}

/// Overlap length of a segment of width `w` with its own shift by `h`.
#[inline]
pub fn omega(w: f64, h: f64) -> f64 {
    if (0.0..=w).contains(&h) {
        w - h
    } else {
        0.0
    }
}

/// Overlap length between the first of two segments (widths `w1`, `w2`,
/// separated by `gap`) and the second one shifted back by `h`.
#[inline]
pub fn omega_ov(gap: f64, w1: f64, w2: f64, h: f64) -> f64 {
    let (long, short) = if w1 >= w2 { (w1, w2) } else { (w2, w1) };
    let total = gap + long + short;
    if h < gap || h > total {
        0.0
    } else if h <= gap + short {
        h - gap
    } else if h <= gap + long {
        short
    } else {
        total - h
    }
}

//! Closed forms for the two reference maps.
//!
//! * map #1: two collinear segments of width `w` separated by a gap `dx`;
//! * map #2: an L-shaped map, a `(w1 + w2) x h1` base with a `w1 x h2` block
//!   stacked on its left part.
//!
//! They are written directly from the per-map formulas and serve as oracles
//! for the generic strip engines.

use crate::geometry::{Rect, RectMap, SegmentUnion};
use crate::specfun::{zeta, zeta_ov};

use super::wwb::OverlapProfile;
use super::{check_js, check_sigma, BoundFamily, BoundPair, BoundsError, WwbDiagnostics, WwbSearchConfig};

fn check_dim(name: &'static str, value: f64) -> Result<(), BoundsError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(BoundsError::NonpositiveWidth { name, value })
    }
}

fn scalar(b_x: f64, family: BoundFamily) -> BoundPair {
    BoundPair { b_x, b_y: None, family, diagnostics: None }
}

/// Support of map #1: `[0, w] ∪ [w + dx, 2w + dx]`.
pub fn map1_support(w: f64, dx: f64) -> Result<SegmentUnion, BoundsError> {
    check_dim("w", w)?;
    if !(dx.is_finite() && dx >= 0.0) {
        return Err(BoundsError::NegativeGap(dx));
    }
    Ok(SegmentUnion::new([(0.0, w), (w + dx, 2.0 * w + dx)])?)
}

/// `[bcrb, ezzb, wwb]` of map #1 along its axis.
pub fn map1_bounds(
    w: f64,
    dx: f64,
    sigma: f64,
    j_s: f64,
    cfg: &WwbSearchConfig,
) -> Result<[BoundPair; 3], BoundsError> {
    check_dim("w", w)?;
    if !(dx.is_finite() && dx >= 0.0) {
        return Err(BoundsError::NegativeGap(dx));
    }
    check_sigma(sigma)?;
    check_js(j_s)?;

    let rho = w / sigma;
    let rho2 = rho * rho;
    let bcrb = sigma * sigma * rho2 / (rho2 + j_s);
    let ezzb = sigma * sigma / (4.0 * rho) * (2.0 * zeta(rho)? + zeta_ov(dx / sigma, rho, rho)?);

    let mut p = OverlapProfile::new(4.0 * w);
    p.own(1.0, w).own(1.0, w).pair(1.0, dx, w, w).half(1.0, w).half(1.0, w);
    let wwb = p.maximize(sigma, cfg).into_pair();

    Ok([scalar(bcrb, BoundFamily::Bcrb), scalar(ezzb, BoundFamily::Ezzb), wwb])
}

/// Map #2 as two rectangles: `{0, 0, w1 + w2, h1}` and `{0, h1, w1, h1 + h2}`.
pub fn map2_map(w1: f64, w2: f64, h1: f64, h2: f64) -> Result<RectMap, BoundsError> {
    for (name, v) in [("w1", w1), ("w2", w2), ("h1", h1), ("h2", h2)] {
        check_dim(name, v)?;
    }
    Ok(RectMap::new(vec![Rect::new(0.0, 0.0, w1 + w2, h1), Rect::new(0.0, h1, w1, h1 + h2)])?)
}

/// Base height `h1` keeping the map #2 area at `area` while `w2` varies.
pub fn map2_h1_for_area(area: f64, w1: f64, w2: f64, h2: f64) -> Result<f64, BoundsError> {
    for (name, v) in [("area", area), ("w1", w1), ("w2", w2), ("h2", h2)] {
        check_dim(name, v)?;
    }
    let h1 = (area - h2 * w1) / (w1 + w2);
    check_dim("h1", h1)?;
    Ok(h1)
}

/// `[bcrb, ezzb, wwb]` of map #2 for both axes, with isotropic noise `sigma`.
pub fn map2_bounds(
    w1: f64,
    w2: f64,
    h1: f64,
    h2: f64,
    sigma: f64,
    j_s: f64,
    cfg: &WwbSearchConfig,
) -> Result<[BoundPair; 3], BoundsError> {
    for (name, v) in [("w1", w1), ("w2", w2), ("h1", h1), ("h2", h2)] {
        check_dim(name, v)?;
    }
    check_sigma(sigma)?;
    check_js(j_s)?;

    let area = h1 * (w1 + w2) + h2 * w1;
    let jz = 1.0 / (sigma * sigma);
    let j_x = j_s / area * (h1 / (w1 + w2) + h2 / w1);
    let j_y = j_s / area * (w1 / (h1 + h2) + w2 / h1);
    let bcrb =
        BoundPair { b_x: 1.0 / (jz + j_x), b_y: Some(1.0 / (jz + j_y)), family: BoundFamily::Bcrb, diagnostics: None };

    let c = sigma.powi(3) / (2.0 * area);
    let z_x = c * (h1 * zeta((w1 + w2) / sigma)? + h2 * zeta(w1 / sigma)?);
    let z_y = c * (w1 * zeta((h1 + h2) / sigma)? + w2 * zeta(h1 / sigma)?);
    let ezzb = BoundPair { b_x: z_x, b_y: Some(z_y), family: BoundFamily::Ezzb, diagnostics: None };

    let mut px = OverlapProfile::new(2.0 * area);
    px.own(h1, w1 + w2).half(h1, w1 + w2).own(h2, w1).half(h2, w1);
    let mut py = OverlapProfile::new(2.0 * area);
    py.own(w1, h1 + h2).half(w1, h1 + h2).own(w2, h1).half(w2, h1);
    let x = px.maximize(sigma, cfg);
    let y = py.maximize(sigma, cfg);
    let wwb = BoundPair {
        b_x: x.value,
        b_y: Some(y.value),
        family: BoundFamily::Wwb,
        diagnostics: Some(WwbDiagnostics {
            h_opt_x: x.h_opt,
            h_opt_y: Some(y.h_opt),
            evaluations: x.evaluations + y.evaluations,
            degenerate: x.degenerate || y.degenerate,
        }),
    };
    Ok([bcrb, ezzb, wwb])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map1_reference_values() {
        let [b, z, w] = map1_bounds(1.0, 1.0, 3.0, 12.0, &WwbSearchConfig::default()).unwrap();
        assert!((b.b_x - 9.0 / 109.0).abs() < 1e-15);
        assert!(b.b_x < z.b_x && z.b_x < w.b_x);
    }

    #[test]
    fn map1_far_gap_drops_pair_term() {
        let [_, z, _] = map1_bounds(1.0, 1000.0, 3.0, 12.0, &WwbSearchConfig::default()).unwrap();
        let rho = 1.0 / 3.0;
        let want = 9.0 / (4.0 * rho) * 2.0 * zeta(rho).unwrap();
        assert_eq!(z.b_x, want);
    }

    #[test]
    fn map2_geometry() {
        let m = map2_map(5.0, 5.0, 5.0, 5.0).unwrap();
        assert_eq!(m.area(), 75.0);
        let h1 = map2_h1_for_area(75.0, 5.0, 10.0, 5.0).unwrap();
        assert!((h1 - 10.0 / 3.0).abs() < 1e-15);
        assert!(map2_h1_for_area(10.0, 5.0, 1.0, 5.0).is_err());
    }

    #[test]
    fn map2_symmetric_case() {
        let [b, z, w] = map2_bounds(5.0, 5.0, 5.0, 5.0, 3.0, 12.0, &WwbSearchConfig::default()).unwrap();
        for p in [b, z, w] {
            assert!(((p.b_x - p.b_y.unwrap()) / p.b_x).abs() < 1e-14, "{p:?}");
        }
        assert!((1.0 / b.b_x - (1.0 / 9.0 + 0.24)).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_dimensions() {
        let cfg = WwbSearchConfig::default();
        assert_eq!(
            map1_bounds(0.0, 1.0, 3.0, 12.0, &cfg).unwrap_err(),
            BoundsError::NonpositiveWidth { name: "w", value: 0.0 }
        );
        assert!(map1_bounds(1.0, -1.0, 3.0, 12.0, &cfg).is_err());
        assert!(map2_bounds(1.0, 1.0, 1.0, 1.0, -3.0, 12.0, &cfg).is_err());
    }
}

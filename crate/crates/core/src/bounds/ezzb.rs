use std::collections::HashMap;

use crate::geometry::{Axis, RectMap, SegmentUnion};
use crate::specfun::{adaptive_quad, erfc_unchecked, zeta, zeta_ov, QuadConfig, KERNEL_SCALE, TAIL_CUTOFF};

use super::{check_sigma, BoundFamily, BoundPair, BoundsError};

/// Memo of `zeta` by argument bits; slices of rectangular maps repeat widths.
#[derive(Default)]
struct ZetaMemo(HashMap<u64, f64>);

impl ZetaMemo {
    fn get(&mut self, rho: f64) -> Result<f64, BoundsError> {
        if let Some(v) = self.0.get(&rho.to_bits()) {
            return Ok(*v);
        }
        let v = zeta(rho)?;
        self.0.insert(rho.to_bits(), v);
        Ok(v)
    }
}

/// Bracketed sum of one slice: triangles of every segment plus the
/// parallelograms of consecutive segment pairs, in units of `sigma`.
fn slice_sum(slice: &SegmentUnion, sigma: f64, memo: &mut ZetaMemo) -> Result<f64, BoundsError> {
    let mut acc = 0.0;
    for s in slice.segments() {
        acc += memo.get(s.width() / sigma)?;
    }
    for (gap, before, after) in slice.gaps() {
        acc += zeta_ov(gap / sigma, before / sigma, after / sigma)?;
    }
    Ok(acc)
}

/// EZZB of a 1-D support: `sigma³/(2W) * [sum zeta(w_n/sigma) + sum zeta_ov(...)]`.
pub fn ezzb_1d(support: &SegmentUnion, sigma: f64) -> Result<f64, BoundsError> {
    check_sigma(sigma)?;
    let sum = slice_sum(support, sigma, &mut ZetaMemo::default())?;
    Ok(sigma.powi(3) * sum / (2.0 * support.total_width()))
}

fn ezzb_axis(map: &RectMap, axis: Axis, sigma: f64, memo: &mut ZetaMemo) -> Result<f64, BoundsError> {
    let mut acc = 0.0;
    for st in map.strips(axis) {
        acc += st.height() * slice_sum(&st.slice, sigma, memo)?;
    }
    Ok(sigma.powi(3) * acc / (2.0 * map.area()))
}

/// EZZB of a rectangular map, integrated strip by strip.
pub fn ezzb_2d(map: &RectMap, sigma_x: f64, sigma_y: f64) -> Result<BoundPair, BoundsError> {
    check_sigma(sigma_x)?;
    check_sigma(sigma_y)?;
    let mut memo = ZetaMemo::default();
    let b_x = ezzb_axis(map, Axis::X, sigma_x, &mut memo)?;
    if sigma_y != sigma_x {
        memo = ZetaMemo::default();
    }
    let b_y = ezzb_axis(map, Axis::Y, sigma_y, &mut memo)?;
    Ok(BoundPair { b_x, b_y: Some(b_y), family: BoundFamily::Ezzb, diagnostics: None })
}

/// Measure of `{t in S : t + h in S}` from pairwise interval intersections.
fn overlap_length(support: &SegmentUnion, h: f64) -> f64 {
    let segs = support.segments();
    let mut acc = 0.0;
    for a in segs {
        for b in segs {
            let lo = a.lo().max(b.lo() - h);
            let hi = a.hi().min(b.hi() - h);
            if hi > lo {
                acc += hi - lo;
            }
        }
    }
    acc
}

/// Direct integration of the 1-D EZZB identity over the whole domain,
/// including the parallelograms of non-adjacent segment pairs that
/// [`ezzb_1d`] drops. Always at least as large as `ezzb_1d`.
pub fn ezzb_1d_bruteforce(support: &SegmentUnion, sigma: f64) -> Result<f64, BoundsError> {
    check_sigma(sigma)?;
    let cfg = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-12, max_depth: 60 };
    let h_max = support.span().min(TAIL_CUTOFF * sigma);
    let mut knots = vec![0.0, h_max];
    for a in support.segments() {
        for b in support.segments() {
            for d in [b.lo() - a.lo(), b.hi() - a.lo(), b.lo() - a.hi(), b.hi() - a.hi()] {
                if d > 0.0 && d < h_max {
                    knots.push(d);
                }
            }
        }
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let integrand = |h: f64| h * erfc_unchecked(h / (KERNEL_SCALE * sigma)) * overlap_length(support, h);
    let mut acc = 0.0;
    for w in knots.windows(2) {
        acc += adaptive_quad(integrand, w[0], w[1], &cfg)?;
    }
    Ok(acc / (2.0 * support.total_width()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    #[test]
    fn single_segment_limits() {
        let s = SegmentUnion::new([(0.0, 1.0)]).unwrap();
        let z = ezzb_1d(&s, 1000.0).unwrap();
        assert!((z - 1.0 / 12.0).abs() < 1e-3 / 12.0, "{z}");

        let s = SegmentUnion::new([(0.0, 100.0)]).unwrap();
        let z = ezzb_1d(&s, 1.0).unwrap();
        // sigma² zeta(100)/200 from an mpmath reference
        assert!((z - 0.978_723_078_378_590_3).abs() < 1e-9, "{z}");
    }

    #[test]
    fn bruteforce_agrees_without_dropped_terms() {
        for pairs in [vec![(0.0, 1.0)], vec![(0.0, 1.0), (2.0, 3.0)], vec![(0.0, 0.4), (3.0, 5.5)]] {
            let s = SegmentUnion::new(pairs).unwrap();
            for sigma in [0.3, 1.0, 3.0] {
                let a = ezzb_1d(&s, sigma).unwrap();
                let b = ezzb_1d_bruteforce(&s, sigma).unwrap();
                assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn bruteforce_exceeds_with_three_segments() {
        let s = SegmentUnion::new([(0.0, 1.0), (2.0, 3.0), (4.0, 5.0)]).unwrap();
        let a = ezzb_1d(&s, 3.0).unwrap();
        let b = ezzb_1d_bruteforce(&s, 3.0).unwrap();
        assert!(b > a * (1.0 + 1e-3), "{a} vs {b}");
    }

    #[test]
    fn rectangle_matches_closed_form() {
        let l = 2.0;
        let sigma = 0.7;
        let m = RectMap::new(vec![Rect::new(0.0, 0.0, l, l)]).unwrap();
        let z = ezzb_2d(&m, sigma, sigma).unwrap();
        let want = sigma.powi(3) / (2.0 * l) * zeta(l / sigma).unwrap();
        assert!(((z.b_x - want) / want).abs() < 1e-14);
        assert!(((z.b_y.unwrap() - want) / want).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_sigma() {
        let s = SegmentUnion::new([(0.0, 1.0)]).unwrap();
        assert_eq!(ezzb_1d(&s, 0.0), Err(BoundsError::NonpositiveSigma(0.0)));
        assert!(ezzb_1d_bruteforce(&s, -1.0).is_err());
    }
}

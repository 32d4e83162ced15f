use crate::geometry::{Axis, RectMap, SegmentUnion};

use super::{check_js, BoundFamily, BoundPair, BoundsError};

/// Prior Bayesian Fisher information of a smoothed uniform 2-D map (m⁻²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorFim {
    pub j_x: f64,
    pub j_y: f64,
}

/// Observation (conditional) information per axis (m⁻²); `1/sigma²` under
/// the Gaussian positional model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondFim {
    pub j_zx: f64,
    pub j_zy: f64,
}

impl CondFim {
    pub fn gaussian(sigma_x: f64, sigma_y: f64) -> Self {
        Self { j_zx: sigma_x.powi(-2), j_zy: sigma_y.powi(-2) }
    }
}

/// `(1/W) * sum_n j_s / w_n` for a 1-D support of total width `W`.
pub fn prior_fim_1d(support: &SegmentUnion, j_s: f64) -> Result<f64, BoundsError> {
    check_js(j_s)?;
    let inv: f64 = support.segments().iter().map(|s| 1.0 / s.width()).sum();
    Ok(j_s * inv / support.total_width())
}

/// `(j_s / A) * diag{ int sum 1/w_n(y) dy, int sum 1/h_m(x) dx }`, evaluated
/// exactly as a sum over strips.
pub fn prior_fim_2d(map: &RectMap, j_s: f64) -> Result<PriorFim, BoundsError> {
    check_js(j_s)?;
    let area = map.area();
    let axis_sum = |axis| -> f64 {
        map.strips(axis)
            .iter()
            .map(|st| st.height() * st.slice.segments().iter().map(|s| 1.0 / s.width()).sum::<f64>())
            .sum()
    };
    Ok(PriorFim { j_x: j_s * axis_sum(Axis::X) / area, j_y: j_s * axis_sum(Axis::Y) / area })
}

/// `1 / (j_cond + j_prior)` for a single axis.
pub fn bcrb_1d(j_prior: f64, j_cond: f64) -> f64 {
    1.0 / (j_cond + j_prior)
}

pub fn bcrb(prior: &PriorFim, cond: &CondFim) -> BoundPair {
    BoundPair {
        b_x: bcrb_1d(prior.j_x, cond.j_zx),
        b_y: Some(bcrb_1d(prior.j_y, cond.j_zy)),
        family: BoundFamily::Bcrb,
        diagnostics: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    #[test]
    fn prior_1d_examples() {
        let one = SegmentUnion::new([(0.0, 2.0)]).unwrap();
        assert!((prior_fim_1d(&one, 12.0).unwrap() - 3.0).abs() < 1e-15);
        for dx in [0.0, 0.5, 7.0] {
            let m1 = SegmentUnion::new([(0.0, 1.0), (1.0 + dx + 1e-6, 2.0 + dx + 1e-6)]).unwrap();
            assert!((prior_fim_1d(&m1, 12.0).unwrap() - 12.0).abs() < 1e-12);
        }
        let two = SegmentUnion::new([(0.0, 1.0), (3.0, 5.0)]).unwrap();
        assert!((prior_fim_1d(&two, 7.0).unwrap() - 3.5).abs() < 1e-15);
        assert_eq!(prior_fim_1d(&one, 0.0), Err(BoundsError::NonpositiveJs(0.0)));
    }

    #[test]
    fn prior_2d_examples() {
        let r = RectMap::new(vec![Rect::new(0.0, 0.0, 2.0, 5.0)]).unwrap();
        let j = prior_fim_2d(&r, 12.0).unwrap();
        assert!((j.j_x - 12.0 / 4.0).abs() < 1e-14);
        assert!((j.j_y - 12.0 / 25.0).abs() < 1e-14);

        let m2 = RectMap::new(vec![Rect::new(0.0, 0.0, 10.0, 5.0), Rect::new(0.0, 5.0, 5.0, 10.0)]).unwrap();
        let j = prior_fim_2d(&m2, 12.0).unwrap();
        assert!((j.j_x - 0.24).abs() < 1e-14);
        assert!((j.j_y - 0.24).abs() < 1e-14);
    }

    #[test]
    fn bcrb_examples() {
        // map #1, w = 1, sigma = 3, j_s = 12 -> 9/109
        let b = bcrb_1d(12.0, 1.0 / 9.0);
        assert!((b - 9.0 / 109.0).abs() < 1e-15);
        // no observations: the uniform variance L²/12
        assert!((bcrb_1d(12.0, 0.0) - 1.0 / 12.0).abs() < 1e-15);
        // vanishing prior: the CRB
        assert!((bcrb_1d(1e-15, 1.0 / 9.0) - 9.0).abs() < 1e-12);
    }
}

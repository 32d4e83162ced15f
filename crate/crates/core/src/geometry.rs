//! Uniform-map supports: 1-D segment unions and 2-D rectangular coverings.
//!
//! Every bound formula consumes a map through its slices: the connected
//! components of the intersection between the support and a horizontal
//! (or vertical) line. For a rectangular covering the slice is piecewise
//! constant, so the map is decomposed once into [`Strip`]s and all the
//! integrals over the perpendicular coordinate become finite sums.

use std::cmp::Ordering;

use thiserror::Error;

/// Two coordinates closer than this are treated as the same edge (m).
pub const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("map has no rectangles")]
    EmptyMap,
    #[error("support has no segments")]
    EmptySupport,
    #[error("rectangle {index} has nonpositive width or height")]
    DegenerateRect { index: usize },
    #[error("segment {index} has nonpositive length")]
    DegenerateSegment { index: usize },
    #[error("rectangles {first} and {second} overlap")]
    OverlappingRects { first: usize, second: usize },
    #[error("non-finite coordinate in element {index}")]
    NonFinite { index: usize },
}

/// A 2-D point (m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Coordinate axis. `X` slices measure extents along x (horizontal lines).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

/// Closed interval `[lo, hi]` with `hi > lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    lo: f64,
    hi: f64,
}

impl Segment {
    pub fn new(lo: f64, hi: f64) -> Result<Self, GeometryError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(GeometryError::NonFinite { index: 0 });
        }
        if hi <= lo {
            return Err(GeometryError::DegenerateSegment { index: 0 });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn clamp(&self, t: f64) -> f64 {
        t.clamp(self.lo, self.hi)
    }
}

/// Disjoint closed segments on a line, sorted, separated by gaps larger
/// than [`MERGE_TOL`]. Never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentUnion {
    segments: Vec<Segment>,
}

impl SegmentUnion {
    /// Builds a union from `(lo, hi)` pairs in any order. Overlapping or
    /// abutting inputs are merged.
    pub fn new<I>(pairs: I) -> Result<Self, GeometryError>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut segs = Vec::new();
        for (index, (lo, hi)) in pairs.into_iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(GeometryError::NonFinite { index });
            }
            if hi <= lo {
                return Err(GeometryError::DegenerateSegment { index });
            }
            segs.push(Segment { lo, hi });
        }
        Self::merged(segs).ok_or(GeometryError::EmptySupport)
    }

    /// Sorts and merges; `None` if `segs` is empty.
    fn merged(mut segs: Vec<Segment>) -> Option<Self> {
        if segs.is_empty() {
            return None;
        }
        segs.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(Ordering::Equal));
        let mut out: Vec<Segment> = Vec::with_capacity(segs.len());
        for s in segs {
            match out.last_mut() {
                Some(last) if s.lo <= last.hi + MERGE_TOL => last.hi = last.hi.max(s.hi),
                _ => out.push(s),
            }
        }
        Some(Self { segments: out })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Total support length (the normalisation of the uniform prior).
    pub fn total_width(&self) -> f64 {
        self.segments.iter().map(Segment::width).sum()
    }

    pub fn lo(&self) -> f64 {
        self.segments[0].lo
    }

    pub fn hi(&self) -> f64 {
        self.segments[self.segments.len() - 1].hi
    }

    /// Distance from the first lower limit to the last upper limit.
    pub fn span(&self) -> f64 {
        self.hi() - self.lo()
    }

    /// Gaps between consecutive segments, as `(gap, width_before, width_after)`.
    pub fn gaps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.segments.windows(2).map(|w| (w[1].lo - w[0].hi, w[0].width(), w[1].width()))
    }

    pub fn contains(&self, t: f64) -> bool {
        self.segments.iter().any(|s| s.contains(t))
    }

    /// Closest support point to `t`; ties go to the lower segment.
    pub fn nearest(&self, t: f64) -> f64 {
        let mut best = self.segments[0].clamp(t);
        let mut best_d = (best - t).abs();
        for s in &self.segments[1..] {
            let c = s.clamp(t);
            let d = (c - t).abs();
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        best
    }

    pub fn translate(&self, offset: f64) -> Self {
        Self { segments: self.segments.iter().map(|s| Segment { lo: s.lo + offset, hi: s.hi + offset }).collect() }
    }

    /// Segment-by-segment comparison within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .segments
                .iter()
                .zip(&other.segments)
                .all(|(a, b)| (a.lo - b.lo).abs() <= tol && (a.hi - b.hi).abs() <= tol)
    }
}

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_lo: f64,
    pub y_lo: f64,
    pub x_hi: f64,
    pub y_hi: f64,
}

impl Rect {
    pub const fn new(x_lo: f64, y_lo: f64, x_hi: f64, y_hi: f64) -> Self {
        Self { x_lo, y_lo, x_hi, y_hi }
    }

    /// From corner plus size, as stored in map files.
    pub fn from_origin_size(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self::new(x, y, x + w, y + h)
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.x_lo + self.x_hi), 0.5 * (self.y_lo + self.y_hi))
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_lo && p.x <= self.x_hi && p.y >= self.y_lo && p.y <= self.y_hi
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(self.x_lo, self.x_hi), p.y.clamp(self.y_lo, self.y_hi))
    }

    /// Extent along `axis` and across it.
    fn along(&self, axis: Axis) -> (f64, f64) {
        match axis {
            Axis::X => (self.x_lo, self.x_hi),
            Axis::Y => (self.y_lo, self.y_hi),
        }
    }

    fn across(&self, axis: Axis) -> (f64, f64) {
        match axis {
            Axis::X => (self.y_lo, self.y_hi),
            Axis::Y => (self.x_lo, self.x_hi),
        }
    }

    pub fn inflate(&self, margin: f64) -> Self {
        Self::new(self.x_lo - margin, self.y_lo - margin, self.x_hi + margin, self.y_hi + margin)
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Self {
        Self::new(self.x_lo + dx, self.y_lo + dy, self.x_hi + dx, self.y_hi + dy)
    }
}

/// Band over which the perpendicular slice of a [`RectMap`] is constant.
///
/// For `Axis::X` strips the band is a y-interval and the slice holds the
/// x-components of every horizontal line crossing the band.
#[derive(Debug, Clone, PartialEq)]
pub struct Strip {
    pub band: Segment,
    pub slice: SegmentUnion,
}

impl Strip {
    pub fn height(&self) -> f64 {
        self.band.width()
    }
}

/// Support of a 2-D uniform map as a union of rectangles with disjoint
/// interiors. Rectangles may share edges.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMap {
    rects: Vec<Rect>,
}

impl RectMap {
    pub fn new(rects: Vec<Rect>) -> Result<Self, GeometryError> {
        if rects.is_empty() {
            return Err(GeometryError::EmptyMap);
        }
        for (index, r) in rects.iter().enumerate() {
            if ![r.x_lo, r.y_lo, r.x_hi, r.y_hi].iter().all(|v| v.is_finite()) {
                return Err(GeometryError::NonFinite { index });
            }
            if r.width() <= 0.0 || r.height() <= 0.0 {
                return Err(GeometryError::DegenerateRect { index });
            }
        }
        for i in 0..rects.len() {
            for j in i + 1..rects.len() {
                let (a, b) = (&rects[i], &rects[j]);
                let ox = a.x_hi.min(b.x_hi) - a.x_lo.max(b.x_lo);
                let oy = a.y_hi.min(b.y_hi) - a.y_lo.max(b.y_lo);
                if ox > MERGE_TOL && oy > MERGE_TOL {
                    return Err(GeometryError::OverlappingRects { first: i, second: j });
                }
            }
        }
        Ok(Self { rects })
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn area(&self) -> f64 {
        self.rects.iter().map(Rect::area).sum()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.rects.iter().any(|r| r.contains(p))
    }

    pub fn bounding_box(&self) -> Rect {
        let mut bb = self.rects[0];
        for r in &self.rects[1..] {
            bb.x_lo = bb.x_lo.min(r.x_lo);
            bb.y_lo = bb.y_lo.min(r.y_lo);
            bb.x_hi = bb.x_hi.max(r.x_hi);
            bb.y_hi = bb.y_hi.max(r.y_hi);
        }
        bb
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Self {
        Self { rects: self.rects.iter().map(|r| r.translate(dx, dy)).collect() }
    }

    /// Components of the line perpendicular to the slicing direction at
    /// `coord`. Bands are half-open `[lo, hi)`; the topmost edge is closed.
    pub fn slice(&self, axis: Axis, coord: f64) -> Option<SegmentUnion> {
        let mut segs: Vec<Segment> = self
            .rects
            .iter()
            .filter(|r| {
                let (lo, hi) = r.across(axis);
                coord >= lo && coord < hi
            })
            .map(|r| {
                let (lo, hi) = r.along(axis);
                Segment { lo, hi }
            })
            .collect();
        if segs.is_empty() {
            segs = self
                .rects
                .iter()
                .filter(|r| (r.across(axis).1 - coord).abs() <= MERGE_TOL)
                .map(|r| {
                    let (lo, hi) = r.along(axis);
                    Segment { lo, hi }
                })
                .collect();
        }
        SegmentUnion::merged(segs)
    }

    /// Horizontal slice at ordinate `y` (x-components).
    pub fn slice_h(&self, y: f64) -> Option<SegmentUnion> {
        self.slice(Axis::X, y)
    }

    /// Vertical slice at abscissa `x` (y-components).
    pub fn slice_v(&self, x: f64) -> Option<SegmentUnion> {
        self.slice(Axis::Y, x)
    }

    /// Maximal bands of constant slice, sorted along the band coordinate.
    /// Together they cover the projection of the map on that coordinate.
    pub fn strips(&self, axis: Axis) -> Vec<Strip> {
        let mut edges: Vec<f64> = self
            .rects
            .iter()
            .flat_map(|r| {
                let (lo, hi) = r.across(axis);
                [lo, hi]
            })
            .collect();
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        edges.dedup_by(|b, a| (*b - *a).abs() <= MERGE_TOL);

        let mut strips: Vec<Strip> = Vec::new();
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let Some(slice) = self.slice(axis, 0.5 * (lo + hi)) else {
                continue;
            };
            match strips.last_mut() {
                Some(prev) if (prev.band.hi - lo).abs() <= MERGE_TOL && prev.slice.approx_eq(&slice, MERGE_TOL) => {
                    prev.band.hi = hi;
                }
                _ => strips.push(Strip { band: Segment { lo, hi }, slice }),
            }
        }
        strips
    }

    pub fn strips_h(&self) -> Vec<Strip> {
        self.strips(Axis::X)
    }

    pub fn strips_v(&self) -> Vec<Strip> {
        self.strips(Axis::Y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map2() -> RectMap {
        RectMap::new(vec![Rect::new(0.0, 0.0, 10.0, 5.0), Rect::new(0.0, 5.0, 5.0, 10.0)]).unwrap()
    }

    #[test]
    fn build_single_rect() {
        let m = RectMap::new(vec![Rect::new(0.0, 0.0, 2.0, 3.0)]).unwrap();
        assert_eq!(m.rects().len(), 1);
        assert_eq!(m.area(), 6.0);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert_eq!(RectMap::new(vec![]), Err(GeometryError::EmptyMap));
        assert_eq!(
            RectMap::new(vec![Rect::new(0.0, 0.0, 1.0, 1.0), Rect::new(0.5, 0.0, 1.5, 1.0)]),
            Err(GeometryError::OverlappingRects { first: 0, second: 1 })
        );
        assert_eq!(
            RectMap::new(vec![Rect::new(0.0, 0.0, 1.0, 1.0), Rect::new(2.0, 0.0, 2.0, 1.0)]),
            Err(GeometryError::DegenerateRect { index: 1 })
        );
        assert!(SegmentUnion::new(Vec::new()).is_err());
        assert_eq!(SegmentUnion::new([(0.0, 1.0), (3.0, 2.0)]), Err(GeometryError::DegenerateSegment { index: 1 }));
    }

    #[test]
    fn map2_area_and_slices() {
        let m = map2();
        assert_eq!(m.area(), 75.0);
        let s = m.slice_h(2.5).unwrap();
        assert_eq!(s.segments(), &[Segment::new(0.0, 10.0).unwrap()]);
        let s = m.slice_h(7.5).unwrap();
        assert_eq!(s.segments(), &[Segment::new(0.0, 5.0).unwrap()]);
        let s = m.slice_v(2.5).unwrap();
        assert_eq!(s.segments(), &[Segment::new(0.0, 10.0).unwrap()]);
        let s = m.slice_v(7.5).unwrap();
        assert_eq!(s.segments(), &[Segment::new(0.0, 5.0).unwrap()]);
        assert!(m.slice_h(-1.0).is_none());
        assert!(m.slice_v(11.0).is_none());
    }

    #[test]
    fn shared_edge_takes_strip_above() {
        let m = map2();
        assert_eq!(m.slice_h(5.0).unwrap().total_width(), 5.0);
        assert_eq!(m.slice_h(10.0).unwrap().total_width(), 5.0);
    }

    #[test]
    fn strips_of_presets() {
        let single = RectMap::new(vec![Rect::new(0.0, 0.0, 2.0, 3.0)]).unwrap();
        let st = single.strips_h();
        assert_eq!(st.len(), 1);
        assert_eq!((st[0].band.lo(), st[0].band.hi()), (0.0, 3.0));
        assert_eq!(st[0].slice.total_width(), 2.0);

        let st = map2().strips_h();
        assert_eq!(st.len(), 2);
        assert_eq!((st[0].band.lo(), st[0].band.hi(), st[0].slice.hi()), (0.0, 5.0, 10.0));
        assert_eq!((st[1].band.lo(), st[1].band.hi(), st[1].slice.hi()), (5.0, 10.0, 5.0));

        let m1 = RectMap::new(vec![Rect::new(0.0, 0.0, 1.0, 1.0), Rect::new(2.0, 0.0, 3.0, 1.0)]).unwrap();
        let st = m1.strips_h();
        assert_eq!(st.len(), 1);
        assert_eq!(st[0].slice.len(), 2);
        let gaps: Vec<_> = st[0].slice.gaps().collect();
        assert_eq!(gaps, vec![(1.0, 1.0, 1.0)]);
    }

    #[test]
    fn strips_merge_equal_neighbours() {
        // two stacked rects with equal x-extent form one band
        let m = RectMap::new(vec![Rect::new(0.0, 0.0, 4.0, 1.0), Rect::new(0.0, 1.0, 4.0, 3.0)]).unwrap();
        let st = m.strips_h();
        assert_eq!(st.len(), 1);
        assert_eq!(st[0].height(), 3.0);
    }

    #[test]
    fn abutting_units_merge() {
        let m = RectMap::new(vec![Rect::new(0.0, 0.0, 1.0, 1.0), Rect::new(1.0, 0.0, 2.0, 1.0)]).unwrap();
        assert_eq!(m.area(), 2.0);
        assert_eq!(m.slice_h(0.5).unwrap().len(), 1);
        assert!(m.contains(Point::new(1.0, 0.5)));
    }

    #[test]
    fn contains_closed() {
        let m = RectMap::new(vec![Rect::new(0.0, 0.0, 2.0, 3.0)]).unwrap();
        assert!(m.contains(Point::new(1.0, 1.0)));
        assert!(!m.contains(Point::new(3.0, 1.0)));
        assert!(m.contains(Point::new(2.0, 3.0)));
    }

    #[test]
    fn nearest_ties_low() {
        let s = SegmentUnion::new([(0.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_eq!(s.nearest(1.4), 1.0);
        assert_eq!(s.nearest(1.5), 1.0);
        assert_eq!(s.nearest(1.6), 2.0);
        assert_eq!(s.nearest(0.3), 0.3);
    }

    #[test]
    fn union_merges_overlaps() {
        let s = SegmentUnion::new([(2.0, 3.0), (0.0, 1.0), (0.5, 2.0)]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.total_width(), 3.0);
    }
}

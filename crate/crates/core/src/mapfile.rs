//! JSON map files and the built-in floor plan.
//!
//! 2-D: `{"unit":"m","rects":[{"x":0,"y":0,"w":10,"h":5}, ...]}`
//! 1-D: `{"unit":"m","segments":[[0,1],[2,3]]}`

use std::io::ErrorKind;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Rect, RectMap, SegmentUnion};
use crate::montecarlo::Support;

#[derive(Debug, Error)]
pub enum MapFileError {
    #[error("map file not found: {0}")]
    NotFound(String),
    #[error("cannot read map file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed map file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported unit `{0}` (only \"m\")")]
    Unit(String),
    #[error("map file must contain exactly one of `rects` or `segments`")]
    Shape,
    #[error("rects[{index}]: {reason}")]
    BadRect { index: usize, reason: &'static str },
    #[error("segments[{index}]: {reason}")]
    BadSegment { index: usize, reason: &'static str },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectEntry {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    #[serde(default = "default_unit")]
    pub unit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rects: Option<Vec<RectEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<[f64; 2]>>,
}

fn default_unit() -> String {
    "m".to_string()
}

impl MapFile {
    pub fn from_map(map: &RectMap) -> Self {
        let rects =
            map.rects().iter().map(|r| RectEntry { x: r.x_lo, y: r.y_lo, w: r.width(), h: r.height() }).collect();
        Self { unit: default_unit(), rects: Some(rects), segments: None }
    }

    pub fn from_segments(support: &SegmentUnion) -> Self {
        let segments = support.segments().iter().map(|s| [s.lo(), s.hi()]).collect();
        Self { unit: default_unit(), rects: None, segments: Some(segments) }
    }

    pub fn from_support(support: &Support) -> Self {
        match support {
            Support::Line(s) => Self::from_segments(s),
            Support::Plane(m) => Self::from_map(m),
        }
    }

    /// Validates and builds the support, naming the offending entry on error.
    pub fn to_support(&self) -> Result<Support, MapFileError> {
        if self.unit != "m" {
            return Err(MapFileError::Unit(self.unit.clone()));
        }
        match (&self.rects, &self.segments) {
            (Some(rects), None) => {
                let mut out = Vec::with_capacity(rects.len());
                for (index, e) in rects.iter().enumerate() {
                    if ![e.x, e.y, e.w, e.h].iter().all(|v| v.is_finite()) {
                        return Err(MapFileError::BadRect { index, reason: "non-finite value" });
                    }
                    if e.w <= 0.0 {
                        return Err(MapFileError::BadRect { index, reason: "width must be positive" });
                    }
                    if e.h <= 0.0 {
                        return Err(MapFileError::BadRect { index, reason: "height must be positive" });
                    }
                    out.push(Rect::from_origin_size(e.x, e.y, e.w, e.h));
                }
                Ok(Support::Plane(RectMap::new(out)?))
            }
            (None, Some(segs)) => {
                for (index, [lo, hi]) in segs.iter().enumerate() {
                    if !(lo.is_finite() && hi.is_finite()) {
                        return Err(MapFileError::BadSegment { index, reason: "non-finite value" });
                    }
                    if hi <= lo {
                        return Err(MapFileError::BadSegment { index, reason: "upper end must exceed lower end" });
                    }
                }
                Ok(Support::Line(SegmentUnion::new(segs.iter().map(|s| (s[0], s[1])))?))
            }
            _ => Err(MapFileError::Shape),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map file serialises") + "\n"
    }
}

pub fn parse_map(text: &str) -> Result<Support, MapFileError> {
    serde_json::from_str::<MapFile>(text)?.to_support()
}

pub fn load_map(path: &Path) -> Result<Support, MapFileError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        ErrorKind::NotFound => MapFileError::NotFound(path.display().to_string()),
        _ => MapFileError::Io { path: path.display().to_string(), source: e },
    })?;
    parse_map(&text)
}

/// Stand-in multi-room floor, 40 m x 20 m: two rows of four rooms on either
/// side of a 3 m corridor, 0.2 m walls, and a 1 m door from every room to
/// the corridor.
pub fn floor_plan() -> RectMap {
    const ROOMS_X: [(f64, f64); 4] = [(0.0, 9.8), (10.0, 19.8), (20.0, 29.8), (30.0, 40.0)];
    const BOTTOM: (f64, f64) = (0.0, 8.3);
    const CORRIDOR: (f64, f64) = (8.5, 11.5);
    const TOP: (f64, f64) = (11.7, 20.0);
    const DOOR: f64 = 1.0;

    let mut rects = Vec::new();
    for &(x0, x1) in &ROOMS_X {
        rects.push(Rect::new(x0, BOTTOM.0, x1, BOTTOM.1));
        rects.push(Rect::new(x0, TOP.0, x1, TOP.1));
    }
    rects.push(Rect::new(0.0, CORRIDOR.0, 40.0, CORRIDOR.1));
    for &(x0, x1) in &ROOMS_X {
        let c = 0.5 * (x0 + x1);
        rects.push(Rect::new(c - 0.5 * DOOR, BOTTOM.1, c + 0.5 * DOOR, CORRIDOR.0));
        rects.push(Rect::new(c - 0.5 * DOOR, CORRIDOR.1, c + 0.5 * DOOR, TOP.0));
    }
    RectMap::new(rects).expect("floor plan is valid")
}

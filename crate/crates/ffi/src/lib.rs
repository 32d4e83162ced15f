//! C ABI over `mapbound`.
//!
//! Maps are opaque handles created by `mb_*_new` / `mb_rect_map_load` and
//! released with the matching `mb_*_free`. Every fallible call returns an
//! [`MbStatus`]; on failure a message is kept per thread and can be copied
//! out with [`mb_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use mapbound::bounds::{all_bounds_1d, all_bounds_2d, BoundPair, WwbSearchConfig};
use mapbound::estimators::{map_1d, map_2d_gaussian, mmse_1d, mmse_2d, GaussianObsModel};
use mapbound::geometry::{Point, Rect, RectMap, SegmentUnion};
use mapbound::mapfile::{load_map, MapFileError};
use mapbound::montecarlo::Support;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    NumericFailure = 3,
    IoError = 4,
    Panic = 5,
}

/// Estimator selectors for `mb_estimate_1d` / `mb_estimate_2d`.
pub const MB_ESTIMATOR_MMSE: i32 = 0;
pub const MB_ESTIMATOR_MAP: i32 = 1;
pub const MB_ESTIMATOR_ML: i32 = 2;

/// Axis-aligned rectangle, closed, in metres.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbRect {
    pub x_lo: f64,
    pub y_lo: f64,
    pub x_hi: f64,
    pub y_hi: f64,
}

/// All three bound families (m²). The `*_y` fields and `wwb_h_opt_y` are NaN
/// for 1-D supports.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbBounds {
    pub bcrb_x: f64,
    pub bcrb_y: f64,
    pub ezzb_x: f64,
    pub ezzb_y: f64,
    pub wwb_x: f64,
    pub wwb_y: f64,
    pub wwb_h_opt_x: f64,
    pub wwb_h_opt_y: f64,
}

/// Opaque 2-D map.
pub struct MbRectMap(RectMap);

/// Opaque 1-D support.
pub struct MbSegments(SegmentUnion);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: MbStatus, msg: impl Into<String>) -> MbStatus {
    set_error(msg);
    status
}

fn from_error(e: mapbound::Error) -> MbStatus {
    let status = match &e {
        mapbound::Error::Numeric(_) => MbStatus::NumericFailure,
        mapbound::Error::Io(_) => MbStatus::IoError,
        mapbound::Error::Validation(_) => MbStatus::InvalidInput,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning a panic into `MbStatus::Panic`.
fn guard<F: FnOnce() -> MbStatus>(f: F) -> MbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(MbStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn pack(bounds: &[BoundPair; 3]) -> MbBounds {
    let [b, z, w] = bounds;
    let diag = w.diagnostics;
    MbBounds {
        bcrb_x: b.b_x,
        bcrb_y: b.b_y.unwrap_or(f64::NAN),
        ezzb_x: z.b_x,
        ezzb_y: z.b_y.unwrap_or(f64::NAN),
        wwb_x: w.b_x,
        wwb_y: w.b_y.unwrap_or(f64::NAN),
        wwb_h_opt_x: diag.map_or(f64::NAN, |d| d.h_opt_x),
        wwb_h_opt_y: diag.and_then(|d| d.h_opt_y).unwrap_or(f64::NAN),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// always NUL-terminated when `len > 0`). Returns the full message length
/// plus one, so a caller can size its buffer; 0 when there is no message.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn mb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if msg.is_empty() {
            return 0;
        }
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len() + 1
    })
}

/// Builds a map from `n` rectangles.
///
/// # Safety
/// `rects` must point to `n` readable `MbRect`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_rect_map_new(rects: *const MbRect, n: usize, out: *mut *mut MbRectMap) -> MbStatus {
    guard(|| {
        if out.is_null() || (rects.is_null() && n > 0) {
            return fail(MbStatus::NullPointer, "null pointer argument");
        }
        *out = ptr::null_mut();
        let src = if n == 0 { &[][..] } else { std::slice::from_raw_parts(rects, n) };
        let list = src.iter().map(|r| Rect::new(r.x_lo, r.y_lo, r.x_hi, r.y_hi)).collect();
        match RectMap::new(list) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(MbRectMap(m)));
                MbStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// Loads a 2-D JSON map file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_rect_map_load(path: *const c_char, out: *mut *mut MbRectMap) -> MbStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(MbStatus::NullPointer, "null pointer argument");
        }
        *out = ptr::null_mut();
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            return fail(MbStatus::InvalidInput, "path is not valid UTF-8");
        };
        match load_map(Path::new(path)) {
            Ok(Support::Plane(m)) => {
                *out = Box::into_raw(Box::new(MbRectMap(m)));
                MbStatus::Ok
            }
            Ok(Support::Line(_)) => fail(MbStatus::InvalidInput, "map file holds a 1-D support"),
            Err(e @ (MapFileError::NotFound(_) | MapFileError::Io { .. })) => fail(MbStatus::IoError, e.to_string()),
            Err(e) => from_error(e.into()),
        }
    })
}

/// Releases a map; NULL is ignored.
///
/// # Safety
/// `map` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mb_rect_map_free(map: *mut MbRectMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_rect_map_area(map: *const MbRectMap, out: *mut f64) -> MbStatus {
    guard(|| {
        let (Some(m), false) = (map.as_ref(), out.is_null()) else {
            return fail(MbStatus::NullPointer, "null pointer argument");
        };
        *out = m.0.area();
        MbStatus::Ok
    })
}

/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_rect_map_contains(map: *const MbRectMap, x: f64, y: f64, out: *mut bool) -> MbStatus {
    guard(|| {
        let (Some(m), false) = (map.as_ref(), out.is_null()) else {
            return fail(MbStatus::NullPointer, "null pointer argument");
        };
        *out = m.0.contains(Point::new(x, y));
        MbStatus::Ok
    })
}

/// Builds a 1-D support from `n` `[lo, hi]` pairs stored flat in `bounds`.
///
/// # Safety
/// `bounds` must point to `2 * n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_segments_new(bounds: *const f64, n: usize, out: *mut *mut MbSegments) -> MbStatus {
    guard(|| {
        if out.is_null() || (bounds.is_null() && n > 0) {
            return fail(MbStatus::NullPointer, "null pointer argument");
        }
        *out = ptr::null_mut();
        let flat = if n == 0 { &[][..] } else { std::slice::from_raw_parts(bounds, 2 * n) };
        match SegmentUnion::new(flat.chunks_exact(2).map(|p| (p[0], p[1]))) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(MbSegments(s)));
                MbStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// Releases a 1-D support; NULL is ignored.
///
/// # Safety
/// `segs` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mb_segments_free(segs: *mut MbSegments) {
    if !segs.is_null() {
        drop(Box::from_raw(segs));
    }
}

/// Total length of a 1-D support.
///
/// # Safety
/// `segs` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_segments_total_width(segs: *const MbSegments, out: *mut f64) -> MbStatus {
    guard(|| {
        let (Some(s), false) = (segs.as_ref(), out.is_null()) else {
            return fail(MbStatus::NullPointer, "null pointer argument");
        };
        *out = s.0.total_width();
        MbStatus::Ok
    })
}

/// BCRB, EZZB and WWB of a 1-D support under noise `sigma`.
///
/// # Safety
/// `segs` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_bounds_1d(segs: *const MbSegments, sigma: f64, j_s: f64, out: *mut MbBounds) -> MbStatus {
    guard(|| {
        let (Some(s), false) = (segs.as_ref(), out.is_null()) else {
            return fail(MbStatus::NullPointer, "null pointer argument");
        };
        match all_bounds_1d(&s.0, sigma, j_s, &WwbSearchConfig::default()) {
            Ok(b) => {
                *out = pack(&b);
                MbStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// BCRB, EZZB and WWB of a 2-D map under per-axis noise.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_bounds_2d(
    map: *const MbRectMap,
    sigma_x: f64,
    sigma_y: f64,
    j_s: f64,
    out: *mut MbBounds,
) -> MbStatus {
    guard(|| {
        let (Some(m), false) = (map.as_ref(), out.is_null()) else {
            return fail(MbStatus::NullPointer, "null pointer argument");
        };
        match all_bounds_2d(&m.0, sigma_x, sigma_y, j_s, &WwbSearchConfig::default()) {
            Ok(b) => {
                *out = pack(&b);
                MbStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// Position estimate from one 1-D Gaussian observation `z`.
///
/// # Safety
/// `segs` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_estimate_1d(
    segs: *const MbSegments,
    estimator: i32,
    z: f64,
    sigma: f64,
    out: *mut f64,
) -> MbStatus {
    guard(|| {
        let (Some(s), false) = (segs.as_ref(), out.is_null()) else {
            return fail(MbStatus::NullPointer, "null pointer argument");
        };
        if !z.is_finite() {
            return fail(MbStatus::InvalidInput, "observation must be finite");
        }
        let r = match estimator {
            MB_ESTIMATOR_MMSE => mmse_1d(&s.0, z, sigma).map(|e| e.value),
            MB_ESTIMATOR_MAP => map_1d(&s.0, z, sigma),
            MB_ESTIMATOR_ML => Ok(z),
            _ => return fail(MbStatus::InvalidInput, format!("unknown estimator {estimator}")),
        };
        match r {
            Ok(v) => {
                *out = v;
                MbStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// Position estimate from one 2-D Gaussian observation `(zx, zy)`.
///
/// # Safety
/// `map` must be a live handle; `out_x`, `out_y` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_estimate_2d(
    map: *const MbRectMap,
    estimator: i32,
    zx: f64,
    zy: f64,
    sigma_x: f64,
    sigma_y: f64,
    out_x: *mut f64,
    out_y: *mut f64,
) -> MbStatus {
    guard(|| {
        let (Some(m), false, false) = (map.as_ref(), out_x.is_null(), out_y.is_null()) else {
            return fail(MbStatus::NullPointer, "null pointer argument");
        };
        if !(zx.is_finite() && zy.is_finite()) {
            return fail(MbStatus::InvalidInput, "observation must be finite");
        }
        let model = match GaussianObsModel::new(sigma_x, sigma_y) {
            Ok(g) => g,
            Err(e) => return from_error(e.into()),
        };
        let z = Point::new(zx, zy);
        let p = match estimator {
            MB_ESTIMATOR_MMSE => mmse_2d(&m.0, z, &model).value,
            MB_ESTIMATOR_MAP => map_2d_gaussian(&m.0, z, &model),
            MB_ESTIMATOR_ML => z,
            _ => return fail(MbStatus::InvalidInput, format!("unknown estimator {estimator}")),
        };
        *out_x = p.x;
        *out_y = p.y;
        MbStatus::Ok
    })
}

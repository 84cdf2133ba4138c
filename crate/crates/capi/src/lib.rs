//! C ABI for the trimph library: opaque handles, status codes, and plain
//! buffers, so other languages can bind the pipeline (cloud -> trim -> Rips
//! persistence -> bottleneck) without Rust on their side.
//!
//! Every function returns a [`TrimphStatus`]; outputs go through pointers.
//! Handles must be released with the matching `_free` function. A
//! thread-local message describing the most recent failure is available via
//! [`trimph_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};

use trimph::bottleneck::bottleneck;
use trimph::error::Error;
use trimph::flagph::flag_rips_persistence;
use trimph::metric::{hausdorff, DistanceMatrix, PointCloud};
use trimph::persistence::PersistenceDiagram;
use trimph::rips::RipsThreshold;
use trimph::trim::{trim_asymmetric, trim_one_sided, TrimSpec};

/// Result code of every C-ABI call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TrimphStatus {
    /// Success.
    TrimphOk = 0,
    /// Invalid input data or parameters.
    TrimphErrInput = 1,
    /// A resource budget would be exceeded.
    TrimphErrResource = 2,
    /// A required pointer argument was null.
    TrimphErrNullPointer = 3,
}

/// An immutable point cloud (opaque).
pub struct TrimphCloud(PointCloud);

/// A persistence diagram (opaque).
pub struct TrimphDiagram(PersistenceDiagram);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> TrimphStatus {
    match err {
        Error::Resource(_) => TrimphStatus::TrimphErrResource,
        _ => TrimphStatus::TrimphErrInput,
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn trimph_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn trimph_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds a cloud from `n_points` rows of `dim` doubles, row-major.
///
/// # Safety
/// `coords` must point to `n_points * dim` readable doubles and `out` to a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn trimph_cloud_new(
    coords: *const f64,
    n_points: usize,
    dim: usize,
    out: *mut *mut TrimphCloud,
) -> TrimphStatus {
    if coords.is_null() || out.is_null() {
        return TrimphStatus::TrimphErrNullPointer;
    }
    let flat = std::slice::from_raw_parts(coords, n_points * dim);
    let points: Vec<Vec<f64>> = flat.chunks(dim.max(1)).map(|c| c.to_vec()).collect();
    match PointCloud::new(points) {
        Ok(cloud) => {
            *out = Box::into_raw(Box::new(TrimphCloud(cloud)));
            TrimphStatus::TrimphOk
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Releases a cloud handle. Null is ignored.
///
/// # Safety
/// `cloud` must be a pointer previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn trimph_cloud_free(cloud: *mut TrimphCloud) {
    if !cloud.is_null() {
        drop(Box::from_raw(cloud));
    }
}

/// Number of points in a cloud; 0 for null.
///
/// # Safety
/// `cloud` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn trimph_cloud_len(cloud: *const TrimphCloud) -> usize {
    cloud.as_ref().map_or(0, |c| c.0.len())
}

unsafe fn trim_common(
    cloud: *const TrimphCloud,
    kept_out: *mut usize,
    kept_capacity: usize,
    kept_len: *mut usize,
    run: impl FnOnce(&DistanceMatrix) -> Result<Vec<usize>, Error>,
) -> TrimphStatus {
    let (Some(cloud), false, false) = (cloud.as_ref(), kept_out.is_null(), kept_len.is_null())
    else {
        return TrimphStatus::TrimphErrNullPointer;
    };
    let d = match DistanceMatrix::from_cloud(&cloud.0) {
        Ok(d) => d,
        Err(e) => {
            set_error(&e.to_string());
            return status_of(&e);
        }
    };
    match run(&d) {
        Ok(kept) => {
            if kept.len() > kept_capacity {
                set_error("kept-index buffer too small");
                return TrimphStatus::TrimphErrInput;
            }
            let out = std::slice::from_raw_parts_mut(kept_out, kept.len());
            out.copy_from_slice(&kept);
            *kept_len = kept.len();
            TrimphStatus::TrimphOk
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Asymmetric trimming by average pairwise distance. Writes the kept
/// original indices (ascending) into `kept_out` and their count into
/// `kept_len`.
///
/// # Safety
/// `kept_out` must hold at least `kept_capacity` writable entries;
/// `kept_capacity` of at least the cloud size always suffices.
#[no_mangle]
pub unsafe extern "C" fn trimph_trim_asymmetric(
    cloud: *const TrimphCloud,
    alpha1: f64,
    alpha2: f64,
    kept_out: *mut usize,
    kept_capacity: usize,
    kept_len: *mut usize,
) -> TrimphStatus {
    trim_common(cloud, kept_out, kept_capacity, kept_len, |d| {
        Ok(trim_asymmetric(d, &TrimSpec::new(alpha1, alpha2)?)?.kept)
    })
}

/// One-sided trimming of the largest average pairwise distances.
///
/// # Safety
/// As for [`trimph_trim_asymmetric`].
#[no_mangle]
pub unsafe extern "C" fn trimph_trim_one_sided(
    cloud: *const TrimphCloud,
    alpha: f64,
    kept_out: *mut usize,
    kept_capacity: usize,
    kept_len: *mut usize,
) -> TrimphStatus {
    trim_common(cloud, kept_out, kept_capacity, kept_len, |d| {
        Ok(trim_one_sided(d, alpha)?.kept)
    })
}

/// The sub-cloud at the given indices (for chaining trim -> persistence).
///
/// # Safety
/// `indices` must point to `len` readable entries; `out` to a writable slot.
#[no_mangle]
pub unsafe extern "C" fn trimph_cloud_select(
    cloud: *const TrimphCloud,
    indices: *const usize,
    len: usize,
    out: *mut *mut TrimphCloud,
) -> TrimphStatus {
    let (Some(cloud), false, false) = (cloud.as_ref(), indices.is_null(), out.is_null()) else {
        return TrimphStatus::TrimphErrNullPointer;
    };
    let idx = std::slice::from_raw_parts(indices, len);
    match cloud.0.select(idx) {
        Ok(sub) => {
            *out = Box::into_raw(Box::new(TrimphCloud(sub)));
            TrimphStatus::TrimphOk
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Persistence diagram of the Rips filtration on a cloud, reported for
/// homology dimensions `0..=max_hom_dim`. A non-positive or non-finite
/// `threshold` selects the enclosing radius.
///
/// # Safety
/// `out` must point to a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn trimph_rips_persistence(
    cloud: *const TrimphCloud,
    threshold: f64,
    max_hom_dim: usize,
    out: *mut *mut TrimphDiagram,
) -> TrimphStatus {
    let (Some(cloud), false) = (cloud.as_ref(), out.is_null()) else {
        return TrimphStatus::TrimphErrNullPointer;
    };
    let t = if threshold > 0.0 && threshold.is_finite() {
        RipsThreshold::Value(threshold)
    } else {
        RipsThreshold::Auto
    };
    let result = DistanceMatrix::from_cloud(&cloud.0)
        .and_then(|d| flag_rips_persistence(&d, t, max_hom_dim));
    match result {
        Ok(dgm) => {
            *out = Box::into_raw(Box::new(TrimphDiagram(dgm)));
            TrimphStatus::TrimphOk
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Releases a diagram handle. Null is ignored.
///
/// # Safety
/// `dgm` must be a pointer previously returned by this library.
#[no_mangle]
pub unsafe extern "C" fn trimph_diagram_free(dgm: *mut TrimphDiagram) {
    if !dgm.is_null() {
        drop(Box::from_raw(dgm));
    }
}

/// Number of bars in a diagram; 0 for null.
///
/// # Safety
/// `dgm` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn trimph_diagram_len(dgm: *const TrimphDiagram) -> usize {
    dgm.as_ref().map_or(0, |d| d.0.bars.len())
}

/// Reads bar `index`: homology dimension, birth, and death (positive
/// infinity for essential classes).
///
/// # Safety
/// The three output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn trimph_diagram_bar(
    dgm: *const TrimphDiagram,
    index: usize,
    dim_out: *mut usize,
    birth_out: *mut f64,
    death_out: *mut f64,
) -> TrimphStatus {
    let Some(dgm) = dgm.as_ref() else {
        return TrimphStatus::TrimphErrNullPointer;
    };
    if dim_out.is_null() || birth_out.is_null() || death_out.is_null() {
        return TrimphStatus::TrimphErrNullPointer;
    }
    let Some(bar) = dgm.0.bars.get(index) else {
        set_error("bar index out of range");
        return TrimphStatus::TrimphErrInput;
    };
    *dim_out = bar.dim;
    *birth_out = bar.birth;
    *death_out = bar.death;
    TrimphStatus::TrimphOk
}

/// Bottleneck distance between two diagrams in one homology dimension.
/// Positive infinity when essential-class counts differ.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trimph_bottleneck(
    a: *const TrimphDiagram,
    b: *const TrimphDiagram,
    dim: usize,
    out: *mut f64,
) -> TrimphStatus {
    let (Some(a), Some(b), false) = (a.as_ref(), b.as_ref(), out.is_null()) else {
        return TrimphStatus::TrimphErrNullPointer;
    };
    *out = bottleneck(&a.0, &b.0, dim).value;
    TrimphStatus::TrimphOk
}

/// Hausdorff distance between two clouds of equal ambient dimension.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn trimph_hausdorff(
    a: *const TrimphCloud,
    b: *const TrimphCloud,
    out: *mut f64,
) -> TrimphStatus {
    let (Some(a), Some(b), false) = (a.as_ref(), b.as_ref(), out.is_null()) else {
        return TrimphStatus::TrimphErrNullPointer;
    };
    match hausdorff(&a.0, &b.0) {
        Ok(h) => {
            *out = h;
            TrimphStatus::TrimphOk
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

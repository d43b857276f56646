//! C ABI for curveclust.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `cc_*_free`. Every fallible call returns a
//! [`CcStatus`]; on failure `cc_last_error` describes the problem until the
//! next call on the same thread.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use libc::{c_char, size_t};

use curveclust::cluster::{sca, ClusterLabels};
use curveclust::datagen::{self, WarpConfig};
use curveclust::elastic::AlignConfig;
use curveclust::gram::GramTensor;
use curveclust::pipeline::{clrr_gram, cluster_from_gram, run_lrr, ClusterOutput};
use curveclust::solver::{LrrConfig, SolverConfig};
use curveclust::{Dataset, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    InvalidArgument = 1,
    DegenerateInput = 2,
    Geometry = 3,
    NumericalFailure = 4,
    Format = 5,
    MissingData = 6,
    Io = 7,
    NullPointer = 8,
    Panic = 9,
}

pub struct CcDataset(Dataset);

pub struct CcGram(GramTensor);

pub struct CcResult(ClusterOutput);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CcStatus {
    match e {
        Error::InvalidArgument(_) => CcStatus::InvalidArgument,
        Error::DegenerateInput(_) => CcStatus::DegenerateInput,
        Error::Antipodal { .. } | Error::OutOfInjectivity { .. } => CcStatus::Geometry,
        Error::NumericalFailure { .. } => CcStatus::NumericalFailure,
        Error::Gram { source, .. } => status_of(source),
        Error::Format(_) | Error::Json(_) | Error::Csv(_) => CcStatus::Format,
        Error::MissingData(_) => CcStatus::MissingData,
        Error::Io(_) => CcStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), CcStatus>) -> CcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CcStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {what}"));
            CcStatus::Panic
        }
    }
}

fn fail(e: Error) -> CcStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

fn null(what: &str) -> CcStatus {
    set_error(format!("{what} is null"));
    CcStatus::NullPointer
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, CcStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), CcStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next curveclust call on the same thread.
#[no_mangle]
pub extern "C" fn cc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a dataset from a `.csv` or `.json` file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_dataset_load(path: *const c_char, out: *mut *mut CcDataset) -> CcStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| fail(Error::InvalidArgument("path is not UTF-8".into())))?;
        let d = Dataset::load(Path::new(path)).map_err(fail)?;
        store(out, CcDataset(d))
    })
}

/// Progressively warped sine clusters (see the generator documentation).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_dataset_sine(
    clusters: size_t,
    per_cluster: size_t,
    samples: size_t,
    strength: f64,
    seed: u64,
    out: *mut *mut CcDataset,
) -> CcStatus {
    guard(|| {
        let cfg = WarpConfig {
            strength,
            ..WarpConfig::none()
        };
        let d = datagen::gen_sine_clusters(clusters, per_cluster, samples, &cfg, seed).map_err(fail)?;
        store(out, CcDataset(d))
    })
}

/// # Safety
/// `d` must be a live dataset handle or null.
#[no_mangle]
pub unsafe extern "C" fn cc_dataset_len(d: *const CcDataset) -> size_t {
    d.as_ref().map_or(0, |d| d.0.len())
}

/// Copies the ground-truth labels into `labels` (length `len`); unlabelled
/// curves are a missing-data error.
///
/// # Safety
/// `d` must be a live handle; `labels` must hold `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn cc_dataset_labels(d: *const CcDataset, labels: *mut size_t, len: size_t) -> CcStatus {
    guard(|| {
        let d = handle(d, "dataset")?;
        if labels.is_null() {
            return Err(null("labels"));
        }
        if len != d.0.len() {
            return Err(fail(Error::InvalidArgument(format!(
                "buffer holds {len} labels, dataset has {}",
                d.0.len()
            ))));
        }
        let truth = d.0.truth().map_err(fail)?;
        std::slice::from_raw_parts_mut(labels, len).copy_from_slice(truth.labels());
        Ok(())
    })
}

/// # Safety
/// `d` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cc_dataset_free(d: *mut CcDataset) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Builds the tangent-space Gram tensor of a dataset.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_gram_build(d: *const CcDataset, out: *mut *mut CcGram) -> CcStatus {
    guard(|| {
        let d = handle(d, "dataset")?;
        let g = clrr_gram(&d.0, &AlignConfig::default()).map_err(fail)?;
        store(out, CcGram(g))
    })
}

/// # Safety
/// `g` must be a live gram handle or null.
#[no_mangle]
pub unsafe extern "C" fn cc_gram_len(g: *const CcGram) -> size_t {
    g.as_ref().map_or(0, |g| g.0.len())
}

/// Entry `B^i_{jk}`.
///
/// # Safety
/// `g` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_gram_entry(g: *const CcGram, i: size_t, j: size_t, k: size_t, value: *mut f64) -> CcStatus {
    guard(|| {
        let g = handle(g, "gram")?;
        let n = g.0.len();
        if i >= n || j >= n || k >= n {
            return Err(fail(Error::InvalidArgument(format!("index ({i}, {j}, {k}) out of range for N = {n}"))));
        }
        if value.is_null() {
            return Err(null("value"));
        }
        *value = g.0.slice(i)[(j, k)];
        Ok(())
    })
}

/// # Safety
/// `g` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cc_gram_free(g: *mut CcGram) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Solves the manifold low-rank problem on `g` and clusters into `k` groups.
/// `lambda <= 0` selects the default weight.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_cluster_clrr(
    g: *const CcGram,
    k: size_t,
    lambda: f64,
    seed: u64,
    out: *mut *mut CcResult,
) -> CcStatus {
    guard(|| {
        let g = handle(g, "gram")?;
        let mut cfg = SolverConfig::default();
        if lambda > 0.0 {
            cfg.lambda = lambda;
        }
        let r = cluster_from_gram(&g.0, k, &cfg, seed).map_err(fail)?;
        store(out, CcResult(r))
    })
}

/// Euclidean baseline on the flattened curves. `lambda <= 0` selects the
/// default weight.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_cluster_lrr(
    d: *const CcDataset,
    k: size_t,
    lambda: f64,
    seed: u64,
    out: *mut *mut CcResult,
) -> CcStatus {
    guard(|| {
        let d = handle(d, "dataset")?;
        let mut cfg = LrrConfig::default();
        if lambda > 0.0 {
            cfg.lambda = lambda;
        }
        let r = run_lrr(&d.0, k, &cfg, seed).map_err(fail)?;
        store(out, CcResult(r))
    })
}

/// # Safety
/// `r` must be a live result handle or null.
#[no_mangle]
pub unsafe extern "C" fn cc_result_len(r: *const CcResult) -> size_t {
    r.as_ref().map_or(0, |r| r.0.labels.len())
}

/// # Safety
/// `r` must be a live handle; `labels` must hold `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn cc_result_labels(r: *const CcResult, labels: *mut size_t, len: size_t) -> CcStatus {
    guard(|| {
        let r = handle(r, "result")?;
        if labels.is_null() {
            return Err(null("labels"));
        }
        let src = r.0.labels.labels();
        if len != src.len() {
            return Err(fail(Error::InvalidArgument(format!(
                "buffer holds {len} labels, result has {}",
                src.len()
            ))));
        }
        std::slice::from_raw_parts_mut(labels, len).copy_from_slice(src);
        Ok(())
    })
}

/// Copies the `N x N` affinity matrix, row-major, into `values`.
///
/// # Safety
/// `r` must be a live handle; `values` must hold `len` writable elements.
#[no_mangle]
pub unsafe extern "C" fn cc_result_affinity(r: *const CcResult, values: *mut f64, len: size_t) -> CcStatus {
    guard(|| {
        let r = handle(r, "result")?;
        if values.is_null() {
            return Err(null("values"));
        }
        let a = &r.0.affinity;
        if len != a.len() {
            return Err(fail(Error::InvalidArgument(format!("buffer holds {len} values, need {}", a.len()))));
        }
        let dst = std::slice::from_raw_parts_mut(values, len);
        let n = a.nrows();
        for i in 0..n {
            for j in 0..n {
                dst[i * n + j] = a[(i, j)];
            }
        }
        Ok(())
    })
}

/// Solver iterations, or 0 for a null handle.
///
/// # Safety
/// `r` must be a live result handle or null.
#[no_mangle]
pub unsafe extern "C" fn cc_result_iterations(r: *const CcResult) -> size_t {
    r.as_ref().map_or(0, |r| r.0.diagnostics.iterations)
}

/// # Safety
/// `r` must be a live result handle or null.
#[no_mangle]
pub unsafe extern "C" fn cc_result_converged(r: *const CcResult) -> bool {
    r.as_ref().is_some_and(|r| r.0.diagnostics.converged)
}

/// # Safety
/// `r` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cc_result_free(r: *mut CcResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Clustering accuracy in percent between two label arrays of length `n`.
///
/// # Safety
/// `predicted` and `truth` must hold `n` readable elements; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn cc_sca(predicted: *const size_t, truth: *const size_t, n: size_t, out: *mut f64) -> CcStatus {
    guard(|| {
        if predicted.is_null() || truth.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let p = std::slice::from_raw_parts(predicted, n).to_vec();
        let t = std::slice::from_raw_parts(truth, n).to_vec();
        let p = ClusterLabels::from_labels(p).map_err(fail)?;
        let t = ClusterLabels::from_labels(t).map_err(fail)?;
        *out = sca(&p, &t).map_err(fail)?;
        Ok(())
    })
}

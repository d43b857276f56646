use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use curveclust_ffi::*;

fn last_error() -> String {
    let p = cc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn sine(per_cluster: usize, strength: f64) -> *mut CcDataset {
    let mut d = ptr::null_mut();
    let status = unsafe { cc_dataset_sine(3, per_cluster, 100, strength, 3, &mut d) };
    assert_eq!(status, CcStatus::Ok);
    d
}

#[test]
fn clrr_roundtrip_through_handles() {
    let d = sine(5, 0.0);
    assert_eq!(unsafe { cc_dataset_len(d) }, 15);
    let mut truth = vec![0usize; 15];
    assert_eq!(unsafe { cc_dataset_labels(d, truth.as_mut_ptr(), 15) }, CcStatus::Ok);

    let mut g = ptr::null_mut();
    assert_eq!(unsafe { cc_gram_build(d, &mut g) }, CcStatus::Ok);
    assert_eq!(unsafe { cc_gram_len(g) }, 15);
    let mut v = f64::NAN;
    assert_eq!(unsafe { cc_gram_entry(g, 2, 2, 7, &mut v) }, CcStatus::Ok);
    assert_eq!(v, 0.0);

    let mut r = ptr::null_mut();
    assert_eq!(unsafe { cc_cluster_clrr(g, 3, 0.0, 1, &mut r) }, CcStatus::Ok);
    assert!(unsafe { cc_result_converged(r) });
    assert!(unsafe { cc_result_iterations(r) } > 0);
    let mut labels = vec![0usize; 15];
    assert_eq!(unsafe { cc_result_labels(r, labels.as_mut_ptr(), 15) }, CcStatus::Ok);
    let mut score = 0.0;
    assert_eq!(unsafe { cc_sca(labels.as_ptr(), truth.as_ptr(), 15, &mut score) }, CcStatus::Ok);
    assert_eq!(score, 100.0);

    let mut a = vec![0.0; 225];
    assert_eq!(unsafe { cc_result_affinity(r, a.as_mut_ptr(), 225) }, CcStatus::Ok);
    assert!(a.iter().all(|x| *x >= 0.0));
    assert_eq!(a[15 + 4], a[4 * 15 + 1]);

    unsafe {
        cc_result_free(r);
        cc_gram_free(g);
        cc_dataset_free(d);
    }
}

#[test]
fn lrr_runs_through_handles() {
    let d = sine(4, 0.5);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { cc_cluster_lrr(d, 3, 1.0, 0, &mut r) }, CcStatus::Ok);
    assert_eq!(unsafe { cc_result_len(r) }, 12);
    unsafe {
        cc_result_free(r);
        cc_dataset_free(d);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut d = ptr::null_mut();
    let path = CString::new("/nonexistent/curves.csv").unwrap();
    let status = unsafe { cc_dataset_load(path.as_ptr(), &mut d) };
    assert_eq!(status, CcStatus::Io);
    assert!(d.is_null());
    assert!(!last_error().is_empty());

    let status = unsafe { cc_dataset_sine(1, 5, 40, 0.0, 0, &mut d) };
    assert_eq!(status, CcStatus::InvalidArgument);
    assert!(last_error().contains("clusters"));

    assert_eq!(unsafe { cc_dataset_load(ptr::null(), &mut d) }, CcStatus::NullPointer);
    let mut v = 0.0;
    assert_eq!(unsafe { cc_gram_entry(ptr::null(), 0, 0, 0, &mut v) }, CcStatus::NullPointer);

    let d = sine(3, 0.0);
    let mut short = vec![0usize; 2];
    assert_eq!(unsafe { cc_dataset_labels(d, short.as_mut_ptr(), 2) }, CcStatus::InvalidArgument);
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { cc_cluster_lrr(d, 100, 1.0, 0, &mut r) }, CcStatus::InvalidArgument);
    assert!(r.is_null());
    unsafe { cc_dataset_free(d) };
}

#[test]
fn success_clears_the_last_error() {
    let mut d = ptr::null_mut();
    unsafe { cc_dataset_sine(1, 5, 40, 0.0, 0, &mut d) };
    assert!(!cc_last_error().is_null());
    let d = sine(2, 0.0);
    assert!(cc_last_error().is_null());
    unsafe { cc_dataset_free(d) };
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        cc_dataset_free(ptr::null_mut());
        cc_gram_free(ptr::null_mut());
        cc_result_free(ptr::null_mut());
        assert_eq!(cc_dataset_len(ptr::null()), 0);
        assert!(!cc_result_converged(ptr::null()));
    }
}

#[test]
fn sca_permutation_invariance() {
    let truth = [0usize, 0, 1, 1, 2, 2];
    let renamed = [2usize, 2, 0, 0, 1, 1];
    let mut s = 0.0;
    assert_eq!(unsafe { cc_sca(renamed.as_ptr(), truth.as_ptr(), 6, &mut s) }, CcStatus::Ok);
    assert_eq!(s, 100.0);
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/curveclust.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for symbol in ["cc_gram_build", "cc_cluster_clrr", "cc_last_error", "CC_STATUS_PANIC", "typedef struct CcGram CcGram"] {
        assert!(text.contains(symbol), "missing {symbol}");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99"])
        .arg(&header)
        .output()
    else {
        eprintln!("no C compiler; skipped syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

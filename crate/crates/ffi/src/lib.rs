//! C ABI over the `snip` library.
//!
//! Objects are opaque handles created by `*_new`/`*_from_*` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`SnipStatus`]; on failure [`snip_last_error_message`] describes the
//! problem. Strings handed out by the library are released with
//! [`snip_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, size_t};

use snip::clustering::{read_partition_csv, write_clusters_csv};
use snip::config::{snip_config, KeyValues};
use snip::metrics::MetricReport;
use snip::pedigree::{read_csv, write_csv, ParseOptions};
use snip::pipeline::{check_pedigrees, run_snip, DedupOutcome};
use snip::{Error, PedigreeSet};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnipStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ConfigError = 3,
    DataError = 4,
    IoError = 5,
    Panic = 6,
}

/// Parsed pedigree data set.
pub struct SnipPedigreeSet {
    inner: PedigreeSet,
}

/// Result of one deduplication run.
pub struct SnipDedupResult {
    inner: DedupOutcome,
}

/// Partition comparison. `pairwise_defined` is 0 when pairwise precision or
/// recall has a zero denominator; the pairwise fields are then 0.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SnipMetrics {
    pub pairwise_precision: f64,
    pub pairwise_recall: f64,
    pub pairwise_f1: f64,
    pub pairwise_defined: i32,
    pub cluster_precision: f64,
    pub cluster_recall: f64,
    pub cluster_f1: f64,
    pub gmd: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> SnipStatus {
    match err {
        Error::Io(_) => SnipStatus::IoError,
        e if e.is_config_error() => SnipStatus::ConfigError,
        _ => SnipStatus::DataError,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (SnipStatus, String)>) -> SnipStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SnipStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SnipStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (SnipStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (SnipStatus, String)> {
    if p.is_null() {
        return Err((SnipStatus::NullPointer, format!("`{name}` is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        (
            SnipStatus::InvalidUtf8,
            format!("`{name}` is not valid UTF-8"),
        )
    })
}

fn out_arg<T>(p: *mut T, name: &str) -> Result<(), (SnipStatus, String)> {
    if p.is_null() {
        Err((SnipStatus::NullPointer, format!("`{name}` is null")))
    } else {
        Ok(())
    }
}

fn into_c_string(bytes: Vec<u8>) -> Result<*mut c_char, (SnipStatus, String)> {
    CString::new(bytes).map(CString::into_raw).map_err(|_| {
        (
            SnipStatus::DataError,
            "output contains a NUL byte".to_string(),
        )
    })
}

fn parse_set(text: &[u8]) -> Result<PedigreeSet, (SnipStatus, String)> {
    let set = read_csv(text, &ParseOptions::default()).map_err(lib_err)?;
    check_pedigrees(&set, false).map_err(lib_err)?;
    Ok(set)
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn snip_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn snip_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn snip_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Reads a pedigree CSV file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn snip_pedigree_set_from_csv_path(
    path: *const c_char,
    out: *mut *mut SnipPedigreeSet,
) -> SnipStatus {
    guard(|| {
        out_arg(out, "out")?;
        let path = str_arg(path, "path")?;
        let bytes =
            std::fs::read(path).map_err(|e| (SnipStatus::IoError, format!("{path}: {e}")))?;
        let inner = parse_set(&bytes)?;
        *out = Box::into_raw(Box::new(SnipPedigreeSet { inner }));
        Ok(())
    })
}

/// Parses pedigree CSV text.
///
/// # Safety
/// `csv` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn snip_pedigree_set_from_csv_str(
    csv: *const c_char,
    out: *mut *mut SnipPedigreeSet,
) -> SnipStatus {
    guard(|| {
        out_arg(out, "out")?;
        let text = str_arg(csv, "csv")?;
        let inner = parse_set(text.as_bytes())?;
        *out = Box::into_raw(Box::new(SnipPedigreeSet { inner }));
        Ok(())
    })
}

/// Number of families, or 0 for null.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn snip_pedigree_set_family_count(set: *const SnipPedigreeSet) -> size_t {
    set.as_ref().map_or(0, |s| s.inner.len())
}

/// # Safety
/// `set` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn snip_pedigree_set_free(set: *mut SnipPedigreeSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Deduplicates `set` with a `key = value` configuration.
///
/// # Safety
/// `set` must be a live handle, `config` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn snip_dedup_run(
    set: *const SnipPedigreeSet,
    config: *const c_char,
    out: *mut *mut SnipDedupResult,
) -> SnipStatus {
    guard(|| {
        out_arg(out, "out")?;
        let set = set
            .as_ref()
            .ok_or((SnipStatus::NullPointer, "`set` is null".to_string()))?;
        let text = str_arg(config, "config")?;
        let cfg = KeyValues::parse(text)
            .and_then(|kv| snip_config(&kv))
            .map_err(lib_err)?;
        let inner = run_snip(&set.inner, &cfg).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(SnipDedupResult { inner }));
        Ok(())
    })
}

/// Number of clusters, or 0 for null.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn snip_dedup_result_cluster_count(res: *const SnipDedupResult) -> size_t {
    res.as_ref().map_or(0, |r| r.inner.partition.len())
}

/// Number of families kept in the deduplicated set, or 0 for null.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn snip_dedup_result_family_count(res: *const SnipDedupResult) -> size_t {
    res.as_ref().map_or(0, |r| r.inner.deduplicated.len())
}

/// Cluster assignments as CSV (`famID,clusterID,isRepresentative`).
///
/// # Safety
/// `res` must be a live handle and `out` writable. Free the string with
/// [`snip_string_free`].
#[no_mangle]
pub unsafe extern "C" fn snip_dedup_result_clusters_csv(
    res: *const SnipDedupResult,
    out: *mut *mut c_char,
) -> SnipStatus {
    guard(|| {
        out_arg(out, "out")?;
        let r = res
            .as_ref()
            .ok_or((SnipStatus::NullPointer, "`res` is null".to_string()))?;
        let mut buf = Vec::new();
        write_clusters_csv(&r.inner.partition, &r.inner.representatives, &mut buf)
            .map_err(lib_err)?;
        *out = into_c_string(buf)?;
        Ok(())
    })
}

/// Deduplicated pedigree rows as CSV.
///
/// # Safety
/// `res` must be a live handle and `out` writable. Free the string with
/// [`snip_string_free`].
#[no_mangle]
pub unsafe extern "C" fn snip_dedup_result_dedup_csv(
    res: *const SnipDedupResult,
    out: *mut *mut c_char,
) -> SnipStatus {
    guard(|| {
        out_arg(out, "out")?;
        let r = res
            .as_ref()
            .ok_or((SnipStatus::NullPointer, "`res` is null".to_string()))?;
        let mut buf = Vec::new();
        write_csv(&r.inner.deduplicated, &mut buf).map_err(lib_err)?;
        *out = into_c_string(buf)?;
        Ok(())
    })
}

/// # Safety
/// `res` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn snip_dedup_result_free(res: *mut SnipDedupResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Compares two partitions given as CSV text whose first two columns are a
/// famID and its cluster label.
///
/// # Safety
/// Both strings must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn snip_evaluate(
    clusters_csv: *const c_char,
    truth_csv: *const c_char,
    out: *mut SnipMetrics,
) -> SnipStatus {
    guard(|| {
        out_arg(out, "out")?;
        let alg = read_partition_csv(str_arg(clusters_csv, "clusters_csv")?.as_bytes())
            .map_err(lib_err)?;
        let truth =
            read_partition_csv(str_arg(truth_csv, "truth_csv")?.as_bytes()).map_err(lib_err)?;
        let r = MetricReport::compute(&alg, &truth).map_err(lib_err)?;
        let pw = r.pairwise;
        let defined = pw.precision.is_some() && pw.recall.is_some();
        *out = SnipMetrics {
            pairwise_precision: pw.precision.unwrap_or(0.0),
            pairwise_recall: pw.recall.unwrap_or(0.0),
            pairwise_f1: pw.f1.unwrap_or(0.0),
            pairwise_defined: i32::from(defined),
            cluster_precision: r.cluster.precision,
            cluster_recall: r.cluster.recall,
            cluster_f1: r.cluster.f1,
            gmd: r.gmd,
        };
        Ok(())
    })
}

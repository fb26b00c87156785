use std::ffi::{CStr, CString};
use std::ptr;

use snip_ffi::*;

const TWO_FAMILIES: &str = "\
FamID,ID,MotherID,FatherID,isProband,Sex,CurAge,isAffBC,Site
1,1,2,3,1,0,50,0,A
1,2,NA,NA,0,0,75,1,A
1,3,NA,NA,0,1,77,0,A
2,1,2,3,1,0,50,0,A
2,2,NA,NA,0,0,75,1,A
2,3,NA,NA,0,1,77,0,A
3,1,2,3,1,0,31,1,B
3,2,NA,NA,0,0,60,0,B
3,3,NA,NA,0,1,58,0,B
";

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn take_string(p: *mut libc::c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { snip_string_free(p) };
    s
}

fn last_error() -> String {
    let p = snip_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load(csv: &str) -> *mut SnipPedigreeSet {
    let mut set = ptr::null_mut();
    let status = unsafe { snip_pedigree_set_from_csv_str(cstr(csv).as_ptr(), &mut set) };
    assert_eq!(status, SnipStatus::Ok);
    set
}

#[test]
fn dedup_round_trip() {
    let set = load(TWO_FAMILIES);
    assert_eq!(unsafe { snip_pedigree_set_family_count(set) }, 3);

    let config = cstr(
        "keyVars = CurAge,isAffBC\nkeyLength = all\nblockVars = Site\nwindow = 2\nthreshold = 1\n",
    );
    let mut res = ptr::null_mut();
    let status = unsafe { snip_dedup_run(set, config.as_ptr(), &mut res) };
    assert_eq!(status, SnipStatus::Ok);
    // Families 1 and 2 are identical; family 3 sits in its own block.
    assert_eq!(unsafe { snip_dedup_result_cluster_count(res) }, 2);
    assert_eq!(unsafe { snip_dedup_result_family_count(res) }, 2);

    let mut clusters = ptr::null_mut();
    assert_eq!(
        unsafe { snip_dedup_result_clusters_csv(res, &mut clusters) },
        SnipStatus::Ok
    );
    let clusters = take_string(clusters);
    assert_eq!(
        clusters,
        "famID,clusterID,isRepresentative\n1,1,1\n2,1,0\n3,2,1\n"
    );

    let mut dedup = ptr::null_mut();
    assert_eq!(
        unsafe { snip_dedup_result_dedup_csv(res, &mut dedup) },
        SnipStatus::Ok
    );
    let dedup = take_string(dedup);
    assert!(dedup.starts_with("FamID,ID,MotherID,FatherID"));
    assert!(!dedup.lines().any(|l| l.starts_with("2,")));

    let truth = cstr("famID,originFamID\n1,1\n2,1\n3,3\n");
    let mut m = SnipMetrics::default();
    let cl = cstr(&clusters);
    assert_eq!(
        unsafe { snip_evaluate(cl.as_ptr(), truth.as_ptr(), &mut m) },
        SnipStatus::Ok
    );
    assert_eq!(m.pairwise_f1, 1.0);
    assert_eq!(m.cluster_f1, 1.0);
    assert_eq!(m.gmd, 0);
    assert_eq!(m.pairwise_defined, 1);

    unsafe {
        snip_dedup_result_free(res);
        snip_pedigree_set_free(set);
    }
}

#[test]
fn config_errors_are_reported() {
    let set = load(TWO_FAMILIES);
    let mut res = ptr::null_mut();
    let config = cstr("keyVars = CurAge\nthreshold = 9\n");
    let status = unsafe { snip_dedup_run(set, config.as_ptr(), &mut res) };
    assert_eq!(status, SnipStatus::ConfigError);
    assert!(res.is_null());
    assert!(last_error().contains("threshold"));
    unsafe { snip_pedigree_set_free(set) };
}

#[test]
fn data_errors_and_null_arguments() {
    let mut set = ptr::null_mut();
    let bad = cstr("FamID,ID,MotherID\n1,1,NA\n");
    let status = unsafe { snip_pedigree_set_from_csv_str(bad.as_ptr(), &mut set) };
    assert_eq!(status, SnipStatus::DataError);
    assert!(last_error().contains("FatherID"));

    let status = unsafe { snip_pedigree_set_from_csv_str(ptr::null(), &mut set) };
    assert_eq!(status, SnipStatus::NullPointer);

    let missing = cstr("/nonexistent/pedigrees.csv");
    let status = unsafe { snip_pedigree_set_from_csv_path(missing.as_ptr(), &mut set) };
    assert_eq!(status, SnipStatus::IoError);

    // Null handles are tolerated by counters and destructors.
    assert_eq!(unsafe { snip_pedigree_set_family_count(ptr::null()) }, 0);
    unsafe {
        snip_pedigree_set_free(ptr::null_mut());
        snip_dedup_result_free(ptr::null_mut());
        snip_string_free(ptr::null_mut());
    }
}

#[test]
fn reads_from_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    std::fs::write(&path, TWO_FAMILIES).unwrap();
    let p = cstr(path.to_str().unwrap());
    let mut set = ptr::null_mut();
    assert_eq!(
        unsafe { snip_pedigree_set_from_csv_path(p.as_ptr(), &mut set) },
        SnipStatus::Ok
    );
    assert_eq!(unsafe { snip_pedigree_set_family_count(set) }, 3);
    unsafe { snip_pedigree_set_free(set) };
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(snip_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/snip.h"))
        .expect("header generated by the build script");
    for name in [
        "snip_pedigree_set_from_csv_str",
        "snip_dedup_run",
        "snip_evaluate",
        "snip_last_error_message",
        "SnipMetrics",
        "SNIP_STATUS_CONFIG_ERROR",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

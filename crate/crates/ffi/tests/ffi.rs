use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use mvgallery_ffi::*;

fn new_model(label: &str, lambda: &str) -> (MvgStatus, *mut MvgModel) {
    let label = CString::new(label).unwrap();
    let lambda = CString::new(lambda).unwrap();
    let mut m = ptr::null_mut();
    let s = unsafe { mvg_model_new(label.as_ptr(), lambda.as_ptr(), &mut m) };
    (s, m)
}

fn last_error() -> String {
    let p = mvg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn take(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { mvg_string_free(p) };
    s
}

#[test]
fn model_queries() {
    let (s, m) = new_model("A2", "1,1");
    assert_eq!(s, MvgStatus::Ok);
    let (mut rank, mut p, mut size, mut dim) = (0usize, 0usize, 0usize, 0u64);
    unsafe {
        assert_eq!(mvg_model_rank(m, &mut rank), MvgStatus::Ok);
        assert_eq!(mvg_model_gallery_length(m, &mut p), MvgStatus::Ok);
        assert_eq!(mvg_crystal_size(m, &mut size), MvgStatus::Ok);
        assert_eq!(mvg_weyl_dimension(m, &mut dim), MvgStatus::Ok);
        mvg_model_free(m);
    }
    let core = mvgallery::gallery::GalleryModel::from_label(
        "A2",
        &mvgallery::root_system::Coweight(vec![1, 1]),
    )
    .unwrap();
    assert_eq!((rank, p, size, dim), (2, core.p(), 8, 8));
}

#[test]
fn config_errors_set_message() {
    let (s, m) = new_model("A2", "-1,1");
    assert_eq!(s, MvgStatus::Config);
    assert!(m.is_null());
    assert!(last_error().contains("dominant"));

    let (s, _) = new_model("A2", "1");
    assert_eq!(s, MvgStatus::Config);
    assert!(last_error().contains("2 coordinates"));

    let (s, _) = new_model("Q7", "1");
    assert_eq!(s, MvgStatus::Config);

    let mut m = ptr::null_mut();
    let lambda = CString::new("1").unwrap();
    assert_eq!(
        unsafe { mvg_model_new(ptr::null(), lambda.as_ptr(), &mut m) },
        MvgStatus::NullPointer
    );
    let mut rank = 0usize;
    assert_eq!(
        unsafe { mvg_model_rank(ptr::null(), &mut rank) },
        MvgStatus::NullPointer
    );
}

#[test]
fn json_outputs() {
    let (_, m) = new_model("A2", "1,1");
    let nu = CString::new("0,0").unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(mvg_polytopes_json(m, nu.as_ptr(), &mut out), MvgStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["polytopes"].as_array().unwrap().len(), 2);

        assert_eq!(mvg_crystal_json(m, 3, &mut out), MvgStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 8);
        assert_eq!(v["seed"], 3);

        assert_eq!(mvg_verify_retraction_json(m, 7, &mut out), MvgStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        let records = v["records"].as_array().unwrap();
        assert_eq!(records.len(), 48);
        assert!(records.iter().all(|r| r["status"] == "pass"));
        mvg_model_free(m);
    }

    let (_, b2) = new_model("B2", "1,1");
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { mvg_verify_retraction_json(b2, 0, &mut out) },
        MvgStatus::Config
    );
    assert!(out.is_null());
    unsafe { mvg_model_free(b2) };
}

#[test]
fn header_lists_every_export() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/mvgallery.h")).unwrap();
    for name in [
        "mvg_last_error",
        "mvg_string_free",
        "mvg_model_new",
        "mvg_model_free",
        "mvg_model_rank",
        "mvg_model_gallery_length",
        "mvg_crystal_size",
        "mvg_weyl_dimension",
        "mvg_crystal_json",
        "mvg_polytopes_json",
        "mvg_verify_retraction_json",
        "MVG_STATUS_PRECISION = 4",
        "typedef struct MvgModel MvgModel",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles the C example against the generated header and the shared
/// library built alongside this test.
#[test]
fn c_smoke_program() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let deps = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let libdir = deps.parent().unwrap().to_path_buf();
    if !libdir.join("libmvgallery_ffi.so").exists() {
        eprintln!("shared library not found in {}; skipping", libdir.display());
        return;
    }
    let exe = std::env::temp_dir().join(format!("mvgallery_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(dir.join("examples/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg("-L")
        .arg(&libdir)
        .arg(format!("-Wl,-rpath,{}", libdir.display()))
        .arg("-lmvgallery_ffi")
        .arg("-o")
        .arg(&exe)
        .status();
    let Ok(status) = status else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "8 8 1 2 null\n");
}

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use killing_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(kf_last_error_message()) }.to_str().unwrap().to_string()
}

fn catalog(name: &str) -> *mut KfMetric {
    let name = CString::new(name).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { kf_metric_catalog(name.as_ptr(), &mut m) }, KfStatus::Ok);
    m
}

#[test]
fn paraboloid_through_handles() {
    let m = catalog("paraboloid");
    let mut r = ptr::null_mut();
    let point = CString::new("1,0").unwrap();
    unsafe {
        assert_eq!(kf_analyze(m, point.as_ptr(), ptr::null(), &mut r), KfStatus::Ok);
        assert_eq!(kf_report_terminal_dim(r), 1);
        assert_eq!(kf_report_exit_code(r), 0);
        let mut ranks = [0usize; 4];
        assert_eq!(kf_report_ranks(r, ranks.as_mut_ptr(), ranks.len()), 3);
        assert_eq!(&ranks[..3], &[2, 1, 1]);
        assert_eq!(CStr::from_ptr(kf_report_label(r)).to_str().unwrap(), "abelian-1d");
        let json = kf_report_json(r);
        let doc: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(doc["diagnostics"]["surface"]["c"]["exact"], "4/25");
        kf_string_free(json);
        kf_report_free(r);
        kf_metric_free(m);
    }
    assert_eq!(last_error(), "");
}

#[test]
fn toml_metric_and_config() {
    let text = CString::new("coords = [\"t\", \"x\"]\nsignature = [1, 1]\ncomponents = [\"-1\", \"0\", \"1\"]\npoint = [\"1/2\", \"1/4\"]").unwrap();
    let mut m = ptr::null_mut();
    let mut r = ptr::null_mut();
    let mut config: KfConfig = unsafe { std::mem::zeroed() };
    unsafe {
        assert_eq!(kf_config_default(&mut config), KfStatus::Ok);
        assert_eq!(config.probes, 4);
        assert_eq!(config.probe_radius, 0.01);
        config.float_mode = 1;
        assert_eq!(kf_metric_from_toml(text.as_ptr(), &mut m), KfStatus::Ok);
        assert_eq!(kf_metric_dim(m), 2);
        assert_eq!(kf_analyze(m, ptr::null(), &config, &mut r), KfStatus::Ok);
        assert_eq!(CStr::from_ptr(kf_report_label(r)).to_str().unwrap(), "semidirect-e(1,1)-type");
        kf_report_free(r);
        kf_metric_free(m);
    }
}

#[test]
fn status_codes() {
    let mut m = ptr::null_mut();
    let bad = CString::new("coords = [\"x\"]\ncomponents = [\"1\", \"2\"]").unwrap();
    assert_eq!(unsafe { kf_metric_from_toml(bad.as_ptr(), &mut m) }, KfStatus::InvalidMetric);
    assert!(m.is_null());
    assert!(last_error().starts_with("[cli] invalid metric"), "{}", last_error());

    let torus = CString::new("torus").unwrap();
    assert_eq!(unsafe { kf_metric_catalog(torus.as_ptr(), &mut m) }, KfStatus::UnknownCatalogEntry);
    assert_eq!(unsafe { kf_metric_catalog(ptr::null(), &mut m) }, KfStatus::NullArgument);

    let polar = catalog("euclidean-polar");
    let mut r = ptr::null_mut();
    let origin = CString::new("0,1").unwrap();
    let junk = CString::new("0,y").unwrap();
    let mut config: KfConfig = unsafe { std::mem::zeroed() };
    unsafe {
        assert_eq!(kf_analyze(polar, origin.as_ptr(), ptr::null(), &mut r), KfStatus::SingularMetric);
        assert!(r.is_null());
        assert!(last_error().starts_with("[tensor]"));
        assert_eq!(kf_analyze(polar, junk.as_ptr(), ptr::null(), &mut r), KfStatus::InvalidConfig);
        kf_config_default(&mut config);
        config.tol = -1.0;
        assert_eq!(kf_analyze(polar, ptr::null(), &config, &mut r), KfStatus::InvalidConfig);
        assert_eq!(kf_analyze(ptr::null(), ptr::null(), ptr::null(), &mut r), KfStatus::NullArgument);
        assert_eq!(kf_report_terminal_dim(ptr::null()), 0);
        assert!(kf_report_json(ptr::null()).is_null());
        kf_metric_free(polar);
        kf_metric_free(ptr::null_mut());
        kf_report_free(ptr::null_mut());
        kf_string_free(ptr::null_mut());
        assert_eq!(CStr::from_ptr(kf_status_name(KfStatus::SingularMetric)).to_str().unwrap(), "singular metric");
    }
}

#[test]
fn c_program_links_against_the_header() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = crate_dir.join("include/killing.h");
    assert!(std::fs::read_to_string(&header).unwrap().contains("kf_analyze"));
    // target/<profile>/deps/capi-<hash> -> target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libkilling_ffi.so");
    assert!(lib.exists(), "cdylib missing at {}", lib.display());
    let out_dir = tempfile_dir();
    let exe = out_dir.join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Wextra", "-Werror", "-o"])
        .arg(&exe)
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg("-L")
        .arg(&profile_dir)
        .arg("-lkilling_ffi")
        .status()
        .expect("C compiler runs");
    assert!(status.success());
    let run = Command::new(&exe).env("LD_LIBRARY_PATH", &profile_dir).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8(run.stdout).unwrap().trim(), "expression error");
    let _ = std::fs::remove_dir_all(&out_dir);
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("killing-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use gcg_ffi::*;

#[test]
fn t_dims_table() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(gcg_t_dims(2, 1, false, 4, &mut t), GcgStatus::Ok);
        assert_eq!(gcg_table_rows(t), 4);
        let q: Vec<u64> = (0..4)
            .map(|w| {
                let mut v = 0;
                assert_eq!(gcg_table_get(t, w, 3, &mut v), GcgStatus::Ok);
                v
            })
            .collect();
        assert_eq!(q, [4, 1, 2, 3]);
        assert!(gcg_table_column_name(t, 4).is_null());
        gcg_table_free(t);
    }
}

#[test]
fn grt_table_framed_genus_one() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(gcg_grt_table(1, true, 4, &mut t), GcgStatus::Ok);
        let col = |c: usize| -> Vec<u64> {
            (0..gcg_table_rows(t))
                .map(|w| {
                    let mut v = 0;
                    gcg_table_get(t, w, c, &mut v);
                    v
                })
                .collect()
        };
        assert_eq!(col(1), [3, 0, 1, 0, 3]);
        assert_eq!(col(2), [0, 0, 1, 0, 0]);
        gcg_table_free(t);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(gcg_t_dims(1, 2, false, 3, &mut t), GcgStatus::Computation);
        assert!(t.is_null());
        let msg = CStr::from_ptr(gcg_last_error()).to_str().unwrap();
        assert!(msg.contains("non-framed"), "{msg}");
        assert_eq!(gcg_t_dims(1, 300, true, 3, &mut t), GcgStatus::InvalidArgument);
        assert_eq!(gcg_t_dims(1, 1, true, 3, ptr::null_mut()), GcgStatus::NullPointer);
        assert_eq!(gcg_t_dims(1, 1, true, 2, &mut t), GcgStatus::Ok);
        assert!(gcg_last_error().is_null());
        let mut v = 0;
        assert_eq!(gcg_table_get(t, 0, 9, &mut v), GcgStatus::OutOfRange);
        gcg_table_free(t);
        gcg_table_free(ptr::null_mut());
        gcg_report_free(ptr::null_mut());
        gcg_string_free(ptr::null_mut());
    }
}

#[test]
fn verify_report() {
    let mut cfg = gcg_config_default();
    cfg.g = 2;
    cfg.max_vertices = 2;
    cfg.max_edges = 2;
    cfg.max_decorations = 3;
    let suites = CString::new("mc, tripods").unwrap();
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(gcg_verify(suites.as_ptr(), &cfg, &mut r), GcgStatus::Ok);
        assert!(gcg_report_passed(r));
        let n = gcg_report_len(r);
        assert!(n > 2);
        let anchors: Vec<&str> = (0..n).map(|i| CStr::from_ptr(gcg_report_check_anchor(r, i)).to_str().unwrap()).collect();
        assert!(anchors.contains(&"gc.tripod.closed"));
        let mut passed = false;
        assert_eq!(gcg_report_check_passed(r, n - 1, &mut passed), GcgStatus::Ok);
        assert!(passed);
        assert_eq!(gcg_report_check_passed(r, n, &mut passed), GcgStatus::OutOfRange);
        let json = gcg_report_to_json(r);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["total"].as_u64().unwrap() as usize, n);
        gcg_string_free(json);
        gcg_report_free(r);

        cfg.tadpoles = true;
        let mc = CString::new("mc").unwrap();
        assert_eq!(gcg_verify(mc.as_ptr(), &cfg, &mut r), GcgStatus::InvalidArgument);
    }
}

#[test]
fn mo_residual_vanishes() {
    for (r, g) in [(1, 1), (2, 2)] {
        let mut res = 1;
        unsafe {
            assert_eq!(gcg_mo_mc_residual(r, g, true, 3, &mut res), GcgStatus::Ok);
        }
        assert_eq!(res, 0);
    }
}

/// Compiles the C program in `tests/c` against the generated header and the
/// static library, then runs it.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libgcg_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("gcg_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler runs");
    assert!(status.success());
    let out = Command::new(&exe).env_remove("GCG_CACHE_DIR").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}

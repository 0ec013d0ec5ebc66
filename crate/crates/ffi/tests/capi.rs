use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use hydra_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { hydra_string_free(p) };
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(hydra_last_error()) }.to_string_lossy().into_owned()
}

fn map(name: &str) -> *mut HydraMapHandle {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { hydra_map_from_source(c(name).as_ptr(), &mut m) }, HydraStatus::Ok);
    m
}

#[test]
fn map_roundtrip() {
    let m = map("H3");
    unsafe {
        assert_eq!(hydra_map_rho(m), 2);
        let mut v = 0;
        assert_eq!(hydra_map_apply(m, 3, &mut v), HydraStatus::Ok);
        assert_eq!(v, 5);
        assert_eq!(hydra_map_apply(m, 4, &mut v), HydraStatus::Ok);
        assert_eq!(v, 2);
        assert_eq!(hydra_map_apply(m, u64::MAX, &mut v), HydraStatus::Domain);
        assert!(last_error().contains("overflows"));

        let mut out = ptr::null_mut();
        assert_eq!(hydra_map_digest(m, &mut out), HydraStatus::Ok);
        assert_eq!(take(out).len(), 64);
        assert_eq!(hydra_map_validate(m, &mut out), HydraStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert!(report.is_object());
        assert_eq!(hydra_orbit(m, 7, 1000, 1 << 40, &mut out), HydraStatus::Ok);
        assert!(take(out).contains("26"));
        hydra_map_free(m);
    }
}

#[test]
fn map_from_json_text() {
    let json = c(r#"{"rho": 2, "branches": [{"a":1,"b":0,"d":2},{"a":3,"b":1,"d":2}]}"#);
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(hydra_map_from_json(json.as_ptr(), &mut m), HydraStatus::Ok);
        let mut v = 0;
        hydra_map_apply(m, 3, &mut v);
        assert_eq!(v, 5);
        hydra_map_free(m);
    }
}

#[test]
fn image_and_fixed_point() {
    let m = map("H3");
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(hydra_qh_apply_basis(m, c("1/5").as_ptr(), &mut out), HydraStatus::Ok);
        let img = take(out);
        for t in ["1/10", "3/10", "3/5", "4/5"] {
            assert!(img.contains(t), "{t} missing from {img}");
        }

        let mut one = ptr::null_mut();
        assert_eq!(hydra_qz_indicator(c("0").as_ptr(), &mut one), HydraStatus::Ok);
        let mut image = ptr::null_mut();
        assert_eq!(hydra_qh_apply(m, one, &mut image), HydraStatus::Ok);
        let mut same = false;
        assert_eq!(hydra_qz_equal(one, image, &mut same), HydraStatus::Ok);
        assert!(same);
        assert_eq!(hydra_qz_len(image), 1);

        let mut json = ptr::null_mut();
        assert_eq!(hydra_qz_to_json(image, &mut json), HydraStatus::Ok);
        let text = c(&take(json));
        let mut parsed = ptr::null_mut();
        assert_eq!(hydra_qz_from_json(text.as_ptr(), &mut parsed), HydraStatus::Ok);
        hydra_qz_equal(parsed, one, &mut same);
        assert!(same);

        hydra_qz_free(parsed);
        hydra_qz_free(image);
        hydra_qz_free(one);
        hydra_map_free(m);
    }
}

#[test]
fn profinite_walk_kernel() {
    let m = map("H3");
    unsafe {
        let mut eq = false;
        for (t, n) in [("1/5", 0), ("2/7", 13), ("5/12", -4)] {
            assert_eq!(hydra_qh_check_profinite(m, c(t).as_ptr(), n, &mut eq), HydraStatus::Ok);
            assert!(eq, "{t} {n}");
        }

        let mut out = ptr::null_mut();
        assert_eq!(hydra_walk(m, c("1/5").as_ptr(), 3, &mut out), HydraStatus::Ok);
        let walk: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(walk["steps"][0]["chosen"], "1/15");
        assert_eq!(walk["steps"].as_array().unwrap().len(), 3);

        assert_eq!(hydra_kernel(m, 5, true, 0, &mut out), HydraStatus::Ok);
        let k: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(k["verified"], true);
        assert_eq!(k["dimension"], 1);

        assert_eq!(hydra_kernel(m, 9, true, 2, &mut out), HydraStatus::Resource);
        assert!(!last_error().is_empty());
        hydra_map_free(m);
    }
}

#[test]
fn series_and_residue() {
    unsafe {
        let (mut re, mut im, mut tail) = (0.0, 0.0, 0.0);
        let st = hydra_eval_series(
            c("ap:1,0").as_ptr(),
            HydraSeriesKind::Ordinary,
            0.5,
            0.0,
            1000,
            1e-12,
            &mut re,
            &mut im,
            &mut tail,
        );
        assert_eq!(st, HydraStatus::Ok);
        assert!((re - 2.0).abs() < 1e-9 && im.abs() < 1e-12);

        let mut diag = HydraDiagnostic::Divergent;
        let st = hydra_virtual_residue(c("ap:3,0").as_ptr(), c("1/3").as_ptr(), &mut re, &mut im, &mut diag);
        assert_eq!(st, HydraStatus::Ok);
        assert_eq!(diag, HydraDiagnostic::Converged);
        let expect = 1.0 / (6.0 * std::f64::consts::PI);
        assert!((re.hypot(im) - expect).abs() < 1e-3, "{re} {im}");
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(hydra_map_from_source(ptr::null(), &mut m), HydraStatus::NullPointer);
        assert!(last_error().contains("null"));
        assert_eq!(hydra_map_from_source(c("no-such-map").as_ptr(), &mut m), HydraStatus::Parse);
        assert!(m.is_null());

        let bad = [0xffu8, 0];
        assert_eq!(hydra_map_from_source(bad.as_ptr().cast(), &mut m), HydraStatus::InvalidUtf8);

        let h3 = map("H3");
        assert!(last_error().is_empty());
        assert_eq!(hydra_map_apply(h3, 1, ptr::null_mut()), HydraStatus::NullPointer);
        let mut out = ptr::null_mut();
        assert_eq!(hydra_qh_apply_basis(h3, c("x/y").as_ptr(), &mut out), HydraStatus::Parse);
        hydra_map_free(h3);

        let composite = c(
            r#"{"rho": 4, "branches": [{"a":1,"b":0,"d":4},{"a":1,"b":3,"d":4},{"a":1,"b":6,"d":4},{"a":1,"b":9,"d":4}]}"#,
        );
        assert_eq!(hydra_map_from_json(composite.as_ptr(), &mut m), HydraStatus::Ok);
        assert_eq!(hydra_kernel(m, 3, false, 0, &mut out), HydraStatus::Capability);
        hydra_map_free(m);

        assert_eq!(hydra_map_rho(ptr::null()), 0);
        hydra_map_free(ptr::null_mut());
        hydra_qz_free(ptr::null_mut());
        hydra_string_free(ptr::null_mut());
        assert!(!CStr::from_ptr(hydra_version()).to_bytes().is_empty());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hydra.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 20);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct HydraMapHandle HydraMapHandle;"));
    assert!(header.contains("HYDRA_STATUS_CAPABILITY = 5"));
}

#[test]
fn c_program_links_against_static_lib() {
    let Ok(cc) = std::process::Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler, skipping");
        return;
    };
    assert!(cc.status.success());
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libhydra_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let status = std::process::Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = std::process::Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "smoke exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}

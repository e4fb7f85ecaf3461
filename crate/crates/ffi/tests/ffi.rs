use std::ffi::{CStr, CString};
use std::ptr;

use combing_ffi::*;

fn field(spec: &str) -> *mut CombingField {
    let s = CString::new(spec).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { combing_field_parse(s.as_ptr(), &mut f) }, CombingStatus::Ok);
    assert!(!f.is_null());
    f
}

fn last_error() -> String {
    let p = combing_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn distance_between_hopf_fields() {
    let (x, y) = (field("hopf+"), field("hopf-"));
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(combing_distance(x, y, ptr::null(), &mut r), CombingStatus::Ok);
        let mut d = -1;
        assert_eq!(combing_report_distance(r, &mut d), CombingStatus::Ok);
        assert_eq!(d, 1);
        let mut h = 0;
        assert_eq!(combing_report_signed_h(r, &mut h), CombingStatus::Ok);
        assert_eq!(h.abs(), 1);
        let mut i = 0;
        assert_eq!(combing_report_homotopy_number(r, &mut i), CombingStatus::OutOfRange);
        let json = CStr::from_ptr(combing_report_json(r)).to_str().unwrap();
        let v: serde_json::Value = serde_json::from_str(json).unwrap();
        assert_eq!(v["D"], 1);
        combing_report_free(r);
        combing_field_free(x);
        combing_field_free(y);
    }
}

#[test]
fn homotopy_number_of_twist() {
    let x = field("xn:2");
    let p = combing_params_new();
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(combing_homotopy_number(x, p, &mut r), CombingStatus::Ok);
        let mut i = -1;
        assert_eq!(combing_report_homotopy_number(r, &mut i), CombingStatus::Ok);
        assert_eq!(i, 1);
        combing_report_free(r);
        combing_params_free(p);
        combing_field_free(x);
    }
}

#[test]
fn parse_errors_report_status_and_message() {
    let s = CString::new("seifert:2,4").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { combing_field_parse(s.as_ptr(), &mut f) }, CombingStatus::ParseError);
    assert!(f.is_null());
    assert!(last_error().contains("seifert"));
    assert_eq!(unsafe { combing_field_parse(ptr::null(), &mut f) }, CombingStatus::NullPointer);
    let bad = [0xffu8, 0];
    assert_eq!(unsafe { combing_field_parse(bad.as_ptr().cast(), &mut f) }, CombingStatus::InvalidUtf8);
}

#[test]
fn identical_fields_fail_strictly_only_through_links() {
    let (x, y) = (field("hopf+"), field("hopf+"));
    let mut l = ptr::null_mut();
    unsafe {
        assert_eq!(combing_extract(x, y, ptr::null(), &mut l), CombingStatus::TransversalityFailure);
        assert!(last_error().contains("--perturb"));
        combing_field_free(x);
        combing_field_free(y);
    }
}

#[test]
fn extracted_loops_are_copied_out() {
    let (x, y) = (field("hopf+"), field("hopf-"));
    let mut l = ptr::null_mut();
    unsafe {
        assert_eq!(combing_extract(x, y, ptr::null(), &mut l), CombingStatus::Ok);
        let mut n = 0;
        assert_eq!(combing_links_count(l, CombingSignClass::Positive as u32, &mut n), CombingStatus::Ok);
        assert_eq!(n, 1);
        assert_eq!(combing_links_count(l, 7, &mut n), CombingStatus::OutOfRange);
        let mut len = 0;
        assert_eq!(combing_links_loop(l, 0, 0, ptr::null_mut(), 0, &mut len), CombingStatus::Ok);
        assert!(len > 10);
        let mut small = vec![0.0; 4];
        assert_eq!(combing_links_loop(l, 0, 0, small.as_mut_ptr(), 4, &mut len), CombingStatus::BufferTooSmall);
        let mut a = vec![0.0; 4 * len];
        assert_eq!(combing_links_loop(l, 0, 0, a.as_mut_ptr(), a.len(), &mut len), CombingStatus::Ok);
        let mut lb = 0;
        assert_eq!(combing_links_loop(l, 1, 0, ptr::null_mut(), 0, &mut lb), CombingStatus::Ok);
        let mut b = vec![0.0; 4 * lb];
        assert_eq!(combing_links_loop(l, 1, 0, b.as_mut_ptr(), b.len(), &mut lb), CombingStatus::Ok);
        assert_eq!(combing_links_loop(l, 1, 5, ptr::null_mut(), 0, &mut lb), CombingStatus::OutOfRange);
        // every point is on S³
        for c in a.chunks_exact(4) {
            assert!((c.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let mut link = 0;
        assert_eq!(combing_gauss_linking(a.as_ptr(), len, b.as_ptr(), lb, &mut link), CombingStatus::Ok);
        assert_eq!(link.abs(), 1);
        combing_links_free(l);
        combing_field_free(x);
        combing_field_free(y);
    }
}

#[test]
fn field_evaluation_is_unit_and_tangent() {
    let f = field("R(ms:3)");
    let x = [0.3, -0.2, 0.5, 0.7];
    let mut v = [0.0; 4];
    unsafe {
        assert_eq!(combing_field_eval(f, x.as_ptr(), v.as_mut_ptr()), CombingStatus::Ok);
        let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        let dot: f64 = (0..4).map(|k| v[k] * x[k] / n).sum();
        assert!(dot.abs() < 1e-12);
        assert!((v.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(combing_field_eval(f, [0.0; 4].as_ptr(), v.as_mut_ptr()), CombingStatus::OutOfRange);
        combing_field_free(f);
    }
}

#[test]
fn params_validation() {
    let p = combing_params_new();
    unsafe {
        assert_eq!(combing_params_set_resolution(p, 1), CombingStatus::ConfigError);
        assert_eq!(combing_params_set_resolution(p, 32), CombingStatus::Ok);
        assert_eq!(combing_params_set_eps(p, -1.0), CombingStatus::ConfigError);
        assert_eq!(combing_params_set_resolution(ptr::null_mut(), 32), CombingStatus::NullPointer);
        combing_params_free(p);
        combing_params_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(combing_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api_and_compiles_as_c() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/combing.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in
        ["combing_field_parse", "combing_distance", "combing_homotopy_number", "combing_extract", "COMBING_STATUS_OK"]
    {
        assert!(text.contains(name), "{name} missing from header");
    }
    // syntax check with the system C compiler when one is present
    let probe = std::process::Command::new("cc").arg("--version").output();
    if probe.is_ok_and(|o| o.status.success()) {
        let src = tempfile_path("combing_header_check.c");
        std::fs::write(
            &src,
            format!("#include \"{}\"\nint main(void) {{ return combing_version() == 0; }}\n", header.display()),
        )
        .unwrap();
        let out = std::process::Command::new("cc")
            .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
            .arg(&src)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}

fn tempfile_path(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("{}_{name}", std::process::id()))
}

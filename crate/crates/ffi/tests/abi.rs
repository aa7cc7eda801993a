use std::ffi::{CStr, CString};
use std::ptr;

use koszul_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    koszul_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = koszul_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn version_matches_core() {
    let v = unsafe { CStr::from_ptr(koszul_version()) };
    assert_eq!(v.to_str().unwrap(), koszul_core::cli::VERSION);
}

#[test]
fn handles_round_trip() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(koszul_algebra_load(c("su2").as_ptr(), &mut g), KoszulStatus::Ok);
        assert_eq!(koszul_algebra_dim(g), 3);

        let mut m = ptr::null_mut();
        assert_eq!(koszul_module_load(g, c("exterior").as_ptr(), &mut m), KoszulStatus::Ok);
        // the module outlives the algebra handle
        koszul_algebra_free(g);
        assert_eq!(koszul_module_total_dim(m), 8);
        assert_eq!(koszul_module_validate(m), KoszulStatus::Ok);

        let mut json = ptr::null_mut();
        assert_eq!(koszul_duality(m, 6, false, &mut json), KoszulStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(report["pass"], true);

        let mut json = ptr::null_mut();
        assert_eq!(koszul_duality(m, 6, true, &mut json), KoszulStatus::MathFailure);
        let report: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(report["pass"], false);
        koszul_module_free(m);
    }
}

#[test]
fn run_matches_cli_envelope() {
    let cfg = koszul_core::cli::RunConfig::new(koszul_core::cli::Command::Transgress, "sl2", "trivial", 8);
    let expected = koszul_core::cli::run(&cfg).unwrap().to_json();
    unsafe {
        let mut json = ptr::null_mut();
        let text = c(&serde_json::to_string(&cfg).unwrap());
        assert_eq!(koszul_run(text.as_ptr(), &mut json), KoszulStatus::Ok);
        assert_eq!(take(json), expected);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(koszul_algebra_load(c("so5").as_ptr(), &mut g), KoszulStatus::InvalidInput);
        assert!(g.is_null());
        assert!(last_error().contains("so5"));

        assert_eq!(koszul_algebra_load(ptr::null(), &mut g), KoszulStatus::NullPointer);
        assert_eq!(koszul_module_validate(ptr::null()), KoszulStatus::NullPointer);

        let bad = [0xffu8, 0];
        assert_eq!(koszul_algebra_load(bad.as_ptr().cast(), &mut g), KoszulStatus::InvalidUtf8);

        let mut json = ptr::null_mut();
        assert_eq!(koszul_run(c("{\"command\": 3}").as_ptr(), &mut json), KoszulStatus::InvalidInput);
        assert!(json.is_null());
        assert!(last_error().starts_with("config"));

        assert_eq!(koszul_algebra_load(c("su2").as_ptr(), &mut g), KoszulStatus::Ok);
        let mut m = ptr::null_mut();
        assert_eq!(koszul_module_load(g, c("forms:diagonal:1").as_ptr(), &mut m), KoszulStatus::InvalidInput);
        koszul_algebra_free(g);

        koszul_algebra_free(ptr::null_mut());
        koszul_module_free(ptr::null_mut());
        koszul_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/koszul.h");
    for name in [
        "koszul_version",
        "koszul_last_error",
        "koszul_string_free",
        "koszul_algebra_load",
        "koszul_algebra_dim",
        "koszul_algebra_free",
        "koszul_module_load",
        "koszul_module_total_dim",
        "koszul_module_free",
        "koszul_module_validate",
        "koszul_duality",
        "koszul_run",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct KoszulModule KoszulModule;"));
}

#[test]
fn header_compiles_as_c() {
    let dir = std::env::temp_dir().join(format!("koszul-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        "#include \"koszul.h\"\nint main(void) { KoszulAlgebra *g = 0; return koszul_algebra_load(\"su2\", &g) == KOSZUL_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let out = match std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", include])
        .arg(&src)
        .output()
    {
        Ok(o) => o,
        Err(e) => {
            eprintln!("skipping: no C compiler ({e})");
            return;
        }
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

use std::ffi::CString;
use std::ptr;

use mixedvol_ffi::*;

fn cube(n: usize) -> *mut MvPolytope {
    let mut coords = Vec::new();
    for mask in 0..(1u32 << n) {
        for i in 0..n {
            coords.push(((mask >> i) & 1) as f64);
        }
    }
    let mut out = ptr::null_mut();
    let s = unsafe { mv_polytope_new(n, coords.as_ptr(), 1 << n, &mut out) };
    assert_eq!(s, MvStatus::Ok);
    out
}

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = unsafe { mv_last_error_message(buf.as_mut_ptr() as *mut _, buf.len()) };
    buf.truncate(n.min(255));
    String::from_utf8(buf).unwrap()
}

#[test]
fn cube_functionals() {
    let c = cube(3);
    let mut x = 0.0;
    unsafe {
        assert_eq!(mv_polytope_dim(c), 3);
        assert_eq!(mv_polytope_vertex_count(c), 8);
        assert_eq!(mv_volume(c, &mut x), MvStatus::Ok);
        assert!((x - 1.0).abs() < 1e-12);
        assert_eq!(mv_surface_area(c, &mut x), MvStatus::Ok);
        assert!((x - 6.0).abs() < 1e-12);
        assert_eq!(mv_v1(c, &mut x), MvStatus::Ok);
        assert!((x - 3.0).abs() < 1e-12);
        assert_eq!(mv_circumradius(c, &mut x), MvStatus::Ok);
        assert!((x - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(mv_diameter(c, &mut x), MvStatus::Ok);
        assert!((x - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(mv_mixed_volume(c, c, &mut x), MvStatus::Ok);
        assert!((x - 1.0).abs() < 1e-12);
        let mut v = [0.0; 3];
        assert_eq!(mv_polytope_vertex(c, 0, v.as_mut_ptr()), MvStatus::Ok);
        assert_eq!(mv_polytope_vertex(c, 8, v.as_mut_ptr()), MvStatus::InvalidParameter);
        mv_polytope_free(c);
    }
}

#[test]
fn json_and_checks() {
    let seg = CString::new(r#"{"dim":2,"vertices":[[0,0],[2,0]]}"#).unwrap();
    let mut k = ptr::null_mut();
    unsafe {
        assert_eq!(mv_polytope_from_json(seg.as_ptr(), &mut k), MvStatus::Ok);
        let mut r = MvCheckResult::default();
        assert_eq!(mv_check(MvCheck::Linhart, k, ptr::null(), 1e-9, &mut r), MvStatus::Ok);
        assert!(r.satisfied && r.equality_witness);
        assert!(r.deficit.abs() < 1e-12);
        let sq = cube(2);
        assert_eq!(mv_check(MvCheck::Minkowski, sq, sq, 1e-9, &mut r), MvStatus::Ok);
        assert!(r.satisfied && r.equality_witness);
        assert_eq!(mv_check(MvCheck::Minkowski, sq, ptr::null(), 1e-9, &mut r), MvStatus::NullPointer);
        mv_polytope_free(sq);
        mv_polytope_free(k);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("{not json").unwrap();
    let mut k = ptr::null_mut();
    unsafe {
        assert_eq!(mv_polytope_from_json(bad.as_ptr(), &mut k), MvStatus::Json);
        assert!(k.is_null());
        assert!(!last_error().is_empty());
        let mut x = 0.0;
        assert_eq!(mv_volume(ptr::null(), &mut x), MvStatus::NullPointer);
        assert_eq!(last_error(), "null pointer argument");
        let c2 = cube(2);
        let c3 = cube(3);
        assert_eq!(mv_mixed_volume(c2, c3, &mut x), MvStatus::DimensionMismatch);
        mv_polytope_free(c2);
        mv_polytope_free(c3);
        mv_polytope_free(ptr::null_mut());
        let pts = [f64::NAN, 0.0];
        assert_eq!(mv_polytope_new(2, pts.as_ptr(), 1, &mut k), MvStatus::InvalidParameter);
    }
}

#[test]
fn header_is_current() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mixedvol.h")).unwrap();
    for f in [
        "mv_polytope_new", "mv_polytope_from_json", "mv_polytope_free", "mv_volume", "mv_surface_area",
        "mv_v1", "mv_circumradius", "mv_diameter", "mv_mixed_volume", "mv_check", "mv_last_error_message",
    ] {
        assert!(h.contains(f), "{f} missing from header");
    }
}

#[test]
fn c_program_links() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libmixedvol_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || std::process::Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let dir = env!("CARGO_MANIFEST_DIR");
    let out = std::env::temp_dir().join(format!("mixedvol-smoke-{}", std::process::id()));
    let st = std::process::Command::new(&cc)
        .args([&format!("{dir}/tests/c/smoke.c"), "-I", &format!("{dir}/include"), "-o"])
        .arg(&out)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(st.success(), "C compile failed");
    let run = std::process::Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "C smoke exited with {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use symhom_ffi::*;

const HOLLOW: &str =
    r#"{"vertices": ["a", "b", "c"], "facets": [["a", "b"], ["b", "c"], ["a", "c"]]}"#;

fn from_facets(
    json: &str,
    system: i32,
    max: i32,
    ring: i32,
    reduce: i32,
) -> (SymhomStatus, *mut SymhomComplex) {
    let s = CString::new(json).unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { symhom_complex_from_facets(s.as_ptr(), system, max, ring, reduce, &mut h) };
    (st, h)
}

fn homology(h: *const SymhomComplex, n: i32) -> (usize, Vec<u64>) {
    let mut betti = 0;
    let mut len = 0;
    let mut buf = [0u64; 4];
    let st =
        unsafe { symhom_complex_homology(h, n, &mut betti, buf.as_mut_ptr(), buf.len(), &mut len) };
    assert_eq!(st, SymhomStatus::Ok);
    (betti, buf[..len].to_vec())
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(symhom_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn hollow_triangle_through_handles() {
    for system in [SYMHOM_SYSTEM_SYM, SYMHOM_SYSTEM_ORDERED] {
        let (st, h) = from_facets(HOLLOW, system, 2, SYMHOM_RING_Z, SYMHOM_REDUCE_NONE);
        assert_eq!(st, SymhomStatus::Ok);
        let (mut lo, mut hi) = (0, 0);
        assert_eq!(
            unsafe { symhom_complex_degrees(h, &mut lo, &mut hi) },
            SymhomStatus::Ok
        );
        assert_eq!((lo, hi), (-1, 2));
        assert_eq!(homology(h, 0), (0, vec![]));
        assert_eq!(homology(h, 1), (1, vec![]));
        unsafe { symhom_complex_free(h) };
    }
    let (st, h) = from_facets(
        HOLLOW,
        SYMHOM_SYSTEM_SYM,
        2,
        SYMHOM_RING_Q,
        SYMHOM_REDUCE_DEG_SYM,
    );
    assert_eq!(st, SymhomStatus::Ok);
    let dims: Vec<usize> = (-1..=2)
        .map(|n| {
            let mut d = 0;
            assert_eq!(
                unsafe { symhom_complex_dim(h, n, &mut d) },
                SymhomStatus::Ok
            );
            d
        })
        .collect();
    assert_eq!(dims, [1, 3, 3, 0]);
    unsafe { symhom_complex_free(h) };
}

#[test]
fn torsion_and_round_trip() {
    // a 2-cell glued along a degree-2 boundary map gives Z/2
    let json = r#"{"ring": "z", "degrees": [
        {"n": 0, "basis": ["v"], "differential": {"rows": 0, "cols": 1, "entries": []}},
        {"n": 1, "basis": ["e"], "differential": {"rows": 1, "cols": 1, "entries": []}},
        {"n": 2, "basis": ["f"], "differential": {"rows": 1, "cols": 1, "entries": [[0, 0, "2", "1"]]}}]}"#;
    let s = CString::new(json).unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { symhom_complex_from_json(s.as_ptr(), &mut h) };
    assert_eq!(st, SymhomStatus::Ok, "{}", last_error());
    assert_eq!(homology(h, 1), (0, vec![2]));
    let mut betti = 0;
    let mut len = 0;
    let st = unsafe { symhom_complex_homology(h, 1, &mut betti, ptr::null_mut(), 0, &mut len) };
    assert_eq!((st, len), (SymhomStatus::BufferTooSmall, 1));
    let mut text = ptr::null_mut();
    assert_eq!(
        unsafe { symhom_complex_to_json(h, &mut text) },
        SymhomStatus::Ok
    );
    let mut back = ptr::null_mut();
    assert_eq!(
        unsafe { symhom_complex_from_json(text, &mut back) },
        SymhomStatus::Ok
    );
    assert_eq!(homology(back, 1), (0, vec![2]));
    unsafe {
        symhom_string_free(text);
        symhom_complex_free(back);
        symhom_complex_free(h);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let (st, h) = from_facets(
        "{\"vertices\": [",
        SYMHOM_SYSTEM_SYM,
        2,
        SYMHOM_RING_Q,
        SYMHOM_REDUCE_NONE,
    );
    assert_eq!(st, SymhomStatus::InvalidInput);
    assert!(h.is_null());
    assert!(last_error().contains("line"));
    let (st, _) = from_facets(
        HOLLOW,
        SYMHOM_SYSTEM_SYM,
        2,
        SYMHOM_RING_Z,
        SYMHOM_REDUCE_SYM,
    );
    assert_eq!(st, SymhomStatus::InvalidInput);
    let (st, _) = from_facets(
        HOLLOW,
        SYMHOM_SYSTEM_SYM,
        40,
        SYMHOM_RING_Q,
        SYMHOM_REDUCE_NONE,
    );
    assert_eq!(st, SymhomStatus::ResourceLimit);
    let (st, _) = from_facets(HOLLOW, 9, 2, SYMHOM_RING_Q, SYMHOM_REDUCE_NONE);
    assert_eq!(st, SymhomStatus::InvalidInput);
    let bad = CString::new(
        r#"{"ring": "z", "degrees": [{"n": 0, "basis": ["a"], "differential": {"rows": 0, "cols": 1, "entries": []}},
            {"n": 1, "basis": ["b"], "differential": {"rows": 1, "cols": 1, "entries": [[0, 0, "1", "1"]]}},
            {"n": 2, "basis": ["c"], "differential": {"rows": 1, "cols": 1, "entries": [[0, 0, "1", "1"]]}}]}"#,
    )
    .unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { symhom_complex_from_json(bad.as_ptr(), &mut h) },
        SymhomStatus::ContractViolation
    );
    let mut d = 0;
    assert_eq!(
        unsafe { symhom_complex_dim(ptr::null(), 0, &mut d) },
        SymhomStatus::NullOrEncoding
    );
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { symhom_complex_from_facets(ptr::null(), 0, 1, 0, 0, &mut out) },
        SymhomStatus::NullOrEncoding
    );
    unsafe { symhom_complex_free(ptr::null_mut()) };
}

#[test]
fn graph_complex() {
    let g =
        CString::new(r#"{"vertices": [0, 1, 2, 3, 4], "edges": [[0,1],[1,2],[2,3],[3,4],[4,0]]}"#)
            .unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe {
        symhom_complex_from_graph(g.as_ptr(), 2, SYMHOM_RING_Q, SYMHOM_REDUCE_RT, &mut h)
    };
    assert_eq!(st, SymhomStatus::Ok, "{}", last_error());
    assert_eq!(homology(h, 1), (1, vec![]));
    unsafe { symhom_complex_free(h) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(symhom_version()) }
        .to_str()
        .unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("symhom.h").exists());
    let lib = target_dir().join("libsymhom_ffi.a");
    assert!(
        lib.exists(),
        "static library not found at {}",
        lib.display()
    );
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/smoke.c");
    let out = std::env::temp_dir().join(format!("symhom_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&out)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "H1 = Z");
}

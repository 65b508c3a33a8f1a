use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use densest_ffi::*;

fn worstcase(t: usize, p: usize) -> *mut DseGraph {
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { dse_graph_gen_worstcase(t, p, &mut g) },
        DseStatus::Ok
    );
    g
}

#[test]
fn peel_and_exact_on_worstcase() {
    let g = worstcase(4, 2);
    unsafe {
        assert_eq!((dse_graph_n(g), dse_graph_m(g)), (9, 6));
        let mut greedy = ptr::null_mut();
        let mut exact = ptr::null_mut();
        assert_eq!(dse_peel(g, &mut greedy), DseStatus::Ok);
        assert_eq!(dse_exact(g, 0.0, 0, &mut exact), DseStatus::Ok);
        assert!((dse_result_density(greedy) - 6.0 / 9.0).abs() < 1e-12);
        assert!((dse_result_density(exact) - 0.8).abs() < 1e-12);
        assert_eq!(dse_result_size(exact), 5);
        let mut buf = [0u32; 3];
        assert_eq!(dse_result_members(exact, buf.as_mut_ptr(), buf.len()), 5);
        assert_eq!(buf, [0, 1, 2]);
        assert!(dse_result_time_ms(exact) >= 0.0);
        dse_result_free(greedy);
        dse_result_free(exact);
        dse_graph_free(g);
    }
}

#[test]
fn from_edges_weighted_and_unweighted() {
    let src = [0u32, 1, 0];
    let dst = [1u32, 2, 2];
    let w = [2.0, 2.0, 2.0];
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(
            dse_graph_from_edges(3, src.as_ptr(), dst.as_ptr(), ptr::null(), 3, &mut g),
            DseStatus::Ok
        );
        assert!((dse_graph_density(g) - 1.0).abs() < 1e-12);
        dse_graph_free(g);
        let mut g = ptr::null_mut();
        assert_eq!(
            dse_graph_from_edges(3, src.as_ptr(), dst.as_ptr(), w.as_ptr(), 3, &mut g),
            DseStatus::Ok
        );
        let mut r = ptr::null_mut();
        assert_eq!(dse_hybrid(g, 0.0, 0, &mut r), DseStatus::Ok);
        assert!((dse_result_density(r) - 2.0).abs() < 1e-12);
        assert_eq!(dse_result_failed(r), 0);
        dse_result_free(r);
        dse_graph_free(g);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(dse_peel(ptr::null(), &mut r), DseStatus::NullPointer);
        assert!(r.is_null());
        let msg = CStr::from_ptr(dse_last_error()).to_str().unwrap();
        assert!(msg.contains("graph"));

        let mut g = ptr::null_mut();
        let path = CString::new("/nonexistent/graph.mtx").unwrap();
        assert_eq!(dse_graph_load(path.as_ptr(), 0, 0, &mut g), DseStatus::Io);

        let src = [0u32];
        let dst = [5u32];
        assert_eq!(
            dse_graph_from_edges(2, src.as_ptr(), dst.as_ptr(), ptr::null(), 1, &mut g),
            DseStatus::InvalidArgument
        );
        assert_eq!(
            dse_graph_gen_worstcase(0, 1, &mut g),
            DseStatus::InvalidArgument
        );

        // free functions accept null
        dse_graph_free(ptr::null_mut());
        dse_result_free(ptr::null_mut());
    }
}

#[test]
fn memory_budget_maps_to_status() {
    let g = worstcase(50, 50);
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(dse_exact(g, 0.0, 16, &mut r), DseStatus::MemoryBudget);
        assert!(r.is_null());
        dse_graph_free(g);
    }
}

#[test]
fn load_and_lp_export() {
    let dir = tempfile::tempdir().unwrap();
    let graph_path = dir.path().join("k4.el");
    std::fs::write(&graph_path, "1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n").unwrap();
    let lp_path = dir.path().join("k4.lp");
    unsafe {
        let mut g = ptr::null_mut();
        let p = CString::new(graph_path.to_str().unwrap()).unwrap();
        assert_eq!(dse_graph_load(p.as_ptr(), 0, 0, &mut g), DseStatus::Ok);
        assert!((dse_graph_density(g) - 1.5).abs() < 1e-12);
        let (mut vars, mut cons) = (0usize, 0usize);
        let lp = CString::new(lp_path.to_str().unwrap()).unwrap();
        assert_eq!(
            dse_lp_export(g, lp.as_ptr(), &mut vars, &mut cons),
            DseStatus::Ok
        );
        assert_eq!((vars, cons), (10, 13));
        assert!(std::fs::read_to_string(&lp_path)
            .unwrap()
            .starts_with("\\ densest"));
        dse_graph_free(g);
    }
}

#[test]
fn header_declares_api() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/densest.h")).unwrap();
    for name in [
        "dse_graph_load",
        "dse_graph_from_edges",
        "dse_peel",
        "dse_exact",
        "dse_hybrid",
        "dse_result_members",
        "dse_lp_export",
        "dse_last_error",
        "DSE_STATUS_MEMORY_BUDGET",
        "typedef struct DseGraph DseGraph",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles tests/c/smoke.c against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libdensest_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("a C compiler is available as cc");
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}", run.status);
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "0.6667 0.8333");
}

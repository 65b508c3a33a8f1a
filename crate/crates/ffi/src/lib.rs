//! C interface to the densest-subgraph library.
//!
//! Graphs and results are opaque handles created by `dse_*` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`DseStatus`]; on failure [`dse_last_error`] describes what went wrong on
//! the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use densest::error::Error;
use densest::exact::{densest_exact, ExactOptions};
use densest::graph::{DenseSet, Graph};
use densest::hybrid::{run_hybrid, HybridOptions, DEFAULT_SKIP_RATIO};
use densest::instances::gen_worstcase;
use densest::io::{load_path, LoadOptions};
use densest::lp::emit_charikar_lp;
use densest::peel::peel;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    MemoryBudget = 5,
    Unsupported = 6,
    Panic = 7,
}

/// Opaque graph handle.
pub struct DseGraph {
    inner: Graph,
}

/// Opaque solver result.
pub struct DseResult {
    set: DenseSet,
    elapsed_ms: f64,
    /// Hybrid only: the exact phase ran out of budget, greedy answer kept.
    failed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DseStatus {
    match e {
        Error::Io(_) => DseStatus::Io,
        Error::MalformedHeader(_)
        | Error::Parse { .. }
        | Error::IndexOutOfBounds { .. }
        | Error::NonPositiveWeight { .. } => DseStatus::Parse,
        Error::MemoryBudget { .. } => DseStatus::MemoryBudget,
        Error::Unsupported(_) => DseStatus::Unsupported,
        _ => DseStatus::InvalidArgument,
    }
}

fn guard<F>(f: F) -> DseStatus
where
    F: FnOnce() -> Result<(), (DseStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DseStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DseStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (DseStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (DseStatus, String) {
    (DseStatus::NullPointer, format!("{what} is null"))
}

fn budget(bytes: usize) -> Option<usize> {
    (bytes > 0).then_some(bytes)
}

unsafe fn graph_ref<'a>(g: *const DseGraph) -> Result<&'a Graph, (DseStatus, String)> {
    g.as_ref().map(|g| &g.inner).ok_or_else(|| null("graph"))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dse_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a MatrixMarket (`.mtx`) or edge-list file. `memory_budget` of 0
/// means unlimited.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dse_graph_load(
    path: *const c_char,
    weighted: c_int,
    memory_budget: usize,
    out: *mut *mut DseGraph,
) -> DseStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| (DseStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        let opts = LoadOptions {
            weighted: weighted != 0,
            memory_budget: budget(memory_budget),
        };
        let loaded = load_path(Path::new(path), None, opts).map_err(lib_err)?;
        put(
            out,
            DseGraph {
                inner: loaded.graph,
            },
        );
        Ok(())
    })
}

/// Builds a graph from `m` edges `(src[i], dst[i])`. `weights` may be null
/// for an unweighted graph.
///
/// # Safety
/// `src` and `dst` (and `weights` when non-null) must point to `m` elements.
#[no_mangle]
pub unsafe extern "C" fn dse_graph_from_edges(
    n: usize,
    src: *const u32,
    dst: *const u32,
    weights: *const f64,
    m: usize,
    out: *mut *mut DseGraph,
) -> DseStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if m > 0 && (src.is_null() || dst.is_null()) {
            return Err(null("edge array"));
        }
        let (src, dst) = if m == 0 {
            (&[][..], &[][..])
        } else {
            (
                std::slice::from_raw_parts(src, m),
                std::slice::from_raw_parts(dst, m),
            )
        };
        let graph = if weights.is_null() {
            let edges: Vec<_> = src.iter().copied().zip(dst.iter().copied()).collect();
            Graph::from_edges(n, &edges)
        } else {
            let w = std::slice::from_raw_parts(weights, m);
            let edges: Vec<_> = (0..m).map(|i| (src[i], dst[i], w[i])).collect();
            Graph::from_weighted_edges(n, &edges)
        }
        .map_err(lib_err)?;
        put(out, DseGraph { inner: graph });
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dse_graph_gen_worstcase(
    t: usize,
    p: usize,
    out: *mut *mut DseGraph,
) -> DseStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = gen_worstcase(t, p).map_err(lib_err)?;
        put(out, DseGraph { inner: g });
        Ok(())
    })
}

/// # Safety
/// `graph` must come from a `dse_graph_*` constructor and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn dse_graph_free(graph: *mut DseGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn dse_graph_n(graph: *const DseGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.n())
}

/// # Safety
/// `graph` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn dse_graph_m(graph: *const DseGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.m())
}

/// Density of the whole graph; NaN for null or empty graphs.
///
/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dse_graph_density(graph: *const DseGraph) -> f64 {
    graph
        .as_ref()
        .and_then(|g| g.inner.density().ok())
        .map_or(f64::NAN, |d| d.value())
}

/// Greedy peeling.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dse_peel(graph: *const DseGraph, out: *mut *mut DseResult) -> DseStatus {
    guard(|| {
        let g = graph_ref(graph)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = peel(g).map_err(lib_err)?;
        put(
            out,
            DseResult {
                set: r.best_set,
                elapsed_ms: r.elapsed_ms,
                failed: false,
            },
        );
        Ok(())
    })
}

/// Exact optimum. `tolerance <= 0` picks the default; `memory_budget` of 0
/// means unlimited.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dse_exact(
    graph: *const DseGraph,
    tolerance: f64,
    memory_budget: usize,
    out: *mut *mut DseResult,
) -> DseStatus {
    guard(|| {
        let g = graph_ref(graph)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = ExactOptions {
            tolerance: (tolerance > 0.0).then_some(tolerance),
            memory_budget: budget(memory_budget),
            ..Default::default()
        };
        let r = densest_exact(g, &opts).map_err(lib_err)?;
        put(
            out,
            DseResult {
                set: r.best_set,
                elapsed_ms: r.elapsed_ms,
                failed: false,
            },
        );
        Ok(())
    })
}

/// Hybrid solve. `skip_ratio <= 0` picks the default. An exact phase that
/// exceeds `memory_budget` still yields a result, flagged by
/// [`dse_result_failed`].
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dse_hybrid(
    graph: *const DseGraph,
    skip_ratio: f64,
    memory_budget: usize,
    out: *mut *mut DseResult,
) -> DseStatus {
    guard(|| {
        let g = graph_ref(graph)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = HybridOptions {
            skip_ratio: if skip_ratio > 0.0 {
                skip_ratio
            } else {
                DEFAULT_SKIP_RATIO
            },
            tolerance: None,
            memory_budget: budget(memory_budget),
        };
        let r = run_hybrid(g, &opts).map_err(lib_err)?;
        put(
            out,
            DseResult {
                set: r.best_set,
                elapsed_ms: r.times.total_ms,
                failed: r.failed,
            },
        );
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle or null (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn dse_result_density(result: *const DseResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.set.density.value())
}

/// # Safety
/// `result` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn dse_result_size(result: *const DseResult) -> usize {
    result.as_ref().map_or(0, |r| r.set.len())
}

/// # Safety
/// `result` must be a live handle or null (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn dse_result_time_ms(result: *const DseResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.elapsed_ms)
}

/// 1 when the hybrid exact phase failed and the greedy answer was kept.
///
/// # Safety
/// `result` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn dse_result_failed(result: *const DseResult) -> c_int {
    result.as_ref().map_or(0, |r| r.failed as c_int)
}

/// Copies up to `capacity` member ids (sorted, 0-based) into `buf` and
/// returns the total number of members.
///
/// # Safety
/// `buf` must have room for `capacity` elements, or be null with capacity 0.
#[no_mangle]
pub unsafe extern "C" fn dse_result_members(
    result: *const DseResult,
    buf: *mut u32,
    capacity: usize,
) -> usize {
    let Some(r) = result.as_ref() else { return 0 };
    let members = &r.set.members;
    if !buf.is_null() {
        let k = members.len().min(capacity);
        ptr::copy_nonoverlapping(members.as_ptr(), buf, k);
    }
    members.len()
}

/// # Safety
/// `result` must come from a solver call and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn dse_result_free(result: *mut DseResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Writes the LP relaxation to `path`; the output pointers may be null.
///
/// # Safety
/// `graph` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dse_lp_export(
    graph: *const DseGraph,
    path: *const c_char,
    variables: *mut usize,
    constraints: *mut usize,
) -> DseStatus {
    guard(|| {
        let g = graph_ref(graph)?;
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| (DseStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        let file = std::fs::File::create(path).map_err(|e| lib_err(e.into()))?;
        let summary = emit_charikar_lp(g, std::io::BufWriter::new(file)).map_err(lib_err)?;
        if let Some(v) = variables.as_mut() {
            *v = summary.variables;
        }
        if let Some(c) = constraints.as_mut() {
            *c = summary.constraints;
        }
        Ok(())
    })
}

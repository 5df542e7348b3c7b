//! C ABI for the switchgraph learners.
//!
//! Objects are exposed as opaque handles created by `sg_*_new` functions and
//! released by the matching `sg_*_free`. Every fallible function returns an
//! [`SgStatus`]; on failure a human-readable message is available from
//! [`sg_last_error_message`] on the same thread until the next failing call.
//!
//! Vertex ids are 0-based. Labels are `-1` or `+1`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use switchgraph::bases::{Basis, BasisKind};
use switchgraph::qbayes::{QBayes, QBayesError, QBayesParams};
use switchgraph::scs::{AlphaMode, ScsEngine, ScsError, ScsOptions};
use switchgraph::sgp::{Sgp, SgpError};
use switchgraph::{Error, Graph, OnSpine, OnlinePredictor, Spine};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter, vertex id, label or input file was rejected.
    InvalidArgument = 2,
    /// A file could not be read.
    Io = 3,
    /// `update` was called without a preceding `predict`.
    Protocol = 4,
    /// The computation failed on valid input.
    Failed = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Spanning-tree interval basis used by the cluster-specialist learner.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgBasis {
    /// All intervals of the spine; quadratic memory.
    Full = 0,
    /// Dyadic intervals; logarithmic work per trial.
    BinaryTree = 1,
}

/// An undirected connected graph.
pub struct SgGraph(Graph);

/// An online learner over the vertices of a graph.
pub struct SgPredictor {
    inner: Box<dyn OnlinePredictor + Send>,
    n: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul bytes were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SgStatus {
    match e {
        Error::Io { .. } => SgStatus::Io,
        Error::Scs(ScsError::Protocol) | Error::QBayes(QBayesError::Protocol) | Error::Sgp(SgpError::Protocol) => SgStatus::Protocol,
        e if e.is_validation() => SgStatus::InvalidArgument,
        _ => SgStatus::Failed,
    }
}

fn fail(status: SgStatus, message: impl Into<String>) -> SgStatus {
    set_last_error(message.into());
    status
}

/// Runs `body` with panics and errors turned into status codes.
fn guard(body: impl FnOnce() -> Result<(), SgStatus>) -> SgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SgStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(SgStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn check<T>(r: switchgraph::Result<T>) -> Result<T, SgStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, SgStatus> {
    // SAFETY: the caller promises `p` is either null or a live handle.
    unsafe { p.as_ref() }.ok_or_else(|| fail(SgStatus::NullPointer, format!("{what} is null")))
}

fn non_null_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, SgStatus> {
    // SAFETY: as in `non_null`, with exclusive access.
    unsafe { p.as_mut() }.ok_or_else(|| fail(SgStatus::NullPointer, format!("{what} is null")))
}

fn write_out<T>(out: *mut T, value: T) -> Result<(), SgStatus> {
    let slot = non_null_mut(out, "output pointer")?;
    *slot = value;
    Ok(())
}

fn invalid(message: String) -> SgStatus {
    fail(SgStatus::InvalidArgument, message)
}

/// Message of the last failing call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Static description of an [`SgStatus`] value.
#[no_mangle]
pub extern "C" fn sg_status_name(status: i32) -> *const c_char {
    let s: &'static [u8] = match status {
        0 => b"ok\0",
        1 => b"null pointer\0",
        2 => b"invalid argument\0",
        3 => b"i/o error\0",
        4 => b"protocol error\0",
        5 => b"failed\0",
        6 => b"panic\0",
        _ => b"unknown status\0",
    };
    s.as_ptr().cast()
}

/// Builds a graph on `n` vertices from `edge_count` pairs stored flat in
/// `edges` (`edges[2k]`, `edges[2k + 1]`). The graph must be connected.
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable values (it may be null
/// when `edge_count` is 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_graph_new(n: usize, edges: *const u32, edge_count: usize, out: *mut *mut SgGraph) -> SgStatus {
    guard(|| {
        let flat: &[u32] = if edge_count == 0 {
            &[]
        } else {
            if edges.is_null() {
                return Err(fail(SgStatus::NullPointer, "edges is null"));
            }
            // SAFETY: guaranteed by the caller.
            unsafe { std::slice::from_raw_parts(edges, 2 * edge_count) }
        };
        let pairs = flat.chunks_exact(2).map(|p| (p[0] as usize, p[1] as usize));
        let g = check(Graph::new(n, pairs).map_err(Error::from))?;
        write_out(out, Box::into_raw(Box::new(SgGraph(g))))
    })
}

/// Reads a graph from an edge-list file (`n=<count>` header, then one
/// 1-based `i j` pair per line).
///
/// # Safety
/// `path` must be a nul-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_graph_from_file(path: *const c_char, out: *mut *mut SgGraph) -> SgStatus {
    guard(|| {
        if path.is_null() {
            return Err(fail(SgStatus::NullPointer, "path is null"));
        }
        // SAFETY: guaranteed by the caller.
        let path = unsafe { CStr::from_ptr(path) }.to_str().map_err(|_| invalid("path is not valid UTF-8".into()))?;
        let g = check(Graph::from_file(Path::new(path)))?;
        write_out(out, Box::into_raw(Box::new(SgGraph(g))))
    })
}

/// Vertex count of a graph, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_graph_vertex_count(graph: *const SgGraph) -> usize {
    // SAFETY: guaranteed by the caller.
    unsafe { graph.as_ref() }.map_or(0, |g| g.0.n())
}

/// Edge count of a graph, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_graph_edge_count(graph: *const SgGraph) -> usize {
    // SAFETY: guaranteed by the caller.
    unsafe { graph.as_ref() }.map_or(0, |g| g.0.edge_count())
}

/// # Safety
/// `graph` must be null or a handle from `sg_graph_new`/`sg_graph_from_file`
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sg_graph_free(graph: *mut SgGraph) {
    if !graph.is_null() {
        // SAFETY: the handle came from `Box::into_raw`.
        drop(unsafe { Box::from_raw(graph) });
    }
}

/// Writes the spine sampled with `seed` (a random spanning tree
/// linearized by depth-first search) into `order`, which must hold
/// `sg_graph_vertex_count(graph)` entries.
///
/// # Safety
/// `graph` must be a live handle and `order` must point to `capacity`
/// writable values.
#[no_mangle]
pub unsafe extern "C" fn sg_sample_spine(graph: *const SgGraph, seed: u64, order: *mut u32, capacity: usize) -> SgStatus {
    guard(|| {
        let g = &non_null(graph, "graph")?.0;
        if order.is_null() {
            return Err(fail(SgStatus::NullPointer, "order is null"));
        }
        if capacity < g.n() {
            return Err(invalid(format!("capacity {capacity} is smaller than the vertex count {}", g.n())));
        }
        let (_, spine) = check(Spine::sample(g, seed).map_err(Error::from))?;
        // SAFETY: guaranteed by the caller; capacity was checked above.
        let dst = unsafe { std::slice::from_raw_parts_mut(order, g.n()) };
        for (d, &v) in dst.iter_mut().zip(spine.order()) {
            *d = v as u32;
        }
        Ok(())
    })
}

fn boxed(p: SgPredictor, out: *mut *mut SgPredictor) -> Result<(), SgStatus> {
    write_out(out, Box::into_raw(Box::new(p)))
}

/// Switching cluster specialists on a spine sampled from `graph` with
/// `seed`, over the [`SgBasis`] given by `basis`. A negative `alpha`
/// selects the time-varying rate `1 / (m + 1)` where `m` is the mistake
/// count; otherwise `alpha` must lie in `[0, 1]`.
/// The full basis is refused above 4096 vertices unless `allow_quadratic`
/// is non-zero.
///
/// # Safety
/// `graph` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_scs_new(
    graph: *const SgGraph,
    basis: i32,
    alpha: f64,
    seed: u64,
    allow_quadratic: i32,
    out: *mut *mut SgPredictor,
) -> SgStatus {
    guard(|| {
        let g = &non_null(graph, "graph")?.0;
        let kind = match basis {
            b if b == SgBasis::Full as i32 => BasisKind::Full,
            b if b == SgBasis::BinaryTree as i32 => BasisKind::BinaryTree,
            b => return Err(invalid(format!("unknown basis {b}"))),
        };
        let mode = if alpha < 0.0 { AlphaMode::TimeVarying } else { AlphaMode::Fixed(alpha) };
        let (_, spine) = check(Spine::sample(g, seed).map_err(Error::from))?;
        let basis = check(Basis::new(kind, g.n()).map_err(Error::from))?;
        let options = ScsOptions { allow_quadratic: allow_quadratic != 0 };
        let engine = check(ScsEngine::with_options(basis, mode, options).map_err(Error::from))?;
        boxed(SgPredictor { inner: Box::new(OnSpine::new(spine, engine)), n: g.n() }, out)
    })
}

/// Quasi-Bayes predictor with Ising coupling `theta` in `(0, 1/2)` and
/// switch probability `alpha` in `[0, 1)`, on a spine sampled with `seed`.
///
/// # Safety
/// `graph` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_qbayes_new(graph: *const SgGraph, theta: f64, alpha: f64, seed: u64, out: *mut *mut SgPredictor) -> SgStatus {
    guard(|| {
        let g = &non_null(graph, "graph")?.0;
        let params = check(QBayesParams::new(theta, alpha).map_err(Error::from))?;
        let (_, spine) = check(Spine::sample(g, seed).map_err(Error::from))?;
        let qb = check(QBayes::new(g.n(), params).map_err(Error::from))?;
        boxed(SgPredictor { inner: Box::new(OnSpine::new(spine, qb)), n: g.n() }, out)
    })
}

/// Projected kernel perceptron with the graph Laplacian kernel and norm
/// radius `gamma`. Builds a dense kernel, so memory is quadratic in the
/// vertex count.
///
/// # Safety
/// `graph` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_sgp_new(graph: *const SgGraph, gamma: f64, out: *mut *mut SgPredictor) -> SgStatus {
    guard(|| {
        let g = &non_null(graph, "graph")?.0;
        let sgp = check(Sgp::from_graph(g, gamma).map_err(Error::from))?;
        boxed(SgPredictor { inner: Box::new(sgp), n: g.n() }, out)
    })
}

/// Predicts the label of `vertex` and writes it to `label`.
///
/// # Safety
/// `predictor` must be a live handle and `label` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sg_predict(predictor: *mut SgPredictor, vertex: usize, label: *mut i8) -> SgStatus {
    guard(|| {
        let p = non_null_mut(predictor, "predictor")?;
        if vertex >= p.n {
            return Err(invalid(format!("vertex {vertex} out of range for {} vertices", p.n)));
        }
        let y = check(p.inner.predict(vertex))?;
        write_out(label, y)
    })
}

/// Reveals the true label of the last predicted vertex. When `mistake` is
/// non-null it receives 1 if the prediction was wrong and 0 otherwise.
///
/// # Safety
/// `predictor` must be a live handle; `mistake` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sg_update(predictor: *mut SgPredictor, label: i8, mistake: *mut i32) -> SgStatus {
    guard(|| {
        let p = non_null_mut(predictor, "predictor")?;
        if label != 1 && label != -1 {
            return Err(invalid(format!("label must be -1 or +1, got {label}")));
        }
        let m = check(p.inner.update(label))?;
        if !mistake.is_null() {
            write_out(mistake, i32::from(m))?;
        }
        Ok(())
    })
}

/// Mistakes made so far, or 0 for a null handle.
///
/// # Safety
/// `predictor` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_mistakes(predictor: *const SgPredictor) -> u64 {
    // SAFETY: guaranteed by the caller.
    unsafe { predictor.as_ref() }.map_or(0, |p| p.inner.mistakes())
}

/// # Safety
/// `predictor` must be null or a handle from one of the `sg_*_new`
/// predictor constructors that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sg_predictor_free(predictor: *mut SgPredictor) {
    if !predictor.is_null() {
        // SAFETY: the handle came from `Box::into_raw`.
        drop(unsafe { Box::from_raw(predictor) });
    }
}

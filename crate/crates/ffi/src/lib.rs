//! C interface to `cgm_core`.
//!
//! Every fallible function returns a [`CgmStatus`] and writes its result
//! through an out pointer. On failure, `cgm_last_error_message` returns the
//! message for the calling thread. Strings handed out are owned by the
//! caller and released with `cgm_string_free`; graphs and masks with their
//! own free functions.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cgm_core::builder::build_from_dir;
use cgm_core::chunk::{build_mask, chunk_graph, ApproxTokenizer, AttentionMask};
use cgm_core::graph::{from_json, to_json, validate_graph, CodeGraph};
use cgm_core::linearizer::linearize;
use cgm_core::metrics::{edit_similarity, exact_match};
use cgm_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Contract = 4,
    Malformed = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Opaque code graph.
pub struct CgmGraph {
    inner: CodeGraph,
}

/// Opaque attention mask.
pub struct CgmMask {
    inner: AttentionMask,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> CgmStatus {
    match e {
        Error::Io { .. } => CgmStatus::Io,
        Error::Json { .. } | Error::Malformed(_) | Error::SchemaVersion { .. } => CgmStatus::Malformed,
        _ => CgmStatus::Contract,
    }
}

fn fail(e: Error) -> CgmStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn guard(f: impl FnOnce() -> CgmStatus) -> CgmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            CgmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, CgmStatus> {
    if p.is_null() {
        set_error("null argument");
        return Err(CgmStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        CgmStatus::InvalidUtf8
    })
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> CgmStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            CgmStatus::Ok
        }
        Err(_) => {
            set_error("output contains a NUL byte");
            CgmStatus::Malformed
        }
    }
}

macro_rules! nonnull {
    ($($p:expr),+) => {
        if $($p.is_null())||+ {
            set_error("null argument");
            return CgmStatus::NullArgument;
        }
    };
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Builds a graph from the source directory `root`.
///
/// # Safety
/// `root` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_graph_build(root: *const c_char, out: *mut *mut CgmGraph) -> CgmStatus {
    guard(|| {
        nonnull!(out);
        let root = tri!(str_arg(root));
        match build_from_dir(Path::new(root)) {
            Ok(b) => {
                *out = Box::into_raw(Box::new(CgmGraph { inner: b.graph }));
                CgmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Parses a graph document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_graph_load_json(json: *const c_char, out: *mut *mut CgmGraph) -> CgmStatus {
    guard(|| {
        nonnull!(out);
        let json = tri!(str_arg(json));
        match from_json(json) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(CgmGraph { inner: g }));
                CgmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `graph` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_graph_to_json(graph: *const CgmGraph, out: *mut *mut c_char) -> CgmStatus {
    guard(|| {
        nonnull!(graph, out);
        put_string(out, to_json(&(*graph).inner))
    })
}

/// Writes the number of structural violations; zero means valid.
///
/// # Safety
/// `graph` must come from this library; `violations` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_graph_validate(graph: *const CgmGraph, violations: *mut usize) -> CgmStatus {
    guard(|| {
        nonnull!(graph, violations);
        let report = validate_graph(&(*graph).inner);
        if !report.is_valid() {
            set_error(report.to_string());
        }
        *violations = report.len();
        CgmStatus::Ok
    })
}

/// # Safety
/// `graph` must come from this library; `nodes` and `edges` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_graph_counts(graph: *const CgmGraph, nodes: *mut usize, edges: *mut usize) -> CgmStatus {
    guard(|| {
        nonnull!(graph, nodes, edges);
        *nodes = (*graph).inner.node_count();
        *edges = (*graph).inner.edge_count();
        CgmStatus::Ok
    })
}

/// # Safety
/// `graph` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_graph_linearize(graph: *const CgmGraph, out: *mut *mut c_char) -> CgmStatus {
    guard(|| {
        nonnull!(graph, out);
        match linearize(&(*graph).inner) {
            Ok(text) => put_string(out, text),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `graph` must come from this library and not be used afterwards. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn cgm_graph_free(graph: *mut CgmGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Mask over the graph's chunks followed by `text_tokens` text positions.
///
/// # Safety
/// `graph` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_mask_build(
    graph: *const CgmGraph,
    chunk_size: usize,
    text_tokens: usize,
    out: *mut *mut CgmMask,
) -> CgmStatus {
    guard(|| {
        nonnull!(graph, out);
        let tok = ApproxTokenizer::default();
        match chunk_graph(&(*graph).inner, &tok, chunk_size) {
            Ok(cg) => {
                let inner = build_mask(&cg, text_tokens);
                *out = Box::into_raw(Box::new(CgmMask { inner }));
                CgmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Total positions; 0 for NULL.
///
/// # Safety
/// `mask` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn cgm_mask_size(mask: *const CgmMask) -> usize {
    if mask.is_null() {
        0
    } else {
        (*mask).inner.size()
    }
}

/// Whether position `i` may attend to position `j`.
///
/// # Safety
/// `mask` must come from this library; `allowed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_mask_get(mask: *const CgmMask, i: usize, j: usize, allowed: *mut bool) -> CgmStatus {
    guard(|| {
        nonnull!(mask, allowed);
        let m = &(*mask).inner;
        if i >= m.size() || j >= m.size() {
            set_error(format!("({i}, {j}) outside a mask of size {}", m.size()));
            return CgmStatus::OutOfRange;
        }
        *allowed = m.allows(i, j);
        CgmStatus::Ok
    })
}

/// # Safety
/// `mask` must come from this library and not be used afterwards. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn cgm_mask_free(mask: *mut CgmMask) {
    if !mask.is_null() {
        drop(Box::from_raw(mask));
    }
}

/// # Safety
/// `prediction` and `reference` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_edit_similarity(
    prediction: *const c_char,
    reference: *const c_char,
    out: *mut f64,
) -> CgmStatus {
    guard(|| {
        nonnull!(out);
        let a = tri!(str_arg(prediction));
        let b = tri!(str_arg(reference));
        *out = edit_similarity(a, b);
        CgmStatus::Ok
    })
}

/// # Safety
/// `prediction` and `reference` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cgm_exact_match(
    prediction: *const c_char,
    reference: *const c_char,
    out: *mut u8,
) -> CgmStatus {
    guard(|| {
        nonnull!(out);
        let a = tri!(str_arg(prediction));
        let b = tri!(str_arg(reference));
        *out = exact_match(a, b);
        CgmStatus::Ok
    })
}

/// Copy of the calling thread's last error message, or NULL. Free with
/// `cgm_string_free`.
#[no_mangle]
pub extern "C" fn cgm_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone().map_or(ptr::null_mut(), CString::into_raw))
}

/// # Safety
/// `s` must be a string returned by this library, or NULL.
#[no_mangle]
pub unsafe extern "C" fn cgm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

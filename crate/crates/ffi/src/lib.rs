//! C ABI over the `gdh` library.
//!
//! Objects are opaque handles created by `*_parse` / constructor functions and
//! released with the matching `*_free`. Every function returns a
//! [`GdhStatus`]; on failure [`gdh_last_error_message`] describes the problem.
//! Strings returned through out-parameters are freed with [`gdh_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gdh::extremal::{extremal_number, langlois_construction, SearchConfig};
use gdh::graph::{contains, count_copies};
use gdh::io::{parse_family, parse_gdh, parse_theory, serialize_gdh};
use gdh::lagrangian::{blowup_density, LagrangianConfig};
use gdh::{Family, Gdh, GdhError, Theory};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    TheoryMismatch = 5,
    /// A search stopped at its node budget; outputs hold a lower bound.
    Budget = 6,
    Panic = 7,
}

/// Position symmetry group of an arity.
pub struct GdhTheory(Theory);

/// A graph over a theory.
pub struct GdhGraph(Gdh);

/// A list of forbidden graphs over a theory.
pub struct GdhFamily(Family);

/// Outcome of [`gdh_extremal_number`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GdhSearchSummary {
    pub best_edge_count: u64,
    pub nodes_explored: u64,
    pub density_bound: f64,
    pub exhaustive: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: GdhStatus, msg: &str) -> GdhStatus {
    set_error(msg);
    status
}

fn from_error(e: GdhError) -> GdhStatus {
    let status = match e {
        GdhError::Parse { .. } => GdhStatus::Parse,
        GdhError::TheoryMismatch => GdhStatus::TheoryMismatch,
        _ => GdhStatus::InvalidInput,
    };
    fail(status, &e.to_string())
}

/// Run `f`, turning panics into [`GdhStatus::Panic`].
fn guard(f: impl FnOnce() -> GdhStatus) -> GdhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == GdhStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(GdhStatus::Panic, "internal panic"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(GdhStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, GdhStatus> {
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(GdhStatus::InvalidUtf8, "text is not valid UTF-8"))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> GdhStatus {
    *out = Box::into_raw(Box::new(value));
    GdhStatus::Ok
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gdh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn gdh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a theory record (`r <arity>` then `gen ...` lines).
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gdh_theory_parse(text: *const c_char, out: *mut *mut GdhTheory) -> GdhStatus {
    guard(|| {
        non_null!(text, out);
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_theory(text) {
            Ok(t) => put(out, GdhTheory(t)),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `t` must come from [`gdh_theory_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn gdh_theory_free(t: *mut GdhTheory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gdh_theory_info(t: *const GdhTheory, arity: *mut usize, order: *mut usize) -> GdhStatus {
    guard(|| {
        non_null!(t, arity, order);
        *arity = (*t).0.arity();
        *order = (*t).0.order();
        GdhStatus::Ok
    })
}

/// Parse a graph (`n <count>` then edges, or the JSON mirror).
///
/// # Safety
/// Pointers must be valid; `text` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn gdh_graph_parse(
    theory: *const GdhTheory,
    text: *const c_char,
    out: *mut *mut GdhGraph,
) -> GdhStatus {
    guard(|| {
        non_null!(theory, text, out);
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_gdh(text, &(*theory).0) {
            Ok(g) => put(out, GdhGraph(g)),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `g` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn gdh_graph_free(g: *mut GdhGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gdh_graph_counts(g: *const GdhGraph, vertices: *mut usize, edges: *mut usize) -> GdhStatus {
    guard(|| {
        non_null!(g, vertices, edges);
        *vertices = (*g).0.vertex_count();
        *edges = (*g).0.edge_count();
        GdhStatus::Ok
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gdh_graph_density(g: *const GdhGraph, out: *mut f64) -> GdhStatus {
    guard(|| {
        non_null!(g, out);
        match (*g).0.density() {
            Ok(d) => {
                *out = d;
                GdhStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Text form of the graph; free with [`gdh_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gdh_graph_serialize(g: *const GdhGraph, out: *mut *mut c_char) -> GdhStatus {
    guard(|| {
        non_null!(g, out);
        *out = CString::new(serialize_gdh(&(*g).0)).expect("ASCII output").into_raw();
        GdhStatus::Ok
    })
}

/// Parse a family (`family <k>` then graph records separated by `---`).
///
/// # Safety
/// Pointers must be valid; `text` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn gdh_family_parse(
    theory: *const GdhTheory,
    text: *const c_char,
    out: *mut *mut GdhFamily,
) -> GdhStatus {
    guard(|| {
        non_null!(theory, text, out);
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_family(text, &(*theory).0) {
            Ok(f) => put(out, GdhFamily(f)),
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `f` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn gdh_family_free(f: *mut GdhFamily) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gdh_family_len(f: *const GdhFamily, out: *mut usize) -> GdhStatus {
    guard(|| {
        non_null!(f, out);
        *out = (*f).0.len();
        GdhStatus::Ok
    })
}

/// Whether `host` has a subgraph isomorphic to `pattern`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gdh_contains(host: *const GdhGraph, pattern: *const GdhGraph, out: *mut bool) -> GdhStatus {
    guard(|| {
        non_null!(host, pattern, out);
        match contains(&(*host).0, &(*pattern).0) {
            Ok(b) => {
                *out = b;
                GdhStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Copies of `pattern` in `host` (injective homomorphisms over automorphisms).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gdh_count_copies(pattern: *const GdhGraph, host: *const GdhGraph, out: *mut u64) -> GdhStatus {
    guard(|| {
        non_null!(pattern, host, out);
        match count_copies(&(*pattern).0, &(*host).0) {
            Ok(c) => match u64::try_from(c.copies) {
                Ok(v) => {
                    *out = v;
                    GdhStatus::Ok
                }
                Err(_) => fail(GdhStatus::InvalidInput, "copy count exceeds 64 bits"),
            },
            Err(e) => from_error(e),
        }
    })
}

/// Multi-start lower bound on the blowup density. When `weights` is not null
/// it receives the maximizing weights and must hold `weights_len` ≥ vertex
/// count entries.
///
/// # Safety
/// Pointers must be valid; `weights` may be null.
#[no_mangle]
pub unsafe extern "C" fn gdh_blowup_density(
    g: *const GdhGraph,
    starts: usize,
    seed: u64,
    value: *mut f64,
    weights: *mut f64,
    weights_len: usize,
) -> GdhStatus {
    guard(|| {
        non_null!(g, value);
        let g = &(*g).0;
        if !weights.is_null() && weights_len < g.vertex_count() {
            return fail(GdhStatus::InvalidInput, "weights buffer is too short");
        }
        let cfg = LagrangianConfig {
            starts,
            seed,
            ..Default::default()
        };
        match blowup_density(g, &cfg) {
            Ok(res) => {
                *value = res.value;
                if !weights.is_null() {
                    let w = res.argmax.as_slice();
                    ptr::copy_nonoverlapping(w.as_ptr(), weights, w.len());
                }
                GdhStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Exact extremal number on `n` vertices. Returns [`GdhStatus::Budget`] with
/// the summary filled in when the budget ran out. `witness` may be null.
///
/// # Safety
/// Pointers must be valid; `witness` may be null.
#[no_mangle]
pub unsafe extern "C" fn gdh_extremal_number(
    theory: *const GdhTheory,
    n: usize,
    family: *const GdhFamily,
    budget: u64,
    summary: *mut GdhSearchSummary,
    witness: *mut *mut GdhGraph,
) -> GdhStatus {
    guard(|| {
        non_null!(theory, family, summary);
        let cfg = SearchConfig {
            budget,
            ..Default::default()
        };
        match extremal_number(&(*theory).0, n, &(*family).0, &cfg) {
            Ok(res) => {
                *summary = GdhSearchSummary {
                    best_edge_count: res.best_edge_count as u64,
                    nodes_explored: res.nodes_explored,
                    density_bound: res.density_bound,
                    exhaustive: res.exhaustive,
                };
                if !witness.is_null() {
                    put(witness, GdhGraph(res.witness));
                }
                if res.exhaustive {
                    GdhStatus::Ok
                } else {
                    fail(GdhStatus::Budget, "node budget exhausted; result is a lower bound")
                }
            }
            Err(e) => from_error(e),
        }
    })
}

/// The chain-free 2→1 construction on `n` ≥ 3 vertices.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gdh_langlois_construction(n: usize, out: *mut *mut GdhGraph) -> GdhStatus {
    guard(|| {
        non_null!(out);
        match langlois_construction(n) {
            Ok(g) => put(out, GdhGraph(g)),
            Err(e) => from_error(e),
        }
    })
}

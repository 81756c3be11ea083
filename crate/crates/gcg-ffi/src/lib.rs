//! C ABI over the `gcg` library.
//!
//! Results live behind opaque handles that the caller releases with the
//! matching `*_free` function. Every fallible function returns a
//! [`GcgStatus`]; on failure, [`gcg_last_error`] describes the cause until
//! the next call on the same thread. Panics are caught at the boundary and
//! reported as [`GcgStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gcg::cache::t_dims;
use gcg::gc::Bounds;
use gcg::grt::{GrtAlgebras, Variant};
use gcg::mo::{mc_check_xi, MoOptions};
use gcg::report::Report;
use gcg::verify::{run, Suite, SuiteConfig};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcgStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument is outside the supported range, or a string is malformed.
    InvalidArgument = 2,
    /// The computation reported an error.
    Computation = 3,
    /// An index is past the end of a handle.
    OutOfRange = 4,
    /// A panic was caught at the boundary.
    Internal = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(text).expect("nul bytes removed")));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: GcgStatus, msg: impl Into<String>) -> GcgStatus {
    set_error(msg);
    status
}

/// Runs `f`, converting panics to [`GcgStatus::Internal`].
fn guard(f: impl FnOnce() -> GcgStatus) -> GcgStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(GcgStatus::Internal, msg)
        }
    }
}

/// Message describing the last failure on this thread, or null if the last
/// call succeeded. The pointer stays valid until the next call into this
/// library on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn gcg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn variant(framed: bool) -> Variant {
    if framed {
        Variant::Framed
    } else {
        Variant::Nonframed
    }
}

fn small(x: u32, what: &str) -> Result<u8, GcgStatus> {
    u8::try_from(x).map_err(|_| fail(GcgStatus::InvalidArgument, format!("{what} = {x} is too large")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// A table of non-negative integers with named columns.
pub struct GcgTable {
    columns: Vec<CString>,
    rows: Vec<Vec<u64>>,
}

/// Dimension table of `t_(g)(n)` in weights `1..=max_weight`: columns
/// `weight`, `dim_free`, `dim_ideal`, `dim_quotient`. With `framed` false
/// this is the non-framed algebra, defined for `g = 1`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle to free
/// with [`gcg_table_free`].
#[no_mangle]
pub unsafe extern "C" fn gcg_t_dims(n: u32, g: u32, framed: bool, max_weight: u32, out: *mut *mut GcgTable) -> GcgStatus {
    guard(|| {
        if out.is_null() {
            return fail(GcgStatus::NullPointer, "out is null");
        }
        let (n, g) = match (small(n, "n"), small(g, "g")) {
            (Ok(n), Ok(g)) => (n, g),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match t_dims(n, g, variant(framed), max_weight as usize) {
            Ok(rows) => {
                let table = GcgTable {
                    columns: columns(&["weight", "dim_free", "dim_ideal", "dim_quotient"]),
                    rows: rows
                        .iter()
                        .map(|r| vec![r.weight as u64, r.dim_free as u64, r.dim_ideal as u64, r.dim_quotient as u64])
                        .collect(),
                };
                put(out, table);
                GcgStatus::Ok
            }
            Err(e) => fail(GcgStatus::Computation, e.to_string()),
        }
    })
}

/// Table of the graded Lie algebras `Z_(g)`, `B_(g)` and `R_(g)` in tuple
/// weights `0..=max_weight`: columns `weight`, `dim_z`, `dim_b`, `dim_r`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle to free
/// with [`gcg_table_free`].
#[no_mangle]
pub unsafe extern "C" fn gcg_grt_table(g: u32, framed: bool, max_weight: u32, out: *mut *mut GcgTable) -> GcgStatus {
    guard(|| {
        if out.is_null() {
            return fail(GcgStatus::NullPointer, "out is null");
        }
        let g = match small(g, "g") {
            Ok(g) => g,
            Err(s) => return s,
        };
        let result = GrtAlgebras::new(g, variant(framed), max_weight as usize + 2).and_then(|alg| {
            let grt = alg.solver()?;
            (0..=max_weight as usize).map(|w| grt.table_row(w)).collect::<Result<Vec<_>, _>>()
        });
        match result {
            Ok(rows) => {
                let table = GcgTable {
                    columns: columns(&["weight", "dim_z", "dim_b", "dim_r"]),
                    rows: rows
                        .iter()
                        .map(|r| vec![r.weight as u64, r.dim_z as u64, r.dim_b as u64, r.dim_r as u64])
                        .collect(),
                };
                put(out, table);
                GcgStatus::Ok
            }
            Err(e) => fail(GcgStatus::Computation, e.to_string()),
        }
    })
}

fn columns(names: &[&str]) -> Vec<CString> {
    names.iter().map(|n| CString::new(*n).expect("static names")).collect()
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcg_table_rows(t: *const GcgTable) -> usize {
    t.as_ref().map_or(0, |t| t.rows.len())
}

/// Number of columns, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcg_table_cols(t: *const GcgTable) -> usize {
    t.as_ref().map_or(0, |t| t.columns.len())
}

/// Name of a column, owned by the handle; null if out of range.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcg_table_column_name(t: *const GcgTable, col: usize) -> *const c_char {
    t.as_ref().and_then(|t| t.columns.get(col)).map_or(ptr::null(), |c| c.as_ptr())
}

/// Reads one entry.
///
/// # Safety
/// `t` must be null or a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcg_table_get(t: *const GcgTable, row: usize, col: usize, value: *mut u64) -> GcgStatus {
    guard(|| {
        let (Some(t), false) = (t.as_ref(), value.is_null()) else {
            return fail(GcgStatus::NullPointer, "table or value is null");
        };
        match t.rows.get(row).and_then(|r| r.get(col)) {
            Some(v) => {
                *value = *v;
                GcgStatus::Ok
            }
            None => fail(GcgStatus::OutOfRange, format!("entry ({row}, {col}) is out of range")),
        }
    })
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `t` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcg_table_free(t: *mut GcgTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Total residual dimension of `d m + 1/2 [m, m]` for the canonical element
/// of `Mo_(g)(r) (x) t_(g)(r)`, summed over blocks up to `max_weight`. Zero
/// means the Maurer-Cartan equation holds in the truncation.
///
/// # Safety
/// `residual` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcg_mo_mc_residual(r: u32, g: u32, framed: bool, max_weight: u32, residual: *mut u64) -> GcgStatus {
    guard(|| {
        if residual.is_null() {
            return fail(GcgStatus::NullPointer, "residual is null");
        }
        let (r, g) = match (small(r, "r"), small(g, "g")) {
            (Ok(r), Ok(g)) => (r, g),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match mc_check_xi(r, g, max_weight as usize, MoOptions { framed, ab_relation: true }) {
            Ok(rep) => {
                *residual = rep.blocks.iter().map(|b| b.residual_dim as u64).sum();
                GcgStatus::Ok
            }
            Err(e) => fail(GcgStatus::Computation, e.to_string()),
        }
    })
}

/// Parameters of a verification run.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GcgConfig {
    pub g: u32,
    /// Number of points for the `t` and `Mo` suites.
    pub n: u32,
    pub tadpoles: bool,
    pub framed: bool,
    pub max_vertices: u32,
    pub max_edges: u32,
    pub max_decorations: u32,
    pub max_weight: u32,
    pub seed: u64,
}

/// The default parameters, matching the command line defaults.
#[no_mangle]
pub extern "C" fn gcg_config_default() -> GcgConfig {
    let d = SuiteConfig::default();
    GcgConfig {
        g: d.g.into(),
        n: d.n.into(),
        tadpoles: d.tadpoles,
        framed: d.variant == Variant::Framed,
        max_vertices: d.bounds.vertices as u32,
        max_edges: d.bounds.edges as u32,
        max_decorations: d.bounds.decorations as u32,
        max_weight: d.max_weight as u32,
        seed: d.seed,
    }
}

/// Result of a verification run.
pub struct GcgReport {
    report: Report,
    anchors: Vec<CString>,
}

/// Runs the comma-separated list of suites (or `all`) and stores every
/// check. A run whose checks fail still returns [`GcgStatus::Ok`]; inspect
/// [`gcg_report_passed`].
///
/// # Safety
/// `suites` must be a nul-terminated string, `config` and `out` valid
/// pointers. On success `out` receives a handle to free with
/// [`gcg_report_free`].
#[no_mangle]
pub unsafe extern "C" fn gcg_verify(suites: *const c_char, config: *const GcgConfig, out: *mut *mut GcgReport) -> GcgStatus {
    guard(|| {
        if suites.is_null() || config.is_null() || out.is_null() {
            return fail(GcgStatus::NullPointer, "suites, config or out is null");
        }
        let Ok(list) = CStr::from_ptr(suites).to_str() else {
            return fail(GcgStatus::InvalidArgument, "suite list is not utf-8");
        };
        let chosen: Result<Vec<Suite>, String> = if list.trim() == "all" {
            Ok(Suite::ALL.to_vec())
        } else {
            list.split(',').map(|s| s.trim().parse::<Suite>().map_err(|e| e.to_string())).collect()
        };
        let chosen = match chosen {
            Ok(c) => c,
            Err(e) => return fail(GcgStatus::InvalidArgument, e),
        };
        let c = *config;
        let (g, n) = match (small(c.g, "g"), small(c.n, "n")) {
            (Ok(g), Ok(n)) => (g, n),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let cfg = SuiteConfig {
            g,
            n,
            tadpoles: c.tadpoles,
            variant: variant(c.framed),
            bounds: Bounds {
                vertices: c.max_vertices as usize,
                edges: c.max_edges as usize,
                decorations: c.max_decorations as usize,
            },
            max_weight: c.max_weight as usize,
            seed: c.seed,
        };
        let mut report = Report::new();
        for s in chosen {
            match run(s, &cfg) {
                Ok(checks) => report.extend(checks),
                Err(e) => return fail(GcgStatus::InvalidArgument, e.to_string()),
            }
        }
        let anchors = report.checks.iter().map(|c| CString::new(c.anchor.clone()).expect("anchors have no nul")).collect();
        put(out, GcgReport { report, anchors });
        GcgStatus::Ok
    })
}

/// Number of checks, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcg_report_len(r: *const GcgReport) -> usize {
    r.as_ref().map_or(0, |r| r.report.checks.len())
}

/// Whether every check passed; false for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcg_report_passed(r: *const GcgReport) -> bool {
    r.as_ref().is_some_and(|r| r.report.passed())
}

/// Outcome of check `i`.
///
/// # Safety
/// `r` must be null or a live handle and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gcg_report_check_passed(r: *const GcgReport, i: usize, passed: *mut bool) -> GcgStatus {
    guard(|| {
        let (Some(r), false) = (r.as_ref(), passed.is_null()) else {
            return fail(GcgStatus::NullPointer, "report or passed is null");
        };
        match r.report.checks.get(i) {
            Some(c) => {
                *passed = c.passed;
                GcgStatus::Ok
            }
            None => fail(GcgStatus::OutOfRange, format!("check {i} is out of range")),
        }
    })
}

/// Anchor of check `i`, owned by the handle; null if out of range.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcg_report_check_anchor(r: *const GcgReport, i: usize) -> *const c_char {
    r.as_ref().and_then(|r| r.anchors.get(i)).map_or(ptr::null(), |a| a.as_ptr())
}

/// The report as JSON; free with [`gcg_string_free`]. Null for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gcg_report_to_json(r: *const GcgReport) -> *mut c_char {
    match r.as_ref() {
        Some(r) => CString::new(r.report.to_json()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// Releases a report. Null is ignored.
///
/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcg_report_free(r: *mut GcgReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

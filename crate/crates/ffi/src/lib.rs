//! C ABI for the gridtopo analysis library.
//!
//! Graphs and removal results are opaque heap handles created by `gt_*`
//! constructors and released with the matching `*_free`. Every function
//! returns a [`GtStatus`]; on failure the message is available from
//! [`gt_last_error_message`] on the same thread. Panics never cross the
//! boundary, they are reported as [`GtStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use gridtopo::degree::gamma_suite;
use gridtopo::graph::{derive_variant, parse_edge_list, GridGraph, Variant};
use gridtopo::metrics::compute_metrics;
use gridtopo::percolation::{run_scenario, RemovalKind, RemovalScenario, ScenarioResult};
use gridtopo::GridError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    UndefinedMetric = 5,
    /// Degree fit impossible: empty variant, too few degrees or no decay.
    Fit = 6,
    Io = 7,
    OutOfRange = 8,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtVariant {
    CompleteHv = 0,
    SimplifiedHv = 1,
    Transmission = 2,
    TransmissionSimplified = 3,
}

impl From<GtVariant> for Variant {
    fn from(v: GtVariant) -> Self {
        match v {
            GtVariant::CompleteHv => Variant::CompleteHv,
            GtVariant::SimplifiedHv => Variant::SimplifiedHv,
            GtVariant::Transmission => Variant::Transmission,
            GtVariant::TransmissionSimplified => Variant::TransmissionSimplified,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtRemovalKind {
    Node = 0,
    Edge = 1,
}

/// Opaque graph handle.
pub struct GtGraph {
    inner: GridGraph,
}

/// Opaque handle to the records of one removal scenario.
pub struct GtScenarioResult {
    inner: ScenarioResult,
}

/// Topological metrics of one graph. `omega` is NaN and `has_omega` false
/// when the lattice reference is undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GtMetrics {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub density: f64,
    pub mean_degree: f64,
    pub diameter: u32,
    pub avg_path_length: f64,
    pub clustering: f64,
    pub modularity: f64,
    pub sigma: f64,
    pub sigma_degenerate: bool,
    pub omega: f64,
    pub has_omega: bool,
    pub efficiency: f64,
    pub share_110_150kv: f64,
    pub share_220_275kv: f64,
    pub share_330_400kv: f64,
    pub share_other: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GtGammaSuite {
    pub complete_hv: f64,
    pub simplified_hv: f64,
    pub transmission: f64,
    pub transmission_simplified: f64,
}

/// One Monte Carlo run. `clustering_drop` is NaN when the intact graph has
/// no triangles.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GtRunRecord {
    pub edges_lost_share: f64,
    pub lcc_size: usize,
    pub eff_drop: f64,
    pub clustering_drop: f64,
    pub has_clustering_drop: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: GtStatus,
    message: String,
}

impl Failure {
    fn new(status: GtStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

fn status_of(e: &GridError) -> GtStatus {
    match e {
        GridError::Parse { .. } => GtStatus::Parse,
        GridError::Validation(_) => GtStatus::Validation,
        GridError::UndefinedMetric { .. } => GtStatus::UndefinedMetric,
        GridError::EmptyVariant { .. }
        | GridError::InsufficientSupport { .. }
        | GridError::NonDecaying { .. } => GtStatus::Fit,
        GridError::Labeled { source, .. } => status_of(source),
        GridError::Io { .. } => GtStatus::Io,
        _ => GtStatus::Validation,
    }
}

impl From<GridError> for Failure {
    fn from(e: GridError) -> Self {
        Failure::new(status_of(&e), e.to_string())
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Run `f`, record any failure for [`gt_last_error_message`] and map it to a
/// status. Panics are caught here.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            GtStatus::Ok
        }
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            GtStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(GtStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::new(GtStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(GtStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(GtStatus::NullPointer, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

fn boxed_graph(g: GridGraph) -> *mut GtGraph {
    Box::into_raw(Box::new(GtGraph { inner: g }))
}

/// Message of the last failed call on this thread, or null after a
/// successful call. The pointer stays valid until the next `gt_*` call on
/// the same thread.
#[no_mangle]
pub extern "C" fn gt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse CSV edge-list text (`from,to,voltage_kv[,circuit_id]`).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gt_graph_parse(text: *const c_char, out: *mut *mut GtGraph) -> GtStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let g = parse_edge_list(text.as_bytes())?;
        write_out(out, boxed_graph(g))
    })
}

/// Read and parse an edge-list file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gt_graph_load(path: *const c_char, out: *mut *mut GtGraph) -> GtStatus {
    guard(|| {
        let path = Path::new(str_arg(path, "path")?);
        let file = std::fs::File::open(path).map_err(|e| GridError::io(path, e))?;
        let g = parse_edge_list(std::io::BufReader::new(file))?;
        write_out(out, boxed_graph(g))
    })
}

/// # Safety
/// `g` must be null or a handle from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn gt_graph_free(g: *mut GtGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_graph_counts(
    g: *const GtGraph,
    n_nodes: *mut usize,
    n_edges: *mut usize,
) -> GtStatus {
    guard(|| {
        let g = &handle(g, "graph")?.inner;
        write_out(n_nodes, g.node_count())?;
        write_out(n_edges, g.edge_count())
    })
}

/// New graph holding one of the four canonical variants of `g`.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gt_graph_variant(
    g: *const GtGraph,
    variant: GtVariant,
    out: *mut *mut GtGraph,
) -> GtStatus {
    guard(|| {
        let g = &handle(g, "graph")?.inner;
        let v = derive_variant(g, Variant::from(variant).spec())?;
        write_out(out, boxed_graph(v))
    })
}

/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gt_graph_metrics(g: *const GtGraph, out: *mut GtMetrics) -> GtStatus {
    guard(|| {
        let g = &handle(g, "graph")?.inner;
        let (m, _) = compute_metrics(g)?;
        let s = m.voltage_shares;
        write_out(
            out,
            GtMetrics {
                n_nodes: m.n_nodes,
                n_edges: m.n_edges,
                density: m.density,
                mean_degree: m.mean_degree,
                diameter: m.diameter,
                avg_path_length: m.avg_path_length,
                clustering: m.clustering,
                modularity: m.modularity,
                sigma: m.sigma,
                sigma_degenerate: m.sigma_degenerate,
                omega: m.omega.unwrap_or(f64::NAN),
                has_omega: m.omega.is_some(),
                efficiency: m.efficiency,
                share_110_150kv: s.kv_110_150,
                share_220_275kv: s.kv_220_275,
                share_330_400kv: s.kv_330_400,
                share_other: s.other,
            },
        )
    })
}

/// Exponential decay constants of the four canonical variants.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gt_graph_gamma_suite(g: *const GtGraph, out: *mut GtGammaSuite) -> GtStatus {
    guard(|| {
        let suite = gamma_suite(&handle(g, "graph")?.inner)?;
        let gamma = |v: Variant| suite[&v].gamma;
        write_out(
            out,
            GtGammaSuite {
                complete_hv: gamma(Variant::CompleteHv),
                simplified_hv: gamma(Variant::SimplifiedHv),
                transmission: gamma(Variant::Transmission),
                transmission_simplified: gamma(Variant::TransmissionSimplified),
            },
        )
    })
}

/// Run one removal scenario: `runs` random removals of `fraction` of the
/// nodes or circuits, seeded by `master_seed`.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gt_percolate(
    g: *const GtGraph,
    kind: GtRemovalKind,
    fraction: f64,
    runs: usize,
    master_seed: u64,
    out: *mut *mut GtScenarioResult,
) -> GtStatus {
    guard(|| {
        let g = &handle(g, "graph")?.inner;
        let kind = match kind {
            GtRemovalKind::Node => RemovalKind::Node,
            GtRemovalKind::Edge => RemovalKind::Edge,
        };
        let scenario = RemovalScenario::new(kind, fraction, runs, master_seed)?;
        let result = run_scenario(g, &scenario)?;
        write_out(out, Box::into_raw(Box::new(GtScenarioResult { inner: result })))
    })
}

/// # Safety
/// `r` must be null or a result handle that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn gt_result_free(r: *mut GtScenarioResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of runs and of elements removed per run.
///
/// # Safety
/// `r` must be a live result handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn gt_result_counts(
    r: *const GtScenarioResult,
    runs: *mut usize,
    removed_per_run: *mut usize,
) -> GtStatus {
    guard(|| {
        let r = &handle(r, "result")?.inner;
        write_out(runs, r.records.len())?;
        write_out(removed_per_run, r.removal_count)
    })
}

/// # Safety
/// `r` must be a live result handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gt_result_record(
    r: *const GtScenarioResult,
    index: usize,
    out: *mut GtRunRecord,
) -> GtStatus {
    guard(|| {
        let r = &handle(r, "result")?.inner;
        let rec = r.records.get(index).ok_or_else(|| {
            Failure::new(
                GtStatus::OutOfRange,
                format!("run {index} out of range ({} runs)", r.records.len()),
            )
        })?;
        write_out(
            out,
            GtRunRecord {
                edges_lost_share: rec.edges_lost_share,
                lcc_size: rec.lcc_size,
                eff_drop: rec.eff_drop,
                clustering_drop: rec.clustering_drop.unwrap_or(f64::NAN),
                has_clustering_drop: rec.clustering_drop.is_some(),
            },
        )
    })
}

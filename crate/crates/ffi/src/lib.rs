//! C interface to `dsom`.
//!
//! Objects are opaque handles created by `dsom_*_new`/`load`/`from_*`
//! functions and released by the matching `dsom_*_free`. Fallible functions
//! return a [`DsomStatus`] and write their product through an out pointer;
//! on failure `dsom_last_error()` describes the problem. No function unwinds
//! across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use dsom::som::{SumsUpdate, DEFAULT_EPOCHS, DEFAULT_RATIO};
use dsom::{
    build_from_vectors, build_from_words, levenshtein, load_matrix, save_matrix, train,
    DissimilarityMatrix, DsomConfig, DsomError, KernelSchedule, Layout, PointSet, PriorGraph,
    TrainingResult, Variant,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsomStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    InvalidMatrix = 4,
    TooManyModels = 5,
    Io = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// Values for [`DsomTrainConfig::variant`].
#[repr(u32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsomVariant {
    Brute = 0,
    Partial = 1,
    EarlyStop = 2,
    Memory = 3,
    Fast = 4,
}

/// Values for the `layout` argument of [`dsom_graph_new`].
#[repr(u32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsomLayout {
    Hex = 0,
    Rect = 1,
}

/// Values for [`DsomEpochStats::update`].
#[repr(u32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsomSumsUpdate {
    None = 0,
    Full = 1,
    Block = 2,
    Individual = 3,
}

/// Training parameters. Fill with [`dsom_train_config_default`] and adjust.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsomTrainConfig {
    /// A `DsomVariant` value.
    pub variant: u32,
    pub epochs: usize,
    pub sigma_initial: f64,
    pub sigma_final: f64,
    pub ratio: f64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DsomEpochStats {
    pub epoch: usize,
    pub nb_switch: usize,
    /// A `DsomSumsUpdate` value.
    pub update: u32,
    pub candidates_evaluated: u64,
    pub terms_accumulated: u64,
}

pub struct DsomMatrix {
    inner: DissimilarityMatrix,
}

pub struct DsomGraph {
    inner: PriorGraph,
}

pub struct DsomResult {
    inner: TrainingResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: DsomStatus,
    message: String,
}

impl Failure {
    fn new(status: DsomStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }

    fn null(what: &str) -> Self {
        Failure::new(DsomStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<DsomError> for Failure {
    fn from(e: DsomError) -> Self {
        let status = match &e {
            DsomError::MalformedHeader { .. }
            | DsomError::Parse { .. }
            | DsomError::Manifest(_) => DsomStatus::Parse,
            DsomError::NotSquare { .. }
            | DsomError::Asymmetric { .. }
            | DsomError::NonZeroDiagonal { .. }
            | DsomError::Negative { .. } => DsomStatus::InvalidMatrix,
            DsomError::TooManyModels { .. } => DsomStatus::TooManyModels,
            DsomError::Io { .. } => DsomStatus::Io,
            _ => DsomStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("nul bytes removed"));
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> DsomStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            DsomStatus::Ok
        }
        Ok(Err(fail)) => {
            set_error(Some(fail.message));
            fail.status
        }
        Err(_) => {
            set_error(Some("internal error (panic)".into()));
            DsomStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(DsomStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn variant_from(v: u32) -> Result<Variant, Failure> {
    Ok(match v {
        0 => Variant::Brute,
        1 => Variant::Partial,
        2 => Variant::EarlyStop,
        3 => Variant::Memory,
        4 => Variant::Fast,
        _ => {
            return Err(Failure::new(
                DsomStatus::InvalidArgument,
                format!("unknown variant {v}"),
            ))
        }
    })
}

/// Message for the last failed call on this thread, or null after a
/// successful one. Valid until the next `dsom_*` call on the same thread.
#[no_mangle]
pub extern "C" fn dsom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Matrix from `n * n` row-major values.
///
/// # Safety
/// `values` must point to `n * n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dsom_matrix_from_values(
    n: usize,
    values: *const f64,
    out: *mut *mut DsomMatrix,
) -> DsomStatus {
    guard(|| {
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Failure::new(DsomStatus::InvalidArgument, "n * n overflows"))?;
        let values = slice_arg(values, len, "values")?.to_vec();
        put(
            out,
            DsomMatrix {
                inner: DissimilarityMatrix::from_values(n, values)?,
            },
        )
    })
}

/// Squared Euclidean matrix of `n` points of dimension `dim`, row-major.
///
/// # Safety
/// `coords` must point to `n * dim` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dsom_matrix_from_points(
    n: usize,
    dim: usize,
    coords: *const f64,
    out: *mut *mut DsomMatrix,
) -> DsomStatus {
    guard(|| {
        let len = n
            .checked_mul(dim)
            .ok_or_else(|| Failure::new(DsomStatus::InvalidArgument, "n * dim overflows"))?;
        let coords = slice_arg(coords, len, "coords")?.to_vec();
        let points = PointSet::new(n, dim, coords)?;
        put(
            out,
            DsomMatrix {
                inner: build_from_vectors(&points)?,
            },
        )
    })
}

/// Levenshtein matrix of `count` UTF-8 words, optionally normalized by the
/// longer length.
///
/// # Safety
/// `words` must point to `count` valid NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn dsom_matrix_from_words(
    words: *const *const c_char,
    count: usize,
    normalized: bool,
    out: *mut *mut DsomMatrix,
) -> DsomStatus {
    guard(|| {
        let ptrs = slice_arg(words, count, "words")?;
        let words = ptrs
            .iter()
            .map(|&p| str_arg(p, "word"))
            .collect::<Result<Vec<_>, _>>()?;
        put(
            out,
            DsomMatrix {
                inner: build_from_words(&words, normalized)?,
            },
        )
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dsom_matrix_load(
    path: *const c_char,
    out: *mut *mut DsomMatrix,
) -> DsomStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        put(
            out,
            DsomMatrix {
                inner: load_matrix(Path::new(path))?,
            },
        )
    })
}

/// # Safety
/// `matrix` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dsom_matrix_save(
    matrix: *const DsomMatrix,
    path: *const c_char,
) -> DsomStatus {
    guard(|| {
        let m = handle(matrix, "matrix")?;
        let path = str_arg(path, "path")?;
        save_matrix(&m.inner, Path::new(path))?;
        Ok(())
    })
}

/// New matrix with entries `round(scale * d)`.
///
/// # Safety
/// `matrix` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dsom_matrix_integerize(
    matrix: *const DsomMatrix,
    scale: f64,
    out: *mut *mut DsomMatrix,
) -> DsomStatus {
    guard(|| {
        let m = handle(matrix, "matrix")?;
        put(
            out,
            DsomMatrix {
                inner: m.inner.integerize(scale)?,
            },
        )
    })
}

/// Number of observations, 0 for a null handle.
///
/// # Safety
/// `matrix` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsom_matrix_size(matrix: *const DsomMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.inner.n())
}

/// # Safety
/// `matrix` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dsom_matrix_get(
    matrix: *const DsomMatrix,
    i: usize,
    k: usize,
    out: *mut f64,
) -> DsomStatus {
    guard(|| {
        let m = handle(matrix, "matrix")?;
        if i >= m.inner.n() || k >= m.inner.n() {
            return Err(Failure::new(
                DsomStatus::InvalidArgument,
                "index out of range",
            ));
        }
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        *out = m.inner.get(i, k);
        Ok(())
    })
}

/// # Safety
/// `matrix` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn dsom_matrix_free(matrix: *mut DsomMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Edit distance between two UTF-8 strings, counted in code points.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dsom_levenshtein(
    a: *const c_char,
    b: *const c_char,
    out: *mut usize,
) -> DsomStatus {
    guard(|| {
        let a = str_arg(a, "a")?;
        let b = str_arg(b, "b")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        *out = levenshtein(a, b);
        Ok(())
    })
}

/// `side x side` map; `layout` is a `DsomLayout` value.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dsom_graph_new(
    layout: u32,
    side: usize,
    out: *mut *mut DsomGraph,
) -> DsomStatus {
    guard(|| {
        let layout = match layout {
            0 => Layout::Hex,
            1 => Layout::Rect,
            _ => {
                return Err(Failure::new(
                    DsomStatus::InvalidArgument,
                    format!("unknown layout {layout}"),
                ))
            }
        };
        put(
            out,
            DsomGraph {
                inner: PriorGraph::lattice(layout, side)?,
            },
        )
    })
}

/// Number of models, 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsom_graph_models(graph: *const DsomGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.models())
}

/// Shortest-path distance between two models, `UINT32_MAX` on bad input.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsom_graph_distance(graph: *const DsomGraph, j: usize, k: usize) -> u32 {
    match graph.as_ref() {
        Some(g) if j < g.inner.models() && k < g.inner.models() => g.inner.distance(j, k),
        _ => u32::MAX,
    }
}

/// # Safety
/// `graph` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn dsom_graph_free(graph: *mut DsomGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Defaults for `graph`: fast variant, 100 epochs, kernel width from half
/// the map diameter down to 0.5, ratio 7, seed 0.
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dsom_train_config_default(
    graph: *const DsomGraph,
    out: *mut DsomTrainConfig,
) -> DsomStatus {
    guard(|| {
        let g = handle(graph, "graph")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let schedule = KernelSchedule::for_graph(&g.inner, DEFAULT_EPOCHS)?;
        *out = DsomTrainConfig {
            variant: DsomVariant::Fast as u32,
            epochs: DEFAULT_EPOCHS,
            sigma_initial: schedule.sigma_initial(),
            sigma_final: schedule.sigma_final(),
            ratio: DEFAULT_RATIO,
            seed: 0,
        };
        Ok(())
    })
}

/// # Safety
/// `matrix` and `graph` must be live handles, `config` readable and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn dsom_train(
    matrix: *const DsomMatrix,
    graph: *const DsomGraph,
    config: *const DsomTrainConfig,
    out: *mut *mut DsomResult,
) -> DsomStatus {
    guard(|| {
        let m = handle(matrix, "matrix")?;
        let g = handle(graph, "graph")?;
        let c = handle(config, "config")?;
        let schedule = KernelSchedule::new(c.epochs, c.sigma_initial, c.sigma_final)?;
        let config =
            DsomConfig::new(variant_from(c.variant)?, schedule, c.seed).with_ratio(c.ratio);
        put(
            out,
            DsomResult {
                inner: train(&config, &m.inner, &g.inner)?,
            },
        )
    })
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsom_result_models(result: *const DsomResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.prototypes.len())
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsom_result_observations(result: *const DsomResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.assignments.len())
}

/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsom_result_epochs(result: *const DsomResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.epochs.len())
}

/// Quantization error, NaN for a null handle.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dsom_result_quantization_error(result: *const DsomResult) -> f64 {
    result
        .as_ref()
        .map_or(f64::NAN, |r| r.inner.quantization_error)
}

unsafe fn copy_out(src: &[usize], out: *mut usize, len: usize) -> Result<(), Failure> {
    if len < src.len() {
        return Err(Failure::new(
            DsomStatus::BufferTooSmall,
            format!("buffer holds {len} entries, {} needed", src.len()),
        ));
    }
    if out.is_null() {
        return Err(Failure::null("out"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

/// Copies the prototype (observation index) of every model.
///
/// # Safety
/// `result` must be a live handle and `out` writable for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn dsom_result_prototypes(
    result: *const DsomResult,
    out: *mut usize,
    len: usize,
) -> DsomStatus {
    guard(|| copy_out(&handle(result, "result")?.inner.prototypes, out, len))
}

/// Copies the model of every observation.
///
/// # Safety
/// `result` must be a live handle and `out` writable for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn dsom_result_assignments(
    result: *const DsomResult,
    out: *mut usize,
    len: usize,
) -> DsomStatus {
    guard(|| copy_out(&handle(result, "result")?.inner.assignments, out, len))
}

/// Statistics of epoch `index` (0-based).
///
/// # Safety
/// `result` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dsom_result_epoch_stats(
    result: *const DsomResult,
    index: usize,
    out: *mut DsomEpochStats,
) -> DsomStatus {
    guard(|| {
        let r = handle(result, "result")?;
        let e = r.inner.epochs.get(index).ok_or_else(|| {
            Failure::new(DsomStatus::InvalidArgument, format!("no epoch {index}"))
        })?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        *out = DsomEpochStats {
            epoch: e.epoch,
            nb_switch: e.nb_switch,
            update: match e.update {
                SumsUpdate::None => DsomSumsUpdate::None,
                SumsUpdate::Full => DsomSumsUpdate::Full,
                SumsUpdate::Block => DsomSumsUpdate::Block,
                SumsUpdate::Individual => DsomSumsUpdate::Individual,
            } as u32,
            candidates_evaluated: e.candidates_evaluated,
            terms_accumulated: e.terms_accumulated,
        };
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn dsom_result_free(result: *mut DsomResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

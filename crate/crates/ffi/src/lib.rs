//! C ABI for `hgw-core`.
//!
//! Graphs and spectral decompositions are opaque handles created by
//! `hgw_*_new`/`hgw_graph_from_*` and released with the matching `*_free`.
//! Every fallible call returns an [`HgwStatus`]; on failure a message is
//! available from [`hgw_last_error_message`] on the calling thread.
//! Array outputs are written into caller-provided buffers, matrices in
//! row-major order.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hgw::centrality::{information_centrality, mdt_closed_form, select_leader};
use hgw::graph::InputFormat;
use hgw::localization::{derived_bound, heat_bound, zeta};
use hgw::spectral::heat_kernel;
use hgw::wavelet::wavelet_atom;
use hgw::{Graph, HgwError, SpectralDecomposition};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HgwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    Disconnected = 5,
    NumericalError = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque graph handle.
pub struct HgwGraph {
    inner: Graph,
}

/// Opaque Laplacian eigendecomposition handle.
pub struct HgwSpectrum {
    inner: SpectralDecomposition,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &HgwError) -> HgwStatus {
    match e {
        HgwError::MalformedLine { .. }
        | HgwError::NegativeWeight { .. }
        | HgwError::ConflictingDuplicateEdge { .. } => HgwStatus::ParseError,
        HgwError::DisconnectedGraph => HgwStatus::Disconnected,
        HgwError::ConvergenceFailure | HgwError::SingularSystem | HgwError::QuadratureNonconvergence { .. } => {
            HgwStatus::NumericalError
        }
        _ => HgwStatus::InvalidArgument,
    }
}

struct Failure(HgwStatus, String);

impl From<HgwError> for Failure {
    fn from(e: HgwError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> HgwStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HgwStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HgwStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(HgwStatus::NullPointer, format!("{what} is null"))
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn as_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(HgwStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn fill(buf: *mut f64, len: usize, values: impl ExactSizeIterator<Item = f64>) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(null("output buffer"));
    }
    if len < values.len() {
        return Err(Failure(
            HgwStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", values.len()),
        ));
    }
    for (i, v) in values.enumerate() {
        buf.add(i).write(v);
    }
    Ok(())
}

unsafe fn parse_graph(text: *const c_char, format: InputFormat, out: *mut *mut HgwGraph) -> HgwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let g = Graph::parse(as_str(text, "text")?, format)?;
        out.write(Box::into_raw(Box::new(HgwGraph { inner: g })));
        Ok(())
    })
}

/// Parses a whitespace-separated `u v w` edge list.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hgw_graph_from_edge_list(text: *const c_char, out: *mut *mut HgwGraph) -> HgwStatus {
    parse_graph(text, InputFormat::EdgeList, out)
}

/// Parses a Matrix Market coordinate matrix.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hgw_graph_from_matrix_market(text: *const c_char, out: *mut *mut HgwGraph) -> HgwStatus {
    parse_graph(text, InputFormat::MatrixMarket, out)
}

/// # Safety
/// `graph` must come from `hgw_graph_from_*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hgw_graph_free(graph: *mut HgwGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hgw_graph_num_vertices(graph: *const HgwGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.n())
}

/// Label of vertex `index` as a newly allocated string; release it with
/// [`hgw_string_free`].
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hgw_graph_label(graph: *const HgwGraph, index: usize, out: *mut *mut c_char) -> HgwStatus {
    guard(|| {
        let g = &as_ref(graph, "graph")?.inner;
        if index >= g.n() {
            return Err(HgwError::VertexOutOfRange { index, n: g.n() }.into());
        }
        let s = CString::new(g.label(index)).map_err(|e| Failure(HgwStatus::InvalidUtf8, e.to_string()))?;
        write_out(out, s.into_raw(), "out")
    })
}

/// Index of the vertex labelled `label`.
///
/// # Safety
/// `graph` must be a live handle, `label` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn hgw_graph_index_of(
    graph: *const HgwGraph,
    label: *const c_char,
    out: *mut usize,
) -> HgwStatus {
    guard(|| {
        let g = &as_ref(graph, "graph")?.inner;
        let label = as_str(label, "label")?;
        let i = g
            .index_of(label)
            .ok_or_else(|| HgwError::UnknownVertex(label.to_string()))?;
        write_out(out, i, "out")
    })
}

/// # Safety
/// `s` must be null or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hgw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Eigendecomposition of the graph Laplacian.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hgw_spectrum_new(graph: *const HgwGraph, out: *mut *mut HgwSpectrum) -> HgwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(ptr::null_mut());
        let d = SpectralDecomposition::from_graph(&as_ref(graph, "graph")?.inner)?;
        out.write(Box::into_raw(Box::new(HgwSpectrum { inner: d })));
        Ok(())
    })
}

/// # Safety
/// `spectrum` must come from [`hgw_spectrum_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hgw_spectrum_free(spectrum: *mut HgwSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Eigenvalues in ascending order; `buf` needs `N` slots.
///
/// # Safety
/// `spectrum` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hgw_spectrum_eigenvalues(
    spectrum: *const HgwSpectrum,
    buf: *mut f64,
    len: usize,
) -> HgwStatus {
    guard(|| {
        let d = &as_ref(spectrum, "spectrum")?.inner;
        fill(buf, len, d.eigenvalues().iter().copied())
    })
}

/// Heat kernel `H_t`, row-major; `buf` needs `N·N` slots.
///
/// # Safety
/// `spectrum` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hgw_heat_kernel(spectrum: *const HgwSpectrum, t: f64, buf: *mut f64, len: usize) -> HgwStatus {
    guard(|| {
        let h = heat_kernel(&as_ref(spectrum, "spectrum")?.inner, t)?;
        // Storage is column-major; the transpose reads out row-major.
        fill(buf, len, h.transpose().iter().copied())
    })
}

/// Wavelet atom centred at vertex `x` at scale `s`; `buf` needs `N` slots.
///
/// # Safety
/// `spectrum` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hgw_wavelet_atom(
    spectrum: *const HgwSpectrum,
    s: f64,
    x: usize,
    buf: *mut f64,
    len: usize,
) -> HgwStatus {
    guard(|| {
        let atom = wavelet_atom(&as_ref(spectrum, "spectrum")?.inner, s, x)?;
        fill(buf, len, atom.iter().copied())
    })
}

/// Mean diffusion time of every vertex; `buf` needs `N` slots.
///
/// # Safety
/// `spectrum` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hgw_mdt(spectrum: *const HgwSpectrum, buf: *mut f64, len: usize) -> HgwStatus {
    guard(|| {
        let v = mdt_closed_form(&as_ref(spectrum, "spectrum")?.inner)?;
        fill(buf, len, v.into_iter())
    })
}

/// Information centrality of every vertex; `buf` needs `N` slots.
///
/// # Safety
/// `spectrum` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hgw_information_centrality(
    spectrum: *const HgwSpectrum,
    buf: *mut f64,
    len: usize,
) -> HgwStatus {
    guard(|| {
        let v = information_centrality(&as_ref(spectrum, "spectrum")?.inner)?;
        fill(buf, len, v.into_iter())
    })
}

/// Index of the minimum-MDT vertex; ties go to the smallest label.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hgw_select_leader(graph: *const HgwGraph, out: *mut usize) -> HgwStatus {
    guard(|| {
        let r = select_leader(&as_ref(graph, "graph")?.inner)?;
        write_out(out, r.leader_index, "out")
    })
}

/// Decay exponent for jump size `s`, time `t` and distance `r`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hgw_zeta(s: f64, t: f64, r: f64, out: *mut f64) -> HgwStatus {
    guard(|| write_out(out, zeta(s, t, r)?, "out"))
}

/// Heat-kernel decay bound `exp(-zeta)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hgw_heat_bound(s: f64, t: f64, r: f64, out: *mut f64) -> HgwStatus {
    guard(|| write_out(out, heat_bound(s, t, r)?, "out"))
}

/// Wavelet decay bound at time `t`, distance `r`, jump size `s`, constant `c`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hgw_derived_bound(t: f64, r: f64, s: f64, c: f64, out: *mut f64) -> HgwStatus {
    guard(|| write_out(out, derived_bound(t, r, s, c)?, "out"))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn hgw_status_str(status: HgwStatus) -> *const c_char {
    let s: &'static CStr = match status {
        HgwStatus::Ok => c"ok",
        HgwStatus::NullPointer => c"null pointer",
        HgwStatus::InvalidUtf8 => c"invalid UTF-8",
        HgwStatus::ParseError => c"parse error",
        HgwStatus::InvalidArgument => c"invalid argument",
        HgwStatus::Disconnected => c"graph is disconnected",
        HgwStatus::NumericalError => c"numerical error",
        HgwStatus::BufferTooSmall => c"buffer too small",
        HgwStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn hgw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

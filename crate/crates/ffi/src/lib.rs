//! C ABI over the symhom engine.
//!
//! Complexes are handed out as opaque pointers created by the
//! `symhom_complex_*` constructors and released with [`symhom_complex_free`].
//! Every fallible call returns a [`SymhomStatus`]; the message of the last
//! failure on the calling thread is available from [`symhom_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use symhom::chain_modules::{
    all_generators, free_linear, quotient_complex, ChainModel, ComplexJson, ComplexRep,
    SubcomplexKind,
};
use symhom::exact_linalg::Ring;
use symhom::generators::{n1_graph, or_a, sym_a, FacetComplex, SimpleGraph, DEFAULT_CELL_CAP};
use symhom::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymhomStatus {
    Ok = 0,
    /// a required pointer was null or a string was not UTF-8
    NullOrEncoding = 1,
    InvalidInput = 2,
    ResourceLimit = 3,
    ContractViolation = 4,
    Unsupported = 5,
    /// the call panicked; the handle arguments should be considered unusable
    Internal = 6,
    /// an output buffer was too small; the required length was still written
    BufferTooSmall = 7,
}

pub const SYMHOM_RING_Q: i32 = 0;
pub const SYMHOM_RING_Z: i32 = 1;

pub const SYMHOM_SYSTEM_SYM: i32 = 0;
pub const SYMHOM_SYSTEM_ORDERED: i32 = 1;

pub const SYMHOM_REDUCE_NONE: i32 = 0;
pub const SYMHOM_REDUCE_DEG: i32 = 1;
pub const SYMHOM_REDUCE_SYM: i32 = 2;
pub const SYMHOM_REDUCE_DEG_SYM: i32 = 3;
pub const SYMHOM_REDUCE_CON: i32 = 4;
pub const SYMHOM_REDUCE_POSCON: i32 = 5;
pub const SYMHOM_REDUCE_T: i32 = 6;
pub const SYMHOM_REDUCE_R: i32 = 7;
pub const SYMHOM_REDUCE_RT: i32 = 8;

/// A chain complex with fixed bases.
pub struct SymhomComplex {
    inner: ComplexRep,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SymhomStatus {
    match e {
        Error::InvalidInput(_) => SymhomStatus::InvalidInput,
        Error::Resource(_) => SymhomStatus::ResourceLimit,
        Error::Contract(_) => SymhomStatus::ContractViolation,
        Error::Unsupported(_) => SymhomStatus::Unsupported,
    }
}

fn fail(status: SymhomStatus, msg: &str) -> SymhomStatus {
    set_error(msg);
    status
}

/// Runs `f`, converting errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), SymhomStatus>) -> SymhomStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SymhomStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(SymhomStatus::Internal, "internal error"),
    }
}

fn lift<T>(r: symhom::Result<T>) -> Result<T, SymhomStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, SymhomStatus> {
    if p.is_null() {
        return Err(fail(SymhomStatus::NullOrEncoding, "null string argument"));
    }
    // SAFETY: the caller passes a NUL-terminated string that outlives the call.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| fail(SymhomStatus::NullOrEncoding, "string argument is not UTF-8"))
}

unsafe fn handle<'a>(h: *const SymhomComplex) -> Result<&'a ComplexRep, SymhomStatus> {
    if h.is_null() {
        return Err(fail(SymhomStatus::NullOrEncoding, "null complex handle"));
    }
    // SAFETY: non-null handles come from this library and are live until freed.
    Ok(&unsafe { &*h }.inner)
}

fn ring_of(r: i32) -> Result<Ring, SymhomStatus> {
    match r {
        SYMHOM_RING_Q => Ok(Ring::Q),
        SYMHOM_RING_Z => Ok(Ring::Z),
        _ => Err(fail(
            SymhomStatus::InvalidInput,
            &format!("unknown ring code {r}"),
        )),
    }
}

fn reduce_of(r: i32) -> Result<Option<SubcomplexKind>, SymhomStatus> {
    use SubcomplexKind::*;
    Ok(Some(match r {
        SYMHOM_REDUCE_NONE => return Ok(None),
        SYMHOM_REDUCE_DEG => Deg,
        SYMHOM_REDUCE_SYM => SDeg,
        SYMHOM_REDUCE_DEG_SYM => DegPlusSDeg,
        SYMHOM_REDUCE_CON => Con,
        SYMHOM_REDUCE_POSCON => PosCon,
        SYMHOM_REDUCE_T => TCon,
        SYMHOM_REDUCE_R => RCon,
        SYMHOM_REDUCE_RT => RtCon,
        _ => {
            return Err(fail(
                SymhomStatus::InvalidInput,
                &format!("unknown reduction code {r}"),
            ))
        }
    }))
}

unsafe fn emit(out: *mut *mut SymhomComplex, c: ComplexRep) -> Result<(), SymhomStatus> {
    if out.is_null() {
        return Err(fail(SymhomStatus::NullOrEncoding, "null output pointer"));
    }
    // SAFETY: `out` is non-null and points to writable storage for a pointer.
    unsafe { *out = Box::into_raw(Box::new(SymhomComplex { inner: c })) };
    Ok(())
}

fn build(
    sys: &symhom::chain_modules::MapSystem,
    ring: Ring,
    reduce: Option<SubcomplexKind>,
) -> symhom::Result<ComplexRep> {
    let lin = free_linear(sys);
    let m = ChainModel::new(&lin);
    let c = m.complex(ring)?;
    match reduce {
        None => Ok(c),
        Some(_) if ring == Ring::Z => Err(Error::invalid(
            "quotient reductions only preserve homology over Q",
        )),
        Some(k) => {
            k.check(m.mode(), m.flags())?;
            quotient_complex(&c, &all_generators(k, &m)?)
        }
    }
}

/// Builds the chain complex of a simplicial complex given as
/// `{"vertices": [...], "facets": [[...], ...]}`, up to degree `max_degree`.
///
/// `system` selects all tuples on faces ([`SYMHOM_SYSTEM_SYM`]) or the weakly
/// increasing ones in vertex-list order ([`SYMHOM_SYSTEM_ORDERED`]).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer slot.
#[no_mangle]
pub unsafe extern "C" fn symhom_complex_from_facets(
    json: *const c_char,
    system: i32,
    max_degree: i32,
    ring: i32,
    reduce: i32,
    out: *mut *mut SymhomComplex,
) -> SymhomStatus {
    guard(|| {
        let text = unsafe { read_str(json) }?;
        let ring = ring_of(ring)?;
        let reduce = reduce_of(reduce)?;
        let k = lift(FacetComplex::from_json(text))?;
        let sys = match system {
            SYMHOM_SYSTEM_SYM => lift(sym_a(&k, max_degree, DEFAULT_CELL_CAP))?,
            SYMHOM_SYSTEM_ORDERED => {
                let order: Vec<usize> = (0..k.vertices.len()).collect();
                lift(or_a(&k, &order, max_degree, DEFAULT_CELL_CAP))?
            }
            _ => {
                return Err(fail(
                    SymhomStatus::InvalidInput,
                    &format!("unknown system code {system}"),
                ))
            }
        };
        let c = lift(build(&sys, ring, reduce))?;
        unsafe { emit(out, c) }
    })
}

/// Builds the cubical chain complex of graph maps out of cubes into the graph
/// `{"vertices": [...], "edges": [[u, v], ...]}`, up to degree `max_degree`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer slot.
#[no_mangle]
pub unsafe extern "C" fn symhom_complex_from_graph(
    json: *const c_char,
    max_degree: i32,
    ring: i32,
    reduce: i32,
    out: *mut *mut SymhomComplex,
) -> SymhomStatus {
    guard(|| {
        let text = unsafe { read_str(json) }?;
        let ring = ring_of(ring)?;
        let reduce = reduce_of(reduce)?;
        let g = lift(SimpleGraph::from_json(text))?;
        let sys = lift(n1_graph(&g, max_degree, DEFAULT_CELL_CAP))?;
        let c = lift(build(&sys, ring, reduce))?;
        unsafe { emit(out, c) }
    })
}

/// Restores a complex from the JSON written by [`symhom_complex_to_json`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer slot.
#[no_mangle]
pub unsafe extern "C" fn symhom_complex_from_json(
    json: *const c_char,
    out: *mut *mut SymhomComplex,
) -> SymhomStatus {
    guard(|| {
        let text = unsafe { read_str(json) }?;
        let j: ComplexJson = serde_json::from_str(text).map_err(|e| {
            fail(
                SymhomStatus::InvalidInput,
                &format!("line {}, column {}: {e}", e.line(), e.column()),
            )
        })?;
        let c = lift(ComplexRep::from_json(&j))?;
        unsafe { emit(out, c) }
    })
}

/// Releases a complex. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn symhom_complex_free(h: *mut SymhomComplex) {
    if !h.is_null() {
        // SAFETY: see above; ownership returns to Rust exactly once.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Lowest and highest built degree.
///
/// # Safety
/// `h` must be a live handle; `lo` and `hi` valid `int32_t` slots.
#[no_mangle]
pub unsafe extern "C" fn symhom_complex_degrees(
    h: *const SymhomComplex,
    lo: *mut i32,
    hi: *mut i32,
) -> SymhomStatus {
    guard(|| {
        let c = unsafe { handle(h) }?;
        if lo.is_null() || hi.is_null() {
            return Err(fail(SymhomStatus::NullOrEncoding, "null output pointer"));
        }
        unsafe {
            *lo = c.lo();
            *hi = c.hi();
        }
        Ok(())
    })
}

/// Rank of the chain group in degree `n` (0 outside the built range).
///
/// # Safety
/// `h` must be a live handle; `dim` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn symhom_complex_dim(
    h: *const SymhomComplex,
    n: i32,
    dim: *mut usize,
) -> SymhomStatus {
    guard(|| {
        let c = unsafe { handle(h) }?;
        if dim.is_null() {
            return Err(fail(SymhomStatus::NullOrEncoding, "null output pointer"));
        }
        unsafe { *dim = c.dim(n) };
        Ok(())
    })
}

/// Homology in degree `n`: the free rank and the torsion coefficients.
///
/// `torsion` may be null when `capacity` is 0. The number of coefficients is
/// always written to `torsion_len`; if it exceeds `capacity` the call returns
/// [`SymhomStatus::BufferTooSmall`] and nothing is written to `torsion`.
/// Coefficients beyond `u64` are reported as `UINT64_MAX`.
///
/// # Safety
/// `h` must be a live handle, `betti` and `torsion_len` valid slots, and
/// `torsion` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn symhom_complex_homology(
    h: *const SymhomComplex,
    n: i32,
    betti: *mut usize,
    torsion: *mut u64,
    capacity: usize,
    torsion_len: *mut usize,
) -> SymhomStatus {
    guard(|| {
        let c = unsafe { handle(h) }?;
        if betti.is_null() || torsion_len.is_null() || (torsion.is_null() && capacity > 0) {
            return Err(fail(SymhomStatus::NullOrEncoding, "null output pointer"));
        }
        let g = lift(c.homology_at(n))?;
        let t = g.torsion_u64();
        unsafe {
            *betti = g.betti;
            *torsion_len = t.len();
        }
        if t.len() > capacity {
            return Err(fail(
                SymhomStatus::BufferTooSmall,
                "torsion buffer too small",
            ));
        }
        if !t.is_empty() {
            // SAFETY: the caller guarantees room for `capacity >= t.len()` values.
            unsafe { ptr::copy_nonoverlapping(t.as_ptr(), torsion, t.len()) };
        }
        Ok(())
    })
}

/// Serializes a complex (bases and differentials) as JSON. Free the result
/// with [`symhom_string_free`].
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer slot.
#[no_mangle]
pub unsafe extern "C" fn symhom_complex_to_json(
    h: *const SymhomComplex,
    out: *mut *mut c_char,
) -> SymhomStatus {
    guard(|| {
        let c = unsafe { handle(h) }?;
        if out.is_null() {
            return Err(fail(SymhomStatus::NullOrEncoding, "null output pointer"));
        }
        let text = serde_json::to_string(&c.to_json())
            .map_err(|e| fail(SymhomStatus::Internal, &e.to_string()))?;
        let s = CString::new(text).map_err(|_| fail(SymhomStatus::Internal, "embedded NUL"))?;
        unsafe { *out = s.into_raw() };
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn symhom_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the string was produced by `CString::into_raw`.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn symhom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn symhom_version() -> *const c_char {
    static V: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(s) => s,
            Err(_) => panic!("version contains NUL"),
        };
    V.as_ptr()
}

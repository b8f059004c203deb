//! C ABI for `fock_partition`.
//!
//! States cross the boundary as opaque `FpState` handles owned by the caller
//! and released with [`fp_state_free`]. Every fallible call returns an
//! [`FpStatus`]; on failure the message is kept per thread and can be copied
//! out with [`fp_last_error_message`].

use fock_partition::channels::{damp_diagonal, ChannelSpec};
use fock_partition::fockcore::FockCutoff;
use fock_partition::partition::{bs_partition, nbs_partition};
use fock_partition::states::{
    binomial_state, mean_photon, negbinomial_state, number_state, photon_subtract, thermal_state, DiagonalState,
};
use fock_partition::verify::{self, GridFile, Suite, VerifyOptions};
use fock_partition::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result codes. `FP_STATUS_OK` is zero; everything else is an error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Convergence = 3,
    Cutoff = 4,
    Degenerate = 5,
    Quadrature = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Which partition family to sum.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpFamily {
    /// Binomial states, parameter σ.
    Binomial = 0,
    /// Negative binomial states, parameter γ.
    NegativeBinomial = 1,
}

/// Opaque diagonal state.
pub struct FpState {
    inner: DiagonalState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: FpStatus, msg: impl Into<String>) -> FpStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> FpStatus {
    let status = match e {
        Error::Domain(_) => FpStatus::Domain,
        Error::Convergence(_) => FpStatus::Convergence,
        Error::Cutoff { .. } => FpStatus::Cutoff,
        Error::Degenerate(_) => FpStatus::Degenerate,
        Error::Quadrature { .. } => FpStatus::Quadrature,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> FpStatus) -> FpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == FpStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            s
        }
        Err(_) => fail(FpStatus::Panic, "internal panic"),
    }
}

unsafe fn emit_state(out: *mut *mut FpState, r: fock_partition::Result<DiagonalState>) -> FpStatus {
    if out.is_null() {
        return fail(FpStatus::NullPointer, "output handle pointer is null");
    }
    match r {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(FpState { inner }));
            FpStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

fn cutoff(dim: usize) -> fock_partition::Result<FockCutoff> {
    FockCutoff::new(dim)
}

unsafe fn state_ref<'a>(s: *const FpState) -> Option<&'a DiagonalState> {
    s.as_ref().map(|s| &s.inner)
}

/// Copy `src` into `buf`, writing the required length to `needed`.
unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize, needed: *mut usize) -> FpStatus {
    if !needed.is_null() {
        *needed = src.len();
    }
    if len < src.len() {
        return fail(FpStatus::BufferTooSmall, format!("buffer holds {len} values, {} needed", src.len()));
    }
    if src.is_empty() {
        return FpStatus::Ok;
    }
    if buf.is_null() {
        return fail(FpStatus::NullPointer, "output buffer is null");
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    FpStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Length in bytes of the last error message on this thread, without the
/// terminating NUL. Zero when the last call succeeded.
#[no_mangle]
pub extern "C" fn fp_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |c| c.as_bytes().len()))
}

/// Copy the last error message into `buf` (NUL-terminated, truncated to
/// `len - 1` bytes). Returns the full message length.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn fp_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[][..], |c| c.as_bytes());
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Number state |m⟩ in a cutoff of dimension `dim`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn fp_state_number(m: usize, dim: usize, out: *mut *mut FpState) -> FpStatus {
    guard(|| emit_state(out, cutoff(dim).and_then(|c| number_state(m, c))))
}

/// Binomial state with `n` trials and success probability `sigma`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn fp_state_binomial(n: usize, sigma: f64, dim: usize, out: *mut *mut FpState) -> FpStatus {
    guard(|| emit_state(out, cutoff(dim).and_then(|c| binomial_state(n, sigma, c))))
}

/// Negative binomial state. The cutoff grows past `dim` when the tail
/// would otherwise exceed 1e-12.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn fp_state_negbinomial(s: usize, gamma: f64, dim: usize, out: *mut *mut FpState) -> FpStatus {
    guard(|| emit_state(out, cutoff(dim).and_then(|c| negbinomial_state(s, gamma, c))))
}

/// Thermal state at fixed cutoff; the dropped mass is reported as tail.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn fp_state_thermal(gamma: f64, dim: usize, out: *mut *mut FpState) -> FpStatus {
    guard(|| emit_state(out, cutoff(dim).and_then(|c| thermal_state(gamma, c))))
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `state` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fp_state_free(state: *mut FpState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Dimension of the retained block.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn fp_state_dim(state: *const FpState, dim: *mut usize) -> FpStatus {
    guard(|| match (state_ref(state), dim.is_null()) {
        (Some(s), false) => {
            *dim = s.dim();
            FpStatus::Ok
        }
        _ => fail(FpStatus::NullPointer, "state or output pointer is null"),
    })
}

/// Diagonal probabilities. `needed` receives the state dimension even when
/// `len` is too small.
///
/// # Safety
/// `buf` must be valid for `len` doubles; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn fp_state_probs(
    state: *const FpState,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> FpStatus {
    guard(|| match state_ref(state) {
        Some(s) => copy_out(s.probs(), buf, len, needed),
        None => fail(FpStatus::NullPointer, "state is null"),
    })
}

/// Probability mass beyond the cutoff.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn fp_state_tail_mass(state: *const FpState, tail: *mut f64) -> FpStatus {
    guard(|| match (state_ref(state), tail.is_null()) {
        (Some(s), false) => {
            *tail = s.tail_mass();
            FpStatus::Ok
        }
        _ => fail(FpStatus::NullPointer, "state or output pointer is null"),
    })
}

/// Mean photon number with a bound on the contribution of the tail.
///
/// # Safety
/// Pointers must be valid; `tail_bound` may be null.
#[no_mangle]
pub unsafe extern "C" fn fp_state_mean_photon(state: *const FpState, mean: *mut f64, tail_bound: *mut f64) -> FpStatus {
    guard(|| match (state_ref(state), mean.is_null()) {
        (Some(s), false) => {
            let m = mean_photon(s);
            *mean = m.value;
            if !tail_bound.is_null() {
                *tail_bound = m.tail_bound;
            }
            FpStatus::Ok
        }
        _ => fail(FpStatus::NullPointer, "state or output pointer is null"),
    })
}

/// Apply amplitude damping with dimensionless time `kt` (survival e^{-2kt}).
/// The result is a new handle.
///
/// # Safety
/// `state` must be a live handle and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn fp_state_damp(state: *const FpState, kt: f64, out: *mut *mut FpState) -> FpStatus {
    guard(|| match state_ref(state) {
        Some(s) => emit_state(out, ChannelSpec::new(kt).map(|ch| damp_diagonal(s, &ch))),
        None => fail(FpStatus::NullPointer, "state is null"),
    })
}

/// Subtract `s` photons. The renormalised state goes to `out` and the
/// pre-normalisation trace to `norm` (may be null).
///
/// # Safety
/// `state` must be a live handle and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn fp_state_photon_subtract(
    state: *const FpState,
    s: usize,
    out: *mut *mut FpState,
    norm: *mut f64,
) -> FpStatus {
    guard(|| match state_ref(state) {
        Some(st) => {
            let r = photon_subtract(st, s);
            if let (Ok(sub), false) = (&r, norm.is_null()) {
                *norm = sub.norm;
            }
            emit_state(out, r.map(|sub| sub.state))
        }
        None => fail(FpStatus::NullPointer, "state is null"),
    })
}

/// Per-level residuals of the truncated partition of unity. `buf` receives
/// `levels` values and `max_residual` (may be null) their maximum.
///
/// # Safety
/// `buf` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fp_partition_residuals(
    family: FpFamily,
    param: f64,
    terms: usize,
    levels: usize,
    buf: *mut f64,
    len: usize,
    max_residual: *mut f64,
) -> FpStatus {
    guard(|| {
        let r = match family {
            FpFamily::Binomial => bs_partition(param, terms, levels),
            FpFamily::NegativeBinomial => nbs_partition(param, terms, levels),
        };
        match r {
            Ok(rep) => {
                let st = copy_out(&rep.per_level_residuals, buf, len, std::ptr::null_mut());
                if st == FpStatus::Ok && !max_residual.is_null() {
                    *max_residual = rep.max_residual;
                }
                st
            }
            Err(e) => from_error(e),
        }
    })
}

/// Run every built-in verification check at run tolerance `tol`
/// (pinned tolerances still apply). Writes the number of checks and
/// failures; returns `FP_STATUS_OK` even when checks fail.
///
/// # Safety
/// `total` and `failed` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn fp_verify_all(tol: f64, total: *mut usize, failed: *mut usize) -> FpStatus {
    guard(|| {
        if total.is_null() || failed.is_null() {
            return fail(FpStatus::NullPointer, "output pointer is null");
        }
        if !(tol.is_finite() && tol >= 0.0) {
            return fail(FpStatus::Domain, format!("tolerance must be finite and nonnegative, got {tol}"));
        }
        let opts = VerifyOptions { tol, fault: None };
        let rows = verify::run(&GridFile::builtin(), &Suite::ALL, &opts);
        *total = rows.len();
        *failed = rows.iter().filter(|r| !r.pass).count();
        FpStatus::Ok
    })
}

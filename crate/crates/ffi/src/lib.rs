//! C ABI for the decision engine. Everything goes through an opaque pool
//! handle; terms are `uint32_t` handles scoped to their pool; functions
//! return [`WdecStatus`] codes and report details through
//! [`wdec_last_error_message`]. Strings returned through out-parameters
//! are UTF-8, allocated by this library, and must be released with
//! [`wdec_string_free`].
//!
//! The generated header lands in `include/wdec.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use wdec::decide::{decide_with_arena, DecideError, Query};
use wdec::dot::{emit_dot, replay_certificate, ReplayError};
use wdec::game::Player;
use wdec::simulation::{BuildError, Mode, DEFAULT_MAX_POSITIONS};
use wdec::term::{TermId, TermPool};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WdecStatus {
    WdecOk = 0,
    /// Malformed term syntax or certificate text.
    WdecErrParse = 1,
    /// Pointed mode rejects terms containing `T` or `0`.
    WdecErrUnsupportedTerm = 2,
    /// The reachable position budget was exhausted.
    WdecErrBudgetExceeded = 3,
    /// Null pointer, unknown handle, bad mode or invalid UTF-8.
    WdecErrInvalidArgument = 4,
    /// Certificate replay failed its independent check.
    WdecErrCertificateRejected = 5,
    /// Unexpected internal failure; see the last error message.
    WdecErrInternal = 6,
}

/// Validity over the extended Weihrauch degrees.
pub const WDEC_MODE_EXTENDED: i32 = 0;
/// Validity over the pointed Weihrauch degrees.
pub const WDEC_MODE_POINTED: i32 = 1;

/// Decision outcome.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WdecVerdict {
    /// 1 when the inequation is universally valid.
    pub valid: u8,
    /// Number of reachable game positions explored.
    pub positions_explored: u64,
    /// Stable digest of the constructed arena, echoed in certificates.
    pub arena_digest: u64,
}

/// Opaque term pool. One pool per logical session; term handles must not
/// cross pools.
pub struct WdecPool {
    pool: TermPool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: impl AsRef<str>) {
    let sanitized: String = message
        .as_ref()
        .chars()
        .map(|c| if c == '\0' { ' ' } else { c })
        .collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

/// Message describing the most recent failure on this thread. Owned by the
/// library; valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wdec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a fresh pool.
#[no_mangle]
pub extern "C" fn wdec_pool_new() -> *mut WdecPool {
    Box::into_raw(Box::new(WdecPool {
        pool: TermPool::new(),
    }))
}

/// Releases a pool and every term in it.
///
/// # Safety
/// `pool` must have come from [`wdec_pool_new`] and not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn wdec_pool_free(pool: *mut WdecPool) {
    if !pool.is_null() {
        drop(Box::from_raw(pool));
    }
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must have been returned through one of this library's string
/// out-parameters and not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn wdec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn pool_ref<'a>(pool: *const WdecPool) -> Option<&'a TermPool> {
    pool.as_ref().map(|p| &p.pool)
}

unsafe fn utf8_arg<'a>(text: *const c_char) -> Result<&'a str, WdecStatus> {
    if text.is_null() {
        set_error("null string argument");
        return Err(WdecStatus::WdecErrInvalidArgument);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        WdecStatus::WdecErrInvalidArgument
    })
}

fn term_arg(pool: &TermPool, handle: u32) -> Result<TermId, WdecStatus> {
    pool.lookup(handle).ok_or_else(|| {
        set_error(format!("unknown term handle {handle}"));
        WdecStatus::WdecErrInvalidArgument
    })
}

fn mode_arg(mode: i32) -> Result<Mode, WdecStatus> {
    match mode {
        WDEC_MODE_EXTENDED => Ok(Mode::Extended),
        WDEC_MODE_POINTED => Ok(Mode::Pointed),
        other => {
            set_error(format!("unknown mode {other}"));
            Err(WdecStatus::WdecErrInvalidArgument)
        }
    }
}

fn give_string(out: *mut *mut c_char, text: String) -> WdecStatus {
    let sanitized: String = text
        .chars()
        .map(|c| if c == '\0' { ' ' } else { c })
        .collect();
    unsafe { *out = CString::new(sanitized).unwrap().into_raw() };
    WdecStatus::WdecOk
}

fn guarded(body: impl FnOnce() -> WdecStatus) -> WdecStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_error(format!("internal panic: {message}"));
            WdecStatus::WdecErrInternal
        }
    }
}

/// Parses the concrete term syntax (`|`, `&`, `*`, postfix `^`, `0`, `1`,
/// `T`, parentheses) and writes the interned handle to `out_term`.
///
/// # Safety
/// `pool` must be a live pool, `text` a NUL-terminated string, and
/// `out_term` writable.
#[no_mangle]
pub unsafe extern "C" fn wdec_parse(
    pool: *const WdecPool,
    text: *const c_char,
    out_term: *mut u32,
) -> WdecStatus {
    let (Some(pool), false) = (pool_ref(pool), out_term.is_null()) else {
        set_error("null pool or out-parameter");
        return WdecStatus::WdecErrInvalidArgument;
    };
    let text = match utf8_arg(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    guarded(|| match pool.parse(text) {
        Ok(t) => {
            *out_term = t.index() as u32;
            WdecStatus::WdecOk
        }
        Err(e) => {
            set_error(e.to_string());
            WdecStatus::WdecErrParse
        }
    })
}

/// Renders a term in canonical syntax; the caller frees the string.
///
/// # Safety
/// `pool` must be a live pool and `out_text` writable.
#[no_mangle]
pub unsafe extern "C" fn wdec_print(
    pool: *const WdecPool,
    term: u32,
    out_text: *mut *mut c_char,
) -> WdecStatus {
    let (Some(pool), false) = (pool_ref(pool), out_text.is_null()) else {
        set_error("null pool or out-parameter");
        return WdecStatus::WdecErrInvalidArgument;
    };
    guarded(|| match term_arg(pool, term) {
        Ok(t) => give_string(out_text, pool.display(t)),
        Err(s) => s,
    })
}

/// Writes the number of abstract-syntax nodes of `term` to `out_size`.
///
/// # Safety
/// `pool` must be a live pool and `out_size` writable.
#[no_mangle]
pub unsafe extern "C" fn wdec_term_size(
    pool: *const WdecPool,
    term: u32,
    out_size: *mut u32,
) -> WdecStatus {
    let (Some(pool), false) = (pool_ref(pool), out_size.is_null()) else {
        set_error("null pool or out-parameter");
        return WdecStatus::WdecErrInvalidArgument;
    };
    guarded(|| match term_arg(pool, term) {
        Ok(t) => {
            *out_size = pool.size(t);
            WdecStatus::WdecOk
        }
        Err(s) => s,
    })
}

fn decide_error_status(e: &DecideError) -> WdecStatus {
    set_error(e.to_string());
    match e {
        DecideError::Build(BuildError::PositionBudgetExceeded { .. }) => {
            WdecStatus::WdecErrBudgetExceeded
        }
        DecideError::Build(BuildError::PointedModeUnsupportedTerm { .. }) => {
            WdecStatus::WdecErrUnsupportedTerm
        }
        DecideError::CertificateRejected(_) => WdecStatus::WdecErrInternal,
    }
}

/// Decides whether `lhs <= rhs` is universally valid in the chosen mode.
/// A `max_positions` of 0 selects the default budget.
///
/// # Safety
/// `pool` must be a live pool and `out_verdict` writable.
#[no_mangle]
pub unsafe extern "C" fn wdec_decide(
    pool: *const WdecPool,
    lhs: u32,
    rhs: u32,
    mode: i32,
    max_positions: u64,
    out_verdict: *mut WdecVerdict,
) -> WdecStatus {
    wdec_decide_with_certificate(
        pool,
        lhs,
        rhs,
        mode,
        max_positions,
        out_verdict,
        std::ptr::null_mut(),
    )
}

/// Like [`wdec_decide`], additionally returning the winner's certificate
/// as a Graphviz document when `out_certificate` is non-null.
///
/// # Safety
/// `pool` must be a live pool, `out_verdict` writable, and
/// `out_certificate` either null or writable.
#[no_mangle]
pub unsafe extern "C" fn wdec_decide_with_certificate(
    pool: *const WdecPool,
    lhs: u32,
    rhs: u32,
    mode: i32,
    max_positions: u64,
    out_verdict: *mut WdecVerdict,
    out_certificate: *mut *mut c_char,
) -> WdecStatus {
    let (Some(pool), false) = (pool_ref(pool), out_verdict.is_null()) else {
        set_error("null pool or out-parameter");
        return WdecStatus::WdecErrInvalidArgument;
    };
    guarded(|| {
        let (lhs, rhs) = match (term_arg(pool, lhs), term_arg(pool, rhs)) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let mode = match mode_arg(mode) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let budget = if max_positions == 0 {
            DEFAULT_MAX_POSITIONS
        } else {
            max_positions as usize
        };
        match decide_with_arena(pool, &Query { lhs, rhs, mode }, budget) {
            Ok(decision) => {
                *out_verdict = WdecVerdict {
                    valid: u8::from(decision.verdict.valid),
                    positions_explored: decision.verdict.positions_explored as u64,
                    arena_digest: decision.verdict.arena_digest,
                };
                if !out_certificate.is_null() {
                    return give_string(out_certificate, emit_dot(pool, &decision));
                }
                WdecStatus::WdecOk
            }
            Err(e) => decide_error_status(&e),
        }
    })
}

/// Replays a certificate produced by [`wdec_decide_with_certificate`]
/// against a freshly rebuilt arena. On success writes 1 to
/// `out_valid_claim` when the certificate proves validity (Duplicator
/// wins) and 0 when it refutes it (Spoiler wins).
///
/// # Safety
/// `certificate` must be a NUL-terminated string and `out_valid_claim`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn wdec_check_certificate(
    certificate: *const c_char,
    out_valid_claim: *mut u8,
) -> WdecStatus {
    if out_valid_claim.is_null() {
        set_error("null out-parameter");
        return WdecStatus::WdecErrInvalidArgument;
    }
    let text = match utf8_arg(certificate) {
        Ok(t) => t,
        Err(s) => return s,
    };
    guarded(|| match replay_certificate(text) {
        Ok(report) => {
            *out_valid_claim = u8::from(report.winner == Player::Duplicator);
            WdecStatus::WdecOk
        }
        Err(e) => {
            set_error(e.to_string());
            match e {
                ReplayError::Rejected(_)
                | ReplayError::AmbiguousChoice(_)
                | ReplayError::DigestMismatch { .. } => WdecStatus::WdecErrCertificateRejected,
                ReplayError::Build(BuildError::PositionBudgetExceeded { .. }) => {
                    WdecStatus::WdecErrBudgetExceeded
                }
                ReplayError::Build(BuildError::PointedModeUnsupportedTerm { .. }) => {
                    WdecStatus::WdecErrUnsupportedTerm
                }
                _ => WdecStatus::WdecErrParse,
            }
        }
    })
}

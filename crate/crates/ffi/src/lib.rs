//! C ABI over `tomocad`.
//!
//! Fallible functions return a [`TcStatus`] and write results through out
//! pointers. Channels and simulation results are opaque heap handles that
//! must be released with their `_free` function. After a non-OK status,
//! [`tc_last_error_message`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tomocad::sim::{run_cad_experiment, SimConfig, SimResult};
use tomocad::{ChannelParams, Error};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An argument is outside the operation's domain.
    InvalidArgument = 2,
    /// A numerical procedure failed (non-PSD matrix, failed bracketing).
    NumericalFailure = 3,
    /// An index was outside a table.
    OutOfRange = 4,
    /// The library panicked; the handle state is unspecified.
    Panic = 5,
}

/// Opaque channel handle.
pub struct TcChannel(ChannelParams);

/// Opaque simulation result handle.
pub struct TcSimResult(SimResult);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TcChannelValues {
    pub n: usize,
    pub epsilon: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub lambda: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TcBlockStats {
    pub block_length: usize,
    pub beta0: f64,
    pub beta1: f64,
    pub p_accept: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TcEveStats {
    pub block_length: usize,
    pub eta0: f64,
    pub eta1: f64,
}

/// Exact and asymptotic informations; the asymptotic fields are NaN and
/// `has_asymptotic` is false when the noise is 0 or 1.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TcInfoReport {
    pub block_length: usize,
    pub i_ab: f64,
    pub i_ae: f64,
    pub margin: f64,
    pub deficit_ab: f64,
    pub deficit_ae: f64,
    pub has_asymptotic: bool,
    pub i_ab_asym: f64,
    pub i_ae_asym: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TcSimSummary {
    pub n: usize,
    pub block_length: usize,
    pub n_blocks: usize,
    pub seed: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub case1: u64,
    pub raw_pairs: u64,
    pub sifted_pairs: u64,
    pub p_accept: f64,
    pub beta0l: f64,
    pub i_ab_hat: f64,
    pub i_ae_hat: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> TcStatus {
    match err {
        Error::NotPsd(_) | Error::Bracketing(_) => TcStatus::NumericalFailure,
        _ => TcStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F>(f: F) -> TcStatus
where
    F: FnOnce() -> Result<(), TcStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TcStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside tomocad".into());
            TcStatus::Panic
        }
    }
}

fn check<T>(r: tomocad::Result<T>) -> Result<T, TcStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), TcStatus> {
    if p.is_null() {
        set_error(format!("{name} is NULL"));
        return Err(TcStatus::NullPointer);
    }
    Ok(())
}

/// # Safety
/// `p` must be NULL or point to a live handle created by this library.
unsafe fn channel<'a>(p: *const TcChannel) -> Result<&'a ChannelParams, TcStatus> {
    non_null(p, "channel")?;
    Ok(&(*p).0)
}

/// Message for the last non-OK status on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a channel from dimension `n` and noise `epsilon`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_channel_from_noise(
    n: usize,
    epsilon: f64,
    out: *mut *mut TcChannel,
) -> TcStatus {
    guard(|| {
        non_null(out, "out")?;
        let params = check(ChannelParams::from_noise(n, epsilon))?;
        *out = Box::into_raw(Box::new(TcChannel(params)));
        Ok(())
    })
}

/// Creates a channel from `beta0` and `beta1`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_channel_from_betas(
    n: usize,
    beta0: f64,
    beta1: f64,
    out: *mut *mut TcChannel,
) -> TcStatus {
    guard(|| {
        non_null(out, "out")?;
        let params = check(ChannelParams::from_betas(n, beta0, beta1))?;
        *out = Box::into_raw(Box::new(TcChannel(params)));
        Ok(())
    })
}

/// Releases a channel. NULL is ignored.
///
/// # Safety
/// `channel` must be NULL or a handle from `tc_channel_from_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_channel_free(channel: *mut TcChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// # Safety
/// `channel` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_channel_values(
    channel: *const TcChannel,
    out: *mut TcChannelValues,
) -> TcStatus {
    guard(|| {
        let p = self::channel(channel)?;
        non_null(out, "out")?;
        *out = TcChannelValues {
            n: p.n(),
            epsilon: p.epsilon(),
            beta0: p.beta0(),
            beta1: p.beta1(),
            lambda: p.lambda(),
        };
        Ok(())
    })
}

/// # Safety
/// `channel` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_block_stats(
    channel: *const TcChannel,
    block_length: usize,
    out: *mut TcBlockStats,
) -> TcStatus {
    guard(|| {
        let p = self::channel(channel)?;
        non_null(out, "out")?;
        let s = check(tomocad::distilled_betas(p, block_length))?;
        *out = TcBlockStats {
            block_length: s.block_length,
            beta0: s.beta0,
            beta1: s.beta1,
            p_accept: s.p_accept,
        };
        Ok(())
    })
}

/// # Safety
/// `channel` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_eve_stats(
    channel: *const TcChannel,
    block_length: usize,
    out: *mut TcEveStats,
) -> TcStatus {
    guard(|| {
        let p = self::channel(channel)?;
        non_null(out, "out")?;
        let e = check(tomocad::eve_guess_probs(p, block_length))?;
        *out = TcEveStats {
            block_length: e.block_length,
            eta0: e.eta0,
            eta1: e.eta1,
        };
        Ok(())
    })
}

/// # Safety
/// `channel` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_security_margin(
    channel: *const TcChannel,
    block_length: usize,
    out: *mut TcInfoReport,
) -> TcStatus {
    guard(|| {
        let p = self::channel(channel)?;
        non_null(out, "out")?;
        let r = check(tomocad::security_margin(p, block_length))?;
        *out = TcInfoReport {
            block_length: r.block_length,
            i_ab: r.i_ab,
            i_ae: r.i_ae,
            margin: r.margin,
            deficit_ab: r.deficit_ab,
            deficit_ae: r.deficit_ae,
            has_asymptotic: r.i_ab_asym.is_some(),
            i_ab_asym: r.i_ab_asym.unwrap_or(f64::NAN),
            i_ae_asym: r.i_ae_asym.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Smallest secure block length up to `l_max`. `*found` is false, and
/// `*out` zero, when no length qualifies.
///
/// # Safety
/// `channel` must be a live handle; `out` and `found` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_min_secure_block_length(
    channel: *const TcChannel,
    l_max: usize,
    out: *mut usize,
    found: *mut bool,
) -> TcStatus {
    guard(|| {
        let p = self::channel(channel)?;
        non_null(out, "out")?;
        non_null(found, "found")?;
        let l = check(tomocad::min_secure_block_length(p, l_max))?;
        *found = l.is_some();
        *out = l.unwrap_or(0);
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_qed_threshold(n: usize, out: *mut f64) -> TcStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(tomocad::qed_threshold(n))?;
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_cad_threshold_closed(n: usize, out: *mut f64) -> TcStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(tomocad::cad_threshold_closed(n))?;
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_cad_threshold_numeric(
    n: usize,
    l_max: usize,
    tol: f64,
    out: *mut f64,
) -> TcStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(tomocad::cad_threshold_numeric(n, l_max, tol))?;
        Ok(())
    })
}

/// Gram-matrix oracle for the square-root-measurement success probability.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_srm_success_probability(
    n: usize,
    overlap: f64,
    out: *mut f64,
) -> TcStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(tomocad::srm_success_probability(n, overlap))?;
        Ok(())
    })
}

/// Runs the Monte Carlo CAD experiment.
///
/// # Safety
/// `channel` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_simulate(
    channel: *const TcChannel,
    block_length: usize,
    n_blocks: usize,
    seed: u64,
    simulate_sifting: bool,
    out: *mut *mut TcSimResult,
) -> TcStatus {
    guard(|| {
        let params = *self::channel(channel)?;
        non_null(out, "out")?;
        let config = SimConfig {
            params,
            block_length,
            n_blocks,
            seed,
            simulate_sifting,
        };
        let result = check(run_cad_experiment(&config))?;
        *out = Box::into_raw(Box::new(TcSimResult(result)));
        Ok(())
    })
}

/// Releases a simulation result. NULL is ignored.
///
/// # Safety
/// `result` must be NULL or a handle from `tc_simulate` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_sim_result_free(result: *mut TcSimResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_sim_result_summary(
    result: *const TcSimResult,
    out: *mut TcSimSummary,
) -> TcStatus {
    guard(|| {
        non_null(result, "result")?;
        non_null(out, "out")?;
        let r = &(*result).0;
        *out = TcSimSummary {
            n: r.config.params.n(),
            block_length: r.config.block_length,
            n_blocks: r.config.n_blocks,
            seed: r.seed(),
            accepted: r.accepted,
            rejected: r.rejected,
            case1: r.case1,
            raw_pairs: r.raw_pairs,
            sifted_pairs: r.sifted_pairs,
            p_accept: r.p_accept,
            beta0l: r.beta0l,
            i_ab_hat: r.i_ab_hat,
            i_ae_hat: r.i_ae_hat,
        };
        Ok(())
    })
}

/// Which joint count table [`tc_sim_result_joint_count`] reads.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcJointTable {
    /// (Alice's distilled value, Bob's distilled value).
    AliceBob = 0,
    /// (Alice's distilled value, Eve's guess) over all good blocks.
    AliceEve = 1,
}

/// Reads one cell of a joint count table.
///
/// # Safety
/// `result` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tc_sim_result_joint_count(
    result: *const TcSimResult,
    table: TcJointTable,
    row: usize,
    col: usize,
    out: *mut u64,
) -> TcStatus {
    guard(|| {
        non_null(result, "result")?;
        non_null(out, "out")?;
        let r = &(*result).0;
        let n = r.config.params.n();
        if row >= n || col >= n {
            set_error(format!("cell ({row}, {col}) outside {n}x{n} table"));
            return Err(TcStatus::OutOfRange);
        }
        *out = match table {
            TcJointTable::AliceBob => r.joint_ab.get(row, col),
            TcJointTable::AliceEve => {
                r.joint_ae_case1.get(row, col) + r.joint_ae_case2.get(row, col)
            }
        };
        Ok(())
    })
}

/// Copies the last error message into `buf` (NUL-terminated, truncated to
/// `len - 1` bytes). Returns the full message length, or 0 if none.
///
/// # Safety
/// `buf` must be NULL or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn tc_copy_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_errors_to_statuses() {
        assert_eq!(status_of(&Error::NotPsd(-1.0)), TcStatus::NumericalFailure);
        assert_eq!(status_of(&Error::Dimension(1)), TcStatus::InvalidArgument);
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), TcStatus::Panic);
    }
}

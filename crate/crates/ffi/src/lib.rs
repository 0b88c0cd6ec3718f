//! C ABI for the ptlab simulator and verifier.
//!
//! Every fallible call returns a [`PtlabStatus`]; on failure a message is
//! available from [`ptlab_last_error_message`] on the same thread. Objects
//! are handed out as opaque handles and must be released with the matching
//! `*_free` function. Strings returned by `*_to_json` are owned by the
//! caller and released with [`ptlab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ptlab::graph::{chromatic_lower_bound, frankl_alpha, is_edge, GraphSpec, Vertex};
use ptlab::harness::{
    pseudo_telepathy_certificate, verify_exhaustive, CertificateOptions, Mode,
    PseudoTelepathyCertificate, VerificationReport, VerifyOptions,
};
use ptlab::protocol::{collision_probability_exact, run_protocol, sample_round, Question};
use ptlab::quantum::ProbabilityGrid;
use ptlab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtlabStatus {
    Ok = 0,
    InvalidArgument = 1,
    InvalidDimension = 2,
    DimensionMismatch = 3,
    ResourceLimit = 4,
    Precondition = 5,
    Overflow = 6,
    UnsupportedOrder = 7,
    NullPointer = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtlabMode {
    Exact = 0,
    Simulated = 1,
}

/// Outcome of one sampled round.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PtlabRound {
    pub c_a: u32,
    pub c_b: u32,
    pub win: bool,
}

/// Joint measurement distribution of one question.
pub struct PtlabGrid(ProbabilityGrid);

pub struct PtlabReport(VerificationReport);

pub struct PtlabCertificate(PseudoTelepathyCertificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(err: &Error) -> PtlabStatus {
    match err {
        Error::InvalidDimension(_) => PtlabStatus::InvalidDimension,
        Error::DimensionMismatch(_) => PtlabStatus::DimensionMismatch,
        Error::ResourceLimit(_) => PtlabStatus::ResourceLimit,
        Error::Precondition(_) => PtlabStatus::Precondition,
        Error::Overflow(_) => PtlabStatus::Overflow,
        Error::InvalidArgument(_) => PtlabStatus::InvalidArgument,
        Error::UnsupportedOrder(_) => PtlabStatus::UnsupportedOrder,
    }
}

enum Failure {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::Core(err)
    }
}

/// Runs `body`, translating errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> PtlabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PtlabStatus::Ok,
        Ok(Err(Failure::Core(err))) => {
            set_last_error(err.to_string());
            status_of(&err)
        }
        Ok(Err(Failure::Null(name))) => {
            set_last_error(format!("null pointer passed for `{name}`"));
            PtlabStatus::NullPointer
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            PtlabStatus::Panic
        }
    }
}

/// Writes `value` through `out`, failing on NULL.
///
/// # Safety
/// A non-null `out` must be valid for a write of `T`.
unsafe fn write_out<T>(out: *mut T, name: &'static str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    // SAFETY: non-null and valid per the caller's contract.
    unsafe { out.write(value) };
    Ok(())
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ptlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ptlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by `CString::into_raw` in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ptlab_is_edge(n_bits: u32, u: u32, v: u32, out: *mut bool) -> PtlabStatus {
    guard(|| {
        let g = GraphSpec::new(n_bits)?;
        let (u, v) = (Vertex::new(u), Vertex::new(v));
        if !g.contains(u) || !g.contains(v) {
            return Err(Error::DimensionMismatch(format!("vertex outside G_{n_bits}")).into());
        }
        unsafe { write_out(out, "out", is_edge(u, v, g)) }
    })
}

/// Independence number of `G_{4k}`; `k` must be an odd prime power.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ptlab_frankl_alpha(k: u64, out: *mut u64) -> PtlabStatus {
    guard(|| {
        let alpha = frankl_alpha(k)?;
        let alpha = u64::try_from(alpha)
            .map_err(|_| Error::Overflow(format!("independence number for k = {k} exceeds 64 bits")))?;
        unsafe { write_out(out, "out", alpha) }
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ptlab_chromatic_lower_bound(
    vertex_count: u64,
    alpha: u64,
    out: *mut u64,
) -> PtlabStatus {
    guard(|| {
        let bound = chromatic_lower_bound(vertex_count, alpha)?;
        unsafe { write_out(out, "out", bound) }
    })
}

/// Exact `Pr[c_A = c_B]` as a reduced fraction.
///
/// # Safety
/// `numer` and `denom` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ptlab_collision_probability(
    n_bits: u32,
    a: u32,
    b: u32,
    numer: *mut u64,
    denom: *mut u64,
) -> PtlabStatus {
    guard(|| {
        let q = Question::unchecked(Vertex::new(a), Vertex::new(b), n_bits)?;
        let p = collision_probability_exact(q.a, q.b, q.n_bits);
        unsafe {
            write_out(numer, "numer", *p.numer())?;
            write_out(denom, "denom", *p.denom())
        }
    })
}

/// Simulates the protocol on `(a, b)` (promise not required).
///
/// # Safety
/// `out` must be valid for writes. The handle written there must be released
/// with [`ptlab_grid_free`].
#[no_mangle]
pub unsafe extern "C" fn ptlab_run_protocol(
    n_bits: u32,
    a: u32,
    b: u32,
    out: *mut *mut PtlabGrid,
) -> PtlabStatus {
    guard(|| {
        let q = Question::unchecked(Vertex::new(a), Vertex::new(b), n_bits)?;
        let grid = Box::new(PtlabGrid(run_protocol(&q)?));
        unsafe { write_out(out, "out", Box::into_raw(grid)) }
    })
}

/// # Safety
/// `grid` must be NULL or a live handle from [`ptlab_run_protocol`].
#[no_mangle]
pub unsafe extern "C" fn ptlab_grid_dim(grid: *const PtlabGrid) -> u32 {
    // SAFETY: caller contract.
    unsafe { grid.as_ref() }.map_or(0, |g| g.0.dim() as u32)
}

/// # Safety
/// `grid` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ptlab_grid_probability(
    grid: *const PtlabGrid,
    j_a: u32,
    j_b: u32,
    out: *mut f64,
) -> PtlabStatus {
    guard(|| {
        // SAFETY: caller contract.
        let grid = unsafe { grid.as_ref() }.ok_or(Failure::Null("grid"))?;
        let n = grid.0.dim();
        if j_a as usize >= n || j_b as usize >= n {
            return Err(Error::InvalidArgument(format!("outcome ({j_a}, {j_b}) outside {n}x{n}")).into());
        }
        unsafe { write_out(out, "out", grid.0.get(j_a as usize, j_b as usize)) }
    })
}

/// `Pr[c_A = c_B]` from the simulated grid; NaN for a NULL handle.
///
/// # Safety
/// `grid` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ptlab_grid_collision(grid: *const PtlabGrid) -> f64 {
    // SAFETY: caller contract.
    unsafe { grid.as_ref() }.map_or(f64::NAN, |g| g.0.diagonal_sum())
}

/// # Safety
/// `grid` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ptlab_grid_free(grid: *mut PtlabGrid) {
    if !grid.is_null() {
        // SAFETY: allocated by Box::into_raw in ptlab_run_protocol.
        drop(unsafe { Box::from_raw(grid) });
    }
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ptlab_sample_round(
    n_bits: u32,
    a: u32,
    b: u32,
    seed: u64,
    out: *mut PtlabRound,
) -> PtlabStatus {
    guard(|| {
        let q = Question::unchecked(Vertex::new(a), Vertex::new(b), n_bits)?;
        let r = sample_round(&q, seed)?;
        let round = PtlabRound {
            c_a: r.c_a as u32,
            c_b: r.c_b as u32,
            win: r.win,
        };
        unsafe { write_out(out, "out", round) }
    })
}

/// Verifies the entangled strategy on `G_N`. `jobs = 0` uses every core.
/// `allow_large_exact` permits exhaustive exact mode at `N = 16`.
///
/// # Safety
/// `out` must be valid for writes; release the report with
/// [`ptlab_report_free`].
#[no_mangle]
pub unsafe extern "C" fn ptlab_verify(
    n_bits: u32,
    mode: PtlabMode,
    sample: u64,
    seed: u64,
    jobs: u32,
    allow_large_exact: bool,
    out: *mut *mut PtlabReport,
) -> PtlabStatus {
    guard(|| {
        let opts = VerifyOptions {
            mode: match mode {
                PtlabMode::Exact => Mode::Exact,
                PtlabMode::Simulated => Mode::Simulated,
            },
            sample,
            seed,
            jobs: (jobs > 0).then_some(jobs as usize),
            allow_large_exact,
        };
        let report = Box::new(PtlabReport(verify_exhaustive(n_bits, &opts)?));
        unsafe { write_out(out, "out", Box::into_raw(report)) }
    })
}

/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ptlab_report_questions_checked(report: *const PtlabReport) -> u64 {
    unsafe { report.as_ref() }.map_or(0, |r| r.0.questions_checked)
}

/// Failure count; `u64::MAX` for a NULL handle.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ptlab_report_failures(report: *const PtlabReport) -> u64 {
    unsafe { report.as_ref() }.map_or(u64::MAX, |r| r.0.failures)
}

/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ptlab_report_max_leak(report: *const PtlabReport) -> f64 {
    unsafe { report.as_ref() }.map_or(f64::NAN, |r| r.0.max_diagonal_leak)
}

/// JSON rendering, or NULL for a NULL handle.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ptlab_report_to_json(report: *const PtlabReport) -> *mut c_char {
    match unsafe { report.as_ref() } {
        Some(r) => into_c_string(ptlab::report::to_json(&r.0).unwrap_or_default()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `report` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ptlab_report_free(report: *mut PtlabReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

/// Builds a pseudo-telepathy certificate for `c = N`. When the quantum side
/// is sampled, `sample` and `seed` control the draw; `jobs = 0` uses every
/// core.
///
/// # Safety
/// `out` must be valid for writes; release with [`ptlab_certificate_free`].
#[no_mangle]
pub unsafe extern "C" fn ptlab_certificate(
    n_bits: u32,
    use_subgraph: bool,
    sample: u64,
    seed: u64,
    jobs: u32,
    out: *mut *mut PtlabCertificate,
) -> PtlabStatus {
    guard(|| {
        let opts = CertificateOptions {
            use_subgraph,
            sampled: VerifyOptions {
                mode: Mode::Simulated,
                sample,
                seed,
                jobs: (jobs > 0).then_some(jobs as usize),
                allow_large_exact: false,
            },
        };
        let cert = Box::new(PtlabCertificate(pseudo_telepathy_certificate(n_bits, &opts)?));
        unsafe { write_out(out, "out", Box::into_raw(cert)) }
    })
}

/// # Safety
/// `cert` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ptlab_certificate_verdict(cert: *const PtlabCertificate) -> bool {
    unsafe { cert.as_ref() }.is_some_and(|c| c.0.verdict)
}

/// # Safety
/// `cert` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ptlab_certificate_chi_lower_bound(cert: *const PtlabCertificate) -> u64 {
    unsafe { cert.as_ref() }.map_or(0, |c| c.0.chi_lower_bound)
}

/// # Safety
/// `cert` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ptlab_certificate_to_json(cert: *const PtlabCertificate) -> *mut c_char {
    match unsafe { cert.as_ref() } {
        Some(c) => into_c_string(ptlab::report::to_json(&c.0).unwrap_or_default()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `cert` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ptlab_certificate_free(cert: *mut PtlabCertificate) {
    if !cert.is_null() {
        drop(unsafe { Box::from_raw(cert) });
    }
}

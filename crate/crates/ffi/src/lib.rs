//! C ABI over `fogran-core`.
//!
//! Topologies and schedules cross the boundary as opaque handles created by
//! `*_new`/`*_build` and released by the matching `*_free`. Every fallible
//! function returns a [`FogranStatus`]; on failure a description is available
//! from [`fogran_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fogran::analysis;
use fogran::rational::{Ndt, Rational};
use fogran::validator::{check_collisions, check_completeness, measure, simulate_delivery, NdtReport};
use fogran::{build_placement, build_schedule, DemandVector, Error, PrimeField, Schedule, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FogranStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    ValidationFailed = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Opaque network handle.
pub struct FogranTopology(Topology);

/// Opaque schedule handle.
pub struct FogranSchedule(Schedule);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FogranRational {
    pub num: i64,
    pub den: i64,
}

/// `value` is meaningless when `infinite` is set.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FogranNdt {
    pub infinite: bool,
    pub value: FogranRational,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FogranNdtReport {
    pub slots: usize,
    pub deliveries: usize,
    pub sum_dof: FogranRational,
    pub ndt_exact: FogranRational,
    pub ndt_bound: FogranRational,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FogranTransmission {
    pub slot: usize,
    pub stage: usize,
    pub phase: u8,
    pub en: usize,
    pub user: usize,
    pub file_id: usize,
    pub tau: usize,
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

fn status_of(err: &Error) -> FogranStatus {
    match err {
        Error::Unsupported(_) => FogranStatus::Unsupported,
        _ => FogranStatus::InvalidArgument,
    }
}

fn fail(status: FogranStatus, msg: impl Into<String>) -> FogranStatus {
    set_error(msg);
    status
}

fn from_error(err: Error) -> FogranStatus {
    fail(status_of(&err), err.to_string())
}

/// Runs `body`, turning panics into [`FogranStatus::Panic`].
fn guarded(body: impl FnOnce() -> FogranStatus) -> FogranStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(FogranStatus::Panic, "internal panic"),
    }
}

fn to_c(r: &Rational) -> FogranRational {
    FogranRational { num: *r.numer(), den: *r.denom() }
}

fn from_c(r: FogranRational) -> Result<Rational, FogranStatus> {
    if r.den == 0 {
        return Err(fail(FogranStatus::InvalidArgument, "zero denominator"));
    }
    Ok(Rational::new(r.num, r.den))
}

fn ndt_to_c(n: Ndt) -> FogranNdt {
    match n {
        Ndt::Finite(v) => FogranNdt { infinite: false, value: to_c(&v) },
        Ndt::Infinite => FogranNdt { infinite: true, value: FogranRational { num: 0, den: 1 } },
    }
}

fn report_to_c(r: &NdtReport) -> FogranNdtReport {
    FogranNdtReport {
        slots: r.slots,
        deliveries: r.deliveries,
        sum_dof: to_c(&r.sum_dof),
        ndt_exact: to_c(&r.ndt_exact),
        ndt_bound: to_c(&r.ndt_bound),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(FogranStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn fogran_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn fogran_topology_new(k: usize, d: usize, out: *mut *mut FogranTopology) -> FogranStatus {
    guarded(|| {
        non_null!(out);
        match Topology::new(k, d) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(FogranTopology(t)));
                FogranStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `topology` must be null or a handle from [`fogran_topology_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fogran_topology_free(topology: *mut FogranTopology) {
    if !topology.is_null() {
        drop(Box::from_raw(topology));
    }
}

unsafe fn write_indices(
    values: fogran::Result<Vec<usize>>,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> FogranStatus {
    match values {
        Ok(v) => {
            *len = v.len();
            if v.len() > cap {
                return fail(FogranStatus::BufferTooSmall, format!("need room for {} indices", v.len()));
            }
            if !v.is_empty() {
                non_null!(buf);
                ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
            }
            FogranStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Users reached by EN `en`. Writes up to `cap` indices into `buf` and the
/// full count into `len`.
///
/// # Safety
/// `topology` must be a live handle, `len` writable, and `buf` valid for
/// `cap` elements.
#[no_mangle]
pub unsafe extern "C" fn fogran_topology_receivers(
    topology: *const FogranTopology,
    en: usize,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> FogranStatus {
    guarded(|| {
        non_null!(topology, len);
        write_indices((*topology).0.receivers(en), buf, cap, len)
    })
}

/// ENs heard by user `user`; same buffer contract as [`fogran_topology_receivers`].
///
/// # Safety
/// As for [`fogran_topology_receivers`].
#[no_mangle]
pub unsafe extern "C" fn fogran_topology_transmitters(
    topology: *const FogranTopology,
    user: usize,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> FogranStatus {
    guarded(|| {
        non_null!(topology, len);
        write_indices((*topology).0.transmitters(user), buf, cap, len)
    })
}

/// Builds the delivery schedule. `demands` holds `K` 1-based file ids, or may
/// be null to use the canonical demands `((j - 1) mod n_files) + 1`.
///
/// # Safety
/// `topology` must be a live handle, `demands` null or valid for
/// `demands_len` elements, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fogran_schedule_build(
    topology: *const FogranTopology,
    demands: *const usize,
    demands_len: usize,
    n_files: usize,
    out: *mut *mut FogranSchedule,
) -> FogranStatus {
    guarded(|| {
        non_null!(topology, out);
        let t = &(*topology).0;
        let dv = if demands.is_null() {
            DemandVector::canonical(t.k(), n_files)
        } else {
            DemandVector::new(std::slice::from_raw_parts(demands, demands_len).to_vec(), n_files)
        };
        match dv.and_then(|dv| build_schedule(t, &dv)) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(FogranSchedule(s)));
                FogranStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `schedule` must be null or a handle from [`fogran_schedule_build`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fogran_schedule_free(schedule: *mut FogranSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

/// # Safety
/// `schedule` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fogran_schedule_slot_count(schedule: *const FogranSchedule, out: *mut usize) -> FogranStatus {
    guarded(|| {
        non_null!(schedule, out);
        *out = (*schedule).0.slots.len();
        FogranStatus::Ok
    })
}

/// Total number of transmissions over all slots.
///
/// # Safety
/// `schedule` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fogran_schedule_transmission_count(
    schedule: *const FogranSchedule,
    out: *mut usize,
) -> FogranStatus {
    guarded(|| {
        non_null!(schedule, out);
        *out = (*schedule).0.deliveries();
        FogranStatus::Ok
    })
}

/// The `index`-th transmission (0-based) in dump order.
///
/// # Safety
/// `schedule` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fogran_schedule_transmission(
    schedule: *const FogranSchedule,
    index: usize,
    out: *mut FogranTransmission,
) -> FogranStatus {
    guarded(|| {
        non_null!(schedule, out);
        let Some((slot, tx)) = (*schedule).0.transmissions().nth(index) else {
            return fail(FogranStatus::InvalidArgument, format!("transmission {index} out of range"));
        };
        *out = FogranTransmission {
            slot: slot.time,
            stage: slot.stage,
            phase: slot.phase,
            en: tx.en,
            user: tx.user,
            file_id: tx.file_id,
            tau: tx.tau,
        };
        FogranStatus::Ok
    })
}

/// The line-oriented schedule dump as a newly allocated string; release it
/// with [`fogran_string_free`].
///
/// # Safety
/// `schedule` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fogran_schedule_dump(schedule: *const FogranSchedule, out: *mut *mut c_char) -> FogranStatus {
    guarded(|| {
        non_null!(schedule, out);
        match CString::new((*schedule).0.dump()) {
            Ok(s) => {
                *out = s.into_raw();
                FogranStatus::Ok
            }
            Err(_) => fail(FogranStatus::Panic, "dump contained a NUL byte"),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fogran_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Collision and completeness checks; `ValidationFailed` with the first
/// problem as the error message otherwise.
///
/// # Safety
/// `schedule` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fogran_schedule_validate(schedule: *const FogranSchedule) -> FogranStatus {
    guarded(|| {
        non_null!(schedule);
        let s = &(*schedule).0;
        if let Err(v) = check_collisions(&s.topology, s) {
            return fail(FogranStatus::ValidationFailed, v[0].to_string());
        }
        if let Err(v) = check_completeness(&s.topology, s) {
            return fail(
                FogranStatus::ValidationFailed,
                format!("user {} is missing types {:?}", v[0].user, v[0].missing),
            );
        }
        FogranStatus::Ok
    })
}

/// # Safety
/// `schedule` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fogran_schedule_measure(
    schedule: *const FogranSchedule,
    out: *mut FogranNdtReport,
) -> FogranStatus {
    guarded(|| {
        non_null!(schedule, out);
        let s = &(*schedule).0;
        *out = report_to_c(&measure(&s.topology, s));
        FogranStatus::Ok
    })
}

/// Random library of `n_files` files of `file_bytes` bytes seeded by `seed`,
/// random demands, full encode/deliver/decode pipeline. Returns
/// `ValidationFailed` if any user fails to recover its file.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fogran_simulate(
    k: usize,
    d: usize,
    n_files: usize,
    file_bytes: usize,
    seed: u64,
    out: *mut FogranNdtReport,
) -> FogranStatus {
    guarded(|| {
        non_null!(out);
        let run = || -> Result<FogranNdtReport, FogranStatus> {
            let t = Topology::new(k, d).map_err(from_error)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lib = fogran::cli::random_library(n_files, file_bytes, &mut rng).map_err(from_error)?;
            let demands: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=n_files)).collect();
            let demands = DemandVector::new(demands, n_files).map_err(from_error)?;
            let scheme = build_placement(&t, PrimeField::default()).map_err(from_error)?;
            let sched = build_schedule(&t, &demands).map_err(from_error)?;
            simulate_delivery(&t, &scheme, &lib, &demands, &sched)
                .map_err(|e| fail(FogranStatus::ValidationFailed, e.to_string()))?;
            Ok(report_to_c(&measure(&t, &sched)))
        };
        match run() {
            Ok(r) => {
                *out = r;
                FogranStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fogran_prop1_bound(d: usize, out: *mut FogranRational) -> FogranStatus {
    guarded(|| {
        non_null!(out);
        match analysis::prop1_bound(d) {
            Ok(v) => {
                *out = to_c(&v);
                FogranStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

unsafe fn eval_ndt(
    mu: FogranRational,
    r: FogranRational,
    d: usize,
    out: *mut FogranNdt,
    f: fn(Rational, Rational, usize) -> fogran::Result<Ndt>,
) -> FogranStatus {
    non_null!(out);
    let (mu, r) = match (from_c(mu), from_c(r)) {
        (Ok(mu), Ok(r)) => (mu, r),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    match f(mu, r, d) {
        Ok(v) => {
            *out = ndt_to_c(v);
            FogranStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// End-to-end NDT of the coded scheme.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fogran_delta_ach(
    mu: FogranRational,
    r: FogranRational,
    d: usize,
    out: *mut FogranNdt,
) -> FogranStatus {
    guarded(|| eval_ndt(mu, r, d, out, analysis::delta_ach))
}

/// End-to-end NDT of the full-caching benchmark.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fogran_delta_full(
    mu: FogranRational,
    r: FogranRational,
    d: usize,
    out: *mut FogranNdt,
) -> FogranStatus {
    guarded(|| eval_ndt(mu, r, d, out, analysis::delta_full))
}

//! C ABI over the cvqkd rate calculator.
//!
//! The surface follows the usual C conventions: every function returns a
//! status code, results land in out-pointers, and sweep results live
//! behind an opaque handle freed with [`cvqkd_sweep_free`]. All
//! computations run under the default conventions (excess noise adds
//! variance; mutual information uses the V = 1 + V_A numerator) and the
//! default photon-number cutoff.
//!
//! The matching header is `include/cvqkd.h`, maintained by hand in
//! cbindgen layout.

use std::ffi::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cvqkd::analysis::{optimize_alpha, sweep_distance, SweepSpec};
use cvqkd::channel::{ChannelParams, DetectionParams};
use cvqkd::error::Error;
use cvqkd::fock::Truncation;
use cvqkd::keyrate::{key_rate, Conventions, RatePoint};
use cvqkd::modulation::{ModulationEnsemble, StateFamily};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvqkdStatus {
    /// Success.
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// A parameter was out of range or non-finite.
    InvalidArgument = 2,
    /// The key rate is nonpositive over the whole search interval.
    NoSecurePoint = 3,
    /// Internal numerical failure.
    Numerical = 4,
}

/// One evaluated operating point.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CvqkdRatePoint {
    pub distance_km: f64,
    pub transmissivity: f64,
    pub excess_noise: f64,
    pub alpha: f64,
    pub v_a: f64,
    pub z: f64,
    pub v_a_given_b: f64,
    pub i_ab_bits: f64,
    pub s_be_bits: f64,
    pub key_rate_bits: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
}

impl From<&RatePoint> for CvqkdRatePoint {
    fn from(p: &RatePoint) -> Self {
        CvqkdRatePoint {
            distance_km: p.distance_km().unwrap_or(f64::NAN),
            transmissivity: p.channel.transmissivity(),
            excess_noise: p.channel.excess_noise(),
            alpha: p.alpha,
            v_a: p.v_a,
            z: p.z,
            v_a_given_b: p.v_a_given_b,
            i_ab_bits: p.i_ab,
            s_be_bits: p.s_be,
            key_rate_bits: p.key_rate,
            nu1: p.nu1,
            nu2: p.nu2,
            nu3: p.nu3,
        }
    }
}

/// Opaque sweep result.
pub struct CvqkdSweep {
    points: Vec<CvqkdRatePoint>,
    cutoff_positive_km: Option<f64>,
    cutoff_kmin_km: Option<f64>,
}

fn family_from(protocol: c_int) -> Option<StateFamily> {
    match protocol {
        0 => Some(StateFamily::Pascs),
        1 => Some(StateFamily::Coherent),
        _ => None,
    }
}

fn status_from(e: &Error) -> CvqkdStatus {
    match e {
        Error::NoSecureOperatingPoint => CvqkdStatus::NoSecurePoint,
        Error::InvalidParam(_) | Error::NonFinite(_) => CvqkdStatus::InvalidArgument,
        _ => CvqkdStatus::Numerical,
    }
}

fn guarded(body: impl FnOnce() -> CvqkdStatus) -> CvqkdStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(CvqkdStatus::Numerical)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cvqkd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Evaluates the secret key rate of a four-state protocol at one
/// operating point.
///
/// `protocol` is 0 for PASCS signals, 1 for coherent signals.
///
/// # Safety
/// `out` must point to writable memory for one [`CvqkdRatePoint`].
#[no_mangle]
pub unsafe extern "C" fn cvqkd_key_rate(
    protocol: c_int,
    alpha: f64,
    distance_km: f64,
    loss_db_per_km: f64,
    xi: f64,
    beta: f64,
    eta_det: f64,
    out: *mut CvqkdRatePoint,
) -> CvqkdStatus {
    if out.is_null() {
        return CvqkdStatus::NullPointer;
    }
    guarded(|| {
        let Some(family) = family_from(protocol) else {
            return CvqkdStatus::InvalidArgument;
        };
        let result = (|| -> Result<RatePoint, Error> {
            let ensemble = ModulationEnsemble::new(family, alpha, 4, Truncation::default())?;
            let channel = ChannelParams::from_fiber(distance_km, loss_db_per_km, xi)?;
            let detection = DetectionParams::new(beta, eta_det)?;
            key_rate(&ensemble, &channel, &detection, Conventions::default())
        })();
        match result {
            Ok(point) => {
                unsafe { out.write(CvqkdRatePoint::from(&point)) };
                CvqkdStatus::Ok
            }
            Err(e) => status_from(&e),
        }
    })
}

/// Finds the amplitude maximizing the key rate on `[alpha_lo, alpha_hi]`.
///
/// # Safety
/// `out_alpha` and `out_key_rate` must point to writable `f64`s.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_optimize_alpha(
    protocol: c_int,
    distance_km: f64,
    loss_db_per_km: f64,
    xi: f64,
    beta: f64,
    eta_det: f64,
    alpha_lo: f64,
    alpha_hi: f64,
    tol: f64,
    out_alpha: *mut f64,
    out_key_rate: *mut f64,
) -> CvqkdStatus {
    if out_alpha.is_null() || out_key_rate.is_null() {
        return CvqkdStatus::NullPointer;
    }
    guarded(|| {
        let Some(family) = family_from(protocol) else {
            return CvqkdStatus::InvalidArgument;
        };
        let result = (|| -> Result<_, Error> {
            let channel = ChannelParams::from_fiber(distance_km, loss_db_per_km, xi)?;
            let detection = DetectionParams::new(beta, eta_det)?;
            optimize_alpha(
                family,
                4,
                &channel,
                &detection,
                Conventions::default(),
                Truncation::default(),
                (alpha_lo, alpha_hi),
                tol,
            )
        })();
        match result {
            Ok(opt) => {
                unsafe {
                    out_alpha.write(opt.alpha);
                    out_key_rate.write(opt.key_rate);
                }
                CvqkdStatus::Ok
            }
            Err(e) => status_from(&e),
        }
    })
}

/// Sweeps the key rate over a distance grid at fixed excess noise and
/// hands back an opaque result. Free it with [`cvqkd_sweep_free`].
///
/// # Safety
/// `out` must point to a writable `*mut CvqkdSweep` slot.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_sweep_new(
    protocol: c_int,
    alpha: f64,
    start_km: f64,
    stop_km: f64,
    step_km: f64,
    loss_db_per_km: f64,
    xi: f64,
    beta: f64,
    eta_det: f64,
    k_min: f64,
    out: *mut *mut CvqkdSweep,
) -> CvqkdStatus {
    if out.is_null() {
        return CvqkdStatus::NullPointer;
    }
    guarded(|| {
        let Some(family) = family_from(protocol) else {
            return CvqkdStatus::InvalidArgument;
        };
        let mut spec = SweepSpec::new(family, alpha);
        spec.distance_start_km = start_km;
        spec.distance_stop_km = stop_km;
        spec.distance_step_km = step_km;
        spec.loss_db_per_km = loss_db_per_km;
        spec.excess_noise_values = vec![xi];
        spec.reconciliation_efficiency = beta;
        spec.detector_efficiency = eta_det;
        spec.k_min = k_min;
        match sweep_distance(&spec) {
            Ok(result) => {
                let curve = &result.curves[0];
                if curve.diagnostic.is_some() {
                    return CvqkdStatus::Numerical;
                }
                let sweep = Box::new(CvqkdSweep {
                    points: curve.points.iter().map(CvqkdRatePoint::from).collect(),
                    cutoff_positive_km: curve.cutoff_positive_km,
                    cutoff_kmin_km: curve.cutoff_kmin_km,
                });
                unsafe { out.write(Box::into_raw(sweep)) };
                CvqkdStatus::Ok
            }
            Err(e) => status_from(&e),
        }
    })
}

/// Number of points in a sweep.
///
/// # Safety
/// `sweep` must be a live handle from [`cvqkd_sweep_new`] or null.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_sweep_point_count(sweep: *const CvqkdSweep) -> usize {
    if sweep.is_null() {
        return 0;
    }
    unsafe { (*sweep).points.len() }
}

/// Copies point `index` of the sweep into `out`.
///
/// # Safety
/// `sweep` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_sweep_point(
    sweep: *const CvqkdSweep,
    index: usize,
    out: *mut CvqkdRatePoint,
) -> CvqkdStatus {
    if sweep.is_null() || out.is_null() {
        return CvqkdStatus::NullPointer;
    }
    let points = unsafe { &(*sweep).points };
    match points.get(index) {
        Some(p) => {
            unsafe { out.write(*p) };
            CvqkdStatus::Ok
        }
        None => CvqkdStatus::InvalidArgument,
    }
}

/// Cutoff distance of the sweep under `rule` (0: last distance with
/// K > 0 before the first crossing; 1: same for K ≥ k_min). Writes −1.0
/// when the curve starts below the rule.
///
/// # Safety
/// `sweep` must be a live handle; `out_km` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_sweep_cutoff_km(
    sweep: *const CvqkdSweep,
    rule: c_int,
    out_km: *mut f64,
) -> CvqkdStatus {
    if sweep.is_null() || out_km.is_null() {
        return CvqkdStatus::NullPointer;
    }
    let sweep = unsafe { &*sweep };
    let cutoff = match rule {
        0 => sweep.cutoff_positive_km,
        1 => sweep.cutoff_kmin_km,
        _ => return CvqkdStatus::InvalidArgument,
    };
    unsafe { out_km.write(cutoff.unwrap_or(-1.0)) };
    CvqkdStatus::Ok
}

/// Frees a sweep handle. Null is a no-op.
///
/// # Safety
/// `sweep` must come from [`cvqkd_sweep_new`] and must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn cvqkd_sweep_free(sweep: *mut CvqkdSweep) {
    if !sweep.is_null() {
        drop(unsafe { Box::from_raw(sweep) });
    }
}

/// Runs the cross-path consistency battery under default conventions.
#[no_mangle]
pub extern "C" fn cvqkd_selftest() -> CvqkdStatus {
    guarded(|| {
        let checks = cvqkd::selftest::run(Conventions::default(), Truncation::default());
        if cvqkd::selftest::all_passed(&checks) {
            CvqkdStatus::Ok
        } else {
            CvqkdStatus::Numerical
        }
    })
}

//! C interface to the radperc engines.
//!
//! Every function returns a [`RadpercStatus`]. On failure the message is
//! kept per thread and read back with [`radperc_last_error`]. Handles are
//! opaque and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use radperc::analysis::{fit_power_law, mean_field};
use radperc::dp::{branching_probs, InitialCondition, QuditDim};
use radperc::observables::{finalize, Curves};
use radperc::rng::{stream, Stream};
use radperc::runner::dp_ensemble;
use radperc::stabilizer::{GeneratorSet, InitCase, Region};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadpercStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    Failed = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

/// Message of the last failed call on this thread, empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn radperc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

type Call = Result<(), (RadpercStatus, String)>;

fn guard(f: impl FnOnce() -> Call) -> RadpercStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RadpercStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside radperc");
            RadpercStatus::Panic
        }
    }
}

fn invalid(e: radperc::Error) -> (RadpercStatus, String) {
    (RadpercStatus::InvalidArgument, e.to_string())
}

fn null(name: &str) -> (RadpercStatus, String) {
    (RadpercStatus::NullPointer, format!("{name} is null"))
}

fn qudit(q: u32) -> Result<QuditDim, (RadpercStatus, String)> {
    if q == 0 {
        Ok(QuditDim::Infinite)
    } else {
        QuditDim::Finite(q).validate().map_err(invalid)
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct RadpercBranching {
    pub p_both: f64,
    pub p_left: f64,
    pub p_right: f64,
    pub p_none: f64,
}

/// Vertex outcome probabilities. `q = 0` selects the bond limit.
#[no_mangle]
pub extern "C" fn radperc_branching_probs(
    q: u32,
    p: f64,
    out: *mut RadpercBranching,
) -> RadpercStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let b = branching_probs(qudit(q)?, p).map_err(invalid)?;
        *out = RadpercBranching {
            p_both: b.p_both,
            p_left: b.p_left,
            p_right: b.p_right,
            p_none: b.p_none,
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct RadpercMeanField {
    pub rho_e: f64,
    pub rho_v: f64,
    pub p_r: f64,
    pub p_l: f64,
    pub p_d: f64,
    pub v_b: f64,
    pub p_c_mf: f64,
}

/// Mean-field densities and butterfly velocity; `q` may be `INFINITY`.
#[no_mangle]
pub extern "C" fn radperc_mean_field(q: f64, p: f64, out: *mut RadpercMeanField) -> RadpercStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let m = mean_field(q, p).map_err(invalid)?;
        *out = RadpercMeanField {
            rho_e: m.rho_e,
            rho_v: m.rho_v,
            p_r: m.p_r,
            p_l: m.p_l,
            p_d: m.p_d,
            v_b: m.v_b,
            p_c_mf: m.p_c_mf,
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct RadpercFit {
    pub exponent: f64,
    pub exponent_err: f64,
    pub amplitude: f64,
    pub goodness: f64,
    pub points: usize,
}

/// Power-law fit `y ~ A t^e` over `lo <= t <= hi`.
///
/// # Safety
/// `t` and `y` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn radperc_fit_power_law(
    t: *const f64,
    y: *const f64,
    len: usize,
    lo: f64,
    hi: f64,
    out: *mut RadpercFit,
) -> RadpercStatus {
    guard(|| {
        if t.is_null() || y.is_null() {
            return Err(null("t or y"));
        }
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let (t, y) = unsafe {
            (
                std::slice::from_raw_parts(t, len),
                std::slice::from_raw_parts(y, len),
            )
        };
        let f = fit_power_law(t, y, lo, hi).map_err(|e| (RadpercStatus::Failed, e.to_string()))?;
        *out = RadpercFit {
            exponent: f.exponent,
            exponent_err: f.exponent_err,
            amplitude: f.amplitude,
            goodness: f.goodness,
            points: f.points,
        };
        Ok(())
    })
}

/// Ensemble-averaged particle-process curves.
pub struct RadpercCurves(Curves);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadpercColumn {
    Rho = 0,
    RhoSem = 1,
    Survival = 2,
    SurvivalSem = 3,
    R2 = 4,
    R2Sem = 5,
    Front = 6,
    FrontStd = 7,
}

/// Runs `n_traj` trajectories on `n` sites for `depth` steps from a block
/// of `block` particles at the origin (`q = 0` is the bond limit).
///
/// # Safety
/// `out` must be writable; the handle it receives is freed with
/// [`radperc_curves_free`].
#[no_mangle]
pub unsafe extern "C" fn radperc_dp_run(
    q: u32,
    p: f64,
    n: usize,
    depth: usize,
    n_traj: u64,
    seed: u64,
    block: usize,
    out: *mut *mut RadpercCurves,
) -> RadpercStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let params = branching_probs(qudit(q)?, p).map_err(invalid)?;
        let init = match block {
            1 => InitialCondition::SingleSite(0),
            k => InitialCondition::Block { k, origin: 0 },
        };
        let acc = dp_ensemble(&params, &init, n, depth, n_traj, seed, &[]).map_err(invalid)?;
        let curves = finalize(&acc, 1.0).map_err(|e| (RadpercStatus::Failed, e.to_string()))?;
        *out = Box::into_raw(Box::new(RadpercCurves(curves)));
        Ok(())
    })
}

/// Number of time points (`depth + 1`).
///
/// # Safety
/// `curves` must come from [`radperc_dp_run`].
#[no_mangle]
pub unsafe extern "C" fn radperc_curves_len(
    curves: *const RadpercCurves,
    out: *mut usize,
) -> RadpercStatus {
    guard(|| {
        let c = unsafe { curves.as_ref() }.ok_or_else(|| null("curves"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = c.0.t.len();
        Ok(())
    })
}

/// Copies one column (a [`RadpercColumn`] value) into `buf`, which must hold at least
/// [`radperc_curves_len`] values.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn radperc_curves_copy(
    curves: *const RadpercCurves,
    column: u32,
    buf: *mut f64,
    len: usize,
) -> RadpercStatus {
    guard(|| {
        let c = &unsafe { curves.as_ref() }.ok_or_else(|| null("curves"))?.0;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let src = match column {
            0 => &c.rho,
            1 => &c.rho_sem,
            2 => &c.surv,
            3 => &c.surv_sem,
            4 => &c.r2,
            5 => &c.r2_sem,
            6 => &c.front,
            7 => &c.front_std,
            other => {
                return Err((
                    RadpercStatus::InvalidArgument,
                    format!("unknown column {other}"),
                ))
            }
        };
        if len < src.len() {
            return Err((
                RadpercStatus::BufferTooSmall,
                format!("need {} values, got {len}", src.len()),
            ));
        }
        unsafe { std::slice::from_raw_parts_mut(buf, src.len()) }.copy_from_slice(src);
        Ok(())
    })
}

/// # Safety
/// `curves` must come from [`radperc_dp_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn radperc_curves_free(curves: *mut RadpercCurves) {
    if !curves.is_null() {
        drop(unsafe { Box::from_raw(curves) });
    }
}

/// Stabilizer state of system, reference and environment, with its own
/// random stream.
pub struct RadpercState {
    gens: GeneratorSet,
    rng: Stream,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadpercRegion {
    A = 0,
    S = 1,
    AS = 2,
    E = 3,
    AE = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct RadpercInfo {
    pub h_a: i64,
    pub h_s: i64,
    pub h_as: i64,
    pub h_e: i64,
    pub h_ae: i64,
    pub ic_e: i64,
    pub ic_s: i64,
    pub fidelity: f64,
    /// NaN unless the global state is pure (case 3).
    pub p_succ: f64,
    pub f_pure: f64,
}

/// New state with `k` reference qubits entangled to the first `k` of `n`
/// system qubits. `init_case` is 1, 2 or 3.
///
/// # Safety
/// `out` must be writable; free the handle with [`radperc_state_free`].
#[no_mangle]
pub unsafe extern "C" fn radperc_state_new(
    init_case: u32,
    n: usize,
    k: usize,
    seed: u64,
    out: *mut *mut RadpercState,
) -> RadpercStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let case = match init_case {
            1 => InitCase::MixedS2MixedE,
            2 => InitCase::PureS2MixedE,
            3 => InitCase::PureAll,
            other => {
                return Err((
                    RadpercStatus::InvalidArgument,
                    format!("unknown initial case {other}"),
                ))
            }
        };
        let gens = GeneratorSet::init(case, n, k).map_err(invalid)?;
        *out = Box::into_raw(Box::new(RadpercState {
            gens,
            rng: stream(seed, 0),
        }));
        Ok(())
    })
}

/// Advances by `steps` time units at swap rate `p`.
///
/// # Safety
/// `state` must come from [`radperc_state_new`].
#[no_mangle]
pub unsafe extern "C" fn radperc_state_step(
    state: *mut RadpercState,
    p: f64,
    steps: usize,
) -> RadpercStatus {
    guard(|| {
        let s = unsafe { state.as_mut() }.ok_or_else(|| null("state"))?;
        for _ in 0..steps {
            s.gens.step(p, &mut s.rng).map_err(invalid)?;
        }
        Ok(())
    })
}

/// Entropy in bits of a region given as a [`RadpercRegion`] value.
///
/// # Safety
/// `state` must come from [`radperc_state_new`].
#[no_mangle]
pub unsafe extern "C" fn radperc_state_entropy(
    state: *const RadpercState,
    region: u32,
    out: *mut i64,
) -> RadpercStatus {
    guard(|| {
        let s = unsafe { state.as_ref() }.ok_or_else(|| null("state"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let region = match region {
            0 => Region::A,
            1 => Region::S,
            2 => Region::AS,
            3 => Region::E,
            4 => Region::AE,
            other => {
                return Err((
                    RadpercStatus::InvalidArgument,
                    format!("unknown region {other}"),
                ))
            }
        };
        *out = s.gens.entropy(region);
        Ok(())
    })
}

/// # Safety
/// `state` must come from [`radperc_state_new`].
#[no_mangle]
pub unsafe extern "C" fn radperc_state_info(
    state: *const RadpercState,
    out: *mut RadpercInfo,
) -> RadpercStatus {
    guard(|| {
        let s = unsafe { state.as_ref() }.ok_or_else(|| null("state"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let i = s.gens.coherent_info();
        *out = RadpercInfo {
            h_a: i.h_a,
            h_s: i.h_s,
            h_as: i.h_as,
            h_e: i.h_e,
            h_ae: i.h_ae,
            ic_e: i.ic_e,
            ic_s: i.ic_s,
            fidelity: i.fidelity,
            p_succ: i.p_succ.unwrap_or(f64::NAN),
            f_pure: i.f_pure.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// # Safety
/// `state` must come from [`radperc_state_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn radperc_state_free(state: *mut RadpercState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

//! C ABI for the `xlmimo-ee` library.
//!
//! Objects cross the boundary as opaque handles created by `*_new` / `*_from_*`
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`XlmimoStatus`]; on failure the message is available from
//! [`xlmimo_last_error_message`] on the same thread until the next failing call.
//! Output pointers are written only on success.
//!
//! Antenna indices are 0-based. Masks are byte arrays with one entry per
//! antenna, non-zero meaning active.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xlmimo_ee::analytic::{build_umep, ee_analytic, optimal_ms_newton, validity_boundary, UmepModel};
use xlmimo_ee::experiment::config::{parse_document, resolve};
use xlmimo_ee::experiment::output::to_json;
use xlmimo_ee::experiment::{run_experiment, ExperimentSpec, Scenario};
use xlmimo_ee::geometry::{long_term_fading, place_users, ArrayGeometry};
use xlmimo_ee::rng::{substream, Purpose};
use xlmimo_ee::selection::{hrnp_select, select, EeObjective, Scheme};
use xlmimo_ee::{LongTermFadingMatrix, Precoder};

/// Result code of every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XlmimoStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Configuration text could not be parsed or violates a unit constraint.
    InvalidConfig = 3,
    /// An argument is out of range for the model or drop.
    InvalidArgument = 4,
    /// The numerical core rejected the request.
    ComputationFailed = 5,
    /// A caller-supplied buffer is too small.
    BufferTooSmall = 6,
    /// The library panicked; the handle involved should be freed.
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XlmimoPrecoder {
    Cb = 0,
    Zf = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XlmimoScheme {
    Hrnp = 0,
    LocalSearch = 1,
    Genetic = 2,
    Swarm = 3,
}

/// Analytic optimum of the active-antenna count.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct XlmimoOptimum {
    pub ms_star: usize,
    /// Last real-valued Newton iterate.
    pub root: f64,
    pub iterations: usize,
    pub flops: f64,
    /// Analytic EE at `ms_star` (bits/J).
    pub ee: f64,
    pub interval_lo: usize,
    pub interval_hi: usize,
}

/// Summary of one antenna-selection run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct XlmimoSelection {
    /// EE with the realized selection cost (bits/J).
    pub ee: f64,
    /// EE under the search-time cost convention (bits/J).
    pub raw_ee: f64,
    pub iterations: usize,
    pub flops_spent: f64,
    pub active: usize,
}

/// Scenario, power model and heuristic settings with the derived analytic model.
pub struct XlmimoModel {
    spec: ExperimentSpec,
    umep: UmepModel,
}

/// Path-gain matrix of one user drop, bound to the settings of its model.
pub struct XlmimoDrop {
    spec: ExperimentSpec,
    beta: LongTermFadingMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(XlmimoStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(XlmimoStatus::NullPointer, format!("`{what}` is null"))
    }

    fn core(e: xlmimo_ee::Error) -> Self {
        let status = match e {
            xlmimo_ee::Error::MsOutOfRange { .. }
            | xlmimo_ee::Error::InvalidActiveSet(_)
            | xlmimo_ee::Error::EmptyActiveSet
            | xlmimo_ee::Error::DimensionMismatch(_)
            | xlmimo_ee::Error::InvalidParameter(_) => XlmimoStatus::InvalidArgument,
            _ => XlmimoStatus::ComputationFailed,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: String) {
    let text = CString::new(msg.replace('\0', " ")).expect("interior NULs were replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> XlmimoStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => XlmimoStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            XlmimoStatus::Panic
        }
    }
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| Failure(XlmimoStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(what));
    }
    out.write(value);
    Ok(())
}

fn spec_from_json(json: &str) -> Result<ExperimentSpec, Failure> {
    let config = |e: xlmimo_ee::experiment::ConfigError| Failure(XlmimoStatus::InvalidConfig, e.to_string());
    let layer = parse_document(json).map_err(config)?;
    let spec = resolve(&[layer]).map_err(config)?;
    spec.validate().map_err(config)?;
    Ok(spec)
}

fn model_from_spec(spec: ExperimentSpec) -> Result<*mut XlmimoModel, Failure> {
    let umep = build_umep(&spec.scenario_cfg, &spec.power).map_err(Failure::core)?;
    Ok(Box::into_raw(Box::new(XlmimoModel { spec, umep })))
}

fn precoder(p: XlmimoPrecoder) -> Precoder {
    match p {
        XlmimoPrecoder::Cb => Precoder::Cb,
        XlmimoPrecoder::Zf => Precoder::Zf,
    }
}

fn scheme(s: XlmimoScheme) -> (Scheme, Purpose) {
    match s {
        XlmimoScheme::Hrnp => (Scheme::Hrnp, Purpose::LocalSearch),
        XlmimoScheme::LocalSearch => (Scheme::LocalSearch, Purpose::LocalSearch),
        XlmimoScheme::Genetic => (Scheme::Genetic, Purpose::Genetic),
        XlmimoScheme::Swarm => (Scheme::Swarm, Purpose::Swarm),
    }
}

unsafe fn mask_arg(mask: *const u8, len: usize, antennas: usize) -> Result<Vec<bool>, Failure> {
    if mask.is_null() {
        return Err(Failure::null("mask"));
    }
    if len != antennas {
        return Err(Failure(
            XlmimoStatus::InvalidArgument,
            format!("mask has {len} entries, drop has {antennas} antennas"),
        ));
    }
    Ok(std::slice::from_raw_parts(mask, len).iter().map(|&b| b != 0).collect())
}

/// Message of the last failure on this thread, or null if none occurred.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn xlmimo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a model with the reference deployment settings.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_model_new_default(out: *mut *mut XlmimoModel) -> XlmimoStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let handle = model_from_spec(ExperimentSpec::new(Scenario::Single))?;
        write(out, handle, "out")
    })
}

/// Creates a model from a flat JSON configuration object (same keys as the CLI
/// configuration file). Missing keys keep their defaults.
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_model_from_json(json: *const c_char, out: *mut *mut XlmimoModel) -> XlmimoStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let spec = spec_from_json(text(json, "json")?)?;
        let handle = model_from_spec(spec)?;
        write(out, handle, "out")
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_model_free(model: *mut XlmimoModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Newton-Raphson optimum of the active-antenna count under the analytic model.
///
/// # Safety
/// `model` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_model_optimal_ms(model: *const XlmimoModel, out: *mut XlmimoOptimum) -> XlmimoStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let sol = optimal_ms_newton(&model.umep, &model.spec.newton).map_err(Failure::core)?;
        let value = XlmimoOptimum {
            ms_star: sol.ms_star,
            root: sol.root,
            iterations: sol.iterations,
            flops: sol.flops,
            ee: sol.ee,
            interval_lo: sol.interval.0,
            interval_hi: sol.interval.1,
        };
        write(out, value, "out")
    })
}

/// Analytic EE (bits/J) at a real-valued active-antenna count.
///
/// # Safety
/// `model` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_model_ee_analytic(model: *const XlmimoModel, ms: f64, out: *mut f64) -> XlmimoStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let ee = ee_analytic(ms, &model.umep).map_err(Failure::core)?;
        write(out, ee, "out")
    })
}

/// Largest active-antenna count for which the analytic approximation holds.
///
/// # Safety
/// `model` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_model_validity_boundary(
    model: *const XlmimoModel,
    threshold: f64,
    out: *mut usize,
) -> XlmimoStatus {
    guard(|| {
        let model = deref(model, "model")?;
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(Failure(
                XlmimoStatus::InvalidArgument,
                format!("threshold must be positive and finite, got {threshold}"),
            ));
        }
        write(out, validity_boundary(&model.umep, threshold), "out")
    })
}

/// Draws user positions from `seed` and builds their path-gain matrix.
///
/// # Safety
/// `model` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_drop_new(model: *const XlmimoModel, seed: u64, out: *mut *mut XlmimoDrop) -> XlmimoStatus {
    guard(|| {
        let model = deref(model, "model")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let cfg = &model.spec.scenario_cfg;
        let beta = long_term_fading(&ArrayGeometry::new(cfg), &place_users(cfg, seed), cfg).map_err(Failure::core)?;
        let handle = Box::into_raw(Box::new(XlmimoDrop {
            spec: model.spec.clone(),
            beta,
        }));
        write(out, handle, "out")
    })
}

/// Builds a drop from an explicit row-major `antennas x users` path-gain matrix.
///
/// # Safety
/// `gains` must be null or point to `antennas * users` doubles; the other
/// pointers follow [`xlmimo_drop_new`].
#[no_mangle]
pub unsafe extern "C" fn xlmimo_drop_from_gains(
    model: *const XlmimoModel,
    gains: *const f64,
    antennas: usize,
    users: usize,
    out: *mut *mut XlmimoDrop,
) -> XlmimoStatus {
    guard(|| {
        let model = deref(model, "model")?;
        if gains.is_null() {
            return Err(Failure::null("gains"));
        }
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let len = antennas
            .checked_mul(users)
            .ok_or_else(|| Failure(XlmimoStatus::InvalidArgument, "matrix size overflows".into()))?;
        let data = std::slice::from_raw_parts(gains, len).to_vec();
        let beta = LongTermFadingMatrix::new(antennas, users, data).map_err(Failure::core)?;
        let mut spec = model.spec.clone();
        spec.scenario_cfg.m = antennas;
        spec.scenario_cfg.k = users;
        let handle = Box::into_raw(Box::new(XlmimoDrop { spec, beta }));
        write(out, handle, "out")
    })
}

/// Releases a drop. Null is ignored.
///
/// # Safety
/// `handle` must be null or a handle from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_drop_free(handle: *mut XlmimoDrop) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of antennas and users of a drop.
///
/// # Safety
/// `handle` must be null or a live handle; the outputs must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_drop_shape(
    handle: *const XlmimoDrop,
    antennas: *mut usize,
    users: *mut usize,
) -> XlmimoStatus {
    guard(|| {
        let d = deref(handle, "drop")?;
        if users.is_null() {
            return Err(Failure::null("users"));
        }
        write(antennas, d.beta.antennas(), "antennas")?;
        write(users, d.beta.users(), "users")
    })
}

/// Writes the `ms` antennas chosen by HRNP, ascending, into `indices`.
///
/// # Safety
/// `indices` must be null or valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_drop_hrnp(
    handle: *const XlmimoDrop,
    ms: usize,
    indices: *mut usize,
    capacity: usize,
) -> XlmimoStatus {
    guard(|| {
        let d = deref(handle, "drop")?;
        if indices.is_null() {
            return Err(Failure::null("indices"));
        }
        if capacity < ms {
            return Err(Failure(
                XlmimoStatus::BufferTooSmall,
                format!("need {ms} slots, buffer has {capacity}"),
            ));
        }
        let set = hrnp_select(&d.beta, ms).map_err(Failure::core)?;
        std::slice::from_raw_parts_mut(indices, ms).copy_from_slice(set.indices());
        Ok(())
    })
}

/// Total EE (bits/J) of the active set given by `mask`, priced with the HRNP
/// selection cost. Infeasible sets score 0.
///
/// # Safety
/// `mask` must be null or point to `len` bytes; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_drop_evaluate(
    handle: *const XlmimoDrop,
    kind: XlmimoPrecoder,
    mask: *const u8,
    len: usize,
    out: *mut f64,
) -> XlmimoStatus {
    guard(|| {
        let d = deref(handle, "drop")?;
        let mask = mask_arg(mask, len, d.beta.antennas())?;
        let objective = EeObjective::new(&d.beta, &d.spec.scenario_cfg, &d.spec.power, precoder(kind));
        write(out, objective.evaluate(&mask), "out")
    })
}

/// Runs a selection scheme from the HRNP set of size `ms` and writes the
/// chosen mask into `mask_out` (`len` must equal the antenna count).
///
/// Randomized schemes are reproducible for a given `seed`.
///
/// # Safety
/// `mask_out` must be null or valid for `len` writes; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_drop_select(
    handle: *const XlmimoDrop,
    kind: XlmimoPrecoder,
    which: XlmimoScheme,
    ms: usize,
    seed: u64,
    mask_out: *mut u8,
    len: usize,
    out: *mut XlmimoSelection,
) -> XlmimoStatus {
    guard(|| {
        let d = deref(handle, "drop")?;
        if mask_out.is_null() {
            return Err(Failure::null("mask_out"));
        }
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let m = d.beta.antennas();
        if len != m {
            return Err(Failure(
                XlmimoStatus::InvalidArgument,
                format!("mask buffer has {len} entries, drop has {m} antennas"),
            ));
        }
        let objective = EeObjective::new(&d.beta, &d.spec.scenario_cfg, &d.spec.power, precoder(kind));
        let (scheme, purpose) = scheme(which);
        let mut rng = substream(seed, purpose, 0);
        let res = select(scheme, &objective, ms, &d.spec.heuristics, &mut rng).map_err(Failure::core)?;
        let mask = std::slice::from_raw_parts_mut(mask_out, m);
        for (slot, on) in mask.iter_mut().zip(res.active.mask()) {
            *slot = u8::from(on);
        }
        let summary = XlmimoSelection {
            ee: res.ee,
            raw_ee: res.raw_ee,
            iterations: res.iterations,
            flops_spent: res.flops_spent,
            active: res.active.len(),
        };
        write(out, summary, "out")
    })
}

/// Runs a full experiment described by a flat JSON configuration and returns
/// its result rows as a JSON array in `*out`, to be released with
/// [`xlmimo_string_free`].
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_run_experiment(json: *const c_char, out: *mut *mut c_char) -> XlmimoStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let spec = spec_from_json(text(json, "json")?)?;
        let rows = run_experiment(&spec).map_err(|e| Failure(XlmimoStatus::ComputationFailed, e.to_string()))?;
        let encoded = CString::new(to_json(&rows)).expect("JSON output has no NUL bytes");
        write(out, encoded.into_raw(), "out")
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Validates a JSON configuration without building anything.
///
/// # Safety
/// `json` must be null or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn xlmimo_config_check(json: *const c_char) -> XlmimoStatus {
    guard(|| spec_from_json(text(json, "json")?).map(|_| ()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, XlmimoStatus::Panic);
        let msg = unsafe { CStr::from_ptr(xlmimo_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "panic: boom");
    }

    #[test]
    fn nul_in_message_is_replaced() {
        set_last_error("a\0b".into());
        let msg = unsafe { CStr::from_ptr(xlmimo_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "a b");
    }
}

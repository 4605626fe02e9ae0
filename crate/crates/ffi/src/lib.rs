//! C ABI over the `tristate-snn` simulator.
//!
//! Parameter sets and simulations are opaque heap handles created and freed
//! through this interface. Fallible calls return a [`TsnStatus`]; the text of
//! the most recent failure on the calling thread is available from
//! [`tsn_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tristate_snn::error::{ConfigError, Error};
use tristate_snn::experiments::{load_config, ExperimentPreset, PresetName};
use tristate_snn::plasticity::{discretize_weight, SynapseState};
use tristate_snn::{SimParams, Simulation, Trace};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    UnknownKey = 3,
    BadValue = 4,
    InvalidParams = 5,
    UnknownPreset = 6,
    Calibration = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Parameter set handle.
pub struct TsnParams {
    inner: SimParams,
}

/// Simulation handle. Holds the trace recorded by `tsn_sim_run_to_end`.
pub struct TsnSim {
    sim: Simulation,
    trace: Option<Trace>,
}

/// Observables at the current simulation time.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TsnObservation {
    pub t_ms: f64,
    pub i_syn_na: f64,
    pub i_target_na: f64,
    pub i_ca_na: f64,
    pub membrane_v: f64,
    pub learn: bool,
    pub post_spike_count: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Failure(TsnStatus, String);

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let status = match &e {
            ConfigError::UnknownKey(_) => TsnStatus::UnknownKey,
            ConfigError::BadValue { .. } | ConfigError::Parse { .. } => TsnStatus::BadValue,
            ConfigError::Invalid(_) | ConfigError::Dynamics(_) => TsnStatus::InvalidParams,
            ConfigError::UnknownPreset(_) => TsnStatus::UnknownPreset,
            ConfigError::Calibration(_) => TsnStatus::Calibration,
        };
        Failure(status, e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(c) => c.into(),
            other => Failure(TsnStatus::Io, other.to_string()),
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(TsnStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting failures and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TsnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TsnStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TsnStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(TsnStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn tsn_status_str(status: TsnStatus) -> *const c_char {
    let s: &'static CStr = match status {
        TsnStatus::Ok => c"ok",
        TsnStatus::NullPointer => c"null pointer argument",
        TsnStatus::InvalidUtf8 => c"string argument is not valid UTF-8",
        TsnStatus::UnknownKey => c"unknown parameter key",
        TsnStatus::BadValue => c"malformed parameter value",
        TsnStatus::InvalidParams => c"parameter set failed validation",
        TsnStatus::UnknownPreset => c"unknown preset name",
        TsnStatus::Calibration => c"calibration failed",
        TsnStatus::Io => c"file I/O failed",
        TsnStatus::BufferTooSmall => c"output buffer too small",
        TsnStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message for the last failure on this thread. Valid until the next failing
/// call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn tsn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Default parameter set. Free with `tsn_params_free`.
#[no_mangle]
pub extern "C" fn tsn_params_new_default() -> *mut TsnParams {
    Box::into_raw(Box::new(TsnParams {
        inner: SimParams::default(),
    }))
}

/// Parameter set of a named preset, e.g. "fig5_retain".
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsn_params_from_preset(
    name: *const c_char,
    out: *mut *mut TsnParams,
) -> TsnStatus {
    guard(|| {
        let name: PresetName = str_arg(name, "name")?.parse()?;
        let inner = ExperimentPreset::get(name).params()?;
        emit(out, TsnParams { inner })
    })
}

/// Defaults overlaid with a `key = value` config file, validated.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsn_params_load_config(
    path: *const c_char,
    out: *mut *mut TsnParams,
) -> TsnStatus {
    guard(|| {
        let inner = load_config(Path::new(str_arg(path, "path")?))?;
        emit(out, TsnParams { inner })
    })
}

/// # Safety
/// `params` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsn_params_free(params: *mut TsnParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Sets one parameter by key. Values are parsed as in config files.
///
/// # Safety
/// `params` must be a live handle; `key` and `value` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn tsn_params_set(
    params: *mut TsnParams,
    key: *const c_char,
    value: *const c_char,
) -> TsnStatus {
    guard(|| {
        let p = handle_mut(params, "params")?;
        p.inner
            .set(str_arg(key, "key")?, str_arg(value, "value")?)?;
        Ok(())
    })
}

/// Copies the text form of a parameter into `buf`, NUL-terminated. The
/// required size including the terminator is stored in `needed` when it is
/// non-null, also on `BufferTooSmall`.
///
/// # Safety
/// `params` must be a live handle; `key` a NUL-terminated string; `buf` must
/// hold `len` bytes or be null with `len` 0.
#[no_mangle]
pub unsafe extern "C" fn tsn_params_get(
    params: *const TsnParams,
    key: *const c_char,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> TsnStatus {
    guard(|| {
        let p = handle(params, "params")?;
        let key = str_arg(key, "key")?;
        let text = p
            .inner
            .get(key)
            .ok_or_else(|| Failure(TsnStatus::UnknownKey, format!("unknown parameter `{key}`")))?;
        let size = text.len() + 1;
        if !needed.is_null() {
            *needed = size;
        }
        if buf.is_null() || len < size {
            return Err(Failure(
                TsnStatus::BufferTooSmall,
                format!("`{key}` needs {size} bytes"),
            ));
        }
        ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsn_params_validate(params: *const TsnParams) -> TsnStatus {
    guard(|| Ok(handle(params, "params")?.inner.validate()?))
}

/// Analog weight current of a synapse whose capacitor sits at `v_w`.
/// Returns NaN if `params` is null.
///
/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsn_discretize_weight(params: *const TsnParams, v_w: f64) -> f64 {
    match params.as_ref() {
        Some(p) => {
            let pl = &p.inner.plasticity;
            discretize_weight(&mut SynapseState::new(v_w, pl), pl)
        }
        None => f64::NAN,
    }
}

/// New simulation from a copy of `params`, with the stimulus it describes.
///
/// # Safety
/// `params` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsn_sim_new(params: *const TsnParams, out: *mut *mut TsnSim) -> TsnStatus {
    guard(|| {
        let p = handle(params, "params")?;
        let sim = Simulation::from_params(p.inner.clone())?;
        emit(out, TsnSim { sim, trace: None })
    })
}

/// # Safety
/// `sim` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsn_sim_free(sim: *mut TsnSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances up to `n_steps` steps, stopping at the end of the run. The number
/// of output spikes is stored in `spikes` when it is non-null.
///
/// # Safety
/// `sim` must be a live handle; `spikes` null or writable.
#[no_mangle]
pub unsafe extern "C" fn tsn_sim_step(
    sim: *mut TsnSim,
    n_steps: u64,
    spikes: *mut u64,
) -> TsnStatus {
    guard(|| {
        let s = handle_mut(sim, "sim")?;
        let mut fired = 0;
        for _ in 0..n_steps {
            if s.sim.is_finished() {
                break;
            }
            fired += u64::from(s.sim.step());
        }
        if !spikes.is_null() {
            *spikes = fired;
        }
        Ok(())
    })
}

/// Runs to the end and keeps the recorded trace in the handle. Rows start at
/// the current time; a fresh simulation includes the t = 0 row.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsn_sim_run_to_end(sim: *mut TsnSim) -> TsnStatus {
    guard(|| {
        let s = handle_mut(sim, "sim")?;
        s.trace = Some(s.sim.run_to_end());
        Ok(())
    })
}

/// Current time in ms, or NaN for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsn_sim_time(sim: *const TsnSim) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.sim.time())
}

/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsn_sim_is_finished(sim: *const TsnSim) -> bool {
    sim.as_ref().is_none_or(|s| s.sim.is_finished())
}

/// # Safety
/// `sim` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tsn_sim_observe(
    sim: *const TsnSim,
    out: *mut TsnObservation,
) -> TsnStatus {
    guard(|| {
        let s = handle(sim, "sim")?;
        let out = handle_mut(out, "out")?;
        let r = s.sim.observe();
        *out = TsnObservation {
            t_ms: r.t,
            i_syn_na: r.i_syn,
            i_target_na: r.i_target,
            i_ca_na: r.i_ca,
            membrane_v: r.membrane,
            learn: r.learn,
            post_spike_count: s.sim.post_spike_count(),
        };
        Ok(())
    })
}

/// Copies the synaptic capacitor voltages into `buf`. The synapse count is
/// stored in `n` when it is non-null, also on `BufferTooSmall`.
///
/// # Safety
/// `sim` must be a live handle; `buf` must hold `len` doubles or be null with
/// `len` 0.
#[no_mangle]
pub unsafe extern "C" fn tsn_sim_weights(
    sim: *const TsnSim,
    buf: *mut f64,
    len: usize,
    n: *mut usize,
) -> TsnStatus {
    guard(|| {
        let syns = handle(sim, "sim")?.sim.synapses();
        if !n.is_null() {
            *n = syns.len();
        }
        if buf.is_null() || len < syns.len() {
            return Err(Failure(
                TsnStatus::BufferTooSmall,
                format!("{} synapses", syns.len()),
            ));
        }
        for (i, s) in syns.iter().enumerate() {
            *buf.add(i) = s.v_w();
        }
        Ok(())
    })
}

/// Rows in the stored trace; 0 before `tsn_sim_run_to_end`.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsn_sim_trace_len(sim: *const TsnSim) -> usize {
    sim.as_ref()
        .and_then(|s| s.trace.as_ref())
        .map_or(0, Trace::len)
}

/// Writes the stored trace as CSV.
///
/// # Safety
/// `sim` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tsn_sim_write_trace(sim: *const TsnSim, path: *const c_char) -> TsnStatus {
    guard(|| {
        let s = handle(sim, "sim")?;
        let path = str_arg(path, "path")?;
        let trace = s
            .trace
            .as_ref()
            .ok_or_else(|| Failure(TsnStatus::InvalidParams, "no trace recorded yet".into()))?;
        Ok(trace.write_csv_file(Path::new(path))?)
    })
}

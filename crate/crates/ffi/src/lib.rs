//! C ABI for the smbs library.
//!
//! Handles are opaque pointers created from a JSON model description (the
//! same `states` + `prior` blocks the CLI consumes). All functions return a
//! status code; on failure a thread-local message is available through
//! [`smbs_last_error_message`] until the next failing call on that thread.
//! Paths cross the boundary as arrays of external state ids.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use smbs::app::config::RunConfig;
use smbs::model::{StateSequence, StateSpace};
use smbs::predictive::{h_step_predictive, PredictiveState};
use smbs::rsm_extend_path;
use smbs::smbs::SmbsParams;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Status codes returned by every FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmbsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    DomainError = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Opaque model handle: a state space plus prior (or posterior) parameters.
pub struct SmbsModel {
    space: StateSpace,
    params: SmbsParams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).ok();
    });
}

fn fail(status: SmbsStatus, message: impl Into<String>) -> SmbsStatus {
    set_error(message);
    status
}

fn guarded(body: impl FnOnce() -> SmbsStatus) -> SmbsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(SmbsStatus::Panic, "internal panic"),
    }
}

/// Message describing the most recent failure on this thread, or NULL.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn smbs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

unsafe fn model_ref<'a>(handle: *const SmbsModel) -> Option<&'a SmbsModel> {
    handle.as_ref()
}

unsafe fn sequence_from_ids(
    model: &SmbsModel,
    ids: *const u32,
    len: usize,
) -> Result<StateSequence, String> {
    if len == 0 {
        return Err("path must be non-empty".into());
    }
    let ids = std::slice::from_raw_parts(ids, len);
    StateSequence::from_ids(ids, &model.space).map_err(|e| e.to_string())
}

/// Build a model from a JSON description with `states` and `prior` blocks.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer. The
/// returned handle must be released with [`smbs_model_free`].
#[no_mangle]
pub unsafe extern "C" fn smbs_model_from_json(
    json: *const c_char,
    out: *mut *mut SmbsModel,
) -> SmbsStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return fail(SmbsStatus::NullArgument, "null argument");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => return fail(SmbsStatus::InvalidUtf8, "config is not valid UTF-8"),
        };
        let config: RunConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return fail(SmbsStatus::ParseError, format!("config parse error: {e}")),
        };
        let space = match config.state_space() {
            Ok(s) => s,
            Err(e) => return fail(SmbsStatus::DomainError, e.to_string()),
        };
        let params = match config.smbs_params(&space, None) {
            Ok(p) => p,
            Err(e) => return fail(SmbsStatus::DomainError, e.to_string()),
        };
        *out = Box::into_raw(Box::new(SmbsModel { space, params }));
        SmbsStatus::Ok
    })
}

/// # Safety
/// `handle` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn smbs_model_free(handle: *mut SmbsModel) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be a live model handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn smbs_model_n_states(
    handle: *const SmbsModel,
    out: *mut usize,
) -> SmbsStatus {
    guarded(|| {
        let (Some(model), false) = (model_ref(handle), out.is_null()) else {
            return fail(SmbsStatus::NullArgument, "null argument");
        };
        *out = model.space.len();
        SmbsStatus::Ok
    })
}

/// External id of the state at `index` (in `0..n_states`).
///
/// # Safety
/// `handle` must be a live model handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn smbs_model_state_id(
    handle: *const SmbsModel,
    index: usize,
    out: *mut u32,
) -> SmbsStatus {
    guarded(|| {
        let (Some(model), false) = (model_ref(handle), out.is_null()) else {
            return fail(SmbsStatus::NullArgument, "null argument");
        };
        if index >= model.space.len() {
            return fail(SmbsStatus::DomainError, "state index out of range");
        }
        *out = model.space.id_of(index);
        SmbsStatus::Ok
    })
}

/// Conjugate update on one observed path; writes a new handle.
///
/// # Safety
/// `handle` must be live, `path` must point to `len` readable ids, and
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn smbs_model_posterior(
    handle: *const SmbsModel,
    path: *const u32,
    len: usize,
    out: *mut *mut SmbsModel,
) -> SmbsStatus {
    guarded(|| {
        let (Some(model), false, false) = (model_ref(handle), path.is_null(), out.is_null()) else {
            return fail(SmbsStatus::NullArgument, "null argument");
        };
        let sequence = match sequence_from_ids(model, path, len) {
            Ok(s) => s,
            Err(e) => return fail(SmbsStatus::DomainError, e),
        };
        match model.params.posterior(&sequence) {
            Ok(params) => {
                *out = Box::into_raw(Box::new(SmbsModel {
                    space: model.space.clone(),
                    params,
                }));
                SmbsStatus::Ok
            }
            Err(e) => fail(SmbsStatus::DomainError, e.to_string()),
        }
    })
}

/// One-step predictive pmf of the state after the observed path, written to
/// `out_probs[0..n_states]` in state-space order.
///
/// # Safety
/// `handle` must be live, `path` must point to `len` readable ids, and
/// `out_probs` must hold at least `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn smbs_predictive_kernel(
    handle: *const SmbsModel,
    path: *const u32,
    len: usize,
    out_probs: *mut f64,
    out_len: usize,
) -> SmbsStatus {
    guarded(|| {
        let (Some(model), false, false) = (model_ref(handle), path.is_null(), out_probs.is_null())
        else {
            return fail(SmbsStatus::NullArgument, "null argument");
        };
        if out_len < model.space.len() {
            return fail(SmbsStatus::BufferTooSmall, "output buffer too small");
        }
        let sequence = match sequence_from_ids(model, path, len) {
            Ok(s) => s,
            Err(e) => return fail(SmbsStatus::DomainError, e),
        };
        let state = match PredictiveState::from_prefix(&model.params, &sequence) {
            Ok(s) => s,
            Err(e) => return fail(SmbsStatus::DomainError, e.to_string()),
        };
        match state.kernel() {
            Ok(pmf) => {
                std::ptr::copy_nonoverlapping(pmf.as_ptr(), out_probs, pmf.len());
                SmbsStatus::Ok
            }
            Err(e) => fail(SmbsStatus::DomainError, e.to_string()),
        }
    })
}

/// Extend the observed path by `steps` draws from the reinforced predictive
/// process; writes `len + steps` ids into `out_ids`.
///
/// # Safety
/// `handle` must be live, `path` must point to `len` readable ids, and
/// `out_ids` must hold at least `out_cap` writable entries.
#[no_mangle]
pub unsafe extern "C" fn smbs_extend_path(
    handle: *const SmbsModel,
    path: *const u32,
    len: usize,
    steps: usize,
    seed: u64,
    out_ids: *mut u32,
    out_cap: usize,
) -> SmbsStatus {
    guarded(|| {
        let (Some(model), false, false) = (model_ref(handle), path.is_null(), out_ids.is_null())
        else {
            return fail(SmbsStatus::NullArgument, "null argument");
        };
        if out_cap < len + steps {
            return fail(SmbsStatus::BufferTooSmall, "output buffer too small");
        }
        let sequence = match sequence_from_ids(model, path, len) {
            Ok(s) => s,
            Err(e) => return fail(SmbsStatus::DomainError, e),
        };
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        match rsm_extend_path(&model.params, &sequence, steps as u64, &mut rng) {
            Ok(extended) => {
                for (k, &state) in extended.states().iter().enumerate() {
                    *out_ids.add(k) = model.space.id_of(state);
                }
                SmbsStatus::Ok
            }
            Err(e) => fail(SmbsStatus::DomainError, e.to_string()),
        }
    })
}

/// Monte Carlo forecast: `P(S_{t+h} = j | path)` for `h = 1..=horizon`,
/// written row-major (`horizon` rows of `n_states` probabilities).
///
/// # Safety
/// `handle` must be live, `path` must point to `len` readable ids, and
/// `out_probs` must hold at least `out_cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn smbs_h_step_predict(
    handle: *const SmbsModel,
    path: *const u32,
    len: usize,
    horizon: u64,
    n_sims: u64,
    seed: u64,
    out_probs: *mut f64,
    out_cap: usize,
) -> SmbsStatus {
    guarded(|| {
        let (Some(model), false, false) = (model_ref(handle), path.is_null(), out_probs.is_null())
        else {
            return fail(SmbsStatus::NullArgument, "null argument");
        };
        let n = model.space.len();
        if out_cap < horizon as usize * n {
            return fail(SmbsStatus::BufferTooSmall, "output buffer too small");
        }
        let sequence = match sequence_from_ids(model, path, len) {
            Ok(s) => s,
            Err(e) => return fail(SmbsStatus::DomainError, e),
        };
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        match h_step_predictive(&model.params, &sequence, horizon, n_sims, &mut rng) {
            Ok(matrix) => {
                for h in 1..=horizon {
                    for j in 0..n {
                        *out_probs.add((h as usize - 1) * n + j) = matrix.prob(h, j);
                    }
                }
                SmbsStatus::Ok
            }
            Err(e) => fail(SmbsStatus::DomainError, e.to_string()),
        }
    })
}

/// Posterior mean CDF of the holding time of `state_id` at `t`.
///
/// # Safety
/// `handle` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn smbs_holding_mean(
    handle: *const SmbsModel,
    state_id: u32,
    t: u64,
    out: *mut f64,
) -> SmbsStatus {
    guarded(|| {
        let (Some(model), false) = (model_ref(handle), out.is_null()) else {
            return fail(SmbsStatus::NullArgument, "null argument");
        };
        let Some(index) = model.space.index_of(state_id) else {
            return fail(
                SmbsStatus::DomainError,
                format!("unknown state id {state_id}"),
            );
        };
        match model.params.state(index).holding.mean(t) {
            Ok(mean) => {
                *out = mean;
                SmbsStatus::Ok
            }
            Err(e) => fail(SmbsStatus::DomainError, e.to_string()),
        }
    })
}

/// Prior/posterior mean transition probability from `from_id` to `to_id`.
///
/// # Safety
/// `handle` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn smbs_transition_mean(
    handle: *const SmbsModel,
    from_id: u32,
    to_id: u32,
    out: *mut f64,
) -> SmbsStatus {
    guarded(|| {
        let (Some(model), false) = (model_ref(handle), out.is_null()) else {
            return fail(SmbsStatus::NullArgument, "null argument");
        };
        let (Some(from), Some(to)) = (model.space.index_of(from_id), model.space.index_of(to_id))
        else {
            return fail(SmbsStatus::DomainError, "unknown state id");
        };
        *out = model.params.state(from).jump.mean(to);
        SmbsStatus::Ok
    })
}

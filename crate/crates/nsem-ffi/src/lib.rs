//! C ABI for the nsem engine.
//!
//! Models travel as JSON documents in the same format the CLI reads; worlds,
//! contexts, interventions, and formulas travel as the same text syntax.
//! Handles are opaque pointers freed by their matching `_free` function.
//! Every fallible call returns an [`NsemStatus`]; on failure a thread-local
//! message is readable through [`nsem_last_error`] until the next failing
//! call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use nsem::format::{
    compile_cbn, compile_model, compile_pmodel, model_to_file, parse_assignment_text,
    validate_model_file, world_to_json,
};
use nsem::formula::Intervention;
use nsem::model::{Model, PartialWorld, World};
use nsem::parse;
use nsem::prob::{induce_cbn, PModel};
use nsem::semantics::{actualized_refinement, intervene, satisfies, Setting};
use nsem::signature::Signature;

/// Result codes for every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsemStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// JSON, formula, or assignment text failed to parse.
    Syntax = 3,
    /// The model violates a structural invariant.
    Validation = 4,
    /// A semantic precondition failed (world not a solution, state outside
    /// the support, intervention on an unknown variable, ...).
    Precondition = 5,
}

/// Opaque handle to a validated model.
pub struct NsemModel {
    inner: Model,
}

/// Opaque handle to a validated probabilistic model.
pub struct NsemPModel {
    inner: PModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn fail(status: NsemStatus, message: impl Into<String>) -> NsemStatus {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).expect("NULs stripped");
    });
    status
}

/// Message for the most recent failure on this thread. Owned by the library;
/// do not free. Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nsem_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Frees a string returned through an out-parameter.
///
/// # Safety
/// `s` must be a pointer previously returned by this library and not yet
/// freed, or null.
#[no_mangle]
pub unsafe extern "C" fn nsem_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn required_str<'a>(arg: *const c_char, name: &str) -> Result<&'a str, NsemStatus> {
    if arg.is_null() {
        return Err(fail(NsemStatus::NullArgument, format!("{name} must not be null")));
    }
    CStr::from_ptr(arg)
        .to_str()
        .map_err(|_| fail(NsemStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn optional_str<'a>(arg: *const c_char, name: &str) -> Result<Option<&'a str>, NsemStatus> {
    if arg.is_null() {
        return Ok(None);
    }
    required_str(arg, name).map(Some)
}

fn give_string(out: *mut *mut c_char, text: String) -> NsemStatus {
    let cstring = match CString::new(text) {
        Ok(c) => c,
        Err(_) => return fail(NsemStatus::Syntax, "output contained an interior NUL"),
    };
    unsafe { *out = cstring.into_raw() };
    NsemStatus::Ok
}

fn named_pairs(text: &str) -> Result<Vec<(String, nsem::signature::Value)>, NsemStatus> {
    parse_assignment_text(text).map_err(|e| fail(NsemStatus::Syntax, e))
}

fn world_from_text(sig: &Signature, text: &str) -> Result<World, NsemStatus> {
    let pairs = named_pairs(text)?;
    World::from_named(sig, pairs.iter().map(|(n, v)| (n.as_str(), v)))
        .map_err(|e| fail(NsemStatus::Precondition, e.to_string()))
}

fn intervention_from_text(sig: &Signature, text: &str) -> Result<Intervention, NsemStatus> {
    let pairs = named_pairs(text)?;
    Intervention::from_named(sig, pairs.iter().map(|(n, v)| (n.as_str(), v)))
        .map_err(|e| fail(NsemStatus::Precondition, e.to_string()))
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

/// Parses and validates a model from JSON, writing an owned handle to `out`.
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out` to writable memory.
#[no_mangle]
pub unsafe extern "C" fn nsem_model_from_json(
    json: *const c_char,
    out: *mut *mut NsemModel,
) -> NsemStatus {
    if out.is_null() {
        return fail(NsemStatus::NullArgument, "out must not be null");
    }
    let text = match required_str(json, "json") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let file = match serde_json::from_str(text) {
        Ok(f) => f,
        Err(e) => return fail(NsemStatus::Syntax, e.to_string()),
    };
    match compile_model(&file) {
        Ok(model) => {
            *out = Box::into_raw(Box::new(NsemModel { inner: model }));
            NsemStatus::Ok
        }
        Err(report) => fail(NsemStatus::Validation, report.to_string()),
    }
}

/// # Safety
/// `model` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn nsem_model_free(model: *mut NsemModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Validates model JSON without constructing a handle. Writes the full report
/// ("valid" when well-formed) to `out_report`.
///
/// # Safety
/// As for [`nsem_model_from_json`]; `out_report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsem_model_validate_json(
    json: *const c_char,
    out_report: *mut *mut c_char,
) -> NsemStatus {
    if out_report.is_null() {
        return fail(NsemStatus::NullArgument, "out_report must not be null");
    }
    let text = match required_str(json, "json") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let file = match serde_json::from_str(text) {
        Ok(f) => f,
        Err(e) => return fail(NsemStatus::Syntax, e.to_string()),
    };
    give_string(out_report, validate_model_file(&file).to_string())
}

/// Serializes a model back to its JSON document.
///
/// # Safety
/// `model` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsem_model_to_json(
    model: *const NsemModel,
    out_json: *mut *mut c_char,
) -> NsemStatus {
    if model.is_null() || out_json.is_null() {
        return fail(NsemStatus::NullArgument, "model and out_json must not be null");
    }
    let file = model_to_file(&(*model).inner);
    match serde_json::to_string_pretty(&file) {
        Ok(text) => give_string(out_json, text),
        Err(e) => fail(NsemStatus::Syntax, e.to_string()),
    }
}

/// Enumerates solutions as a JSON array of name-to-value objects, optionally
/// restricted to a context given as `U=0,W=1` (null for no restriction).
///
/// # Safety
/// `model` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nsem_solutions_json(
    model: *const NsemModel,
    context: *const c_char,
    out_json: *mut *mut c_char,
) -> NsemStatus {
    if model.is_null() || out_json.is_null() {
        return fail(NsemStatus::NullArgument, "model and out_json must not be null");
    }
    let m = &(*model).inner;
    let sig = m.signature();
    let ctx = match optional_str(context, "context") {
        Ok(None) => None,
        Ok(Some(text)) => {
            let pairs = match named_pairs(text) {
                Ok(p) => p,
                Err(status) => return status,
            };
            match PartialWorld::context_from_named(sig, pairs.iter().map(|(n, v)| (n.as_str(), v)))
            {
                Ok(c) => Some(c),
                Err(e) => return fail(NsemStatus::Precondition, e.to_string()),
            }
        }
        Err(status) => return status,
    };
    let worlds: Vec<serde_json::Value> = m
        .solutions_matching(ctx.as_ref())
        .iter()
        .map(|w| world_to_json(sig, w))
        .collect();
    give_string(out_json, serde_json::Value::Array(worlds).to_string())
}

/// Evaluates a causal formula. `world` and `context` select the setting
/// level: pass a world for counterfactual evaluation, a context (possibly
/// empty text for models without exogenous variables) for interventionist
/// evaluation, or neither for model-level evaluation. Writes the verdict to
/// `out`.
///
/// # Safety
/// `model` must be a live handle; strings NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nsem_eval(
    model: *const NsemModel,
    formula: *const c_char,
    world: *const c_char,
    context: *const c_char,
    out: *mut bool,
) -> NsemStatus {
    if model.is_null() || out.is_null() {
        return fail(NsemStatus::NullArgument, "model and out must not be null");
    }
    let m = &(*model).inner;
    let sig = m.signature();
    let text = match required_str(formula, "formula") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let parsed = match parse::parse_causal(text, sig) {
        Ok(f) => f,
        Err(e) => return fail(NsemStatus::Syntax, e.to_string()),
    };
    let world_text = match optional_str(world, "world") {
        Ok(w) => w,
        Err(status) => return status,
    };
    let context_text = match optional_str(context, "context") {
        Ok(c) => c,
        Err(status) => return status,
    };
    let setting = if let Some(wt) = world_text {
        let w = match world_from_text(sig, wt) {
            Ok(w) => w,
            Err(status) => return status,
        };
        match Setting::world(m, w) {
            Ok(s) => s,
            Err(e) => return fail(NsemStatus::Precondition, e.to_string()),
        }
    } else if let Some(ct) = context_text {
        let pairs = match named_pairs(ct) {
            Ok(p) => p,
            Err(status) => return status,
        };
        let ctx =
            match PartialWorld::context_from_named(sig, pairs.iter().map(|(n, v)| (n.as_str(), v)))
            {
                Ok(c) => c,
                Err(e) => return fail(NsemStatus::Precondition, e.to_string()),
            };
        Setting::context(m, ctx)
    } else {
        Setting::model_only(m)
    };
    *out = satisfies(&setting, &parsed);
    NsemStatus::Ok
}

/// Writes the actualized refinement of the model at a solution world.
///
/// # Safety
/// `model` must be a live handle; `world` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nsem_refine(
    model: *const NsemModel,
    world: *const c_char,
    out: *mut *mut NsemModel,
) -> NsemStatus {
    if model.is_null() || out.is_null() {
        return fail(NsemStatus::NullArgument, "model and out must not be null");
    }
    let m = &(*model).inner;
    let text = match required_str(world, "world") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let w = match world_from_text(m.signature(), text) {
        Ok(w) => w,
        Err(status) => return status,
    };
    match actualized_refinement(m, &w) {
        Ok(refined) => {
            *out = Box::into_raw(Box::new(NsemModel { inner: refined }));
            NsemStatus::Ok
        }
        Err(e) => fail(NsemStatus::Precondition, e.to_string()),
    }
}

/// Writes the intervened model for an intervention given as `Y=1,X=0`.
///
/// # Safety
/// `model` must be a live handle; `do_text` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nsem_intervene(
    model: *const NsemModel,
    do_text: *const c_char,
    out: *mut *mut NsemModel,
) -> NsemStatus {
    if model.is_null() || out.is_null() {
        return fail(NsemStatus::NullArgument, "model and out must not be null");
    }
    let m = &(*model).inner;
    let text = match required_str(do_text, "do") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let iv = match intervention_from_text(m.signature(), text) {
        Ok(iv) => iv,
        Err(status) => return status,
    };
    *out = Box::into_raw(Box::new(NsemModel { inner: intervene(m, &iv) }));
    NsemStatus::Ok
}

// ---------------------------------------------------------------------------
// Probabilistic models
// ---------------------------------------------------------------------------

/// Parses and validates a probabilistic model from JSON.
///
/// # Safety
/// As for [`nsem_model_from_json`].
#[no_mangle]
pub unsafe extern "C" fn nsem_pmodel_from_json(
    json: *const c_char,
    out: *mut *mut NsemPModel,
) -> NsemStatus {
    if out.is_null() {
        return fail(NsemStatus::NullArgument, "out must not be null");
    }
    let text = match required_str(json, "json") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let file = match serde_json::from_str(text) {
        Ok(f) => f,
        Err(e) => return fail(NsemStatus::Syntax, e.to_string()),
    };
    match compile_pmodel(&file) {
        Ok(pm) => {
            *out = Box::into_raw(Box::new(NsemPModel { inner: pm }));
            NsemStatus::Ok
        }
        Err(report) => fail(NsemStatus::Validation, report.to_string()),
    }
}

/// # Safety
/// `pmodel` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn nsem_pmodel_free(pmodel: *mut NsemPModel) {
    if !pmodel.is_null() {
        drop(Box::from_raw(pmodel));
    }
}

/// Exact counterfactual probability `P*(phi | do(iv), world)`, written as a
/// rational string such as `4/5`.
///
/// # Safety
/// `pmodel` must be a live handle; strings NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nsem_counterfactual_probability(
    pmodel: *const NsemPModel,
    world: *const c_char,
    do_text: *const c_char,
    phi: *const c_char,
    out: *mut *mut c_char,
) -> NsemStatus {
    if pmodel.is_null() || out.is_null() {
        return fail(NsemStatus::NullArgument, "pmodel and out must not be null");
    }
    let pm = &(*pmodel).inner;
    let sig = pm.signature();
    let world_text = match required_str(world, "world") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let w = match world_from_text(sig, world_text) {
        Ok(w) => w,
        Err(status) => return status,
    };
    let do_str = match required_str(do_text, "do") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let iv = match intervention_from_text(sig, do_str) {
        Ok(iv) => iv,
        Err(status) => return status,
    };
    let phi_text = match required_str(phi, "phi") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let phi = match parse::parse_basic(phi_text, sig) {
        Ok(f) => f,
        Err(e) => return fail(NsemStatus::Syntax, e.to_string()),
    };
    match pm.counterfactual_probability(&w, &iv, &phi) {
        Ok(p) => give_string(out, p.to_string()),
        Err(e) => fail(NsemStatus::Precondition, e.to_string()),
    }
}

/// Counterfactual distribution of a causal Bayesian network as a JSON array
/// of `{state, prob}` entries. With `induce` true the model's exogenous
/// variables are marginalized out first; otherwise the model must already be
/// exogenous-free.
///
/// # Safety
/// `json`, `state`, `do_text` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nsem_cbn_counterfactual_json(
    json: *const c_char,
    induce: bool,
    state: *const c_char,
    do_text: *const c_char,
    out: *mut *mut c_char,
) -> NsemStatus {
    if out.is_null() {
        return fail(NsemStatus::NullArgument, "out must not be null");
    }
    let text = match required_str(json, "json") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let file = match serde_json::from_str(text) {
        Ok(f) => f,
        Err(e) => return fail(NsemStatus::Syntax, e.to_string()),
    };
    let cbn = if induce {
        let pm = match compile_pmodel(&file) {
            Ok(pm) => pm,
            Err(report) => return fail(NsemStatus::Validation, report.to_string()),
        };
        match induce_cbn(&pm) {
            Ok(c) => c,
            Err(e) => return fail(NsemStatus::Validation, e.to_string()),
        }
    } else {
        match compile_cbn(&file) {
            Ok(c) => c,
            Err(report) => return fail(NsemStatus::Validation, report.to_string()),
        }
    };
    let sig = std::sync::Arc::clone(cbn.signature());
    let state_text = match required_str(state, "state") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let observed = match world_from_text(&sig, state_text) {
        Ok(w) => w,
        Err(status) => return status,
    };
    let do_str = match required_str(do_text, "do") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let iv = match intervention_from_text(&sig, do_str) {
        Ok(iv) => iv,
        Err(status) => return status,
    };
    match cbn.counterfactual(&observed, &iv) {
        Ok(dist) => {
            let endo = sig.endogenous();
            let entries: Vec<serde_json::Value> = dist
                .entries()
                .map(|(key, p)| {
                    let mut state = serde_json::Map::new();
                    for (&v, &ix) in endo.iter().zip(key.iter()) {
                        state.insert(
                            sig.name(v).to_string(),
                            serde_json::to_value(sig.value(v, ix)).expect("values serialize"),
                        );
                    }
                    serde_json::json!({"state": state, "prob": p.to_string()})
                })
                .collect();
            give_string(out, serde_json::Value::Array(entries).to_string())
        }
        Err(e) => fail(NsemStatus::Precondition, e.to_string()),
    }
}

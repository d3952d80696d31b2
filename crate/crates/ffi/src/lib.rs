//! C ABI over `heraldkey`.
//!
//! Configurations live behind an opaque `HkScenarioConfig` handle created with
//! `hk_config_new` and released with `hk_config_free`. Every fallible call
//! returns an `HkStatus`; on anything but `HK_STATUS_OK` the message is
//! available from `hk_last_error` until the next call on the same thread.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use heraldkey::fock::ModeLabel;
use heraldkey::keyrate::key_rate;
use heraldkey::optics::{ChannelModel, Scenario, ScenarioConfig};
use heraldkey::sweep::{evaluate, optimize_kappa, Objective, PointStatus};
use heraldkey::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Config = 3,
    HeraldFailure = 4,
    NoFeasibleKappa = 5,
    Unphysical = 6,
    Failed = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkScenario {
    Tmsv = 0,
    ReceiverPs = 1,
    TransmitterPs = 2,
    ReceiverQs = 3,
    TransmitterQs = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkChannel {
    EvePurification = 0,
    VacuumEnvironment = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkMode {
    A = 0,
    B = 1,
    E = 2,
    F = 3,
    EPrime = 4,
    C = 5,
    CPrime = 6,
    D = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkObjective {
    LogNegativity = 0,
    EntanglementRate = 1,
    KeyRate = 2,
}

/// Key-rate terms for one point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HkKeyRate {
    pub i_ab: f64,
    pub chi_be: f64,
    pub success_probability: f64,
    pub reconciliation_efficiency: f64,
    pub k_raw: f64,
    pub k_effective: f64,
    pub norm_leak: f64,
}

/// One evaluated point. Quantities that were not reached are NaN; `status`
/// says why.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HkRecord {
    pub status: HkStatus,
    pub kappa: f64,
    pub g: f64,
    pub p_s: f64,
    pub e_n: f64,
    pub entanglement_rate: f64,
    pub i_ab: f64,
    pub chi_be: f64,
    pub k_raw: f64,
    pub k_effective: f64,
    pub norm_leak: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HkOptimum {
    pub kappa: f64,
    pub value: f64,
}

/// Opaque scenario configuration.
pub struct HkScenarioConfig(ScenarioConfig);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> HkStatus {
    match err {
        Error::InvalidParameter { .. } | Error::InvalidCutoff { .. } => HkStatus::InvalidParameter,
        Error::Config(_) => HkStatus::Config,
        _ => match PointStatus::from_error(err) {
            PointStatus::HeraldFailure => HkStatus::HeraldFailure,
            PointStatus::NoFeasibleKappa => HkStatus::NoFeasibleKappa,
            PointStatus::Unphysical => HkStatus::Unphysical,
            _ => HkStatus::Failed,
        },
    }
}

fn fail(err: Error) -> HkStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null(what: &str) -> HkStatus {
    set_error(format!("{what} is null"));
    HkStatus::NullPointer
}

/// Runs `f`, clearing the last error first and turning a panic into `Panic`.
fn guarded(f: impl FnOnce() -> HkStatus) -> HkStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            HkStatus::Panic
        }
    }
}

fn scenario(s: HkScenario) -> Scenario {
    match s {
        HkScenario::Tmsv => Scenario::Tmsv,
        HkScenario::ReceiverPs => Scenario::ReceiverPs,
        HkScenario::TransmitterPs => Scenario::TransmitterPs,
        HkScenario::ReceiverQs => Scenario::ReceiverQs,
        HkScenario::TransmitterQs => Scenario::TransmitterQs,
    }
}

fn mode(m: HkMode) -> ModeLabel {
    match m {
        HkMode::A => ModeLabel::A,
        HkMode::B => ModeLabel::B,
        HkMode::E => ModeLabel::E,
        HkMode::F => ModeLabel::F,
        HkMode::EPrime => ModeLabel::EPrime,
        HkMode::C => ModeLabel::C,
        HkMode::CPrime => ModeLabel::CPrime,
        HkMode::D => ModeLabel::D,
    }
}

fn objective(o: HkObjective) -> Objective {
    match o {
        HkObjective::LogNegativity => Objective::EN,
        HkObjective::EntanglementRate => Objective::EntanglementRate,
        HkObjective::KeyRate => Objective::KeyRate,
    }
}

/// # Safety
/// `config` must be null or a live handle from `hk_config_new`.
unsafe fn with_config(config: *mut HkScenarioConfig, f: impl FnOnce(&mut ScenarioConfig) -> HkStatus) -> HkStatus {
    match config.as_mut() {
        Some(c) => guarded(|| f(&mut c.0)),
        None => null("config"),
    }
}

/// New configuration with default cutoffs, splitters and the Eve channel.
/// Returns null if either dB value is negative or not finite.
#[no_mangle]
pub extern "C" fn hk_config_new(scenario_kind: HkScenario, squeezing_db: f64, loss_db: f64) -> *mut HkScenarioConfig {
    let cfg = ScenarioConfig::new(scenario(scenario_kind), squeezing_db, loss_db);
    if let Err(e) = cfg.validate() {
        set_error(e.to_string());
        return ptr::null_mut();
    }
    Box::into_raw(Box::new(HkScenarioConfig(cfg)))
}

/// # Safety
/// `config` must be null or a handle from `hk_config_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hk_config_free(config: *mut HkScenarioConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_config_clone(config: *const HkScenarioConfig) -> *mut HkScenarioConfig {
    match config.as_ref() {
        Some(c) => Box::into_raw(Box::new(HkScenarioConfig(c.0.clone()))),
        None => {
            set_error("config is null".into());
            ptr::null_mut()
        }
    }
}

/// Applies `f` to a copy and keeps it only if the result validates, so a
/// rejected value leaves the previous one in place.
///
/// # Safety
/// `config` must be null or a live handle.
unsafe fn update(config: *mut HkScenarioConfig, f: impl FnOnce(&mut ScenarioConfig)) -> HkStatus {
    with_config(config, |current| {
        let mut c = current.clone();
        f(&mut c);
        match c.validate() {
            Ok(()) => {
                *current = c;
                HkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_config_set_squeezing_db(config: *mut HkScenarioConfig, value: f64) -> HkStatus {
    update(config, |c| c.squeezing_db = value)
}

/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_config_set_loss_db(config: *mut HkScenarioConfig, value: f64) -> HkStatus {
    update(config, |c| c.loss_db = value)
}

/// Photon-subtraction splitter transmissivity, in (0, 1).
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_config_set_kappa_ps(config: *mut HkScenarioConfig, value: f64) -> HkStatus {
    update(config, |c| c.kappa_ps = value)
}

/// Scissors splitter transmissivity, in (0, 1).
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_config_set_kappa_qs(config: *mut HkScenarioConfig, value: f64) -> HkStatus {
    update(config, |c| c.kappa_qs = value)
}

/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_config_set_eve_variance(config: *mut HkScenarioConfig, value: f64) -> HkStatus {
    update(config, |c| c.eve_variance = value)
}

/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_config_set_reconciliation_efficiency(config: *mut HkScenarioConfig, value: f64) -> HkStatus {
    update(config, |c| c.reconciliation_efficiency = value)
}

/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_config_set_channel(config: *mut HkScenarioConfig, value: HkChannel) -> HkStatus {
    update(config, |c| {
        c.channel_model = match value {
            HkChannel::EvePurification => ChannelModel::EvePurification,
            HkChannel::VacuumEnvironment => ChannelModel::VacuumEnvironment,
        }
    })
}

/// Fock cutoff (highest photon number kept) for one mode.
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hk_config_set_cutoff(config: *mut HkScenarioConfig, which: HkMode, cutoff: usize) -> HkStatus {
    update(config, |c| c.cutoffs.set(mode(which), cutoff))
}

/// # Safety
/// `config` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hk_key_rate(config: *const HkScenarioConfig, out: *mut HkKeyRate) -> HkStatus {
    let (Some(c), Some(out)) = (config.as_ref(), out.as_mut()) else {
        return null(if config.is_null() { "config" } else { "out" });
    };
    guarded(|| match key_rate(&c.0) {
        Ok(b) => {
            *out = HkKeyRate {
                i_ab: b.i_ab,
                chi_be: b.chi_be,
                success_probability: b.success_probability,
                reconciliation_efficiency: b.reconciliation_efficiency,
                k_raw: b.k_raw,
                k_effective: b.k_effective,
                norm_leak: b.norm_leak,
            };
            HkStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Evaluates one point the way a sweep row does. A physics failure is
/// reported both as the return value and in `out->status`.
///
/// # Safety
/// `config` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hk_evaluate(config: *const HkScenarioConfig, out: *mut HkRecord) -> HkStatus {
    let (Some(c), Some(out)) = (config.as_ref(), out.as_mut()) else {
        return null(if config.is_null() { "config" } else { "out" });
    };
    guarded(|| {
        if let Err(e) = c.0.validate() {
            return fail(e);
        }
        let r = evaluate(&c.0);
        let status = match r.status {
            PointStatus::Ok => HkStatus::Ok,
            PointStatus::HeraldFailure => HkStatus::HeraldFailure,
            PointStatus::NoFeasibleKappa => HkStatus::NoFeasibleKappa,
            PointStatus::Unphysical => HkStatus::Unphysical,
            PointStatus::Failed => HkStatus::Failed,
        };
        if status != HkStatus::Ok {
            set_error(format!("point status {}", r.status.as_str()));
        }
        let v = |x: Option<f64>| x.unwrap_or(f64::NAN);
        *out = HkRecord {
            status,
            kappa: v(r.kappa),
            g: v(r.g),
            p_s: v(r.p_s),
            e_n: v(r.e_n),
            entanglement_rate: v(r.entanglement_rate),
            i_ab: v(r.i_ab),
            chi_be: v(r.chi_be),
            k_raw: v(r.k_raw),
            k_effective: v(r.k_effective),
            norm_leak: v(r.norm_leak),
        };
        status
    })
}

/// Best splitter transmissivity for the configured scenario.
///
/// # Safety
/// `config` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hk_optimize_kappa(
    config: *const HkScenarioConfig,
    target: HkObjective,
    out: *mut HkOptimum,
) -> HkStatus {
    let (Some(c), Some(out)) = (config.as_ref(), out.as_mut()) else {
        return null(if config.is_null() { "config" } else { "out" });
    };
    guarded(|| match optimize_kappa(&c.0, objective(target)) {
        Ok(o) => {
            *out = HkOptimum { kappa: o.kappa, value: o.value };
            HkStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next `hk_` call on the same thread.
#[no_mangle]
pub extern "C" fn hk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated crate version.
#[no_mangle]
pub extern "C" fn hk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use heraldkey_ffi::*;

fn last_error() -> Option<String> {
    let p = hk_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

struct Handle(*mut HkScenarioConfig);

impl Handle {
    fn new(scenario: HkScenario, sq: f64, loss: f64) -> Handle {
        let p = hk_config_new(scenario, sq, loss);
        assert!(!p.is_null(), "{:?}", last_error());
        let h = Handle(p);
        for mode in [HkMode::A, HkMode::B, HkMode::E] {
            assert_eq!(unsafe { hk_config_set_cutoff(h.0, mode, 10) }, HkStatus::Ok);
        }
        h
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { hk_config_free(self.0) }
    }
}

#[test]
fn key_rate_round_trip() {
    let h = Handle::new(HkScenario::Tmsv, 3.0, 2.0);
    let mut out = HkKeyRate::default();
    assert_eq!(unsafe { hk_key_rate(h.0, &mut out) }, HkStatus::Ok);
    assert!(out.k_raw > 0.0);
    assert_eq!(out.k_effective, out.k_raw);
    assert_eq!(out.success_probability, 1.0);
    assert_eq!(last_error(), None);
}

#[test]
fn evaluate_matches_key_rate() {
    let h = Handle::new(HkScenario::ReceiverPs, 3.0, 4.0);
    let mut rec = HkRecord {
        status: HkStatus::Failed,
        kappa: 0.0,
        g: 0.0,
        p_s: 0.0,
        e_n: 0.0,
        entanglement_rate: 0.0,
        i_ab: 0.0,
        chi_be: 0.0,
        k_raw: 0.0,
        k_effective: 0.0,
        norm_leak: 0.0,
    };
    let mut k = HkKeyRate::default();
    unsafe {
        assert_eq!(hk_evaluate(h.0, &mut rec), HkStatus::Ok);
        assert_eq!(hk_key_rate(h.0, &mut k), HkStatus::Ok);
    }
    assert_eq!(rec.status, HkStatus::Ok);
    assert_eq!(rec.k_raw, k.k_raw);
    assert_eq!(rec.p_s, k.success_probability);
    assert_eq!(rec.entanglement_rate, rec.p_s * rec.e_n);
    assert!(rec.e_n > 0.0);
}

#[test]
fn rejected_setter_keeps_old_value() {
    let h = Handle::new(HkScenario::ReceiverQs, 2.0, 1.0);
    let mut before = HkKeyRate::default();
    let mut after = HkKeyRate::default();
    unsafe {
        assert_eq!(hk_key_rate(h.0, &mut before), HkStatus::Ok);
        assert_eq!(hk_config_set_kappa_qs(h.0, 1.5), HkStatus::InvalidParameter);
        assert!(last_error().unwrap().contains("kappa_qs"));
        assert_eq!(hk_config_set_cutoff(h.0, HkMode::B, 0), HkStatus::InvalidParameter);
        assert_eq!(hk_key_rate(h.0, &mut after), HkStatus::Ok);
    }
    assert_eq!(before, after);
}

#[test]
fn vacuum_channel_has_no_key_rate() {
    let h = Handle::new(HkScenario::Tmsv, 2.0, 1.0);
    let mut out = HkKeyRate::default();
    unsafe {
        assert_eq!(hk_config_set_channel(h.0, HkChannel::VacuumEnvironment), HkStatus::Ok);
        assert_eq!(hk_key_rate(h.0, &mut out), HkStatus::Config);
    }
    assert!(last_error().is_some());
}

#[test]
fn physics_failures_map_to_codes() {
    let h = Handle::new(HkScenario::TransmitterPs, 0.0, 3.0);
    let mut opt = HkOptimum::default();
    unsafe {
        assert_eq!(hk_config_set_channel(h.0, HkChannel::VacuumEnvironment), HkStatus::Ok);
        assert_eq!(hk_optimize_kappa(h.0, HkObjective::LogNegativity, &mut opt), HkStatus::NoFeasibleKappa);
    }
}

#[test]
fn optimize_kappa_inside_unit_interval() {
    let h = Handle::new(HkScenario::ReceiverQs, 3.0, 5.0);
    let mut opt = HkOptimum::default();
    unsafe {
        assert_eq!(hk_config_set_channel(h.0, HkChannel::VacuumEnvironment), HkStatus::Ok);
        assert_eq!(hk_optimize_kappa(h.0, HkObjective::LogNegativity, &mut opt), HkStatus::Ok);
    }
    assert!(opt.kappa > 0.0 && opt.kappa < 1.0 && opt.value > 0.0);
}

#[test]
fn null_pointers_are_reported() {
    let h = Handle::new(HkScenario::Tmsv, 1.0, 1.0);
    unsafe {
        assert_eq!(hk_key_rate(ptr::null(), &mut HkKeyRate::default()), HkStatus::NullPointer);
        assert_eq!(hk_key_rate(h.0, ptr::null_mut()), HkStatus::NullPointer);
        assert_eq!(last_error().as_deref(), Some("out is null"));
        assert_eq!(hk_config_set_loss_db(ptr::null_mut(), 1.0), HkStatus::NullPointer);
        hk_config_free(ptr::null_mut());
        assert!(hk_config_clone(ptr::null()).is_null());
    }
    assert!(hk_config_new(HkScenario::Tmsv, -1.0, 0.0).is_null());
    assert!(last_error().unwrap().contains("squeezing_db"));
}

#[test]
fn clone_is_independent() {
    let h = Handle::new(HkScenario::Tmsv, 3.0, 2.0);
    let copy = Handle(unsafe { hk_config_clone(h.0) });
    let (mut a, mut b) = (HkKeyRate::default(), HkKeyRate::default());
    unsafe {
        assert_eq!(hk_config_set_loss_db(copy.0, 8.0), HkStatus::Ok);
        hk_key_rate(h.0, &mut a);
        hk_key_rate(copy.0, &mut b);
    }
    assert!(a.k_raw > b.k_raw);
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(hk_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cxx() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/heraldkey.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["hk_config_new", "hk_config_set_cutoff", "hk_key_rate", "hk_evaluate", "hk_last_error"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(status) = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .status()
        else {
            eprintln!("{compiler} not found; skipping");
            continue;
        };
        assert!(status.success(), "{compiler} rejected the header");
    }
}

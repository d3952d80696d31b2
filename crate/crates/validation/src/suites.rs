use std::fmt::Debug;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use heraldkey::optics::{ChannelModel, Scenario, ScenarioConfig};
use heraldkey::sweep::DEFAULT_LOSS;

use crate::checks::{self, Check, Operation};

const SEED: [u8; 32] = *b"heraldkey property suites seed!!";

/// Seeded runner; identical across runs so failures reproduce.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        max_shrink_iters: 32,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

/// Runs `check` on `cases` values drawn from `strategy`.
pub fn run<S>(cases: u32, strategy: S, check: impl Fn(S::Value) -> Check) -> Check
where
    S: Strategy,
    S::Value: Debug,
{
    runner(cases)
        .run(&strategy, |v| check(v).map_err(TestCaseError::fail))
        .map_err(|e| e.to_string())
}

pub fn amplitudes(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len)
}

/// Any scenario on the Eve channel with default cutoffs.
pub fn scenario_config() -> impl Strategy<Value = ScenarioConfig> {
    (
        prop::sample::select(Scenario::ALL.to_vec()),
        0.0..8.0f64,
        0.0..15.0f64,
        0.5..0.99f64,
        0.02..0.5f64,
    )
        .prop_map(|(scenario, sq, loss, kappa_ps, kappa_qs)| {
            let mut cfg = ScenarioConfig::new(scenario, sq, loss);
            cfg.kappa_ps = kappa_ps;
            cfg.kappa_qs = kappa_qs;
            cfg
        })
}

pub fn operation() -> impl Strategy<Value = Operation> {
    prop_oneof![Just(Operation::Subtraction), Just(Operation::Scissors)]
}

pub fn channel() -> impl Strategy<Value = ChannelModel> {
    prop_oneof![Just(ChannelModel::EvePurification), Just(ChannelModel::VacuumEnvironment)]
}

/// One named group of properties with its default case budget.
pub struct Suite {
    pub name: &'static str,
    pub cases: u32,
    pub run: fn(u32) -> Check,
}

pub fn conservation(cases: u32) -> Check {
    run(cases, (amplitudes(6 * 3 * 6), 0.0..=1.0f64), |(p, t)| checks::splitter_conserves(&p, t))?;
    run(cases, (amplitudes(25), 0.0..=1.0f64), |(p, t)| checks::splitter_leak_accounting(&p, t))
}

pub fn heralding(cases: u32) -> Check {
    run(cases, (operation(), amplitudes(36), 0.01..0.99f64), |(op, p, k)| {
        checks::heralding_consistent(op, &p, k)
    })?;
    run(cases, (amplitudes(21), 0.01..0.99f64), |(p, k)| checks::scissors_truncates(&p, k))
}

pub fn symplectic_bound(cases: u32) -> Check {
    run(cases, scenario_config(), |cfg| checks::symplectic_at_least_one(&cfg))?;
    run(
        cases,
        ((1.0..5.0f64, 1.0..5.0f64), (-1.0..1.0f64, -1.0..1.0f64), 0.0..=1.0f64),
        |(nu, sq, t)| checks::symplectic_recovers_thermal(nu, sq, t),
    )
}

pub fn purity(cases: u32) -> Check {
    run(cases, (0.0..=8.0f64, 0.0..=20.0f64, channel()), |(sq, loss, ch)| {
        checks::pure_state_unit_spectrum(sq, loss, ch)
    })
}

pub fn holevo(cases: u32) -> Check {
    run(cases, scenario_config(), |cfg| checks::holevo_non_negative(&cfg))
}

/// Every scenario along the default loss grid at a random squeezing.
pub fn key_monotonicity(cases: u32) -> Check {
    let losses = DEFAULT_LOSS.values();
    run(cases, scenario_config(), |cfg| checks::key_rate_non_increasing(&cfg, &losses))
}

/// The suites the acceptance gate times.
pub const SUITES: [Suite; 6] = [
    Suite { name: "norm and photon-number conservation", cases: 64, run: conservation },
    Suite { name: "heralding consistency", cases: 64, run: heralding },
    Suite { name: "symplectic eigenvalues >= 1", cases: 24, run: symplectic_bound },
    Suite { name: "purity => unit symplectic spectrum", cases: 12, run: purity },
    Suite { name: "chi_BE >= 0", cases: 24, run: holevo },
    Suite { name: "key-rate monotonicity in loss", cases: 12, run: key_monotonicity },
];

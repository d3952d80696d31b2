use heraldkey::entanglement::log_negativity;
use heraldkey::fock::{Complex64, Ladder, ModeLabel, Monomial, MultiModeState};
use heraldkey::keyrate::{
    condition_on_homodyne, covariance_matrix, entropy_g, key_rate, key_rate_from_output,
    symplectic_eigenvalues, symplectic_spectrum, CovarianceMatrix, FORM_TOLERANCE,
};
use heraldkey::optics::{
    bs_kernel, photon_subtract, quantum_scissors, run_scenario, ChannelModel, Cutoffs, Scenario,
    ScenarioConfig, ScenarioOutput,
};
use heraldkey::sweep::{
    dominance_labels, evaluate, sweep, with_threads, write_csv, PointStatus, SweepGrid, SweepRecord,
};
use heraldkey::Error;
use nalgebra::{DMatrix, DVector};

use ModeLabel::*;

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn occupation(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut occ = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        occ[k] = idx % dims[k];
        idx /= dims[k];
    }
    occ
}

/// State on `modes` from `(re, im)` pairs in row-major order, keeping only
/// components with at most `max_photons` in total. `None` if nothing survives.
pub fn state_from_parts(
    modes: &[ModeLabel],
    cutoffs: &[usize],
    parts: &[(f64, f64)],
    max_photons: usize,
) -> Option<MultiModeState> {
    let dims: Vec<usize> = cutoffs.iter().map(|c| c + 1).collect();
    let amps: Vec<Complex64> = parts
        .iter()
        .enumerate()
        .map(|(i, &(re, im))| {
            if occupation(i, &dims).iter().sum::<usize>() <= max_photons {
                Complex64::new(re, im)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let state = MultiModeState::from_amplitudes(modes, cutoffs, amps, 0.0).ok()?;
    (state.norm_sqr() > 1e-6).then(|| state.normalized())
}

/// `sum_n n |psi_n|^2` over all modes, not normalized.
pub fn photon_total(state: &MultiModeState) -> f64 {
    let dims = state.dims();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, z)| occupation(i, &dims).iter().sum::<usize>() as f64 * z.norm_sqr())
        .sum()
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Runs a scenario; a failed herald yields `None`.
fn run(cfg: &ScenarioConfig) -> Result<Option<ScenarioOutput>, String> {
    match run_scenario(cfg) {
        Ok(out) => Ok(Some(out)),
        Err(Error::HeraldFailure { .. }) => Ok(None),
        Err(e) => Err(err(e)),
    }
}

/// A splitter with room for every photon keeps the norm and the photon number.
pub fn splitter_conserves(parts: &[(f64, f64)], t: f64) -> Check {
    let cut = 5;
    let Some(psi) = state_from_parts(&[A, E, B], &[cut, 2, cut], parts, cut) else {
        return Ok(());
    };
    let out = psi
        .apply_two_mode_kernel(&bs_kernel(t, cut, cut).map_err(err)?, A, B)
        .map_err(err)?;
    let leak = out.norm_leak() - psi.norm_leak();
    ensure!(leak < 1e-10, "leak increment {leak:e}");
    let dn = (out.norm_sqr() - psi.norm_sqr()).abs();
    ensure!(dn < 1e-10, "norm changed by {dn:e}");
    let dp = (photon_total(&out) - photon_total(&psi)).abs();
    ensure!(dp < 1e-8, "photon number changed by {dp:e}");
    Ok(())
}

/// With truncation, the photon-number change is bounded by the leaked
/// probability times the largest photon count that can leak.
pub fn splitter_leak_accounting(parts: &[(f64, f64)], t: f64) -> Check {
    let cut = 4;
    let Some(psi) = state_from_parts(&[A, B], &[cut, cut], parts, 2 * cut) else {
        return Ok(());
    };
    let out = psi
        .apply_two_mode_kernel(&bs_kernel(t, cut, cut).map_err(err)?, A, B)
        .map_err(err)?;
    let leak = out.norm_leak() - psi.norm_leak();
    let ledger = (psi.norm_sqr() - out.norm_sqr() - leak).abs();
    ensure!(ledger < 1e-10, "norm ledger off by {ledger:e}");
    let dp = (photon_total(&out) - photon_total(&psi)).abs();
    let bound = 1e-8 + leak * (2 * cut) as f64;
    ensure!(dp <= bound, "photon number changed by {dp:e}, leak allows {bound:e}");
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operation {
    Subtraction,
    Scissors,
}

/// The reported success probability equals both the projector expectation on
/// the detected modes and the squared norm of the unnormalized branch, and
/// matches the photon-statistics closed form of the operation.
pub fn heralding_consistent(op: Operation, parts: &[(f64, f64)], kappa: f64) -> Check {
    let cut = 5;
    let Some(psi) = state_from_parts(&[A, B], &[cut, cut], parts, 2 * cut) else {
        return Ok(());
    };
    let p_b = psi.photon_distribution(B).map_err(err)?;
    let norm = psi.norm_sqr();
    let (reported, p_norm, p_trace, closed) = match op {
        Operation::Subtraction => {
            let outcome = match photon_subtract(&psi, B, kappa, 2) {
                Ok(o) => o,
                Err(Error::HeraldFailure { .. }) => return Ok(()),
                Err(e) => return Err(err(e)),
            };
            let tap = MultiModeState::vacuum(&[D], &[2]).map_err(err)?;
            let joint = psi
                .tensor(&tap)
                .and_then(|j| j.apply_two_mode_kernel(&bs_kernel(kappa, cut, 2)?, B, D))
                .map_err(err)?;
            let p_norm = joint.project(D, 1).map_err(err)?.norm_sqr() / norm;
            let rho_d = joint.partial_trace(&[D]).map_err(err)?;
            let p_trace = rho_d.matrix()[(1, 1)].re / norm;
            let closed: f64 = p_b
                .iter()
                .enumerate()
                .map(|(n, p)| p * n as f64 * (1.0 - kappa) * kappa.powi(n as i32 - 1))
                .sum();
            (outcome.success_probability, p_norm, p_trace, closed)
        }
        Operation::Scissors => {
            let outcome = quantum_scissors(&psi, B, kappa, (2, 2)).map_err(err)?;
            let ancilla = MultiModeState::basis(&[C, CPrime], &[2, 2], &[1, 0]).map_err(err)?;
            let joint = psi
                .tensor(&ancilla)
                .and_then(|j| j.apply_two_mode_kernel(&bs_kernel(kappa, 2, 2)?, C, CPrime))
                .and_then(|j| j.apply_two_mode_kernel(&bs_kernel(0.5, cut, 2)?, B, C))
                .map_err(err)?;
            let branch = |b, c| -> Result<f64, String> {
                Ok(joint.project(B, b).and_then(|s| s.project(C, c)).map_err(err)?.norm_sqr())
            };
            let p_norm = (branch(0, 1)? + branch(1, 0)?) / norm;
            // (n_B, n_C) = (0, 1) and (1, 0) in a 3-level C
            let rho = joint.partial_trace(&[B, C]).map_err(err)?;
            let p_trace = (rho.matrix()[(1, 1)].re + rho.matrix()[(3, 3)].re) / norm;
            let closed = kappa * p_b[0] + (1.0 - kappa) * p_b[1];
            (outcome.success_probability, p_norm, p_trace, closed)
        }
    };
    for (what, value) in [("branch norm", p_norm), ("projector trace", p_trace), ("closed form", closed)] {
        let d = (reported - value).abs();
        ensure!(d < 1e-10, "success probability {reported} vs {what} {value} (diff {d:e})");
    }
    Ok(())
}

/// Scissors output never populates Fock levels above one, whatever the input.
pub fn scissors_truncates(parts: &[(f64, f64)], kappa: f64) -> Check {
    let cut = 20;
    let Some(psi) = state_from_parts(&[B], &[cut], parts, cut) else {
        return Ok(());
    };
    let outcome = match quantum_scissors(&psi, B, kappa, (2, cut)) {
        Ok(o) => o,
        Err(Error::HeraldFailure { .. }) => return Ok(()),
        Err(e) => return Err(err(e)),
    };
    let high: f64 = outcome.state.photon_distribution(B).map_err(err)?[2..].iter().sum();
    ensure!(high <= 1e-12, "population {high:e} above one photon");
    Ok(())
}

fn all_subsets(modes: &[ModeLabel]) -> Vec<Vec<ModeLabel>> {
    let mut out = vec![modes.to_vec()];
    for i in 0..modes.len() {
        for j in i + 1..modes.len() {
            out.push(vec![modes[i], modes[j]]);
        }
    }
    out
}

fn gaussian_modes(state: &MultiModeState) -> Vec<ModeLabel> {
    state
        .modes()
        .iter()
        .copied()
        .filter(|m| [A, B, E, F, EPrime].contains(m))
        .collect()
}

/// Every covariance matrix extracted from a scenario output, joint or
/// reduced to a pair, has symplectic eigenvalues at least one.
pub fn symplectic_at_least_one(cfg: &ScenarioConfig) -> Check {
    let Some(out) = run(cfg)? else { return Ok(()) };
    for modes in all_subsets(&gaussian_modes(&out.state)) {
        let cov = covariance_matrix(&out.state, &modes).map_err(err)?;
        let nus = symplectic_spectrum(&cov).map_err(err)?;
        ensure!(nus[0] >= 1.0 - 1e-9, "nu = {} on {modes:?}", nus[0]);
    }
    Ok(())
}

/// `S diag(nu) S^T` built from a splitter and two single-mode squeezers
/// returns the thermal spectrum it was built from.
pub fn symplectic_recovers_thermal(nu: (f64, f64), squeeze: (f64, f64), t: f64) -> Check {
    let sq = DMatrix::from_diagonal(&DVector::from_vec(vec![
        (-squeeze.0).exp(),
        squeeze.0.exp(),
        (-squeeze.1).exp(),
        squeeze.1.exp(),
    ]));
    let s = heraldkey::keyrate::gaussian::beam_splitter_symplectic(2, 0, 1, t) * sq;
    let thermal = DMatrix::from_diagonal(&DVector::from_vec(vec![nu.0, nu.0, nu.1, nu.1]));
    let m = &s * thermal * s.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let cov = CovarianceMatrix::new(vec![A, B], m, DVector::zeros(4)).map_err(err)?;
    let got = symplectic_eigenvalues(&cov).map_err(err)?;
    let mut want = [nu.0, nu.1];
    want.sort_by(f64::total_cmp);
    for (g, w) in got.iter().zip(want) {
        ensure!(*g >= 1.0 - 1e-9, "nu = {g}");
        ensure!((g - w).abs() < 1e-8 * w, "nu = {g}, expected {w}");
    }
    Ok(())
}

/// Cutoffs for the Gaussian purity check: wide on the squeezed and loss modes.
pub fn wide_cutoffs(n: usize) -> Cutoffs {
    Cutoffs::default().with(A, n).with(B, n).with(E, n).with(EPrime, n)
}

/// The joint state of the TMSV link is pure and Gaussian, so all symplectic
/// eigenvalues of its full covariance are one.
pub fn pure_state_unit_spectrum(squeezing_db: f64, loss_db: f64, channel: ChannelModel) -> Check {
    let cfg = ScenarioConfig::new(Scenario::Tmsv, squeezing_db, loss_db)
        .with_channel(channel)
        .with_cutoffs(wide_cutoffs(30));
    let out = run_scenario(&cfg).map_err(err)?;
    let modes = gaussian_modes(&out.state);
    let cov = covariance_matrix(&out.state, &modes).map_err(err)?;
    for nu in symplectic_spectrum(&cov).map_err(err)? {
        ensure!((nu - 1.0).abs() <= 1e-5, "nu = {nu} on {modes:?}");
    }
    Ok(())
}

/// Eve's Holevo term is non-negative and conditioning on B never raises her
/// entropy sum.
pub fn holevo_non_negative(cfg: &ScenarioConfig) -> Check {
    let Some(out) = run(cfg)? else { return Ok(()) };
    let joint = covariance_matrix(&out.state, &[A, B, E, F]).map_err(err)?;
    let m_ef = joint.select(&[E, F]).map_err(err)?;
    let v_bb = joint.local_variance(B, FORM_TOLERANCE).map_err(err)?;
    let v_eb = joint.cross_scalar(E, B, false, FORM_TOLERANCE).map_err(err)?;
    let v_fb = joint.cross_scalar(F, B, true, FORM_TOLERANCE).map_err(err)?;
    let cond = condition_on_homodyne(&m_ef, v_bb, v_eb, v_fb).map_err(err)?;
    let g_sum = |m: &CovarianceMatrix| -> Result<f64, String> {
        Ok(symplectic_eigenvalues(m).map_err(err)?.into_iter().map(entropy_g).sum())
    };
    let (total, conditional) = (g_sum(&m_ef)?, g_sum(&cond)?);
    ensure!(conditional <= total + 1e-8, "conditional entropy sum {conditional} > {total}");
    let k = key_rate_from_output(cfg, &out).map_err(err)?;
    ensure!(k.chi_be >= -1e-8, "chi_BE = {}", k.chi_be);
    Ok(())
}

/// Raw key rate along a loss grid never increases.
pub fn key_rate_non_increasing(base: &ScenarioConfig, losses: &[f64]) -> Check {
    let mut prev: Option<(f64, f64)> = None;
    for &loss in losses {
        let mut cfg = base.clone();
        cfg.loss_db = loss;
        let k = match key_rate(&cfg) {
            Ok(b) => b.k_raw,
            Err(Error::HeraldFailure { .. }) => continue,
            Err(e) => return Err(err(e)),
        };
        if let Some((l0, k0)) = prev {
            ensure!(
                k <= k0,
                "{} at {} dB: K rises from {k0:e} at {l0} dB to {k:e} at {loss} dB",
                cfg.scenario,
                cfg.squeezing_db
            );
        }
        prev = Some((loss, k));
    }
    Ok(())
}

/// The stored raw key rate is reproduced bit for bit from the stored columns.
pub fn stored_rate_identity(cfg: &ScenarioConfig) -> Check {
    let rec = evaluate(cfg);
    if rec.status != PointStatus::Ok {
        return Ok(());
    }
    let (Some(p), Some(i), Some(chi), Some(k)) = (rec.p_s, rec.i_ab, rec.chi_be, rec.k_raw) else {
        return Err("missing key-rate columns".into());
    };
    let again = p * (cfg.reconciliation_efficiency * i - chi);
    ensure!(again.to_bits() == k.to_bits(), "stored {k:e}, recomputed {again:e}");
    Ok(())
}

fn negativity_ab(state: &MultiModeState) -> Result<f64, String> {
    let rho = state.partial_trace(&[A, B]).map_err(err)?;
    Ok(log_negativity(&rho).map_err(err)?.e_n)
}

/// A phase rotation on either mode leaves the log-negativity unchanged.
pub fn negativity_phase_invariant(cfg: &ScenarioConfig, mode: ModeLabel, phi: f64) -> Check {
    let Some(out) = run(cfg)? else { return Ok(()) };
    let before = negativity_ab(&out.state)?;
    let after = negativity_ab(&out.state.rotate(mode, phi).map_err(err)?)?;
    ensure!((before - after).abs() < 1e-8, "E_N {before} -> {after} after rotating {mode}");
    Ok(())
}

pub fn tmsv_negativity(squeezing_db: f64, loss_db: f64, cutoffs: Cutoffs) -> Result<f64, String> {
    let cfg = ScenarioConfig::new(Scenario::Tmsv, squeezing_db, loss_db)
        .with_channel(ChannelModel::VacuumEnvironment)
        .with_cutoffs(cutoffs);
    negativity_ab(&run_scenario(&cfg).map_err(err)?.state)
}

/// Fock-path log-negativity of TMSV plus loss never grows with loss.
pub fn negativity_non_increasing_in_loss(squeezing_db: f64, losses: &[f64]) -> Check {
    let mut prev = f64::INFINITY;
    for &loss in losses {
        let e = tmsv_negativity(squeezing_db, loss, Cutoffs::default())?;
        ensure!(e <= prev, "E_N rises to {e} at {loss} dB ({squeezing_db} dB squeezing)");
        prev = e;
    }
    Ok(())
}

/// Fock-path log-negativity of TMSV grows strictly with squeezing.
pub fn negativity_increasing_in_squeezing(loss_db: f64, squeezings: &[f64]) -> Check {
    let mut prev = f64::NEG_INFINITY;
    for &sq in squeezings {
        let e = tmsv_negativity(sq, loss_db, Cutoffs::default())?;
        ensure!(e > prev, "E_N does not grow at {sq} dB ({loss_db} dB loss)");
        prev = e;
    }
    Ok(())
}

/// Tracing out an uncorrelated ancilla returns the original operator.
pub fn trace_undoes_tensor(system: &[(f64, f64)], ancilla: &[(f64, f64)]) -> Check {
    let (Some(s), Some(a)) = (
        state_from_parts(&[A], &[3], system, 3),
        state_from_parts(&[B], &[2], ancilla, 2),
    ) else {
        return Ok(());
    };
    let reduced = s.tensor(&a).and_then(|j| j.partial_trace(&[A])).map_err(err)?;
    let direct = s.density().map_err(err)?;
    let d = max_abs_diff(reduced.matrix(), direct.matrix());
    ensure!(d <= 1e-12, "entrywise difference {d:e}");
    Ok(())
}

/// Partial transposition is an involution and leaves both the trace and the
/// partial trace over the transposed mode unchanged.
pub fn partial_transpose_laws(parts: &[(f64, f64)]) -> Check {
    let Some(psi) = state_from_parts(&[A, B], &[3, 2], parts, 5) else {
        return Ok(());
    };
    let rho = psi.density().map_err(err)?;
    let pt = rho.partial_transpose(&[B]).map_err(err)?;
    let back = pt.partial_transpose(&[B]).map_err(err)?;
    ensure!(back.matrix() == rho.matrix(), "transposing twice changed the operator");
    let dt = (pt.trace() - rho.trace()).norm();
    ensure!(dt <= 1e-12, "trace changed by {dt:e}");
    let reduced_pt = pt.partial_trace(&[A]).map_err(err)?;
    let reduced = rho.partial_trace(&[A]).map_err(err)?;
    let d = max_abs_diff(reduced_pt.matrix(), reduced.matrix());
    ensure!(d <= 1e-12, "partial trace differs by {d:e}");
    Ok(())
}

/// `<M>* = <M^+>` for ladder monomials, on state vectors and density operators.
pub fn expectation_conjugate_symmetric(parts: &[(f64, f64)], ops: &[(bool, bool)]) -> Check {
    let Some(psi) = state_from_parts(&[A, B], &[3, 3], parts, 6) else {
        return Ok(());
    };
    let m = Monomial::new(
        ops.iter()
            .map(|&(create, on_a)| {
                let mode = if on_a { A } else { B };
                if create {
                    Ladder::create(mode)
                } else {
                    Ladder::annihilate(mode)
                }
            })
            .collect(),
    );
    let rho = psi.density().map_err(err)?;
    let pairs = [
        (psi.expectation(&m), psi.expectation(&m.dagger())),
        (rho.expectation(&m), rho.expectation(&m.dagger())),
    ];
    for (x, y) in pairs {
        let (x, y) = (x.map_err(err)?, y.map_err(err)?);
        let d = (x.conj() - y).norm();
        ensure!(d <= 1e-12 * x.norm().max(1.0), "<M>* = {} but <M+> = {y}", x.conj());
    }
    Ok(())
}

fn reduced_ab(cfg: &ScenarioConfig) -> Result<Option<DMatrix<Complex64>>, String> {
    Ok(match run(cfg)? {
        Some(out) => Some(out.state.partial_trace(&[A, B]).map_err(err)?.matrix().clone()),
        None => None,
    })
}

fn compare_ab(a: &ScenarioConfig, b: &ScenarioConfig, tol: f64) -> Check {
    match (reduced_ab(a)?, reduced_ab(b)?) {
        (None, None) => Ok(()),
        (Some(x), Some(y)) => {
            ensure!(x.shape() == y.shape(), "shapes {:?} and {:?}", x.shape(), y.shape());
            let d = max_abs_diff(&x, &y);
            ensure!(d <= tol, "rho_AB differs by {d:e}");
            Ok(())
        }
        _ => Err("only one of the two pipelines heralded".into()),
    }
}

/// A vacuum environment and an Eve pair at unit variance give the same
/// A-B state.
pub fn channel_models_agree(cfg: &ScenarioConfig) -> Check {
    let vacuum = cfg.clone().with_channel(ChannelModel::VacuumEnvironment);
    let mut eve = cfg.clone().with_channel(ChannelModel::EvePurification);
    eve.eve_variance = 1.0;
    compare_ab(&vacuum, &eve, 1e-8)
}

/// Without loss it does not matter on which side the heralded operation sits.
pub fn sides_agree_without_loss(op: Operation, cfg: &ScenarioConfig) -> Check {
    let (rx, tx) = match op {
        Operation::Subtraction => (Scenario::ReceiverPs, Scenario::TransmitterPs),
        Operation::Scissors => (Scenario::ReceiverQs, Scenario::TransmitterQs),
    };
    let mut a = cfg.clone();
    a.loss_db = 0.0;
    a.scenario = rx;
    let mut b = a.clone();
    b.scenario = tx;
    compare_ab(&a, &b, 1e-8)
}

fn csv_bytes(records: &[SweepRecord]) -> Result<Vec<u8>, String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, records, None, false).map_err(err)?;
    Ok(buf)
}

/// The same grid gives byte-identical CSV on one worker and on several.
pub fn sweep_deterministic(grid: &SweepGrid, threads: usize) -> Check {
    let one = with_threads(Some(1), || sweep(grid)).map_err(err)?.map_err(err)?;
    let many = with_threads(Some(threads), || sweep(grid)).map_err(err)?.map_err(err)?;
    ensure!(
        csv_bytes(&one)? == csv_bytes(&many)?,
        "CSV differs between 1 and {threads} threads"
    );
    Ok(())
}

/// The dominance label is the argmax of the effective key rate, and `none`
/// exactly where no scenario has a positive raw rate.
pub fn dominance_consistent(records: &[SweepRecord]) -> Check {
    let labels = dominance_labels(records);
    for (r, label) in records.iter().zip(&labels) {
        let peers: Vec<&SweepRecord> = records
            .iter()
            .filter(|o| o.squeezing_db == r.squeezing_db && o.loss_db == r.loss_db)
            .collect();
        let any_key = peers.iter().any(|o| o.k_raw.is_some_and(|k| k > 0.0));
        if label == "none" {
            ensure!(!any_key, "no label at ({}, {}) despite a positive key", r.squeezing_db, r.loss_db);
            continue;
        }
        ensure!(any_key, "label {label} in a zero-key region");
        let winner = peers
            .iter()
            .find(|o| o.scenario.name() == label)
            .ok_or_else(|| format!("label {label} names no record"))?;
        let best = winner.k_effective.unwrap_or(f64::NAN);
        for o in &peers {
            if let Some(k) = o.k_effective {
                ensure!(best >= k, "{label} ({best:e}) below {} ({k:e})", o.scenario);
            }
        }
    }
    Ok(())
}

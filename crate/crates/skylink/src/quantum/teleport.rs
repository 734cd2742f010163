//! Teleportation of a single polarization qubit through a shared pair.
//!
//! The shared channel convention is the singlet (Psi-) pair, for which the
//! joint input-channel state decomposes over the Bell basis of the first
//! two qubits so that each measurement outcome maps to a fixed Pauli
//! correction on the receiver qubit:
//!
//! psi-  -> identity,  psi+ -> Z,  phi- -> X,  phi+ -> Z X.
//!
//! A full Bell-state measurement resolves all four outcomes; a
//! linear-optics measurement identifies psi- (and optionally psi+), the
//! remaining outcomes being inconclusive.

use super::mat::{cr, CMat, C64};
use super::{BellState, QuantumError, TwoQubitState};
use crate::util::Seeder;
use rand::Rng;

/// Maximum fidelity reachable by classically measuring a single copy and
/// re-preparing: 2/3.
pub const CLASSICAL_FIDELITY_LIMIT: f64 = 2.0 / 3.0;

/// Bell-state-measurement outcome on the input and near channel qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellOutcome {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PsiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PhiPlus,
    ];

    fn bell_state(self) -> BellState {
        match self {
            BellOutcome::PsiMinus => BellState::PsiMinus,
            BellOutcome::PsiPlus => BellState::PsiPlus,
            BellOutcome::PhiMinus => BellState::PhiMinus,
            BellOutcome::PhiPlus => BellState::PhiPlus,
        }
    }

    /// Pauli correction for the singlet-channel convention.
    pub fn correction(self) -> PauliCorrection {
        match self {
            BellOutcome::PsiMinus => PauliCorrection::Identity,
            BellOutcome::PsiPlus => PauliCorrection::Z,
            BellOutcome::PhiMinus => PauliCorrection::X,
            BellOutcome::PhiPlus => PauliCorrection::ZX,
        }
    }
}

/// Receiver-side Pauli correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliCorrection {
    Identity,
    Z,
    X,
    ZX,
}

impl PauliCorrection {
    pub fn matrix(self) -> CMat {
        let x = CMat::from_rows(&[&[cr(0.0), cr(1.0)], &[cr(1.0), cr(0.0)]]);
        let z = CMat::from_rows(&[&[cr(1.0), cr(0.0)], &[cr(0.0), cr(-1.0)]]);
        match self {
            PauliCorrection::Identity => CMat::identity(2),
            PauliCorrection::Z => z,
            PauliCorrection::X => x,
            PauliCorrection::ZX => z.mul(&x),
        }
    }
}

/// Bell-state-measurement capability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsmMode {
    /// All four outcomes resolved.
    Full,
    /// Linear optics identifying psi- only (success probability 1/4).
    LinearOpticsPsiMinus,
    /// Linear optics identifying psi- and psi+ (success probability 1/2).
    LinearOpticsTwoOutcome,
}

impl BsmMode {
    fn identifies(self, outcome: BellOutcome) -> bool {
        match self {
            BsmMode::Full => true,
            BsmMode::LinearOpticsPsiMinus => outcome == BellOutcome::PsiMinus,
            BsmMode::LinearOpticsTwoOutcome => matches!(outcome, BellOutcome::PsiMinus | BellOutcome::PsiPlus),
        }
    }
}

/// Result of one teleportation event.
#[derive(Debug, Clone)]
pub struct TeleportOutcome {
    /// The physical BSM outcome.
    pub bsm: BellOutcome,
    /// Whether the measurement apparatus identified the outcome.
    pub conclusive: bool,
    /// Applied correction (conclusive events only).
    pub correction: Option<PauliCorrection>,
    /// Receiver state after correction (conclusive events only).
    pub output: Option<CMat>,
    /// Fidelity of the output to the input state (conclusive events only).
    pub fidelity: Option<f64>,
}

fn normalize_input(input: [C64; 2]) -> Result<[C64; 2], QuantumError> {
    let norm = (input[0].norm_sqr() + input[1].norm_sqr()).sqrt();
    if norm < 1e-12 {
        return Err(QuantumError::InvalidParameter("input state has zero norm".into()));
    }
    Ok([input[0] / norm, input[1] / norm])
}

/// Outcome probabilities and corrected conditional outputs for all four
/// BSM results. Shared by the sampled and analytic paths.
fn teleport_branches(input: [C64; 2], channel: &TwoQubitState) -> Result<Vec<(BellOutcome, f64, CMat)>, QuantumError> {
    let input = normalize_input(input)?;
    let rho_in = CMat::outer(&input);
    let rho = rho_in.kron(&channel.rho);
    let mut branches = Vec::with_capacity(4);
    for outcome in BellOutcome::ALL {
        let proj4 = CMat::outer(&outcome.bell_state().amplitudes());
        let proj = proj4.kron(&CMat::identity(2));
        let projected = proj.mul(&rho).mul(&proj);
        let p = projected.trace().re;
        let reduced = projected.ptrace_keep(3, &[2]);
        let u = outcome.correction().matrix();
        let corrected = u.mul(&reduced).mul(&u.dagger());
        let normalized = if p > 1e-15 { corrected.scale(1.0 / p) } else { CMat::identity(2).scale(0.5) };
        branches.push((outcome, p.max(0.0), normalized));
    }
    Ok(branches)
}

fn fidelity_to_pure(input: [C64; 2], rho: &CMat) -> f64 {
    let mut f = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            f += input[i].conj() * rho[(i, j)] * input[j];
        }
    }
    f.re
}

/// Teleport `input` through `channel`, sampling one BSM outcome.
pub fn teleport(input: [C64; 2], channel: &TwoQubitState, mode: BsmMode, seed: u64) -> Result<TeleportOutcome, QuantumError> {
    let input = normalize_input(input)?;
    let branches = teleport_branches(input, channel)?;
    let total: f64 = branches.iter().map(|b| b.1).sum();
    let mut rng = Seeder::new(seed).rng("teleport", 0);
    let mut u = rng.gen::<f64>() * total;
    let mut chosen = branches.len() - 1;
    for (i, b) in branches.iter().enumerate() {
        if u < b.1 {
            chosen = i;
            break;
        }
        u -= b.1;
    }
    let (outcome, _, output) = branches.into_iter().nth(chosen).unwrap();
    let conclusive = mode.identifies(outcome);
    if conclusive {
        let f = fidelity_to_pure(input, &output);
        Ok(TeleportOutcome {
            bsm: outcome,
            conclusive,
            correction: Some(outcome.correction()),
            output: Some(output),
            fidelity: Some(f),
        })
    } else {
        Ok(TeleportOutcome {
            bsm: outcome,
            conclusive,
            correction: None,
            output: None,
            fidelity: None,
        })
    }
}

/// Deterministic outcome-averaged teleportation fidelity for a pure input.
pub fn teleport_average_fidelity(input: [C64; 2], channel: &TwoQubitState) -> Result<f64, QuantumError> {
    let input = normalize_input(input)?;
    let branches = teleport_branches(input, channel)?;
    Ok(branches.iter().map(|(_, p, rho)| p * fidelity_to_pure(input, rho)).sum())
}

/// Fidelity of one input state in the six-state benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFidelity {
    pub label: &'static str,
    pub fidelity: f64,
    pub stderr: f64,
    pub events: u64,
}

/// Result of the six-input mutually-unbiased-basis benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityExperiment {
    pub per_state: Vec<StateFidelity>,
    pub mean_fidelity: f64,
    pub mean_stderr: f64,
    /// 2/3 comparator line for reports.
    pub classical_limit: f64,
}

/// The six mutually unbiased single-qubit inputs.
pub fn six_state_inputs() -> [(&'static str, [C64; 2]); 6] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        ("H", [cr(1.0), cr(0.0)]),
        ("V", [cr(0.0), cr(1.0)]),
        ("D", [cr(r), cr(r)]),
        ("A", [cr(r), cr(-r)]),
        ("R", [cr(r), C64::new(0.0, r)]),
        ("L", [cr(r), C64::new(0.0, -r)]),
    ]
}

/// Run the six-state teleportation benchmark.
///
/// Each event teleports through `channel` (full BSM with correction) and is
/// additionally replaced by white noise with probability `accidental_floor`
/// to model uncorrelated coincidences. Fidelity per input is estimated by
/// measuring the corrected output against the input projector; errors are
/// binomial.
pub fn teleport_fidelity_experiment(
    channel: &TwoQubitState,
    accidental_floor: f64,
    n_events: u64,
    seed: u64,
) -> Result<FidelityExperiment, QuantumError> {
    if n_events < 1 {
        return Err(QuantumError::InvalidParameter("need at least one event".into()));
    }
    if !(0.0..=1.0).contains(&accidental_floor) {
        return Err(QuantumError::InvalidParameter("accidental floor outside [0, 1]".into()));
    }
    let seeder = Seeder::new(seed);
    let inputs = six_state_inputs();
    let per = n_events / 6;
    let mut per_state = Vec::with_capacity(6);
    for (idx, (label, input)) in inputs.into_iter().enumerate() {
        let n = per + u64::from((n_events % 6) as usize > idx);
        let f_clean = teleport_average_fidelity(input, channel)?;
        let f_true = (1.0 - accidental_floor) * f_clean + accidental_floor * 0.5;
        let mut rng = seeder.rng("fidelity", idx as u64);
        let hits = crate::util::sample_count(n, f_true, &mut rng);
        let f_hat = hits as f64 / n as f64;
        let stderr = (f_hat * (1.0 - f_hat) / n as f64).sqrt();
        per_state.push(StateFidelity {
            label,
            fidelity: f_hat,
            stderr,
            events: n,
        });
    }
    let mean = per_state.iter().map(|s| s.fidelity).sum::<f64>() / 6.0;
    let mean_stderr = per_state.iter().map(|s| s.stderr * s.stderr).sum::<f64>().sqrt() / 6.0;
    Ok(FidelityExperiment {
        per_state,
        mean_fidelity: mean,
        mean_stderr,
        classical_limit: CLASSICAL_FIDELITY_LIMIT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;

    fn perfect_channel() -> TwoQubitState {
        TwoQubitState::bell(BellState::PsiMinus)
    }

    #[test]
    fn perfect_channel_full_bsm_is_exact() {
        for (label, input) in six_state_inputs() {
            for seed in 0..8 {
                let out = teleport(input, &perfect_channel(), BsmMode::Full, seed).unwrap();
                assert!(out.conclusive);
                let f = out.fidelity.unwrap();
                assert!((f - 1.0).abs() < 1e-12, "{label}: fidelity {f}");
            }
        }
    }

    #[test]
    fn bsm_outcomes_are_uniform() {
        let mut counts = [0u32; 4];
        for seed in 0..2000 {
            let out = teleport([cr(0.6), cr(0.8)], &perfect_channel(), BsmMode::Full, seed).unwrap();
            let idx = BellOutcome::ALL.iter().position(|o| *o == out.bsm).unwrap();
            counts[idx] += 1;
        }
        for c in counts {
            // 2000 trials, p = 1/4: mean 500, sigma ~19.4.
            assert!((420..=580).contains(&c), "counts {counts:?}");
        }
    }

    #[test]
    fn linear_optics_success_fractions() {
        let mut conclusive_one = 0u32;
        let mut conclusive_two = 0u32;
        let n: u32 = 20_000;
        for seed in 0..n {
            let one = teleport([cr(1.0), cr(0.0)], &perfect_channel(), BsmMode::LinearOpticsPsiMinus, u64::from(seed)).unwrap();
            conclusive_one += u32::from(one.conclusive);
            let two = teleport([cr(1.0), cr(0.0)], &perfect_channel(), BsmMode::LinearOpticsTwoOutcome, u64::from(seed)).unwrap();
            conclusive_two += u32::from(two.conclusive);
        }
        let f1 = f64::from(conclusive_one) / f64::from(n);
        let f2 = f64::from(conclusive_two) / f64::from(n);
        // 3-sigma binomial bands around 1/4 and 1/2.
        assert!((f1 - 0.25).abs() < 3.0 * (0.25f64 * 0.75 / f64::from(n)).sqrt(), "psi- fraction {f1}");
        assert!((f2 - 0.5).abs() < 3.0 * (0.25f64 / f64::from(n)).sqrt(), "two-outcome fraction {f2}");
    }

    #[test]
    fn werner_channel_average_fidelity() {
        // Analytic oracle: teleporting through a Werner channel of
        // parameter p yields average fidelity (1+p)/2 for any pure input.
        let mut rng = crate::util::Seeder::new(13).rng("inputs", 0);
        for p in [0.0, 0.3, 0.652, 0.9, 1.0] {
            let channel = TwoQubitState::werner(BellState::PsiMinus, p).unwrap();
            for _ in 0..5 {
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
                let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let input = [
                    cr((theta / 2.0).cos()),
                    C64::from_polar((theta / 2.0).sin(), phi),
                ];
                let f = teleport_average_fidelity(input, &channel).unwrap();
                assert_relative_eq!(f, (1.0 + p) / 2.0, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn noiseless_experiment_is_unit_fidelity() {
        let exp = teleport_fidelity_experiment(&perfect_channel(), 0.0, 6000, 1).unwrap();
        for s in &exp.per_state {
            assert_abs_diff_eq!(s.fidelity, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(exp.mean_fidelity, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(exp.classical_limit, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn noisy_experiment_matches_expected_mean() {
        let p = 0.652;
        let floor = 0.08;
        let channel = TwoQubitState::werner(BellState::PsiMinus, p).unwrap();
        let expected = (1.0 - floor) * (1.0 + p) / 2.0 + floor * 0.5;
        let exp = teleport_fidelity_experiment(&channel, floor, 911, 4).unwrap();
        assert!(
            (exp.mean_fidelity - expected).abs() < 3.0 * exp.mean_stderr.max(0.01),
            "mean {} vs expected {expected}",
            exp.mean_fidelity
        );
    }
}

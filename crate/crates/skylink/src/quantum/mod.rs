//! Two-qubit polarization states, CHSH Bell tests, and fidelity estimators.
//!
//! States live in the {|H>, |V>} basis per qubit. Analyzer angles are
//! physical polarizer rotations, so an analyzer at angle chi measures the
//! observable cos(2 chi) Z + sin(2 chi) X.

pub mod mat;
mod teleport;

pub use teleport::{
    teleport, teleport_fidelity_experiment, BellOutcome, BsmMode, FidelityExperiment, PauliCorrection, StateFidelity,
    TeleportOutcome, CLASSICAL_FIDELITY_LIMIT,
};

use crate::util::Seeder;
use mat::{cr, CMat, C64};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuantumError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// The four maximally entangled Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    /// Amplitudes in the |HH>, |HV>, |VH>, |VV> basis.
    pub fn amplitudes(self) -> [C64; 4] {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BellState::PhiPlus => [cr(r), cr(0.0), cr(0.0), cr(r)],
            BellState::PhiMinus => [cr(r), cr(0.0), cr(0.0), cr(-r)],
            BellState::PsiPlus => [cr(0.0), cr(r), cr(r), cr(0.0)],
            BellState::PsiMinus => [cr(0.0), cr(r), cr(-r), cr(0.0)],
        }
    }
}

/// A two-qubit density matrix (4x4, trace 1, positive semidefinite).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    pub rho: CMat,
}

impl TwoQubitState {
    pub fn from_matrix(rho: CMat) -> Result<Self, QuantumError> {
        if rho.n != 4 {
            return Err(QuantumError::InvalidState(format!("expected 4x4, got {0}x{0}", rho.n)));
        }
        let state = Self { rho };
        state.validate()?;
        Ok(state)
    }

    /// Pure Bell state.
    pub fn bell(which: BellState) -> Self {
        Self {
            rho: CMat::outer(&which.amplitudes()),
        }
    }

    /// Werner mixture: p * |bell><bell| + (1-p) * I/4.
    pub fn werner(which: BellState, p: f64) -> Result<Self, QuantumError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(QuantumError::InvalidParameter(format!("Werner p {p} outside [0, 1]")));
        }
        let pure = CMat::outer(&which.amplitudes()).scale(p);
        let mixed = CMat::identity(4).scale((1.0 - p) / 4.0);
        Ok(Self { rho: pure.add(&mixed) })
    }

    /// Maximally mixed two-qubit state.
    pub fn maximally_mixed() -> Self {
        Self {
            rho: CMat::identity(4).scale(0.25),
        }
    }

    /// Mix with white noise: (1-f) rho + f I/4.
    pub fn with_white_noise(&self, f: f64) -> Self {
        Self {
            rho: self.rho.scale(1.0 - f).add(&CMat::identity(4).scale(f / 4.0)),
        }
    }

    /// Trace, Hermiticity, and positivity checks.
    pub fn validate(&self) -> Result<(), QuantumError> {
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(QuantumError::InvalidState(format!("trace {tr} != 1")));
        }
        if !self.rho.is_hermitian(1e-9) {
            return Err(QuantumError::InvalidState("not Hermitian".into()));
        }
        let min_eig = self.rho.hermitian_eigenvalues()[0];
        if min_eig < -1e-10 {
            return Err(QuantumError::InvalidState(format!("negative eigenvalue {min_eig}")));
        }
        Ok(())
    }

    /// Fidelity <bell|rho|bell> to a Bell state.
    pub fn fidelity_to(&self, which: BellState) -> f64 {
        let amps = which.amplitudes();
        let mut f = C64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                f += amps[i].conj() * self.rho[(i, j)] * amps[j];
            }
        }
        f.re
    }
}

/// Werner parameter from a measured Bell-state fidelity: p = (4F - 1)/3.
pub fn werner_p_from_fidelity(fidelity: f64) -> f64 {
    (4.0 * fidelity - 1.0) / 3.0
}

/// Polarization analyzer observable at angle `chi`:
/// A(chi) = cos(2 chi) Z + sin(2 chi) X.
pub fn analyzer(chi_rad: f64) -> CMat {
    let c2 = (2.0 * chi_rad).cos();
    let s2 = (2.0 * chi_rad).sin();
    CMat::from_rows(&[&[cr(c2), cr(s2)], &[cr(s2), cr(-c2)]])
}

/// Projector onto the +-1 outcome of `analyzer(chi)`.
fn analyzer_projector(chi_rad: f64, outcome_plus: bool) -> CMat {
    let a = analyzer(chi_rad);
    let sign = if outcome_plus { 1.0 } else { -1.0 };
    CMat::identity(2).add(&a.scale(sign)).scale(0.5)
}

/// Correlation E(a, b) = tr[rho (A(a) x A(b))].
pub fn correlation_e(state: &TwoQubitState, a_rad: f64, b_rad: f64) -> f64 {
    let ab = analyzer(a_rad).kron(&analyzer(b_rad));
    state.rho.mul(&ab).trace().re
}

/// The four analyzer-angle pairs of a CHSH measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

impl ChshSettings {
    /// Optimal settings for the Phi+/Phi- family in polarization angles:
    /// a in {0, 45 deg}, b in {22.5 deg, 67.5 deg}.
    pub fn optimal() -> Self {
        use std::f64::consts::PI;
        Self {
            a1: 0.0,
            a2: PI / 4.0,
            b1: PI / 8.0,
            b2: 3.0 * PI / 8.0,
        }
    }

    pub fn pairs(&self) -> [(f64, f64); 4] {
        [(self.a1, self.b1), (self.a1, self.b2), (self.a2, self.b1), (self.a2, self.b2)]
    }
}

/// One measured correlation with its statistical error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationPoint {
    pub setting_a_rad: f64,
    pub setting_b_rad: f64,
    pub e: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// CHSH outcome: S = E(a1,b1) - E(a1,b2) + E(a2,b1) + E(a2,b2).
#[derive(Debug, Clone, PartialEq)]
pub struct ChshResult {
    pub s: f64,
    pub standard_error: f64,
    pub correlations: [CorrelationPoint; 4],
}

/// Analytic CHSH statistic for a state and settings.
pub fn chsh_analytic(state: &TwoQubitState, settings: ChshSettings) -> f64 {
    let [e11, e12, e21, e22] = settings.pairs().map(|(a, b)| correlation_e(state, a, b));
    e11 - e12 + e21 + e22
}

/// Sampled CHSH statistic: `n_trials` measurement rounds split evenly over
/// the four settings, with propagated counting errors.
pub fn chsh_sampled(state: &TwoQubitState, settings: ChshSettings, n_trials: u64, seed: u64) -> Result<ChshResult, QuantumError> {
    if n_trials < 1 {
        return Err(QuantumError::InvalidParameter("need at least one trial".into()));
    }
    let seeder = Seeder::new(seed);
    let pairs = settings.pairs();
    let mut correlations = Vec::with_capacity(4);
    for (idx, (a, b)) in pairs.into_iter().enumerate() {
        let n = n_trials / 4 + u64::from((n_trials % 4) as usize > idx);
        let mut rng = seeder.rng("chsh", idx as u64);
        // Joint outcome probabilities for (+,+), (+,-), (-,+), (-,-).
        let mut probs = [0.0; 4];
        for (k, (sa, sb)) in [(true, true), (true, false), (false, true), (false, false)].iter().enumerate() {
            let proj = analyzer_projector(a, *sa).kron(&analyzer_projector(b, *sb));
            probs[k] = state.rho.mul(&proj).trace().re.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        let mut counts = [0u64; 4];
        for _ in 0..n {
            let mut u = rng.gen::<f64>() * total;
            let mut k = 3;
            for (i, p) in probs.iter().enumerate() {
                if u < *p {
                    k = i;
                    break;
                }
                u -= p;
            }
            counts[k] += 1;
        }
        let nf = n as f64;
        let e = (counts[0] as f64 + counts[3] as f64 - counts[1] as f64 - counts[2] as f64) / nf;
        let stderr = ((1.0 - e * e).max(0.0) / nf).sqrt();
        correlations.push(CorrelationPoint {
            setting_a_rad: a,
            setting_b_rad: b,
            e,
            stderr,
            trials: n,
        });
    }
    let correlations: [CorrelationPoint; 4] = [correlations[0], correlations[1], correlations[2], correlations[3]];
    let s = correlations[0].e - correlations[1].e + correlations[2].e + correlations[3].e;
    let standard_error = correlations.iter().map(|c| c.stderr * c.stderr).sum::<f64>().sqrt();
    Ok(ChshResult {
        s,
        standard_error,
        correlations,
    })
}

/// Largest S reachable by deterministic local strategies (the classical
/// bound), by exhaustive enumeration of the 16 outcome assignments.
pub fn local_deterministic_max_s() -> f64 {
    let mut best = f64::NEG_INFINITY;
    for bits in 0..16u8 {
        let v = |k: u8| if bits >> k & 1 == 1 { 1.0 } else { -1.0 };
        let (a1, a2, b1, b2) = (v(0), v(1), v(2), v(3));
        best = best.max(a1 * b1 - a1 * b2 + a2 * b1 + a2 * b2);
    }
    best
}

/// How to combine the two measured visibilities into a fidelity estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityEstimator {
    /// Assume the state is Werner-like so the unmeasured basis has
    /// visibility sqrt(v_zz * v_xx); equal visibilities v give (1+3v)/4.
    WernerConsistent,
    /// Two-basis witness bound (v_zz + v_xx)/2.
    TwoBasisBound,
}

/// Bell-state fidelity from H/V and diagonal-basis visibilities.
pub fn fidelity_from_visibilities(v_zz: f64, v_xx: f64, estimator: FidelityEstimator) -> Result<f64, QuantumError> {
    for v in [v_zz, v_xx] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(QuantumError::InvalidParameter(format!("visibility {v} outside [-1, 1]")));
        }
    }
    Ok(match estimator {
        FidelityEstimator::WernerConsistent => {
            let v_yy = (v_zz * v_xx).max(0.0).sqrt();
            (1.0 + v_zz + v_xx + v_yy) / 4.0
        }
        FidelityEstimator::TwoBasisBound => (v_zz + v_xx) / 2.0,
    })
}

/// Matched-basis error rate under a partial intercept-resend attack: each
/// intercepted round contributes an error with probability 1/4.
pub fn intercept_resend_qber(base_qber: f64, fraction: f64) -> f64 {
    base_qber + 0.25 * fraction * (1.0 - 2.0 * base_qber)
}

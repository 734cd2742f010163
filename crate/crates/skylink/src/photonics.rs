//! Statistical models of photon sources, detectors, timing, and coincidence
//! counting shared by the protocol simulations.

use crate::util::erf;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PhotonicsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Weak-coherent-pulse decoy-state source.
#[derive(Debug, Clone, PartialEq)]
pub struct WcpSource {
    /// Pulse repetition rate, Hz.
    pub rep_rate_hz: f64,
    /// Mean photon numbers for signal, decoy, and vacuum pulses.
    pub mu_signal: f64,
    pub mu_decoy: f64,
    pub mu_vacuum: f64,
    /// Emission probabilities for (signal, decoy, vacuum); must sum to 1.
    pub state_probabilities: [f64; 3],
    /// Probability of choosing the Z basis.
    pub basis_bias: f64,
}

impl WcpSource {
    pub fn new(rep_rate_hz: f64, mu_signal: f64, mu_decoy: f64, probabilities: [f64; 3], basis_bias: f64) -> Result<Self, PhotonicsError> {
        if rep_rate_hz <= 0.0 {
            return Err(PhotonicsError::InvalidParameter("rep rate must be > 0".into()));
        }
        if !(mu_signal > mu_decoy && mu_decoy > 0.0) {
            return Err(PhotonicsError::InvalidParameter(format!(
                "need mu_signal > mu_decoy > mu_vacuum = 0, got {mu_signal} / {mu_decoy}"
            )));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || probabilities.iter().any(|p| *p < 0.0) {
            return Err(PhotonicsError::InvalidParameter("state probabilities must be a simplex".into()));
        }
        if !(0.0..=1.0).contains(&basis_bias) {
            return Err(PhotonicsError::InvalidParameter("basis bias must be in [0, 1]".into()));
        }
        Ok(Self {
            rep_rate_hz,
            mu_signal,
            mu_decoy,
            mu_vacuum: 0.0,
            state_probabilities: probabilities,
            basis_bias,
        })
    }
}

/// Entangled photon-pair source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdcSource {
    /// Emitted pairs per second.
    pub pair_rate_hz: f64,
    /// State fidelity to the target Bell state.
    pub fidelity: f64,
    /// Wavelength, m.
    pub wavelength_m: f64,
}

impl SpdcSource {
    pub fn new(pair_rate_hz: f64, fidelity: f64, wavelength_m: f64) -> Result<Self, PhotonicsError> {
        if pair_rate_hz < 0.0 {
            return Err(PhotonicsError::InvalidParameter("pair rate must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(PhotonicsError::InvalidParameter("fidelity must be in [0, 1]".into()));
        }
        Ok(Self {
            pair_rate_hz,
            fidelity,
            wavelength_m,
        })
    }
}

/// Single-photon detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    /// Detection efficiency in (0, 1].
    pub efficiency: f64,
    /// Dark-count rate at start of mission, counts/s.
    pub base_dark_rate_hz: f64,
    /// In-orbit radiation-induced dark-rate growth, counts/s/day, without
    /// mitigation (shielding and cooling bring it below 1 cps/day).
    pub radiation_increment_hz_per_day: f64,
    pub mitigated_increment_hz_per_day: f64,
    /// Non-paralyzable dead time, s.
    pub dead_time_s: f64,
}

impl DetectorModel {
    pub fn new(efficiency: f64, base_dark_rate_hz: f64) -> Result<Self, PhotonicsError> {
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(PhotonicsError::InvalidParameter(format!("detector efficiency {efficiency} outside (0, 1]")));
        }
        if base_dark_rate_hz < 0.0 {
            return Err(PhotonicsError::InvalidParameter("dark rate must be >= 0".into()));
        }
        Ok(Self {
            efficiency,
            base_dark_rate_hz,
            radiation_increment_hz_per_day: 219.0,
            mitigated_increment_hz_per_day: 1.0,
            dead_time_s: 50e-9,
        })
    }
}

/// Dark rate after `days` in orbit, with or without radiation mitigation.
pub fn dark_rate_after(det: &DetectorModel, days: f64, mitigated: bool) -> f64 {
    let increment = if mitigated {
        det.mitigated_increment_hz_per_day
    } else {
        det.radiation_increment_hz_per_day
    };
    det.base_dark_rate_hz + days * increment
}

/// Non-paralyzable dead-time correction: R' = R / (1 + R*tau).
pub fn dead_time_corrected(rate_hz: f64, dead_time_s: f64) -> f64 {
    rate_hz / (1.0 + rate_hz * dead_time_s)
}

/// Two-station time synchronization: combined Gaussian jitter and the
/// coincidence window applied around each pulse slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncModel {
    /// Synchronization pulse rate, Hz.
    pub pulse_rate_hz: f64,
    /// Combined timing jitter (one sigma), s.
    pub timing_jitter_s: f64,
    /// Full coincidence window width, s.
    pub coincidence_window_s: f64,
}

impl SyncModel {
    pub fn new(pulse_rate_hz: f64, timing_jitter_s: f64, coincidence_window_s: f64) -> Result<Self, PhotonicsError> {
        if coincidence_window_s <= 0.0 {
            return Err(PhotonicsError::InvalidParameter("coincidence window must be > 0".into()));
        }
        if timing_jitter_s < 0.0 {
            return Err(PhotonicsError::InvalidParameter("timing jitter must be >= 0".into()));
        }
        Ok(Self {
            pulse_rate_hz,
            timing_jitter_s,
            coincidence_window_s,
        })
    }

    /// Micius-like defaults: 10 kHz sync laser, 529 ps combined jitter,
    /// 2 ns signal window.
    pub fn reference() -> Self {
        Self {
            pulse_rate_hz: 10e3,
            timing_jitter_s: 529e-12,
            coincidence_window_s: 2e-9,
        }
    }
}

/// Fraction of Gaussian-jittered signal falling inside the +-w/2 window:
/// erf(w / (2*sqrt(2)*sigma)).
pub fn window_efficiency(sync: &SyncModel) -> f64 {
    if sync.timing_jitter_s == 0.0 {
        return 1.0;
    }
    erf(sync.coincidence_window_s / (2.0 * std::f64::consts::SQRT_2 * sync.timing_jitter_s))
}

/// Photon-number statistics of a weak coherent pulse with mean `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonNumberStats {
    pub mu: f64,
}

impl PhotonNumberStats {
    pub fn new(mu: f64) -> Result<Self, PhotonicsError> {
        if mu < 0.0 {
            return Err(PhotonicsError::InvalidParameter("mean photon number must be >= 0".into()));
        }
        Ok(Self { mu })
    }

    /// P(n) = e^-mu mu^n / n!.
    pub fn pmf(&self, n: u32) -> f64 {
        if self.mu == 0.0 {
            return if n == 0 { 1.0 } else { 0.0 };
        }
        let mut log_p = -self.mu + f64::from(n) * self.mu.ln();
        for k in 1..=n {
            log_p -= f64::from(k).ln();
        }
        log_p.exp()
    }

    pub fn p_zero(&self) -> f64 {
        (-self.mu).exp()
    }

    pub fn p_one(&self) -> f64 {
        self.mu * (-self.mu).exp()
    }

    /// Multi-photon probability P(n >= 2) = 1 - e^-mu (1 + mu).
    pub fn p_multi(&self) -> f64 {
        1.0 - (-self.mu).exp() * (1.0 + self.mu)
    }
}

/// Singles, coincidences, accidentals, and their ratio for one pass sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountRecord {
    pub singles_a_hz: f64,
    pub singles_b_hz: f64,
    pub coincidences_hz: f64,
    pub accidentals_hz: f64,
    pub snr: f64,
}

/// Analytic coincidence counting for a pair source over two links.
///
/// `eta_1`/`eta_2` are the full per-arm efficiencies (channel times
/// detector). Accidentals follow the usual S1*S2*w estimate; singles include
/// per-station background and dark counts with a non-paralyzable dead-time
/// correction.
pub fn coincidence_rates(
    src: &SpdcSource,
    eta_1: f64,
    eta_2: f64,
    detectors: [&DetectorModel; 2],
    sync: &SyncModel,
    background_hz: [f64; 2],
) -> Result<CountRecord, PhotonicsError> {
    for eta in [eta_1, eta_2] {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(PhotonicsError::InvalidParameter(format!("arm efficiency {eta} outside (0, 1]")));
        }
    }
    let f_window = window_efficiency(sync);
    let raw_singles = |eta: f64, det: &DetectorModel, bg: f64| -> f64 {
        dead_time_corrected(src.pair_rate_hz * eta + bg + det.base_dark_rate_hz, det.dead_time_s)
    };
    let singles_a = raw_singles(eta_1, detectors[0], background_hz[0]);
    let singles_b = raw_singles(eta_2, detectors[1], background_hz[1]);
    let coincidences = src.pair_rate_hz * eta_1 * eta_2 * f_window;
    let accidentals = singles_a * singles_b * sync.coincidence_window_s;
    let snr = if accidentals > 0.0 { coincidences / accidentals } else { f64::INFINITY };
    Ok(CountRecord {
        singles_a_hz: singles_a,
        singles_b_hz: singles_b,
        coincidences_hz: coincidences,
        accidentals_hz: accidentals,
        snr,
    })
}

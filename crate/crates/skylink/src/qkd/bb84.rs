//! Monte Carlo simulation of decoy-state BB84 over a lossy channel, and a
//! BBM92 coincidence generator for entanglement-based keys.

use super::{Basis, QkdError};
use crate::photonics::WcpSource;
use crate::util::Seeder;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Per-pulse record packed into one byte:
/// bits 0-1 intensity class (0 signal, 1 decoy, 2 vacuum), bit 2 Alice
/// basis (1 = Z), bit 3 Alice bit, bit 4 detected, bit 5 Bob basis,
/// bit 6 Bob bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PulseRecord(pub u8);

impl PulseRecord {
    #[allow(clippy::too_many_arguments)]
    fn pack(intensity: usize, a_basis: bool, a_bit: bool, detected: bool, b_basis: bool, b_bit: bool) -> Self {
        let mut v = intensity as u8 & 0b11;
        v |= u8::from(a_basis) << 2;
        v |= u8::from(a_bit) << 3;
        v |= u8::from(detected) << 4;
        v |= u8::from(b_basis) << 5;
        v |= u8::from(b_bit) << 6;
        PulseRecord(v)
    }

    pub fn intensity(&self) -> usize {
        (self.0 & 0b11) as usize
    }

    pub fn alice_basis(&self) -> Basis {
        if self.0 >> 2 & 1 == 1 {
            Basis::Z
        } else {
            Basis::X
        }
    }

    pub fn alice_bit(&self) -> bool {
        self.0 >> 3 & 1 == 1
    }

    pub fn detected(&self) -> bool {
        self.0 >> 4 & 1 == 1
    }

    pub fn bob_basis(&self) -> Basis {
        if self.0 >> 5 & 1 == 1 {
            Basis::Z
        } else {
            Basis::X
        }
    }

    pub fn bob_bit(&self) -> bool {
        self.0 >> 6 & 1 == 1
    }
}

/// Channel and receiver parameters for one BB84 run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bb84Channel {
    /// Total detection efficiency: channel times detector times timing
    /// window.
    pub detection_efficiency: f64,
    /// Probability of a noise click (dark + background) per pulse window.
    pub noise_click_probability: f64,
    /// Probability that a detected signal photon yields the wrong bit in a
    /// matched basis (optical misalignment).
    pub misalignment_error: f64,
    /// Bob's probability of choosing the Z basis.
    pub bob_basis_bias: f64,
    /// Fraction of pulses intercepted and resent by an eavesdropper.
    pub intercept_fraction: f64,
}

impl Bb84Channel {
    pub fn new(detection_efficiency: f64, noise_click_probability: f64, misalignment_error: f64) -> Result<Self, QkdError> {
        if !(detection_efficiency > 0.0 && detection_efficiency <= 1.0) {
            return Err(QkdError::InvalidParameter(format!(
                "detection efficiency {detection_efficiency} outside (0, 1]"
            )));
        }
        if !(0.0..1.0).contains(&noise_click_probability) {
            return Err(QkdError::InvalidParameter("noise click probability outside [0, 1)".into()));
        }
        if !(0.0..=0.5).contains(&misalignment_error) {
            return Err(QkdError::InvalidParameter("misalignment error outside [0, 0.5]".into()));
        }
        Ok(Self {
            detection_efficiency,
            noise_click_probability,
            misalignment_error,
            bob_basis_bias: 0.5,
            intercept_fraction: 0.0,
        })
    }

    pub fn with_bob_bias(mut self, bias: f64) -> Self {
        self.bob_basis_bias = bias;
        self
    }

    pub fn with_intercept(mut self, fraction: f64) -> Self {
        self.intercept_fraction = fraction;
        self
    }
}

/// Raw per-pulse transcript of one BB84 run.
#[derive(Debug, Clone, PartialEq)]
pub struct Bb84Transcript {
    pub records: Vec<PulseRecord>,
    pub mu_signal: f64,
    pub mu_decoy: f64,
}

/// Pulses per deterministic work chunk. Fixed so that results are identical
/// for any worker count: chunk i always consumes the same derived stream.
const CHUNK_PULSES: u64 = 1 << 16;

/// Simulate `n_pulses` of decoy-state BB84. Chunks are independent derived
/// RNG streams evaluated in parallel and reassembled in order.
pub fn bb84_round(source: &WcpSource, channel: &Bb84Channel, n_pulses: u64, seed: u64) -> Result<Bb84Transcript, QkdError> {
    if n_pulses < 1 {
        return Err(QkdError::InvalidParameter("need at least one pulse".into()));
    }
    let seeder = Seeder::new(seed);
    let n_chunks = n_pulses.div_ceil(CHUNK_PULSES);
    let chunks: Vec<Vec<PulseRecord>> = (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = seeder.rng("bb84-chunk", ci);
            let count = CHUNK_PULSES.min(n_pulses - ci * CHUNK_PULSES);
            let mut out = Vec::with_capacity(count as usize);
            for _ in 0..count {
                out.push(simulate_pulse(source, channel, &mut rng));
            }
            out
        })
        .collect();
    let mut records = Vec::with_capacity(n_pulses as usize);
    for c in chunks {
        records.extend(c);
    }
    Ok(Bb84Transcript {
        records,
        mu_signal: source.mu_signal,
        mu_decoy: source.mu_decoy,
    })
}

fn simulate_pulse(source: &WcpSource, channel: &Bb84Channel, rng: &mut ChaCha8Rng) -> PulseRecord {
    // Alice's choices.
    let u: f64 = rng.gen();
    let (intensity, mu) = if u < source.state_probabilities[0] {
        (0, source.mu_signal)
    } else if u < source.state_probabilities[0] + source.state_probabilities[1] {
        (1, source.mu_decoy)
    } else {
        (2, source.mu_vacuum)
    };
    let a_basis = rng.gen::<f64>() < source.basis_bias;
    let a_bit = rng.gen::<bool>();

    // Optional intercept-resend: Eve measures in a random basis and resends
    // her outcome.
    let (fly_basis, fly_bit) = if channel.intercept_fraction > 0.0 && rng.gen::<f64>() < channel.intercept_fraction {
        let e_basis = rng.gen::<bool>();
        let e_bit = if e_basis == a_basis { a_bit } else { rng.gen::<bool>() };
        (e_basis, e_bit)
    } else {
        (a_basis, a_bit)
    };

    // Detection: photon statistics fold into 1 - exp(-mu*eta); noise clicks
    // are independent of the signal.
    let p_signal = if mu > 0.0 {
        1.0 - (-mu * channel.detection_efficiency).exp()
    } else {
        0.0
    };
    let p_click = p_signal + (1.0 - p_signal) * channel.noise_click_probability;
    let detected = p_click > 0.0 && rng.gen::<f64>() < p_click;
    if !detected {
        return PulseRecord::pack(intensity, a_basis, a_bit, false, false, false);
    }
    let signal_click = rng.gen::<f64>() < p_signal / p_click;
    let b_basis = rng.gen::<f64>() < channel.bob_basis_bias;
    let b_bit = if signal_click {
        if b_basis == fly_basis {
            fly_bit ^ (rng.gen::<f64>() < channel.misalignment_error)
        } else {
            rng.gen::<bool>()
        }
    } else {
        // Noise-only click: uniformly random outcome.
        rng.gen::<bool>()
    };
    PulseRecord::pack(intensity, a_basis, a_bit, true, b_basis, b_bit)
}

/// Analytic per-pulse probability that a pulse ends up in the sifted key
/// (detected, bases matched), split by intensity class.
pub fn analytic_sift_probability(source: &WcpSource, channel: &Bb84Channel) -> [f64; 3] {
    let p_match = source.basis_bias * channel.bob_basis_bias + (1.0 - source.basis_bias) * (1.0 - channel.bob_basis_bias);
    let mus = [source.mu_signal, source.mu_decoy, source.mu_vacuum];
    let mut out = [0.0; 3];
    for k in 0..3 {
        let p_signal = if mus[k] > 0.0 {
            1.0 - (-mus[k] * channel.detection_efficiency).exp()
        } else {
            0.0
        };
        let p_click = p_signal + (1.0 - p_signal) * channel.noise_click_probability;
        out[k] = source.state_probabilities[k] * p_click * p_match;
    }
    out
}

/// One recorded coincidence of an entanglement-based (BBM92) run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoincidenceEvent {
    pub a_basis: Basis,
    pub a_bit: u8,
    pub b_basis: Basis,
    pub b_bit: u8,
}

/// Transcript of detected coincidences.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceTranscript {
    pub events: Vec<CoincidenceEvent>,
}

/// Generate `n` BBM92 coincidences: both sides choose bases independently
/// (Z with the given biases); matched-basis outcomes are anticorrelated up
/// to `error_rate`.
pub fn bbm92_round(n: u64, error_rate: f64, a_z_bias: f64, b_z_bias: f64, seed: u64) -> CoincidenceTranscript {
    let mut rng = Seeder::new(seed).rng("bbm92", 0);
    let mut events = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let a_basis = if rng.gen::<f64>() < a_z_bias { Basis::Z } else { Basis::X };
        let b_basis = if rng.gen::<f64>() < b_z_bias { Basis::Z } else { Basis::X };
        let a_bit = u8::from(rng.gen::<bool>());
        let b_bit = if a_basis == b_basis {
            a_bit ^ u8::from(rng.gen::<f64>() < error_rate)
        } else {
            u8::from(rng.gen::<bool>())
        };
        events.push(CoincidenceEvent {
            a_basis,
            a_bit,
            b_basis,
            b_bit,
        });
    }
    CoincidenceTranscript { events }
}

//! Protocol state machines and key post-processing.
//!
//! Polarization encoding follows the usual convention: in the Z
//! (rectilinear) basis H = 0 and V = 1; in the X (diagonal) basis -45 deg
//! = 0 and +45 deg = 1.

mod amplify;
mod bb84;
mod cascade;
mod decoy;
mod key;
mod otp;

pub use amplify::{privacy_amplification, ToeplitzHash};
pub use bb84::{
    analytic_sift_probability, bb84_round, bbm92_round, Bb84Channel, Bb84Transcript, CoincidenceEvent,
    CoincidenceTranscript, PulseRecord,
};
pub use cascade::{error_correction, CascadeResult};
pub use decoy::{decoy_bounds, decoy_bounds_finite, DecoyBounds, DecoyStats, IntensityStats};
pub use key::{bbm92_asymptotic_rate, bbm92_finite_rate, secure_key_length, KeyLengthMode, SecureKeyResult};
pub use otp::{otp_decrypt, otp_encrypt, relay_exchange, KeyMaterial, RelayExchange};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QkdError {
    #[error("no matched-basis detections to sift")]
    EmptySift,
    #[error("decoy statistics missing intensity class: {0}")]
    InsufficientDecoyData(String),
    #[error("decoy bounds inconsistent: {0}")]
    InconsistentStatistics(String),
    #[error("reconciliation failed: {0}")]
    ReconciliationFailure(String),
    #[error("target length {target} exceeds input length {input}")]
    LengthError { target: usize, input: usize },
    #[error("key material length mismatch: {0} vs {1}")]
    KeyLengthMismatch(usize, usize),
    #[error("key {0} already consumed")]
    KeyReuse(String),
    #[error("key too short: need {need} bytes, have {have}")]
    ShortKey { need: usize, have: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Preparation/measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Z,
    X,
}

/// One encoded qubit: basis and classical bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisBit {
    pub basis: Basis,
    pub bit: u8,
}

impl BasisBit {
    /// Polarization angle of this encoding, degrees from horizontal.
    pub fn polarization_deg(&self) -> f64 {
        match (self.basis, self.bit) {
            (Basis::Z, 0) => 0.0,    // H
            (Basis::Z, _) => 90.0,   // V
            (Basis::X, 0) => -45.0,  // anti-diagonal
            (Basis::X, _) => 45.0,   // diagonal
        }
    }

    /// Inverse of `polarization_deg`.
    pub fn from_polarization_deg(angle: f64) -> Option<Self> {
        match angle as i64 {
            0 => Some(Self { basis: Basis::Z, bit: 0 }),
            90 => Some(Self { basis: Basis::Z, bit: 1 }),
            -45 => Some(Self { basis: Basis::X, bit: 0 }),
            45 => Some(Self { basis: Basis::X, bit: 1 }),
            _ => None,
        }
    }
}

/// Result of sifting a transcript: matched-basis keys and decoy statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SiftResult {
    pub sifted_bits: u64,
    pub error_bits: u64,
    pub qber: f64,
    pub decoy_stats: DecoyStats,
    /// Alice's and Bob's sifted keys from signal-intensity pulses, one bit
    /// per byte. Bob's copy still contains the channel errors.
    pub alice_key: Vec<u8>,
    pub bob_key: Vec<u8>,
}

/// Sift without the empty-transcript error: always returns the accumulated
/// statistics, even when nothing survived. Callers that require a non-empty
/// sift use [`sift_and_qber`].
pub fn sift_transcript(transcript: &Bb84Transcript) -> SiftResult {
    let mut stats = DecoyStats::new(transcript.mu_signal, transcript.mu_decoy);
    let mut alice_key = Vec::new();
    let mut bob_key = Vec::new();
    let mut sifted = 0u64;
    let mut errors = 0u64;
    for rec in &transcript.records {
        let k = rec.intensity();
        stats.classes[k].pulses += 1;
        if !rec.detected() {
            continue;
        }
        stats.classes[k].detections += 1;
        if rec.alice_basis() != rec.bob_basis() {
            continue;
        }
        let err = rec.alice_bit() != rec.bob_bit();
        stats.classes[k].sifted += 1;
        stats.classes[k].errors += u64::from(err);
        sifted += 1;
        errors += u64::from(err);
        if k == 0 {
            alice_key.push(rec.alice_bit() as u8);
            bob_key.push(rec.bob_bit() as u8);
        }
    }
    SiftResult {
        sifted_bits: sifted,
        error_bits: errors,
        qber: if sifted > 0 { errors as f64 / sifted as f64 } else { 0.0 },
        decoy_stats: stats,
        alice_key,
        bob_key,
    }
}

/// Sift a BB84 transcript: keep detections where bases match, estimate the
/// error rate, and accumulate per-intensity decoy statistics.
pub fn sift_and_qber(transcript: &Bb84Transcript) -> Result<SiftResult, QkdError> {
    let result = sift_transcript(transcript);
    if result.sifted_bits == 0 {
        return Err(QkdError::EmptySift);
    }
    Ok(result)
}

/// Sift a BBM92 coincidence transcript (no decoy classes).
pub fn sift_coincidences(transcript: &CoincidenceTranscript) -> Result<(u64, u64, f64, Vec<u8>, Vec<u8>), QkdError> {
    let mut sifted = 0u64;
    let mut errors = 0u64;
    let mut alice = Vec::new();
    let mut bob = Vec::new();
    for ev in &transcript.events {
        if ev.a_basis != ev.b_basis {
            continue;
        }
        sifted += 1;
        errors += u64::from(ev.a_bit != ev.b_bit);
        alice.push(ev.a_bit);
        bob.push(ev.b_bit);
    }
    if sifted == 0 {
        return Err(QkdError::EmptySift);
    }
    Ok((sifted, errors, errors as f64 / sifted as f64, alice, bob))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_bit_encoding_round_trip() {
        for basis in [Basis::Z, Basis::X] {
            for bit in [0u8, 1] {
                let bb = BasisBit { basis, bit };
                let angle = bb.polarization_deg();
                assert_eq!(BasisBit::from_polarization_deg(angle), Some(bb));
            }
        }
        assert_eq!(BasisBit::from_polarization_deg(30.0), None);
    }

    #[test]
    fn bbm92_sift_keeps_half_of_random_bases() {
        // 6208 coincidences with independent random bases sift to ~3100.
        let t = bbm92_round(6208, 0.022, 0.5, 0.5, 99);
        let (sifted, _, _, a, b) = sift_coincidences(&t).unwrap();
        let n: f64 = 6208.0;
        let sigma = (n * 0.25).sqrt();
        assert!(
            ((n / 2.0 - 4.0 * sigma)..=(n / 2.0 + 4.0 * sigma)).contains(&(sifted as f64)),
            "sifted {sifted}"
        );
        assert_eq!(a.len(), sifted as usize);
        assert_eq!(b.len(), sifted as usize);
    }

    #[test]
    fn bbm92_qber_matches_error_rate() {
        // 4.5% channel error: 3100 sifted bits carry ~140 errors.
        let t = bbm92_round(6208, 0.045, 0.5, 0.5, 7);
        let (sifted, errors, qber, _, _) = sift_coincidences(&t).unwrap();
        let expect = sifted as f64 * 0.045;
        let sigma = expect.sqrt();
        assert!(
            (errors as f64 - expect).abs() < 4.0 * sigma,
            "errors {errors} vs {expect}"
        );
        assert!((qber - 0.045).abs() < 0.02);
    }

    #[test]
    fn all_same_basis_sifts_every_detection() {
        let t = bbm92_round(500, 0.0, 1.0, 1.0, 3);
        let (sifted, errors, _, _, _) = sift_coincidences(&t).unwrap();
        assert_eq!(sifted, 500);
        assert_eq!(errors, 0);
    }

    #[test]
    fn empty_transcript_is_an_error() {
        let t = CoincidenceTranscript { events: vec![] };
        assert_eq!(sift_coincidences(&t), Err(QkdError::EmptySift));
    }
}

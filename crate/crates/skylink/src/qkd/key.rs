//! Secure-key-length estimation from sifted statistics and decoy bounds.

use super::decoy::{decoy_bounds, decoy_bounds_finite, DecoyStats};
use super::QkdError;
use crate::util::binary_entropy;

/// Asymptotic or finite-size accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyLengthMode {
    Asymptotic,
    Finite,
}

/// Outcome of key-length estimation for one pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecureKeyResult {
    pub sifted_bits: u64,
    pub qber: f64,
    pub y1_lower: f64,
    pub e1_upper: f64,
    pub secure_bits_asymptotic: u64,
    pub secure_bits_finite: u64,
    pub failure_probability: f64,
}

/// Secure key length for a decoy-state BB84 pass.
///
/// The asymptotic length is
///   L = n_sifted [ (Q1/Q_mu)(1 - H2(e1)) - f_EC H2(E) ],
/// never negative. Finite mode re-derives the decoy bounds with
/// count-deviation shifts at `epsilon` per estimated parameter and charges
/// the verification/privacy-amplification overhead 3 log2(1/eps) + 1 bits.
pub fn secure_key_length(stats: &DecoyStats, f_ec: f64, epsilon: f64, qber_override: Option<f64>) -> Result<SecureKeyResult, QkdError> {
    if f_ec < 1.0 {
        return Err(QkdError::InvalidParameter(format!("error-correction efficiency {f_ec} below 1")));
    }
    if !(0.0 < epsilon && epsilon < 1.0) {
        return Err(QkdError::InvalidParameter(format!("failure probability {epsilon} outside (0, 1)")));
    }
    let n_sifted = stats.signal().sifted;
    let qber = qber_override.unwrap_or_else(|| stats.signal().error_rate());
    let q_mu = stats.signal().gain();
    let asym_bounds = decoy_bounds(stats)?;
    let fin_bounds = decoy_bounds_finite(stats, epsilon)?;

    let per_bit = |q1: f64, e1: f64| -> f64 {
        if q_mu <= 0.0 {
            return 0.0;
        }
        (q1 / q_mu) * (1.0 - binary_entropy(e1)) - f_ec * binary_entropy(qber)
    };
    let asym = (n_sifted as f64 * per_bit(asym_bounds.q1_lower, asym_bounds.e1_upper)).max(0.0);
    let overhead = 3.0 * (1.0 / epsilon).log2() + 1.0;
    let finite = (n_sifted as f64 * per_bit(fin_bounds.q1_lower, fin_bounds.e1_upper) - overhead).max(0.0);
    Ok(SecureKeyResult {
        sifted_bits: n_sifted,
        qber,
        y1_lower: fin_bounds.y1_lower,
        e1_upper: fin_bounds.e1_upper,
        secure_bits_asymptotic: asym.floor() as u64,
        secure_bits_finite: finite.floor() as u64,
        failure_probability: epsilon,
    })
}

/// Asymptotic BBM92 rate per sifted bit: 1 - (1 + f_EC) H2(E), clamped at 0.
pub fn bbm92_asymptotic_rate(qber: f64, f_ec: f64) -> f64 {
    (1.0 - (1.0 + f_ec) * binary_entropy(qber)).max(0.0)
}

/// Finite-size BBM92 rate per sifted bit: the phase-error rate is the
/// measured QBER plus a Hoeffding deviation sqrt(ln(1/eps)/(2n)), and the
/// verification/privacy-amplification overhead is charged per bit.
pub fn bbm92_finite_rate(sifted_bits: u64, qber: f64, f_ec: f64, epsilon: f64) -> f64 {
    if sifted_bits == 0 {
        return 0.0;
    }
    let n = sifted_bits as f64;
    let delta = ((1.0 / epsilon).ln() / (2.0 * n)).sqrt();
    let e_phase = (qber + delta).min(0.5);
    let overhead = (3.0 * (1.0 / epsilon).log2() + 1.0) / n;
    (1.0 - binary_entropy(e_phase) - f_ec * binary_entropy(qber) - overhead).max(0.0)
}

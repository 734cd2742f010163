//! Privacy amplification by seeded binary Toeplitz hashing.
//!
//! The hash matrix T (m x n) is defined by n+m-1 seed-expanded bits t, with
//! T[j][i] = t[j - i + n - 1]. The output is y = T x over GF(2), which is a
//! slice of the binary convolution of t and x: y_j = parity(c[j + n - 1])
//! with c = t * x. Small inputs use the direct bitwise product; large ones
//! use an FFT integer convolution (the counts stay far below the exact
//! integer range of f64).

use super::QkdError;
use crate::util::Seeder;
use rand::Rng;
use rustfft::{num_complex::Complex, FftPlanner};

/// Threshold below which the direct O(n*m) bitwise product is used.
const DIRECT_LIMIT: usize = 4096;

/// A seed-expanded binary Toeplitz hash from `n_in` to `n_out` bits.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzHash {
    pub n_in: usize,
    pub n_out: usize,
    /// Diagonal-defining bits, length n_in + n_out - 1.
    diag: Vec<u8>,
}

impl ToeplitzHash {
    /// Expand a seed into the diagonal bits.
    pub fn from_seed(n_in: usize, n_out: usize, seed: u64) -> Result<Self, QkdError> {
        if n_out == 0 || n_out > n_in {
            return Err(QkdError::LengthError { target: n_out, input: n_in });
        }
        let mut rng = Seeder::new(seed).rng("toeplitz", 0);
        let diag = (0..n_in + n_out - 1).map(|_| u8::from(rng.gen::<bool>())).collect();
        Ok(Self { n_in, n_out, diag })
    }

    /// Explicit diagonal bits (tests use this to build the identity map).
    pub fn from_diagonal(n_in: usize, n_out: usize, diag: Vec<u8>) -> Result<Self, QkdError> {
        if n_out == 0 || n_out > n_in {
            return Err(QkdError::LengthError { target: n_out, input: n_in });
        }
        if diag.len() != n_in + n_out - 1 {
            return Err(QkdError::InvalidParameter(format!(
                "diagonal needs {} bits, got {}",
                n_in + n_out - 1,
                diag.len()
            )));
        }
        Ok(Self { n_in, n_out, diag })
    }

    /// Apply the hash to `bits` (one bit per byte).
    pub fn apply(&self, bits: &[u8]) -> Result<Vec<u8>, QkdError> {
        if bits.len() != self.n_in {
            return Err(QkdError::InvalidParameter(format!(
                "input has {} bits, hash expects {}",
                bits.len(),
                self.n_in
            )));
        }
        if self.n_in <= DIRECT_LIMIT {
            Ok(self.apply_direct(bits))
        } else {
            Ok(self.apply_fft(bits))
        }
    }

    /// Direct parity evaluation, exact for any size.
    pub fn apply_direct(&self, bits: &[u8]) -> Vec<u8> {
        let mut out = vec![0u8; self.n_out];
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0u8;
            for (i, b) in bits.iter().enumerate() {
                acc ^= self.diag[j + self.n_in - 1 - i] & b;
            }
            *o = acc;
        }
        out
    }

    /// FFT integer convolution, parity of the rounded counts.
    fn apply_fft(&self, bits: &[u8]) -> Vec<u8> {
        let conv_len = self.diag.len() + self.n_in - 1;
        let size = conv_len.next_power_of_two();
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(size);
        let ifft = planner.plan_fft_inverse(size);
        // Pack both real sequences into one complex FFT.
        let mut z: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); size];
        for (i, d) in self.diag.iter().enumerate() {
            z[i].re = f64::from(*d);
        }
        for (i, b) in bits.iter().enumerate() {
            z[i].im = f64::from(*b);
        }
        fft.process(&mut z);
        // Spectra of the packed sequences: A[k] = (Z[k] + conj(Z[N-k]))/2,
        // B[k] = (Z[k] - conj(Z[N-k]))/(2i); multiply and invert.
        let mut prod: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); size];
        for k in 0..size {
            let zk = z[k];
            let znk = z[(size - k) % size].conj();
            let a = (zk + znk) * 0.5;
            let b = (zk - znk) * Complex::new(0.0, -0.5);
            prod[k] = a * b;
        }
        ifft.process(&mut prod);
        let scale = 1.0 / size as f64;
        let mut out = vec![0u8; self.n_out];
        for (j, o) in out.iter_mut().enumerate() {
            let count = (prod[j + self.n_in - 1].re * scale).round() as i64;
            *o = (count & 1) as u8;
        }
        out
    }
}

/// Compress `bits` to `target_length` with a seed-expanded Toeplitz hash.
pub fn privacy_amplification(bits: &[u8], target_length: usize, seed: u64) -> Result<Vec<u8>, QkdError> {
    if target_length > bits.len() {
        return Err(QkdError::LengthError {
            target: target_length,
            input: bits.len(),
        });
    }
    if target_length == 0 {
        return Ok(Vec::new());
    }
    ToeplitzHash::from_seed(bits.len(), target_length, seed)?.apply(bits)
}

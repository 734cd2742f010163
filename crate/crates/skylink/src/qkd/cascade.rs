//! Cascade-style iterative parity reconciliation.
//!
//! Four passes of seeded block shuffles. Pass 1 uses blocks of about
//! 0.73/QBER bits; each later pass doubles the block size. A block whose
//! parity disagrees is binary-searched for one error; fixing a bit re-opens
//! the blocks containing it in earlier passes (the cascade step). Leakage
//! counts every parity Alice reveals: the top-level block parities of each
//! pass plus one bit per binary-search split. A 64-bit verification hash
//! decides success.

use super::QkdError;
use crate::util::{fnv1a64, Seeder};
use rand::seq::SliceRandom;

const PASSES: usize = 4;

/// Result of a reconciliation run.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeResult {
    /// Bob's corrected key (now equal to Alice's, as verified by hash).
    pub corrected: Vec<u8>,
    /// Classical information revealed, in bits.
    pub leaked_bits: u64,
    /// Number of bit flips applied.
    pub flips: u64,
}

fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, b) in bits.iter().enumerate() {
        out[i / 8] |= (b & 1) << (i % 8);
    }
    out
}

fn parity(bits: &[u8], idx: &[usize]) -> u8 {
    idx.iter().fold(0u8, |acc, &i| acc ^ (bits[i] & 1))
}

/// Reconcile Bob's key against Alice's.
///
/// `qber_estimate` sets the initial block size. Fails if the verification
/// hash still disagrees after all passes or if the leakage exceeds half the
/// key (the design point is a few percent error rate).
pub fn error_correction(alice: &[u8], bob: &[u8], qber_estimate: f64, seed: u64) -> Result<CascadeResult, QkdError> {
    if alice.len() != bob.len() {
        return Err(QkdError::KeyLengthMismatch(alice.len(), bob.len()));
    }
    let n = alice.len();
    if n == 0 {
        return Err(QkdError::InvalidParameter("empty key".into()));
    }
    let mut bob = bob.to_vec();
    let mut leaked = 0u64;
    let mut flips = 0u64;
    let seeder = Seeder::new(seed);

    let k1 = ((0.73 / qber_estimate.max(1e-4)).ceil() as usize).clamp(4, n.max(4));

    // Per pass: the index permutation and its block partition.
    let mut pass_blocks: Vec<Vec<Vec<usize>>> = Vec::with_capacity(PASSES);
    // Alice's top-level parity per (pass, block), revealed once.
    let mut alice_parities: Vec<Vec<u8>> = Vec::with_capacity(PASSES);

    for pass in 0..PASSES {
        let block_len = (k1 << pass).min(n);
        let mut order: Vec<usize> = (0..n).collect();
        if pass > 0 {
            let mut rng = seeder.rng("cascade-shuffle", pass as u64);
            order.shuffle(&mut rng);
        }
        let blocks: Vec<Vec<usize>> = order.chunks(block_len).map(|c| c.to_vec()).collect();
        let parities: Vec<u8> = blocks.iter().map(|b| parity(alice, b)).collect();
        leaked += blocks.len() as u64;

        pass_blocks.push(blocks);
        alice_parities.push(parities);

        // Check every block of the new pass, cascading into earlier passes.
        let mut queue: Vec<(usize, usize)> = (0..pass_blocks[pass].len()).map(|b| (pass, b)).collect();
        while let Some((p, b)) = queue.pop() {
            let block = &pass_blocks[p][b];
            if parity(&bob, block) == alice_parities[p][b] {
                continue;
            }
            let flipped = binary_search_flip(alice, &mut bob, block, &mut leaked);
            flips += 1;
            if leaked > (n as u64) / 2 + 64 {
                return Err(QkdError::ReconciliationFailure(format!(
                    "leakage {leaked} bits exceeds half the key; error rate beyond design point"
                )));
            }
            // Re-open every known block containing the flipped bit; blocks
            // whose parity now matches are filtered at pop time.
            for (q, blocks_q) in pass_blocks.iter().enumerate() {
                if let Some(bi) = blocks_q.iter().position(|blk| blk.contains(&flipped)) {
                    if (q, bi) != (p, b) {
                        queue.push((q, bi));
                    }
                }
            }
        }
    }

    if fnv1a64(&pack_bits(alice)) != fnv1a64(&pack_bits(&bob)) {
        return Err(QkdError::ReconciliationFailure(format!(
            "verification hash mismatch after {PASSES} passes"
        )));
    }
    // Verification hash itself is classical communication.
    leaked += 64;
    Ok(CascadeResult {
        corrected: bob,
        leaked_bits: leaked,
        flips,
    })
}

/// Binary-search one error inside a parity-mismatched block, flip it in
/// `bob`, and return its index. Each half-parity comparison leaks one bit.
fn binary_search_flip(alice: &[u8], bob: &mut [u8], block: &[usize], leaked: &mut u64) -> usize {
    let mut lo = 0usize;
    let mut hi = block.len();
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let idx = &block[lo..mid];
        *leaked += 1;
        if parity(alice, idx) != parity(bob, idx) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let flip = block[lo];
    bob[flip] ^= 1;
    flip
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::binary_entropy;
    use rand::Rng;

    fn random_bits(n: usize, seed: u64) -> Vec<u8> {
        let mut rng = Seeder::new(seed).rng("bits", 0);
        (0..n).map(|_| u8::from(rng.gen::<bool>())).collect()
    }

    fn flip_fraction(bits: &[u8], fraction: f64, seed: u64) -> Vec<u8> {
        let mut rng = Seeder::new(seed).rng("flips", 1);
        bits.iter()
            .map(|b| b ^ u8::from(rng.gen::<f64>() < fraction))
            .collect()
    }

    #[test]
    fn identical_inputs_leak_only_block_parities() {
        let alice = random_bits(4096, 1);
        let res = error_correction(&alice, &alice, 0.01, 2).unwrap();
        assert_eq!(res.corrected, alice);
        assert_eq!(res.flips, 0);
        // No binary searches: leakage is the top parities plus the hash.
        let k1 = 73usize;
        let expected: u64 = (0..4usize)
            .map(|p| (4096usize.div_ceil((k1 << p).min(4096))) as u64)
            .sum::<u64>()
            + 64;
        assert_eq!(res.leaked_bits, expected);
    }

    #[test]
    fn one_percent_errors_corrected_within_leak_budget() {
        let n = 10_000;
        let alice = random_bits(n, 3);
        let bob = flip_fraction(&alice, 0.01, 4);
        let res = error_correction(&alice, &bob, 0.01, 5).unwrap();
        assert_eq!(res.corrected, alice);
        let budget = 1.3 * n as f64 * binary_entropy(0.01);
        assert!(
            (res.leaked_bits as f64) < budget,
            "leaked {} vs budget {budget}",
            res.leaked_bits
        );
    }

    #[test]
    fn leakage_stays_near_shannon_across_rates() {
        for (qber, factor) in [(0.005, 1.6), (0.02, 1.3), (0.05, 1.3)] {
            let n = 20_000;
            let alice = random_bits(n, 7);
            let bob = flip_fraction(&alice, qber, 8);
            let res = error_correction(&alice, &bob, qber, 9).unwrap();
            assert_eq!(res.corrected, alice, "qber {qber}");
            let budget = factor * n as f64 * binary_entropy(qber);
            assert!(
                (res.leaked_bits as f64) < budget,
                "qber {qber}: leaked {} vs {budget}",
                res.leaked_bits
            );
        }
    }

    #[test]
    fn thirty_percent_errors_fail() {
        let alice = random_bits(10_000, 11);
        let bob = flip_fraction(&alice, 0.30, 12);
        let err = error_correction(&alice, &bob, 0.30, 13).unwrap_err();
        assert!(matches!(err, QkdError::ReconciliationFailure(_)));
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(matches!(
            error_correction(&[0, 1], &[0], 0.01, 1),
            Err(QkdError::KeyLengthMismatch(2, 1))
        ));
    }
}

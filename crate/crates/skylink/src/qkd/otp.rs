//! One-time-pad encryption and the trusted-relay XOR exchange.

use super::QkdError;

/// A reconciled, amplified key shared by a pair of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyMaterial {
    pub id: String,
    pub owners: (String, String),
    pub bytes: Vec<u8>,
    /// Pass identifiers the key was distilled from.
    pub provenance: Vec<String>,
    pub consumed: bool,
}

impl KeyMaterial {
    pub fn new(id: &str, owner_a: &str, owner_b: &str, bytes: Vec<u8>) -> Self {
        Self {
            id: id.to_string(),
            owners: (owner_a.to_string(), owner_b.to_string()),
            bytes,
            provenance: Vec::new(),
            consumed: false,
        }
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }
}

fn xor_bytes(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Encrypt `message` with a single-use key; the key must be at least as
/// long as the message. The ciphertext is the bytewise XOR, so decryption
/// is the same operation.
pub fn otp_encrypt(message: &[u8], key: &mut KeyMaterial) -> Result<Vec<u8>, QkdError> {
    if key.consumed {
        return Err(QkdError::KeyReuse(key.id.clone()));
    }
    if key.bytes.len() < message.len() {
        return Err(QkdError::ShortKey {
            need: message.len(),
            have: key.bytes.len(),
        });
    }
    key.consumed = true;
    Ok(xor_bytes(message, &key.bytes[..message.len()]))
}

/// Decrypt is the same XOR; separate entry point for call-site clarity.
pub fn otp_decrypt(ciphertext: &[u8], key: &mut KeyMaterial) -> Result<Vec<u8>, QkdError> {
    otp_encrypt(ciphertext, key)
}

/// Result of a trusted-relay exchange: the public broadcast and the key the
/// far station recovers.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayExchange {
    /// MX xor MG, safe to broadcast classically.
    pub broadcast: Vec<u8>,
    /// (MX xor MG) xor MX = MG, now shared by both end stations.
    pub recovered: Vec<u8>,
}

/// Relay two equal-length keys held by the satellite: broadcast their XOR
/// and recover the far key at the near station. Both inputs are consumed.
pub fn relay_exchange(mx: &mut KeyMaterial, mg: &mut KeyMaterial) -> Result<RelayExchange, QkdError> {
    if mx.len() != mg.len() {
        return Err(QkdError::KeyLengthMismatch(mx.len(), mg.len()));
    }
    if mx.consumed {
        return Err(QkdError::KeyReuse(mx.id.clone()));
    }
    if mg.consumed {
        return Err(QkdError::KeyReuse(mg.id.clone()));
    }
    let broadcast = xor_bytes(&mx.bytes, &mg.bytes);
    let recovered = xor_bytes(&broadcast, &mx.bytes);
    mx.consumed = true;
    mg.consumed = true;
    Ok(RelayExchange { broadcast, recovered })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::Seeder;
    use rand::Rng;

    fn random_key(id: &str, n: usize, seed: u64) -> KeyMaterial {
        let mut rng = Seeder::new(seed).rng("key", 0);
        KeyMaterial::new(id, "a", "b", (0..n).map(|_| rng.gen::<u8>()).collect())
    }

    #[test]
    fn otp_round_trip() {
        let msg = b"attack at dawn";
        let mut k1 = random_key("k1", 64, 1);
        let mut k2 = k1.clone();
        k2.id = "k2".into();
        let cipher = otp_encrypt(msg, &mut k1).unwrap();
        assert_ne!(&cipher, msg);
        let plain = otp_decrypt(&cipher, &mut k2).unwrap();
        assert_eq!(&plain, msg);
    }

    #[test]
    fn key_reuse_rejected() {
        let mut k = random_key("k", 32, 2);
        otp_encrypt(b"once", &mut k).unwrap();
        assert!(matches!(otp_encrypt(b"twice", &mut k), Err(QkdError::KeyReuse(_))));
    }

    #[test]
    fn short_key_rejected() {
        let mut k = random_key("k", 4, 3);
        assert!(matches!(
            otp_encrypt(b"toolongmessage", &mut k),
            Err(QkdError::ShortKey { .. })
        ));
        assert!(!k.consumed);
    }

    #[test]
    fn relay_reference_bytes() {
        let mut mx = KeyMaterial::new("mx", "micius", "xinglong", vec![0xAB]);
        let mut mg = KeyMaterial::new("mg", "micius", "graz", vec![0xCD]);
        let ex = relay_exchange(&mut mx, &mut mg).unwrap();
        assert_eq!(ex.broadcast, vec![0x66]);
        assert_eq!(ex.recovered, vec![0xCD]);
        assert!(mx.consumed && mg.consumed);
    }

    #[test]
    fn relay_identical_keys_broadcast_zero() {
        let mut mx = random_key("mx", 16, 4);
        let mut mg = mx.clone();
        mg.id = "mg".into();
        let ex = relay_exchange(&mut mx, &mut mg).unwrap();
        assert!(ex.broadcast.iter().all(|b| *b == 0));
        assert_eq!(ex.recovered, mg.bytes);
    }

    #[test]
    fn relay_recovery_exact_for_random_keys() {
        for seed in 0..1000 {
            let mut mx = random_key("mx", 64, seed);
            let mut mg = random_key("mg", 64, seed ^ 0xdead);
            let expected = mg.bytes.clone();
            let ex = relay_exchange(&mut mx, &mut mg).unwrap();
            assert_eq!(ex.recovered, expected);
        }
    }

    #[test]
    fn relay_length_mismatch() {
        let mut mx = random_key("mx", 8, 5);
        let mut mg = random_key("mg", 9, 6);
        assert!(matches!(
            relay_exchange(&mut mx, &mut mg),
            Err(QkdError::KeyLengthMismatch(8, 9))
        ));
    }
}

//! Persistent store of distilled keys with consume-once accounting.
//!
//! Keys live as raw binary files with a text sidecar carrying the owner
//! pair, length, provenance, and consumed flag:
//!
//! ```text
//! keys/mx-pass1.key    (raw bytes)
//! keys/mx-pass1.meta   (owners=micius,xinglong / length=... / consumed=...)
//! ```

use super::MissionError;
use crate::qkd::KeyMaterial;
use std::path::{Path, PathBuf};

#[derive(Debug, Default)]
pub struct KeyStore {
    keys: Vec<KeyMaterial>,
    dir: Option<PathBuf>,
}

impl KeyStore {
    /// In-memory store (no persistence).
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Open or create a store under `dir`, loading any existing sidecars.
    pub fn open(dir: &Path) -> Result<Self, MissionError> {
        std::fs::create_dir_all(dir)?;
        let mut keys = Vec::new();
        let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "meta"))
            .collect();
        entries.sort();
        for meta_path in entries {
            let meta = std::fs::read_to_string(&meta_path)?;
            let mut owners = (String::new(), String::new());
            let mut consumed = false;
            let mut provenance = Vec::new();
            for line in meta.lines() {
                if let Some((k, v)) = line.split_once('=') {
                    match k.trim() {
                        "owners" => {
                            let mut parts = v.trim().splitn(2, ',');
                            owners.0 = parts.next().unwrap_or("").to_string();
                            owners.1 = parts.next().unwrap_or("").to_string();
                        }
                        "consumed" => consumed = v.trim() == "true",
                        "provenance" => provenance = v.trim().split(',').map(str::to_string).collect(),
                        _ => {}
                    }
                }
            }
            let key_path = meta_path.with_extension("key");
            let bytes = std::fs::read(&key_path)?;
            let id = meta_path.file_stem().unwrap_or_default().to_string_lossy().to_string();
            let mut key = KeyMaterial::new(&id, &owners.0, &owners.1, bytes);
            key.consumed = consumed;
            key.provenance = provenance;
            keys.push(key);
        }
        Ok(Self { keys, dir: Some(dir.to_path_buf()) })
    }

    fn persist(&self, key: &KeyMaterial) -> Result<(), MissionError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        std::fs::write(dir.join(format!("{}.key", key.id)), &key.bytes)?;
        let meta = format!(
            "owners={},{}\nlength={}\nconsumed={}\nprovenance={}\n",
            key.owners.0,
            key.owners.1,
            key.bytes.len(),
            key.consumed,
            key.provenance.join(",")
        );
        std::fs::write(dir.join(format!("{}.meta", key.id)), meta)?;
        Ok(())
    }

    /// Add (and persist) a key. Duplicate ids are rejected.
    pub fn add(&mut self, key: KeyMaterial) -> Result<(), MissionError> {
        if self.keys.iter().any(|k| k.id == key.id) {
            return Err(MissionError::Config(format!("key id `{}` already stored", key.id)));
        }
        self.persist(&key)?;
        self.keys.push(key);
        Ok(())
    }

    /// Unconsumed bytes shared by an owner pair (order-insensitive).
    pub fn available(&self, a: &str, b: &str) -> usize {
        self.keys
            .iter()
            .filter(|k| !k.consumed && owners_match(k, a, b))
            .map(|k| k.bytes.len())
            .sum()
    }

    /// Consume exactly `len` bytes shared by the pair, splitting the last
    /// key if necessary (the remainder is re-stored under a `:rem` id).
    pub fn take(&mut self, a: &str, b: &str, len: usize) -> Result<Vec<u8>, MissionError> {
        let have = self.available(a, b);
        if have < len {
            return Err(MissionError::InsufficientKey { need: len, have });
        }
        let mut out = Vec::with_capacity(len);
        let mut remainder: Option<KeyMaterial> = None;
        for key in self.keys.iter_mut() {
            if out.len() == len {
                break;
            }
            if key.consumed || !owners_match(key, a, b) {
                continue;
            }
            let need = len - out.len();
            if key.bytes.len() <= need {
                out.extend_from_slice(&key.bytes);
                key.consumed = true;
            } else {
                out.extend_from_slice(&key.bytes[..need]);
                let mut rest = KeyMaterial::new(
                    &format!("{}:rem", key.id),
                    &key.owners.0,
                    &key.owners.1,
                    key.bytes[need..].to_vec(),
                );
                rest.provenance = key.provenance.clone();
                key.consumed = true;
                key.bytes.truncate(need);
                remainder = Some(rest);
            }
        }
        // Re-persist mutated keys.
        let snapshot: Vec<KeyMaterial> = self.keys.iter().filter(|k| owners_match(k, a, b)).cloned().collect();
        for k in &snapshot {
            self.persist(k)?;
        }
        if let Some(rest) = remainder {
            self.add(rest)?;
        }
        Ok(out)
    }

    pub fn keys(&self) -> &[KeyMaterial] {
        &self.keys
    }
}

fn owners_match(key: &KeyMaterial, a: &str, b: &str) -> bool {
    (key.owners.0 == a && key.owners.1 == b) || (key.owners.0 == b && key.owners.1 == a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(id: &str, a: &str, b: &str, n: usize) -> KeyMaterial {
        KeyMaterial::new(id, a, b, vec![0xA5; n])
    }

    #[test]
    fn add_take_and_split() {
        let mut store = KeyStore::in_memory();
        store.add(key("k1", "micius", "xinglong", 100)).unwrap();
        store.add(key("k2", "micius", "xinglong", 100)).unwrap();
        assert_eq!(store.available("xinglong", "micius"), 200);
        let taken = store.take("micius", "xinglong", 150).unwrap();
        assert_eq!(taken.len(), 150);
        assert_eq!(store.available("micius", "xinglong"), 50);
        // Consumed keys cannot be taken again.
        assert!(store.take("micius", "xinglong", 100).is_err());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut store = KeyStore::in_memory();
        store.add(key("k1", "a", "b", 10)).unwrap();
        assert!(store.add(key("k1", "a", "b", 10)).is_err());
    }

    #[test]
    fn insufficient_key_error() {
        let mut store = KeyStore::in_memory();
        store.add(key("k1", "a", "b", 10)).unwrap();
        let err = store.take("a", "b", 11).unwrap_err();
        assert!(matches!(err, MissionError::InsufficientKey { need: 11, have: 10 }));
    }

    #[test]
    fn persistence_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        {
            let mut store = KeyStore::open(dir.path()).unwrap();
            store.add(key("k1", "micius", "graz", 64)).unwrap();
            let mut k2 = key("k2", "micius", "graz", 32);
            k2.provenance = vec!["pass-1".into()];
            store.add(k2).unwrap();
            store.take("micius", "graz", 10).unwrap();
        }
        let store = KeyStore::open(dir.path()).unwrap();
        // k1 was split: 10 bytes consumed, 54 live on under k1:rem.
        assert_eq!(store.available("micius", "graz"), 86);
        let k1 = store.keys().iter().find(|k| k.id == "k1").unwrap();
        assert!(k1.consumed);
        assert_eq!(k1.bytes.len(), 10);
    }
}

//! Content-addressed storage for expensive intermediate results: group
//! closures, E-polynomials and complete weight enumerators.
//!
//! Keys are SHA-256 digests of a canonical description of the inputs, so a
//! stale entry can never be picked up for different inputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::matgroup::{CycMatrix, FiniteMatrixGroup, MatrixJson};
use crate::poly::{PolyJson, RatPoly};

pub const CACHE_VERSION: u32 = 1;

pub trait Store: Send + Sync {
    fn get(&self, key: &str) -> Option<String>;
    fn put(&self, key: &str, value: &str) -> Result<()>;
}

/// One file per entry under a directory.
pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(DiskCache {
            dir: dir.as_ref().to_path_buf(),
        })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }
}

impl Store for DiskCache {
    fn get(&self, key: &str) -> Option<String> {
        fs::read_to_string(self.path(key)).ok()
    }

    fn put(&self, key: &str, value: &str) -> Result<()> {
        // Write then rename so a reader never sees a half-written entry.
        let tmp = self.dir.join(format!("{key}.tmp{}", std::process::id()));
        fs::write(&tmp, value)?;
        fs::rename(tmp, self.path(key))?;
        Ok(())
    }
}

/// In-process store, mostly for tests.
#[derive(Default)]
pub struct MemoryCache {
    map: Mutex<HashMap<String, String>>,
}

impl Store for MemoryCache {
    fn get(&self, key: &str) -> Option<String> {
        self.map.lock().unwrap().get(key).cloned()
    }

    fn put(&self, key: &str, value: &str) -> Result<()> {
        self.map.lock().unwrap().insert(key.to_string(), value.to_string());
        Ok(())
    }
}

pub fn digest(kind: &str, canonical: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("v{CACHE_VERSION}\n{kind}\n").as_bytes());
    h.update(canonical.as_bytes());
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("{kind}-{}", &hex[..32])
}

pub fn generators_key(generators: &[CycMatrix]) -> String {
    let js: Vec<MatrixJson> = generators.iter().map(|g| g.to_json()).collect();
    serde_json::to_string(&js).expect("matrices serialize")
}

#[derive(Serialize, Deserialize)]
struct GroupEntry {
    version: u32,
    elements: Vec<MatrixJson>,
}

#[derive(Serialize, Deserialize)]
struct PolyEntry {
    version: u32,
    poly: PolyJson,
}

pub fn load_group(store: &dyn Store, generators: &[CycMatrix]) -> Option<FiniteMatrixGroup> {
    let text = store.get(&digest("group", &generators_key(generators)))?;
    let e: GroupEntry = serde_json::from_str(&text).ok()?;
    if e.version != CACHE_VERSION {
        return None;
    }
    let elements = e.elements.iter().map(CycMatrix::from_json).collect::<Result<Vec<_>>>().ok()?;
    Some(FiniteMatrixGroup::from_parts(generators.to_vec(), elements))
}

pub fn save_group(store: &dyn Store, group: &FiniteMatrixGroup) -> Result<()> {
    let e = GroupEntry {
        version: CACHE_VERSION,
        elements: group.elements().iter().map(|m| m.to_json()).collect(),
    };
    store.put(&digest("group", &generators_key(group.generators())), &serde_json::to_string(&e)?)
}

pub fn load_poly(store: &dyn Store, kind: &str, canonical: &str) -> Option<RatPoly> {
    let e: PolyEntry = serde_json::from_str(&store.get(&digest(kind, canonical))?).ok()?;
    if e.version != CACHE_VERSION {
        return None;
    }
    RatPoly::from_json(&e.poly).ok()
}

pub fn save_poly(store: &dyn Store, kind: &str, canonical: &str, p: &RatPoly) -> Result<()> {
    let e = PolyEntry {
        version: CACHE_VERSION,
        poly: p.to_json(),
    };
    store.put(&digest(kind, canonical), &serde_json::to_string(&e)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups;

    #[test]
    fn group_round_trip() {
        let store = MemoryCache::default();
        let g = groups::lookup("appB-G").unwrap().resolve(1000).unwrap().group;
        assert!(load_group(&store, g.generators()).is_none());
        save_group(&store, &g).unwrap();
        let h = load_group(&store, g.generators()).unwrap();
        assert_eq!(h.order(), g.order());
        assert_eq!(h.elements(), g.elements());
    }

    #[test]
    fn keys_separate_kinds() {
        assert_ne!(digest("phi", "x"), digest("cwe", "x"));
        assert_eq!(digest("phi", "x"), digest("phi", "x"));
    }
}

//! Content-addressed caches for genera and Hecke operators.
//!
//! Each entry is an envelope `{kind, key, sha256, payload}`; the digest covers the compact JSON
//! of the payload. A mismatching digest or key is reported as an inconsistency rather than
//! silently recomputed.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use omf5::form::QuinaryForm;
use omf5::hecke::{HeckeKind, HeckeOperator};
use omf5::Error;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    kind: String,
    key: String,
    sha256: String,
    payload: Value,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn versions_string() -> String {
    omf5::ALGORITHM_VERSIONS.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

/// Key of a genus: seed Hessian, traversal prime and algorithm versions.
pub fn genus_key(seed: &QuinaryForm, prime: u64) -> String {
    digest(format!("genus|{:?}|{prime}|{}", seed.hessian(), versions_string()).as_bytes())
}

pub fn operator_key(genus_key: &str, a: i64, b: i64, d: u64, p: u64, kind: HeckeKind) -> String {
    digest(format!("op|{genus_key}|{a},{b}|{d}|{p}|{kind}|{}", versions_string()).as_bytes())
}

/// A cache directory; `None` disables caching.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        let dir = dir.or_else(|| std::env::var_os(super::CACHE_ENV).map(PathBuf::from));
        Cache { dir }
    }

    pub fn path(&self, kind: &str, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{kind}-{key}.json")))
    }

    pub fn get<T: DeserializeOwned>(&self, kind: &str, key: &str) -> omf5::Result<Option<T>> {
        let Some(path) = self.path(kind, key) else { return Ok(None) };
        if !path.exists() {
            return Ok(None);
        }
        let env = read_envelope(&path)?;
        if env.kind != kind || env.key != key {
            return Err(Error::Inconsistency(format!("{}: cache entry does not match its key", path.display())));
        }
        serde_json::from_value(env.payload)
            .map(Some)
            .map_err(|e| Error::Inconsistency(format!("{}: corrupt payload: {e}", path.display())))
    }

    pub fn put<T: Serialize>(&self, kind: &str, key: &str, value: &T) -> omf5::Result<()> {
        let Some(path) = self.path(kind, key) else { return Ok(()) };
        let payload = serde_json::to_value(value).map_err(|e| Error::Inconsistency(e.to_string()))?;
        let sha256 = digest(serde_json::to_string(&payload).unwrap().as_bytes());
        let env = Envelope { kind: kind.into(), key: key.into(), sha256, payload };
        let io = |e: std::io::Error| Error::InvalidInput(format!("{}: {e}", path.display()));
        std::fs::create_dir_all(path.parent().unwrap()).map_err(io)?;
        // write-then-rename so an interrupted run never leaves a truncated entry behind
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_string(&env).unwrap()).map_err(io)?;
        std::fs::rename(&tmp, &path).map_err(io)
    }
}

fn read_envelope(path: &Path) -> omf5::Result<Envelope> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::MissingFile(format!("{}: {e}", path.display())))?;
    let env: Envelope = serde_json::from_str(&text)
        .map_err(|e| Error::Inconsistency(format!("{}: corrupt cache entry: {e}", path.display())))?;
    let h = digest(serde_json::to_string(&env.payload).unwrap().as_bytes());
    if h != env.sha256 {
        return Err(Error::Inconsistency(format!("{}: hash mismatch", path.display())));
    }
    Ok(env)
}

/// An operator from a cache entry or from a `hecke` output document.
pub fn read_operator_file(path: &Path) -> omf5::Result<(HeckeOperator, String)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::MissingFile(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    if v.get("payload").is_some() {
        let env = read_envelope(path)?;
        let op = serde_json::from_value(env.payload)
            .map_err(|e| Error::Inconsistency(format!("{}: corrupt payload: {e}", path.display())))?;
        return Ok((op, env.key));
    }
    let op = v.get("operator").cloned().ok_or_else(|| Error::InvalidInput("file carries no operator".into()))?;
    let key = v.get("cache_key").and_then(Value::as_str).unwrap_or("").to_string();
    let op = serde_json::from_value(op).map_err(|e| Error::InvalidInput(format!("operator: {e}")))?;
    Ok((op, key))
}

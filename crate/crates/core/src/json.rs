//! Canonical JSON: sorted object keys, two-space indentation, trailing newline.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Current version of every emitted document.
pub const FORMAT_VERSION: u32 = 1;

pub fn to_canonical_value<T: Serialize>(value: &T) -> serde_json::Value {
    // serde_json's default map is a BTreeMap, so round-tripping through Value sorts keys.
    serde_json::to_value(value).expect("in-memory values always serialize")
}

pub fn to_canonical_string<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(&to_canonical_value(value))
        .expect("in-memory values always serialize");
    out.push('\n');
    out
}

/// Compact canonical form, used for digests.
pub fn to_compact_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string(&to_canonical_value(value)).expect("in-memory values always serialize")
}

pub fn digest<T: Serialize>(value: &T) -> String {
    let mut hasher = Sha256::new();
    hasher.update(to_compact_string(value).as_bytes());
    hex::encode(hasher.finalize())
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}

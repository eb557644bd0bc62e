//! Result emission: JSON envelopes, CSV tables, provenance hashes.
//!
//! Every payload embeds the scenario hash and master seed. The only
//! nondeterministic field, the generation timestamp, lives outside the
//! payload so re-runs with identical inputs produce byte-identical
//! payloads.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Hex SHA-256 of raw input bytes.
pub fn hash_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hex SHA-256 of a value's canonical JSON serialization.
pub fn hash_value<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(hash_bytes(&serde_json::to_vec(value)?))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    generated_at_unix_ms: u128,
    payload: &'a T,
}

/// Serialize `payload` inside a timestamped envelope.
pub fn write_json<T: Serialize>(path: &Path, payload: &T) -> Result<(), CliError> {
    let envelope = Envelope {
        generated_at_unix_ms: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0),
        payload,
    };
    let mut text = serde_json::to_string_pretty(&envelope)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Write preassembled CSV rows (no timestamp: whole files are comparable).
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<(), CliError> {
    let mut text = String::with_capacity(rows.len() * 32 + header.len() + 2);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

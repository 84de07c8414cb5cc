//! Memoized circle products under `$HOCOMP_CACHE_DIR`, keyed by a hash of
//! the full job description.

use std::fs;
use std::path::PathBuf;

use hocomp_core::HomologyReport;

pub const VAR: &str = "HOCOMP_CACHE_DIR";

/// 64-bit FNV-1a; stable across builds.
fn fnv(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn path(key: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(VAR)?;
    Some(PathBuf::from(dir).join(format!("{:016x}.json", fnv(key.as_bytes()))))
}

pub fn get(key: &str) -> Option<HomologyReport> {
    let p = path(key)?;
    let text = fs::read_to_string(p).ok()?;
    let (stored, report): (String, HomologyReport) = serde_json::from_str(&text).ok()?;
    (stored == key).then_some(report)
}

/// Best effort: a cache that cannot be written is skipped.
pub fn put(key: &str, report: &HomologyReport) {
    let Some(p) = path(key) else { return };
    if let Some(dir) = p.parent() {
        if fs::create_dir_all(dir).is_err() {
            return;
        }
    }
    let tmp = p.with_extension(format!("tmp{}", std::process::id()));
    let text = serde_json::to_string(&(key, report)).expect("reports serialize");
    if fs::write(&tmp, text).is_ok() {
        let _ = fs::rename(&tmp, &p);
    }
}

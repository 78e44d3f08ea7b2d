//! Plain-text memo cache.
//!
//! ```text
//! CHCAC v1 a=6
//! 6|1;0,0,0,0,0,0,0|0|0|1^2 1
//! # sha256=<hex digest of the record lines, newlines included>
//! ```

use std::fs;
use std::io;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::engine::{MemoStore, Origin};
use crate::error::ParseError;
use crate::kernel::{CanonicalKey, Count};

const MAGIC: &str = "CHCAC v1 a=";
const CHECKSUM: &str = "# sha256=";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cannot access cache file: {0}")]
    Io(#[from] io::Error),
    #[error("bad header, expected '{MAGIC}<a>'")]
    Header,
    #[error("cache is for a = {found}, store is for a = {expected}")]
    SurfaceMismatch { expected: u32, found: u32 },
    #[error("line {line}: {source}")]
    Record { line: usize, source: ParseError },
    #[error("line {line}: key {key} for a different surface")]
    ForeignKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key}")]
    Duplicate { line: usize, key: String },
    #[error("missing checksum line (truncated file?)")]
    Truncated,
    #[error("checksum mismatch: file says {stated}, body hashes to {actual}")]
    Checksum { stated: String, actual: String },
    #[error("key {key}: cache has {cached}, store has {stored}")]
    Conflict { key: String, cached: Count, stored: Count },
}

fn digest(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

/// Serializes every entry of `store` in key order.
pub fn render(store: &MemoStore) -> String {
    let mut body = String::new();
    for (key, count) in store.entries() {
        body.push_str(&format!("{key} {count}\n"));
    }
    format!("{MAGIC}{}\n{body}{CHECKSUM}{}\n", store.a(), digest(&body))
}

pub fn export(store: &MemoStore, path: &Path) -> Result<(), CacheError> {
    fs::write(path, render(store))?;
    Ok(())
}

/// Reads a cache file, returning its surface parameter and records.
pub fn parse(text: &str) -> Result<(u32, Vec<(CanonicalKey, Count)>), CacheError> {
    let mut lines = text.split_inclusive('\n');
    let header = lines.next().ok_or(CacheError::Header)?;
    let a = header
        .trim_end_matches('\n')
        .strip_prefix(MAGIC)
        .filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or(CacheError::Header)?;
    let mut body = String::new();
    let mut records: Vec<(CanonicalKey, Count)> = Vec::new();
    let mut stated = None;
    for (i, raw) in lines.enumerate() {
        let line_no = i + 2;
        if stated.is_some() {
            return Err(CacheError::Record {
                line: line_no,
                source: ParseError::new(0, "content after checksum line"),
            });
        }
        if let Some(sum) = raw.strip_prefix(CHECKSUM) {
            if !raw.ends_with('\n') {
                return Err(CacheError::Truncated);
            }
            stated = Some(sum.trim_end_matches('\n').to_string());
            continue;
        }
        if !raw.ends_with('\n') {
            return Err(CacheError::Truncated);
        }
        let line = raw.trim_end_matches('\n');
        let space = line.rfind(' ').ok_or_else(|| CacheError::Record {
            line: line_no,
            source: ParseError::new(line.len(), "expected '<key> <count>'"),
        })?;
        let key: CanonicalKey = line[..space]
            .parse()
            .map_err(|source| CacheError::Record { line: line_no, source })?;
        let digits = &line[space + 1..];
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(CacheError::Record {
                line: line_no,
                source: ParseError::new(space + 1, format!("bad count {digits:?}")),
            });
        }
        let count: Count = digits.parse().expect("decimal digits");
        if key.a != a {
            return Err(CacheError::ForeignKey { line: line_no, key: key.to_string() });
        }
        records.push((key, count));
        body.push_str(raw);
    }
    let stated = stated.ok_or(CacheError::Truncated)?;
    let actual = digest(&body);
    if stated != actual {
        return Err(CacheError::Checksum { stated, actual });
    }
    let mut sorted: Vec<&CanonicalKey> = records.iter().map(|(k, _)| k).collect();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        let line = records.iter().rposition(|(k, _)| k == w[0]).unwrap() + 2;
        return Err(CacheError::Duplicate { line, key: w[0].to_string() });
    }
    Ok((a, records))
}

/// Loads `text` into `store`. Nothing is inserted unless the whole file is
/// valid and consistent with what the store already holds.
pub fn import_str(store: &mut MemoStore, text: &str) -> Result<usize, CacheError> {
    let (a, records) = parse(text)?;
    if a != store.a() {
        return Err(CacheError::SurfaceMismatch { expected: store.a(), found: a });
    }
    for (key, count) in &records {
        if let Some(stored) = store.get(key) {
            if stored != count {
                return Err(CacheError::Conflict {
                    key: key.to_string(),
                    cached: count.clone(),
                    stored: stored.clone(),
                });
            }
        }
    }
    let n = records.len();
    for (key, count) in records {
        store.insert(key, count, Origin::CacheFile).expect("checked above");
    }
    Ok(n)
}

pub fn import(store: &mut MemoStore, path: &Path) -> Result<usize, CacheError> {
    let text = fs::read_to_string(path)?;
    import_str(store, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Engine;
    use crate::kernel::Quadruple;
    use crate::lattice::SurfaceModel;

    fn filled() -> MemoStore {
        let s = SurfaceModel::new(6).unwrap();
        let mut e = Engine::new(s);
        let q = Quadruple::new("2;0,0,0,0,0,0,0".parse().unwrap(), 0, "0".parse().unwrap(), "1^4".parse().unwrap());
        e.count(&q);
        e.into_store()
    }

    #[test]
    fn round_trip() {
        let store = filled();
        let text = render(&store);
        assert!(text.starts_with("CHCAC v1 a=6\n"));
        let mut fresh = MemoStore::new(&SurfaceModel::new(6).unwrap());
        assert_eq!(import_str(&mut fresh, &text).unwrap(), store.stats().entries);
        assert_eq!(render(&fresh), text);
    }

    #[test]
    fn rejects_damage() {
        let text = render(&filled());
        let s6 = SurfaceModel::new(6).unwrap();
        let mut fresh = MemoStore::new(&s6);
        let cut = &text[..text.len() - 80];
        assert!(import_str(&mut fresh, cut).is_err());
        let no_sum: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
        assert!(matches!(import_str(&mut fresh, &no_sum), Err(CacheError::Truncated)));
        let poisoned = text.replacen(" 1\n", " 2\n", 1);
        assert!(matches!(import_str(&mut fresh, &poisoned), Err(CacheError::Checksum { .. })));
        let mut s5 = MemoStore::new(&SurfaceModel::new(5).unwrap());
        assert!(matches!(import_str(&mut s5, &text), Err(CacheError::SurfaceMismatch { .. })));
        assert_eq!(fresh.stats().entries, 0);
    }

    #[test]
    fn rejects_unsorted_key() {
        let body = "6|2;0,0,1,0,0,0,0|0|0|1^3 1\n";
        let text = format!("CHCAC v1 a=6\n{body}# sha256={}\n", digest(body));
        let mut fresh = MemoStore::new(&SurfaceModel::new(6).unwrap());
        assert!(matches!(import_str(&mut fresh, &text), Err(CacheError::Record { line: 2, .. })));
    }
}

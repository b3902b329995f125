//! Content-addressed report cache: one JSON file per canonical input hash.
//!
//! Problems with the cache never change an answer. A corrupt or stale entry
//! is recomputed, and an unwritable directory only costs the write; both are
//! logged as warnings.

use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::group::Subgroup;
use crate::input::{FamilySpec, ParsedGroup};
use crate::report::{analyze, AnalysisReport, AnalyzeOptions, SCHEMA, VERSION};

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// Caching was not used for this run.
    Bypassed,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Cache {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Stored report text, if present, parseable and from this version.
    pub fn load(&self, key: &str) -> Option<String> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                warn!("cannot read cache entry {}: {e}; recomputing", path.display());
                return None;
            }
        };
        match AnalysisReport::from_json(&text) {
            Ok(r) if r.version == VERSION => Some(text),
            Ok(r) => {
                warn!("cache entry {} is from version {}; recomputing", path.display(), r.version);
                None
            }
            Err(e) => {
                warn!("corrupt cache entry {}: {e}; recomputing", path.display());
                None
            }
        }
    }

    pub fn store(&self, key: &str, text: &str) {
        let path = self.path(key);
        let tmp = self.dir.join(format!(".{key}.tmp"));
        let result = fs::create_dir_all(&self.dir)
            .and_then(|_| fs::write(&tmp, text))
            .and_then(|_| fs::rename(&tmp, &path));
        if let Err(e) = result {
            warn!("cannot write cache entry {}: {e}; continuing without caching", path.display());
            let _ = fs::remove_file(&tmp);
        }
    }
}

/// Hash of everything that determines a report: the group table and labels,
/// stabilizer and family members, options, and the artifact version.
pub fn cache_key(group: &ParsedGroup, stabilizers: &[Subgroup], family: &FamilySpec, opts: &AnalyzeOptions) -> Result<String> {
    let g = &group.group;
    let (_, fam) = family.resolve(g)?;
    let canonical = json!({
        "schema": SCHEMA,
        "version": VERSION,
        "descriptor": crate::report::group_info(group).descriptor,
        "cayley": g.cayley_table(),
        "labels": g.labels(),
        "stabilizers": stabilizers.iter().map(|h| h.members().to_vec()).collect::<Vec<_>>(),
        "family": family.tag(),
        "family_members": fam.iter().map(|h| h.members().to_vec()).collect::<Vec<_>>(),
        "criteria_only": opts.criteria_only,
        "max_order": opts.max_order,
        "gate_max_order": opts.gate_max_order,
    });
    Ok(hex::encode(Sha256::digest(canonical.to_string().as_bytes())))
}

/// Runs [`analyze`] through the cache and returns the report with its exact
/// JSON text. Runs with timings bypass the cache, since timings vary.
pub fn analyze_cached(
    cache: Option<&Cache>,
    group: &ParsedGroup,
    stabilizers: &[Subgroup],
    family: &FamilySpec,
    opts: &AnalyzeOptions,
) -> Result<(AnalysisReport, String, CacheStatus)> {
    let cache = match cache {
        Some(c) if !opts.timings => c,
        _ => {
            let r = analyze(group, stabilizers, family, opts)?;
            let text = r.to_json();
            return Ok((r, text, CacheStatus::Bypassed));
        }
    };
    let key = cache_key(group, stabilizers, family, opts)?;
    if let Some(text) = cache.load(&key) {
        let report = AnalysisReport::from_json(&text)?;
        return Ok((report, text, CacheStatus::Hit));
    }
    let r = analyze(group, stabilizers, family, opts)?;
    let text = r.to_json();
    cache.store(&key, &text);
    Ok((r, text, CacheStatus::Miss))
}

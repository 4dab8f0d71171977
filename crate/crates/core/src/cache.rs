//! On-disk atlas cache. Files are JSON lines keyed by the enumeration
//! parameters and the format version; anything unreadable or stale is
//! rebuilt rather than trusted.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exceptional::{enumerate_constructible, Atlas, EnumerationConfig, FORMAT_VERSION};
use crate::par::Execution;

/// Environment variable overriding the cache location.
pub const CACHE_ENV: &str = "BLOWUP_ATLAS_CACHE";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CacheStatus {
    Hit,
    Built,
    Rebuilt { reason: String },
    Disabled,
}

#[derive(Clone, Debug)]
pub struct CachedAtlas {
    pub atlas: Atlas,
    pub status: CacheStatus,
    pub path: Option<PathBuf>,
    /// Hex sha256 of the serialized atlas.
    pub sha256: String,
}

impl CachedAtlas {
    pub fn warning(&self) -> Option<String> {
        match &self.status {
            CacheStatus::Rebuilt { reason } => Some(format!(
                "atlas cache {} rebuilt: {reason}",
                self.path.as_deref().map(|p| p.display().to_string()).unwrap_or_default()
            )),
            _ => None,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn cache_file_name(m: usize, config: &EnumerationConfig) -> String {
    format!(
        "atlas-m{}-r{}-d{}-w{}{}-v{}.jsonl",
        m,
        config.rank_bound,
        config.depth_bound,
        config.max_windows,
        if config.orthogonal_swaps { "-swaps" } else { "" },
        FORMAT_VERSION
    )
}

/// A path ending in `.jsonl` is used as the file itself; anything else is a
/// directory holding one file per parameter set.
pub fn resolve_path(path: &Path, m: usize, config: &EnumerationConfig) -> PathBuf {
    if path.extension().is_some_and(|e| e == "jsonl") {
        path.to_path_buf()
    } else {
        path.join(cache_file_name(m, config))
    }
}

fn matches(atlas: &Atlas, m: usize, config: &EnumerationConfig) -> bool {
    atlas.m == m && atlas.config == *config
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
    }
    let tmp = path.with_extension("jsonl.tmp");
    fs::write(&tmp, text).map_err(|e| Error::Cache(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
}

/// Loads the atlas for `(m, config)` from `path`, building and storing it
/// when the file is missing, corrupt or was made with other parameters.
pub fn load_or_build(
    path: Option<&Path>,
    m: usize,
    config: &EnumerationConfig,
    exec: Execution,
) -> Result<CachedAtlas> {
    let Some(path) = path else {
        let atlas = enumerate_constructible(m, config, exec)?;
        let sha256 = sha256_hex(atlas.to_jsonl().as_bytes());
        return Ok(CachedAtlas {
            atlas,
            status: CacheStatus::Disabled,
            path: None,
            sha256,
        });
    };
    let file = resolve_path(path, m, config);
    let mut reason = None;
    match fs::read_to_string(&file) {
        Ok(text) => match Atlas::from_jsonl(&text) {
            Ok(atlas) if matches(&atlas, m, config) => {
                return Ok(CachedAtlas {
                    atlas,
                    status: CacheStatus::Hit,
                    path: Some(file),
                    sha256: sha256_hex(text.as_bytes()),
                });
            }
            Ok(_) => reason = Some("parameters differ".to_string()),
            Err(e) => reason = Some(e.to_string()),
        },
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
        Err(e) => reason = Some(e.to_string()),
    }
    let atlas = enumerate_constructible(m, config, exec)?;
    let text = atlas.to_jsonl();
    write_atomic(&file, &text)?;
    Ok(CachedAtlas {
        atlas,
        status: reason.map_or(CacheStatus::Built, |reason| CacheStatus::Rebuilt { reason }),
        path: Some(file),
        sha256: sha256_hex(text.as_bytes()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_hit_and_rebuild() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = EnumerationConfig::new(20, 3);
        let e = Execution::Sequential;
        let first = load_or_build(Some(dir.path()), 1, &cfg, e).unwrap();
        assert_eq!(first.status, CacheStatus::Built);
        let second = load_or_build(Some(dir.path()), 1, &cfg, e).unwrap();
        assert_eq!(second.status, CacheStatus::Hit);
        assert_eq!(second.atlas, first.atlas);
        assert_eq!(second.sha256, first.sha256);

        let file = first.path.unwrap();
        fs::write(&file, "{not json").unwrap();
        let third = load_or_build(Some(dir.path()), 1, &cfg, e).unwrap();
        assert!(matches!(third.status, CacheStatus::Rebuilt { .. }));
        assert!(third.warning().is_some());
        assert_eq!(third.atlas, first.atlas);
    }

    #[test]
    fn explicit_file_with_other_parameters_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("a.jsonl");
        let e = Execution::Sequential;
        load_or_build(Some(&file), 0, &EnumerationConfig::new(10, 3), e).unwrap();
        let other = load_or_build(Some(&file), 0, &EnumerationConfig::new(12, 3), e).unwrap();
        assert_eq!(
            other.status,
            CacheStatus::Rebuilt {
                reason: "parameters differ".into()
            }
        );
        assert_eq!(other.atlas.rank_bound(), 12);
    }
}

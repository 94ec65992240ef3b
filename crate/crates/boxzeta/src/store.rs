//! File-backed cache for expensive point counts and coefficient extractions.
//!
//! One human-inspectable JSON file per family (`surface.json`, `gpair.json`,
//! ...), each an array of `{"key": ..., "value": ..., "version": ...}`
//! entries. Values are integers or integer pairs only, so round-trips are
//! lossless. Writes go through an exclusive advisory lock with a re-read
//! merge and an atomic rename; since every cached value is deterministic,
//! last-writer-wins is conflict-free. A corrupt file is never fatal: it is
//! logged, recomputed, and overwritten.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::os::fd::AsRawFd;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Bumped when the entry layout changes; mismatched entries are recomputed.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the cache directory (the --cache-dir flag
/// takes precedence).
pub const CACHE_ENV: &str = "BOXZETA_CACHE";

/// Identifies one cached computation.
///
/// The canonical string is injective over the key space: fields never
/// contain ':' or '=', so the rendered form splits back unambiguously.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CacheKey {
    pub family: String,
    pub p: u64,
    pub degree: u32,
    pub method: String,
    pub convention: String,
}

impl CacheKey {
    pub fn new(family: &str, p: u64, degree: u32, method: &str, convention: &str) -> CacheKey {
        for part in [family, method, convention] {
            assert!(
                !part.contains([':', '=']),
                "cache key part {part:?} would break canonical-form injectivity"
            );
        }
        CacheKey {
            family: family.to_string(),
            p,
            degree,
            method: method.to_string(),
            convention: convention.to_string(),
        }
    }

    /// Key for the fast projective surface count at p.
    pub fn surface_fast(p: u64) -> CacheKey {
        CacheKey::new("surface", p, 1, "fast", "-")
    }

    /// Key for the extracted conjugate coefficient pair at p.
    pub fn gpair(p: u64) -> CacheKey {
        CacheKey::new("gpair", p, 1, "extract", "-")
    }

    pub fn canonical(&self) -> String {
        format!(
            "{}:p={}:deg={}:method={}:conv={}",
            self.family, self.p, self.degree, self.method, self.convention
        )
    }
}

/// A cached payload: integers and integer pairs only, never floats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CacheValue {
    Int(i64),
    Pair(i64, i64),
}

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    key: String,
    value: CacheValue,
    version: u32,
}

/// Advisory flock held for the lifetime of the guard.
struct FileLock {
    file: fs::File,
}

impl FileLock {
    fn acquire(path: &Path, exclusive: bool) -> io::Result<FileLock> {
        let file = fs::OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(path)?;
        let op = if exclusive {
            libc::LOCK_EX
        } else {
            libc::LOCK_SH
        };
        if unsafe { libc::flock(file.as_raw_fd(), op) } != 0 {
            return Err(io::Error::last_os_error());
        }
        Ok(FileLock { file })
    }
}

impl Drop for FileLock {
    fn drop(&mut self) {
        unsafe {
            libc::flock(self.file.as_raw_fd(), libc::LOCK_UN);
        }
    }
}

/// Handle on a cache directory.
#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
}

impl Store {
    /// Open (creating if needed) the cache directory.
    pub fn new(dir: impl Into<PathBuf>) -> io::Result<Store> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Store { dir })
    }

    /// Resolve the cache directory: explicit flag first, then the
    /// BOXZETA_CACHE environment variable, else no caching.
    pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
        flag.map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn file_path(&self, family: &str) -> PathBuf {
        self.dir.join(format!("{family}.json"))
    }

    fn lock_path(&self, family: &str) -> PathBuf {
        self.dir.join(format!("{family}.lock"))
    }

    /// Cached value when present, else `compute()`, persisted best-effort.
    ///
    /// The compute runs outside the lock; deterministic values make a
    /// duplicate computation by a concurrent caller harmless.
    pub fn get_or_compute<E>(
        &self,
        key: &CacheKey,
        compute: impl FnOnce() -> Result<CacheValue, E>,
    ) -> Result<CacheValue, E> {
        let canon = key.canonical();
        if let Some(v) = self.lookup(&key.family, &canon) {
            return Ok(v);
        }
        let value = compute()?;
        self.persist(&key.family, &canon, value);
        Ok(value)
    }

    /// Number of entries currently stored for a family.
    pub fn entry_count(&self, family: &str) -> usize {
        match FileLock::acquire(&self.lock_path(family), false) {
            Ok(_lock) => self.read_family(family).len(),
            Err(_) => 0,
        }
    }

    /// All entries of a family, in canonical key order.
    pub fn entries(&self, family: &str) -> Vec<(String, CacheValue)> {
        match FileLock::acquire(&self.lock_path(family), false) {
            Ok(_lock) => self.read_family(family).into_iter().collect(),
            Err(_) => Vec::new(),
        }
    }

    fn lookup(&self, family: &str, canon: &str) -> Option<CacheValue> {
        let _lock = FileLock::acquire(&self.lock_path(family), false).ok()?;
        self.read_family(family).get(canon).copied()
    }

    fn persist(&self, family: &str, canon: &str, value: CacheValue) {
        match FileLock::acquire(&self.lock_path(family), true) {
            Ok(_lock) => {
                // re-read under the exclusive lock so concurrent writers merge
                let mut map = self.read_family(family);
                map.insert(canon.to_string(), value);
                self.write_family(family, &map);
            }
            Err(e) => log::warn!("cache lock for {family} failed ({e}); value not persisted"),
        }
    }

    fn read_family(&self, family: &str) -> BTreeMap<String, CacheValue> {
        let path = self.file_path(family);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return BTreeMap::new(),
            Err(e) => {
                log::warn!("cache read {} failed ({e}); recomputing", path.display());
                return BTreeMap::new();
            }
        };
        match serde_json::from_slice::<Vec<Entry>>(&bytes) {
            Ok(entries) => entries
                .into_iter()
                .filter(|e| {
                    if e.version == SCHEMA_VERSION {
                        true
                    } else {
                        log::warn!(
                            "cache entry {} has version {} (want {SCHEMA_VERSION}); recomputing",
                            e.key,
                            e.version
                        );
                        false
                    }
                })
                .map(|e| (e.key, e.value))
                .collect(),
            Err(e) => {
                log::warn!("corrupt cache file {} ({e}); recomputing", path.display());
                BTreeMap::new()
            }
        }
    }

    /// Serialize and atomically replace the family file. Failures are
    /// logged, never propagated: the cache is an accelerator, not a source
    /// of truth.
    fn write_family(&self, family: &str, map: &BTreeMap<String, CacheValue>) {
        let entries: Vec<Entry> = map
            .iter()
            .map(|(key, &value)| Entry {
                key: key.clone(),
                value,
                version: SCHEMA_VERSION,
            })
            .collect();
        let path = self.file_path(family);
        let result = (|| -> io::Result<()> {
            let tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
            serde_json::to_writer_pretty(&tmp, &entries)?;
            tmp.persist(&path).map_err(|e| e.error)?;
            Ok(())
        })();
        if let Err(e) = result {
            log::warn!(
                "cache write {} failed ({e}); value not persisted",
                path.display()
            );
        }
    }
}

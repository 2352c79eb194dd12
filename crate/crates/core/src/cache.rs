//! On-disk cache of per-graph residues: one small JSON file per key.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{q_from_parts, q_to_parts, Q};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub n: u32,
    pub k: u32,
    pub d: u32,
    /// Graph type label: `i`, `ii`, `iii`, `iv`.
    pub graph_type: String,
    /// Partition key (`2+1`) or `-`.
    pub sigma: String,
    /// Cluster degree, 0 when absent.
    pub f: u32,
    /// Insertion key (`2:9,3:1`) or `-`.
    pub ins: String,
}

impl CacheKey {
    fn file_name(&self) -> String {
        let clean = |s: &str| s.replace(':', "x").replace(',', ".");
        format!(
            "N{}_k{}_d{}_{}_s{}_f{}_m{}.json",
            self.n,
            self.k,
            self.d,
            self.graph_type,
            clean(&self.sigma),
            self.f,
            clean(&self.ins)
        )
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    key: CacheKey,
    num: String,
    den: String,
}

#[derive(Debug, Clone)]
pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(DiskCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Missing or unreadable entries are treated as absent; a record whose key
    /// does not match is an error.
    pub fn get(&self, key: &CacheKey) -> Result<Option<Q>> {
        let path = self.dir.join(key.file_name());
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let rec: Record = serde_json::from_str(&text)?;
        if &rec.key != key {
            return Err(Error::Parse(format!("cache file {} holds a different key", path.display())));
        }
        q_from_parts(&rec.num, &rec.den).map(Some)
    }

    /// Write to a temporary file in the same directory, then rename.
    pub fn put(&self, key: &CacheKey, value: &Q) -> Result<()> {
        let (num, den) = q_to_parts(value);
        let rec = Record { key: key.clone(), num, den };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer(&mut tmp, &rec)?;
        tmp.flush()?;
        tmp.persist(self.dir.join(key.file_name())).map_err(|e| Error::Cache(e.error))?;
        Ok(())
    }
}

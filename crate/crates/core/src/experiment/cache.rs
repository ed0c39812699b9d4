use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::tt::{read_matrix, write_matrix, TtMatrix, FORMAT_VERSION};

/// On-disk store of assembled operators in the binary TT format, keyed by a hash of the
/// assembly parameters.
#[derive(Clone, Debug)]
pub struct OperatorCache {
    dir: PathBuf,
}

impl OperatorCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        OperatorCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// File name for a key such as `"expsum n=64 d=3 M=36"`.
    pub fn path_for(&self, key: &str) -> PathBuf {
        let mut hasher = Sha256::new();
        hasher.update(FORMAT_VERSION.to_le_bytes());
        hasher.update(key.as_bytes());
        self.dir.join(format!("{}.tt", hex::encode(hasher.finalize())))
    }

    /// Loads the operator for `key`, or builds and stores it.
    pub fn get_or_build(&self, key: &str, build: impl FnOnce() -> Result<TtMatrix>) -> Result<TtMatrix> {
        let path = self.path_for(key);
        if let Ok(file) = File::open(&path) {
            if let Ok(op) = read_matrix(&mut BufReader::new(file)) {
                return Ok(op);
            }
        }
        let op = build()?;
        fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension("tmp");
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            write_matrix(&mut w, &op)?;
            w.flush()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(op)
    }
}

/// Uses the cache when one is configured.
pub(crate) fn cached(
    cache: Option<&OperatorCache>,
    key: &str,
    build: impl FnOnce() -> Result<TtMatrix>,
) -> Result<TtMatrix> {
    match cache {
        Some(c) => c.get_or_build(key, build),
        None => build(),
    }
}

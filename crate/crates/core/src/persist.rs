//! Versioned binary index files: an 8-byte magic tag, a format version, the
//! content hash of the graph the index was built on, then a bincode payload.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

pub fn save<T: Serialize>(path: &Path, magic: &[u8; 8], graph_hash: &str, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(magic)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    bincode::serialize_into(&mut w, graph_hash).map_err(|e| Error::Index(e.to_string()))?;
    bincode::serialize_into(&mut w, value).map_err(|e| Error::Index(e.to_string()))?;
    w.flush()?;
    Ok(())
}

/// Reads an index, checking its tag, version, and that it was built for a
/// graph with `expected_hash`.
pub fn load<T: DeserializeOwned>(path: &Path, magic: &[u8; 8], expected_hash: &str) -> Result<T> {
    if !path.exists() {
        return Err(Error::MissingIndex(path.to_path_buf()));
    }
    let mut r = BufReader::new(File::open(path)?);
    let mut tag = [0u8; 8];
    r.read_exact(&mut tag)?;
    if &tag != magic {
        return Err(Error::Index(format!(
            "{} holds a {} index, expected {}",
            path.display(),
            String::from_utf8_lossy(&tag).trim_end(),
            String::from_utf8_lossy(magic).trim_end()
        )));
    }
    let mut ver = [0u8; 4];
    r.read_exact(&mut ver)?;
    let ver = u32::from_le_bytes(ver);
    if ver != FORMAT_VERSION {
        return Err(Error::Index(format!("unsupported index version {ver}")));
    }
    let hash: String = bincode::deserialize_from(&mut r).map_err(|e| Error::Index(e.to_string()))?;
    if hash != expected_hash {
        return Err(Error::Index(format!(
            "index was built for graph {hash}, current graph is {expected_hash}"
        )));
    }
    bincode::deserialize_from(&mut r).map_err(|e| Error::Index(e.to_string()))
}

/// Reads just the tag of an index file.
pub fn peek_magic(path: &Path) -> Result<[u8; 8]> {
    if !path.exists() {
        return Err(Error::MissingIndex(path.to_path_buf()));
    }
    let mut tag = [0u8; 8];
    File::open(path)?.read_exact(&mut tag)?;
    Ok(tag)
}

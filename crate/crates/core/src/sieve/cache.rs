//! On-disk table cache.
//!
//! Layout (little endian): `b"MUT1"`, `lo: u64`, `hi: u64`, then the packed
//! 2-bit codes, `ceil((hi - lo) / 4)` bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{arith_segment, ArithFn, MobiusTable, DEFAULT_BLOCK};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"MUT1";

pub fn write_cache(table: &MobiusTable, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    // write then rename so a crashed run never leaves a truncated file behind
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(MAGIC)?;
        f.write_all(&table.lo().to_le_bytes())?;
        f.write_all(&table.hi().to_le_bytes())?;
        f.write_all(table.packed())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<MobiusTable> {
    let bytes = fs::read(path)?;
    if bytes.len() < 20 || &bytes[..4] != MAGIC {
        return Err(Error::CorruptCache(format!("{}: bad header", path.display())));
    }
    let lo = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
    let hi = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    if hi < lo {
        return Err(Error::CorruptCache(format!("{}: hi < lo", path.display())));
    }
    MobiusTable::from_packed(lo, hi, bytes[20..].to_vec())
}

pub fn cache_path(dir: &Path, kind: ArithFn, lo: u64, hi: u64) -> PathBuf {
    dir.join(format!("{}_{lo}_{hi}.mut", kind.name()))
}

/// Read the table from `dir` if present, otherwise sieve and store it.
/// The flag reports whether the cache was reused.
pub fn load_or_build(dir: &Path, kind: ArithFn, lo: u64, hi: u64) -> Result<(MobiusTable, bool)> {
    let path = cache_path(dir, kind, lo, hi);
    if path.exists() {
        let t = read_cache(&path)?;
        if t.lo() != lo || t.hi() != hi {
            return Err(Error::CorruptCache(format!("{}: range mismatch", path.display())));
        }
        return Ok((t, true));
    }
    let t = arith_segment(kind, lo, hi, DEFAULT_BLOCK)?;
    write_cache(&t, &path)?;
    Ok((t, false))
}

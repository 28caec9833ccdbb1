//! Binary orbital checkpoints.
//!
//! Layout (little-endian): magic `ANYH`, version `u32`, points per side `M: u32`, box
//! length `L: f64`, orbital count `N: u32`, `alpha: f64`, trap exponent `s: f64`, then
//! `N M^2` complex values as interleaved `(re, im)` `f64` pairs, orbital-major and
//! row-major within an orbital.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hartree::OrbitalSet;

pub const MAGIC: &[u8; 4] = b"ANYH";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8 + 4 + 8 + 8;

#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub orbitals: OrbitalSet,
    pub alpha: f64,
    pub exponent: f64,
}

pub fn encode_checkpoint(orbitals: &OrbitalSet, alpha: f64, exponent: f64) -> Result<Vec<u8>> {
    let grid = orbitals.grid();
    let points = u32::try_from(grid.points()).map_err(|_| Error::Checkpoint("grid too large".into()))?;
    let count = u32::try_from(orbitals.count()).map_err(|_| Error::Checkpoint("too many orbitals".into()))?;
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * orbitals.data().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&points.to_le_bytes());
    out.extend_from_slice(&grid.box_length().to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
    out.extend_from_slice(&alpha.to_le_bytes());
    out.extend_from_slice(&exponent.to_le_bytes());
    for z in orbitals.data() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Checkpoint> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Checkpoint(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let f64_at = |at: usize| f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let points = u32_at(8) as usize;
    let box_length = f64_at(12);
    let count = u32_at(20) as usize;
    let alpha = f64_at(24);
    let exponent = f64_at(32);
    let expected = points
        .checked_mul(points)
        .and_then(|n| n.checked_mul(count))
        .and_then(|n| n.checked_mul(16))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Checkpoint("header sizes overflow".into()))?;
    if bytes.len() != expected {
        return Err(Error::Checkpoint(format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let grid = Grid::new(box_length, points)?;
    let data = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    Ok(Checkpoint { orbitals: OrbitalSet::from_raw(&grid, count, data)?, alpha, exponent })
}

/// Writes through a temporary sibling and renames, so readers never see a partial file.
pub fn write_checkpoint(path: &Path, orbitals: &OrbitalSet, alpha: f64, exponent: f64) -> Result<()> {
    let bytes = encode_checkpoint(orbitals, alpha, exponent)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(&bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    decode_checkpoint(&fs::read(path)?)
}

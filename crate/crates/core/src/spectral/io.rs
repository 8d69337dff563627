//! Binary eigenfunction files.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! offset  size    field
//! 0       4       magic "DLEF"
//! 4       4       u32 version (1)
//! 8       8       u64 node count n
//! 16      8       u64 mode count k
//! 24      8k      f64 eigenvalues λ_1..λ_k
//! ..      8n      f64 node weights w_1..w_n
//! ..      8kn     f64 eigenfunction values, mode-major: φ_1(1..n), φ_2(1..n), …
//! ```
//!
//! The JSON side (eigenvalues, coefficients, residuals, metadata) is plain
//! `serde_json` of [`SpectralData`].

use std::fs;
use std::path::Path;

use super::SpectralData;
use crate::error::{Error, Result};

pub const EIGENFUNCTION_MAGIC: &[u8; 4] = b"DLEF";

pub fn write_eigenfunctions(sd: &SpectralData, path: &Path) -> Result<()> {
    let (n, k) = (sd.nodes, sd.k());
    let mut buf = Vec::with_capacity(24 + 8 * (k + n + k * n));
    buf.extend_from_slice(EIGENFUNCTION_MAGIC);
    buf.extend_from_slice(&1u32.to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(&(k as u64).to_le_bytes());
    for v in sd.eigenvalues.iter().chain(&sd.weights).chain(sd.eigenfunctions.iter().flatten()) {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, buf)?;
    Ok(())
}

/// Returns `(eigenvalues, weights, eigenfunctions)`.
pub fn read_eigenfunctions(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
    let buf = fs::read(path)?;
    if buf.len() < 24 || &buf[..4] != EIGENFUNCTION_MAGIC {
        return Err(Error::Format("not an eigenfunction file".into()));
    }
    let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
    if version != 1 {
        return Err(Error::Format(format!("unsupported eigenfunction file version {version}")));
    }
    let n = u64::from_le_bytes(buf[8..16].try_into().unwrap()) as usize;
    let k = u64::from_le_bytes(buf[16..24].try_into().unwrap()) as usize;
    let expected = k
        .checked_mul(n)
        .and_then(|kn| kn.checked_add(k + n))
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(24));
    if expected != Some(buf.len()) {
        return Err(Error::Format(format!("length {} does not match n={n}, k={k}", buf.len())));
    }
    let mut vals = buf[24..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let eigenvalues: Vec<f64> = vals.by_ref().take(k).collect();
    let weights: Vec<f64> = vals.by_ref().take(n).collect();
    let eigenfunctions = (0..k).map(|_| vals.by_ref().take(n).collect()).collect();
    Ok((eigenvalues, weights, eigenfunctions))
}

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SefError};
use crate::targets::TargetPair;

pub const TARGET_MAGIC: &[u8; 8] = b"SEFTGT\0\0";
pub const TARGET_VERSION: u32 = 1;

/// Metadata stored alongside a target pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetMeta {
    pub kind: String,
    pub n: usize,
    /// Bandwidth used to build the target, if any.
    pub sigma: Option<f64>,
    pub params: serde_json::Map<String, serde_json::Value>,
}

fn format_err(msg: impl Into<String>) -> SefError {
    SefError::Format(msg.into())
}

/// Layout (little endian): magic, u32 version, u32 metadata length, JSON
/// metadata, u64 n, n² f64 target values, n² f64 mask values (row major).
pub fn encode_target(out: &mut impl Write, meta: &TargetMeta, pair: &TargetPair) -> Result<()> {
    let n = pair.len();
    if meta.n != n {
        return Err(format_err(format!("metadata says n = {}, target has {n}", meta.n)));
    }
    let json = serde_json::to_vec(meta).map_err(|e| format_err(e.to_string()))?;
    out.write_all(TARGET_MAGIC)?;
    out.write_all(&TARGET_VERSION.to_le_bytes())?;
    out.write_all(&(json.len() as u32).to_le_bytes())?;
    out.write_all(&json)?;
    out.write_all(&(n as u64).to_le_bytes())?;
    for m in [&pair.target, &pair.mask] {
        for v in m.iter() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_matrix(r: &mut impl Read, n: usize) -> Result<Array2<f64>> {
    let mut buf = vec![0u8; n * n * 8];
    r.read_exact(&mut buf)?;
    let values = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Array2::from_shape_vec((n, n), values).map_err(|e| format_err(e.to_string()))
}

pub fn decode_target(r: &mut impl Read) -> Result<(TargetMeta, TargetPair)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != TARGET_MAGIC {
        return Err(format_err("not a target file"));
    }
    let version = read_u32(r)?;
    if version != TARGET_VERSION {
        return Err(format_err(format!("unsupported target version {version}, expected {TARGET_VERSION}")));
    }
    let len = read_u32(r)? as usize;
    let mut json = vec![0u8; len];
    r.read_exact(&mut json)?;
    let meta: TargetMeta = serde_json::from_slice(&json).map_err(|e| format_err(e.to_string()))?;
    let mut nb = [0u8; 8];
    r.read_exact(&mut nb)?;
    let n = u64::from_le_bytes(nb) as usize;
    if n != meta.n {
        return Err(format_err(format!("metadata says n = {}, body has {n}", meta.n)));
    }
    let target = read_matrix(r, n)?;
    let mask = read_matrix(r, n)?;
    let pair = TargetPair { target, mask, sigma: meta.sigma };
    pair.validate()?;
    Ok((meta, pair))
}

pub fn write_target(path: &Path, meta: &TargetMeta, pair: &TargetPair) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    encode_target(&mut w, meta, pair)?;
    w.flush()?;
    Ok(())
}

pub fn read_target(path: &Path) -> Result<(TargetMeta, TargetPair)> {
    decode_target(&mut BufReader::new(File::open(path)?))
}

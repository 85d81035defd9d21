//! Field containers: a little-endian binary format and a JSON alternative.
//!
//! Binary layout: magic `QHF1`, u32 dim, u32 M, f64 L, u8 offset, u8 domain
//! (0 physical, 1 frequency), then M^N pairs of f64 (re, im).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

use super::field::{Domain, Field};
use super::grid::SpectralGrid;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"QHF1";

pub fn write_binary<W: Write>(f: &Field, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(f.grid.dim as u32).to_le_bytes())?;
    w.write_all(&(f.grid.m as u32).to_le_bytes())?;
    w.write_all(&f.grid.half_width.to_le_bytes())?;
    w.write_all(&[u8::from(f.grid.offset), u8::from(f.domain == Domain::Frequency)])?;
    let mut buf = Vec::with_capacity(16 * f.values.len());
    for z in &f.values {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Field> {
    let mut head = [0u8; 4 + 4 + 4 + 8 + 2];
    r.read_exact(&mut head)?;
    if &head[0..4] != MAGIC {
        return Err(Error::Format("bad magic in field container".into()));
    }
    let dim = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
    let m = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    let l = f64::from_le_bytes(head[12..20].try_into().unwrap());
    let offset = head[20] != 0;
    let domain = if head[21] != 0 { Domain::Frequency } else { Domain::Physical };
    let grid = SpectralGrid::new(dim, m, l)?.with_offset(offset);
    let mut raw = vec![0u8; 16 * grid.len()];
    r.read_exact(&mut raw)?;
    let values = raw
        .chunks_exact(16)
        .map(|c| {
            C64::new(f64::from_le_bytes(c[0..8].try_into().unwrap()), f64::from_le_bytes(c[8..16].try_into().unwrap()))
        })
        .collect();
    Field::new(grid, values, domain)
}

pub fn save_binary(f: &Field, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_binary(f, std::io::BufWriter::new(file))
}

pub fn load_binary(path: &Path) -> Result<Field> {
    let file = std::fs::File::open(path)?;
    read_binary(std::io::BufReader::new(file))
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    dim: usize,
    m: usize,
    half_width: f64,
    offset: bool,
    domain: Domain,
    re: Vec<f64>,
    im: Vec<f64>,
}

pub fn to_json(f: &Field) -> Result<String> {
    let j = FieldJson {
        dim: f.grid.dim,
        m: f.grid.m,
        half_width: f.grid.half_width,
        offset: f.grid.offset,
        domain: f.domain,
        re: f.values.iter().map(|z| z.re).collect(),
        im: f.values.iter().map(|z| z.im).collect(),
    };
    serde_json::to_string(&j).map_err(|e| Error::Format(e.to_string()))
}

pub fn from_json(s: &str) -> Result<Field> {
    let j: FieldJson = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
    if j.re.len() != j.im.len() {
        return Err(Error::Format("re/im length mismatch".into()));
    }
    let grid = SpectralGrid::new(j.dim, j.m, j.half_width)?.with_offset(j.offset);
    let values = j.re.iter().zip(&j.im).map(|(&a, &b)| C64::new(a, b)).collect();
    Field::new(grid, values, j.domain)
}

/// Load by extension: `.json` uses the JSON form, anything else the binary one.
pub fn load_any(path: &Path) -> Result<Field> {
    if path.extension().is_some_and(|e| e == "json") {
        from_json(&std::fs::read_to_string(path)?)
    } else {
        load_binary(path)
    }
}

pub fn save_any(f: &Field, path: &Path) -> Result<()> {
    if path.extension().is_some_and(|e| e == "json") {
        std::fs::write(path, to_json(f)?)?;
        Ok(())
    } else {
        save_binary(f, path)
    }
}

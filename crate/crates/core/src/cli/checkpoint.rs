//! Binary trajectory checkpoints.
//!
//! Layout (all little-endian):
//!
//! | offset | size | field |
//! |-------:|-----:|-------|
//! | 0 | 6 | magic `CQNLS1` |
//! | 6 | 1 | format version (1) |
//! | 7 | 1 | reserved (0) |
//! | 8 | 4 | mode radius `K` (u32) |
//! | 12 | 4 | physical points (u32) |
//! | 16 | 24 | `θ` (3 × f64) |
//! | 40 | 16 | `μ₁`, `μ₂` (f64) |
//! | 56 | 16 | interval `a`, `b` (f64) |
//! | 72 | 8 | node count (u64) |
//! | 80 | 8·nodes | node times (f64) |
//!
//! followed by `nodes × (2K+1)³` coefficients, each as `(re, im)` f64 pairs,
//! in lattice order.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{EquationParams, SpectralField, TorusGrid};
use crate::trajectory::{TimeInterval, Trajectory};

pub const MAGIC: &[u8; 6] = b"CQNLS1";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 80;

pub fn encode(trajectory: &Trajectory) -> Vec<u8> {
    let grid = trajectory.grid();
    let params = trajectory.params();
    let interval = trajectory.interval();
    let nodes = trajectory.len();
    let mut out = Vec::with_capacity(HEADER_LEN + nodes * (8 + 16 * grid.lattice_len()));
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(0);
    out.extend_from_slice(&(grid.mode_radius() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.phys_points() as u32).to_le_bytes());
    for v in grid
        .theta()
        .into_iter()
        .chain([params.mu1, params.mu2, interval.start(), interval.end()])
    {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&(nodes as u64).to_le_bytes());
    for t in trajectory.times() {
        out.extend_from_slice(&t.to_le_bytes());
    }
    for field in trajectory.fields() {
        for c in field.coeffs() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Checkpoint(format!("truncated file: needed {n} bytes at offset {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn decode(bytes: &[u8]) -> Result<Trajectory> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(6).ok() != Some(&MAGIC[..]) {
        return Err(Error::Checkpoint("bad magic: not a CQNLS1 checkpoint".into()));
    }
    let version = cur.take(2)?[0];
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version} (expected {VERSION})")));
    }
    let k = cur.u32()? as usize;
    let phys = cur.u32()? as usize;
    let theta = [cur.f64()?, cur.f64()?, cur.f64()?];
    let (mu1, mu2) = (cur.f64()?, cur.f64()?);
    let (a, b) = (cur.f64()?, cur.f64()?);
    let nodes = cur.u64()? as usize;
    let grid = TorusGrid::new(k, phys, theta)?;
    let params = EquationParams::permissive(mu1, mu2)?;
    let interval = TimeInterval::new(a, b)?;
    let lattice = grid.lattice_len();
    let expected = nodes
        .checked_mul(8 + 16 * lattice)
        .and_then(|p| p.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Checkpoint("node count overflows".into()))?;
    if bytes.len() < expected {
        return Err(Error::Checkpoint(format!(
            "truncated payload: {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    if bytes.len() > expected {
        return Err(Error::Checkpoint(format!(
            "{} trailing bytes after payload",
            bytes.len() - expected
        )));
    }
    let mut times = Vec::with_capacity(nodes);
    for _ in 0..nodes {
        times.push(cur.f64()?);
    }
    let mut fields = Vec::with_capacity(nodes);
    for _ in 0..nodes {
        let mut coeffs = Vec::with_capacity(lattice);
        for _ in 0..lattice {
            coeffs.push(Complex64::new(cur.f64()?, cur.f64()?));
        }
        fields.push(SpectralField::new(grid, coeffs)?);
    }
    Trajectory::new(interval, grid, params, times, fields)
        .map_err(|e| Error::Checkpoint(format!("inconsistent trajectory: {e}")))
}

pub fn write_checkpoint(trajectory: &Trajectory, path: &Path) -> Result<()> {
    fs::write(path, encode(trajectory))?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Trajectory> {
    decode(&fs::read(path)?)
}

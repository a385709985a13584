//! Binary field snapshots.
//!
//! Layout, all little endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `KWFS` |
//! | 4     | format version (`u32`, currently 1) |
//! | 32    | sites per axis (`4 × u64`) |
//! | 32    | spacing per axis (`4 × f64`) |
//! | 4     | form degree (`u32`) |
//! | 8     | θ (`f64`) |
//! | …     | body: sites in row-major order, components in storage order, three `f64` coefficients each |
//!
//! A JSON sidecar with the same stem records the geometry descriptor and θ.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::LieValue;
use crate::fields::{n_components, AdForm};
use crate::geometry::{GeometryDescriptor, GridGeometry};
use crate::Real;

pub const MAGIC: &[u8; 4] = b"KWFS";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotHeader {
    pub dims: [u64; 4],
    pub spacing: [f64; 4],
    pub degree: u32,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub field: String,
    pub geometry: GeometryDescriptor,
    pub theta: f64,
    pub degree: u32,
    pub format_version: u32,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes `form` to `path` and its sidecar next to it.
pub fn write_snapshot<T: Real>(path: &Path, name: &str, geom: &GridGeometry<T>, form: &AdForm<T>, theta: f64) -> Result<()> {
    if form.n_sites() != geom.n_sites() {
        return Err(Error::Shape(format!("field has {} sites, grid has {}", form.n_sites(), geom.n_sites())));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for d in geom.dims() {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    for h in geom.spacing() {
        w.write_all(&h.to_f64_lossy().to_le_bytes())?;
    }
    w.write_all(&(form.degree() as u32).to_le_bytes())?;
    w.write_all(&theta.to_le_bytes())?;
    for v in form.data() {
        for c in v.0 {
            w.write_all(&c.to_f64_lossy().to_le_bytes())?;
        }
    }
    w.flush()?;
    let side = Sidecar {
        field: name.to_string(),
        geometry: geom.descriptor().clone(),
        theta,
        degree: form.degree() as u32,
        format_version: VERSION,
    };
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&side)? + "\n")?;
    Ok(())
}

fn take<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| Error::Snapshot(format!("truncated snapshot: {e}")))?;
    Ok(b)
}

/// Reads a snapshot body and header (the sidecar is read separately with [`read_sidecar`]).
pub fn read_snapshot(path: &Path) -> Result<(SnapshotHeader, AdForm<f64>)> {
    let mut r = BufReader::new(File::open(path)?);
    if &take::<4>(&mut r)? != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(&mut r)?);
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let mut dims = [0u64; 4];
    for d in &mut dims {
        *d = u64::from_le_bytes(take(&mut r)?);
    }
    let mut spacing = [0f64; 4];
    for h in &mut spacing {
        *h = f64::from_le_bytes(take(&mut r)?);
    }
    let degree = u32::from_le_bytes(take(&mut r)?);
    let theta = f64::from_le_bytes(take(&mut r)?);
    let k = n_components(degree as usize);
    if k == 0 || degree > 2 {
        return Err(Error::Snapshot(format!("unsupported degree {degree}")));
    }
    let sites = dims.iter().try_fold(1u64, |p, &d| p.checked_mul(d)).ok_or_else(|| Error::Snapshot("dims overflow".into()))?;
    let count = sites as usize * k;
    let mut data = Vec::with_capacity(count);
    for _ in 0..count {
        let mut c = [0f64; 3];
        for v in &mut c {
            *v = f64::from_le_bytes(take(&mut r)?);
        }
        data.push(LieValue(c));
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Snapshot(format!("{} trailing bytes", rest.len())));
    }
    Ok((SnapshotHeader { dims, spacing, degree, theta }, AdForm::from_vec(degree as usize, data)?))
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    Ok(serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?)
}

//! Binary state snapshots.
//!
//! Little-endian layout, 60-byte header then seven fields:
//!
//! ```text
//! "MHDB" | version u32 | N u32 | M u32 | t nu eta kappa g (f64) | field count u32
//! u1 u2 u3 b1 b2 b3 theta, each N^3 (re f64, im f64) pairs in row-major
//! (k1, k2, k3) slot order, slot j holding wavenumber j for j < N/2 and j - N otherwise
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;

use crate::dynamics::{Params, State};
use crate::error::{MhdError, Result};
use crate::spectral::{dealias_cutoff, SpectralField, VectorField, HERMITIAN_TOLERANCE};

pub const MAGIC: [u8; 4] = *b"MHDB";
pub const VERSION: u32 = 1;
pub const FIELD_COUNT: u32 = 7;
pub const HEADER_LEN: usize = 60;

/// Header metadata.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotHeader {
    pub n: usize,
    pub cutoff: usize,
    pub t: f64,
    pub nu: f64,
    pub eta: f64,
    pub kappa: f64,
    pub g: f64,
}

impl SnapshotHeader {
    pub fn new(state: &State, params: &Params) -> Self {
        SnapshotHeader {
            n: state.n(),
            cutoff: params.cutoff,
            t: state.t,
            nu: params.nu,
            eta: params.eta,
            kappa: params.kappa,
            g: params.g,
        }
    }
}

fn fields(state: &State) -> [&SpectralField; 7] {
    let (u, b) = (&state.u, &state.b);
    [&u[0], &u[1], &u[2], &b[0], &b[1], &b[2], &state.theta]
}

pub fn write_snapshot_to(w: &mut impl Write, state: &State, params: &Params) -> Result<()> {
    let h = SnapshotHeader::new(state, params);
    let n = u32::try_from(h.n).map_err(|_| MhdError::Format("grid too large".into()))?;
    w.write_all(&MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    w.write_u32::<LittleEndian>(n)?;
    w.write_u32::<LittleEndian>(h.cutoff as u32)?;
    for x in [h.t, h.nu, h.eta, h.kappa, h.g] {
        w.write_f64::<LittleEndian>(x)?;
    }
    w.write_u32::<LittleEndian>(FIELD_COUNT)?;
    for f in fields(state) {
        for c in f.coeffs() {
            w.write_f64::<LittleEndian>(c.re)?;
            w.write_f64::<LittleEndian>(c.im)?;
        }
    }
    Ok(())
}

pub fn write_snapshot(state: &State, params: &Params, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_snapshot_to(&mut w, state, params)?;
    w.flush()?;
    Ok(())
}

fn truncated(e: std::io::Error) -> MhdError {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        MhdError::DataCorruption("snapshot is truncated".into())
    } else {
        MhdError::Io(e)
    }
}

/// Read a snapshot, rejecting wrong magic or version, truncation, trailing
/// bytes and non-Hermitian fields.
pub fn read_snapshot_from(r: &mut impl Read) -> Result<(State, SnapshotHeader)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(truncated)?;
    if magic != MAGIC {
        return Err(MhdError::Format(format!("bad magic {magic:?}")));
    }
    let version = r.read_u32::<LittleEndian>().map_err(truncated)?;
    if version != VERSION {
        return Err(MhdError::Format(format!("unsupported version {version}")));
    }
    let n = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
    let cutoff = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
    let mut meta = [0.0f64; 5];
    for x in meta.iter_mut() {
        *x = r.read_f64::<LittleEndian>().map_err(truncated)?;
    }
    let count = r.read_u32::<LittleEndian>().map_err(truncated)?;
    if count != FIELD_COUNT {
        return Err(MhdError::Format(format!("expected {FIELD_COUNT} fields, found {count}")));
    }
    if n < 2 || n % 2 != 0 || cutoff > dealias_cutoff(n) {
        return Err(MhdError::DataCorruption(format!("invalid grid N = {n}, M = {cutoff}")));
    }
    let len = n * n * n;
    let mut buf = vec![0.0f64; 2 * len];
    let mut read_field = |r: &mut dyn Read| -> Result<SpectralField> {
        r.read_f64_into::<LittleEndian>(&mut buf).map_err(truncated)?;
        let coeffs = buf.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let f = SpectralField::from_coeffs(n, coeffs)?;
        let defect = f.hermitian_defect();
        if !(defect <= HERMITIAN_TOLERANCE) {
            return Err(MhdError::DataCorruption(format!("field is not Hermitian (defect {defect:e})")));
        }
        Ok(f)
    };
    let mut f: Vec<SpectralField> = Vec::with_capacity(7);
    for _ in 0..FIELD_COUNT {
        f.push(read_field(r)?);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(MhdError::DataCorruption("trailing bytes after the last field".into()));
    }
    let theta = f.pop().unwrap();
    let b: [SpectralField; 3] = f.split_off(3).try_into().unwrap();
    let u: [SpectralField; 3] = f.try_into().unwrap();
    let header = SnapshotHeader {
        n,
        cutoff,
        t: meta[0],
        nu: meta[1],
        eta: meta[2],
        kappa: meta[3],
        g: meta[4],
    };
    let state = State {
        u: VectorField { components: u },
        b: VectorField { components: b },
        theta,
        t: meta[0],
    };
    Ok((state, header))
}

pub fn read_snapshot(path: &Path) -> Result<(State, SnapshotHeader)> {
    read_snapshot_from(&mut BufReader::new(File::open(path)?))
}

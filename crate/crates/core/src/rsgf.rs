//! RSGF: little-endian binary container for one real or complex grid field.
//!
//! ```text
//! magic   "RSGF"            4 bytes
//! version u32 = 1
//! kind    u8   0 = real, 1 = complex
//! dims    3 × u32
//! origin  3 × f64
//! spacing f64
//! payload f64 row-major (complex interleaved re, im)
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField, GridSpec, ScalarField};

pub const MAGIC: &[u8; 4] = b"RSGF";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 1 + 12 + 24 + 8;

#[derive(Debug, Clone, PartialEq)]
pub enum AnyField {
    Real(ScalarField),
    Complex(ComplexField),
}

impl AnyField {
    pub fn grid(&self) -> &GridSpec {
        match self {
            AnyField::Real(f) => f.grid(),
            AnyField::Complex(f) => f.grid(),
        }
    }

    pub fn into_real(self) -> Result<ScalarField> {
        match self {
            AnyField::Real(f) => Ok(f),
            AnyField::Complex(_) => Err(Error::Format("expected a real field, found complex".into())),
        }
    }

    pub fn into_complex(self) -> Result<ComplexField> {
        match self {
            AnyField::Complex(f) => Ok(f),
            AnyField::Real(_) => Err(Error::Format("expected a complex field, found real".into())),
        }
    }
}

impl From<ScalarField> for AnyField {
    fn from(f: ScalarField) -> Self {
        AnyField::Real(f)
    }
}

impl From<ComplexField> for AnyField {
    fn from(f: ComplexField) -> Self {
        AnyField::Complex(f)
    }
}

fn header(grid: &GridSpec, kind: u8, payload_len: usize) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + payload_len * 8);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(kind);
    for d in grid.dims() {
        buf.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for o in grid.origin() {
        buf.extend_from_slice(&o.to_le_bytes());
    }
    buf.extend_from_slice(&grid.spacing().to_le_bytes());
    buf
}

pub fn encode(field: &AnyField) -> Vec<u8> {
    match field {
        AnyField::Real(f) => {
            let mut buf = header(f.grid(), 0, f.data().len());
            for v in f.data() {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            buf
        }
        AnyField::Complex(f) => {
            let mut buf = header(f.grid(), 1, 2 * f.data().len());
            for v in f.data() {
                buf.extend_from_slice(&v.re.to_le_bytes());
                buf.extend_from_slice(&v.im.to_le_bytes());
            }
            buf
        }
    }
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

pub fn decode(bytes: &[u8]) -> Result<AnyField> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!("truncated header ({} bytes)", bytes.len())));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let kind = bytes[8];
    if kind > 1 {
        return Err(Error::Format(format!("unknown kind {kind}")));
    }
    let dims = [u32_at(bytes, 9) as usize, u32_at(bytes, 13) as usize, u32_at(bytes, 17) as usize];
    let origin = [f64_at(bytes, 21), f64_at(bytes, 29), f64_at(bytes, 37)];
    let spacing = f64_at(bytes, 45);
    let grid = GridSpec::new(dims, origin, spacing)
        .map_err(|e| Error::Format(format!("invalid grid header: {e}")))?;
    let values = grid.len() * if kind == 1 { 2 } else { 1 };
    let expected = HEADER_LEN + values * 8;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "payload size mismatch: expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    let payload = &bytes[HEADER_LEN..];
    let read = |i: usize| f64_at(payload, 8 * i);
    let field = if kind == 0 {
        let data = (0..grid.len()).map(read).collect();
        AnyField::Real(ScalarField::new(grid, data).map_err(|e| Error::Format(e.to_string()))?)
    } else {
        let data = (0..grid.len()).map(|i| Complex64::new(read(2 * i), read(2 * i + 1))).collect();
        AnyField::Complex(ComplexField::new(grid, data).map_err(|e| Error::Format(e.to_string()))?)
    };
    Ok(field)
}

pub fn write_field(path: impl AsRef<Path>, field: &AnyField) -> Result<()> {
    fs::write(path, encode(field))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<AnyField> {
    decode(&fs::read(path)?)
}

//! Binary dump format for complex matrices, used for cached Schur bases and
//! gate memories.
//!
//! Layout: magic `RMCD`, `u32` format version, `u64` header length, UTF-8
//! JSON header, then `rows × cols` complex doubles in row-major order, each
//! written as `(re, im)` little-endian `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{build_schur_basis, BuildOptions, SchurBasis};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::repcore::YoungDiagram;

const MAGIC: &[u8; 4] = b"RMCD";
const FORMAT_VERSION: u32 = 1;

/// Bumped whenever basis construction or its sign convention changes.
pub const PHASE_CONVENTION_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnLabel {
    pub lambda: YoungDiagram,
    pub q: usize,
    pub alpha: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpHeader {
    /// What the matrix holds, e.g. `"schur-basis"` or `"gate-memory"`.
    pub kind: String,
    pub n: usize,
    pub d: usize,
    pub phase_convention_version: u32,
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub columns: Vec<ColumnLabel>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexDump {
    pub header: DumpHeader,
    pub data: CMatrix,
}

pub fn write_complex_dump<W: Write>(mut out: W, dump: &ComplexDump) -> Result<()> {
    let (rows, cols) = dump.data.shape();
    if (rows, cols) != (dump.header.rows, dump.header.cols) {
        return Err(Error::DimensionMismatch {
            expected: dump.header.rows * dump.header.cols,
            found: rows * cols,
        });
    }
    let header = serde_json::to_vec(&dump.header)?;
    out.write_all(MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&(header.len() as u64).to_le_bytes())?;
    out.write_all(&header)?;
    for i in 0..rows {
        for j in 0..cols {
            let z = dump.data[(i, j)];
            out.write_all(&z.re.to_le_bytes())?;
            out.write_all(&z.im.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_complex_dump<R: Read>(mut input: R) -> Result<ComplexDump> {
    let bad = |msg: &str| Error::BasisInvalid(format!("cache file: {msg}"));
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("wrong magic"));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    if u32::from_le_bytes(word) != FORMAT_VERSION {
        return Err(bad("unsupported format version"));
    }
    let mut len = [0u8; 8];
    input.read_exact(&mut len)?;
    let len = usize::try_from(u64::from_le_bytes(len)).map_err(|_| bad("header too large"))?;
    let mut header = vec![0u8; len];
    input.read_exact(&mut header)?;
    let header: DumpHeader = serde_json::from_slice(&header)?;
    let mut data = CMatrix::zeros(header.rows, header.cols);
    let mut buf = [0u8; 16];
    for i in 0..header.rows {
        for j in 0..header.cols {
            input.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
            data[(i, j)] = C64::new(re, im);
        }
    }
    Ok(ComplexDump { header, data })
}

impl SchurBasis {
    pub fn column_labels(&self) -> Vec<ColumnLabel> {
        let mut out = Vec::with_capacity(self.dim());
        for label in 0..self.num_labels() {
            for q in 0..self.d_lambda(label) {
                for alpha in 0..self.m_lambda(label) {
                    out.push(ColumnLabel {
                        lambda: self.label(label).clone(),
                        q,
                        alpha,
                    });
                }
            }
        }
        out
    }

    pub fn to_dump(&self) -> ComplexDump {
        ComplexDump {
            header: DumpHeader {
                kind: "schur-basis".into(),
                n: self.n(),
                d: self.d(),
                phase_convention_version: PHASE_CONVENTION_VERSION,
                rows: self.dim(),
                cols: self.dim(),
                columns: self.column_labels(),
            },
            data: self.matrix().map(|x| C64::new(x, 0.0)),
        }
    }

    /// Rebuilds a basis from a dump, checking the header against `(n, d)`.
    pub fn from_dump(dump: &ComplexDump, n: usize, d: usize) -> Result<Self> {
        let h = &dump.header;
        if h.kind != "schur-basis" || h.n != n || h.d != d || h.phase_convention_version != PHASE_CONVENTION_VERSION {
            return Err(Error::BasisInvalid(format!(
                "cache entry ({}, n={}, d={}, v{}) does not match n={n}, d={d}",
                h.kind, h.n, h.d, h.phase_convention_version
            )));
        }
        let matrix = DMatrix::from_fn(h.rows, h.cols, |i, j| dump.data[(i, j)].re);
        let basis = SchurBasis::from_parts(n, d, matrix);
        if basis.dim() != d.pow(n as u32) || h.columns != basis.column_labels() {
            return Err(Error::BasisInvalid("cache column map does not match the table".into()));
        }
        Ok(basis)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_complex_dump(BufWriter::new(File::create(path)?), &self.to_dump())
    }

    pub fn load(path: &Path, n: usize, d: usize) -> Result<Self> {
        let dump = read_complex_dump(BufReader::new(File::open(path)?))?;
        Self::from_dump(&dump, n, d)
    }

    /// File name of the cache entry for `(n, d)` under `dir`.
    pub fn cache_path(dir: &Path, n: usize, d: usize) -> PathBuf {
        dir.join(format!("schur_n{n}_d{d}_v{PHASE_CONVENTION_VERSION}.bin"))
    }

    /// Loads `(n, d)` from `dir` when a valid entry exists, otherwise builds and stores it.
    pub fn load_or_build(dir: &Path, n: usize, d: usize, opts: &BuildOptions) -> Result<Self> {
        let path = Self::cache_path(dir, n, d);
        if path.exists() {
            if let Ok(basis) = Self::load(&path, n, d) {
                return Ok(basis);
            }
        }
        let basis = build_schur_basis(n, d, opts)?;
        std::fs::create_dir_all(dir)?;
        basis.save(&path)?;
        Ok(basis)
    }
}

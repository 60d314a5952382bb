//! Binary format for [`DiscretizedSection`]s.
//!
//! A file is one line of JSON (the header, terminated by `\n`) followed by
//! the node values as little-endian `f64`. Nodes are stored in grid order
//! (last axis fastest); each node contributes its `m_u` fibre coordinates
//! followed by its `m_k · r` jet coordinates `y_a^α` in the order `α`-major,
//! `a`-minor.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use liefield_core::{Boundary, DiscretizedSection, GridSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const FORMAT: &str = "liefield-section";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionHeader {
    pub format: String,
    pub version: u32,
    pub r: usize,
    pub extents: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    pub boundary: String,
    pub m_u: usize,
    pub m_k: usize,
    pub nodes: usize,
}

impl SectionHeader {
    pub fn of(phi: &DiscretizedSection) -> Self {
        let g = phi.grid();
        Self {
            format: FORMAT.to_string(),
            version: VERSION,
            r: g.r(),
            extents: g.extents().to_vec(),
            spacing: g.spacing().to_vec(),
            origin: g.origin().to_vec(),
            boundary: match g.boundary() {
                Boundary::Periodic => "periodic",
                Boundary::OneSided => "one_sided",
            }
            .to_string(),
            m_u: phi.m_u(),
            m_k: phi.m_k(),
            nodes: g.len(),
        }
    }
}

pub fn write_section<W: Write>(mut w: W, phi: &DiscretizedSection) -> std::io::Result<()> {
    let header = serde_json::to_string(&SectionHeader::of(phi)).expect("header serializes");
    w.write_all(header.as_bytes())?;
    w.write_all(b"\n")?;
    for node in 0..phi.grid().len() {
        for v in phi.u_at(node).iter().chain(phi.y_at(node)) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()
}

fn invalid(msg: impl Into<String>) -> std::io::Error {
    std::io::Error::new(std::io::ErrorKind::InvalidData, msg.into())
}

pub fn read_section<R: Read>(r: R) -> std::io::Result<DiscretizedSection> {
    let mut r = BufReader::new(r);
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line)?;
    let header: SectionHeader =
        serde_json::from_slice(&line).map_err(|e| invalid(format!("header: {e}")))?;
    if header.format != FORMAT || header.version != VERSION {
        return Err(invalid(format!(
            "unsupported format {} v{}",
            header.format, header.version
        )));
    }
    let boundary = match header.boundary.as_str() {
        "periodic" => Boundary::Periodic,
        "one_sided" => Boundary::OneSided,
        other => return Err(invalid(format!("unknown boundary {other}"))),
    };
    let grid = GridSpec::new(header.extents, header.spacing, header.origin, boundary)
        .map_err(|e| invalid(e.to_string()))?;
    if grid.r() != header.r || grid.len() != header.nodes {
        return Err(invalid("header dimensions disagree"));
    }
    let (mu, w) = (header.m_u, header.m_k * header.r);
    let mut u = Vec::with_capacity(header.nodes * mu);
    let mut y = Vec::with_capacity(header.nodes * w);
    let mut buf = [0u8; 8];
    for _ in 0..header.nodes {
        for _ in 0..mu {
            r.read_exact(&mut buf)?;
            u.push(f64::from_le_bytes(buf));
        }
        for _ in 0..w {
            r.read_exact(&mut buf)?;
            y.push(f64::from_le_bytes(buf));
        }
    }
    if r.read(&mut buf)? != 0 {
        return Err(invalid("trailing bytes after section data"));
    }
    DiscretizedSection::new(grid, mu, header.m_k, u, y).map_err(|e| invalid(e.to_string()))
}

pub fn save(path: &Path, phi: &DiscretizedSection) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_section(std::io::BufWriter::new(f), phi).map_err(|e| CliError::io(path, e))
}

pub fn load(path: &Path) -> Result<DiscretizedSection> {
    let f = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_section(f).map_err(|e| CliError::io(path, e))
}

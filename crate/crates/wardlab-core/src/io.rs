//! The WDF1 snapshot format and trajectory indexes.
//!
//! A snapshot is one UTF-8 JSON header line
//!
//!   {"magic":"WDF1","nx":..,"ny":..,"N":..,"t":..,"h":..,
//!    "origin":[x0,y0],"unitary":true|false}
//!
//! terminated by a newline, followed by raw little-endian 64-bit floats,
//! interleaved (re, im), index order: j (y) outermost, then i (x), then
//! matrix row, then matrix column. Round trips are bit exact. An optional
//! free-form "meta" object may follow "unitary" in the header.

use crate::cmatrix::{C64, CMatrix};
use crate::error::{Error, Result};
use crate::field::{InterpOrder, MatrixField, SampledField};
use crate::grid::GridSpec;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
struct Wdf1Header {
    magic: String,
    nx: usize,
    ny: usize,
    #[serde(rename = "N")]
    n: usize,
    t: f64,
    h: f64,
    origin: [f64; 2],
    unitary: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

pub fn write_snapshot_to(
    field: &MatrixField,
    meta: Option<serde_json::Value>,
    w: &mut impl Write,
) -> Result<()> {
    let header = Wdf1Header {
        magic: "WDF1".to_string(),
        nx: field.grid.nx,
        ny: field.grid.ny,
        n: field.n,
        t: field.t,
        h: field.grid.h,
        origin: field.grid.origin,
        unitary: field.unitary,
        meta,
    };
    let mut line = serde_json::to_string(&header)?;
    line.push('\n');
    w.write_all(line.as_bytes())?;
    let n = field.n;
    let mut buf = Vec::with_capacity(field.grid.len() * n * n * 16);
    for j in 0..field.grid.ny {
        for i in 0..field.grid.nx {
            let m = field.at(i, j);
            for r in 0..n {
                for c in 0..n {
                    let z = m[(r, c)];
                    buf.extend_from_slice(&z.re.to_le_bytes());
                    buf.extend_from_slice(&z.im.to_le_bytes());
                }
            }
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn write_snapshot(field: &MatrixField, meta: Option<serde_json::Value>, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_snapshot_to(field, meta, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_snapshot_from(r: &mut impl Read) -> Result<(MatrixField, Option<serde_json::Value>)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let nl = bytes.iter().position(|&b| b == b'\n').ok_or(Error::Format {
        offset: bytes.len() as u64,
        detail: "missing header newline".into(),
    })?;
    let header: Wdf1Header = serde_json::from_slice(&bytes[..nl]).map_err(|e| Error::Format {
        offset: 0,
        detail: format!("bad header: {e}"),
    })?;
    if header.magic != "WDF1" {
        return Err(Error::Format {
            offset: 0,
            detail: format!("bad magic '{}', expected 'WDF1'", header.magic),
        });
    }
    let payload = &bytes[nl + 1..];
    let expected = header.nx * header.ny * header.n * header.n * 16;
    if payload.len() != expected {
        return Err(Error::Format {
            offset: (nl + 1 + expected) as u64,
            detail: format!(
                "payload holds {} bytes, header implies {expected}",
                payload.len()
            ),
        });
    }
    let grid = GridSpec::new(header.nx, header.ny, header.h, header.origin)?;
    let n = header.n;
    let mut data = Vec::with_capacity(grid.len());
    let mut off = 0usize;
    let read_f64 = |off: &mut usize| {
        let v = f64::from_le_bytes(payload[*off..*off + 8].try_into().expect("sized read"));
        *off += 8;
        v
    };
    for _ in 0..grid.len() {
        let mut m = CMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                let re = read_f64(&mut off);
                let im = read_f64(&mut off);
                m[(r, c)] = C64::new(re, im);
            }
        }
        data.push(m);
    }
    let field = MatrixField::from_data(grid, n, header.t, header.unitary, data)?;
    field.validate()?;
    Ok((field, header.meta))
}

pub fn read_snapshot(path: &Path) -> Result<(MatrixField, Option<serde_json::Value>)> {
    let mut r = BufReader::new(File::open(path)?);
    read_snapshot_from(&mut r)
}

/// Index of a persisted trajectory: uniform step, ordered snapshot files.
#[derive(Debug, Serialize, Deserialize)]
pub struct TrajectoryIndex {
    pub dt: f64,
    pub steps: usize,
    pub files: Vec<String>,
}

impl TrajectoryIndex {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        let mut text = serde_json::to_string(self)?;
        text.push('\n');
        w.write_all(text.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Writes every slice of a trajectory plus its index file into `dir`.
pub fn write_trajectory(traj: &SampledField, dir: &Path, stem: &str) -> Result<TrajectoryIndex> {
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        let name = format!("{stem}_{k:05}.wdf1");
        write_snapshot(traj.slice(k), None, &dir.join(&name))?;
        files.push(name);
    }
    let index = TrajectoryIndex { dt: traj.dt(), steps: traj.len() - 1, files };
    index.write(&dir.join(format!("{stem}_index.json")))?;
    Ok(index)
}

/// Loads a trajectory back from its index file.
pub fn read_trajectory(index_path: &Path, order: InterpOrder) -> Result<SampledField> {
    let index = TrajectoryIndex::read(index_path)?;
    let dir = index_path.parent().unwrap_or(Path::new("."));
    let mut slices = Vec::with_capacity(index.files.len());
    for name in &index.files {
        slices.push(read_snapshot(&dir.join(name))?.0);
    }
    SampledField::new(slices, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::DiagPhaseField;
    use crate::field::FieldSource;

    fn sample_field() -> MatrixField {
        let grid = GridSpec::from_extent(-1.0, 0.5, -0.5, 1.0, 0.1).unwrap();
        FieldSource::analytic(DiagPhaseField::new(0.7)).slice(&grid, 0.25).unwrap()
    }

    #[test]
    fn snapshot_round_trip_is_bit_exact() {
        let field = sample_field();
        let mut bytes = Vec::new();
        write_snapshot_to(&field, None, &mut bytes).unwrap();
        let (back, meta) = read_snapshot_from(&mut bytes.as_slice()).unwrap();
        assert!(meta.is_none());
        let mut again = Vec::new();
        write_snapshot_to(&back, None, &mut again).unwrap();
        assert_eq!(bytes, again);
    }

    #[test]
    fn meta_object_round_trips() {
        let field = sample_field();
        let meta = serde_json::json!({"theta": 1.25});
        let mut bytes = Vec::new();
        write_snapshot_to(&field, Some(meta.clone()), &mut bytes).unwrap();
        let (_, back) = read_snapshot_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(back, Some(meta));
    }

    #[test]
    fn truncated_payload_reports_expected_length() {
        let field = sample_field();
        let mut bytes = Vec::new();
        write_snapshot_to(&field, None, &mut bytes).unwrap();
        let full = bytes.len();
        bytes.truncate(full - 24);
        let err = read_snapshot_from(&mut bytes.as_slice()).unwrap_err();
        match err {
            Error::Format { offset, detail } => {
                assert_eq!(offset as usize, full);
                assert!(detail.contains("header implies"), "{detail}");
            }
            other => panic!("expected format error, got {other}"),
        }
    }

    #[test]
    fn unitary_flag_with_bad_payload_names_the_worst_node() {
        let mut field = sample_field();
        *field.at_mut(3, 2) = field.at(3, 2).scale(C64::new(2.0, 0.0));
        let mut bytes = Vec::new();
        write_snapshot_to(&field, None, &mut bytes).unwrap();
        let err = read_snapshot_from(&mut bytes.as_slice()).unwrap_err();
        match err {
            Error::Invariant(msg) => assert!(msg.contains("(3,2)"), "{msg}"),
            other => panic!("expected invariant failure, got {other}"),
        }
    }

    #[test]
    fn trajectory_round_trip() {
        let grid = GridSpec::from_extent(-1.0, 1.0, -1.0, 1.0, 0.25).unwrap();
        let src = FieldSource::analytic(DiagPhaseField::new(0.7));
        let slices: Vec<MatrixField> = (0..4).map(|k| src.slice(&grid, 0.1 * k as f64).unwrap()).collect();
        let traj = SampledField::new(slices, InterpOrder::Cubic).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let index = write_trajectory(&traj, dir.path(), "traj").unwrap();
        assert_eq!(index.steps, 3);
        let back = read_trajectory(&dir.path().join("traj_index.json"), InterpOrder::Cubic).unwrap();
        assert_eq!(back.len(), traj.len());
        for k in 0..back.len() {
            for (a, b) in back.slice(k).data().iter().zip(traj.slice(k).data().iter()) {
                assert_eq!(a, b);
            }
        }
    }
}

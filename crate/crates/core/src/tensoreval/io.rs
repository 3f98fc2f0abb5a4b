//! Tensor files: little-endian binary and CSV.
//!
//! Binary layout: magic `TFT1`, order and dimension as `u32`, then `N^p`
//! `f64` entries in row-major order. CSV layout: header `i1,..,ip,value`,
//! one row per entry with 1-based indices; absent entries are zero.

use std::io::{Read, Write};

use super::tensor::{checked_size, DenseTensor};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"TFT1";

pub fn write_tensor<W: Write>(mut w: W, t: &DenseTensor) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(t.order() as u32).to_le_bytes())?;
    w.write_all(&(t.dim() as u32).to_le_bytes())?;
    for x in t.data() {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_tensor<R: Read>(mut r: R) -> Result<DenseTensor> {
    let mut head = [0u8; 12];
    r.read_exact(&mut head)?;
    if &head[..4] != MAGIC {
        return Err(Error::Parse {
            line: 0,
            column: 1,
            message: "not a tensor file (bad magic)".into(),
        });
    }
    let order = u32::from_le_bytes(head[4..8].try_into().expect("4 bytes")) as usize;
    let dim = u32::from_le_bytes(head[8..12].try_into().expect("4 bytes")) as usize;
    let size = checked_size(order, dim)?;
    let mut bytes = vec![0u8; size * 8];
    r.read_exact(&mut bytes)?;
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    DenseTensor::new(order, dim, data)
}

pub fn write_tensor_csv<W: Write>(w: W, t: &DenseTensor) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = (1..=t.order()).map(|k| format!("i{k}")).collect();
    header.push("value".into());
    out.write_record(&header).map_err(csv_err)?;
    let mut idx = vec![0usize; t.order()];
    for &x in t.data() {
        let mut rec: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        rec.push(format!("{x:?}"));
        out.write_record(&rec).map_err(csv_err)?;
        for k in (0..t.order()).rev() {
            idx[k] += 1;
            if idx[k] < t.dim() {
                break;
            }
            idx[k] = 0;
        }
    }
    out.flush()?;
    Ok(())
}

/// Read a CSV tensor; the dimension is the largest index unless `dim` is given.
pub fn read_tensor_csv<R: Read>(r: R, dim: Option<usize>) -> Result<DenseTensor> {
    let mut reader = csv::Reader::from_reader(r);
    let order = reader.headers().map_err(csv_err)?.len().saturating_sub(1);
    let mut entries = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = row + 2;
        if rec.len() != order + 1 {
            return Err(Error::Parse {
                line,
                column: 1,
                message: format!("expected {} fields, found {}", order + 1, rec.len()),
            });
        }
        let mut idx = Vec::with_capacity(order);
        for k in 0..order {
            let i: usize = rec[k].trim().parse().map_err(|_| Error::Parse {
                line,
                column: k + 1,
                message: format!("bad index `{}`", &rec[k]),
            })?;
            if i == 0 {
                return Err(Error::Parse {
                    line,
                    column: k + 1,
                    message: "indices are 1-based".into(),
                });
            }
            idx.push(i - 1);
        }
        let v: f64 = rec[order].trim().parse().map_err(|_| Error::Parse {
            line,
            column: order + 1,
            message: format!("bad value `{}`", &rec[order]),
        })?;
        entries.push((idx, v));
    }
    let n = dim.unwrap_or_else(|| entries.iter().flat_map(|(i, _)| i.iter().map(|x| x + 1)).max().unwrap_or(1));
    let mut t = DenseTensor::zeros(order, n)?;
    for (idx, v) in entries {
        if idx.iter().any(|&i| i >= n) {
            return Err(Error::Arity(format!("index {idx:?} outside dimension {n}")));
        }
        t.set(&idx, v);
    }
    Ok(t)
}

fn csv_err(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::Parse {
            line: p.line() as usize,
            column: 1,
            message: e.to_string(),
        },
        None => Error::Io(e.to_string()),
    }
}

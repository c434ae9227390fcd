//! File formats.
//!
//! * States: JSON array of `[re, im]` pairs, one per amplitude.
//! * POVMs: JSON array of matrices; each matrix is an array of rows of `[re, im]` pairs.
//! * Probabilities: CSV with header `index,weight`.
//! * Channel kernels: CSV with header `in_index,out_index,weight`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::measurement::{validate_povm, PovmSet};
use crate::quantum::{CMatrix, PureState, C64};
use crate::signals::{ChannelKernel, FiniteProbability};

type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn state_to_json(state: &PureState) -> Result<String> {
    let pairs: Vec<[f64; 2]> = state.amplitudes().iter().map(|z| [z.re, z.im]).collect();
    Ok(serde_json::to_string(&pairs)?)
}

pub fn state_from_json(text: &str) -> Result<PureState> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text)?;
    PureState::new(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
}

pub fn matrix_to_json_value(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn matrix_from_json_value(rows: JsonMatrix) -> Result<CMatrix> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, actual: bad.len() });
    }
    Ok(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn povm_to_json(povm: &PovmSet) -> Result<String> {
    let matrices: Vec<JsonMatrix> = povm.dense_elements().iter().map(matrix_to_json_value).collect();
    Ok(serde_json::to_string(&matrices)?)
}

/// Parses and validates a POVM.
pub fn povm_from_json(text: &str) -> Result<PovmSet> {
    let matrices: Vec<JsonMatrix> = serde_json::from_str(text)?;
    validate_povm(matrices.into_iter().map(matrix_from_json_value).collect::<Result<_>>()?)
}

pub fn write_probability_csv(p: &FiniteProbability, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "weight"]).map_err(csv_error)?;
    for (i, weight) in p.support() {
        out.write_record([i.to_string(), format!("{weight:e}")]).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `index,weight` rows; unlisted indices below the largest one get weight zero.
pub fn read_probability_csv(r: impl Read) -> Result<FiniteProbability> {
    let mut weights: Vec<f64> = Vec::new();
    for record in csv::Reader::from_reader(r).records() {
        let record = record.map_err(csv_error)?;
        let index: usize = parse_field(&record, 0)?;
        let weight: f64 = parse_field(&record, 1)?;
        if index >= weights.len() {
            weights.resize(index + 1, 0.0);
        }
        weights[index] += weight;
    }
    FiniteProbability::new(weights)
}

pub fn write_kernel_csv(kernel: &ChannelKernel, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["in_index", "out_index", "weight"]).map_err(csv_error)?;
    for (z, row) in kernel.rows().iter().enumerate() {
        for (x, weight) in row.support() {
            out.write_record([z.to_string(), x.to_string(), format!("{weight:e}")]).map_err(csv_error)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads `in_index,out_index,weight` rows. Every input from 0 to the largest
/// listed one must have a normalized row.
pub fn read_kernel_csv(r: impl Read) -> Result<ChannelKernel> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut outputs = 0;
    for record in csv::Reader::from_reader(r).records() {
        let record = record.map_err(csv_error)?;
        let z: usize = parse_field(&record, 0)?;
        let x: usize = parse_field(&record, 1)?;
        let weight: f64 = parse_field(&record, 2)?;
        if z >= rows.len() {
            rows.resize(z + 1, Vec::new());
        }
        if x >= rows[z].len() {
            rows[z].resize(x + 1, 0.0);
        }
        rows[z][x] += weight;
        outputs = outputs.max(x + 1);
    }
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(z, mut row)| {
            if row.is_empty() {
                return Err(Error::MissingChannelRow(z));
            }
            row.resize(outputs, 0.0);
            FiniteProbability::new(row)
        })
        .collect::<Result<_>>()?;
    ChannelKernel::new(rows)
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize) -> Result<T> {
    let field = record.get(idx).ok_or_else(|| Error::InvalidParameter(format!("missing CSV column {idx}")))?;
    field.trim().parse().map_err(|_| Error::InvalidParameter(format!("cannot parse CSV field {field:?}")))
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("CSV: {other:?}")),
    }
}

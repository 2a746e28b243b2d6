//! CSV form of a tabulated surface: the header row carries the output grid
//! `t_j` after a corner cell, each following row starts with `s_i` and then
//! holds the raw values `β(s_i, t_j)`. Numbers use the shortest round-trip
//! formatting, so write → read is exact.

use std::path::Path;

use nalgebra::DMatrix;

use super::surface::TabulatedSurface;
use crate::error::{Error, Result};

const CORNER: &str = "s/t";

pub fn tabulated_to_csv(surface: &TabulatedSurface) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = Vec::with_capacity(surface.outputs().len() + 1);
    header.push(CORNER.to_string());
    header.extend(surface.outputs().iter().map(|t| t.to_string()));
    w.write_record(&header)?;
    for (i, s) in surface.inputs().iter().enumerate() {
        let mut rec = Vec::with_capacity(header.len());
        rec.push(s.to_string());
        rec.extend(surface.values().row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Csv(e.to_string()))
}

fn parse(field: &str, what: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Csv(format!("cannot parse {what} `{field}`")))
}

pub fn tabulated_from_csv(text: &str) -> Result<TabulatedSurface> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut records = r.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Csv("empty surface file".into()))??;
    let outputs = header
        .iter()
        .skip(1)
        .map(|f| parse(f, "output grid point"))
        .collect::<Result<Vec<_>>>()?;
    let mut inputs = Vec::new();
    let mut values = Vec::new();
    for rec in records {
        let rec = rec?;
        if rec.len() != outputs.len() + 1 {
            return Err(Error::Csv(format!(
                "row {} has {} fields, expected {}",
                inputs.len() + 1,
                rec.len(),
                outputs.len() + 1
            )));
        }
        inputs.push(parse(&rec[0], "input grid point")?);
        for f in rec.iter().skip(1) {
            values.push(parse(f, "surface value")?);
        }
    }
    let m = DMatrix::from_row_slice(inputs.len(), outputs.len(), &values);
    TabulatedSurface::new(inputs, outputs, m)
}

pub fn write_tabulated_csv(surface: &TabulatedSurface, path: &Path) -> Result<()> {
    std::fs::write(path, tabulated_to_csv(surface)?)?;
    Ok(())
}

pub fn read_tabulated_csv(path: &Path) -> Result<TabulatedSurface> {
    tabulated_from_csv(&std::fs::read_to_string(path)?)
}

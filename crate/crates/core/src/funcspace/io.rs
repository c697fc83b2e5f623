//! CSV and JSON encodings of grid functions.
//!
//! CSV columns are `x,value,is_neg_inf`; JSON documents have the shape
//! `{"grid": {"dx": .., "span": [x_min, x_max]}, "values": [..], "klass": ..}`
//! with `null` standing for a `-∞` value. Floats carry 17 significant digits.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::Deserialize;

use super::function::{ExtReal, FunctionClass, GridFunction};
use super::grid::WeightedGrid;
use crate::error::{domain, LabError, Result};

/// Formats a float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(f: &GridFunction, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "value", "is_neg_inf"])?;
    let grid = f.grid();
    for i in 0..f.len() {
        let (value, flag) = match f.get(i) {
            ExtReal::NegInf => (fmt17(0.0), "true"),
            ExtReal::Finite(v) => (fmt17(v), "false"),
        };
        w.write_record([fmt17(grid.x(i)).as_str(), value.as_str(), flag])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(f: &GridFunction) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(f, &mut buf)?;
    String::from_utf8(buf).map_err(|e| LabError::Config(e.to_string()))
}

fn grid_from_axis(x0: f64, x1: f64, dx: f64) -> Result<Arc<WeightedGrid>> {
    let cells = (x1 - x0) / dx;
    if (cells - cells.round()).abs() > 1e-6 {
        return domain("grid axis is not uniform");
    }
    Ok(Arc::new(WeightedGrid::uniform(x0, dx, cells.round() as usize + 1)?))
}

/// Reads a CSV grid function; the grid is rebuilt from the `x` column with κ ≡ 1.
pub fn read_csv<R: Read>(input: R) -> Result<GridFunction> {
    let mut r = csv::Reader::from_reader(input);
    let mut xs = Vec::new();
    let mut vals = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64> {
            rec.get(k)
                .ok_or_else(|| LabError::Config("short CSV record".into()))?
                .trim()
                .parse::<f64>()
                .map_err(|e| LabError::Config(e.to_string()))
        };
        xs.push(parse(0)?);
        let flag = rec.get(2).map(str::trim) == Some("true");
        vals.push(if flag {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(parse(1)?)
        });
    }
    if xs.len() < 2 {
        return domain("CSV needs at least two rows");
    }
    let dx = xs[1] - xs[0];
    let grid = grid_from_axis(xs[0], *xs.last().unwrap(), dx)?;
    if grid.len() != xs.len() {
        return domain("CSV rows do not form a uniform lattice");
    }
    let f = GridFunction::from_extended(grid, &vals)?;
    if f.has_neg_inf() {
        Ok(f)
    } else {
        f.into_continuous()
    }
}

pub fn to_json_string(f: &GridFunction) -> String {
    let grid = f.grid();
    let values: Vec<String> = (0..f.len())
        .map(|i| match f.get(i) {
            ExtReal::NegInf => "null".to_string(),
            ExtReal::Finite(v) => fmt17(v),
        })
        .collect();
    let klass = match f.class() {
        FunctionClass::Continuous => "continuous",
        FunctionClass::Usc => "usc",
    };
    format!(
        "{{\"grid\":{{\"dx\":{},\"span\":[{},{}]}},\"values\":[{}],\"klass\":\"{}\"}}",
        fmt17(grid.dx()),
        fmt17(grid.x_min()),
        fmt17(grid.x_max()),
        values.join(","),
        klass
    )
}

#[derive(Deserialize)]
struct JsonGrid {
    dx: f64,
    span: [f64; 2],
}

#[derive(Deserialize)]
struct JsonFunction {
    grid: JsonGrid,
    values: Vec<Option<f64>>,
    klass: FunctionClass,
}

pub fn from_json_str(s: &str) -> Result<GridFunction> {
    let doc: JsonFunction = serde_json::from_str(s)?;
    let grid = grid_from_axis(doc.grid.span[0], doc.grid.span[1], doc.grid.dx)?;
    let ext: Vec<ExtReal> = doc
        .values
        .iter()
        .map(|v| v.map_or(ExtReal::NegInf, ExtReal::Finite))
        .collect();
    let f = GridFunction::from_extended(grid, &ext)?;
    match doc.klass {
        FunctionClass::Usc => Ok(f),
        FunctionClass::Continuous => f.into_continuous(),
    }
}

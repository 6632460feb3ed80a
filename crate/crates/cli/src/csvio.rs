//! Observation CSV files.
//!
//! One row per time step. Columns are named `y<j>` when there is a single
//! replicate and `y<j>_<k>` otherwise (1-based variable `j`, replicate `k`).
//! An empty cell or `NA` (any case) marks a missing entry.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use mvdlm::MaskedObservation;

use crate::error::{CliError, CliResult};

pub fn column_name(prefix: &str, var: usize, rep: usize, replicates: usize) -> String {
    if replicates == 1 {
        format!("{prefix}{}", var + 1)
    } else {
        format!("{prefix}{}_{}", var + 1, rep + 1)
    }
}

fn parse_header(name: &str) -> Option<(usize, Option<usize>)> {
    let rest = name.trim().strip_prefix('y')?;
    let index = |s: &str| s.parse::<usize>().ok().filter(|&i| i >= 1).map(|i| i - 1);
    match rest.split_once('_') {
        Some((j, k)) => Some((index(j)?, Some(index(k)?))),
        None => Some((index(rest)?, None)),
    }
}

/// Parsed observation table.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationTable {
    pub replicates: usize,
    pub dim: usize,
    pub rows: Vec<MaskedObservation>,
}

fn header_error(message: impl Into<String>) -> CliError {
    CliError::Data {
        row: 0,
        column: None,
        message: message.into(),
    }
}

pub fn read_observations<R: Read>(reader: R) -> CliResult<ObservationTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| header_error(e.to_string()))?
        .clone();

    // (variable, replicate) for each column
    let mut slots = Vec::with_capacity(headers.len());
    let mut single = None;
    for name in headers.iter() {
        let (j, k) = parse_header(name)
            .ok_or_else(|| header_error(format!("unrecognized column name '{name}'")))?;
        if *single.get_or_insert(k.is_none()) != k.is_none() {
            return Err(header_error(
                "cannot mix 'y<j>' and 'y<j>_<k>' column names",
            ));
        }
        slots.push((j, k.unwrap_or(0)));
    }
    if slots.is_empty() {
        return Err(header_error("no columns"));
    }
    let dim = slots.iter().map(|s| s.0).max().unwrap_or(0) + 1;
    let replicates = slots.iter().map(|s| s.1).max().unwrap_or(0) + 1;
    let mut seen = vec![false; dim * replicates];
    for &(j, k) in &slots {
        let cell = &mut seen[k * dim + j];
        if *cell {
            return Err(header_error(format!(
                "duplicate column {}",
                column_name("y", j, k, replicates)
            )));
        }
        *cell = true;
    }
    if let Some(pos) = seen.iter().position(|s| !s) {
        let name = column_name("y", pos % dim, pos / dim, replicates);
        return Err(header_error(format!("missing column {name}")));
    }

    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CliError::Data {
            row,
            column: None,
            message: e.to_string(),
        })?;
        let mut cells = vec![vec![None; dim]; replicates];
        for (c, field) in record.iter().enumerate() {
            let field = field.trim();
            if field.is_empty() || field.eq_ignore_ascii_case("na") {
                continue;
            }
            let value: f64 = field
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| CliError::Data {
                    row,
                    column: Some(headers[c].trim().to_string()),
                    message: format!("invalid number '{field}'"),
                })?;
            let (j, k) = slots[c];
            cells[k][j] = Some(value);
        }
        let obs = MaskedObservation::from_options(&cells).map_err(|e| CliError::Data {
            row,
            column: None,
            message: e.to_string(),
        })?;
        rows.push(obs);
    }
    if rows.is_empty() {
        return Err(CliError::Data {
            row: 1,
            column: None,
            message: "no data rows".into(),
        });
    }
    Ok(ObservationTable {
        replicates,
        dim,
        rows,
    })
}

pub fn parse_csv(path: &Path) -> CliResult<ObservationTable> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_observations(file)
}

/// Shortest representation that parses back to the same value; exponent
/// form outside `[1e-5, 1e15)`.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e15).contains(&a) || !a.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn format_value(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), format_number)
}

pub fn write_observations<W: Write>(writer: W, rows: &[MaskedObservation]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let Some(first) = rows.first() else {
        return Ok(());
    };
    let (r, p) = (first.replicates(), first.dim());
    let header: Vec<String> = (0..r)
        .flat_map(|k| (0..p).map(move |j| column_name("y", j, k, r)))
        .collect();
    wtr.write_record(&header)?;
    for obs in rows {
        let cells: Vec<String> = (0..r)
            .flat_map(|k| (0..p).map(move |j| format_value(obs.get(k, j))))
            .collect();
        wtr.write_record(&cells)?;
    }
    wtr.flush()?;
    Ok(())
}

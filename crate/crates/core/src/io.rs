//! CSV ingestion and emission.
//!
//! Dialect: comma separated, `.` decimal point, UTF-8. A first row whose
//! first token does not parse as a number is a header. Floats are written in
//! the shortest decimal form that parses back to the same `f64`, so a write
//! followed by a read is lossless.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::types::{Dataset, FunctionalDataset, Partition};

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn is_number(s: &str) -> bool {
    s.trim().parse::<f64>().is_ok()
}

fn parse_f64(s: &str, line: usize, col: usize) -> Result<f64> {
    let t = s.trim();
    let v: f64 = t.parse().map_err(|_| Error::Parse {
        line,
        message: format!("column {}: '{t}' is not a number", col + 1),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("column {}: non-finite value '{t}'", col + 1),
        });
    }
    Ok(v)
}

/// Raw table: optional header plus records with their 1-based line numbers.
struct Table {
    header: Option<Vec<String>>,
    rows: Vec<(usize, Vec<String>)>,
}

fn read_table(path: &Path) -> Result<Table> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec.iter().map(str::to_owned).collect::<Vec<_>>()));
    }
    let header = match rows.first() {
        Some((_, r)) if !is_number(&r[0]) => Some(rows.remove(0).1),
        _ => None,
    };
    let width = header
        .as_ref()
        .map(Vec::len)
        .or(rows.first().map(|r| r.1.len()));
    if let Some(w) = width {
        if let Some((line, r)) = rows.iter().find(|(_, r)| r.len() != w) {
            return Err(Error::Parse {
                line: *line,
                message: format!("expected {w} fields, found {}", r.len()),
            });
        }
    }
    Ok(Table { header, rows })
}

/// Multivariate data plus the optional ground-truth partition.
#[derive(Debug, Clone)]
pub struct MvInput {
    pub data: Dataset,
    pub truth: Option<Partition>,
}

/// Resolves `truth_col` against the header (by name) or as a 1-based index.
fn truth_index(key: &str, header: Option<&[String]>, width: usize) -> Result<usize> {
    if let Some(i) = header.and_then(|h| h.iter().position(|n| n == key)) {
        return Ok(i);
    }
    match key.parse::<usize>() {
        Ok(i) if (1..=width).contains(&i) => Ok(i - 1),
        _ => Err(Error::InvalidConfig(format!(
            "truth column '{key}' is neither a header name nor an index in 1..={width}"
        ))),
    }
}

/// Maps arbitrary label strings to clusters in order of first appearance.
pub fn partition_from_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<Partition> {
    let mut seen: Vec<&str> = Vec::new();
    let labels = tokens
        .iter()
        .map(|t| {
            let t = t.as_ref();
            seen.iter().position(|&s| s == t).unwrap_or_else(|| {
                seen.push(t);
                seen.len() - 1
            })
        })
        .collect();
    Partition::from_labels(labels)
}

/// Reads an `N x p` numeric table; `truth_col` removes one column and uses
/// it as the reference labelling.
pub fn read_mv_csv(path: &Path, truth_col: Option<&str>) -> Result<MvInput> {
    let t = read_table(path)?;
    let width = t
        .header
        .as_ref()
        .map(Vec::len)
        .or(t.rows.first().map(|r| r.1.len()))
        .ok_or_else(|| Error::EmptyData(format!("{}: no rows", path.display())))?;
    let truth = truth_col
        .map(|s| truth_index(s, t.header.as_deref(), width))
        .transpose()?;
    let p = width - usize::from(truth.is_some());
    let mut values = Array2::zeros((t.rows.len(), p));
    let mut tokens = Vec::new();
    for (i, (line, r)) in t.rows.iter().enumerate() {
        let mut j = 0;
        for (c, tok) in r.iter().enumerate() {
            if Some(c) == truth {
                tokens.push(tok.as_str());
            } else {
                values[[i, j]] = parse_f64(tok, *line, c)?;
                j += 1;
            }
        }
    }
    let data = match t.header {
        Some(h) => {
            let names = h
                .into_iter()
                .enumerate()
                .filter(|(c, _)| Some(*c) != truth)
                .map(|(_, n)| n)
                .collect();
            Dataset::with_feature_names(values, names)?
        }
        None => Dataset::new(values)?,
    };
    let truth = truth.map(|_| partition_from_tokens(&tokens)).transpose()?;
    Ok(MvInput { data, truth })
}

/// Reads curves: the first numeric row is the grid, every later row a curve.
pub fn read_fd_csv(path: &Path) -> Result<FunctionalDataset> {
    let t = read_table(path)?;
    let mut rows = t.rows.iter();
    let (gline, grow) = rows
        .next()
        .ok_or_else(|| Error::EmptyData(format!("{}: no grid row", path.display())))?;
    let grid = grow
        .iter()
        .enumerate()
        .map(|(c, s)| parse_f64(s, *gline, c))
        .collect::<Result<Vec<_>>>()?;
    let curves = rows
        .map(|(line, r)| {
            r.iter()
                .enumerate()
                .map(|(c, s)| parse_f64(s, *line, c))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    FunctionalDataset::from_rows(grid, &curves)
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Writes rows of already formatted fields.
pub fn write_rows<I, R>(path: &Path, header: Option<&[&str]>, rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(file);
    if let Some(h) = header {
        w.write_record(h).map_err(|e| io_err(path, e))?;
    }
    for r in rows {
        w.write_record(r.into_iter().collect::<Vec<_>>())
            .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Writes a dataset with header `x1..xp` (or its own names) and, when
/// given, a trailing `truth` column with 1-based labels.
pub fn write_mv_csv(path: &Path, d: &Dataset, truth: Option<&Partition>) -> Result<()> {
    let mut header: Vec<String> = match d.feature_names() {
        Some(n) => n.to_vec(),
        None => (1..=d.n_features()).map(|j| format!("x{j}")).collect(),
    };
    if truth.is_some() {
        header.push("truth".into());
    }
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..d.n_obs()).map(|i| {
        let mut r: Vec<String> = d.row(i).iter().map(|&v| fmt(v)).collect();
        if let Some(t) = truth {
            r.push((t.labels()[i] + 1).to_string());
        }
        r
    });
    write_rows(path, Some(&h), rows)
}

/// Writes the grid as the first row followed by one row per curve.
pub fn write_fd_csv(path: &Path, d: &FunctionalDataset) -> Result<()> {
    let grid = std::iter::once(d.grid().iter().map(|&x| fmt(x)).collect::<Vec<_>>());
    let curves = (0..d.n_obs()).map(|i| d.curve(i).iter().map(|&v| fmt(v)).collect());
    write_rows(path, None, grid.chain(curves))
}

/// One 1-based label per line.
pub fn write_labels(path: &Path, p: &Partition) -> Result<()> {
    let mut f = File::create(path).map_err(|e| io_err(path, e))?;
    let mut s = String::with_capacity(p.len() * 3);
    for &l in p.labels() {
        s.push_str(&(l + 1).to_string());
        s.push('\n');
    }
    f.write_all(s.as_bytes()).map_err(|e| io_err(path, e))
}

/// `feature,weight` table.
pub fn write_weights(path: &Path, names: &[String], w: &[f64]) -> Result<()> {
    let rows = names.iter().zip(w).map(|(n, &v)| vec![n.clone(), fmt(v)]);
    write_rows(path, Some(&["feature", "weight"]), rows)
}

/// `x,w` table of a weight function.
pub fn write_weight_function(path: &Path, grid: &[f64], w: &[f64]) -> Result<()> {
    let rows = grid.iter().zip(w).map(|(&x, &v)| vec![fmt(x), fmt(v)]);
    write_rows(path, Some(&["x", "w"]), rows)
}

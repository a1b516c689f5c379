//! CSV ingestion. A header row is required and `.` is the only decimal
//! separator. Diagnostics name the file, the row (the header is row 1) and
//! the column.

use std::path::Path;

use crate::descriptive::Sample;
use crate::error::{Error, Result};

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn headers(rdr: &mut csv::Reader<std::fs::File>, path: &Path) -> Result<Vec<String>> {
    let h = rdr
        .headers()
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    Ok(h.iter().map(str::to_string).collect())
}

fn column_index(headers: &[String], name: &str, path: &Path) -> Result<usize> {
    headers.iter().position(|h| h == name).ok_or_else(|| {
        Error::InvalidInput(format!(
            "{}: missing column '{name}' (header is '{}')",
            path.display(),
            headers.join(",")
        ))
    })
}

fn parse_cell(cell: &str, path: &Path, row: u64, column: &str) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::InvalidInput(format!(
            "{}: row {row}, column {column}: '{cell}' is not a finite number",
            path.display()
        ))),
    }
}

fn records(rdr: &mut csv::Reader<std::fs::File>, path: &Path) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, rec));
    }
    Ok(out)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sample".into())
}

/// Values from the first column of a file, labelled by the file stem.
/// Returns the sample and the column header.
pub fn read_single_column(path: &Path) -> Result<(Sample, String)> {
    let mut rdr = reader(path)?;
    let headers = headers(&mut rdr, path)?;
    let column = headers
        .first()
        .cloned()
        .ok_or_else(|| Error::InvalidInput(format!("{}: empty header", path.display())))?;
    let mut values = Vec::new();
    for (line, rec) in records(&mut rdr, path)? {
        values.push(parse_cell(rec.get(0).unwrap_or(""), path, line, &column)?);
    }
    Ok((Sample::new(stem(path), values)?, column))
}

/// Long format with `group,value` columns; groups in order of first
/// appearance.
pub fn read_long(path: &Path) -> Result<Vec<Sample>> {
    let mut rdr = reader(path)?;
    let headers = headers(&mut rdr, path)?;
    let gi = column_index(&headers, "group", path)?;
    let vi = column_index(&headers, "value", path)?;
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for (line, rec) in records(&mut rdr, path)? {
        let group = rec.get(gi).unwrap_or("");
        if group.is_empty() {
            return Err(Error::InvalidInput(format!(
                "{}: row {line}, column group: empty group name",
                path.display()
            )));
        }
        let value = parse_cell(rec.get(vi).unwrap_or(""), path, line, "value")?;
        match groups.iter_mut().find(|(g, _)| g == group) {
            Some((_, v)) => v.push(value),
            None => groups.push((group.to_string(), vec![value])),
        }
    }
    groups.into_iter().map(|(g, v)| Sample::new(g, v)).collect()
}

/// Paired format with `pre,post` columns, paired by row. Trailing blank
/// cells shorten a column; a blank followed by a value is an error.
pub fn read_paired(path: &Path) -> Result<(Sample, Sample)> {
    let mut rdr = reader(path)?;
    let headers = headers(&mut rdr, path)?;
    let cols = [
        ("pre", column_index(&headers, "pre", path)?),
        ("post", column_index(&headers, "post", path)?),
    ];
    let mut data: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut ended: [Option<u64>; 2] = [None, None];
    for (line, rec) in records(&mut rdr, path)? {
        for (k, (name, idx)) in cols.iter().enumerate() {
            let cell = rec.get(*idx).unwrap_or("");
            if cell.is_empty() {
                ended[k].get_or_insert(line);
                continue;
            }
            if let Some(blank) = ended[k] {
                return Err(Error::InvalidInput(format!(
                    "{}: row {line}, column {name}: value after blank cell in row {blank}",
                    path.display()
                )));
            }
            data[k].push(parse_cell(cell, path, line, name)?);
        }
    }
    let [pre, post] = data;
    if pre.len() != post.len() {
        return Err(Error::LengthMismatch {
            left: "pre".into(),
            left_len: pre.len(),
            right: "post".into(),
            right_len: post.len(),
        });
    }
    Ok((Sample::new("pre", pre)?, Sample::new("post", post)?))
}

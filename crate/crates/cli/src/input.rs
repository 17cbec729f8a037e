//! Array and interval file readers.
//!
//! Text arrays are whitespace-separated decimal integers; text interval files
//! hold one `a b` pair per line. The binary forms are little-endian: a `u64`
//! count followed by `i64` values (arrays) or `u64` pairs (intervals).

use std::fs;
use std::path::Path;

use dualtree::mliq::{build_intervals, IntervalSet};
use dualtree::Error;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Binary,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn read_array(path: &Path, format: Format) -> Result<Vec<i64>, CliError> {
    let bytes = read(path)?;
    let values = match format {
        Format::Text => parse_array_text(&bytes)?,
        Format::Binary => parse_array_binary(&bytes)?,
    };
    if values.is_empty() {
        return Err(CliError::Input(format!("{}: no values", path.display())));
    }
    Ok(values)
}

pub fn parse_array_text(bytes: &[u8]) -> Result<Vec<i64>, CliError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| CliError::Input("array file is not UTF-8 text".into()))?;
    let mut values = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        for tok in line.split_whitespace() {
            let v = tok.parse::<i64>().map_err(|_| {
                CliError::Input(format!(
                    "line {}: {tok:?} is not a 64-bit integer",
                    line_no + 1
                ))
            })?;
            values.push(v);
        }
    }
    Ok(values)
}

fn words<const W: usize>(bytes: &[u8], what: &str) -> Result<(u64, Vec<[u8; W]>), CliError> {
    if bytes.len() < 8 {
        return Err(CliError::Input(format!(
            "binary {what} file lacks its length prefix"
        )));
    }
    let count = u64::from_le_bytes(bytes[..8].try_into().unwrap());
    let body = &bytes[8..];
    if !body.len().is_multiple_of(W) {
        return Err(CliError::Input(format!(
            "binary {what} file has a truncated record"
        )));
    }
    let items: Vec<[u8; W]> = body.chunks(W).map(|c| c.try_into().unwrap()).collect();
    if items.len() as u64 != count {
        return Err(CliError::Input(format!(
            "binary {what} file announces {count} records but holds {}",
            items.len()
        )));
    }
    Ok((count, items))
}

pub fn parse_array_binary(bytes: &[u8]) -> Result<Vec<i64>, CliError> {
    let (_, items) = words::<8>(bytes, "array")?;
    Ok(items.into_iter().map(i64::from_le_bytes).collect())
}

#[cfg(test)]
pub fn encode_array_binary(values: &[i64]) -> Vec<u8> {
    let mut out = (values.len() as u64).to_le_bytes().to_vec();
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Interval pairs and the line number of each.
pub type NumberedPairs = (Vec<(u64, u64)>, Vec<usize>);

pub fn parse_intervals_text(bytes: &[u8]) -> Result<NumberedPairs, CliError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| CliError::Input("interval file is not UTF-8 text".into()))?;
    let mut pairs = Vec::new();
    let mut lines = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 2 {
            return Err(CliError::Input(format!(
                "line {line_no}: expected \"a b\", found {} fields",
                toks.len()
            )));
        }
        let num = |t: &str| {
            t.parse::<u64>().map_err(|_| {
                CliError::Input(format!(
                    "line {line_no}: {t:?} is not a non-negative integer"
                ))
            })
        };
        pairs.push((num(toks[0])?, num(toks[1])?));
        lines.push(line_no);
    }
    Ok((pairs, lines))
}

pub fn parse_intervals_binary(bytes: &[u8]) -> Result<Vec<(u64, u64)>, CliError> {
    let (_, items) = words::<16>(bytes, "interval")?;
    Ok(items
        .into_iter()
        .map(|r| {
            (
                u64::from_le_bytes(r[..8].try_into().unwrap()),
                u64::from_le_bytes(r[8..].try_into().unwrap()),
            )
        })
        .collect())
}

pub fn read_intervals(path: &Path, format: Format) -> Result<IntervalSet, CliError> {
    let bytes = read(path)?;
    let (pairs, lines) = match format {
        Format::Text => parse_intervals_text(&bytes)?,
        Format::Binary => {
            let pairs = parse_intervals_binary(&bytes)?;
            // Records are numbered from 1 in place of lines.
            let lines = (1..=pairs.len()).collect();
            (pairs, lines)
        }
    };
    let unit = match format {
        Format::Text => "line",
        Format::Binary => "record",
    };
    if pairs.is_empty() {
        return Err(CliError::Input(format!("{}: no intervals", path.display())));
    }
    build_intervals(&pairs).map_err(|e| match e {
        Error::Validation { index, reason } => {
            CliError::Input(format!("{unit} {}: {reason}", lines[index - 1]))
        }
        other => CliError::Input(other.to_string()),
    })
}

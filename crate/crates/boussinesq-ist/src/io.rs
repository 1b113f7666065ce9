//! Deterministic file I/O: fixed-format floats (17 significant digits, `\n`
//! line endings), FNV-64 content hashing, and small CSV / key=value helpers
//! shared by the library and the command-line harness.

use crate::error::{Error, Result};
use std::io::{BufRead, Write};
use std::path::Path;

/// Canonical float formatting: 17 significant digits in scientific notation,
/// so identical runs produce byte-identical files.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{:.16e}", x)
    }
}

/// 64-bit FNV-1a hash of a byte stream.
pub fn fnv64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn fnv64_file(path: &Path) -> Result<u64> {
    Ok(fnv64(&std::fs::read(path)?))
}

/// Write a CSV file: `#`-prefixed comment lines, then a header, then rows of
/// floats in canonical format.
pub fn write_csv(
    path: &Path,
    comments: &[String],
    header: &str,
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Parsed CSV: comment lines (without the `# ` prefix), header fields, and
/// float columns.
pub struct CsvData {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

fn parse_float(tok: &str, path: &Path, line_no: usize) -> Result<f64> {
    match tok.trim() {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t.parse::<f64>().map_err(|_| Error::Input {
            path: path.display().to_string(),
            msg: format!("line {line_no}: cannot parse float {t:?}"),
        }),
    }
}

pub fn read_csv(path: &Path, expected_header: &[&str]) -> Result<CsvData> {
    let file = std::fs::File::open(path).map_err(|e| Error::Input {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    let reader = std::io::BufReader::new(file);
    let mut comments = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            comments.push(rest.trim().to_string());
            continue;
        }
        match &header {
            None => {
                let fields: Vec<String> =
                    trimmed.split(',').map(|s| s.trim().to_string()).collect();
                if !expected_header.is_empty() && fields != expected_header {
                    return Err(Error::Input {
                        path: path.display().to_string(),
                        msg: format!(
                            "expected header {expected_header:?}, found {fields:?}"
                        ),
                    });
                }
                columns = vec![Vec::new(); fields.len()];
                header = Some(fields);
            }
            Some(h) => {
                let toks: Vec<&str> = trimmed.split(',').collect();
                if toks.len() != h.len() {
                    return Err(Error::Input {
                        path: path.display().to_string(),
                        msg: format!(
                            "line {line_no}: expected {} fields, found {}",
                            h.len(),
                            toks.len()
                        ),
                    });
                }
                for (col, tok) in columns.iter_mut().zip(&toks) {
                    col.push(parse_float(tok, path, line_no)?);
                }
            }
        }
    }
    match header {
        Some(header) => Ok(CsvData {
            comments,
            header,
            columns,
        }),
        None => Err(Error::Input {
            path: path.display().to_string(),
            msg: "no header line found".into(),
        }),
    }
}

/// Flat `key = value` config file; `#` comments and blank lines ignored.
pub fn read_key_value(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t.split_once('=').ok_or_else(|| Error::Input {
            path: path.display().to_string(),
            msg: format!("line {}: expected key=value, found {t:?}", idx + 1),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_17_significant_digits() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(-0.125), "-1.2500000000000000e-1");
        let pi = std::f64::consts::PI;
        let s = fmt_float(pi);
        assert_eq!(s.parse::<f64>().unwrap(), pi);
    }

    #[test]
    fn fnv64_known_vectors() {
        // Standard FNV-1a test vectors.
        assert_eq!(fnv64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let rows = vec![vec![1.0, 2.5], vec![-3.0, f64::NAN]];
        write_csv(
            &path,
            &["meta 1".into()],
            "a,b",
            rows.clone().into_iter(),
        )
        .unwrap();
        let data = read_csv(&path, &["a", "b"]).unwrap();
        assert_eq!(data.comments, vec!["meta 1"]);
        assert_eq!(data.columns[0], vec![1.0, -3.0]);
        assert_eq!(data.columns[1][0], 2.5);
        assert!(data.columns[1][1].is_nan());
    }

    #[test]
    fn key_value_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.cfg");
        std::fs::write(&path, "# comment\nL = 600\ndt=0.05\n\n").unwrap();
        let kv = read_key_value(&path).unwrap();
        assert_eq!(kv, vec![("L".into(), "600".into()), ("dt".into(), "0.05".into())]);
    }
}

//! CSV files and the result manifest.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// A value as written to CSV: 17 significant digits for floats.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Collects rows in memory and writes the file in one go.
pub struct CsvTable {
    header: &'static str,
    body: String,
}

impl CsvTable {
    pub fn new(header: &'static str) -> Self {
        Self {
            header,
            body: String::new(),
        }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.body.push(',');
            }
            first = false;
            self.body.push_str(f.as_ref());
        }
        self.body.push('\n');
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut text = String::with_capacity(self.header.len() + 1 + self.body.len());
        writeln!(text, "{}", self.header).expect("writing to a string");
        text.push_str(&self.body);
        fs::write(path, text)
    }
}

/// A parsed CSV file: header names and numeric columns.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvData {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvData {
    pub fn read(path: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| invalid(format!("{}: empty file", path.display())))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (i, l) in lines.enumerate() {
            let row: Vec<String> = l.split(',').map(|s| s.trim().to_string()).collect();
            if row.len() != header.len() {
                return Err(invalid(format!(
                    "{}: row {} has {} fields, header has {}",
                    path.display(),
                    i + 2,
                    row.len(),
                    header.len()
                )));
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> io::Result<Vec<f64>> {
        let j = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| invalid(format!("missing column {name:?}")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r[j].parse::<f64>().map_err(|_| {
                    invalid(format!(
                        "column {name:?}, row {}: not a number: {:?}",
                        i + 2,
                        r[j]
                    ))
                })
            })
            .collect()
    }
}

fn invalid(msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            write!(s, "{b:02x}").expect("writing to a string");
            s
        })
}

/// Writes `manifest.txt` in `dir` through a temporary file and a rename.
/// `files` are paths relative to `dir`.
pub fn write_manifest(
    dir: &Path,
    header: &[(String, String)],
    files: &[PathBuf],
) -> io::Result<PathBuf> {
    let mut text = String::new();
    for (k, v) in header {
        writeln!(text, "{k} = {v}").expect("writing to a string");
    }
    for f in files {
        let bytes = fs::read(dir.join(f))?;
        writeln!(text, "sha256.{} = {}", f.display(), sha256_hex(&bytes))
            .expect("writing to a string");
    }
    let tmp = dir.join(".manifest.txt.tmp");
    let path = dir.join("manifest.txt");
    {
        let mut fh = fs::File::create(&tmp)?;
        fh.write_all(text.as_bytes())?;
        fh.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}

//! Distribution tables and run manifests.
//!
//! A distribution table is a CSV file with header `u,f` and one row per grid
//! point. `u` is written with 9 decimals, `f` with 12 significant digits in
//! exponent form (`0` for an exact zero). Re-emitting a parsed table
//! reproduces its bytes.
//!
//! A manifest is a `key=value` text file: `command`, `tool_version`,
//! `timestamp`, one `param.<name>` line per parameter in the order given, and
//! one `output.<i>` line per written file.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub u: Vec<f64>,
    pub f: Vec<f64>,
}

pub fn format_u(u: f64) -> String {
    format!("{u:.9}")
}

pub fn format_f(f: f64) -> String {
    if f == 0.0 {
        "0".to_string()
    } else {
        format!("{f:.11e}")
    }
}

impl Table {
    pub fn new(u: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if u.len() != f.len() {
            return Err(Error::LengthMismatch {
                left: u.len(),
                right: f.len(),
            });
        }
        Ok(Self { u, f })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn peak(&self) -> f64 {
        self.f.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Table(e.to_string());
        w.write_record(["u", "f"]).map_err(io)?;
        for (u, f) in self.u.iter().zip(&self.f) {
            w.write_record([format_u(*u), format_f(*f)]).map_err(io)?;
        }
        w.into_inner().map_err(|e| Error::Table(e.to_string()))
    }

    pub fn from_csv_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = csv::Reader::from_reader(bytes);
        let headers = r.headers().map_err(|e| Error::Table(e.to_string()))?;
        if headers.len() != 2 || &headers[0] != "u" || &headers[1] != "f" {
            return Err(Error::Table(format!("expected header `u,f`, got {headers:?}")));
        }
        let mut u = Vec::new();
        let mut f = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| Error::Table(e.to_string()))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Table(format!("row {}: `{s}`: {e}", line + 1)))
            };
            u.push(parse(&rec[0])?);
            f.push(parse(&rec[1])?);
        }
        Ok(Self { u, f })
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let bytes = self
            .to_csv_bytes()
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
        fs::write(path, bytes)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
        Self::from_csv_bytes(&bytes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Vec<(String, String)>,
    pub output_paths: Vec<String>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            parameters: Vec::new(),
            output_paths: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.push((key.to_string(), value.to_string()));
        self
    }

    pub fn output(&mut self, path: &Path) {
        self.output_paths.push(path.display().to_string());
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command={}", self.command);
        let _ = writeln!(s, "tool_version={}", self.tool_version);
        let _ = writeln!(s, "timestamp={}", self.timestamp);
        for (k, v) in &self.parameters {
            let _ = writeln!(s, "param.{k}={v}");
        }
        for (i, p) in self.output_paths.iter().enumerate() {
            let _ = writeln!(s, "output.{i}={p}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Self {
            command: String::new(),
            parameters: Vec::new(),
            output_paths: Vec::new(),
            tool_version: String::new(),
            timestamp: String::new(),
        };
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Table(format!("manifest line without `=`: {line}")))?;
            match k {
                "command" => m.command = v.to_string(),
                "tool_version" => m.tool_version = v.to_string(),
                "timestamp" => m.timestamp = v.to_string(),
                _ if k.starts_with("param.") => {
                    m.parameters.push((k["param.".len()..].to_string(), v.to_string()))
                }
                _ if k.starts_with("output.") => m.output_paths.push(v.to_string()),
                _ => return Err(Error::Table(format!("unknown manifest key `{k}`"))),
            }
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_text())
    }
}

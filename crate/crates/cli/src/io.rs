//! Text records in, CSV out. Both carry a `format: 1` first line.
//!
//! Input records:
//!
//! ```text
//! format: 1
//! # comment
//! moments: 1 2 5 14 42
//! ```
//!
//! or one `atom <position> <weight>` line per atom. A CSV file written by
//! this tool (`k,m_k` with optional `stderr` column) is read back as a
//! moment sequence.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use freemoments::{AtomicMeasure, MomentSequence};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: line {line}: {msg}", path.display())]
    Malformed {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Library(#[from] freemoments::Error),

    #[error("validation failed: {failed} of {total} checks outside tolerance")]
    Validation { failed: usize, total: usize },
}

impl CliError {
    /// 1 for mathematical failures, 2 for unusable input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(_) | CliError::Validation { .. } | CliError::Write { .. } => 1,
            CliError::Malformed { .. } | CliError::Read { .. } | CliError::Usage(_) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Moments(MomentSequence),
    Atoms(AtomicMeasure),
}

impl Record {
    /// Moments up to `order`; a measure is expanded, a sequence truncated.
    pub fn moments(&self, order: Option<usize>, default_order: usize) -> Result<MomentSequence, CliError> {
        Ok(match (self, order) {
            (Record::Moments(m), None) => m.clone(),
            (Record::Moments(m), Some(k)) => {
                if k > m.order() {
                    return Err(freemoments::Error::OrderMismatch {
                        left: m.order(),
                        right: k,
                    }
                    .into());
                }
                m.truncate(k)?
            }
            (Record::Atoms(a), k) => a.moments(k.unwrap_or(default_order))?,
        })
    }

    pub fn atoms(&self, path: &Path) -> Result<&AtomicMeasure, CliError> {
        match self {
            Record::Atoms(a) => Ok(a),
            Record::Moments(_) => Err(CliError::Usage(format!(
                "{}: this subcommand needs an atomic measure (`atom` lines)",
                path.display()
            ))),
        }
    }
}

pub fn read_record(path: &Path) -> Result<Record, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_record(&text).map_err(|(line, msg)| CliError::Malformed {
        path: path.to_owned(),
        line,
        msg,
    })
}

fn number(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(format!("non-finite number {v}")),
        Err(_) => Err(format!("cannot parse number {s:?}")),
    }
}

/// Parses the text of an input file; errors carry a 1-based line number.
pub fn parse_record(text: &str) -> Result<Record, (usize, String)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, l)) if l.strip_prefix("format:").map(str::trim) == Some("1") => {}
        Some((i, l)) if l.starts_with("format:") => {
            return Err((i, format!("unsupported format version {:?}", l[7..].trim())))
        }
        Some((i, _)) => return Err((i, "expected `format: 1` header".into())),
        None => return Err((1, "empty file".into())),
    }

    let mut moments: Option<Vec<f64>> = None;
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    let mut csv = false;
    let mut last = 1;
    for (i, line) in lines {
        last = i;
        let err = |msg: String| (i, msg);
        if let Some(rest) = line.strip_prefix("moments:") {
            if moments.is_some() {
                return Err(err("more than one moment sequence".into()));
            }
            let v = rest.split_whitespace().map(number).collect::<Result<Vec<_>, _>>().map_err(err)?;
            moments = Some(v);
        } else if let Some(rest) = line.strip_prefix("atom ") {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if f.len() != 2 {
                return Err(err("expected `atom <position> <weight>`".into()));
            }
            atoms.push((number(f[0]).map_err(err)?, number(f[1]).map_err(err)?));
        } else if line == "k,m_k" || line == "k,m_k,stderr" {
            if csv || moments.is_some() {
                return Err(err("unexpected CSV header".into()));
            }
            csv = true;
            moments = Some(Vec::new());
        } else if csv {
            let f: Vec<&str> = line.split(',').collect();
            let v = moments.as_mut().unwrap();
            if f.len() < 2 || f[0].trim().parse::<usize>() != Ok(v.len() + 1) {
                return Err(err(format!("expected row `{},<m_k>`", v.len() + 1)));
            }
            v.push(number(f[1]).map_err(err)?);
        } else {
            return Err(err(format!("unrecognized line {line:?}")));
        }
    }

    match (moments, atoms.is_empty()) {
        (Some(_), false) => Err((last, "file mixes moments and atoms".into())),
        (Some(v), true) => MomentSequence::new(v).map(Record::Moments).map_err(|e| (last, e.to_string())),
        (None, false) => AtomicMeasure::new(atoms).map(Record::Atoms).map_err(|e| (last, e.to_string())),
        (None, true) => Err((last, "no moments or atoms".into())),
    }
}

/// 17 significant digits: enough to read back the same `f64`.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV table preceded by the format line.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut text = format!("format: {FORMAT_VERSION}\n");
        text.push_str(&header.join(","));
        text.push('\n');
        Table { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn moments(m: &MomentSequence) -> Self {
        let mut t = Table::new(&["k", "m_k"]);
        for (k, v) in m.as_slice().iter().enumerate() {
            t.row(&[(k + 1).to_string(), fmt_num(*v)]);
        }
        t
    }

    pub fn write(&self, output: Option<&Path>) -> Result<(), CliError> {
        match output {
            Some(path) => fs::write(path, &self.text).map_err(|source| CliError::Write {
                path: path.to_owned(),
                source,
            }),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(self.text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Write {
                        path: PathBuf::from("<stdout>"),
                        source,
                    })
            }
        }
    }
}

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentSpec, ResultRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 14] = [
    "scenario",
    "algorithm",
    "m_init",
    "m_proc",
    "k_sub",
    "beta",
    "snr_db",
    "bits",
    "metric",
    "value",
    "stderr",
    "n_trials",
    "seed",
    "flops",
];

fn float(v: f64) -> String {
    format!("{v:.11e}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_err(path: &str, e: csv::Error) -> Error {
    Error::Parse {
        path: path.to_string(),
        message: e.to_string(),
    }
}

/// Writes the header and one record per row. Floats carry 12 significant
/// digits.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)
        .map_err(|e| csv_err("<csv>", e))?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.algorithm.clone(),
            r.m_init.to_string(),
            r.m_proc.to_string(),
            opt(r.k_sub),
            opt(r.beta),
            r.snr_db.map(float).unwrap_or_default(),
            opt(r.bits),
            r.metric.clone(),
            float(r.value),
            float(r.stderr),
            r.n_trials.to_string(),
            r.seed.to_string(),
            r.flops.to_string(),
        ])
        .map_err(|e| csv_err("<csv>", e))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv>".into(),
        source,
    })
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let file = std::fs::File::create(path).map_err(io)?;
    write_csv(rows, std::io::BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => io(source),
        other => other,
    })
}

fn parse<T: std::str::FromStr>(path: &str, field: &str, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        path: path.to_string(),
        message: format!("bad {field} value {s:?}"),
    })
}

fn parse_opt<T: std::str::FromStr>(path: &str, field: &str, s: &str) -> Result<Option<T>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse(path, field, s).map(Some)
    }
}

pub fn read_csv_from<R: Read>(input: R, path: &str) -> Result<Vec<ResultRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            path: path.to_string(),
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        rows.push(ResultRow {
            scenario: f(0).to_string(),
            algorithm: f(1).to_string(),
            m_init: parse(path, "m_init", f(2))?,
            m_proc: parse(path, "m_proc", f(3))?,
            k_sub: parse_opt(path, "k_sub", f(4))?,
            beta: parse_opt(path, "beta", f(5))?,
            snr_db: parse_opt(path, "snr_db", f(6))?,
            bits: parse_opt(path, "bits", f(7))?,
            metric: f(8).to_string(),
            value: parse(path, "value", f(9))?,
            stderr: parse(path, "stderr", f(10))?,
            n_trials: parse(path, "n_trials", f(11))?,
            seed: parse(path, "seed", f(12))?,
            flops: parse(path, "flops", f(13))?,
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv_from(file, &path.display().to_string())
}

/// Sidecar metadata written next to a CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub scenario: String,
    pub config_sha256: String,
    pub seed: u64,
    pub n_realizations: usize,
    pub rows: usize,
    pub tool: String,
    pub version: String,
}

impl RunMeta {
    pub fn new(spec: &ExperimentSpec, rows: usize) -> Self {
        Self {
            scenario: spec.scenario.clone(),
            config_sha256: spec.config_hash(),
            seed: spec.system.rng_seed,
            n_realizations: spec.n_realizations,
            rows,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Writes `<csv path>.meta.json` and returns its path.
pub fn write_meta(
    spec: &ExperimentSpec,
    rows: usize,
    csv_path: &Path,
) -> Result<std::path::PathBuf> {
    let mut name = csv_path.as_os_str().to_owned();
    name.push(".meta.json");
    let path = std::path::PathBuf::from(name);
    let json =
        serde_json::to_string_pretty(&RunMeta::new(spec, rows)).expect("metadata serializes");
    std::fs::write(&path, json + "\n").map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

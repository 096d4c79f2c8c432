//! Run reports and their JSON / CSV emission.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::diagnose::AppliedImplication;
use crate::error::{Error, Result};
use crate::potential::ConvergenceTrace;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub depths: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub name: String,
    pub inputs: Value,
    pub results: BTreeMap<String, Value>,
    pub traces: Vec<Series>,
    pub verdicts: BTreeMap<String, String>,
    pub implications_applied: Vec<AppliedImplication>,
    pub notes: Vec<String>,
    pub timings_ms: BTreeMap<String, f64>,
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

impl RunReport {
    pub fn new(name: impl Into<String>, inputs: impl Serialize) -> Self {
        RunReport {
            schema: SCHEMA_VERSION,
            name: name.into(),
            inputs: to_value(inputs),
            results: BTreeMap::new(),
            traces: Vec::new(),
            verdicts: BTreeMap::new(),
            implications_applied: Vec::new(),
            notes: Vec::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn result(&mut self, key: impl Into<String>, value: impl Serialize) -> &mut Self {
        self.results.insert(key.into(), to_value(value));
        self
    }

    pub fn verdict(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.verdicts.insert(key.into(), value.into());
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn series(&mut self, name: impl Into<String>, depths: Vec<usize>, values: Vec<f64>) -> &mut Self {
        self.traces.push(Series {
            name: name.into(),
            depths,
            values,
        });
        self
    }

    pub fn trace(&mut self, name: impl Into<String>, t: &ConvergenceTrace) -> &mut Self {
        self.series(name, t.depths.clone(), t.values.clone())
    }

    /// Runs `f`, recording its wall-clock time under `key`.
    pub fn timed<T>(&mut self, key: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings_ms.insert(key.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    /// Long-format `trace,depth,value` rows.
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?} (expected json or csv)"))),
        }
    }
}

pub fn write_json(value: &impl Serialize, out: &mut impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_csv(series: &[Series], out: &mut impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["trace", "depth", "value"]).map_err(io)?;
    for s in series {
        for (d, v) in s.depths.iter().zip(&s.values) {
            w.write_record([s.name.clone(), d.to_string(), format!("{v:e}")]).map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// Writes the report to `out`, or to stdout when `out` is `None`.
pub fn emit(report: &RunReport, format: Format, out: Option<&Path>) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        Format::Json => write_json(report, &mut buf)?,
        Format::Csv => write_csv(&report.traces, &mut buf)?,
    }
    match out {
        Some(path) => std::fs::write(path, buf).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(&buf).map_err(|e| Error::Io(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows() {
        let mut r = RunReport::new("t", ());
        r.series("cap", vec![1, 2], vec![1.5, 1.25]).series("one", vec![3], vec![0.5]);
        let mut buf = Vec::new();
        write_csv(&r.traces, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("trace,depth,value\ncap,1,1.5e0\n"));
    }

    #[test]
    fn schema_field() {
        let v = serde_json::to_value(RunReport::new("t", ())).unwrap();
        assert_eq!(v["schema"], 1);
    }
}

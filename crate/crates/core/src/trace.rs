//! Time-sampled observables of a run and their CSV form.
//!
//! Columns: `t_ms,i_syn_nA,i_target_nA,i_ca_nA,learn,membrane_V,post_spike`,
//! optionally followed by `v_w_0..v_w_{N-1}`. Floats carry 9 significant
//! digits; booleans are written as 0/1.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const BASE_COLUMNS: [&str; 7] = [
    "t_ms",
    "i_syn_nA",
    "i_target_nA",
    "i_ca_nA",
    "learn",
    "membrane_V",
    "post_spike",
];

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    pub i_syn: f64,
    pub i_target: f64,
    pub i_ca: f64,
    pub learn: bool,
    pub membrane: f64,
    /// The neuron fired since the previous row.
    pub post_spike: bool,
    /// Empty unless weight recording is enabled.
    pub v_w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    records: Vec<TraceRecord>,
    n_synapses: usize,
    has_v_w: bool,
}

impl Trace {
    pub fn new(n_synapses: usize, has_v_w: bool) -> Self {
        Self {
            records: Vec::new(),
            n_synapses,
            has_v_w,
        }
    }

    pub fn push(&mut self, record: TraceRecord) {
        debug_assert!(self.records.last().is_none_or(|r| r.t < record.t));
        self.records.push(record);
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn has_v_w(&self) -> bool {
        self.has_v_w
    }

    pub fn n_synapses(&self) -> usize {
        self.n_synapses
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Rows with `from <= t < to`.
    pub fn between(&self, from: f64, to: f64) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(move |r| r.t >= from && r.t < to)
    }

    pub fn header(&self) -> String {
        let mut cols: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
        if self.has_v_w {
            cols.extend((0..self.n_synapses).map(|i| format!("v_w_{i}")));
        }
        cols.join(",")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.header())?;
        let mut line = String::new();
        for r in &self.records {
            line.clear();
            for (i, v) in [r.t, r.i_syn, r.i_target, r.i_ca].iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&format_g9(*v));
            }
            line.push_str(if r.learn { ",1," } else { ",0," });
            line.push_str(&format_g9(r.membrane));
            line.push_str(if r.post_spike { ",1" } else { ",0" });
            for v in &r.v_w {
                line.push(',');
                line.push_str(&format_g9(*v));
            }
            writeln!(out, "{line}")?;
        }
        out.flush()
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    pub fn read_csv_file(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(BufReader::new(file)).map_err(|e| match e {
            ReadError::Io(e) => Error::io(path, e),
            ReadError::Format(message) => Error::Trace {
                path: path.to_path_buf(),
                message,
            },
        })
    }

    fn read_csv<R: BufRead>(input: R) -> std::result::Result<Self, ReadError> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| ReadError::Format("empty file".into()))??;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.len() < BASE_COLUMNS.len() || cols[..BASE_COLUMNS.len()] != BASE_COLUMNS {
            return Err(ReadError::Format(format!("unexpected header `{header}`")));
        }
        let n_synapses = cols.len() - BASE_COLUMNS.len();
        for (i, c) in cols[BASE_COLUMNS.len()..].iter().enumerate() {
            if *c != format!("v_w_{i}") {
                return Err(ReadError::Format(format!("unexpected column `{c}`")));
            }
        }
        let mut trace = Trace::new(n_synapses, n_synapses > 0);
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = lineno + 2;
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != cols.len() {
                return Err(ReadError::Format(format!(
                    "line {row}: expected {} fields, got {}",
                    cols.len(),
                    fields.len()
                )));
            }
            let num = |i: usize| {
                fields[i].parse::<f64>().map_err(|_| {
                    ReadError::Format(format!("line {row}: bad number `{}`", fields[i]))
                })
            };
            let flag = |i: usize| match fields[i] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(ReadError::Format(format!("line {row}: bad flag `{other}`"))),
            };
            trace.records.push(TraceRecord {
                t: num(0)?,
                i_syn: num(1)?,
                i_target: num(2)?,
                i_ca: num(3)?,
                learn: flag(4)?,
                membrane: num(5)?,
                post_spike: flag(6)?,
                v_w: (BASE_COLUMNS.len()..cols.len())
                    .map(num)
                    .collect::<std::result::Result<_, _>>()?,
            });
        }
        Ok(trace)
    }
}

enum ReadError {
    Io(io::Error),
    Format(String),
}

impl From<io::Error> for ReadError {
    fn from(e: io::Error) -> Self {
        ReadError::Io(e)
    }
}

/// Formats like C's `%.9g`: 9 significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-5 <= |v| < 1e9`.
pub fn format_g9(v: f64) -> String {
    const PRECISION: i32 = 9;
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

//! Per-step error traces and their CSV form.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

pub const TRACE_HEADER: &str = "t,true,released,abs_error,bound_exact,bound_analytic";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub true_value: f64,
    pub released: f64,
    pub abs_error: f64,
    pub bound_exact: f64,
    pub bound_analytic: f64,
}

impl TraceRow {
    pub fn new(
        t: usize,
        true_value: f64,
        released: f64,
        bound_exact: f64,
        bound_analytic: f64,
    ) -> Self {
        TraceRow {
            t,
            true_value,
            released,
            abs_error: (released - true_value).abs(),
            bound_exact,
            bound_analytic,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorTrace {
    pub rows: Vec<TraceRow>,
}

impl ErrorTrace {
    pub fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_error).fold(0.0, f64::max)
    }

    /// Whether the error is within `bound_exact` at every step.
    pub fn within_exact(&self) -> bool {
        self.rows.iter().all(|r| r.abs_error <= r.bound_exact)
    }
}

/// 17 significant digits: parses back to the same double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `#`-prefixed `comments`, a header and `rows` of preformatted fields.
pub fn write_table<W: Write>(
    mut out: W,
    comments: &[String],
    header: &str,
    rows: &[Vec<String>],
) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{header}")?;
    for r in rows {
        writeln!(out, "{}", r.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trace<W: Write>(out: W, trace: &ErrorTrace, comments: &[String]) -> Result<()> {
    let rows: Vec<Vec<String>> = trace
        .rows
        .iter()
        .map(|r| {
            let mut v = vec![r.t.to_string()];
            v.extend(
                [
                    r.true_value,
                    r.released,
                    r.abs_error,
                    r.bound_exact,
                    r.bound_analytic,
                ]
                .map(fmt_f64),
            );
            v
        })
        .collect();
    write_table(out, comments, TRACE_HEADER, &rows)
}

pub fn emit_csv(trace: &ErrorTrace, comments: &[String], path: &Path) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_trace(std::io::BufWriter::new(file), trace, comments)
}

/// Parses a trace CSV; returns the comment lines (without `# `) and the rows.
pub fn parse_trace<R: Read>(input: R) -> Result<(Vec<String>, ErrorTrace)> {
    let mut comments = Vec::new();
    let mut trace = ErrorTrace::default();
    let mut header_seen = false;
    for (no, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
            continue;
        }
        if !header_seen {
            if line != TRACE_HEADER {
                bail!(
                    "line {}: expected header {TRACE_HEADER:?}, got {line:?}",
                    no + 1
                );
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            bail!("line {}: expected 6 fields, got {}", no + 1, fields.len());
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .with_context(|| format!("line {}: bad number {:?}", no + 1, fields[i]))
        };
        trace.push(TraceRow {
            t: fields[0]
                .parse()
                .with_context(|| format!("line {}: bad step", no + 1))?,
            true_value: num(1)?,
            released: num(2)?,
            abs_error: num(3)?,
            bound_exact: num(4)?,
            bound_analytic: num(5)?,
        });
    }
    if !header_seen {
        bail!("missing header");
    }
    Ok((comments, trace))
}

//! Iterate traces as CSV.
//!
//! Header `k,J,d_norm,t,I_A,I_W,x1,...,xn`. Index sets are ascending and
//! semicolon-joined (empty field for the empty set); `t` is empty for the
//! starting iterate. Floats use the shortest representation that parses back
//! to the same bits, so a written trace reads back exactly.

use std::fmt::Write as _;
use std::io::{self, Write};

use thiserror::Error;

use crate::problem::{IndexSet, Vector};
use crate::solver::IterateRecord;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("trace line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Header line for an `n`-dimensional trace, without the newline.
pub fn trace_header(dim: usize) -> String {
    let mut h = String::from("k,J,d_norm,t,I_A,I_W");
    for i in 1..=dim {
        write!(h, ",x{i}").unwrap();
    }
    h
}

fn join_set(set: &[usize]) -> String {
    set.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

fn record_line(r: &IterateRecord) -> String {
    let mut line = format!("{},{:?},{:?},", r.k, r.j, r.d_norm);
    if let Some(t) = r.t {
        write!(line, "{t:?}").unwrap();
    }
    write!(line, ",{},{}", join_set(&r.active), join_set(&r.working)).unwrap();
    for x in r.u.iter() {
        write!(line, ",{x:?}").unwrap();
    }
    line
}

/// Writes the header and one line per record.
pub fn write_trace<W: Write>(mut out: W, dim: usize, records: &[IterateRecord]) -> io::Result<()> {
    writeln!(out, "{}", trace_header(dim))?;
    for r in records {
        debug_assert_eq!(r.u.len(), dim);
        writeln!(out, "{}", record_line(r))?;
    }
    out.flush()
}

pub fn trace_to_string(dim: usize, records: &[IterateRecord]) -> String {
    let mut buf = Vec::new();
    write_trace(&mut buf, dim, records).expect("writing to memory");
    String::from_utf8(buf).expect("trace is ASCII")
}

/// Reads a trace back. The correction coefficients are not part of the file,
/// so `corrections` comes back empty.
pub fn parse_trace(text: &str) -> Result<Vec<IterateRecord>, TraceError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(TraceError::Format { line: 1, message: "empty trace".into() })?;
    let cols: Vec<&str> = header.split(',').collect();
    let dim = cols.len().checked_sub(6).ok_or(TraceError::Format { line: 1, message: "short header".into() })?;
    if header != trace_header(dim) {
        return Err(TraceError::Format { line: 1, message: format!("unexpected header '{header}'") });
    }

    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| TraceError::Format { line: line_no, message };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 6 {
            return Err(bad(format!("expected {} fields, found {}", dim + 6, fields.len())));
        }
        let float = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("malformed number '{s}'")));
        let set = |s: &str| -> Result<IndexSet, TraceError> {
            if s.is_empty() {
                return Ok(vec![]);
            }
            s.split(';').map(|x| x.parse::<usize>().map_err(|_| bad(format!("malformed index '{x}'")))).collect()
        };
        records.push(IterateRecord {
            k: fields[0].parse().map_err(|_| bad(format!("malformed iteration '{}'", fields[0])))?,
            j: float(fields[1])?,
            d_norm: float(fields[2])?,
            t: if fields[3].is_empty() { None } else { Some(float(fields[3])?) },
            active: set(fields[4])?,
            working: set(fields[5])?,
            u: Vector::from_vec(fields[6..].iter().map(|s| float(s)).collect::<Result<_, _>>()?),
            corrections: vec![],
        });
    }
    Ok(records)
}

//! Chain traces as JSON lines.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neighborhood::Operator;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub operator: Operator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<usize>,
    #[serde(with = "crate::serde_exact")]
    pub achieved_cond: f64,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_iterations: Option<usize>,
    /// Search chains only: whether the proposal was kept.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted: Option<bool>,
}

pub fn write_trace_line<W: Write>(out: &mut W, record: &TraceRecord) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")
}

pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<TraceRecord>> {
    let mut records = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::parse("trace", e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::parse(format!("trace line {}", k + 1), e.to_string()))?;
        records.push(rec);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_lines() {
        let recs = vec![
            TraceRecord {
                step: 1,
                operator: Operator::Exchange,
                pos: Some(4),
                achieved_cond: 123.5,
                rank: 7,
                solver_iterations: Some(40),
                accepted: None,
            },
            TraceRecord {
                step: 2,
                operator: Operator::ReplaceU,
                pos: None,
                achieved_cond: 123.5,
                rank: 7,
                solver_iterations: None,
                accepted: Some(false),
            },
        ];
        let mut buf = Vec::new();
        for r in &recs {
            write_trace_line(&mut buf, r).unwrap();
        }
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(r#"{"step":1,"operator":"exchange","pos":4,"achieved_cond":"123.5""#));
        assert_eq!(read_trace(&buf[..]).unwrap(), recs);
    }
}

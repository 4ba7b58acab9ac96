//! Free-format MPS export.
//!
//! MPS has no objective sense, so the maximization objective is written
//! negated (as a minimization) and a comment record says so. Every column
//! gets an objective entry, zero coefficients of `A` are skipped, and all
//! numbers carry 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::LpInstance;

fn num(v: f64) -> String {
    // adding 0.0 folds -0.0 into 0.0
    format!("{:.16e}", v + 0.0)
}

/// Render `inst` as free MPS text.
pub fn to_mps_string(inst: &LpInstance, name: &str) -> String {
    let (m, n) = (inst.m(), inst.n());
    let mut out = String::new();
    out.push_str("* max c^T x s.t. Ax <= b, x >= 0; objective negated to minimize -c^T x\n");
    let _ = writeln!(out, "NAME {name}");
    out.push_str("ROWS\n N COST\n");
    for i in 1..=m {
        let _ = writeln!(out, " L R{i}");
    }
    out.push_str("COLUMNS\n");
    for j in 0..n {
        let _ = writeln!(out, " X{} COST {}", j + 1, num(-inst.c[j]));
        for i in 0..m {
            let a = inst.a.get(i, j);
            if a != 0.0 {
                let _ = writeln!(out, " X{} R{} {}", j + 1, i + 1, num(a));
            }
        }
    }
    out.push_str("RHS\n");
    for (i, b) in inst.b.iter().enumerate() {
        let _ = writeln!(out, " RHS R{} {}", i + 1, num(*b));
    }
    out.push_str("ENDATA\n");
    out
}

pub fn export_mps(inst: &LpInstance, path: &Path) -> Result<()> {
    inst.validate()?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty() && !s.contains(char::is_whitespace))
        .unwrap_or("lpforge");
    fs::write(path, to_mps_string(inst, name)).map_err(|e| Error::io(path, e))
}

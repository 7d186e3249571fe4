//! Parsing of `--grid` specifications.

use anyhow::{bail, Context, Result};
use qecwb_core::grid::{linspace, logspace};

/// Parses `start:stop:count`, `log:start:stop:count` or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let num = |s: &str| -> Result<f64> { s.trim().parse().with_context(|| format!("bad number {s:?} in grid")) };
    let count = |s: &str| -> Result<usize> { s.trim().parse().with_context(|| format!("bad count {s:?} in grid")) };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["log", start, stop, n] => Ok(logspace(num(start)?, num(stop)?, count(n)?)?),
        [start, stop, n] => Ok(linspace(num(start)?, num(stop)?, count(n)?)),
        [list] => list.split(',').map(num).collect(),
        _ => bail!("grid must be start:stop:count, log:start:stop:count or a comma list, got {spec:?}"),
    }
}

//! Argument grammar shared by the CLI subcommands.

use crate::bias::{primorial, FactoredModulus};
use crate::error::{Error, Result};
use crate::running::DirectionMap;

/// Parse an x bound: plain integer or scientific notation (`1e8`).
pub fn parse_x(s: &str) -> Result<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s
        .parse()
        .map_err(|_| Error::Argument(format!("cannot parse '{s}' as a bound")))?;
    if !f.is_finite() || f < 0.0 || f > 9.2e18 || f.fract() != 0.0 {
        return Err(Error::Argument(format!("'{s}' is not a nonnegative integer")));
    }
    Ok(f as u64)
}

/// Q-spec grammar: a decimal integer, `<T>#` for the primorial at T, or
/// `<m>*<T>#` for `lcm(m, T#)`.
pub fn parse_q_spec(s: &str) -> Result<FactoredModulus> {
    let s = s.trim();
    if let Some((left, right)) = s.split_once('*') {
        let m = parse_x(left.trim())?;
        let t = parse_primorial_part(right.trim())?;
        return primorial(t)?.lcm_with(m);
    }
    if s.ends_with('#') {
        return primorial(parse_primorial_part(s)?);
    }
    FactoredModulus::from_u64(parse_x(s)?)
}

fn parse_primorial_part(s: &str) -> Result<u64> {
    let t = s
        .strip_suffix('#')
        .ok_or_else(|| Error::Argument(format!("expected '<T>#' in Q-spec, got '{s}'")))?;
    parse_x(t)
}

/// Direction map grammar: `RES:DIR` pairs separated by commas, with DIR in
/// {up, down, left, right}. Example: `1:down,2:left,3:up,4:right`.
pub fn parse_direction_map(d: u64, s: &str) -> Result<DirectionMap> {
    let mut assignments = Vec::new();
    for part in s.split(',') {
        let (res, dir) = part
            .split_once(':')
            .ok_or_else(|| Error::Argument(format!("bad direction entry '{part}'")))?;
        let a: u64 = res
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("bad residue '{res}'")))?;
        let v = match dir.trim() {
            "up" => (0, 1),
            "down" => (0, -1),
            "left" => (-1, 0),
            "right" => (1, 0),
            other => return Err(Error::Argument(format!("unknown direction '{other}'"))),
        };
        assignments.push((a, v));
    }
    DirectionMap::new(d, &assignments)
}

/// Ascending checkpoint grid: user-supplied values plus an optional
/// log-spaced grid of `grid` points up to `x_max`.
pub fn build_checkpoints(x_max: u64, explicit: &[u64], grid: Option<u64>) -> Result<Vec<u64>> {
    let mut points: Vec<u64> = explicit.to_vec();
    if let Some(n) = grid {
        if n < 2 {
            return Err(Error::Argument("grid needs at least 2 points".into()));
        }
        let lo = 10f64.max(2.0);
        let ratio = (x_max as f64 / lo).powf(1.0 / (n - 1) as f64);
        let mut v = lo;
        for _ in 0..n {
            points.push((v.round() as u64).min(x_max));
            v *= ratio;
        }
        points.push(x_max);
    }
    points.sort_unstable();
    points.dedup();
    if points.is_empty() {
        return Err(Error::Argument("no checkpoints given".into()));
    }
    if *points.last().unwrap() > x_max {
        return Err(Error::Argument("checkpoint beyond x_max".into()));
    }
    Ok(points)
}

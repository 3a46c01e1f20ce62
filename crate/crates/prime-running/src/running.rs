//! Prime running functions over arithmetic progressions.
//!
//! The running function counts the integers `n <= x` whose P-floor (largest
//! prime `<= n`, with P-floor of 1 defined as 0) lies in a given residue
//! class mod `d`. Everything here is computed in a single streaming pass
//! over the prime gaps: each block `[p, q-1]` between consecutive primes is
//! attributed wholesale to the class of `p` (forward) or of `q` (reversed).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{prime_floor, PrimeStream, ResidueClass};

/// Running function values for all classes mod `d` at a set of checkpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunningTable {
    pub d: u64,
    pub checkpoints: Vec<u64>,
    /// One row per checkpoint, one column per residue `a` in `0..d`.
    pub phi: Vec<Vec<u64>>,
    pub reversed: bool,
}

impl RunningTable {
    pub fn value(&self, row: usize, a: u64) -> u64 {
        self.phi[row][a as usize]
    }

    /// Rescaled bias `(phi - x/phi(d)) * ln(x) / x` at a checkpoint row.
    pub fn rescaled_bias_at(&self, row: usize, a: u64) -> Result<f64> {
        let cls = ResidueClass::new(self.d, a)?;
        if !cls.reduced {
            return Err(Error::Argument(format!(
                "rescaled bias needs a reduced class, got {} mod {}",
                cls.a, self.d
            )));
        }
        let x = self.checkpoints[row];
        let phi_d = euler_phi_u64(self.d) as f64;
        let phi = self.phi[row][cls.a as usize] as f64;
        let xf = x as f64;
        Ok((phi - xf / phi_d) * xf.ln() / xf)
    }
}

pub(crate) fn euler_phi_u64(mut n: u64) -> u64 {
    let mut phi = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            phi -= phi / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// Incremental streaming state for a running-function computation.
///
/// Feeding the ascending primes one at a time closes the gap blocks; the
/// state is serializable so a long scan can checkpoint and resume with
/// byte-identical results.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunningScan {
    pub d: u64,
    pub checkpoints: Vec<u64>,
    pub reversed: bool,
    counts: Vec<u64>,
    rows: Vec<Vec<u64>>,
    next_checkpoint: usize,
    /// First n of the currently open block.
    block_lo: u64,
    /// P-floor of every n in the open block (0 for the initial block [1,1]).
    pfloor: u64,
}

impl RunningScan {
    pub fn new(d: u64, checkpoints: Vec<u64>, reversed: bool) -> Result<Self> {
        if d < 2 {
            return Err(Error::Argument(format!("modulus must be >= 2, got {d}")));
        }
        if checkpoints.is_empty() {
            return Err(Error::Argument("empty checkpoint list".into()));
        }
        if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("checkpoints must be strictly ascending".into()));
        }
        if checkpoints[0] < 1 {
            return Err(Error::Argument("checkpoints must be >= 1".into()));
        }
        Ok(RunningScan {
            d,
            counts: vec![0; d as usize],
            rows: Vec::new(),
            next_checkpoint: 0,
            checkpoints,
            reversed,
            block_lo: 1,
            pfloor: 0,
        })
    }

    pub fn is_done(&self) -> bool {
        self.next_checkpoint == self.checkpoints.len()
    }

    /// The prime at which a resumed prime stream must start.
    pub fn resume_from(&self) -> u64 {
        self.pfloor.max(1) + 1
    }

    /// Progress marker: every n below this has been attributed.
    pub fn processed_up_to(&self) -> u64 {
        self.block_lo
    }

    /// Close the block `[block_lo, q - 1]` against the next prime `q`.
    pub fn feed(&mut self, q: u64) {
        debug_assert!(q > self.pfloor);
        let class = if self.reversed { q % self.d } else { self.pfloor % self.d };
        let hi = q - 1;
        while self.next_checkpoint < self.checkpoints.len() {
            let x = self.checkpoints[self.next_checkpoint];
            if x > hi {
                break;
            }
            // x falls inside the open block: partial contribution.
            let mut row = self.counts.clone();
            row[class as usize] += x - self.block_lo + 1;
            self.rows.push(row);
            self.next_checkpoint += 1;
        }
        self.counts[class as usize] += hi - self.block_lo + 1;
        self.block_lo = q;
        self.pfloor = q;
    }

    /// Drive the scan to completion from a fresh prime stream.
    pub fn run(&mut self) {
        let mut primes = PrimeStream::starting_at(self.resume_from());
        while !self.is_done() {
            let q = primes.next().expect("prime stream is unbounded");
            self.feed(q);
        }
    }

    /// Drive the scan until every n <= `pause_at` is attributed, or to
    /// completion, whichever comes first.
    pub fn run_until(&mut self, pause_at: u64) {
        let mut primes = PrimeStream::starting_at(self.resume_from());
        while !self.is_done() && self.processed_up_to() <= pause_at {
            let q = primes.next().expect("prime stream is unbounded");
            self.feed(q);
        }
    }

    pub fn into_table(self) -> Result<RunningTable> {
        if !self.is_done() {
            return Err(Error::Argument("scan not finished".into()));
        }
        Ok(RunningTable {
            d: self.d,
            checkpoints: self.checkpoints,
            phi: self.rows,
            reversed: self.reversed,
        })
    }
}

/// Running function table for all classes mod `d` at the given checkpoints.
pub fn running_table(x_max: u64, d: u64, checkpoints: &[u64]) -> Result<RunningTable> {
    if checkpoints.iter().any(|&x| x > x_max) {
        return Err(Error::Argument("checkpoint beyond x_max".into()));
    }
    let mut scan = RunningScan::new(d, checkpoints.to_vec(), false)?;
    scan.run();
    scan.into_table()
}

/// Reversed running function: blocks are attributed to the class of the
/// prime closing the gap rather than the one opening it.
pub fn reversed_running_table(x_max: u64, d: u64, checkpoints: &[u64]) -> Result<RunningTable> {
    if checkpoints.iter().any(|&x| x > x_max) {
        return Err(Error::Argument("checkpoint beyond x_max".into()));
    }
    let mut scan = RunningScan::new(d, checkpoints.to_vec(), true)?;
    scan.run();
    scan.into_table()
}

/// The e-term of the gap-sum identity: `x - pfloor(x) + 1` when the P-floor
/// of `x` lies in the class, else 0.
pub fn boundary_term(x: u64, cls: ResidueClass) -> u64 {
    let pf = prime_floor(x);
    if pf % cls.d == cls.a {
        x - pf + 1
    } else {
        0
    }
}

/// Rescaled bias `(phi(x;d,a) - x/phi(d)) * ln(x) / x` for a reduced class.
pub fn rescaled_bias(x: u64, cls: ResidueClass) -> Result<f64> {
    if x < 3 {
        return Err(Error::Argument("rescaled bias needs x >= 3".into()));
    }
    let table = running_table(x, cls.d, &[x])?;
    table.rescaled_bias_at(0, cls.a)
}

/// Running race `phi(x;d,a) - phi(x;d,b)`.
pub fn race(x: u64, d: u64, a: u64, b: u64) -> Result<i64> {
    let table = running_table(x, d, &[x])?;
    Ok(table.value(0, a % d) as i64 - table.value(0, b % d) as i64)
}

const UNIT_DIRECTIONS: [(i64, i64); 4] = [(0, 1), (0, -1), (1, 0), (-1, 0)];

/// Assignment of unit steps to residues mod `d`; unassigned residues stay put.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionMap {
    pub d: u64,
    dirs: Vec<(i64, i64)>,
}

impl DirectionMap {
    pub fn new(d: u64, assignments: &[(u64, (i64, i64))]) -> Result<Self> {
        if d < 2 {
            return Err(Error::Argument(format!("modulus must be >= 2, got {d}")));
        }
        let mut dirs = vec![(0, 0); d as usize];
        let mut seen = Vec::new();
        for &(a, v) in assignments {
            if !UNIT_DIRECTIONS.contains(&v) {
                return Err(Error::Argument(format!("{v:?} is not a unit direction")));
            }
            let cls = ResidueClass::new(d, a)?;
            if !cls.reduced {
                return Err(Error::Argument(format!(
                    "direction assigned to non-reduced residue {a} mod {d}"
                )));
            }
            if seen.contains(&v) {
                return Err(Error::Argument(format!("duplicate direction {v:?}")));
            }
            if dirs[cls.a as usize] != (0, 0) {
                return Err(Error::Argument(format!("duplicate residue {a}")));
            }
            seen.push(v);
            dirs[cls.a as usize] = v;
        }
        Ok(DirectionMap { d, dirs })
    }

    /// The mod-5 map: 1 down, 2 left, 3 up, 4 right.
    pub fn mod5_default() -> Self {
        DirectionMap::new(5, &[(1, (0, -1)), (2, (-1, 0)), (3, (0, 1)), (4, (1, 0))]).unwrap()
    }

    pub fn direction(&self, residue: u64) -> (i64, i64) {
        self.dirs[(residue % self.d) as usize]
    }
}

/// A walk or run path on the integer lattice, sampled at a stride.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePath {
    pub n_max: u64,
    pub stride: u64,
    /// `(n, x, y)` samples at n = 1, 1+stride, ... plus n_max.
    pub samples: Vec<(u64, i64, i64)>,
    /// max over all n of max(|x|, |y|), regardless of stride.
    pub max_abs: u64,
}

impl LatticePath {
    pub fn final_position(&self) -> (i64, i64) {
        let &(_, x, y) = self.samples.last().unwrap();
        (x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathMode {
    /// Step once at each prime.
    Walk,
    /// Keep moving in the last prime's direction through the whole gap.
    Run,
}

/// Walk path: position at n is the sum of unit steps taken at primes <= n.
pub fn walk_path(n_max: u64, map: &DirectionMap, stride: u64) -> Result<LatticePath> {
    lattice_path(n_max, map, stride, PathMode::Walk)
}

/// Run path: position at n advances by the P-floor class direction at every
/// step, so a gap of length g contributes a straight segment of length g.
pub fn run_path(n_max: u64, map: &DirectionMap, stride: u64) -> Result<LatticePath> {
    lattice_path(n_max, map, stride, PathMode::Run)
}

pub fn lattice_path(
    n_max: u64,
    map: &DirectionMap,
    stride: u64,
    mode: PathMode,
) -> Result<LatticePath> {
    if n_max < 1 {
        return Err(Error::Argument("n_max must be >= 1".into()));
    }
    if stride < 1 {
        return Err(Error::Argument("stride must be >= 1".into()));
    }
    let mut samples = Vec::new();
    let mut next_sample = 1u64;
    let mut max_abs = 0u64;
    let mut pos = (0i64, 0i64);
    let mut primes = PrimeStream::new();
    let mut block_lo = 1u64; // first n of the open block
    let mut pfloor = 0u64;
    loop {
        let q = primes.next().expect("prime stream is unbounded");
        let hi = (q - 1).min(n_max);
        if block_lo <= hi {
            match mode {
                PathMode::Walk => {
                    // Step happens at n = block_lo when it is prime (all
                    // blocks except the initial [1,1] open at a prime).
                    if pfloor == block_lo {
                        let v = map.direction(block_lo % map.d);
                        pos.0 += v.0;
                        pos.1 += v.1;
                    }
                    max_abs = max_abs.max(pos.0.unsigned_abs()).max(pos.1.unsigned_abs());
                    while next_sample <= hi {
                        samples.push((next_sample, pos.0, pos.1));
                        next_sample += stride;
                    }
                    if hi == n_max && samples.last().map(|s| s.0) != Some(n_max) {
                        samples.push((n_max, pos.0, pos.1));
                    }
                }
                PathMode::Run => {
                    let v = map.direction(pfloor % map.d);
                    while next_sample <= hi {
                        let k = (next_sample - block_lo + 1) as i64;
                        samples.push((next_sample, pos.0 + k * v.0, pos.1 + k * v.1));
                        next_sample += stride;
                    }
                    let k = (hi - block_lo + 1) as i64;
                    let end = (pos.0 + k * v.0, pos.1 + k * v.1);
                    if hi == n_max && samples.last().map(|s| s.0) != Some(n_max) {
                        samples.push((n_max, end.0, end.1));
                    }
                    pos = end;
                    // Within a block the motion is a straight segment, so the
                    // sup-norm maximum is attained at an endpoint.
                    max_abs = max_abs.max(pos.0.unsigned_abs()).max(pos.1.unsigned_abs());
                }
            }
        }
        if hi == n_max {
            break;
        }
        block_lo = q;
        pfloor = q;
    }
    Ok(LatticePath {
        n_max,
        stride,
        samples,
        max_abs,
    })
}

//! Segmented prime generation and prime-indexed queries.
//!
//! Everything downstream consumes primes through [`PrimeStream`], which
//! sieves fixed-size segments lazily and yields a deterministic ascending
//! stream regardless of segment boundaries.

use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Default segment length in integers (power of two, cache friendly).
pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 22;

/// Hard cap on a single `sieve_range` call, in integers.
const MAX_RANGE_LEN: u64 = 1 << 32;

/// A residue class `a mod d` with the reduced/unreduced distinction explicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    pub d: u64,
    pub a: u64,
    pub reduced: bool,
}

impl ResidueClass {
    pub fn new(d: u64, a: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Argument(format!("modulus must be >= 2, got {d}")));
        }
        let a = a % d;
        Ok(ResidueClass {
            d,
            a,
            reduced: gcd(a, d) == 1,
        })
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Primality flags for the half-open range `[lo, hi)`.
#[derive(Debug, Clone)]
pub struct SieveSegment {
    pub lo: u64,
    pub hi: u64,
    flags: Vec<u64>,
}

impl SieveSegment {
    pub fn len(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    /// True iff `n` is prime. Panics when `n` is outside `[lo, hi)`.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n >= self.lo && n < self.hi, "n out of segment range");
        let i = (n - self.lo) as usize;
        self.flags[i >> 6] >> (i & 63) & 1 == 1
    }

    /// Ascending iterator over the primes in `[lo, hi)`.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let lo = self.lo;
        self.flags.iter().enumerate().flat_map(move |(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as u64;
                bits &= bits - 1;
                Some(lo + (w as u64) * 64 + b)
            })
        })
    }

    pub fn count(&self) -> u64 {
        self.flags.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Raw flag words, for bit-for-bit comparisons in tests.
    pub fn words(&self) -> &[u64] {
        &self.flags
    }
}

// Base primes (odd primes up to some bound) are shared across calls since
// every segment of a long streamed range needs the same list.
static BASE_PRIMES: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();

/// Odd primes up to and including `limit`, grown on demand.
fn base_primes(limit: u64) -> Vec<u64> {
    let cache = BASE_PRIMES.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().unwrap();
    if guard.last().copied().unwrap_or(0) < limit {
        *guard = simple_odd_sieve(limit.max(1 << 10));
    }
    guard
        .iter()
        .copied()
        .take_while(|&p| p <= limit)
        .collect()
}

/// Plain sieve of Eratosthenes over odds, used only for base primes.
fn simple_odd_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n / 2 + 1]; // index i <-> 2i + 1, i >= 1
    let mut primes = Vec::new();
    let mut i = 1usize;
    while 2 * i + 1 <= n {
        if !composite[i] {
            let p = 2 * i + 1;
            primes.push(p as u64);
            let mut j = (p * p - 1) / 2;
            while 2 * j + 1 <= n {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    primes
}

/// Sieve the half-open range `[lo, hi)`.
///
/// Deterministic, and segment-independent: sieving `[0, N)` in one call is
/// bit-for-bit equal to the concatenation of sieving it in pieces.
pub fn sieve_range(lo: u64, hi: u64) -> Result<SieveSegment> {
    if lo >= hi {
        return Err(Error::Argument(format!("empty range [{lo}, {hi})")));
    }
    if hi > 1 << 63 {
        return Err(Error::Argument("hi exceeds 2^63".into()));
    }
    if hi - lo > MAX_RANGE_LEN {
        return Err(Error::Resource(format!(
            "range of {} entries exceeds the {} entry budget; sieve in segments",
            hi - lo,
            MAX_RANGE_LEN
        )));
    }
    let len = (hi - lo) as usize;
    let mut flags = vec![0u64; len.div_ceil(64)];
    let set = |flags: &mut [u64], n: u64| {
        let i = (n - lo) as usize;
        flags[i >> 6] |= 1 << (i & 63);
    };
    if 2 >= lo && 2 < hi {
        set(&mut flags, 2);
    }
    // Mark odd candidates, then clear odd composites.
    let mut n = lo.max(3) | 1;
    while n < hi {
        set(&mut flags, n);
        n += 2;
    }
    let root = hi.isqrt();
    for p in base_primes(root) {
        // first odd multiple of p in [max(lo, p^2), hi)
        let start = p * p;
        let mut m = if start >= lo {
            start
        } else {
            let m = lo.div_ceil(p) * p;
            if m % 2 == 0 {
                m + p
            } else {
                m
            }
        };
        while m < hi {
            let i = (m - lo) as usize;
            flags[i >> 6] &= !(1 << (i & 63));
            m += 2 * p;
        }
    }
    // 1 is odd but not prime; the odd-marking loop may have set it.
    if lo <= 1 && 1 < hi {
        let i = (1 - lo) as usize;
        flags[i >> 6] &= !(1 << (i & 63));
    }
    Ok(SieveSegment { lo, hi, flags })
}

/// An unbounded ascending stream of primes, sieved one segment at a time.
pub struct PrimeStream {
    segment: SieveSegment,
    cursor: u64,
    segment_len: u64,
}

impl PrimeStream {
    pub fn new() -> Self {
        Self::starting_at(2)
    }

    /// Stream of primes `>= lo`.
    pub fn starting_at(lo: u64) -> Self {
        Self::with_segment_len(lo, DEFAULT_SEGMENT_LEN)
    }

    pub fn with_segment_len(lo: u64, segment_len: u64) -> Self {
        let lo = lo.max(2);
        let hi = lo + segment_len;
        PrimeStream {
            segment: sieve_range(lo, hi).expect("segment sieve"),
            cursor: lo,
            segment_len,
        }
    }
}

impl Default for PrimeStream {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            while self.cursor < self.segment.hi {
                let n = self.cursor;
                self.cursor += 1;
                if self.segment.is_prime(n) {
                    return Some(n);
                }
            }
            let lo = self.segment.hi;
            self.segment = sieve_range(lo, lo + self.segment_len).expect("segment sieve");
        }
    }
}

/// Largest prime `<= n`, with `prime_floor(1) = 0`.
pub fn prime_floor(n: u64) -> u64 {
    assert!(n >= 1, "prime_floor requires n >= 1");
    if n == 1 {
        return 0;
    }
    // Window just below n; gaps at this scale are far below the window size.
    let mut window = 4096u64;
    loop {
        let lo = n.saturating_sub(window).max(2);
        let seg = sieve_range(lo, n + 1).expect("segment sieve");
        if let Some(p) = seg.primes().filter(|&p| p <= n).last() {
            return p;
        }
        window *= 2;
    }
}

/// Streaming P-floor cursor for callers that scan `n` in increasing order.
pub struct PrimeFloorCursor {
    stream: PrimeStream,
    prev: u64,
    next: u64,
}

impl PrimeFloorCursor {
    pub fn new() -> Self {
        let mut stream = PrimeStream::new();
        let next = stream.next().unwrap();
        PrimeFloorCursor {
            stream,
            prev: 0,
            next,
        }
    }

    /// P-floor of `n`; successive calls must have nondecreasing `n`.
    pub fn floor(&mut self, n: u64) -> u64 {
        assert!(n >= 1);
        assert!(
            n >= self.prev,
            "PrimeFloorCursor queries must be nondecreasing"
        );
        while self.next <= n {
            self.prev = self.next;
            self.next = self.stream.next().unwrap();
        }
        self.prev
    }
}

impl Default for PrimeFloorCursor {
    fn default() -> Self {
        Self::new()
    }
}

/// Number of primes `p <= x` with `p = a mod d`.
pub fn pi_ap(x: u64, cls: ResidueClass) -> u64 {
    PrimeStream::new()
        .take_while(|&p| p <= x)
        .filter(|&p| p % cls.d == cls.a)
        .count() as u64
}

/// Number of primes `<= x`.
pub fn prime_count(x: u64) -> u64 {
    PrimeStream::new().take_while(|&p| p <= x).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn first_primes() {
        let seg = sieve_range(0, 11).unwrap();
        let primes: Vec<u64> = seg.primes().collect();
        assert_eq!(primes, vec![2, 3, 5, 7]);
    }

    #[test]
    fn agrees_with_trial_division_near_1e8() {
        let lo = 100_000_000 - 100;
        let hi = 100_000_000;
        let seg = sieve_range(lo, hi).unwrap();
        for n in lo..hi {
            assert_eq!(seg.is_prime(n), is_prime_trial(n), "n = {n}");
        }
    }

    #[test]
    fn segment_independence_bit_for_bit() {
        let n = 300_000u64;
        let whole = sieve_range(0, n).unwrap();
        let step = 64 * 101; // word-aligned pieces so words compare directly
        let mut lo = 0;
        let mut words = Vec::new();
        while lo < n {
            let hi = (lo + step).min(n);
            let seg = sieve_range(lo, hi).unwrap();
            words.extend_from_slice(seg.words());
            lo = hi;
        }
        assert_eq!(whole.words(), &words[..]);
    }

    #[test]
    fn stream_matches_segment_primes() {
        let primes: Vec<u64> = PrimeStream::with_segment_len(2, 97)
            .take_while(|&p| p < 10_000)
            .collect();
        let seg = sieve_range(0, 10_000).unwrap();
        let expected: Vec<u64> = seg.primes().collect();
        assert_eq!(primes, expected);
    }

    #[test]
    fn prime_floor_examples() {
        assert_eq!(prime_floor(1), 0);
        assert_eq!(prime_floor(10), 7);
        assert_eq!(prime_floor(97), 97);
    }

    #[test]
    fn prime_floor_cursor_matches_oneshot() {
        let mut cursor = PrimeFloorCursor::new();
        for n in 1..2_000u64 {
            assert_eq!(cursor.floor(n), prime_floor(n), "n = {n}");
        }
    }

    #[test]
    fn prime_floor_idempotent_on_primes() {
        for n in 2..500u64 {
            let f = prime_floor(n);
            assert_eq!(prime_floor(f), f);
        }
    }

    #[test]
    fn pi_ap_examples() {
        assert_eq!(pi_ap(10, ResidueClass::new(4, 1).unwrap()), 1);
        assert_eq!(pi_ap(10, ResidueClass::new(4, 3).unwrap()), 2);
        assert_eq!(pi_ap(1, ResidueClass::new(7, 2).unwrap()), 0);
    }

    #[test]
    fn pi_ap_partition() {
        for d in [2u64, 3, 6, 10] {
            for x in [10u64, 100, 1000] {
                let total: u64 = (0..d)
                    .map(|a| pi_ap(x, ResidueClass::new(d, a).unwrap()))
                    .sum();
                assert_eq!(total, prime_count(x), "d = {d}, x = {x}");
            }
        }
    }

    #[test]
    fn range_too_large_is_resource_error() {
        let err = sieve_range(0, MAX_RANGE_LEN + 1).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}

//! The sieved random-prime model: integers coprime to a sieve modulus `Q`
//! become model primes independently with probability `c_Q / ln n`, where
//! `c_Q = Q / phi(Q)` compensates for the sieved-out residues. Probabilities
//! above 1 (small n, including n = 1) are clamped to 1.

use num_rational::Ratio;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::gcd;

/// Sieve modulus with its factorization, totient and density prefactor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CramerModel {
    pub q: u64,
    pub factorization: Vec<(u64, u32)>,
    pub totient: u64,
}

impl CramerModel {
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::Argument(format!("sieve modulus must be >= 2, got {q}")));
        }
        let factorization = factorize(q);
        let totient = factorization
            .iter()
            .fold(q, |phi, &(p, _)| phi / p * (p - 1));
        Ok(CramerModel {
            q,
            factorization,
            totient,
        })
    }

    /// `c_Q = Q / phi(Q)` as an exact rational.
    pub fn prefactor(&self) -> Ratio<u64> {
        Ratio::new(self.q, self.totient)
    }

    pub fn prefactor_f64(&self) -> f64 {
        self.q as f64 / self.totient as f64
    }
}

pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        factors.push((n, 1));
    }
    factors
}

/// Success probability of `n` being a model prime: 0 when `gcd(n, Q) > 1`,
/// else `min(1, c_Q / ln n)`. `n = 1` gets probability 1 (`ln 1 = 0`).
pub fn bernoulli_prob(n: u64, model: &CramerModel) -> f64 {
    assert!(n >= 1);
    if gcd(n, model.q) > 1 {
        return 0.0;
    }
    let c = model.prefactor_f64();
    let log_n = (n as f64).ln();
    if log_n <= c {
        1.0
    } else {
        c / log_n
    }
}

/// One sampled sequence of model primes up to (and one past) the horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSequence {
    pub q: u64,
    pub x_max: u64,
    pub seed: u64,
    /// Ascending model-prime positions `<= x_max`.
    pub mc_primes: Vec<u64>,
    /// First model prime beyond `x_max`, closing the final gap.
    pub overshoot: Option<u64>,
}

/// Draw a full sample sequence on `[1, x_max]`, then keep sampling past the
/// horizon until the gap opened by the last model prime closes.
pub fn sample_sequence(x_max: u64, model: &CramerModel, seed: u64) -> Result<SampleSequence> {
    if x_max < 2 {
        return Err(Error::Argument("x_max must be >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mc_primes = Vec::new();
    for n in 1..=x_max {
        if gcd(n, model.q) > 1 {
            continue;
        }
        if rng.random::<f64>() < bernoulli_prob(n, model) {
            mc_primes.push(n);
        }
    }
    let mut overshoot = None;
    if !mc_primes.is_empty() {
        let cap = x_max + ((1000.0 * (x_max as f64).ln()).ceil() as u64);
        for n in x_max + 1..=cap {
            if gcd(n, model.q) > 1 {
                continue;
            }
            if rng.random::<f64>() < bernoulli_prob(n, model) {
                overshoot = Some(n);
                break;
            }
        }
        if overshoot.is_none() {
            return Err(Error::SamplingExhausted(format!(
                "no model prime in ({x_max}, {cap}] to close the final gap"
            )));
        }
    }
    Ok(SampleSequence {
        q: model.q,
        x_max,
        seed,
        mc_primes,
        overshoot,
    })
}

/// Random running function: the sum of conditional gaps `W_n` over model
/// primes `n <= x_max` with `n = a mod d`. The gap closed by the overshoot
/// element counts in full.
pub fn phi_tilde(seq: &SampleSequence, d: u64, a: u64) -> Result<u64> {
    if d < 2 || seq.q % d != 0 {
        return Err(Error::Argument(format!(
            "d = {d} must divide the sieve modulus Q = {}",
            seq.q
        )));
    }
    if gcd(a % d, d) != 1 {
        return Err(Error::Argument(format!("class {a} mod {d} is not reduced")));
    }
    let a = a % d;
    let mut total = 0u64;
    for (i, &u) in seq.mc_primes.iter().enumerate() {
        if u % d != a {
            continue;
        }
        let next = match seq.mc_primes.get(i + 1) {
            Some(&v) => v,
            None => seq
                .overshoot
                .ok_or_else(|| Error::SamplingExhausted("final gap not closed".into()))?,
        };
        total += next - u;
    }
    Ok(total)
}

/// Exact expectation of the conditional gap at a model prime position `u`,
/// as a truncated series: terms stop once the survival product drops
/// below `eps`.
pub fn expected_w(u: u64, model: &CramerModel, eps: f64) -> Result<f64> {
    if u < 1 || gcd(u, model.q) > 1 {
        return Err(Error::Argument(format!(
            "u = {u} must be >= 1 and coprime to Q = {}",
            model.q
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Argument("eps must lie in (0, 1)".into()));
    }
    let p_u = bernoulli_prob(u, model);
    let mut sum = 0.0;
    let mut survival = 1.0f64;
    let mut v = u + 1;
    loop {
        if gcd(v, model.q) > 1 {
            v += 1;
            continue;
        }
        let p_v = bernoulli_prob(v, model);
        sum += (v - u) as f64 * p_v * survival;
        survival *= 1.0 - p_v;
        if survival < eps {
            break;
        }
        v += 1;
    }
    Ok(p_u * sum)
}

pub const DEFAULT_SERIES_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpectationMode {
    /// Sum the exact gap-expectation series term by term.
    Series,
    /// `x/phi(d) + R_Q(d;a) * x/ln x` with the exact model bias constant.
    Asymptotic,
}

/// Expected value of the random running function at horizon `x`.
pub fn expected_phi_tilde(
    x: u64,
    model: &CramerModel,
    d: u64,
    a: u64,
    mode: ExpectationMode,
) -> Result<f64> {
    if d < 2 || model.q % d != 0 {
        return Err(Error::Argument(format!(
            "d = {d} must divide the sieve modulus Q = {}",
            model.q
        )));
    }
    if gcd(a % d, d) != 1 {
        return Err(Error::Argument(format!("class {a} mod {d} is not reduced")));
    }
    let a = a % d;
    match mode {
        ExpectationMode::Series => {
            let mut total = 0.0;
            let mut u = a.max(1);
            // first u = a mod d; step by d
            if u % d != a {
                u = a + d;
            }
            let mut sum = 0.0;
            while u <= x {
                if gcd(u, model.q) == 1 {
                    sum += expected_w(u, model, DEFAULT_SERIES_EPS)?;
                }
                u += d;
            }
            total += sum;
            Ok(total)
        }
        ExpectationMode::Asymptotic => {
            let q = crate::bias::FactoredModulus::from_u64(model.q)?;
            let vector = crate::bias::bias_vector_auto(&q, d)?;
            let r = crate::bias::rational_to_f64(vector.entry(a)?);
            let phi_d = crate::running::euler_phi_u64(d) as f64;
            let xf = x as f64;
            Ok(xf / phi_d + r * xf / xf.ln())
        }
    }
}

/// Per-trial samples of the random running function with summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub n_trials: u64,
    pub values: Vec<u64>,
    pub mean: f64,
    /// Unbiased sample variance; absent for a single trial.
    pub variance: Option<f64>,
}

/// Derive a per-trial seed; splitmix64 over (seed, index) keeps trials
/// independent without shared RNG state.
pub fn derive_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent Monte Carlo trials of the random running function.
pub fn monte_carlo_stats(
    x: u64,
    model: &CramerModel,
    d: u64,
    a: u64,
    n_trials: u64,
    seed: u64,
) -> Result<TrialStats> {
    if n_trials < 1 {
        return Err(Error::Argument("need at least one trial".into()));
    }
    let values: Vec<u64> = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let seq = sample_sequence(x, model, derive_seed(seed, i))?;
            phi_tilde(&seq, d, a)
        })
        .collect::<Result<_>>()?;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n_trials as f64;
    let variance = if n_trials >= 2 {
        let ss: f64 = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum();
        Some(ss / (n_trials - 1) as f64)
    } else {
        None
    };
    Ok(TrialStats {
        n_trials,
        values,
        mean,
        variance,
    })
}

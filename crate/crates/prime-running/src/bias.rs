//! Exact model bias constants.
//!
//! `R_Q(d;a) = R*_Q(d;a) - Rbar_Q(d)` where `R*` is a double sum of least
//! positive residues over the reduced classes mod `Q`. Two routes compute
//! it: a brute-force enumeration (usable while `phi(Q)^2` stays within a
//! guard) and a multiplicative recursion that extends the sieve modulus one
//! new prime at a time, which reaches primorial moduli like `1000#` with
//! thousands of digits. All arithmetic is in arbitrary-precision rationals;
//! rounding happens only at render time.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cramer::factorize;
use crate::error::{Error, Result};
use crate::primes::{gcd, PrimeStream};

/// Brute-force guard: `phi(Q)^2` pair-iterations at most.
pub const BRUTE_FORCE_GUARD: u128 = 10_000_000_000;

/// An arbitrary-precision modulus carried with its factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredModulus {
    pub value: BigUint,
    pub factors: Vec<(u64, u32)>,
    pub totient: BigUint,
}

impl FactoredModulus {
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Argument("modulus must be >= 2".into()));
        }
        let mut value = BigUint::one();
        let mut totient = BigUint::one();
        for &(p, e) in &factors {
            let pb = BigUint::from(p);
            value *= pb.pow(e);
            totient *= pb.pow(e - 1) * BigUint::from(p - 1);
        }
        Ok(FactoredModulus {
            value,
            factors,
            totient,
        })
    }

    pub fn from_u64(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::Argument(format!("modulus must be >= 2, got {q}")));
        }
        Self::from_factors(factorize(q))
    }

    /// `Q` as u64 when it fits (brute-force route).
    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    pub fn totient_u64(&self) -> Option<u64> {
        self.totient.to_u64()
    }

    pub fn divisible_by(&self, d: u64) -> bool {
        (&self.value % BigUint::from(d)).is_zero()
    }

    /// Least common multiple with a u64, as a factored modulus.
    pub fn lcm_with(&self, m: u64) -> Result<Self> {
        let mut factors: BTreeMap<u64, u32> = self.factors.iter().copied().collect();
        for (p, e) in factorize(m) {
            let entry = factors.entry(p).or_insert(0);
            *entry = (*entry).max(e);
        }
        Self::from_factors(factors.into_iter().collect())
    }
}

/// Product of all primes `<= t`, with its factor list.
pub fn primorial(t: u64) -> Result<FactoredModulus> {
    if t < 2 {
        return Err(Error::Argument("primorial needs T >= 2".into()));
    }
    let factors: Vec<(u64, u32)> = PrimeStream::new()
        .take_while(|&p| p <= t)
        .map(|p| (p, 1))
        .collect();
    FactoredModulus::from_factors(factors)
}

pub fn euler_phi(n: u64) -> u64 {
    crate::running::euler_phi_u64(n)
}

/// Least positive residue of `n` mod `q`, in `[1, q]`.
pub fn least_positive_residue(n: i64, q: u64) -> u64 {
    assert!(q >= 1);
    let r = n.rem_euclid(q as i64) as u64;
    if r == 0 {
        q
    } else {
        r
    }
}

/// CRT representative in `[1, prod Q_i]` matching every `(n_i, Q_i)` pair.
pub fn crt_residue(pairs: &[(i64, u64)]) -> Result<u128> {
    if pairs.is_empty() {
        return Err(Error::Argument("crt_residue needs at least one pair".into()));
    }
    for (i, &(_, qi)) in pairs.iter().enumerate() {
        for &(_, qj) in &pairs[i + 1..] {
            if gcd(qi, qj) != 1 {
                return Err(Error::Argument(format!(
                    "moduli {qi} and {qj} are not coprime"
                )));
            }
        }
    }
    let mut r = least_positive_residue(pairs[0].0, pairs[0].1) as u128;
    let mut m = pairs[0].1 as u128;
    for &(n, q) in &pairs[1..] {
        let target = least_positive_residue(n, q) as u128 % q as u128;
        // r + k*m = target (mod q)
        let m_mod = (m % q as u128) as u64;
        let r_mod = (r % q as u128) as u64;
        let diff = (target as u64 % q + q - r_mod % q) % q;
        let inv = mod_inverse(m_mod % q, q).ok_or_else(|| {
            Error::Argument(format!("no inverse of {m_mod} mod {q}"))
        })?;
        let k = (diff as u128 * inv as u128) % q as u128;
        r += k * m;
        m *= q as u128;
    }
    // shift 0 to the top of the [1, m] window
    if r == 0 {
        r = m;
    }
    Ok(r)
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

fn check_brute_args(q: &FactoredModulus, d: u64, a: u64) -> Result<(u64, u64)> {
    if d < 2 {
        return Err(Error::Argument(format!("modulus d must be >= 2, got {d}")));
    }
    if !q.divisible_by(d) {
        return Err(Error::Argument(format!("d = {d} must divide Q")));
    }
    if gcd(a % d, d) != 1 {
        return Err(Error::Argument(format!("class {a} mod {d} is not reduced")));
    }
    let qv = q.to_u64().ok_or_else(|| {
        Error::Resource("Q too large for brute force; use the recursion".into())
    })?;
    let phi = q.totient_u64().unwrap();
    if (phi as u128) * (phi as u128) > BRUTE_FORCE_GUARD {
        return Err(Error::Resource(format!(
            "phi(Q)^2 = {} exceeds the brute-force guard; use the recursion",
            (phi as u128) * (phi as u128)
        )));
    }
    Ok((qv, phi))
}

/// `R*_Q(d;a)`: the normalized double sum of least positive residues
/// `<t - s>_Q` over reduced s = a mod d and reduced t.
///
/// The inner sum over t collapses to a closed form per s (prefix counts of
/// the reduced residues), so the whole computation is O(Q).
pub fn r_star_brute(q: &FactoredModulus, d: u64, a: u64) -> Result<BigRational> {
    let (qv, phi) = check_brute_args(q, d, a)?;
    let a = a % d;
    // coprime prefix data over [1, Q]
    let mut coprime_sum: u128 = 0; // sum of reduced t
    let mut prefix = vec![0u64; qv as usize + 1]; // #reduced t <= i
    let mut cnt = 0u64;
    for t in 1..=qv {
        if gcd(t, qv) == 1 {
            cnt += 1;
            coprime_sum += t as u128;
        }
        prefix[t as usize] = cnt;
    }
    debug_assert_eq!(cnt, phi);
    // sum over s = a mod d, gcd(s, Q) = 1 of
    //   sum_t <t - s>_Q = coprime_sum - phi*s + Q * #{t <= s}
    let mut total = BigInt::zero();
    let mut s = a;
    if s == 0 {
        s = d;
    }
    while s <= qv {
        if gcd(s, qv) == 1 {
            let inner = BigInt::from(coprime_sum) - BigInt::from(phi as u128 * s as u128)
                + BigInt::from(qv as u128 * prefix[s as usize] as u128);
            total += inner;
        }
        s += d;
    }
    let denom = BigInt::from(phi) * BigInt::from(phi);
    Ok(BigRational::new(total, denom))
}

/// `Rbar_Q(d) = (1/phi(d)) * (Q/phi(Q)) * (phi(Q)+1)/2`, exact.
pub fn r_bar(q: &FactoredModulus, d: u64) -> Result<BigRational> {
    if d < 2 || !q.divisible_by(d) {
        return Err(Error::Argument(format!("d = {d} must divide Q")));
    }
    let qb = BigInt::from(q.value.clone());
    let phi_q = BigInt::from(q.totient.clone());
    let phi_d = BigInt::from(euler_phi(d));
    Ok(BigRational::new(
        qb * (&phi_q + BigInt::one()),
        phi_d * phi_q * BigInt::from(2),
    ))
}

/// `R_Q(d;a) = R*_Q(d;a) - Rbar_Q(d)` by brute force.
pub fn r_bias_brute(q: &FactoredModulus, d: u64, a: u64) -> Result<BigRational> {
    Ok(r_star_brute(q, d, a)? - r_bar(q, d)?)
}

/// Base case `R_d(d;a) = d/phi(d)^2 * (a/d - 1/2)` for prime `d`.
///
/// The closed form holds only for prime d (for d = 4 it already disagrees
/// with the brute force); prime-power bases go through `r_bias_brute`.
pub fn base_case(d: u64, a: u64) -> Result<BigRational> {
    if factorize(d) != vec![(d, 1)] {
        return Err(Error::Argument(format!(
            "base-case closed form requires prime d, got {d}"
        )));
    }
    if a < 1 || a > d - 1 || gcd(a, d) != 1 {
        return Err(Error::Argument(format!("class {a} mod {d} is not reduced")));
    }
    let phi = BigInt::from(d - 1);
    // d/phi^2 * (a/d - 1/2) = (2a - d) / (2 phi^2)
    Ok(BigRational::new(
        BigInt::from(2 * a as i128 - d as i128),
        BigInt::from(2) * &phi * &phi,
    ))
}

/// Exact bias constants for every reduced class `a mod d` at modulus `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasVector {
    pub d: u64,
    pub q: FactoredModulus,
    pub entries: BTreeMap<u64, BigRational>,
    pub r_bar: BigRational,
}

impl BiasVector {
    pub fn entry(&self, a: u64) -> Result<&BigRational> {
        self.entries
            .get(&(a % self.d))
            .ok_or_else(|| Error::Argument(format!("class {a} mod {} is not reduced", self.d)))
    }

    /// Brute-force vector over all reduced classes.
    pub fn brute(q: FactoredModulus, d: u64) -> Result<Self> {
        let rb = r_bar(&q, d)?;
        let mut entries = BTreeMap::new();
        for a in 1..=d {
            if gcd(a % d, d) == 1 {
                entries.insert(a % d, r_bias_brute(&q, d, a)?);
            }
        }
        Ok(BiasVector {
            d,
            q,
            entries,
            r_bar: rb,
        })
    }

    /// The Q = d starting vector for the recursion chain.
    pub fn base(d: u64) -> Result<Self> {
        Self::brute(FactoredModulus::from_u64(d)?, d)
    }

    /// Extend the sieve modulus by one new prime `p` (coprime to both the
    /// current Q and d):
    /// `R_pQ(d;b) = ((phi(p)^2 - 1)/phi(p)^2) R_Q(d;b) + (p/phi(p)^2) R_Q(d; p^-1 b)`.
    pub fn recursion_step(&self, p: u64) -> Result<Self> {
        if factorize(p) != vec![(p, 1)] {
            return Err(Error::Argument(format!("{p} is not prime")));
        }
        if self.q.factors.iter().any(|&(f, _)| f == p) {
            return Err(Error::Argument(format!("{p} already divides Q")));
        }
        if self.d % p == 0 {
            return Err(Error::Argument(format!("{p} divides d = {}", self.d)));
        }
        let phi_p = p - 1;
        let phi_sq = BigInt::from(phi_p) * BigInt::from(phi_p);
        let keep = BigRational::new(&phi_sq - BigInt::one(), phi_sq.clone());
        let mix = BigRational::new(BigInt::from(p), phi_sq);
        let p_inv = mod_inverse(p % self.d, self.d)
            .ok_or_else(|| Error::Argument(format!("{p} is not invertible mod {}", self.d)))?;
        let mut entries = BTreeMap::new();
        for (&b, r_b) in &self.entries {
            let source = (p_inv as u128 * b as u128 % self.d as u128) as u64;
            let r_src = &self.entries[&source];
            entries.insert(b, &keep * r_b + &mix * r_src);
        }
        let mut factors = self.q.factors.clone();
        factors.push((p, 1));
        factors.sort_unstable();
        let q = FactoredModulus::from_factors(factors)?;
        let rb = r_bar(&q, self.d)?;
        Ok(BiasVector {
            d: self.d,
            q,
            entries,
            r_bar: rb,
        })
    }

    /// Recursion chain from Q = d over the extra primes of `q`, which must
    /// factor as d times distinct primes not dividing d.
    pub fn recursion(q: &FactoredModulus, d: u64) -> Result<Self> {
        let d_factors: BTreeMap<u64, u32> = factorize(d).into_iter().collect();
        let mut extra = Vec::new();
        for &(p, e) in &q.factors {
            match d_factors.get(&p) {
                Some(&ed) => {
                    if e != ed {
                        return Err(Error::Argument(format!(
                            "recursion needs Q with the exact prime powers of d; \
                             {p}^{e} vs {p}^{ed}"
                        )));
                    }
                }
                None => {
                    if e != 1 {
                        return Err(Error::Argument(format!(
                            "recursion needs squarefree extra primes; got {p}^{e}"
                        )));
                    }
                    extra.push(p);
                }
            }
        }
        if d_factors.keys().any(|p| !q.factors.iter().any(|&(f, _)| f == *p)) {
            return Err(Error::Argument(format!("d = {d} must divide Q")));
        }
        let mut vector = Self::base(d)?;
        for p in extra {
            vector = vector.recursion_step(p)?;
        }
        Ok(vector)
    }
}

/// Bias vector via brute force when Q is within the guard, else recursion.
pub fn bias_vector_auto(q: &FactoredModulus, d: u64) -> Result<BiasVector> {
    let under_guard = q
        .totient_u64()
        .map(|phi| (phi as u128) * (phi as u128) <= BRUTE_FORCE_GUARD)
        .unwrap_or(false)
        && q.to_u64().is_some();
    if under_guard {
        BiasVector::brute(q.clone(), d)
    } else {
        BiasVector::recursion(q, d)
    }
}

/// Bias constants at sieve modulus `lcm(d, T#)` via the recursion chain.
pub fn primorial_bias_table(d: u64, t: u64) -> Result<BiasVector> {
    if d < 2 {
        return Err(Error::Argument(format!("modulus must be >= 2, got {d}")));
    }
    let mut vector = BiasVector::base(d)?;
    for p in PrimeStream::new().take_while(|&p| p <= t) {
        if d % p != 0 {
            vector = vector.recursion_step(p)?;
        }
    }
    Ok(vector)
}

/// The sieve-by-selected-primes product: for prime `d`, multiplying only the
/// primes `p <= T` with `p = 1 mod d` scales the base constant by
/// `prod p/(p-1)`.
pub fn q_t_product(d: u64, a: u64, t: u64) -> Result<BigRational> {
    let base = base_case(d, a)?;
    let mut product = BigRational::one();
    for p in PrimeStream::new().take_while(|&p| p <= t) {
        if p % d == 1 {
            product *= BigRational::new(BigInt::from(p), BigInt::from(p - 1));
        }
    }
    Ok(product * base)
}

/// Radical / square-free part of `d`.
pub fn radical(d: u64) -> u64 {
    factorize(d).into_iter().map(|(p, _)| p).product()
}

/// `R_Q(d;a)` recovered from the square-free part of `d`:
/// `(phi(d_sf)/phi(d)) * R_Q(d_sf; a mod d_sf)`.
pub fn radical_transfer(q: &FactoredModulus, d: u64, a: u64) -> Result<BigRational> {
    if d < 2 || !q.divisible_by(d) {
        return Err(Error::Argument(format!("d = {d} must divide Q")));
    }
    if gcd(a % d, d) != 1 {
        return Err(Error::Argument(format!("class {a} mod {d} is not reduced")));
    }
    let d_sf = radical(d);
    let r_sf = if q.to_u64().is_some()
        && q.totient_u64()
            .map(|phi| (phi as u128) * (phi as u128) <= BRUTE_FORCE_GUARD)
            .unwrap_or(false)
    {
        r_bias_brute(q, d_sf, a % d_sf)?
    } else {
        BiasVector::recursion(q, d_sf)?.entry(a % d_sf)?.clone()
    };
    let scale = BigRational::new(BigInt::from(euler_phi(d_sf)), BigInt::from(euler_phi(d)));
    Ok(scale * r_sf)
}

/// Round-half-even decimal rendering of an exact rational.
pub fn decimal_string(r: &BigRational, places: u32) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let num = r.numer().abs().to_biguint().unwrap();
    let den = r.denom().abs().to_biguint().unwrap();
    let scale = BigUint::from(10u32).pow(places);
    let scaled = num * &scale;
    let (mut q, rem) = scaled.div_rem(&den);
    let twice = &rem * BigUint::from(2u32);
    if twice > den || (twice == den && (&q % BigUint::from(2u32)) == BigUint::one()) {
        q += BigUint::one();
    }
    let digits = q.to_string();
    let places = places as usize;
    let (int_part, frac_part) = if digits.len() > places {
        let split = digits.len() - places;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        ("0".to_string(), format!("{digits:0>places$}"))
    };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(v) if v.is_finite() => v,
        // numerator/denominator individually overflow f64 (primorial
        // chains); go through a high-precision decimal instead
        _ => decimal_string(r, 18).parse().unwrap(),
    }
}

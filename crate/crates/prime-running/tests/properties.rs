//! Randomized property tests over the core invariants.

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use prime_running::bias::{self, r_bias_brute, FactoredModulus};
use prime_running::primes::{gcd, prime_floor, PrimeFloorCursor};
use prime_running::running::{race, running_table, RunningScan};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The classes partition [1, x]: counts sum to floor(x).
    #[test]
    fn conservation(x in 1u64..20_000, d in 2u64..=30) {
        let t = running_table(x, d, &[x]).unwrap();
        let total: u64 = (0..d).map(|a| t.value(0, a)).sum();
        prop_assert_eq!(total, x);
    }

    /// The streaming scan agrees with direct prime-floor enumeration.
    #[test]
    fn scan_matches_enumeration(x in 1u64..3_000, d in 2u64..=12) {
        let t = running_table(x, d, &[x]).unwrap();
        let mut cursor = PrimeFloorCursor::new();
        let mut counts = vec![0u64; d as usize];
        for n in 1..=x {
            counts[(cursor.floor(n) % d) as usize] += 1;
        }
        for a in 0..d {
            prop_assert_eq!(t.value(0, a), counts[a as usize], "a={}", a);
        }
    }

    /// Pausing and resuming a scan anywhere never changes the result.
    #[test]
    fn resume_anywhere_is_lossless(x in 100u64..5_000, d in 2u64..=10, frac in 0.0f64..1.0) {
        let mut direct = RunningScan::new(d, vec![x], false).unwrap();
        direct.run();
        let mut paused = RunningScan::new(d, vec![x], false).unwrap();
        paused.run_until((x as f64 * frac) as u64);
        // serialize/deserialize across the pause, as the CLI does
        let blob = serde_json::to_vec(&paused).unwrap();
        let mut resumed: RunningScan = serde_json::from_slice(&blob).unwrap();
        resumed.run();
        prop_assert_eq!(resumed.into_table().unwrap(), direct.into_table().unwrap());
    }

    /// Races are anti-symmetric in (a, b).
    #[test]
    fn race_antisymmetry(x in 1u64..20_000, d in 2u64..=20, a in 0u64..20, b in 0u64..20) {
        let (a, b) = (a % d, b % d);
        prop_assert_eq!(race(x, d, a, b).unwrap(), -race(x, d, b, a).unwrap());
    }

    /// prime_floor is monotone, bounded by n, and idempotent.
    #[test]
    fn prime_floor_shape(n in 2u64..200_000) {
        let p = prime_floor(n);
        prop_assert!(p <= n);
        prop_assert_eq!(prime_floor(p), p);
        prop_assert!(prime_floor(n + 1) >= p);
    }

    /// Bias vectors are anti-symmetric and sum to zero for any valid
    /// (d, Q) with d | Q, squarefree scaffold Q = d * extra primes.
    #[test]
    fn bias_vector_symmetries(d in 2u64..=12, extra in proptest::sample::subsequence(vec![7u64, 11, 13, 17], 0..=3)) {
        let mut q = FactoredModulus::from_u64(d).unwrap();
        for p in extra {
            q = q.lcm_with(p).unwrap();
        }
        let v = bias::bias_vector_auto(&q, d).unwrap();
        let mut sum = BigRational::zero();
        for (&a, r) in &v.entries {
            prop_assert_eq!(&(-r.clone()), v.entry((d - a) % d).unwrap());
            sum += r;
        }
        prop_assert_eq!(sum, BigRational::zero());
    }

    /// The recursion agrees with brute force wherever brute force is
    /// feasible, for arbitrary small moduli.
    #[test]
    fn recursion_agrees_with_brute_force(d in 2u64..=10, p in proptest::sample::select(vec![7u64, 11, 13])) {
        let q = FactoredModulus::from_u64(d).unwrap().lcm_with(p).unwrap();
        if q.value == d.into() {
            return Ok(()); // p | d: no recursion step to take
        }
        let v = bias::BiasVector::recursion(&q, d).unwrap();
        for a in (1..d).filter(|&a| gcd(a, d) == 1) {
            prop_assert_eq!(v.entry(a).unwrap(), &r_bias_brute(&q, d, a).unwrap());
        }
    }
}

#!/usr/bin/env python3
"""Smoke test for the prime_running_py extension module.

Build the module first:

    cargo build -p prime-running-py --release

then run this script from anywhere; it locates the cdylib under target/
and imports it in place.
"""

import importlib.util
import math
import pathlib
import sys

REPO = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    for profile in ("release", "debug"):
        so = REPO / "target" / profile / "libprime_running_py.so"
        if so.exists():
            spec = importlib.util.spec_from_file_location("prime_running_py", so)
            mod = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(mod)
            return mod
    sys.exit("libprime_running_py.so not found; run: cargo build -p prime-running-py --release")


def main():
    pr = load_module()

    # prime floor and counting
    assert pr.prime_floor(1) == 0
    assert pr.prime_floor(10) == 7
    assert pr.prime_count(100) == 25
    assert pr.pi_ap(100, 4, 1) == 11

    # running table: conservation and known small values
    t = pr.running_table(100, 3, [10, 100])
    assert t.checkpoints == [10, 100]
    assert t.row(0) == [3, 4, 3]
    assert t.row(1) == [3, 50, 47]
    assert sum(t.row(1)) == 100
    assert pr.race(100, 3, 1, 2) == 3

    # rescaled bias has the expected sign split mod 3
    assert pr.rescaled_bias(10**6, 3, 1) > 0 > pr.rescaled_bias(10**6, 3, 2)

    # lattice paths: walk vs run, identity with pi differences
    walk = pr.walk_path(10)
    assert walk.final_position() == (-2, 1)
    run = pr.run_path(10**4, stride=10**4)
    x, y = run.final_position()
    assert x == pr.running_table(10**4, 5, [10**4]).row(0)[4] - pr.running_table(10**4, 5, [10**4]).row(0)[2]
    assert run.max_abs >= max(abs(x), abs(y))
    custom = pr.walk_path(100, d=3, map=[(1, (0, 1)), (2, (0, -1))])
    assert custom.final_position()[0] == 0

    # exact bias constants
    v = pr.bias_vector(3, "6")
    assert v.rational(1) == "1/4" and v.rational(2) == "-1/4"
    v210 = pr.bias_vector(3, "10#", method="recursion")
    assert v210.rational(1) == "35/192"
    assert v210.decimal(1) == "0.1823"
    assert pr.bias_vector(3, "210", method="brute").rational(1) == "35/192"
    big = pr.primorial_bias_table(5, 100)
    assert abs(big.value(2) + 0.202705) < 1e-6
    assert big.classes() == [1, 2, 3, 4]
    rat, val = pr.q_t_product(3, 1, 7)
    assert rat == "-7/48" and abs(val + 7 / 48) < 1e-12

    # random model: determinism, conservation of gaps, expectation modes
    primes_a, overshoot_a = pr.sample_sequence(10**4, 6, seed=1)
    primes_b, _ = pr.sample_sequence(10**4, 6, seed=1)
    assert primes_a == primes_b and all(math.gcd(p, 6) == 1 for p in primes_a)
    assert overshoot_a is None or overshoot_a > 10**4
    assert pr.phi_tilde(10**4, 6, 3, 1, seed=1) == pr.phi_tilde(10**4, 6, 3, 1, seed=1)
    series = pr.expected_phi_tilde(10**5, 6, 3, 1)
    asym = pr.expected_phi_tilde(10**5, 6, 3, 1, mode="asymptotic")
    assert abs(series - asym) <= 10 * 10**5 / math.log(10**5) ** 2
    stats = pr.monte_carlo(10**4, 6, 3, 1, trials=50, seed=42)
    assert stats["n_trials"] == 50 and len(stats["values"]) == 50
    se = math.sqrt(stats["variance"] / 50)
    assert abs(stats["mean"] - pr.expected_phi_tilde(10**4, 6, 3, 1)) <= 5 * se

    # error mapping
    for bad in (lambda: pr.running_table(10, 1, [10]),
                lambda: pr.bias_vector(3, "10", method="brute"),
                lambda: pr.expected_phi_tilde(100, 6, 3, 0)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()

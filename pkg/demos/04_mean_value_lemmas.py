#!/usr/bin/env python3
"""The Dirichlet-polynomial mean-value toolbox.

Walks through the mean-square check, the coprime factorization of mean
values, high moments of prime sums, the truncated-exponential remainder,
and the three-line convexity inequality.
"""

import numpy as np

from critlab import (
    coprime_factorization_check,
    gabriel_check,
    high_moment_check,
    mv_check,
    truncation_ratio,
    truncation_remainder,
    windowed_integrals,
)
from critlab.lfunc import zeta_id
from critlab.primes import sieve_primes
from critlab.satake import zeta_spec


def main():
    print("== mean square vs coefficient mass ==")
    rep = mv_check(np.ones(10), 1e6)
    print(f"N=10, T=1e6:  mean {rep['mean']:.6f} vs {rep['target']:.1f}, deviation {rep['relative_deviation']:.2e}")

    print("\n== coprime factors multiply in the mean ==")
    rep = coprime_factorization_check(
        [(np.array([1, 2, 4]), np.array([1.0, 0.5, 0.25])),
         (np.array([1, 3, 9]), np.array([1.0, -0.5, 0.25]))], 1e6)
    print(f"joint/product ratio - 1 = {rep['ratio'] - 1:+.2e}  (bound {rep['bound']:.1e})")

    print("\n== high moments of a prime sum ==")
    primes = sieve_primes(51).primes
    for ell in (1, 2, 3):
        rep = high_moment_check(primes, np.ones(len(primes)), ell, 1e6)
        print(f"l={ell}: moment / (T l! mass^l) = {rep['ratio']:.3f}")

    print("\n== truncated exponential remainder ==")
    for D, V in ((1.0 + 0.5j, 2.0), (3.0 - 1.0j, 4.0), (6.0 + 0j, 8.0)):
        rem = truncation_remainder(D, V)
        print(f"|D|={abs(D):.2f}, V={V}: ratio={truncation_ratio(D, V):.12f}, "
              f"remainder {rem:+.2e} vs 2e^-9V = {2 * np.exp(-9 * V):.2e}")

    print("\n== windowed line integrals at sigma = 5/4 ==")
    rep = windowed_integrals(1.25, 500.0, 50, [1.0], [zeta_id()], [zeta_spec()])
    print(f"H = {rep['H']:.3f}, K = {rep['K']:.3e}, J = {rep['J']:.3f}")
    print(f"H / (sqrt(pi) T mass) = {rep['H_over_mass']:.4f}  (mean-value heuristic ~ 1)")

    print("\n== three-line convexity ==")
    rep = gabriel_check(50, [1.0], [zeta_id()], [zeta_spec()], 1.05, 1.25, 1.45, 100.0)
    print(f"line integrals ratio LHS/RHS = {rep['ratio']:.6f}  (<= 1)")


if __name__ == "__main__":
    main()

"""Multiplicative coefficient machinery for products of Euler factors.

Central object: the coefficients of prod_i L(s, pi_i)^{k_i} as a Dirichlet
series, built from the generalized divisor numbers

    d_k(p^l) = k(k+1)...(k+l-1) / l!

convolved against local roots at prime-power level and extended
multiplicatively to all n <= N with a sieve-style fill.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, fsum, log

import numpy as np

from .errors import DataError, DomainError
from .primes import sieve_primes

EULER_GAMMA = 0.5772156649015328606


def divisor_coeff(k, ell):
    """Generalized divisor number d_k(p^l) via the rising product.

    Computed as prod_{i<l} (k+i)/(i+1) so it stays finite for l in the
    hundreds, where the Gamma-ratio form overflows.

    Args:
        k: Real > 0.
        ell: Integer >= 0.
    """
    if k <= 0:
        raise DomainError(f"divisor_coeff needs k > 0, got {k}")
    if ell < 0:
        raise DomainError(f"divisor_coeff needs l >= 0, got {ell}")
    out = 1.0
    for i in range(int(ell)):
        out *= (k + i) / (i + 1)
    return out


def h_coeff(k, spec, p, ell):
    """Local coefficient of L(s,pi)^k at p^l.

    Sum over compositions l_1 + ... + l_m = l of
    prod_j d_k(p^{l_j}) alpha(j,p)^{l_j}; evaluated as the degree-l
    coefficient of the product of the m per-root power series.
    """
    if ell < 0:
        raise DomainError(f"h_coeff needs l >= 0, got {ell}")
    ell = int(ell)
    if ell == 0:
        return 1.0 + 0j
    alphas = spec.alpha(p)
    dk = np.array([divisor_coeff(k, j) for j in range(ell + 1)])
    poly = np.ones(1, dtype=np.complex128)
    for al in alphas:
        local = dk * al ** np.arange(ell + 1)
        poly = np.convolve(poly, local)[: ell + 1]
    return complex(poly[ell])


def local_bigh(ks, specs, p, ell_max):
    """Coefficients of prod_i L(s,pi_i)^{k_i} at p^0..p^ell_max."""
    poly = np.ones(1, dtype=np.complex128)
    for k, spec in zip(ks, specs):
        hk = np.array([h_coeff(k, spec, p, j) for j in range(ell_max + 1)])
        poly = np.convolve(poly, hk)[: ell_max + 1]
    if len(poly) < ell_max + 1:
        poly = np.pad(poly, (0, ell_max + 1 - len(poly)))
    return poly


@dataclass
class MultiplicativeSeries:
    """Coefficients of a multiplicative function on n = 0..N.

    coeff[0] is unused (kept 0); coeff[1] = 1 by multiplicativity.
    """

    N: int
    coeff: np.ndarray
    rule: object = None  # (p, l) -> complex, kept for spot checks

    def __getitem__(self, n):
        return self.coeff[n]

    @property
    def is_real(self):
        return not np.iscomplexobj(self.coeff)


def multiplicative_fill(N, prime_power_rule, primetable=None, dtype=np.complex128, prime_values=None):
    """Extend a prime-power rule multiplicatively to all n <= N.

    Sieve-style fill: process primes p <= sqrt(N) with all their powers
    (reads are snapshotted, so each prime's local factor is applied to the
    p-free part only), then scatter the single-power contribution of
    primes > sqrt(N) in batches.

    Args:
        N: Inclusive bound.
        prime_power_rule: Callable (p, l) -> coefficient, l >= 1.
        primetable: Optional PrimeTable covering N.
        dtype: np.float64 when the rule is known real, else complex128.
        prime_values: Optional vectorized callable primes -> rule(p, 1)
            array, used for the (many) primes above sqrt(N).

    Returns:
        MultiplicativeSeries with coeff array of length N+1.
    """
    if N < 1:
        raise DomainError(f"multiplicative_fill needs N >= 1, got {N}")
    N = int(N)
    pt = primetable if primetable is not None and primetable.limit > N else sieve_primes(N + 1)
    out = np.zeros(N + 1, dtype=dtype)
    out[1] = 1
    root = int(N**0.5)
    small = pt.primes_leq(root)
    for p in small:
        p = int(p)
        head = out[1 : N // p + 1].copy()
        pl = p
        ell = 1
        while pl <= N:
            c = prime_power_rule(p, ell)
            if c != 0:
                out[pl :: pl][: N // pl] += c * head[: N // pl]
            pl *= p
            ell += 1
    large = pt.primes_leq(N)
    large = large[large > root]
    if len(large):
        if prime_values is not None:
            cvals = np.asarray(prime_values(large), dtype=dtype)
        else:
            cvals = np.asarray([prime_power_rule(int(p), 1) for p in large], dtype=dtype)
        for j in range(1, N // int(large[0]) + 1):
            cut = np.searchsorted(large, N // j, side="right")
            if cut == 0:
                break
            idx = large[:cut] * j
            out[idx] += out[j] * cvals[:cut]
    return MultiplicativeSeries(N=N, coeff=out, rule=prime_power_rule)


def bigh_series(ks, specs, N, primetable=None):
    """The coefficient array of prod_i L(s,pi_i)^{k_i} for n <= N.

    Args:
        ks: Sequence of real exponents k_i > 0.
        specs: Matching sequence of SatakeSpec.
        N: Inclusive coefficient bound.

    Returns:
        MultiplicativeSeries (real dtype when every spec is real).
    """
    ks = list(ks)
    specs = list(specs)
    if len(ks) != len(specs):
        raise DomainError(f"got {len(ks)} exponents but {len(specs)} coefficient systems")
    if any(k <= 0 for k in ks):
        raise DomainError("exponents must be positive")
    real = all(s.is_real for s in specs)

    cache = {}

    def rule(p, ell):
        key = (p, ell)
        if key not in cache:
            loc = local_bigh(ks, specs, p, ell)
            for j in range(1, ell + 1):
                cache[(p, j)] = loc[j].real if real else loc[j]
        return cache[key]

    def prime_values(primes):
        # h(p) = sum_i k_i a_i(p), vectorized over the large primes
        acc = np.zeros(len(primes), dtype=np.complex128)
        for k, spec in zip(ks, specs):
            acc += k * spec.alpha_sum_at_primes(primes)
        return acc.real if real else acc

    dtype = np.float64 if real else np.complex128
    series = multiplicative_fill(
        N, rule, primetable=primetable, dtype=dtype, prime_values=prime_values
    )
    return series


def selberg_sum(spec1, spec2, x, primetable=None):
    """Prime correlation sum of two coefficient systems up to x.

    Computes sum_{p <= x} a_pi(p) conj(a_pi'(p)) / p.  When the two specs
    are equal, the residual after subtracting loglog x is reported (the
    Mertens-normalized constant is measured, never asserted).

    Args:
        spec1, spec2: SatakeSpec with data for all p <= x.
        x: Real >= 3.

    Returns:
        dict with keys sum, loglog_x, residual, is_diagonal.
    """
    if x < 3:
        raise DomainError(f"selberg_sum needs x >= 3, got {x}")
    for spec in (spec1, spec2):
        if not spec.has_data_below(x):
            raise DataError(f"{spec.label}: local data missing below {x}")
    pt = primetable if primetable is not None and primetable.limit > x else sieve_primes(int(x) + 1)
    primes = pt.primes_leq(int(x))
    a1 = spec1.alpha_sum_at_primes(primes)
    a2 = spec2.alpha_sum_at_primes(primes)
    total = complex(np.sum(a1 * np.conj(a2) / primes))
    diag = spec1 == spec2
    ll = log(log(x))
    return {
        "sum": total,
        "loglog_x": ll,
        "residual": (total - ll) if diag else total,
        "is_diagonal": diag,
    }


def exp_integral_E1(x):
    """The exponential integral int_x^inf e^-t / t dt, x > 0.

    Series -gamma - log x - sum_k (-x)^k/(k! k) up to x = 5 (summed in
    exact rational arithmetic so cancellation costs nothing), modified
    Lentz continued fraction beyond.  Relative accuracy ~1e-12 on both
    branches at the switchover.
    """
    if x <= 0:
        raise DomainError(f"E1 needs x > 0, got {x}")
    if x <= 5.0:
        xf = Fraction(x)
        total = Fraction(0)
        term = Fraction(1)
        for k in range(1, 60):
            term *= -xf
            total += term / (factorial(k) * k)
            if k > 2 * x + 8 and abs(term) < Fraction(1, 10**25):
                break
        return fsum([-EULER_GAMMA, -log(x), -float(total)])
    # E1(x) = e^-x / (x+1 - 1/(x+3 - 4/(x+5 - 9/(x+7 - ...)))), modified Lentz
    tiny = 1e-300
    f = tiny
    C = f
    D = 0.0
    for n in range(1, 300):
        a = 1.0 if n == 1 else -((n - 1.0) ** 2)
        b = x + 2 * n - 1
        D = b + a * D
        if D == 0:
            D = tiny
        C = b + a / C
        if C == 0:
            C = tiny
        D = 1.0 / D
        delta = C * D
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return float(np.exp(-x) * f)


def partial_sum_sq(ks, specs, N, sigma, series=None, primetable=None):
    """Coefficient mass sum_{n<=N} |h(n)|^2 / n^{2 sigma} with references.

    Returns the exact finite sum plus companion ratios against the two
    natural growth references (sigma-1/2)^{-sum k^2} (for sigma > 1/2)
    and (log N)^{sum k^2}.

    Args:
        ks, specs: As in bigh_series.
        N: Coefficient bound.
        sigma: Real >= 1/2.
        series: Optional precomputed bigh_series(ks, specs, N).

    Returns:
        dict with keys value, k_sq, ref_sigma, ref_logN,
        ratio_sigma, ratio_logN.
    """
    if sigma < 0.5:
        raise DomainError(f"partial_sum_sq needs sigma >= 1/2, got {sigma}")
    if series is None:
        series = bigh_series(ks, specs, N, primetable=primetable)
    n = np.arange(1, N + 1, dtype=np.float64)
    h = series.coeff[1 : N + 1]
    mass = np.abs(h) ** 2 if np.iscomplexobj(h) else h * h
    value = float(np.sum(mass * n ** (-2.0 * sigma)))
    ksq = float(sum(k * k for k in ks))
    ref_logN = log(N) ** ksq if N > 1 else 1.0
    out = {
        "value": value,
        "k_sq": ksq,
        "ref_logN": ref_logN,
        "ratio_logN": value / ref_logN,
    }
    if sigma > 0.5:
        ref_sigma = (sigma - 0.5) ** (-ksq)
        out["ref_sigma"] = ref_sigma
        out["ratio_sigma"] = value / ref_sigma
    return out


def euler_product_value(ks, specs, s, P, primetable=None):
    """prod_{p<=P} prod_j (1 - alpha(j,p)/p^s)^{-k}, principal branches."""
    pt = primetable if primetable is not None and primetable.limit > P else sieve_primes(int(P) + 1)
    total = 0j
    for p in pt.primes_leq(int(P)):
        p = int(p)
        for k, spec in zip(ks, specs):
            for al in spec.alpha(p):
                total += -k * np.log1p(-al * p ** (-s))
    return complex(np.exp(total))

"""Dirichlet polynomials, windowed integrals, and the mean-value lemma
checks (Montgomery-Vaughan, coprime factorization, high moments, and the
line-integral convexity inequality).

Conventions shared by the checks:
  * every time integral is composite Simpson on a uniform grid whose step
    resolves the largest coefficient frequency present;
  * products of L-values with non-integer exponents are only formed to
    the right of Re s = 1, where a single-valued branch of each log L is
    anchored by the absolutely convergent prime sum and continued along
    the integration line (integer exponents work on any line via plain
    powers of the value).
"""

import numpy as np
from scipy.special import erf

from math import gcd, log, pi

from .coeffs import bigh_series
from .errors import DomainError
from .grid import _em_uniform_complex, grid_count, uniform_complex
from .kernels import geom_sums, geom_sums_powers
from .lfunc import eval_id
from .characters import character_group
from .moments import integral_with_error, simpson_uniform

GAUSS_HALF_WIDTH = 8.0  # window support is [T - 8, 2T + 8]


def window_w(ts, T):
    """w(t, T) = int_T^{2T} exp(-(t-tau)^2) dtau, by error functions."""
    ts = np.asarray(ts, dtype=np.float64)
    return 0.5 * np.sqrt(pi) * (erf(2.0 * T - ts) - erf(T - ts))


def dirichlet_poly_values(ns, coeffs, sigma, t0, delta, count):
    """sum_n c_n n^{-sigma - it} on a uniform t-grid (exact finite sum)."""
    ns = np.asarray(ns, dtype=np.float64)
    ln = np.log(ns)
    base = np.asarray(coeffs, dtype=np.complex128) * ns ** (-sigma)
    c0 = base * np.exp(-1j * t0 * ln)
    ratio = np.exp(-1j * delta * ln)
    return geom_sums(c0, ratio, count)


def dirichlet_poly_SN(ks, specs, N, s, series=None):
    """S_N(s) = sum_{n<=N} h(n) n^{-s}, the truncated coefficient sum.

    Returns (S_N, series); pass the series back in to avoid rebuilds.
    """
    if series is None or series.N < N:
        series = bigh_series(ks, specs, N)
    n = np.arange(1, N + 1, dtype=np.float64)
    val = complex(np.sum(series.coeff[1 : N + 1] * n ** (-s)))
    return val, series


def g_N_tail(ks, ids, specs, N, s, series=None):
    """g_N(s) = prod_j L(s,pi_j)^{k_j} - S_N(s) for Re s > 1.

    Integer exponents use plain powers of the evaluated values; real
    exponents use the prime-sum branch of log L (absolutely convergent
    right of 1, cutoff chosen for ~1e-9 tails at Re s >= 1.25).
    """
    s = complex(s)
    if s.real <= 1.0:
        raise DomainError("g_N is formed on Re s > 1 only")
    sn, series = dirichlet_poly_SN(ks, specs, N, s, series=series)
    prod = 1.0 + 0j
    allint = all(abs(k - round(k)) < 1e-12 for k in ks)
    if allint:
        for k, lid in zip(ks, ids):
            prod *= eval_id(lid, s) ** int(round(k))
    else:
        logs = log_product_on_line(ks, ids, s.real, s.imag, 1.0, 1)
        prod = np.exp(logs[0])
    return prod - sn, series


def _log_l_primesum(lid, s, P=200000):
    """Branch-defining log L(s) = sum_p sum_j sum_l alpha^l/(l p^{ls}),
    absolutely convergent for Re s > 1 (use Re s >= 2 for full accuracy)."""
    from .primes import sieve_primes
    from .satake import satake_from_character
    from .characters import character_group

    if lid.kind == "zeta":
        chi = character_group(1)[0]
    elif lid.kind == "dirichlet":
        chi = character_group(lid.q)[lid.index]
    else:
        raise DomainError(f"no Euler product branch for id kind {lid.kind!r}")
    spec = satake_from_character(chi)
    pt = sieve_primes(P)
    total = 0j
    primes = pt.primes
    a1 = spec.alpha_sum_at_primes(primes)
    for ell in range(1, 40):
        al = a1 if ell == 1 else spec.alpha_sum_at_primes(primes, power=ell)
        term = np.sum(al * primes ** (-ell * s)) / ell
        total += term
        if np.abs(term) < 1e-16:
            break
    return complex(total)


def log_product_on_line(ks, ids, sigma, t0, delta, count, anchor_sigma=2.5):
    """sum_j k_j log L_j(sigma + it) on a vertical segment, single branch.

    The branch is anchored at (anchor_sigma, t0) by the prime sum,
    continued horizontally to (sigma, t0), then vertically along the
    segment with phase unwrapping.  Valid for sigma > 1.
    """
    if sigma <= 1.0:
        raise DomainError("single-valued log products need sigma > 1")
    total = np.zeros(count, dtype=np.complex128)
    n_h = 24
    h_sig = np.linspace(anchor_sigma, sigma, n_h)
    for k, lid in zip(ks, ids):
        anchor = _log_l_primesum(lid, complex(anchor_sigma, t0))
        # horizontal continuation at t0
        h_vals = np.array([eval_id(lid, complex(sg, t0)) for sg in h_sig])
        h_arg = np.unwrap(np.angle(h_vals))
        h_arg += anchor.imag - h_arg[0]
        # vertical continuation from (sigma, t0), vectorized line values
        v_vals = _sigma_line_values(lid, sigma, t0, delta, count)
        v_arg = np.unwrap(np.angle(v_vals))
        v_arg += h_arg[-1] - v_arg[0]
        total += k * (np.log(np.abs(v_vals)) + 1j * v_arg)
    return total


def mv_check(coeffs, T, delta=None):
    """Mean square of sum a_n n^{-it} over [T, 2T] against sum |a_n|^2.

    Args:
        coeffs: Array a_1..a_N (index n = position + 1).
        T: Window start; requires N <= T.

    Returns:
        dict with mean, target, relative_deviation, quadrature_error.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    N = len(coeffs)
    if N > T:
        raise DomainError(f"mean-value check needs N <= T, got N={N}, T={T}")
    ns = np.arange(1, N + 1, dtype=np.float64)
    if delta is None:
        delta = min(0.05, pi / (4.0 * log(max(N, 2))))
    count = grid_count(T, 2.0 * T, delta)
    vals = dirichlet_poly_values(ns, coeffs, 0.0, T, delta, count)
    y = (vals * np.conj(vals)).real
    integral, qerr = integral_with_error(y, delta)
    mean = integral / T
    target = float(np.sum(np.abs(coeffs) ** 2))
    return {
        "mean": mean,
        "target": target,
        "relative_deviation": abs(mean - target) / target if target else 0.0,
        "quadrature_error": qerr / max(target, 1e-300),
        "N": N,
        "T": T,
    }


def coprime_factorization_check(polys, T, delta=None):
    """Mean of |prod_j D_j|^2 against the product of the means.

    Args:
        polys: List of (support, coeffs) pairs; supports must be pairwise
            coprime integer arrays.
        T: Window start; the full product length N must satisfy N <= T/10.

    Returns:
        dict with ratio, bound 5 N log N / T, per-factor means.
    """
    supports = [np.asarray(s, dtype=np.int64) for s, _ in polys]
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            for n in supports[i]:
                for m in supports[j]:
                    if gcd(int(n), int(m)) != 1:
                        raise DomainError(
                            f"supports not coprime: gcd({n}, {m}) > 1 across factors"
                        )
    N = int(np.prod([int(s.max()) for s in supports]))
    if N > T / 10.0:
        raise DomainError(f"product length {N} exceeds T/10 = {T/10:.0f}")
    if delta is None:
        delta = min(0.05, pi / (4.0 * log(max(N, 2))))
    count = grid_count(T, 2.0 * T, delta)
    prod_vals = np.ones(count, dtype=np.complex128)
    means = []
    for support, coeffs in polys:
        vals = dirichlet_poly_values(support, coeffs, 0.0, T, delta, count)
        prod_vals *= vals
        means.append(simpson_uniform((vals * np.conj(vals)).real, delta) / T)
    joint = simpson_uniform((prod_vals * np.conj(prod_vals)).real, delta) / T
    ratio = joint / float(np.prod(means))
    return {
        "ratio": ratio,
        "bound": 5.0 * N * log(max(N, 2)) / T,
        "factor_means": means,
        "joint_mean": joint,
        "N": N,
    }


def high_moment_check(primes, avals, ell, T, delta=None):
    """2l-th moment of a prime-supported polynomial at sigma = 1/2.

    LHS = int_T^{2T} |sum_{p<=N} a(p) p^{-1/2-it}|^{2l} dt; reports
    LHS / (T l! (sum |a(p)|^2/p)^l).

    Args:
        primes: Prime support array (max entry N with N^l <= T).
        avals: Coefficients a(p).
        ell: Positive integer moment order.
    """
    primes = np.asarray(primes, dtype=np.float64)
    avals = np.asarray(avals, dtype=np.complex128)
    N = float(primes.max()) if len(primes) else 0.0
    if N**ell > T:
        raise DomainError(f"high-moment check needs N^l <= T ({N}^{ell} > {T})")
    if not len(primes) or not np.any(avals != 0):
        return {"lhs": 0.0, "reference": 0.0, "ratio": 0.0, "N": N}
    if delta is None:
        delta = min(0.05, pi / (4.0 * ell * log(max(N, 2))))
    count = grid_count(T, 2.0 * T, delta)
    ln = np.log(primes)
    base = avals * primes ** (-0.5)
    c0 = base * np.exp(-1j * T * ln)
    ratio_ph = np.exp(-1j * delta * ln)
    y = geom_sums_powers(c0, ratio_ph, count, ell)
    lhs = simpson_uniform(y, delta)
    from math import factorial

    ref = T * factorial(ell) * float(np.sum(np.abs(avals) ** 2 / primes)) ** ell
    return {"lhs": lhs, "reference": ref, "ratio": lhs / ref, "N": N, "ell": ell}


def windowed_integrals(sigma, T, N, ks, ids, specs, delta=None, series=None):
    """The three windowed line integrals of the truncation analysis.

    H = int |S_N(sigma+it)|^2 w(t,T) dt
    J = int prod_j |L_j(1/2+it)|^{2 k_j} w(t,T) dt
    K = int |P(sigma+it) - S_N(sigma+it)|^2 w(t,T) dt,
        P = prod_j L_j^{k_j}

    K with non-integer exponents requires sigma > 1 (see module note).

    Returns:
        dict with H, K, J, their error estimates, the coefficient-mass
        reference for H, and the K(1/2,T)-vs-T regime fields.
    """
    if not (0.5 <= sigma <= 1.5):
        raise DomainError(f"sigma must lie in [1/2, 3/2], got {sigma}")
    allint = all(abs(k - round(k)) < 1e-12 for k in ks)
    if not allint and sigma <= 1.0:
        raise DomainError("non-integer exponents need sigma > 1 for the K integral")
    if series is None or series.N < N:
        series = bigh_series(ks, specs, N)
    if delta is None:
        delta = min(0.02, pi / (4.0 * log(max(N, T, 3))))
    t0 = max(1.0, T - GAUSS_HALF_WIDTH)
    t1 = 2.0 * T + GAUSS_HALF_WIDTH
    count = grid_count(t0, t1, delta)
    ts = t0 + delta * np.arange(count)
    w = window_w(ts, T)

    ns = np.arange(1, N + 1, dtype=np.float64)
    sn = dirichlet_poly_values(ns, series.coeff[1 : N + 1], sigma, t0, delta, count)
    H, H_err = integral_with_error((sn * np.conj(sn)).real * w, delta)

    # J on the half line, independent of sigma
    logabs = np.zeros(count)
    half_vals = {}
    for k, lid in zip(ks, ids):
        v, _ = uniform_complex(lid, t0, delta, count)
        half_vals[lid.key()] = v
        logabs += 2.0 * k * np.log(np.maximum(np.abs(v), 1e-320))
    J, J_err = integral_with_error(np.exp(logabs) * w, delta)

    # K: product values on the sigma-line
    if allint:
        prod = np.ones(count, dtype=np.complex128)
        for k, lid in zip(ks, ids):
            if sigma == 0.5:
                v = half_vals[lid.key()]
            else:
                v = _sigma_line_values(lid, sigma, t0, delta, count)
            prod *= v ** int(round(k))
    else:
        prod = np.exp(log_product_on_line(ks, ids, sigma, t0, delta, count))
    gn = prod - sn
    K, K_err = integral_with_error((gn * np.conj(gn)).real * w, delta)

    mass = float(np.sum(np.abs(series.coeff[1 : N + 1]) ** 2 * ns ** (-2.0 * sigma)))
    return {
        "sigma": sigma,
        "T": T,
        "N": N,
        "H": H,
        "K": K,
        "J": J,
        "H_err": H_err,
        "K_err": K_err,
        "J_err": J_err,
        "coeff_mass": mass,
        "H_over_mass": H / (np.sqrt(pi) * T * mass) if mass else np.inf,
        "K_half_vs_T": {"K": K, "T": T, "regime": "K<T" if K < T else "K>=T"},
    }


def _sigma_line_values(lid, sigma, t0, delta, count):
    """Complex L(sigma + it) on a uniform grid, Euler-Maclaurin path."""
    if lid.kind == "zeta":
        return _em_uniform_complex(1.0, t0, delta, count, sigma=sigma)
    if lid.kind == "hurwitz":
        return _em_uniform_complex(lid.a / lid.q, t0, delta, count, sigma=sigma)
    if lid.kind == "dirichlet":
        chi = character_group(lid.q)[lid.index]
        q = lid.q
        acc = np.zeros(count, dtype=np.complex128)
        for a in range(1, q + 1):
            if gcd(a, q) != 1:
                continue
            acc += chi(a) * _em_uniform_complex(a / q, t0, delta, count, sigma=sigma)
        ts = t0 + delta * np.arange(count)
        return q ** -(sigma + 1j * ts) * acc
    raise DomainError(f"no sigma-line path for id kind {lid.kind!r}")


def gabriel_check(N, ks, ids, specs, alpha, gamma, beta, tau, delta=0.02, series=None):
    """Line-integral convexity check for f(z) = g_N(z) exp((z - i tau)^2 / 2).

    Evaluates int |f|^2 on the three vertical lines Re z = alpha, gamma,
    beta (alpha <= gamma <= beta, all inside (1, 3/2]) and reports
    LHS / (A^{(beta-gamma)/(beta-alpha)} B^{(gamma-alpha)/(beta-alpha)}).
    """
    if not (alpha <= gamma <= beta):
        raise DomainError(f"need alpha <= gamma <= beta, got {alpha}, {gamma}, {beta}")
    if alpha < 1.0 + 1e-3 - 1e-12 or beta > 1.5 + 1e-12:
        raise DomainError("lines must lie in the computable strip [1.001, 1.5]")
    if series is None or series.N < N:
        series = bigh_series(ks, specs, N)
    half_width = 8.5
    t0 = tau - half_width
    count = grid_count(t0, tau + half_width, delta)
    ts = t0 + delta * np.arange(count)
    gauss = np.exp(-((ts - tau) ** 2))  # |e^{(z-i tau)^2/2}|^2 = e^{sig^2-(t-tau)^2}
    ns = np.arange(1, N + 1, dtype=np.float64)

    def line_integral(sig):
        logs = log_product_on_line(ks, ids, sig, t0, delta, count)
        prod = np.exp(logs)
        sn = dirichlet_poly_values(ns, series.coeff[1 : N + 1], sig, t0, delta, count)
        gn = prod - sn
        y = (gn * np.conj(gn)).real * np.exp(sig * sig) * gauss
        return simpson_uniform(y, delta)

    lhs = line_integral(gamma)
    A = line_integral(alpha) if gamma != alpha else lhs
    B = line_integral(beta) if gamma != beta else lhs
    ea = (beta - gamma) / (beta - alpha) if beta > alpha else 1.0
    eb = (gamma - alpha) / (beta - alpha) if beta > alpha else 0.0
    rhs = A**ea * B**eb
    return {
        "lhs": lhs,
        "rhs": rhs,
        "ratio": lhs / rhs if rhs > 0 else np.inf,
        "lines": (alpha, gamma, beta),
        "tau": tau,
    }

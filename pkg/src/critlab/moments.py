"""Moment quadrature on critical-line grids, scaling-law fits, and the
twisted moment of the Hurwitz zeta function.

Quadrature is composite Simpson on the cached uniform log-grid with step
delta = min(0.02, pi/(2 log T)) by default, so each zero spacing is
sampled an order of magnitude more finely than it oscillates; the hard
invariant delta <= pi/log T is enforced at construction.  Error estimates
come from step halving.
"""

import time
from dataclasses import dataclass
from math import gcd, log, pi

import numpy as np

from .errors import DomainError, FitError
from .grid import grid_count, log_abs_grid, uniform_complex
from .lfunc import hurwitz_id, zeta_id

DELTA_CAP = 0.02


def default_delta(T):
    """min(0.02, pi/(2 log T)): resolves |L| oscillation at height T."""
    return min(DELTA_CAP, pi / (2.0 * log(max(T, 3.0))))


def simpson_uniform(y, delta):
    """Composite Simpson on a uniform grid; trapezoid patch on a leftover
    interval when the point count is even."""
    n = len(y)
    if n < 2:
        return 0.0
    if n == 2:
        return 0.5 * delta * (y[0] + y[1])
    m = n if n % 2 == 1 else n - 1
    s = y[0] + y[m - 1] + 4.0 * np.sum(y[1:m:2]) + 2.0 * np.sum(y[2 : m - 1 : 2])
    out = s * delta / 3.0
    if m != n:
        out += 0.5 * delta * (y[-2] + y[-1])
    return float(out)


def integral_with_error(y, delta):
    """(Simpson integral, step-halving error estimate)."""
    fine = simpson_uniform(y, delta)
    coarse = simpson_uniform(y[::2], 2.0 * delta)
    return fine, abs(fine - coarse) / 15.0


@dataclass
class MomentSpec:
    """A joint-moment request: integrate prod_j |L_j(1/2+it)|^{2 k_j}.

    window "sharp" integrates over [1, T]; "gaussian" uses the smooth
    window w(t, T) concentrated on [T, 2T].
    """

    ids: list
    k: list
    T: float
    delta: float = None
    window: str = "sharp"

    def __post_init__(self):
        if len(self.ids) != len(self.k):
            raise DomainError(f"{len(self.ids)} ids vs {len(self.k)} exponents")
        if self.T < 10:
            raise DomainError(f"T must be >= 10, got {self.T}")
        if any(kk < 0 for kk in self.k):
            raise DomainError("exponents must be nonnegative")
        if self.window not in ("sharp", "gaussian"):
            raise DomainError(f"unknown window {self.window!r}")
        if self.delta is None:
            self.delta = default_delta(self.T)
        if self.delta > pi / log(max(self.T, 3.0)) + 1e-15:
            raise DomainError(
                f"delta = {self.delta} does not resolve oscillation at T = {self.T}"
            )


@dataclass
class MomentResult:
    value: float
    error_estimate: float
    clamped_fraction: float
    warning: str = None
    wall_ms: float = 0.0


def _gaussian_window(ts, T):
    from scipy.special import erf

    return 0.5 * np.sqrt(pi) * (erf(2 * T - ts) - erf(T - ts))


def joint_moment(spec, cache=None, workers=1):
    """Quadrature of the joint moment defined by a MomentSpec.

    Returns:
        MomentResult.  A reliability warning is attached when more than
        1% of the grid points hit the clamp floor.
    """
    t_start = time.perf_counter()
    if spec.window == "sharp":
        t0, t1 = 1.0, float(spec.T)
    else:
        t0, t1 = max(1.0, spec.T - 8.0), 2.0 * spec.T + 8.0
    grids = []
    for lid in spec.ids:
        if cache is not None:
            grids.append(cache.grid(lid, t0, t1, spec.delta))
        else:
            grids.append(log_abs_grid(lid, t0, t1, spec.delta, workers=workers))
    count = grids[0].n
    acc = np.zeros(count)
    clamped = np.zeros(count, dtype=bool)
    for kk, g in zip(spec.k, grids):
        acc += 2.0 * kk * g.values
        clamped |= g.clamped
    integrand = np.exp(acc)
    if spec.window == "gaussian":
        integrand *= _gaussian_window(grids[0].ts, spec.T)
    value, err = integral_with_error(integrand, spec.delta)
    frac = float(np.mean(clamped))
    warning = None
    if frac > 0.01:
        warning = f"clamped fraction {frac:.3%} exceeds 1%; moment may be unreliable"
    return MomentResult(
        value=value,
        error_estimate=err,
        clamped_fraction=frac,
        warning=warning,
        wall_ms=1e3 * (time.perf_counter() - t_start),
    )


def moment_series(ids, ks, T_list, delta=None, cache=None, workers=1):
    """Sharp-window moments at several T off one shared grid.

    Builds the [1, max T] grid per id once (delta from the largest T) and
    integrates prefixes, so a T-sweep costs one evaluation pass.

    Returns:
        List of record dicts, one per T, in ascending T order:
        {ids, k, T, value, error, clamped_fraction, wall_ms}.
    """
    T_list = sorted(float(T) for T in T_list)
    t_max = T_list[-1]
    if delta is None:
        delta = default_delta(t_max)
    grids = []
    for lid in ids:
        if cache is not None:
            grids.append(cache.grid(lid, 1.0, t_max, delta))
        else:
            grids.append(log_abs_grid(lid, 1.0, t_max, delta, workers=workers))
    acc = np.zeros(grids[0].n)
    clamped = np.zeros(grids[0].n, dtype=bool)
    for kk, g in zip(ks, grids):
        acc += 2.0 * kk * g.values
        clamped |= g.clamped
    integrand = np.exp(acc)
    records = []
    for T in T_list:
        t_rec = time.perf_counter()
        cut = grid_count(1.0, T, delta)
        value, err = integral_with_error(integrand[:cut], delta)
        records.append(
            {
                "ids": [lid.key() for lid in ids],
                "k": list(map(float, ks)),
                "T": T,
                "value": value,
                "error": err,
                "clamped_fraction": float(np.mean(clamped[:cut])),
                "wall_ms": 1e3 * (time.perf_counter() - t_rec),
            }
        )
    return records


@dataclass
class FitResult:
    exponent: float
    intercept: float
    residual_norm: float
    T_range: tuple


def scaling_fit(points):
    """Least-squares slope of log(I/T) against loglog T.

    Args:
        points: Sequence of (T, I) with >= 3 entries spanning >= 2 decades.

    Returns:
        FitResult whose exponent estimates the (log T)-power of I/T.
    """
    pts = [(float(T), float(I)) for T, I in points]
    if len(pts) < 3:
        raise FitError(f"need >= 3 points, got {len(pts)}")
    Ts = np.array([p[0] for p in pts])
    Is = np.array([p[1] for p in pts])
    if Ts.max() / Ts.min() < 100.0:
        raise FitError("T values must span at least two decades")
    if np.any(Is <= 0):
        raise FitError("moment values must be positive")
    x = np.log(np.log(Ts))
    y = np.log(Is / Ts)
    if np.ptp(x) < 1e-12:
        raise FitError("degenerate abscissas")
    A = np.vstack([x, np.ones_like(x)]).T
    sol, res, _, _ = np.linalg.lstsq(A, y, rcond=None)
    slope, intercept = float(sol[0]), float(sol[1])
    resid = float(np.sqrt(np.sum((y - A @ sol) ** 2)))
    return FitResult(
        exponent=slope,
        intercept=intercept,
        residual_norm=resid,
        T_range=(float(Ts.min()), float(Ts.max())),
    )


def twisted_hurwitz_moment(a, q, k, T, delta=None, workers=1, chunk=1 << 18):
    """The twisted moment int_1^T q^{-it} zeta(1/2+it, a/q)
    conj(zeta(1/2+it)) |zeta(1/2+it)|^{2(k-1)} dt.

    Args:
        a, q: gcd(a, q) = 1.
        k: Real exponent >= 1/2.
        T: Upper endpoint.

    Returns:
        dict with value (complex), comparison |value|/(T (log T)^{k^2}),
        and a step-halving error estimate on |value|.
    """
    if gcd(a, q) != 1:
        raise DomainError(f"need gcd(a, q) = 1, got {a}, {q}")
    if k < 0.5:
        raise DomainError(f"twisted moment needs k >= 1/2, got {k}")
    if delta is None:
        delta = default_delta(T)
    count = grid_count(1.0, T, delta)
    hid = hurwitz_id(a, q) if q > 1 else zeta_id()
    integrand = np.empty(count, dtype=np.complex128)
    lnq = log(q)
    for start in range(0, count, chunk):
        end = min(start + chunk, count)
        t0 = 1.0 + delta * start
        n = end - start
        hz, _ = uniform_complex(hid, t0, delta, n)
        zv, _ = uniform_complex(zeta_id(), t0, delta, n)
        ts = t0 + delta * np.arange(n)
        az = np.abs(zv)
        w = az ** (2.0 * (k - 1.0)) if k != 1.0 else 1.0
        integrand[start:end] = np.exp(-1j * ts * lnq) * hz * np.conj(zv) * w
    fine_r = simpson_uniform(integrand.real, delta)
    fine_i = simpson_uniform(integrand.imag, delta)
    coarse_r = simpson_uniform(integrand.real[::2], 2 * delta)
    coarse_i = simpson_uniform(integrand.imag[::2], 2 * delta)
    value = complex(fine_r, fine_i)
    err = abs(value - complex(coarse_r, coarse_i)) / 15.0
    comparison = abs(value) / (T * log(T) ** (k * k))
    return {"value": value, "comparison": comparison, "error_estimate": err}


def twisted_character_moments(a, q, k, T, delta=None):
    """Per-character pieces of the twisted moment's decomposition.

    Returns a dict chi-index -> (q^{1/2}/phi(q)) conj(chi(a)) *
    int_1^T L(1/2+it, chi) conj(zeta) |zeta|^{2(k-1)} dt.
    """
    from .characters import character_group, euler_phi
    from .lfunc import dirichlet_id

    if delta is None:
        delta = default_delta(T)
    count = grid_count(1.0, T, delta)
    zv, _ = uniform_complex(zeta_id(), 1.0, delta, count)
    az = np.abs(zv)
    w = az ** (2.0 * (k - 1.0)) if k != 1.0 else np.ones_like(az)
    base = np.conj(zv) * w
    out = {}
    for chi in character_group(q):
        lv, _ = uniform_complex(dirichlet_id(q, chi.index), 1.0, delta, count)
        integ = lv * base
        val = complex(
            simpson_uniform(integ.real, delta), simpson_uniform(integ.imag, delta)
        )
        out[chi.index] = (q**0.5 / euler_phi(q)) * np.conj(chi(a)) * val
    return out

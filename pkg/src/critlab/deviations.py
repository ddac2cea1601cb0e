"""Empirical value-distribution statistics of log|L(1/2+it)|.

The joint tail function is sampled on a uniform t-grid over [1, T] (a
dyadic [T, 2T] toggle mirrors the windowed statements); grid fractions
approximate the underlying measure at the grid's own resolution.  All
normalizations use sqrt(0.5 loglog T).

The moment/tail exchange identity is checked in its sample form: the
sample moment of prod |L_j|^{2 k_j} against the r-fold lattice Riemann
sum of the exponentially weighted tail function, which is an exact
identity for the empirical (step) tail up to the lattice discretization
reported as the gap.
"""

from dataclasses import dataclass, field
from math import log, sqrt

import numpy as np
from scipy.special import ndtr

from .errors import DomainError, ResolutionError, StatisticsError
from .grid import log_abs_grid


@dataclass
class TailGrid:
    """Samples of normalized log|L_j(1/2+it)| with tail-counting helpers.

    samples has shape (r, n): row j holds log|L_j| / sqrt(0.5 loglog T).
    """

    ids: list
    T: float
    normalization: float
    samples: np.ndarray
    interval: str = "full"  # "full" = [1, T], "dyadic" = [T, 2T]
    clamp_floor: float = -40.0
    clamped_count: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def r(self):
        return self.samples.shape[0]

    @property
    def n(self):
        return self.samples.shape[1]

    @classmethod
    def build(cls, ids, T, delta=None, cache=None, dyadic=False, workers=1, clamp_floor=-40.0):
        """Sample the ids over [1, T] (or [T, 2T]) on a shared lattice.

        delta defaults to pi/log T, the coarsest step the quadrature
        modules accept at height T.
        """
        if delta is None:
            delta = np.pi / log(max(T, 3.0))
        t0, t1 = (T, 2.0 * T) if dyadic else (1.0, float(T))
        rows = []
        clamped = 0
        for lid in ids:
            if cache is not None:
                g = cache.grid(lid, t0, t1, delta, clamp_floor=clamp_floor)
            else:
                g = log_abs_grid(lid, t0, t1, delta, clamp_floor=clamp_floor, workers=workers)
            rows.append(g.values)
            clamped += g.clamped_count
        norm = sqrt(0.5 * log(log(T)))
        return cls(
            ids=list(ids),
            T=float(T),
            normalization=norm,
            samples=np.vstack(rows) / norm,
            interval="dyadic" if dyadic else "full",
            clamp_floor=clamp_floor,
            clamped_count=clamped,
        )

    @classmethod
    def from_samples(cls, rows, T, interval="full"):
        """Wrap raw log|L| sample rows (testing and synthetic inputs)."""
        norm = sqrt(0.5 * log(log(T)))
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        return cls(
            ids=[f"row{i}" for i in range(rows.shape[0])],
            T=float(T),
            normalization=norm,
            samples=rows / norm,
        )

    def to_csv(self, path, v_grid=None):
        """CSV export of the tail function on a V-lattice: (V_1..V_r, phi, count)."""
        if v_grid is None:
            lo = float(np.min(self.samples))
            hi = float(np.max(self.samples))
            v_grid = np.arange(lo, hi + 0.1, 0.1)
        with open(path, "w") as fh:
            head = ",".join(f"V_{j+1}" for j in range(self.r))
            fh.write(f"{head},phi,count\n")
            for V in _lattice_points(v_grid, self.r):
                c = self.tail_count(V)
                fh.write(
                    ",".join(f"{v:.17g}" for v in V)
                    + f",{c / self.n:.17g},{c}\n"
                )

    def tail_count(self, V):
        """#{ samples with every coordinate >= V_j } (exact)."""
        V = np.atleast_1d(np.asarray(V, dtype=np.float64))
        if len(V) != self.r:
            raise DomainError(f"threshold has {len(V)} coordinates, grid has {self.r}")
        mask = np.ones(self.n, dtype=bool)
        for j in range(self.r):
            mask &= self.samples[j] >= V[j]
        return int(np.count_nonzero(mask))


def _lattice_points(v_grid, r):
    if r == 1:
        for v in v_grid:
            yield (v,)
    else:
        for v in v_grid:
            for rest in _lattice_points(v_grid, r - 1):
                yield (v,) + rest


def empirical_phi(tg, V):
    """Fraction of sampled t with all normalized log-values >= V_j."""
    return tg.tail_count(V) / tg.n


@dataclass
class CLTReport:
    sample_mean: float
    sample_variance: float
    ks_distance: float
    n: int
    normalization: float
    normalized_mean: float
    variance_reference: float


def selberg_clt_test(grid, T=None, min_samples=10_000):
    """Normal-law diagnostics of log|L| on a grid sample.

    Args:
        grid: CriticalLineGrid (or any object with .values and .t1).
        T: Height for the normalization; defaults to grid.t1.

    Returns:
        CLTReport with the unnormalized mean/variance, the mean in
        normalized units, and the Kolmogorov-Smirnov distance of the
        normalized sample against the standard normal law.

    Raises:
        StatisticsError: With fewer than min_samples samples.
    """
    values = np.asarray(grid.values if hasattr(grid, "values") else grid, dtype=np.float64)
    if len(values) < min_samples:
        raise StatisticsError(f"need >= {min_samples} samples, got {len(values)}")
    if T is None:
        T = getattr(grid, "t1", None)
        if T is None:
            raise DomainError("pass T when the sample carries no height")
    norm = sqrt(0.5 * log(log(T)))
    x = np.sort(values / norm)
    n = len(x)
    cdf = ndtr(x)
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    ks = float(max(upper, lower))
    return CLTReport(
        sample_mean=float(np.mean(values)),
        sample_variance=float(np.var(values)),
        ks_distance=ks,
        n=n,
        normalization=norm,
        normalized_mean=float(np.mean(values) / norm),
        variance_reference=0.5 * log(log(T)),
    )


def joint_tail_ratio(tg, V):
    """log of (joint tail) / (product of marginal tails) at V.

    Raises:
        StatisticsError: If the joint cell or any marginal is empty.
    """
    V = np.atleast_1d(np.asarray(V, dtype=np.float64))
    joint = tg.tail_count(V)
    if joint == 0:
        raise StatisticsError(f"empty joint tail cell at V = {V.tolist()}")
    out = log(joint / tg.n)
    for j in range(tg.r):
        m = int(np.count_nonzero(tg.samples[j] >= V[j]))
        if m == 0:
            raise StatisticsError(f"empty marginal {j} at V_{j+1} = {V[j]}")
        out -= log(m / tg.n)
    return float(out)


def large_deviation_profile(tg, cs, guard=0.5):
    """Tail decay against the Gaussian reference exponent.

    Thresholds V_j = c_j sqrt(loglog T); reports
    ratio = log phi(V) / (-sum V_j^2 / 2), with the raw pair returned
    unratioed when the reference exponent is below `guard` (the 0/0
    neighborhood of tiny thresholds).

    Raises:
        StatisticsError: On an empty tail cell.
    """
    cs = np.atleast_1d(np.asarray(cs, dtype=np.float64))
    if np.any(cs <= 0):
        raise DomainError("threshold multipliers must be positive")
    V = cs * sqrt(log(log(tg.T)))
    phi = empirical_phi(tg, V)
    if phi == 0.0:
        raise StatisticsError(f"empty tail cell at V = {V.tolist()}")
    log_phi = log(phi)
    ref = -0.5 * float(np.sum(V * V))
    out = {
        "T": tg.T,
        "V": V.tolist(),
        "phi_fraction": phi,
        "log_phi": log_phi,
        "gaussian_exponent": ref,
        "ratio": None if abs(ref) < guard else log_phi / ref,
    }
    return out


def _tail_on_lattice(tg, edges):
    """phi at every lattice corner by reverse-cumulative histogram."""
    if tg.r == 1:
        hist, _ = np.histogram(tg.samples[0], bins=np.append(edges[0], np.inf))
        rev = np.cumsum(hist[::-1])[::-1]
        return rev / tg.n
    if tg.r == 2:
        hist, _, _ = np.histogram2d(
            tg.samples[0],
            tg.samples[1],
            bins=[np.append(edges[0], np.inf), np.append(edges[1], np.inf)],
        )
        rev = np.cumsum(np.cumsum(hist[::-1, ::-1], axis=0), axis=1)[::-1, ::-1]
        return rev / tg.n
    raise DomainError("lattice tails implemented for r <= 2")


def _fubini_rhs(tg, ks, v_step, box_masks=None):
    """Lattice Riemann sum of the weighted tail integral (and box split)."""
    ll = log(log(tg.T))
    a = 2.0 * np.asarray(ks, dtype=np.float64) * sqrt(0.5 * ll)
    pref = 2.0 ** tg.r * (0.5 * ll) ** (tg.r / 2.0) * float(np.prod(ks))
    edges = []
    for j in range(tg.r):
        lo = float(np.min(tg.samples[j])) - 8.0 / a[j] - v_step
        hi = float(np.max(tg.samples[j])) + v_step
        edges.append(np.arange(lo, hi + v_step, v_step))
    phi = _tail_on_lattice(tg, edges)
    if tg.r == 1:
        w = np.exp(a[0] * edges[0])
        cell = phi * w
        total = pref * v_step * float(np.sum(cell))
        boxes = None
        if box_masks is not None:
            boxes = [pref * v_step * float(np.sum(cell[m(edges[0])])) for m in box_masks]
        return total, boxes
    w = np.exp(a[0] * edges[0])[:, None] * np.exp(a[1] * edges[1])[None, :]
    cell = phi * w
    total = pref * v_step**tg.r * float(np.sum(cell))
    boxes = None
    if box_masks is not None:
        boxes = []
        for m in box_masks:
            mask = m(edges[0])[:, None] & m(edges[1])[None, :] if callable(m) else m(edges)
            boxes.append(pref * v_step**tg.r * float(np.sum(cell * mask)))
    return total, boxes


def fubini_check(tg, ks, v_step=0.01):
    """Sample moment against the exponentially weighted tail integral.

    LHS: mean over the sample of prod_j |L_j|^{2 k_j} (times T when the
    identity is read in measure form; the ratio is scale-free).  RHS: the
    r-fold lattice Riemann sum with weight exp(2 sqrt(0.5 loglog T)
    sum k_j W_j) against the empirical tail function.

    Returns:
        dict with lhs, rhs, relative_gap, v_step, resolution_estimate.

    Raises:
        ResolutionError: If the step-doubling estimate exceeds 10%.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=np.float64))
    if len(ks) != tg.r:
        raise DomainError(f"{len(ks)} exponents for {tg.r} sample rows")
    ll = log(log(tg.T))
    lhs = float(np.mean(np.exp(np.sum(2.0 * ks[:, None] * tg.samples * sqrt(0.5 * ll), axis=0))))
    rhs, _ = _fubini_rhs(tg, ks, v_step)
    rhs2, _ = _fubini_rhs(tg, ks, 2.0 * v_step)
    res_est = abs(rhs - rhs2) / max(lhs, 1e-300)
    if res_est > 0.10:
        raise ResolutionError(
            f"V-step {v_step} too coarse: step-doubling moves the integral by {res_est:.1%}"
        )
    return {
        "lhs": lhs,
        "rhs": rhs,
        "relative_gap": abs(rhs - lhs) / lhs,
        "v_step": v_step,
        "resolution_estimate": res_est,
        "T": tg.T,
        "k": ks.tolist(),
    }


def mass_concentration_check(tg, ks, eps, v_step=0.01):
    """Where the weighted tail integral carries its mass.

    With the pairing V_j = 2 k_j sqrt(0.5 loglog T), splits each axis at
    V_j (1 +- eps) and reports the fraction of the integral inside the
    central box (and the full 3^r box decomposition).
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=np.float64))
    if len(ks) != tg.r:
        raise DomainError(f"{len(ks)} exponents for {tg.r} sample rows")
    if eps <= 0:
        raise DomainError("eps must be positive")
    ll = log(log(tg.T))
    V = 2.0 * ks * sqrt(0.5 * ll)

    def box_mask(j, which):
        lo, hi = V[j] * (1 - eps), V[j] * (1 + eps)
        if which == 0:
            return lambda e: e < lo
        if which == 1:
            return lambda e: (e >= lo) & (e <= hi)
        return lambda e: e > hi

    boxes = {}
    if tg.r == 1:
        total, _ = _fubini_rhs(tg, ks, v_step)
        for which, name in ((0, "-"), (1, "0"), (2, "+")):
            _, bx = _fubini_rhs(tg, ks, v_step, box_masks=[box_mask(0, which)])
            boxes[name] = bx[0] / total
        central = boxes["0"]
    else:
        a = 2.0 * ks * sqrt(0.5 * ll)
        edges = []
        for j in range(tg.r):
            lo = float(np.min(tg.samples[j])) - 8.0 / a[j] - v_step
            hi = float(np.max(tg.samples[j])) + v_step
            edges.append(np.arange(lo, hi + v_step, v_step))
        phi = _tail_on_lattice(tg, edges)
        w = np.exp(a[0] * edges[0])[:, None] * np.exp(a[1] * edges[1])[None, :]
        cell = phi * w
        names = ("-", "0", "+")
        for w1 in range(3):
            m1 = box_mask(0, w1)(edges[0])
            for w2 in range(3):
                m2 = box_mask(1, w2)(edges[1])
                frac = float(np.sum(cell[np.ix_(m1, m2)])) / float(np.sum(cell))
                boxes[names[w1] + names[w2]] = frac
        central = boxes["00"]
    return {
        "V": V.tolist(),
        "eps": eps,
        "central_fraction": central,
        "boxes": boxes,
        "T": tg.T,
    }

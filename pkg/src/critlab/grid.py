"""Sampled log|L(1/2+it)| grids with deterministic parallel fill.

Strategy per identifier:
  zeta             Euler-Maclaurin below RS_MIN_T, Riemann-Siegel above.
  dirichlet q:i    principal -> zeta times its finite Euler factor;
                   primitive -> Euler-Maclaurin below FAST_MIN_T, tapered
                   balanced sums above; imprimitive non-principal ->
                   Euler-Maclaurin only (error above its cost ceiling).
  hurwitz a/q      Euler-Maclaurin below FAST_MIN_T, character assembly
                   of the per-character complex fast paths above.
  dedekind         sum of component dirichlet log-grids.

The grid is cut into fixed-size jobs (JOB points, a constant); each job
is evaluated independently and written into its own slice, so results are
bit-identical for any worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lfunc, rs
from .characters import character_group, euler_phi, factorize
from .errors import AccuracyError, DomainError
from .kernels import BLOCK, geom_sums

FAST_MIN_T = 1.0e4  # above this, q > 1 ids switch to the tapered fast path
EM_GRID_CEILING = 5.0e4  # imprimitive ids stop here (Euler-Maclaurin cost wall)
JOB = 1 << 18  # grid points per parallel job; fixed for determinism


def grid_count(t0, t1, delta):
    """floor((t1 - t0)/delta) + 1, guarded against float fuzz."""
    raw = (t1 - t0) / delta
    near = round(raw)
    n = near if abs(raw - near) < 1e-9 else int(np.floor(raw))
    return int(n) + 1


@dataclass
class CriticalLineGrid:
    """log|L(1/2+it)| sampled on t = t0 + k*delta, k < len(values).

    Values below clamp_floor are stored as clamp_floor; the flag array is
    recoverable as values == clamp_floor and the count is kept here.
    """

    id: object
    t0: float
    t1: float
    delta: float
    values: np.ndarray
    clamp_floor: float
    precision_target: object  # requested bound, or None for best effort
    achieved: float  # max per-point absolute error bound of the fill
    clamped_count: int
    version: int = 1
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.values)

    @property
    def ts(self):
        return self.t0 + self.delta * np.arange(self.n)

    @property
    def clamped(self):
        return self.values == self.clamp_floor

    def to_csv(self, path):
        """CSV export with columns (t, log_abs, clamped), 17 sig digits."""
        with open(path, "w") as fh:
            fh.write("t,log_abs,clamped\n")
            cl = self.clamped
            for k in range(self.n):
                t = self.t0 + self.delta * k
                fh.write(f"{t:.17g},{self.values[k]:.17g},{int(cl[k])}\n")


def _em_uniform_complex(alpha, t0, delta, count, sigma=0.5, eps=1e-9):
    """Euler-Maclaurin zeta(sigma+it, alpha) on a uniform grid block."""
    out = np.empty(count, dtype=np.complex128)
    b = lfunc._bern_over_fact(65)
    start = 0
    while start < count:
        end = min(start + BLOCK, count)
        ts = t0 + delta * np.arange(start, end)
        tmax = abs(ts[-1]) if ts[-1] > 0 else abs(ts[0])
        M = int(max(32, np.ceil(0.28 * max(tmax, abs(ts[0])))))
        n = np.arange(M)
        base = n + alpha
        ln = np.log(base)
        c0 = base ** (-sigma) * np.exp(-1j * ts[0] * ln)
        ratio = np.exp(-1j * delta * ln)
        main = geom_sums(c0, ratio, end - start)
        s = sigma + 1j * ts
        Ma = M + alpha
        logMa = np.log(Ma)
        tail = np.exp((1.0 - s) * logMa) / (s - 1.0)
        half = 0.5 * np.exp(-s * logMa)
        corr = np.zeros_like(s)
        R = s * np.exp(-(s + 1.0) * logMa)
        for j in range(1, 62):
            corr += b[j] * R
            R = R * (s + (2 * j - 1)) * (s + 2 * j) / (Ma * Ma)
            est = np.max(np.abs(b[j + 1] * R))
            if est < 0.25 * eps:
                break
        if est >= 0.25 * eps:
            raise AccuracyError("Euler-Maclaurin grid tail stalls", achieved=float(est))
        out[start:end] = main + tail + half + corr
        start = end
    return out


def _zeta_complex_block(t0, delta, count, eps=1e-9):
    """Complex zeta(1/2+it) on a uniform block; EM below RS_MIN_T."""
    ts_end = t0 + delta * (count - 1)
    vals = np.empty(count, dtype=np.complex128)
    err = np.empty(count)
    n_em = grid_count(t0, min(ts_end, lfunc.RS_MIN_T), delta) if t0 <= lfunc.RS_MIN_T else 0
    n_em = min(n_em, count)
    if n_em > 0:
        vals[:n_em] = _em_uniform_complex(1.0, t0, delta, n_em, eps=eps)
        err[:n_em] = eps
    if n_em < count:
        t_rs = t0 + delta * n_em
        Z, th = rs.zeta_z_uniform(t_rs, delta, count - n_em)
        vals[n_em:] = np.exp(-1j * th) * Z
        err[n_em:] = rs.rs_error_bound(t0 + delta * np.arange(n_em, count))
    return vals, err


def _principal_factor(q, ts):
    """prod_{p|q} (1 - p^{-1/2-it}) on the critical line."""
    fac = np.ones(len(ts), dtype=np.complex128)
    for p, _ in factorize(q):
        fac *= 1.0 - p**-0.5 * np.exp(-1j * ts * np.log(p))
    return fac


def _dirichlet_complex_block(chi, t0, delta, count, eps=1e-9):
    """Complex L(1/2+it, chi) on a uniform block, fastest valid path."""
    q = chi.modulus
    if q == 1:
        return _zeta_complex_block(t0, delta, count, eps=eps)
    ts = t0 + delta * np.arange(count)
    if chi.is_principal:
        vals, err = _zeta_complex_block(t0, delta, count, eps=eps)
        fac = _principal_factor(q, ts)
        return vals * fac, err * np.abs(fac) + 1e-15
    ts_end = ts[-1]
    n_em = grid_count(t0, min(ts_end, FAST_MIN_T), delta) if t0 <= FAST_MIN_T else 0
    n_em = min(n_em, count)
    if n_em < count and not chi.is_primitive:
        if ts_end > EM_GRID_CEILING:
            raise AccuracyError(
                f"imprimitive character {q}:{chi.index} has no fast path; "
                f"grids are limited to t <= {EM_GRID_CEILING:.0f}"
            )
        n_em = count
    vals = np.empty(count, dtype=np.complex128)
    err = np.empty(count)
    if n_em > 0:
        acc = np.zeros(n_em, dtype=np.complex128)
        for a in range(1, q + 1):
            if np.gcd(a, q) != 1:
                continue
            hz = _em_uniform_complex(a / q, t0, delta, n_em, eps=eps)
            acc = acc + chi(a) * hz
        s = 0.5 + 1j * ts[:n_em]
        vals[:n_em] = q ** (-s) * acc
        err[:n_em] = eps * euler_phi(q) * q**-0.5
    if n_em < count:
        v, e = rs.primitive_l_uniform(chi, t0 + delta * n_em, delta, count - n_em)
        vals[n_em:] = v
        err[n_em:] = e
    return vals, err


def _hurwitz_complex_block(a, q, t0, delta, count, eps=1e-9):
    """Complex zeta(1/2+it, a/q) on a uniform block."""
    if q == 1:
        return _zeta_complex_block(t0, delta, count, eps=eps)
    ts = t0 + delta * np.arange(count)
    ts_end = ts[-1]
    n_em = grid_count(t0, min(ts_end, FAST_MIN_T), delta) if t0 <= FAST_MIN_T else 0
    n_em = min(n_em, count)
    vals = np.empty(count, dtype=np.complex128)
    err = np.empty(count)
    if n_em > 0:
        vals[:n_em] = _em_uniform_complex(a / q, t0, delta, n_em, eps=eps)
        err[:n_em] = eps
    if n_em < count:
        # (q^s / phi(q)) sum_chi conj(chi(a)) L(s, chi) via fast paths
        rest = count - n_em
        t_hi = t0 + delta * n_em
        acc = np.zeros(rest, dtype=np.complex128)
        eacc = np.zeros(rest)
        for chi in character_group(q):
            v, e = _dirichlet_complex_block(chi, t_hi, delta, rest, eps=eps)
            acc += np.conj(chi(a)) * v
            eacc += e
        s = 0.5 + 1j * ts[n_em:]
        pref = q**s / euler_phi(q)
        vals[n_em:] = pref * acc
        err[n_em:] = np.abs(pref) * eacc / euler_phi(q)
    return vals, err


def uniform_complex(lid, t0, delta, count, eps=1e-9):
    """Complex L(1/2+it) values of an id on a uniform grid block."""
    if lid.kind == "zeta":
        return _zeta_complex_block(t0, delta, count, eps=eps)
    if lid.kind == "dirichlet":
        chi = character_group(lid.q)[lid.index]
        return _dirichlet_complex_block(chi, t0, delta, count, eps=eps)
    if lid.kind == "hurwitz":
        return _hurwitz_complex_block(lid.a, lid.q, t0, delta, count, eps=eps)
    raise DomainError(f"no complex grid path for id kind {lid.kind!r}")


def _logabs_block(lid, t0, delta, count, eps, floor_tiny=1e-320):
    """Returns (log|L| values, per-point log-error bound at unit scale).

    The error column is e/max(|L|, 1): an honest absolute bound on log|L|
    wherever |L| >= 1, scaling like e/|L| below; near zeros the log error
    is intrinsically unbounded, which is what the clamp floor absorbs.
    """
    if lid.kind == "dedekind":
        total = np.zeros(count)
        err = np.zeros(count)
        for q, i in lid.components:
            chi = character_group(q)[i]
            v, e = _dirichlet_complex_block(chi, t0, delta, count, eps=eps)
            a = np.abs(v)
            total += np.log(np.maximum(a, floor_tiny))
            err += e / np.maximum(a, 1.0)
        return total, err
    v, e = uniform_complex(lid, t0, delta, count, eps=eps)
    a = np.abs(v)
    return np.log(np.maximum(a, floor_tiny)), e / np.maximum(a, 1.0)


def log_abs_grid(lid, t0, t1, delta, clamp_floor=-40.0, precision=None, workers=1, eps=1e-9):
    """Fill log|L(1/2+it)| over [t0, t1] with step delta.

    Args:
        lid: LFunctionId.
        t0, t1: Range with t0 >= 1.
        delta: Step > 0; (t1-t0)/delta <= 1e9.
        clamp_floor: Values below are clamped there and flagged.
        precision: Absolute target on log|L| at unit value scale; None
            takes the best path available and records what it achieved.
        workers: Thread budget for the fill (fixed-size jobs either way).

    Returns:
        CriticalLineGrid.

    Raises:
        AccuracyError: If an explicit precision target cannot be met.
    """
    if t0 < 1:
        raise DomainError(f"grids start at t0 >= 1, got {t0}")
    if delta <= 0 or t1 < t0:
        raise DomainError("need delta > 0 and t1 >= t0")
    count = grid_count(t0, t1, delta)
    if count > 1e9:
        raise DomainError(f"grid of {count} points exceeds the 1e9 cap")
    values = np.empty(count)
    errs = np.empty(count)

    jobs = [(a, min(a + JOB, count)) for a in range(0, count, JOB)]

    def run(job):
        a, b = job
        v, e = _logabs_block(lid, t0 + delta * a, delta, b - a, eps)
        values[a:b] = v
        errs[a:b] = e

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, jobs))
    else:
        for job in jobs:
            run(job)

    achieved = float(np.max(errs)) if count else 0.0
    if precision is not None and achieved > precision:
        raise AccuracyError(
            f"requested {precision:.1e} on log|L| but the path achieves {achieved:.1e}",
            achieved=achieved,
        )
    clamped = values < clamp_floor
    values[clamped] = clamp_floor
    return CriticalLineGrid(
        id=lid,
        t0=float(t0),
        t1=float(t1),
        delta=float(delta),
        values=values,
        clamp_floor=float(clamp_floor),
        precision_target=precision,
        achieved=achieved,
        clamped_count=int(np.count_nonzero(clamped)),
    )

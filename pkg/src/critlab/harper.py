"""Prime-block schedule, smoothed prime weights, the truncated-exponential
polynomial bank, good/bad set classification, and the pointwise
upper-bound audit.

The schedule splits primes into blocks (T_{j-1}, T_j] with T_j = T^{theta_j},
theta_j = beta * e^{j-1}, capped at theta_J <= eps.  The asymptotically
motivated knobs (beta = 1/(loglog T)^2, eps = e^{-1000 k_hat}) are exposed
as the "exact" schedule but produce J = 0 at any feasible T, so desk runs
use explicit (beta, eps) knobs; the exact variant fails loudly with the
minimal T at which it would activate.

The block polynomials N_{j,x} (truncated exponentials with an Omega-cap)
are evaluated through a cap-truncated product of per-prime exponential
series: exactly the defined finite sum, reorganized so its cost is
(cap^2 x primes x points) instead of enumerating the support (which is
combinatorially infeasible beyond toy blocks).  A depth-first enumerator
with a hard term budget is kept for cross-checks.
"""

from dataclasses import dataclass, field
from math import exp, fsum, log

import numpy as np
from numba import njit

from .errors import DomainError, EmptyScheduleError, ResourceError
from .kernels import geom_sums
from .primes import sieve_primes

DFS_BUDGET = 10_000_000  # hard cap on enumerated support terms per (j, x)


def k_hat(ks, specs):
    """max(sum m_i k_i, sum k_i^2)."""
    return max(
        sum(k * s.degree for k, s in zip(ks, specs)),
        sum(k * k for k in ks),
    )


@dataclass
class HarperSchedule:
    T: float
    k_hat: float
    beta: float
    eps: float
    theta: np.ndarray  # theta_1..theta_J
    Tj: np.ndarray  # T_1..T_J (T_0 = 1 implicit)
    Kj: np.ndarray  # K_1..K_J

    @property
    def J(self):
        return len(self.theta)

    def block_bounds(self, j):
        """(T_{j-1}, T_j] for 1-based block index j."""
        lo = 1.0 if j == 1 else float(self.Tj[j - 2])
        return lo, float(self.Tj[j - 1])

    def dump(self):
        """Plain-text key=value block."""
        lines = [
            f"T={self.T:.17g}",
            f"k_hat={self.k_hat:.17g}",
            f"beta={self.beta:.17g}",
            f"eps={self.eps:.17g}",
            f"J={self.J}",
        ]
        for j in range(1, self.J + 1):
            lines.append(
                f"theta_{j}={self.theta[j-1]:.17g} T_{j}={self.Tj[j-1]:.17g} "
                f"K_{j}={self.Kj[j-1]:.17g}"
            )
        return "\n".join(lines) + "\n"


def build_schedule(T, ks, specs, beta=0.01, eps=0.2, exact=False):
    """Construct the prime-block schedule.

    Args:
        T: Height, >= 100.
        ks, specs: Exponents and coefficient systems (set k_hat).
        beta: Base increment theta_1.
        eps: Cutoff: J = max{ j : theta_j <= eps }.
        exact: Use the asymptotic knobs instead of (beta, eps); at desk
            scale this raises EmptyScheduleError with the minimal T.

    Raises:
        EmptyScheduleError: If J = 0.
    """
    if T < 100:
        raise DomainError(f"schedule needs T >= 100, got {T}")
    kh = k_hat(ks, specs)
    if exact:
        loglogT = log(log(T))
        beta = 1.0 / loglogT**2
        eps = exp(-1000.0 * kh)
    elif not (0 < beta < eps < 1):
        raise DomainError(f"need 0 < beta < eps < 1, got beta={beta}, eps={eps}")
    thetas = []
    j = 1
    while True:
        th = beta * exp(j - 1)
        if th > eps:
            break
        thetas.append(th)
        j += 1
    if not thetas:
        # theta_1 <= eps needs (loglog T)^2 >= e^{1000 k_hat} in the exact
        # regime; the minimal such T overflows floats, so report it in logs
        min_t = None
        if exact:
            min_t = float("inf")
            detail = (
                f"exact schedule needs T >= exp(exp(exp(500*k_hat))) "
                f"(log log T >= {exp(500.0 * kh):.3e})"
            )
        else:
            detail = f"beta={beta} > eps={eps} leaves no blocks"
        raise EmptyScheduleError(f"schedule is empty: {detail}", min_T=min_t)
    theta = np.array(thetas)
    return HarperSchedule(
        T=float(T),
        k_hat=kh,
        beta=float(beta),
        eps=float(eps),
        theta=theta,
        Tj=T**theta,
        Kj=np.sqrt(kh) * theta**-0.75,
    )


@dataclass
class SmoothedWeights:
    """The smoothed prime-power weight family at cutoff x.

    weight(n) = [sum_j k_j Lambda_j(n) / log n] * log(x/n)/(n^{1/log x} log x),
    supported on prime powers n <= x.
    """

    x: float
    ks: tuple
    specs: tuple

    def smoothing(self, n):
        n = np.asarray(n, dtype=np.float64)
        return np.log(self.x / n) / (n ** (1.0 / log(self.x)) * log(self.x))

    def at_primes(self, primes):
        """Lambda_x(p) for an array of primes <= x."""
        primes = np.asarray(primes)
        acc = np.zeros(len(primes), dtype=np.complex128)
        for k, s in zip(self.ks, self.specs):
            acc += k * s.alpha_sum_at_primes(primes)
        return acc * self.smoothing(primes)

    def at_prime_squares(self, primes):
        """Lambda_x(p^2) for primes with p^2 <= x."""
        primes = np.asarray(primes)
        acc = np.zeros(len(primes), dtype=np.complex128)
        for k, s in zip(self.ks, self.specs):
            acc += 0.5 * k * s.alpha_sum_at_primes(primes, power=2)
        return acc * self.smoothing(primes.astype(np.float64) ** 2)


def smoothed_lambda(x, n, ks, specs, primetable=None):
    """Scalar smoothed weight at n (0 off prime powers; DomainError n > x)."""
    if n < 2:
        raise DomainError(f"weights start at n = 2, got {n}")
    if n > x:
        raise DomainError(f"weight cutoff is x = {x}, got n = {n}")
    pt = primetable if primetable is not None else sieve_primes(int(n) + 1)
    pk = pt.prime_power(n)
    if pk is None:
        return 0j
    p, ell = pk
    w = SmoothedWeights(x=float(x), ks=tuple(ks), specs=tuple(specs))
    coeff = sum(
        k * complex(np.sum(s.alpha(p) ** ell)) for k, s in zip(ks, specs)
    ) / ell
    return coeff * float(w.smoothing(float(n)))


@njit(cache=True, nogil=True)
def _truncated_exp_product(us, cap):
    """prod over rows of (sum_{eta<=cap} u^eta/eta!), truncated at total
    degree cap; us has shape (n_primes, n_t).  Exact reorganization of the
    Omega-capped support sum."""
    n_p, n_t = us.shape
    out = np.empty(n_t, dtype=np.complex128)
    C = np.empty(cap + 1, dtype=np.complex128)
    for t in range(n_t):
        for c in range(cap + 1):
            C[c] = 0.0
        C[0] = 1.0
        top = 0
        for ip in range(n_p):
            u = us[ip, t]
            new_top = min(cap, top + cap)
            for c in range(new_top, -1, -1):
                acc = C[c]
                upow = u
                fact = 1.0
                eta = 1
                while eta <= c:
                    fact *= eta
                    if c - eta <= top:
                        acc += C[c - eta] * upow / fact
                    upow *= u
                    eta += 1
                C[c] = acc
            top = new_top
        s = 0.0 + 0.0j
        for c in range(cap + 1):
            s += C[c]
        out[t] = s
    return out


@dataclass
class PolyBank:
    """Coefficient tables for the block polynomials at cutoffs x = T_s.

    Holds, for each (block j, cutoff index s), the block primes and their
    smoothed weights, plus the square-weight table for the long-prime
    correction polynomial evaluated at 1 + 2it.
    """

    schedule: HarperSchedule
    ks: tuple
    specs: tuple
    block_primes: list = field(default_factory=list)  # arrays, 1-based j
    weights: dict = field(default_factory=dict)  # (j, s) -> array
    m_primes: np.ndarray = None
    m_weights: dict = field(default_factory=dict)  # s -> array (square weights)
    m_cap: int = 0
    n_caps: np.ndarray = None

    @classmethod
    def build(cls, schedule, ks, specs, primetable=None):
        sch = schedule
        pt = primetable if primetable is not None else sieve_primes(int(sch.Tj[-1]) + 2)
        bank = cls(schedule=sch, ks=tuple(ks), specs=tuple(specs))
        km_sum = sum(k * s.degree for k, s in zip(ks, specs))
        for j in range(1, sch.J + 1):
            lo, hi = sch.block_bounds(j)
            ps = pt.primes[(pt.primes > lo) & (pt.primes <= hi)]
            bank.block_primes.append(ps)
        for s in range(1, sch.J + 1):
            w = SmoothedWeights(x=float(sch.Tj[s - 1]), ks=tuple(ks), specs=tuple(specs))
            for j in range(1, s + 1):
                ps = bank.block_primes[j - 1]
                wt = w.at_primes(ps) if len(ps) else np.zeros(0, dtype=np.complex128)
                if len(wt) and np.max(np.abs(wt)) > km_sum + 1e-9:
                    raise DomainError(
                        "weight bound |Lambda_x(p)| <= sum k_j m_j violated; "
                        "check the coefficient tables"
                    )
                bank.weights[(j, s)] = wt
            # square weights for the long-prime polynomial at this cutoff
            logT = log(sch.T)
            mp = pt.primes[pt.primes <= logT]
            x = float(sch.Tj[s - 1])
            mp_ok = mp[mp.astype(np.float64) ** 2 <= x]
            bank.m_weights[s] = (
                w.at_prime_squares(mp_ok) if len(mp_ok) else np.zeros(0, dtype=np.complex128)
            )
            bank.m_primes = mp_ok
        loglogT = log(log(sch.T))
        bank.m_cap = int(10.0 * loglogT**2)
        bank.n_caps = np.floor(10.0 * sch.Kj).astype(np.int64)
        return bank

    def _check_j(self, j, s=None):
        if not (1 <= j <= self.schedule.J):
            raise DomainError(f"block index {j} outside 1..{self.schedule.J}")
        if s is not None and not (j <= s <= self.schedule.J):
            raise DomainError(f"cutoff index {s} outside {j}..{self.schedule.J}")

    def eval_P(self, j, s, ts):
        """P_{j, T_s}(1/2 + it) on an array of t values (exact finite sum)."""
        self._check_j(j, s)
        ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
        ps = self.block_primes[j - 1]
        if len(ps) == 0:
            return np.zeros(len(ts), dtype=np.complex128)
        wt = self.weights[(j, s)]
        pf = ps.astype(np.float64)
        out = np.empty(len(ts), dtype=np.complex128)
        # uniform grids hit the geometric kernel; scattered ts go direct
        if len(ts) > 2 and np.allclose(np.diff(ts), ts[1] - ts[0], rtol=0, atol=1e-12):
            ln = np.log(pf)
            c0 = wt * pf**-0.5 * np.exp(-1j * ts[0] * ln)
            out[:] = geom_sums(c0, np.exp(-1j * (ts[1] - ts[0]) * ln), len(ts))
        else:
            for i, t in enumerate(ts):
                out[i] = np.sum(wt * pf ** (-0.5 - 1j * t))
        return out

    def support_size(self, j, s=None):
        """Number of terms in the Omega-capped block support (exact count)."""
        self._check_j(j, s if s is not None else j)
        cap = int(self.n_caps[j - 1])
        n_p = len(self.block_primes[j - 1])
        # [z^0..z^cap] of (1 + z + ... + z^cap)^n_p, summed
        poly = np.zeros(cap + 1, dtype=object)
        poly[0] = 1
        for _ in range(n_p):
            acc = np.zeros(cap + 1, dtype=object)
            for c in range(cap + 1):
                if poly[c] == 0:
                    continue
                for e in range(0, cap + 1 - c):
                    acc[c + e] += poly[c]
            poly = acc
        return int(sum(poly))

    def eval_N(self, j, s, ts):
        """N_{j, T_s}(1/2 + it): the Omega-capped truncated exponential.

        Exact finite sum over the defined support, computed as a
        cap-truncated product of per-prime exponential series.
        """
        self._check_j(j, s)
        ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
        ps = self.block_primes[j - 1]
        cap = int(self.n_caps[j - 1])
        if len(ps) == 0 or cap < 1:
            return np.ones(len(ts), dtype=np.complex128)
        wt = self.weights[(j, s)]
        pf = ps.astype(np.float64)
        us = wt[:, None] * pf[:, None] ** (-0.5 - 1j * ts[None, :])
        return _truncated_exp_product(np.ascontiguousarray(us), cap)

    def eval_N_enumerated(self, j, s, ts, budget=DFS_BUDGET):
        """Depth-first enumeration of the same sum (cross-check backend).

        Raises:
            ResourceError: If the support exceeds the term budget.
        """
        self._check_j(j, s)
        size = self.support_size(j, s)
        if size > budget:
            raise ResourceError(
                f"block ({j},{s}) support has {size} terms, budget {budget}",
                budget=budget,
                required=size,
            )
        ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
        ps = self.block_primes[j - 1].astype(np.float64)
        wt = self.weights[(j, s)]
        cap = int(self.n_caps[j - 1])
        out = np.zeros(len(ts), dtype=np.complex128)
        s_half = 0.5 + 1j * ts

        def descend(idx, omega, coeff, nval):
            nonlocal out
            out += coeff * nval ** (-s_half)
            for nxt in range(idx, len(ps)):
                eta = 1
                c = coeff
                nv = nval
                while omega + eta <= cap:
                    c = c * wt[nxt] / eta
                    nv = nv * ps[nxt]
                    descend(nxt + 1, omega + eta, c, nv)
                    eta += 1

        descend(0, 0, 1.0 + 0j, 1.0)
        return out

    def eval_M(self, s, ts):
        """M_{T_s}(1 + 2it): the long-prime square-weight polynomial."""
        if not (1 <= s <= self.schedule.J):
            raise DomainError(f"cutoff index {s} outside 1..{self.schedule.J}")
        ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
        ps = self.m_primes
        cap = self.m_cap
        if ps is None or len(ps) == 0 or cap < 1:
            return np.ones(len(ts), dtype=np.complex128)
        wt = self.m_weights[s]
        pf = ps.astype(np.float64)
        us = wt[:, None] * pf[:, None] ** (-(1.0 + 2j * ts[None, :]))
        return _truncated_exp_product(np.ascontiguousarray(us), cap)


def _trunc_sum_and_tail(D, V):
    D = complex(D)
    V = float(V)
    if abs(D) > V + 1e-12:
        raise DomainError(f"truncation hypothesis |D| <= V violated: {abs(D):.3f} > {V}")
    jmax = int(np.floor(10.0 * V))
    terms_re, terms_im = [1.0], [0.0]
    term = 1.0 + 0j
    for j in range(1, jmax + 1):
        term = term * D / j
        terms_re.append(term.real)
        terms_im.append(term.imag)
    ssum = complex(fsum(terms_re), fsum(terms_im))
    # the factorial tail sum_{j > 10V} D^j/j!, a genuinely small quantity
    tail = 0j
    for j in range(jmax + 1, jmax + 400):
        term = term * D / j
        tail += term
        if abs(term) < 1e-22 * abs(tail) or term == 0:
            break
    return ssum, tail


def truncation_ratio(D, V):
    """exp(2 Re D) / |sum_{j <= 10V} D^j/j!|^2, compensated summation.

    Requires |D| <= V (the truncation hypothesis).
    """
    ssum, _ = _trunc_sum_and_tail(D, V)
    denom = abs(ssum) ** 2
    if denom == 0.0:
        return float("inf")
    return float(np.exp(2.0 * complex(D).real) / denom)


def truncation_remainder(D, V):
    """ratio - 1 through the factorial remainder, free of cancellation.

    exp(2 Re D) - |S|^2 = 2 Re(S conj(R)) + |R|^2 with R the factorial
    tail, so the remainder is computable at its own (tiny) scale instead
    of as a difference of order-one floats; resolves the truncation
    inequality down to e^{-13 V} where the direct ratio drowns in eps.
    """
    ssum, tail = _trunc_sum_and_tail(D, V)
    denom = abs(ssum) ** 2
    if denom == 0.0:
        return float("inf")
    num = 2.0 * (ssum * np.conj(tail)).real + abs(tail) ** 2
    return float(num / denom)


def classify_sets(schedule, bank, grid):
    """Partition the grid sample by block-polynomial size.

    A point lands in the good set when |P_{j,T_s}| <= K_j for every
    j <= s <= J; otherwise its label is (j, l) for the smallest
    out-of-size block j and the first cutoff l witnessing it.

    Returns:
        dict with labels (int array, 0 for the good set, j*1000+l else),
        measures (label -> fraction), confidence (label -> 95% half-width),
        and per-pair max |P| diagnostics.
    """
    ts = grid.ts
    J = schedule.J
    n = len(ts)
    fail_j = np.full(n, 0, dtype=np.int64)
    fail_l = np.full(n, 0, dtype=np.int64)
    absP = {}
    for j in range(1, J + 1):
        for s in range(j, J + 1):
            absP[(j, s)] = np.abs(bank.eval_P(j, s, ts))
    for j in range(1, J + 1):
        over = np.zeros(n, dtype=bool)
        first_l = np.full(n, 0, dtype=np.int64)
        for s in range(J, j - 1, -1):
            bad = absP[(j, s)] > schedule.Kj[j - 1]
            over |= bad
            first_l[bad] = s
        newly = over & (fail_j == 0)
        fail_j[newly] = j
        fail_l[newly] = first_l[newly]
    labels = fail_j * 1000 + fail_l
    uniq, counts = np.unique(labels, return_counts=True)
    measures = {}
    conf = {}
    for u, c in zip(uniq, counts):
        frac = c / n
        measures[int(u)] = float(frac)
        conf[int(u)] = float(1.96 * np.sqrt(max(frac * (1 - frac), 1e-300) / n))
    return {
        "labels": labels,
        "measures": measures,
        "confidence95": conf,
        "good_fraction": measures.get(0, 0.0),
        "max_absP": {k: float(np.max(v)) if len(v) else 0.0 for k, v in absP.items()},
        "Kj": schedule.Kj.tolist(),
    }


def chandee_audit(ks, specs, x, grids, T, primetable=None, quantiles=(0.01, 0.5, 0.99)):
    """Pointwise slack of the smoothed prime-sum upper bound for
    sum_j k_j log|L_j(1/2+it)| over a grid sample.

    slack(t) = Re sum_{n<=x, n=p,p^2} Lambda_x(n) n^{-1/2-1/log x-it}
               + (sum_j k_j m_j) log T / log x  -  sum_j k_j log|L_j|.

    Args:
        ks, specs: Weighting of the product.
        x: Prime cutoff; e^2 <= x <= T^2.
        grids: One CriticalLineGrid per spec (shared t-lattice).
        T: Height scale for the log T / log x term.

    Returns:
        dict with slack statistics, the empirical additive constant
        C_emp = -min(slack), and the short-square-tail diagnostic.
    """
    if not (exp(2.0) <= x <= T * T):
        raise DomainError(f"audit needs e^2 <= x <= T^2, got x={x}")
    if not isinstance(grids, (list, tuple)):
        grids = [grids]
    if len(grids) != len(specs):
        raise DomainError(f"{len(grids)} grids for {len(specs)} coefficient systems")
    g0 = grids[0]
    for g in grids[1:]:
        if g.n != g0.n or g.t0 != g0.t0 or g.delta != g0.delta:
            raise DomainError("audit grids must share a t-lattice")
    pt = primetable if primetable is not None else sieve_primes(int(x) + 2)
    w = SmoothedWeights(x=float(x), ks=tuple(ks), specs=tuple(specs))

    ps = pt.primes_leq(int(x))
    wp = w.at_primes(ps)
    ps2 = ps[ps.astype(np.float64) ** 2 <= x]
    wp2 = w.at_prime_squares(ps2)

    count = g0.n
    t0, delta = g0.t0, g0.delta

    # the weights already carry the n^{-1/log x} smoothing factor, so the
    # polynomial runs at plain n^{-1/2 - it}
    def poly(primes, weights, power):
        if len(primes) == 0:
            return np.zeros(count, dtype=np.complex128)
        pf = primes.astype(np.float64) ** power
        ln = np.log(pf)
        c0 = weights * pf**-0.5 * np.exp(-1j * t0 * ln)
        return geom_sums(c0, np.exp(-1j * delta * ln), count)

    prime_part = (poly(ps, wp, 1) + poly(ps2, wp2, 2)).real
    km_sum = sum(k * s.degree for k, s in zip(ks, specs))
    additive = km_sum * log(T) / log(x)
    rhs = prime_part + additive
    lhs = np.zeros(count)
    for k, g in zip(ks, grids):
        lhs += k * g.values
    slack = rhs - lhs
    qs = {f"q{int(100*q):02d}": float(np.quantile(slack, q)) for q in quantiles}
    # short square tail set: primes between (log T)^{5(sum k^2 + 1)} and x
    thresh = log(T) ** (5.0 * (sum(k * k for k in ks) + 1.0))
    tail_range_empty = thresh >= x
    tail_measure = 0.0
    if not tail_range_empty:
        pt_tail = ps[(ps > thresh)]
        wt_tail = w.at_prime_squares(pt_tail[pt_tail.astype(np.float64) ** 2 <= x])
        pt_tail = pt_tail[pt_tail.astype(np.float64) ** 2 <= x]
        if len(pt_tail):
            pf = pt_tail.astype(np.float64)
            ln2 = 2.0 * np.log(pf)
            c0 = wt_tail * pf**-1.0 * np.exp(-1j * t0 * ln2)
            tail_vals = geom_sums(c0, np.exp(-1j * delta * ln2), count)
            tail_measure = float(np.mean(np.abs(tail_vals) > km_sum))
    return {
        "x": float(x),
        "T": float(T),
        "additive_term": additive,
        "min_slack": float(np.min(slack)),
        "mean_slack": float(np.mean(slack)),
        "quantiles": qs,
        "C_emp": float(-np.min(slack)),
        "clamped_count": sum(g.clamped_count for g in grids),
        "square_tail_range_empty": bool(tail_range_empty),
        "square_tail_measure": tail_measure,
    }

"""Evaluation of zeta, Hurwitz zeta, Dirichlet L and abelian Dedekind
products on and near the critical line.

One Euler-Maclaurin core covers the whole strip 0 < Re s <= 3 (it
natively handles the Hurwitz parameter); the Riemann-Siegel path takes
over for zeta on the critical line above RS_MIN_T, and tapered main sums
(rs.primitive_l_uniform) take over for character grids above the same
height.  Dirichlet L-values are assembled from Hurwitz evaluations, and
the character-decomposition identity is wired as a cross-check, not a
tautology: its per-character evaluations run with deliberately offset
cutoffs.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np
from scipy.special import digamma
from scipy.special import zeta as real_zeta

from .characters import character_group, euler_phi
from .errors import AccuracyError, DomainError, PoleError
from . import rs

RS_MIN_T = 1.0e4  # above this, sigma = 1/2 zeta goes through Riemann-Siegel
EM_MAX_T = 2.0e7  # declared ceiling of the Euler-Maclaurin core

_B2J = None


def _bern_over_fact(jmax):
    """B_{2j}/(2j)! for j = 0..jmax, via 2(-1)^{j+1} zeta(2j)/(2pi)^{2j}."""
    global _B2J
    if _B2J is None or len(_B2J) <= jmax:
        j = np.arange(0, max(jmax + 1, 70))
        vals = np.empty(len(j))
        vals[0] = 1.0
        jj = j[1:]
        vals[1:] = 2.0 * (-1.0) ** (jj + 1) * real_zeta(2 * jj, 1) / (2 * np.pi) ** (2 * jj)
        _B2J = vals
    return _B2J


def em_hurwitz_batch(s, alpha, eps=1e-12, m_pad=0):
    """Euler-Maclaurin values of zeta(s, alpha) for an array of s.

    Args:
        s: Complex array (0 < Re s <= 3 enforced by callers).
        alpha: Real parameter in (0, 1].
        eps: Absolute error target.
        m_pad: Extra direct-sum terms (used to decorrelate cross-checks).

    Returns:
        (values, achieved_bound)

    Raises:
        PoleError: If any s equals 1 exactly.
        AccuracyError: If the tail bound cannot reach eps.
    """
    s = np.asarray(s, dtype=np.complex128)
    if np.any(s == 1.0):
        raise PoleError("zeta(s, a) has its pole at s = 1")
    tmax = float(np.max(np.abs(s.imag))) if s.size else 0.0
    sig_min = float(np.min(s.real))
    M = int(max(32, np.ceil(0.28 * tmax))) + int(m_pad)
    b = _bern_over_fact(65)
    for _ in range(4):
        n = np.arange(M)
        base = n + alpha
        main = np.sum(np.exp(-np.multiply.outer(s, np.log(base))), axis=-1)
        Ma = M + alpha
        logMa = np.log(Ma)
        tail = np.exp((1.0 - s) * logMa) / (s - 1.0)
        half = 0.5 * np.exp(-s * logMa)
        # Bernoulli corrections: T_j = B_{2j}/(2j)! * (s)_{2j-1} * Ma^{-s-2j+1}
        corr = np.zeros_like(s)
        R = s * np.exp(-(s + 1.0) * logMa)  # (s)_1 * Ma^{-s-1}
        achieved = np.inf
        ok = False
        for j in range(1, 62):
            term = b[j] * R
            corr += term
            R = R * (s + (2 * j - 1)) * (s + 2 * j) / (Ma * Ma)
            est = np.max(np.abs(b[j + 1] * R)) * max(
                1.0, (tmax + 2 * j + 1) / (sig_min + 2 * j + 1)
            )
            if est < eps:
                achieved = est
                ok = True
                break
        if ok:
            return main + tail + half + corr, float(achieved)
        M = int(M * 1.7) + 16
    raise AccuracyError(
        f"Euler-Maclaurin tail stalls at bound {est:.3e} (target {eps:.1e})",
        achieved=float(est),
    )


def _check_strip(s):
    """Validate the strip; returns (s_array, was_scalar)."""
    scalar = np.isscalar(s) or getattr(s, "ndim", 0) == 0
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    if np.any(s.real <= 0.0) or np.any(s.real > 3.0):
        raise DomainError("evaluation strip is 0 < Re s <= 3")
    if np.any(np.abs(s.imag) > EM_MAX_T):
        raise AccuracyError("requested height beyond the supported ceiling")
    return s, scalar


def hurwitz_zeta(s, a=1, q=1, eps=1e-12):
    """zeta(s, a/q) = sum_{n >= 0} (n + a/q)^{-s}, continued to the strip.

    Args:
        s: Complex scalar or array, s != 1, 0 < Re s <= 3.
        a, q: Integers with 1 <= a <= q, gcd(a, q) = 1.
        eps: Absolute error target.

    Returns:
        Complex value(s).  The Riemann-Siegel path is used for a = q,
        Re s = 1/2, |Im s| > RS_MIN_T when it meets eps.
    """
    sarr, scalar = _check_strip(s)
    if not (1 <= a <= q):
        raise DomainError(f"need 1 <= a <= q, got a={a}, q={q}")
    if gcd(a, q) != 1:
        raise DomainError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    if np.any(sarr == 1.0):
        raise PoleError("zeta(s, a) has its pole at s = 1")
    if scalar:
        s0 = complex(sarr[0])
        if (
            a == q
            and s0.real == 0.5
            and abs(s0.imag) > RS_MIN_T
            and rs.rs_error_bound(abs(s0.imag)) < eps
        ):
            val = rs.zeta_rs_point(abs(s0.imag))
            return complex(np.conj(val)) if s0.imag < 0 else val
    vals, _ = em_hurwitz_batch(sarr, a / q, eps=eps)
    return complex(vals[0]) if scalar else vals


def zeta(s, eps=1e-12):
    return hurwitz_zeta(s, 1, 1, eps=eps)


def dirichlet_l(s, chi, eps=1e-12, _m_pad=0):
    """L(s, chi) assembled from phi(q) Hurwitz evaluations.

    q^-s sum_{a mod q} chi(a) zeta(s, a/q), with the Hurwitz batch sharing
    its cutoff planning across residues.  At s = 1 (non-principal chi) the
    cancelled pole is evaluated through digamma values instead.

    Raises:
        PoleError: At s = 1 for principal chi.
    """
    sarr, scalar = _check_strip(s)
    q = chi.modulus
    at_pole = sarr == 1.0
    if np.any(at_pole):
        if chi.is_principal:
            raise PoleError("L(s, chi_0) inherits the zeta pole at s = 1")
        units = [aa for aa in range(1, q + 1) if gcd(aa, q) == 1]
        pole_val = complex(-sum(chi(aa) * digamma(aa / q) for aa in units) / q)
        if scalar:
            return pole_val
    if q == 1:
        out = hurwitz_zeta(sarr, 1, 1, eps=eps)
        return complex(out[0]) if scalar else out
    work = sarr.copy()
    work[at_pole] = 2.0  # placeholder, overwritten below
    total = np.zeros(len(work), dtype=np.complex128)
    for aa in range(1, q + 1):
        if gcd(aa, q) != 1:
            continue
        vals, _ = em_hurwitz_batch(work, aa / q, eps=eps, m_pad=_m_pad)
        total += chi(aa) * vals
    out = q ** (-work) * total
    if np.any(at_pole):
        units = [aa for aa in range(1, q + 1) if gcd(aa, q) == 1]
        out[at_pole] = complex(-sum(chi(aa) * digamma(aa / q) for aa in units) / q)
    return complex(out[0]) if scalar else out


def hurwitz_from_characters(s, a, q, eps=1e-12):
    """The character-decomposition side: (q^s/phi(q)) sum_chi conj(chi(a)) L(s,chi).

    Cross-validation partner of hurwitz_zeta; every L-value inside runs
    with a distinct Euler-Maclaurin cutoff so the comparison is between
    genuinely different evaluations.
    """
    if gcd(a, q) != 1:
        raise DomainError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    sarr, scalar = _check_strip(s)
    chars = character_group(q)
    total = np.zeros(len(sarr), dtype=np.complex128)
    for idx, chi in enumerate(chars):
        lv = dirichlet_l(sarr, chi, eps=eps, _m_pad=7 * (idx + 1))
        total += np.conj(chi(a)) * lv
    out = q**sarr / euler_phi(q) * total
    return complex(out[0]) if scalar else out


def dedekind_abelian(s, chars, eps=1e-12):
    """Product of Dirichlet L-values over an explicit character list.

    The list defines the field: it must contain exactly one principal
    character, and the field degree equals the list length.
    """
    principal = sum(1 for c in chars if c.is_principal)
    if len(chars) == 0 or principal != 1:
        raise DomainError("character list must be nonempty with exactly one principal member")
    sarr, scalar = _check_strip(s)
    out = np.ones(len(sarr), dtype=np.complex128)
    for chi in chars:
        out = out * dirichlet_l(sarr, chi, eps=eps)
    return complex(out[0]) if scalar else out


@dataclass(frozen=True)
class LFunctionId:
    """Identifier of an L-function the lab can evaluate on grids.

    kind: "zeta" | "hurwitz" | "dirichlet" | "dedekind".
    For hurwitz: a/q; for dirichlet: (q, index) in canonical group order;
    for dedekind: tuple of (q, index) pairs of its character list.
    """

    kind: str
    a: int = 0
    q: int = 0
    index: int = 0
    components: tuple = ()

    def key(self):
        if self.kind == "zeta":
            return "zeta"
        if self.kind == "hurwitz":
            return f"hurwitz:{self.a}/{self.q}"
        if self.kind == "dirichlet":
            return f"dirichlet:{self.q}:{self.index}"
        if self.kind == "dedekind":
            return "dedekind:" + ";".join(f"{q}:{i}" for q, i in self.components)
        raise DomainError(f"unknown id kind {self.kind!r}")

    def __str__(self):
        return self.key()


def zeta_id():
    return LFunctionId(kind="zeta")


def hurwitz_id(a, q):
    if not (1 <= a <= q) or gcd(a, q) != 1:
        raise DomainError(f"hurwitz id needs 1 <= a <= q, gcd(a,q)=1; got {a}/{q}")
    return LFunctionId(kind="hurwitz", a=a, q=q)


def dirichlet_id(q, index):
    if not (0 <= index < euler_phi(q)):
        raise DomainError(f"character index {index} out of range for modulus {q}")
    return LFunctionId(kind="dirichlet", q=q, index=index)


def dedekind_id(q):
    """Field given by the trivial character together with the nonprincipal
    characters mod q.  This equals the Dedekind zeta of the q-th
    cyclotomic-type field exactly when every nonprincipal character mod q
    is primitive (true for q = 1, 3, 4, and any prime)."""
    comps = [(1, 0)] + [(q, i) for i in range(1, euler_phi(q))]
    return LFunctionId(kind="dedekind", components=tuple(comps))


def parse_lfunction(token):
    """One selector token -> (LFunctionId, exponent k).

    Grammar: zeta | hurwitz:a/q | dirichlet:q:index | dedekind:q, with an
    optional ^k suffix (k real > 0).
    """
    token = token.strip()
    k = 1.0
    if "^" in token:
        token, _, kpart = token.partition("^")
        try:
            k = float(kpart)
        except ValueError:
            raise DomainError(f"bad exponent {kpart!r} in selector") from None
        if k <= 0:
            raise DomainError(f"exponent must be positive, got {k}")
    parts = token.split(":")
    try:
        if parts[0] == "zeta" and len(parts) == 1:
            return zeta_id(), k
        if parts[0] == "hurwitz" and len(parts) == 2:
            a, q = parts[1].split("/")
            return hurwitz_id(int(a), int(q)), k
        if parts[0] == "dirichlet" and len(parts) == 3:
            return dirichlet_id(int(parts[1]), int(parts[2])), k
        if parts[0] == "dedekind" and len(parts) == 2:
            return dedekind_id(int(parts[1])), k
    except (ValueError, IndexError):
        pass
    raise DomainError(f"unparseable L-function selector {token!r}")


def parse_selector(text):
    """Comma-separated selector list -> (ids, ks)."""
    ids, ks = [], []
    for token in text.split(","):
        lid, k = parse_lfunction(token)
        ids.append(lid)
        ks.append(k)
    return ids, ks


@lru_cache(maxsize=64)
def id_characters(lid):
    """The (modulus, index) character objects an id is built from."""
    if lid.kind == "dirichlet":
        return (character_group(lid.q)[lid.index],)
    if lid.kind == "dedekind":
        return tuple(character_group(q)[i] for q, i in lid.components)
    if lid.kind == "hurwitz":
        return tuple(character_group(lid.q))
    return ()


def eval_id(lid, s, eps=1e-12):
    """Scalar value of the L-function behind an id (strip evaluation)."""
    if lid.kind == "zeta":
        return hurwitz_zeta(s, 1, 1, eps=eps)
    if lid.kind == "hurwitz":
        return hurwitz_zeta(s, lid.a, lid.q, eps=eps)
    if lid.kind == "dirichlet":
        return dirichlet_l(s, character_group(lid.q)[lid.index], eps=eps)
    if lid.kind == "dedekind":
        return dedekind_abelian(s, list(id_characters(lid)), eps=eps)
    raise DomainError(f"unknown id kind {lid.kind!r}")

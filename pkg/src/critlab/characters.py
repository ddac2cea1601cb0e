"""Dirichlet characters mod q with full value tables.

The group (Z/qZ)* is decomposed into cyclic components: for odd p^e one
component generated by a primitive root, for 2^e (e >= 3) the pair
<-1> x <5> of orders 2 and 2^(e-2), for 4 the single component <-1>.
Characters are enumerated in lexicographic order of their exponent
tuples on those generators (component order: the 2-part first, then odd
primes ascending), so "q:index" is a stable address.  Index 0 is always
the principal character.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np

from .errors import DomainError


def factorize(q):
    """Prime factorization of q as a list of (p, e) with p ascending."""
    out = []
    d = 2
    while d * d <= q:
        if q % d == 0:
            e = 0
            while q % d == 0:
                q //= d
                e += 1
            out.append((d, e))
        d += 1
    if q > 1:
        out.append((q, 1))
    return out


def euler_phi(q):
    phi = 1
    for p, e in factorize(q):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def _primitive_root(p, e):
    """A generator of (Z/p^eZ)* for odd prime p."""
    m = p**e
    phi = (p - 1) * p ** (e - 1)
    fac = [f for f, _ in factorize(phi)]
    for g in range(2, m):
        if gcd(g, m) != 1:
            continue
        if all(pow(g, phi // f, m) != 1 for f in fac):
            return g
    raise AssertionError(f"no primitive root mod {p}^{e}")


def _components(q):
    """Cyclic components of (Z/qZ)* as (modulus_part, generator, order)."""
    comps = []
    for p, e in factorize(q):
        m = p**e
        if p == 2:
            if e == 1:
                continue  # (Z/2Z)* trivial
            if e == 2:
                comps.append((m, 3, 2))  # <-1> mod 4
            else:
                comps.append((m, m - 1, 2))  # <-1>
                comps.append((m, 5, 1 << (e - 2)))  # <5>
        else:
            comps.append((m, _primitive_root(p, e), (p - 1) * p ** (e - 1)))
    return comps


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod q, held as its full length-q value table.

    values[n] is chi(n mod q); it is 0 exactly when gcd(n, q) > 1.
    """

    modulus: int
    index: int
    values: np.ndarray = field(compare=False)
    is_principal: bool

    def __call__(self, n):
        return self.values[int(n) % self.modulus]

    def __hash__(self):
        return hash((self.modulus, self.index))

    def __eq__(self, other):
        return (
            isinstance(other, DirichletCharacter)
            and self.modulus == other.modulus
            and self.index == other.index
        )

    @property
    def is_real(self):
        return bool(np.max(np.abs(self.values.imag)) < 1e-14)

    @property
    def parity(self):
        """0 if chi(-1) = 1 (even), 1 if chi(-1) = -1 (odd)."""
        return 0 if abs(self(-1) - 1) < 1e-9 else 1

    def conj(self):
        """The conjugate character, located by index in the same group."""
        for chi in character_group(self.modulus):
            if np.allclose(chi.values, np.conj(self.values), atol=1e-12):
                return chi
        raise AssertionError("conjugate character not found")

    def gauss_sum(self):
        m = np.arange(self.modulus)
        return complex(np.sum(self.values * np.exp(2j * np.pi * m / self.modulus)))

    def induced_modulus(self, d):
        """True if chi is induced by a character mod d (d | q)."""
        q = self.modulus
        if q % d != 0:
            return False
        for n in range(1, q):
            if gcd(n, q) != 1:
                continue
            m = n % d if n % d != 0 else d  # representative of n mod d
            for cand in range(m, q, d):
                if gcd(cand, q) == 1 and abs(self.values[cand] - self.values[n]) > 1e-10:
                    return False
        return True

    @property
    def is_primitive(self):
        q = self.modulus
        if q == 1:
            return True
        return not any(self.induced_modulus(d) for d in range(1, q) if q % d == 0)


@lru_cache(maxsize=256)
def character_group(q):
    """All phi(q) Dirichlet characters mod q in canonical order.

    Args:
        q: Modulus, >= 1.

    Returns:
        Tuple of DirichletCharacter, index 0 principal, enumerated in
        lexicographic order of generator-exponent tuples.

    Raises:
        DomainError: If q < 1.
    """
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    q = int(q)
    if q == 1:
        values = np.ones(1, dtype=np.complex128)
        return (DirichletCharacter(1, 0, values, True),)

    comps = _components(q)
    # discrete log of every unit on each component generator, via CRT
    units = [n for n in range(q) if gcd(n, q) == 1]
    dlogs = np.zeros((len(units), len(comps)), dtype=np.int64)
    for ci, (m, g, order) in enumerate(comps):
        table = {}
        x = 1
        for j in range(order):
            table[x] = j
            x = (x * g) % m
        for ui, n in enumerate(units):
            r = n % m
            # residues outside the table belong to the <-1> x <5> pair of a
            # 2^e part (e >= 3); those columns are rebuilt below
            dlogs[ui, ci] = table.get(r, -1)
    # 2^e, e>=3: every odd residue is (-1)^a * 5^b; recover (a, b)
    ci = 0
    while ci < len(comps):
        m, g, order = comps[ci]
        if m % 8 == 0 and g == m - 1:
            m2, g2, order2 = comps[ci + 1]
            pow5 = {}
            x = 1
            for j in range(order2):
                pow5[x] = j
                x = (x * 5) % m
            for ui, n in enumerate(units):
                r = n % m
                if r in pow5:
                    dlogs[ui, ci], dlogs[ui, ci + 1] = 0, pow5[r]
                else:
                    dlogs[ui, ci], dlogs[ui, ci + 1] = 1, pow5[(m - r) % m]
            ci += 2
        else:
            ci += 1

    orders = [order for (_, _, order) in comps]
    chars = []
    # lexicographic enumeration of exponent tuples
    n_chars = int(np.prod(orders))
    for idx in range(n_chars):
        rem, exps = idx, []
        for order in reversed(orders):
            exps.append(rem % order)
            rem //= order
        exps = exps[::-1]
        values = np.zeros(q, dtype=np.complex128)
        for ui, n in enumerate(units):
            ang = sum(e * dlogs[ui, ci] / orders[ci] for ci, e in enumerate(exps))
            values[n] = np.exp(2j * np.pi * ang)
        chars.append(DirichletCharacter(q, idx, values, idx == 0))
    assert len(chars) == euler_phi(q)
    return tuple(chars)


def principal_character(q):
    return character_group(q)[0]

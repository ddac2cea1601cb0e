"""Local coefficient data for degree-m Euler products.

A SatakeSpec maps each prime to its m local roots alpha(1,p)..alpha(m,p).
Degree-1 specs come from Dirichlet characters; higher degree tables are
user-supplied (CSV import below).  When `grc_asserted` is set the table
promises |alpha| <= 1 everywhere and |alpha| = 1 at unramified primes;
otherwise only the generic bound |alpha| <= p^(1/2 - 1/(m^2+1)) is
required.  Both are checked on construction for table-backed specs.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .characters import DirichletCharacter
from .errors import DataError, DomainError


@dataclass(frozen=True)
class SatakeSpec:
    """Degree-m local root table: prime -> m complex numbers."""

    degree: int
    label: str
    grc_asserted: bool
    _character: DirichletCharacter = field(default=None, repr=False)
    _table: dict = field(default=None, repr=False)

    def __hash__(self):
        return hash((self.degree, self.label))

    def __eq__(self, other):
        return (
            isinstance(other, SatakeSpec)
            and self.label == other.label
            and self.degree == other.degree
        )

    def alpha(self, p):
        """The m local roots at prime p (1d complex array)."""
        if self._character is not None:
            return np.array([self._character(p)], dtype=np.complex128)
        try:
            return self._table[int(p)]
        except KeyError:
            raise DataError(f"{self.label}: no local data at p={p}") from None

    def alpha_sum_at_primes(self, primes, power=1):
        """a(p^power) = sum_j alpha(j,p)^power for an array of primes."""
        primes = np.asarray(primes)
        if self._character is not None:
            vals = self._character.values[primes % self._character.modulus]
            return vals**power
        return np.array([np.sum(self.alpha(p) ** power) for p in primes])

    def has_data_below(self, x):
        if self._character is not None:
            return True
        return self._table and max(self._table) >= x - 1

    @property
    def is_real(self):
        if self._character is not None:
            return self._character.is_real
        return all(np.max(np.abs(v.imag)) < 1e-14 for v in self._table.values())


def satake_from_character(chi):
    """Degree-1 spec of a Dirichlet character: alpha(p) = chi(p).

    Ramified p | q get alpha(p) = chi(p) = 0, matching the Euler product
    of the (possibly imprimitive) character.
    """
    label = "zeta" if chi.modulus == 1 else f"dirichlet:{chi.modulus}:{chi.index}"
    return SatakeSpec(degree=1, label=label, grc_asserted=True, _character=chi)


def zeta_spec():
    """The Riemann zeta coefficient system (alpha(p) = 1 for all p)."""
    from .characters import character_group

    return satake_from_character(character_group(1)[0])


def _check_bounds(degree, table, grc_asserted):
    bound_exp = 0.5 - 1.0 / (degree**2 + 1)
    for p, al in table.items():
        if len(al) != degree:
            raise DomainError(f"p={p}: expected {degree} roots, got {len(al)}")
        mags = np.abs(al)
        if grc_asserted:
            if np.any(mags > 1 + 1e-9):
                raise DomainError(f"p={p}: |alpha| > 1 contradicts the asserted bound")
        elif np.any(mags > p**bound_exp * (1 + 1e-9)):
            raise DomainError(f"p={p}: |alpha| exceeds p^(1/2 - 1/(m^2+1))")


def satake_from_table(degree, label, table, grc_asserted=True):
    """Spec from an explicit dict prime -> sequence of m complex roots."""
    table = {int(p): np.asarray(v, dtype=np.complex128) for p, v in table.items()}
    _check_bounds(degree, table, grc_asserted)
    return SatakeSpec(degree=degree, label=label, grc_asserted=grc_asserted, _table=table)


def satake_from_csv(path, degree, label, grc_asserted=True):
    """Load a local root table from CSV columns (prime, j, re_alpha, im_alpha).

    j is 1-based; every prime present must carry all m rows.
    """
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if not row or row[0].strip().lower() in ("prime", "#"):
                continue
            p, j, re_a, im_a = int(row[0]), int(row[1]), float(row[2]), float(row[3])
            rows.setdefault(p, {})[j] = complex(re_a, im_a)
    table = {}
    for p, by_j in rows.items():
        if sorted(by_j) != list(range(1, degree + 1)):
            raise DataError(f"p={p}: need j = 1..{degree}, got {sorted(by_j)}")
        table[p] = np.array([by_j[j] for j in range(1, degree + 1)])
    return satake_from_table(degree, label, table, grc_asserted)


def lambda_pi(spec, n, primetable):
    """Prime-power coefficient: log(p) * sum_j alpha(j,p)^l at n = p^l, else 0.

    Args:
        spec: SatakeSpec.
        n: Integer >= 2.
        primetable: PrimeTable covering n.

    Returns:
        Complex value (0 off prime powers).
    """
    if n < 2:
        raise DomainError(f"lambda_pi needs n >= 2, got {n}")
    pk = primetable.prime_power(n)
    if pk is None:
        return 0j
    p, ell = pk
    return complex(np.log(p) * np.sum(spec.alpha(p) ** ell))


def a_pi(spec, p, ell=1):
    """Power-sum coefficient a(p^l) = sum_j alpha(j,p)^l."""
    return complex(np.sum(spec.alpha(p) ** ell))

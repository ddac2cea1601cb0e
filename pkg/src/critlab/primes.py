"""Prime sieving and von Mangoldt lookups.

The sieve is segmented so that limits up to 10^9 run in bounded memory:
only the base primes below sqrt(limit) and one fixed-size odd-only segment
are live at a time.  The resulting prime list itself is kept as an int64
array (the caller asked for it, so it is theirs to hold).
"""

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_SEGMENT = 1 << 21  # odd numbers per segment; ~2 MiB of bool workspace


def _simple_sieve(limit):
    """Plain Eratosthenes for the base primes below `limit` (exclusive)."""
    if limit <= 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit, dtype=bool)
    is_prime[:2] = False
    for i in range(2, int(limit**0.5) + 1):
        if is_prime[i]:
            is_prime[i * i :: i] = False
    return np.nonzero(is_prime)[0].astype(np.int64)


def sieve_primes(limit):
    """All primes below `limit`, as a PrimeTable.

    Args:
        limit: Exclusive upper bound, >= 2.

    Returns:
        PrimeTable with the complete sorted prime list below `limit`.

    Raises:
        DomainError: If limit < 2.
    """
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    limit = int(limit)
    if limit <= 1 << 22:
        return PrimeTable(limit=limit, primes=_simple_sieve(limit))

    base = _simple_sieve(int(limit**0.5) + 1)
    odd_base = base[base > 2]
    chunks = [np.array([2], dtype=np.int64)] if limit > 2 else []
    # segments cover odd numbers [low, low + 2*_SEGMENT)
    for low in range(3, limit, 2 * _SEGMENT):
        high = min(low + 2 * _SEGMENT, limit)
        n_odd = (high - low + 1) // 2
        seg = np.ones(n_odd, dtype=bool)  # seg[i] ~ low + 2i
        for p in odd_base:
            p = int(p)
            start = max(p * p, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start >= high:
                continue
            seg[(start - low) // 2 :: p] = False
        chunks.append((low + 2 * np.nonzero(seg)[0]).astype(np.int64))
    primes = np.concatenate(chunks)
    return PrimeTable(limit=limit, primes=primes[primes < limit])


@dataclass
class PrimeTable:
    """Primes below `limit` plus prime-power lookups.

    Attributes:
        limit: Exclusive bound of the sieve.
        primes: Sorted int64 array of all primes below limit.
    """

    limit: int
    primes: np.ndarray

    def count(self):
        return len(self.primes)

    def is_prime(self, n):
        n = int(n)
        if n >= self.limit:
            raise DomainError(f"{n} is beyond the sieve limit {self.limit}")
        i = bisect_right(self.primes, n) - 1
        return i >= 0 and self.primes[i] == n

    def prime_power(self, n):
        """Decompose n = p**k, or return None if n is not a prime power."""
        n = int(n)
        if n < 2:
            return None
        for k in range(n.bit_length() - 1, 0, -1):
            p = round(n ** (1.0 / k))
            for cand in (p - 1, p, p + 1):
                if cand >= 2 and cand**k == n and self.is_prime(cand):
                    return cand, k
        return None

    def von_mangoldt(self, n):
        """log p if n = p^k (k >= 1), else 0."""
        pk = self.prime_power(n)
        return float(np.log(pk[0])) if pk else 0.0

    def von_mangoldt_array(self, nmax):
        """Vector of von Mangoldt values for n = 0..nmax."""
        if nmax >= self.limit:
            raise DomainError(f"nmax {nmax} beyond sieve limit {self.limit}")
        lam = np.zeros(nmax + 1)
        for p in self.primes[self.primes <= nmax]:
            p = int(p)
            logp = np.log(p)
            pk = p
            while pk <= nmax:
                lam[pk] = logp
                pk *= p
        return lam

    def primes_leq(self, x):
        """Sorted array of primes <= x (x below the sieve limit)."""
        if x >= self.limit:
            raise DomainError(f"{x} is beyond the sieve limit {self.limit}")
        return self.primes[: bisect_right(self.primes, x)]

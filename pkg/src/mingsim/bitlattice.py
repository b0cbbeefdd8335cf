"""Cyclic bit-lattice geometry.

A register of n binary sites is identified with the index set
[0, 2**n - 1] through

    index = sum_k  d_k * 2**k ,

so site k carries the digit d_k = (index >> k) & 1.  Digit strings are
written site 0 first: for n = 5 the index 3 reads "11000".

The one-step lattice motion cycles the digits,

    (d_0, d_1, ..., d_{n-1})  ->  (d_{n-1}, d_0, ..., d_{n-2}),

which on indices is multiplication by 2 modulo 2**n - 1, with the two
constant configurations 0 and 2**n - 1 left fixed.  For prime n every
non-fixed index lies on an orbit of length exactly n, giving the
partition into q = (2**n - 2)/n cyclic orbits plus the two fixed points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DenseBoundError, NonPrimeOrderError

# Dense tables and dense state vectors are only built up to this many sites
# (2**13 = 8192 basis states).  Index arithmetic itself has no bound.
DENSE_MAX_SITES = 13


def is_prime(n: int) -> bool:
    """Trial-division primality check, adequate for lattice sizes used here."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def require_prime(n: int) -> None:
    if not is_prime(n):
        raise NonPrimeOrderError(f"lattice size must be prime, got n={n}")


def require_dense(n: int) -> None:
    if n > DENSE_MAX_SITES:
        raise DenseBoundError(
            f"n={n} exceeds dense-mode bound of {DENSE_MAX_SITES} sites"
        )


@dataclass(frozen=True)
class BitConfig:
    """One basis configuration of the n-site register."""

    n: int
    index: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one site, got n={self.n}")
        if not 0 <= self.index < (1 << self.n):
            raise ValueError(f"index {self.index} out of range for n={self.n}")

    @property
    def digits(self) -> tuple[int, ...]:
        """Digits (d_0, ..., d_{n-1}), least significant site first."""
        return tuple((self.index >> k) & 1 for k in range(self.n))

    def bitstring(self) -> str:
        """Digit string with site 0 leftmost, e.g. index 3 at n=5 -> '11000'."""
        return "".join(str(d) for d in self.digits)

    @classmethod
    def from_digits(cls, digits) -> "BitConfig":
        ds = tuple(digits)
        idx = 0
        for k, d in enumerate(ds):
            if d not in (0, 1):
                raise ValueError(f"digit at site {k} must be 0 or 1, got {d}")
            idx |= d << k
        return cls(n=len(ds), index=idx)

    @classmethod
    def from_bitstring(cls, s: str) -> "BitConfig":
        return cls.from_digits(int(c) for c in s)


def shift_index(index: int, n: int, steps: int = 1) -> int:
    """Apply the digit cycle `steps` times to a raw index.

    Fixed points 0 and 2**n - 1 are invariant; everything else is
    index * 2**steps mod (2**n - 1).  Negative steps run the cycle backwards.
    """
    modulus = (1 << n) - 1
    if index == 0 or index == modulus:
        return index
    return (index * pow(2, steps % n, modulus)) % modulus


def shift(config: BitConfig, steps: int = 1) -> BitConfig:
    """Cyclic digit shift: (d_0, .., d_{n-1}) -> (d_{n-1}, d_0, .., d_{n-2})."""
    return BitConfig(config.n, shift_index(config.index, config.n, steps))


@dataclass(frozen=True)
class OrbitDecomposition:
    """Partition of [0, 2**n - 1] into shift orbits.

    Cyclic orbits get ids 0..q-1 ordered by their minimal member (the
    representative); the two fixed points 0 and 2**n - 1 carry the
    sentinel id -1.  ``offset`` holds the phase m with
    index = representative * 2**m mod (2**n - 1) for orbit members, and
    0 for the fixed points.
    """

    n: int
    q: int
    representatives: tuple[int, ...]
    orbit_id: np.ndarray
    offset: np.ndarray

    def __post_init__(self) -> None:
        self.orbit_id.setflags(write=False)
        self.offset.setflags(write=False)

    @property
    def fixed_points(self) -> tuple[int, int]:
        return (0, (1 << self.n) - 1)

    def orbit_of(self, index: int) -> tuple[int, int]:
        """Return (orbit id, phase offset m) for an index; fixed points give (-1, 0)."""
        return int(self.orbit_id[index]), int(self.offset[index])

    def orbit_members(self, oid: int) -> list[int]:
        """Members of cyclic orbit `oid` ordered by phase offset 0..n-1."""
        rep = self.representatives[oid]
        modulus = (1 << self.n) - 1
        out = []
        k = rep
        for _ in range(self.n):
            out.append(k)
            k = (k * 2) % modulus
        return out


def decompose_orbits(n: int) -> OrbitDecomposition:
    """Build the full orbit table for prime n within the dense bound.

    Every non-fixed index belongs to exactly one orbit of length n; the
    representative is the minimal index on the orbit and representatives
    are listed in increasing order.
    """
    require_prime(n)
    require_dense(n)
    size = 1 << n
    modulus = size - 1
    orbit_id = np.full(size, -1, dtype=np.int64)
    offset = np.zeros(size, dtype=np.int64)
    reps: list[int] = []
    seen = np.zeros(size, dtype=bool)
    seen[0] = seen[modulus] = True
    for start in range(1, modulus):
        if seen[start]:
            continue
        members = []
        k = start
        while True:
            members.append(k)
            seen[k] = True
            k = (k * 2) % modulus
            if k == start:
                break
        # prime n forces full-length orbits off the fixed points
        assert len(members) == n, (n, start, members)
        oid = len(reps)
        reps.append(start)
        for m, idx in enumerate(members):
            orbit_id[idx] = oid
            offset[idx] = m
    q = len(reps)
    assert q * n == size - 2
    return OrbitDecomposition(
        n=n, q=q, representatives=tuple(reps), orbit_id=orbit_id, offset=offset
    )

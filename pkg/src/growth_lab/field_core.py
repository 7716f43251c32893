"""Prime field plumbing: primality, primitive roots, discrete logs, inverses."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from growth_lab.errors import CapabilityError

# Deterministic Miller-Rabin: these bases are sufficient for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

MAX_TABLE_PRIME = 1 << 27


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division, ascending."""
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _require_prime(p: int) -> None:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"modulus must be prime, got {p!r}")


def multiplicative_order_is_full(g: int, p: int, factors=None) -> bool:
    """True iff ``g`` generates the multiplicative group mod ``p``."""
    if g % p == 0:
        return False
    if factors is None:
        factors = prime_factors(p - 1)
    return all(pow(g, (p - 1) // q, p) != 1 for q in factors)


def find_primitive_root(p: int) -> int:
    """Smallest generator of F_p^*."""
    _require_prime(p)
    p = int(p)
    if p == 2:
        return 1
    factors = prime_factors(p - 1)
    for g in range(2, p):
        if multiplicative_order_is_full(g, p, factors):
            return g
    raise AssertionError(f"no primitive root found mod {p}")  # unreachable for prime p


def mod_inverse(p: int, x: int) -> int:
    x %= p
    if x == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(x, -1, p)


@dataclass(frozen=True)
class PrimeField:
    p: int
    g: int

    def __post_init__(self):
        _require_prime(self.p)
        if not 1 <= self.g <= self.p - 1:
            raise ValueError(f"generator {self.g} outside [1, {self.p - 1}]")
        if not multiplicative_order_is_full(self.g, self.p):
            raise ValueError(f"{self.g} is not a primitive root mod {self.p}")

    @classmethod
    def of(cls, p: int) -> "PrimeField":
        return cls(int(p), find_primitive_root(p))

    @property
    def order(self) -> int:
        return self.p - 1


@dataclass(frozen=True, eq=False)
class DlogTable:
    """Full discrete-log index of F_p^* with respect to ``field.g``.

    ``log_of[x]`` is the exponent of ``x`` (``log_of[0] == -1``) and
    ``power[k]`` is ``g**k mod p`` for ``k`` in ``[0, p-2]``.
    """

    field: PrimeField
    log_of: np.ndarray = field(repr=False)
    power: np.ndarray = field(repr=False)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def g(self) -> int:
        return self.field.g

    def log(self, x: int) -> int:
        x %= self.p
        if x == 0:
            raise ValueError("discrete log of 0 is undefined")
        return int(self.log_of[x])

    def exp(self, k: int) -> int:
        return int(self.power[k % (self.p - 1)])


def build_dlog_table(field_: PrimeField, *, block: int = 4096) -> DlogTable:
    """Discrete-log table built from one pass over the powers of g.

    Powers are generated in blocks: the first block by repeated
    multiplication, later blocks by multiplying the previous one by
    ``g**block`` elementwise.
    """
    p, g = field_.p, field_.g
    if p >= MAX_TABLE_PRIME:
        raise CapabilityError(f"p={p} exceeds the dlog table cap 2**27")
    n = p - 1
    power = np.empty(n, dtype=np.int64)
    head = min(block, n)
    x = 1
    for k in range(head):
        power[k] = x
        x = x * g % p
    step = pow(g, head, p)
    start = head
    while start < n:
        stop = min(start + head, n)
        power[start:stop] = power[start - head:stop - head] * step % p
        start = stop
    log_of = np.full(p, -1, dtype=np.int64)
    log_of[power] = np.arange(n, dtype=np.int64)
    power.setflags(write=False)
    log_of.setflags(write=False)
    return DlogTable(field_, log_of, power)

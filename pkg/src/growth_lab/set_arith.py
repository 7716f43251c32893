"""Exact arithmetic on subsets of F_p.

Every set is an :class:`FpSet`: a sorted element array plus a dense
membership mask of length p. Pairwise kernels enumerate ``A x B`` in
row chunks, so memory stays bounded while the work is ``O(|A||B|)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as cartesian
from typing import Iterable, NamedTuple, Union

import numpy as np

from growth_lab.errors import AuditFailure
from growth_lab.field_core import is_prime

# Upper bound on the number of pair results materialized at once.
_CHUNK = 1 << 22

_is_prime_cached = lru_cache(maxsize=256)(is_prime)


class FpSet:
    """Immutable subset of F_p with canonical residues in ``[0, p-1]``."""

    __slots__ = ("p", "_elements", "_mask")

    def __init__(self, p: int, members: Iterable[int] = ()):
        p = int(p)
        if not _is_prime_cached(p):
            raise ValueError(f"modulus must be prime, got {p}")
        if isinstance(members, np.ndarray):
            arr = np.mod(members.astype(np.int64), p)
        else:
            arr = np.fromiter((int(m) % p for m in members), dtype=np.int64)
        arr = np.unique(arr)
        self._init(p, arr, None)

    def _init(self, p, elements, mask):
        elements.setflags(write=False)
        self.p = p
        self._elements = elements
        self._mask = mask

    @classmethod
    def from_mask(cls, p: int, mask: np.ndarray) -> "FpSet":
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (p,):
            raise ValueError(f"mask must have shape ({p},), got {mask.shape}")
        obj = cls.__new__(cls)
        mask = mask.copy()
        mask.setflags(write=False)
        obj._init(int(p), np.flatnonzero(mask).astype(np.int64), mask)
        return obj

    @classmethod
    def _from_sorted(cls, p: int, elements: np.ndarray) -> "FpSet":
        obj = cls.__new__(cls)
        obj._init(int(p), np.ascontiguousarray(elements, dtype=np.int64), None)
        return obj

    @classmethod
    def full(cls, p: int) -> "FpSet":
        return cls._from_sorted(p, np.arange(p, dtype=np.int64))

    @property
    def elements(self) -> np.ndarray:
        return self._elements

    @property
    def mask(self) -> np.ndarray:
        if self._mask is None:
            mask = np.zeros(self.p, dtype=bool)
            mask[self._elements] = True
            mask.setflags(write=False)
            self._mask = mask
        return self._mask

    @property
    def card(self) -> int:
        return int(self._elements.size)

    def __len__(self):
        return self.card

    def __iter__(self):
        return iter(self._elements.tolist())

    def __contains__(self, x) -> bool:
        return bool(self.mask[int(x) % self.p])

    def __eq__(self, other):
        if not isinstance(other, FpSet):
            return NotImplemented
        return self.p == other.p and np.array_equal(self._elements, other._elements)

    def __hash__(self):
        return hash((self.p, self._elements.tobytes()))

    def __repr__(self):
        shown = self._elements[:12].tolist()
        tail = ", ..." if self.card > 12 else ""
        return f"FpSet(p={self.p}, {{{', '.join(map(str, shown))}{tail}}}, card={self.card})"

    def tolist(self) -> list[int]:
        return self._elements.tolist()

    def issubset(self, other: "FpSet") -> bool:
        _same_field(self, other)
        return bool(other.mask[self._elements].all())

    def intersection(self, other: "FpSet") -> "FpSet":
        _same_field(self, other)
        return FpSet._from_sorted(self.p, self._elements[other.mask[self._elements]])

    def union(self, other: "FpSet") -> "FpSet":
        _same_field(self, other)
        return FpSet._from_sorted(self.p, np.union1d(self._elements, other._elements))

    def without(self, *values: int) -> "FpSet":
        drop = np.mod(np.asarray(values, dtype=np.int64), self.p)
        return FpSet._from_sorted(self.p, np.setdiff1d(self._elements, drop))


def _same_field(A: FpSet, B: FpSet) -> None:
    if A.p != B.p:
        raise ValueError(f"modulus mismatch: {A.p} != {B.p}")


def _pairwise(A: FpSet, B: FpSet, combine) -> FpSet:
    _same_field(A, B)
    p = A.p
    out = np.zeros(p, dtype=bool)
    if A.card == 0 or B.card == 0:
        return FpSet._from_sorted(p, np.empty(0, np.int64))
    a, b = A.elements, B.elements
    if a.size < b.size:
        a, b = b, a
    rows = max(1, _CHUNK // b.size)
    for i in range(0, a.size, rows):
        out[combine(a[i:i + rows, None], b[None, :]) % p] = True
    return FpSet.from_mask(p, out)


def sumset(A: FpSet, B: FpSet) -> FpSet:
    _same_field(A, B)
    small, big = (A, B) if A.card <= B.card else (B, A)
    # Rotating the mask costs O(p) per element of the smaller set.
    if small.card and small.card * A.p < 8 * A.card * B.card:
        out = np.zeros(A.p, dtype=bool)
        for s in small:
            out |= np.roll(big.mask, s)
        return FpSet.from_mask(A.p, out)
    return _pairwise(A, B, np.add)


def product_set(A: FpSet, B: FpSet) -> FpSet:
    return _pairwise(A, B, np.multiply)


def affine_image(A: FpSet, c: int, d: int) -> FpSet:
    """``{c*a + d : a in A}``."""
    p = A.p
    return FpSet(p, (A.elements * (c % p) + d % p) % p)


def negation(A: FpSet) -> FpSet:
    return affine_image(A, -1, 0)


def difference_set(A: FpSet, B: FpSet) -> FpSet:
    return sumset(A, negation(B))


def shifted_product(A: FpSet) -> FpSet:
    """A(A+1) = {a(a'+1) : a, a' in A}."""
    return product_set(A, affine_image(A, 1, 1))


def two_a_minus_two_a(A: FpSet) -> FpSet:
    twice = sumset(A, A)
    return difference_set(twice, twice)


def reciprocals(A: FpSet) -> FpSet:
    """Elementwise inverses of the nonzero members of A."""
    p = A.p
    return FpSet(p, [pow(int(a), -1, p) for a in A if a])


@dataclass(frozen=True)
class PairRelation:
    """A set E of pairs inside ``left x right``."""

    left: FpSet
    right: FpSet
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        _same_field(self.left, self.right)
        p = self.left.p
        canon = tuple((int(a) % p, int(b) % p) for a, b in self.pairs)
        if len(set(canon)) != len(canon):
            raise ValueError("duplicate pairs in relation")
        for a, b in canon:
            if a not in self.left or b not in self.right:
                raise ValueError(f"pair {(a, b)} is not in left x right")
        object.__setattr__(self, "pairs", canon)

    @classmethod
    def full(cls, left: FpSet, right: FpSet) -> "PairRelation":
        return cls(left, right, tuple(cartesian(left.tolist(), right.tolist())))

    @property
    def p(self) -> int:
        return self.left.p

    def __len__(self):
        return len(self.pairs)


def restricted_difference(E: PairRelation) -> FpSet:
    """``{a - b : (a, b) in E}``."""
    p = E.p
    if not E.pairs:
        return FpSet(p)
    arr = np.asarray(E.pairs, dtype=np.int64)
    return FpSet(p, arr[:, 0] - arr[:, 1])


def ratio_set(A1: FpSet) -> FpSet:
    """(A1 - A1) / (A1 - A1), denominators restricted to nonzero values."""
    if A1.card < 2:
        raise ValueError("ratio set needs at least two elements")
    diffs = difference_set(A1, A1)
    return product_set(diffs, reciprocals(diffs))


@dataclass(frozen=True)
class AllOfFp:
    """Branch of the dichotomy where the ratio set is the whole field."""

    p: int


class Quadruple(NamedTuple):
    b1: int
    b2: int
    b3: int
    b4: int

    def check_value(self, p: int) -> int:
        """(b1 - b2) / (b3 - b4) - 1 mod p."""
        return ((self.b1 - self.b2) * pow(self.b3 - self.b4, -1, p) - 1) % p


def gk_dichotomy(A1: FpSet) -> Union[AllOfFp, Quadruple]:
    """Either the ratio set of A1 is F_p, or a witness quadruple escapes it.

    The quadruple returned is the lexicographically first one in ``A1**4``
    with ``b3 != b4`` whose check value lies outside the ratio set.
    """
    ratios = ratio_set(A1)
    p = A1.p
    if ratios.card == p:
        return AllOfFp(p)
    elems = A1.tolist()
    inverses = {}
    for b1, b2, b3, b4 in cartesian(elems, repeat=4):
        if b3 == b4:
            continue
        d = b3 - b4
        if d not in inverses:
            inverses[d] = pow(d, -1, p)
        if ((b1 - b2) * inverses[d] - 1) % p not in ratios:
            return Quadruple(b1, b2, b3, b4)
    raise AuditFailure(
        "ratio set is a proper subset of F_p yet no escaping quadruple exists",
        p=p, A1=elems, ratio_set_size=ratios.card,
    )

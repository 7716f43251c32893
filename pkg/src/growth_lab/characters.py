"""Multiplicative characters mod p and the J-count of x^-1 y (z^-1 t - 1) = 1.

Characters are indexed by ``j`` in ``[0, p-2]``:
``chi_j(x) = exp(2*pi*i * j*log(x) / (p-1))`` with ``chi_j(0) = 0``.
Sums over all ``j`` at once are discrete Fourier transforms of histograms
of discrete logs, which is how the batch routines evaluate them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from growth_lab.errors import AuditFailure
from growth_lab.field_core import DlogTable, PrimeField, build_dlog_table
from growth_lab.set_arith import FpSet, affine_image, product_set

BOUND_RTOL = 1e-9
DECOMPOSITION_RTOL = 1e-6
WEIL_ATOL = 1e-6


@dataclass(frozen=True, eq=False)
class CharacterTable:
    dlog: DlogTable

    @classmethod
    def of(cls, p: int) -> "CharacterTable":
        return cls(build_dlog_table(PrimeField.of(p)))

    @property
    def p(self) -> int:
        return self.dlog.p

    @property
    def order(self) -> int:
        return self.dlog.p - 1

    @property
    def root_of_unity(self) -> complex:
        return cmath.exp(2j * math.pi / self.order)

    def log_histogram(self, values) -> np.ndarray:
        """Counts of discrete logs of the nonzero entries of ``values``."""
        values = np.asarray(values, dtype=np.int64) % self.p
        values = values[values != 0]
        return np.bincount(self.dlog.log_of[values], minlength=self.order).astype(np.float64)

    def sums_over_characters(self, hist) -> np.ndarray:
        """``S[j] = sum_k hist[k] * chi_j(g**k)`` for every j."""
        return np.fft.ifft(np.asarray(hist, dtype=np.float64)) * self.order


def char_eval(table: CharacterTable, j: int, x: int) -> complex:
    x %= table.p
    if x == 0:
        return 0j
    n = table.order
    k = (j * int(table.dlog.log_of[x])) % n
    if k == 0:
        return 1 + 0j
    return cmath.exp(2j * math.pi * k / n)


def _char_sum_args(C: FpSet, T: FpSet) -> np.ndarray:
    """All values ``z^-1 t - 1`` for ``z in C, t in T`` (zeros included)."""
    if 0 in C:
        raise ValueError("0 in C: z^-1 is undefined")
    p = C.p
    zinv = np.array([pow(int(z), -1, p) for z in C], dtype=np.int64)
    return ((zinv[:, None] * T.elements[None, :]) % p - 1) % p


def incomplete_char_sum(table: CharacterTable, j: int, C: FpSet, T: FpSet) -> complex:
    """``sum_{z in C} sum_{t in T} chi_j(z^-1 t - 1)``, summed with ``math.fsum``."""
    args = _char_sum_args(C, T).ravel()
    args = args[args != 0]
    if args.size == 0:
        return 0j
    n = table.order
    k = (j * table.dlog.log_of[args]) % n
    angle = 2 * np.pi * k / n
    return complex(math.fsum(np.cos(angle)), math.fsum(np.sin(angle)))


def incomplete_char_sums(table: CharacterTable, C: FpSet, T: FpSet) -> np.ndarray:
    """The incomplete sum for every character index at once (via FFT)."""
    return table.sums_over_characters(table.log_histogram(_char_sum_args(C, T).ravel()))


def _check_inverted(S: FpSet, name: str) -> None:
    if 0 in S:
        raise ValueError(f"0 in {name}: it appears inverted in the congruence")


def count_solutions_brute(X: FpSet, Y: FpSet, Z: FpSet, T: FpSet) -> int:
    """Count (x, y, z, t) in X*Y*Z*T with x^-1 y (z^-1 t - 1) = 1 mod p.

    Every quadruple is tested. The congruence is checked in the form
    ``x^-1 y == (z^-1 t - 1)^-1``: left values range over X*Y, right
    values over Z*T, and the comparison grid is walked in chunks.
    Inverses come from Fermat's little theorem, independent of any table.
    """
    _check_inverted(X, "X")
    _check_inverted(Z, "Z")
    p = X.p
    if min(X.card, Y.card, Z.card, T.card) == 0:
        return 0
    dtype = np.int32
    left = np.array([pow(x, p - 2, p) * y % p for x in X for y in Y], dtype=dtype)
    right = []
    for z in Z:
        zinv = pow(z, p - 2, p)
        for t in T:
            w = (zinv * t - 1) % p
            right.append(pow(w, p - 2, p) if w else -1)
    right = np.array(right, dtype=dtype)
    total = 0
    rows = max(1, (1 << 23) // right.size)
    for i in range(0, left.size, rows):
        total += int(np.count_nonzero(left[i:i + rows, None] == right[None, :]))
    return total


def count_solutions_fast(X: FpSet, Y: FpSet, Z: FpSet, T: FpSet) -> int:
    """Same count as :func:`count_solutions_brute` in ``O(|Y||Z||T|)``.

    Rearranged as ``y (z^-1 t - 1) in X``, tested against X's mask.
    """
    _check_inverted(X, "X")
    _check_inverted(Z, "Z")
    p = X.p
    if min(X.card, Y.card, Z.card, T.card) == 0:
        return 0
    w = np.bincount(_char_sum_args(Z, T).ravel(), minlength=p)
    support = np.flatnonzero(w)
    hits = X.mask[(Y.elements[:, None] * support[None, :]) % p]
    return int((hits * w[support][None, :]).sum())


def count_solutions_characters(table: CharacterTable, X: FpSet, Y: FpSet,
                               Z: FpSet, T: FpSet) -> float:
    """J from the orthogonality of characters.

    ``J = 1/(p-1) * sum_chi conj(S_X(chi)) S_Y(chi) S_ZT(chi)`` where
    ``S_X = sum_x chi(x)`` and so on; ``chi(x^-1)`` is ``conj(chi(x))``.
    """
    _check_inverted(X, "X")
    sx = table.sums_over_characters(table.log_histogram(X.elements))
    sy = table.sums_over_characters(table.log_histogram(Y.elements))
    szt = incomplete_char_sums(table, Z, T)
    terms = np.conj(sx) * sy * szt
    return math.fsum(terms.real) / table.order


@dataclass
class JAudit:
    p: int
    A: FpSet = field(repr=False)
    B: FpSet = field(repr=False)
    C: FpSet = field(repr=False)
    AB: FpSet = field(repr=False)
    T: FpSet = field(repr=False)
    J: int
    lower: int
    upper_main: float
    upper_error: float
    char_worst: float
    weil_bound: float
    min_bound: float
    J_characters: float | None = None

    @property
    def upper(self) -> float:
        return self.upper_main + self.upper_error

    @property
    def ratio(self) -> float:
        """|AB| |(A+1)C| / min{p|A|, |A|^2 |B||C| / p}."""
        return self.AB.card * self.T.card / self.min_bound

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "card_A": self.A.card,
            "card_B": self.B.card,
            "card_C": self.C.card,
            "card_AB": self.AB.card,
            "card_T": self.T.card,
            "J": self.J,
            "lower": self.lower,
            "upper_main": self.upper_main,
            "upper_error": self.upper_error,
            "upper": self.upper,
            "char_worst": self.char_worst,
            "weil_bound": self.weil_bound,
            "min_bound": self.min_bound,
            "ratio": self.ratio,
            "J_characters": self.J_characters,
        }


def theorem2_audit(A: FpSet, B: FpSet, C: FpSet, table: CharacterTable | None = None,
                   *, decomposition: bool | None = None) -> JAudit:
    """Audit every inequality used to bound |AB| |(A+1)C| from below.

    ``decomposition`` controls the character-sum recomputation of J; by
    default it runs for ``p <= 101`` and sets of size at most 8.
    """
    p = A.p
    for name, S in (("A", A), ("B", B), ("C", C)):
        if S.p != p:
            raise ValueError(f"modulus mismatch in {name}")
        if 0 in S:
            raise ValueError(f"{name} must lie in F_p^*")
    if p - 1 in A:
        raise ValueError("p-1 in A puts 0 in A+1")
    if table is None:
        table = CharacterTable.of(p)

    AB = product_set(A, B)
    T = product_set(affine_image(A, 1, 1), C)
    J = count_solutions_brute(AB, B, C, T)
    J_fast = count_solutions_fast(AB, B, C, T)
    if J != J_fast:
        raise AuditFailure("brute and fast J counts disagree", p=p, brute=J, fast=J_fast)

    nA, nB, nC, nAB, nT = A.card, B.card, C.card, AB.card, T.card
    lower = nA * nB * nC
    upper_main = nAB * nB * nC * nT / (p - 1)
    upper_error = math.sqrt(p * nC * nT * nAB * nB)
    sums = incomplete_char_sums(table, C, T)
    char_worst = float(np.abs(sums[1:]).max()) if p > 2 else 0.0
    weil_bound = math.sqrt(p * nC * nT)
    min_bound = min(p * nA, nA * nA * nB * nC / p)

    if J < lower:
        raise AuditFailure("J below |A||B||C|", p=p, J=J, lower=lower)
    if J > (upper_main + upper_error) * (1 + BOUND_RTOL):
        raise AuditFailure("J above the character-sum upper bound",
                           p=p, J=J, upper=upper_main + upper_error)

    audit = JAudit(p, A, B, C, AB, T, J, lower, upper_main, upper_error,
                   char_worst, weil_bound, min_bound)
    if decomposition is None:
        decomposition = p <= 101 and max(nA, nB, nC) <= 8
    if decomposition:
        J_chars = count_solutions_characters(table, AB, B, C, T)
        if abs(J_chars - J) > DECOMPOSITION_RTOL * max(1, J):
            raise AuditFailure("character decomposition disagrees with the exact J",
                               p=p, J=J, J_characters=J_chars)
        audit.J_characters = J_chars
    return audit

"""Exact point-line incidences for the grid AB x (A+1)C.

The configuration pairs the point grid ``{(x, y) : x in AB, y in (A+1)C}``
with the lines ``y = (z/t) x + z`` for ``z in C, t in B``. The line for
``(z, t)`` passes through ``(a t, (a+1) z)`` for every ``a in A``, so it
carries at least ``|A|`` grid points.

All arithmetic is exact. Integer inputs of moderate size take a numpy
int64 path (bounds are checked before use); anything else goes through
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from growth_lab.errors import AuditFailure, CapabilityError

DEFAULT_C_ST = 2.5

# Work limits (number of elementary evaluations) for each counting method.
BRUTE_LIMIT = 200_000
LINES_LIMIT = 50_000_000
_INT64_SAFE = 1 << 62


def rational_canonical(num: int, den: int) -> Fraction:
    """Reduced fraction with positive denominator."""
    if den == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return Fraction(int(num), int(den))


def as_rational(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass int, Fraction or 'p/q' strings")
    return Fraction(value)


def _rational_set(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(sorted({as_rational(v) for v in values}))


@dataclass(frozen=True, eq=False)
class IncidenceConfig:
    """A grid of points ``xs x ys`` and a family of non-vertical lines.

    ``lines`` holds ``(slope, intercept)`` pairs. For configurations built
    by :func:`build_elekes_config`, ``sources[i]`` is the ``(z, t)`` that
    produced ``lines[i]`` and ``A, B, C`` are the generating sets.
    """

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]
    lines: tuple[tuple[Fraction, Fraction], ...]
    sources: tuple[tuple[Fraction, Fraction], ...] | None = None
    A: tuple[Fraction, ...] = ()
    B: tuple[Fraction, ...] = ()
    C: tuple[Fraction, ...] = ()
    _ints: dict = field(default_factory=dict, repr=False)

    @property
    def n_points(self) -> int:
        return len(self.xs) * len(self.ys)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    def points(self) -> Iterator[tuple[Fraction, Fraction]]:
        for x in self.xs:
            for y in self.ys:
                yield x, y

    def has_point(self, x: Fraction, y: Fraction) -> bool:
        return x in self._xset and y in self._yset

    @property
    def _xset(self):
        if "xset" not in self._ints:
            self._ints["xset"] = frozenset(self.xs)
        return self._ints["xset"]

    @property
    def _yset(self):
        if "yset" not in self._ints:
            self._ints["yset"] = frozenset(self.ys)
        return self._ints["yset"]

    @property
    def is_elekes(self) -> bool:
        return self.sources is not None

    def integer_arrays(self):
        """int64 views of A, B, C, xs, ys, or None when not safely integral."""
        if "arrays" in self._ints:
            return self._ints["arrays"]
        arrays = None
        if self.is_elekes:
            groups = (self.A, self.B, self.C, self.xs, self.ys)
            if all(v.denominator == 1 for g in groups for v in g):
                big = max(abs(v.numerator) for g in groups for v in g)
                small = max(abs(v.numerator) for g in (self.A, self.B, self.C) for v in g)
                # worst intermediate: z * (x + t) and key encodings num * (den + 1)
                if max((big + small) * (small + 1), (small + 1) ** 3) < _INT64_SAFE:
                    arrays = tuple(np.array([int(v) for v in g], dtype=np.int64) for g in groups)
        self._ints["arrays"] = arrays
        return arrays


def build_elekes_config(A, B, C) -> IncidenceConfig:
    A, B, C = _rational_set(A), _rational_set(B), _rational_set(C)
    if not (A and B and C):
        raise ValueError("A, B and C must be nonempty")
    if Fraction(0) in A or Fraction(-1) in A:
        raise ValueError("A must avoid 0 and -1")
    if Fraction(0) in B:
        raise ValueError("B must avoid 0 (t appears as a denominator)")
    if Fraction(0) in C:
        raise ValueError("C must avoid 0")
    if all(v.denominator == 1 for v in A + B + C):
        # integer products are much cheaper than Fraction products
        iA, iB, iC = ([int(v) for v in S] for S in (A, B, C))
        xs = tuple(map(Fraction, sorted({a * b for a in iA for b in iB})))
        ys = tuple(map(Fraction, sorted({(a + 1) * c for a in iA for c in iC})))
    else:
        xs = tuple(sorted({a * b for a in A for b in B}))
        ys = tuple(sorted({(a + 1) * c for a in A for c in C}))
    sources = tuple((z, t) for z in C for t in B)
    lines = tuple((z / t, z) for z, t in sources)
    return IncidenceConfig(xs, ys, lines, sources, A, B, C)


# -- counting methods -------------------------------------------------------

def _count_brute(config: IncidenceConfig) -> int:
    """Substitute every grid point into every line equation."""
    total = 0
    for slope, intercept in config.lines:
        for x, y in config.points():
            if y - slope * x - intercept == 0:
                total += 1
    return total


def _per_line_counts_fraction(config: IncidenceConfig) -> list[int]:
    yset, xset = config._yset, config._xset
    counts = []
    for slope, intercept in config.lines:
        if slope == 0 or len(config.xs) <= len(config.ys):
            counts.append(sum(1 for x in config.xs if slope * x + intercept in yset))
        else:
            counts.append(sum(1 for y in config.ys if (y - intercept) / slope in xset))
    return counts


def _per_line_counts_int(config: IncidenceConfig) -> np.ndarray:
    """Per-line counts for integral Elekes configurations.

    On line (z, t) the ordinate ``z (x + t) / t`` is an integer iff
    ``t' | x`` with ``t' = |t| / gcd(z, t)``, so only those abscissae are
    evaluated and looked up among the ordinates.
    """
    A, B, C, xs, ys = config.integer_arrays()
    counts = np.zeros((C.size, B.size), dtype=np.int64)
    for j, t in enumerate(B.tolist()):
        reduced = abs(t) // np.gcd(C, t)
        for tp in np.unique(reduced).tolist():
            rows = np.flatnonzero(reduced == tp)
            cand = xs[xs % tp == 0]
            if cand.size == 0:
                continue
            y = C[rows, None] * (cand[None, :] + t) // t
            counts[rows, j] = _member(y, ys).sum(axis=1)
    return counts.ravel()


def per_line_counts(config: IncidenceConfig) -> np.ndarray:
    """Number of grid points on each line, evaluating the line at each abscissa."""
    if config.integer_arrays() is not None:
        return _per_line_counts_int(config)
    return np.asarray(_per_line_counts_fraction(config), dtype=np.int64)


def _member(values: np.ndarray, sorted_pool: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(sorted_pool, values).clip(max=sorted_pool.size - 1)
    return sorted_pool[pos] == values


def _reduced_keys(num: np.ndarray, den: np.ndarray, base: int) -> np.ndarray:
    """Injective int64 encoding of the reduced fractions num/den (den > 0)."""
    g = np.gcd(num, den)
    return (num // g) * base + den // g


def _ratio_keys_int(config: IncidenceConfig):
    A, B, C, xs, ys = config.integer_arrays()
    base = int(max(np.abs(B).max(), np.abs(C).max())) + 1
    # (x + t)/t for x in AB, t in B ; y/z for y in (A+1)C, z in C
    t = B[None, :]
    sign_t = np.sign(t)
    left = _reduced_keys(((xs[:, None] + t) * sign_t).ravel(),
                         np.broadcast_to(t * sign_t, (xs.size, B.size)).ravel(), base)
    z = C[None, :]
    sign_z = np.sign(z)
    right = _reduced_keys((ys[:, None] * sign_z).ravel(),
                          np.broadcast_to(z * sign_z, (ys.size, C.size)).ravel(), base)
    return left, right, base


def _count_join(config: IncidenceConfig) -> int:
    """Meet in the middle on the ratio r = x/t + 1 = y/z.

    Line (z, t) meets grid point (x, y) iff ``y/z = x/t + 1``, so the
    total is ``sum_r n1(r) n2(r)`` over the two ratio histograms.
    """
    _require_elekes(config)
    if config.integer_arrays() is not None:
        left, right, _ = _ratio_keys_int(config)
        lk, lc = np.unique(left, return_counts=True)
        rk, rc = np.unique(right, return_counts=True)
        _, li, ri = np.intersect1d(lk, rk, assume_unique=True, return_indices=True)
        return int((lc[li] * rc[ri]).sum())
    n1 = Counter(x / t + 1 for x in config.xs for t in config.B)
    n2 = Counter(y / z for y in config.ys for z in config.C)
    return sum(c * n2[r] for r, c in n1.items() if r in n2)


def _float_ratio_index(num: np.ndarray, den: np.ndarray):
    """Distinct values of num/den (den > 0) ordered by their float64 value.

    Returns ``(values, rep_num, rep_den, counts)`` or None when two distinct
    rationals share a float, in which case the caller needs exact keys.
    Equal rationals always share a float: operands below 2**53 are exact
    and division is correctly rounded.
    """
    f = num / den
    order = np.argsort(f)
    f, num, den = f[order], num[order], den[order]
    same = np.flatnonzero(f[1:] == f[:-1])
    if same.size and np.any(num[same + 1] * den[same] != num[same] * den[same + 1]):
        return None
    values, start, counts = np.unique(f, return_index=True, return_counts=True)
    return values, num[start], den[start], counts


def _count_pencil(config: IncidenceConfig) -> int:
    """For each slope denominator t, look every x/t + 1 up in the y/z index.

    All lines with a given t pass through (-t, 0); the count for that
    pencil is ``sum_x n2((x + t)/t)`` with n2 the multiplicity of each
    ratio y/z. The integral path orders the index by float value and
    confirms every hit by cross-multiplication.
    """
    _require_elekes(config)
    arrays = config.integer_arrays()
    index = None
    if arrays is not None:
        A, B, C, xs, ys = arrays
        if max(int(np.abs(xs).max()) + int(np.abs(B).max()), int(np.abs(ys).max())) < 1 << 53:
            z = C[None, :]
            index = _float_ratio_index((ys[:, None] * np.sign(z)).ravel(),
                                       np.broadcast_to(np.abs(z), (ys.size, C.size)).ravel())
    if index is not None:
        values, rep_num, rep_den, counts = index
        total = 0
        for t in B.tolist():
            num = (xs + t) * (1 if t > 0 else -1)
            den = abs(t)
            q = num / den
            pos = np.searchsorted(values, q).clip(max=values.size - 1)
            hit = values[pos] == q
            pos, num = pos[hit], num[hit]
            exact = num * rep_den[pos] == rep_num[pos] * den
            total += int(counts[pos][exact].sum())
        return total
    n2 = Counter(y / z for y in config.ys for z in config.C)
    return sum(n2.get(x / t + 1, 0) for t in config.B for x in config.xs)


def _require_elekes(config: IncidenceConfig) -> None:
    if not config.is_elekes:
        raise CapabilityError("ratio-based counting needs an Elekes configuration")


METHODS = {
    "brute": _count_brute,
    "lines": lambda config: int(per_line_counts(config).sum()),
    "join": _count_join,
    "pencil": _count_pencil,
}


def choose_methods(config: IncidenceConfig) -> tuple[str, ...]:
    """Two independent counting methods suited to the configuration size.

    Generic (non-Elekes) configurations that are too big for substitution
    only have the per-line method.
    """
    if config.n_points * config.n_lines <= BRUTE_LIMIT:
        return "brute", "lines"
    if config.is_elekes:
        return "lines", "join"
    if config.n_lines * min(len(config.xs), len(config.ys)) <= LINES_LIMIT:
        return ("lines",)
    raise CapabilityError("configuration too large for exact counting")


def count_incidences(config: IncidenceConfig, methods: tuple[str, ...] | None = None) -> int:
    """Exact number of (point, line) incidences, agreed on by two methods."""
    if config.n_points == 0 or config.n_lines == 0:
        return 0
    methods = tuple(methods) if methods else choose_methods(config)
    results = {m: METHODS[m](config) for m in dict.fromkeys(methods)}
    if len(set(results.values())) != 1:
        raise AuditFailure("incidence counting methods disagree", **results)
    return next(iter(results.values()))


# -- witnesses and the audit ------------------------------------------------

def line_witness_counts(config: IncidenceConfig) -> np.ndarray:
    """For each line (z, t), how many of the points (a t, (a+1) z) are verified.

    A point counts when it lies on the line exactly and both coordinates
    are in the grid. Distinct a give distinct abscissae since t != 0.
    """
    _require_elekes(config)
    arrays = config.integer_arrays()
    if arrays is not None:
        A, B, C, xs, ys = arrays
        out = np.empty((C.size, B.size), dtype=np.int64)
        t = B[:, None]
        x = A[None, :] * t
        in_x = _member(x, xs)
        # a -> a t is strictly monotone for fixed t != 0, so abscissae are distinct
        distinct = 1 + (np.diff(x, axis=1) != 0).sum(axis=1)
        for i, z in enumerate(C.tolist()):
            y = (A[None, :] + 1) * z
            ok = (t * y - z * x - z * t == 0) & in_x & _member(y, ys)
            out[i] = np.minimum(ok.sum(axis=1), distinct)
        return out.ravel()
    counts = []
    for (z, t), (slope, intercept) in zip(config.sources, config.lines):
        pts = {(a * t, (a + 1) * z) for a in config.A}
        counts.append(sum(1 for x, y in pts
                          if y == slope * x + intercept and config.has_point(x, y)))
    return np.asarray(counts, dtype=np.int64)


def theorem3_audit(A, B, C, *, c_st: float = DEFAULT_C_ST,
                   methods: tuple[str, ...] | None = None) -> dict:
    """Exact audit of the incidence argument for |AB| |(A+1)C|.

    Fatal (raises :class:`AuditFailure`): a line with fewer than |A|
    witnesses, total incidences below |A||B||C|, or a line count other
    than |B||C|. Reported only: the Szemeredi-Trotter comparison and the
    ratio |AB||(A+1)C| / sqrt(|A|^3 |B||C|).
    """
    config = build_elekes_config(A, B, C)
    nA, nB, nC = len(config.A), len(config.B), len(config.C)
    nAB, nT = len(config.xs), len(config.ys)

    n_distinct_lines = len(set(config.lines))
    if n_distinct_lines != nB * nC:
        raise AuditFailure("line family is not injective in (z, t)",
                           lines=n_distinct_lines, expected=nB * nC)
    witnesses = line_witness_counts(config)
    min_witnesses = int(witnesses.min())
    if min_witnesses < nA:
        raise AuditFailure("a line carries fewer than |A| witness points",
                           min_witnesses=min_witnesses, card_A=nA)
    incidences = count_incidences(config, methods)
    lower = nA * nB * nC
    if incidences < lower:
        raise AuditFailure("incidences below |A||B||C|", incidences=incidences, lower=lower)

    lhs = nAB * nT
    rhs_sq = nA ** 3 * nB * nC
    n_points, n_lines = config.n_points, config.n_lines
    st_rhs = n_points + n_lines + c_st * (n_points * n_lines) ** (2 / 3)
    return {
        "card_A": nA,
        "card_B": nB,
        "card_C": nC,
        "card_AB": nAB,
        "card_T": nT,
        "n_points": n_points,
        "n_lines": n_lines,
        "incidences": incidences,
        "lower": lower,
        "min_line_witnesses": min_witnesses,
        "methods": list(methods or choose_methods(config)),
        "c_st": c_st,
        "st_rhs": st_rhs,
        "st_ratio": incidences / st_rhs,
        "st_holds": incidences <= st_rhs,
        "product_lhs": lhs,
        "product_rhs": math.sqrt(rhs_sq),
        "ratio": lhs / math.sqrt(rhs_sq),
        "constant_one_holds": lhs * lhs >= rhs_sq,
    }

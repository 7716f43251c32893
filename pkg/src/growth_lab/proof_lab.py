"""Exact checks of the combinatorial steps behind the A(A+1) lower bound.

The asymptotic statements carry ``o(1)`` terms and unnamed constants, so
they are reported as empirical exponents with pass flags. Everything that
is a finite statement about a given set (averaging, level sets, the
injection, the Ruzsa triangle inequality, the BSG witness) is checked
exactly with integers and raises :class:`AuditFailure` when it fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product as cartesian

import numpy as np

from growth_lab.errors import AuditFailure, CapabilityError
from growth_lab.set_arith import (
    AllOfFp,
    FpSet,
    PairRelation,
    Quadruple,
    affine_image,
    difference_set,
    gk_dichotomy,
    product_set,
    restricted_difference,
    shifted_product,
    sumset,
    two_a_minus_two_a,
)

THEOREM1_EXPONENT = Fraction(106, 105)
LEMMA2_EXPONENT = 13
SKETCH_EXPONENT = 11
MAX_BSG_SIZE = 16
MAX_INJECTION_DOMAIN = 20_000_000


def _require_anchor_domain(A: FpSet) -> None:
    if A.card == 0:
        raise ValueError("A must be nonempty")
    if 0 in A or A.p - 1 in A:
        raise ValueError("A must avoid 0 and -1")


def _dilate_masks(A: FpSet, multipliers) -> np.ndarray:
    """Row i is the membership mask of ``multipliers[i] * A``."""
    p = A.p
    rows = np.zeros((len(multipliers), p), dtype=np.uint8)
    m = np.asarray(multipliers, dtype=np.int64)[:, None]
    rows[np.arange(len(multipliers))[:, None], (m * A.elements[None, :]) % p] = 1
    return rows


def overlap_matrix(A: FpSet) -> np.ndarray:
    """``G[i, j] = |(a_i + 1)A intersect (a_j + 1)A|`` over sorted elements of A."""
    rows = _dilate_masks(A, A.elements + 1).astype(np.int32)
    return rows @ rows.T


def popular_anchor(A: FpSet) -> tuple[int, int]:
    """The b0 in A maximizing ``sum_a |(a+1)A cap (b0+1)A|``, with that sum.

    Ties go to the smallest b0. Averaging over b0 gives
    ``total * |A(A+1)| >= |A|**3``, which is asserted.
    """
    _require_anchor_domain(A)
    totals = overlap_matrix(A).sum(axis=0)
    k = int(np.argmax(totals))
    b0, total = int(A.elements[k]), int(totals[k])
    n, n_shift = A.card, shifted_product(A).card
    if total * n_shift < n ** 3:
        raise AuditFailure("popular anchor below the average", p=A.p, b0=b0,
                           total=total, card_A=n, card_shifted=n_shift)
    return b0, total


@dataclass(frozen=True)
class AnchorDecomposition:
    A: FpSet = field(repr=False)
    b0: int
    total: int
    N: int
    A1: FpSet
    class_count: int
    counts: dict = field(repr=False, default_factory=dict)

    @property
    def pigeonhole_exact(self) -> bool:
        """``N |A1| class_count >= total``."""
        return self.N * self.A1.card * self.class_count >= self.total

    @property
    def pigeonhole_strict(self) -> bool:
        """``2 N |A1| class_count > total``; always true for dyadic classes."""
        return 2 * self.N * self.A1.card * self.class_count > self.total

    def log_form(self, card_shifted: int) -> tuple[float, float]:
        """Both sides of ``N |A1| >= |A|^3 / (2 |A(A+1)| log2 |A|)``."""
        n = self.A.card
        rhs = n ** 3 / (2 * card_shifted * math.log2(n)) if n > 1 else math.inf
        return self.N * self.A1.card, rhs


def dyadic_levels(A: FpSet, b0: int | None = None) -> AnchorDecomposition:
    """Split A by the dyadic class of ``|(a+1)A cap (b0+1)A|``.

    The class maximizing ``N * |class|`` (ties toward larger N) becomes A1,
    where N is the power of two starting the class. When ``b0`` is None
    the popular anchor is used.
    """
    _require_anchor_domain(A)
    if b0 is None:
        b0, _ = popular_anchor(A)
    b0 %= A.p
    if b0 not in A:
        raise ValueError(f"anchor {b0} is not in A")
    j = int(np.searchsorted(A.elements, b0))
    column = overlap_matrix(A)[:, j]
    counts = {int(a): int(c) for a, c in zip(A.elements, column)}
    classes: dict[int, list[int]] = {}
    for a, c in counts.items():
        if c >= 1:
            classes.setdefault(1 << (c.bit_length() - 1), []).append(a)
    if not classes:
        raise AuditFailure("every overlap count is zero", p=A.p, b0=b0)
    N = max(classes, key=lambda level: (level * len(classes[level]), level))
    A1 = FpSet(A.p, classes[N])
    dec = AnchorDecomposition(A, b0, int(column.sum()), N, A1, len(classes), counts)

    bad = [a for a in A1 if not N <= counts[a] < 2 * N]
    if bad:
        raise AuditFailure("level set contains out-of-range counts", N=N, elements=bad)
    if not dec.pigeonhole_strict:
        raise AuditFailure("dyadic pigeonhole violated", N=N, card_A1=A1.card,
                           classes=len(classes), total=dec.total)
    return dec


def injection_quadruple(A1: FpSet) -> tuple[Quadruple, str]:
    """Pick (b1, b2, b3, b4) in A1 for the injection, and say which branch supplied it."""
    if A1.card < 2:
        b = int(A1.elements[0])
        return Quadruple(b, b, b, b), "singleton"
    branch = gk_dichotomy(A1)
    if isinstance(branch, AllOfFp):
        u, v = A1.tolist()[:2]
        return Quadruple(u, v, u, v), "all-of-Fp"
    return branch, "quadruple"


@dataclass(frozen=True)
class InjectionRecord:
    b0: int
    quadruple: Quadruple
    S: FpSet = field(repr=False)
    S_parts: tuple[FpSet, FpSet, FpSet, FpSet] = field(repr=False)
    rep_S: dict = field(repr=False)
    rep_parts: tuple[dict, dict, dict, dict] = field(repr=False)
    domain_size: int
    image_size: int
    N: int
    card_diff: int
    card_2a2a: int

    @property
    def injective(self) -> bool:
        return self.domain_size == self.image_size

    @property
    def counting_lhs(self) -> int:
        return self.S.card * self.N ** 4

    @property
    def counting_rhs(self) -> int:
        return self.card_diff ** 4 * self.card_2a2a


def _first_representations(S_targets, pairs) -> dict:
    """First (a, a') in ascending order producing each target value."""
    rep = {}
    for value, pair in zip(S_targets, pairs):
        rep.setdefault(value, pair)
    return rep


def bg_injection_audit(A: FpSet, decomposition: AnchorDecomposition,
                       quadruple) -> InjectionRecord:
    """Build the map (x, x1..x4) -> (u, u1..u4) and check it exhaustively.

    Representations are the first found in ascending order of (a, a').
    Asserts the recovery identity for every tuple, injectivity, membership
    of the image in (2A-2A) x (A-A)^4, and
    ``|S| N^4 <= |A-A|^4 |2A-2A|``.
    """
    p = A.p
    b0, N = decomposition.b0, decomposition.N
    quadruple = Quadruple(*(int(b) % p for b in quadruple))
    b1, b2, b3, b4 = quadruple
    for b in quadruple:
        if b not in decomposition.A1:
            raise ValueError(f"quadruple element {b} is not in A1")

    elems = A.tolist()
    c12, c34 = (b1 - b2) % p, (b3 - b4) % p
    pairs = list(cartesian(elems, repeat=2))
    xs = [(c12 * a + c34 * a2) % p for a, a2 in pairs]
    rep_S = _first_representations(xs, pairs)
    S = FpSet(p, rep_S)

    anchor_multiple = {(b0 + 1) * a % p: a for a in elems}
    parts, rep_parts = [], []
    for b in quadruple:
        rep = {}
        for a in elems:
            x = (b + 1) * a % p
            if x in anchor_multiple:
                rep[x] = (a, anchor_multiple[x])
        parts.append(FpSet(p, rep))
        rep_parts.append(rep)
        if len(rep) < N:
            raise AuditFailure("S_i smaller than the level N", b=b, size=len(rep), N=N)

    domain = S.card * math.prod(len(r) for r in rep_parts)
    if domain > MAX_INJECTION_DOMAIN:
        raise CapabilityError(f"injection domain of {domain} tuples is too large")

    x_vals = np.array(S.tolist(), dtype=np.int64)
    a_x = np.array([rep_S[x][0] for x in S], dtype=np.int64)
    a2_x = np.array([rep_S[x][1] for x in S], dtype=np.int64)
    xi = [np.array(sorted(r), dtype=np.int64) for r in rep_parts]
    ai = [np.array([r[x][0] for x in sorted(r)], dtype=np.int64) for r in rep_parts]
    ai2 = [np.array([r[x][1] for x in sorted(r)], dtype=np.int64) for r in rep_parts]

    def axis(arr, k):
        shape = [1] * 5
        shape[k] = arr.size
        return arr.reshape(shape)

    u = (axis(ai2[0], 1) - axis(ai2[1], 2) + axis(ai2[2], 3) - axis(ai2[3], 4)) % p
    us = [
        (axis(a_x, 0) - axis(ai[0], 1)) % p,
        (axis(a_x, 0) - axis(ai[1], 2)) % p,
        (axis(a2_x, 0) - axis(ai[2], 3)) % p,
        (axis(a2_x, 0) - axis(ai[3], 4)) % p,
    ]
    full = tuple(len(r) for r in [x_vals] + xi)
    u = np.broadcast_to(u, full)
    us = [np.broadcast_to(v, full) for v in us]

    recovered = ((b1 + 1) * us[0] - (b2 + 1) * us[1] + (b3 + 1) * us[2]
                 - (b4 + 1) * us[3] + (b0 + 1) * u) % p
    if not np.array_equal(recovered, np.broadcast_to(axis(x_vals, 0), full)):
        raise AuditFailure("recovery identity fails", p=p, quadruple=quadruple, b0=b0)

    diff = difference_set(A, A)
    d2 = two_a_minus_two_a(A)
    if not d2.mask[u].all() or not all(diff.mask[v].all() for v in us):
        raise AuditFailure("image leaves (2A-2A) x (A-A)^4", p=p)

    if p ** 5 < 1 << 63:
        codes = u.astype(np.int64).ravel()
        for v in us:
            codes = codes * p + v.ravel()
        image = np.unique(codes).size
    else:
        image = np.unique(np.stack([u.ravel()] + [v.ravel() for v in us], axis=1), axis=0).shape[0]

    record = InjectionRecord(b0, quadruple, S, tuple(parts), rep_S, tuple(rep_parts),
                             domain, image, N, diff.card, d2.card)
    if not record.injective:
        raise AuditFailure("map is not injective", domain=domain, image=image)
    if record.counting_lhs > record.counting_rhs:
        raise AuditFailure("|S| N^4 exceeds |A-A|^4 |2A-2A|",
                           lhs=record.counting_lhs, rhs=record.counting_rhs)
    return record


def injection_ratio(record: InjectionRecord, A1: FpSet) -> float:
    """|S| / (|A1|^3 / |A-A|)."""
    return record.S.card * record.card_diff / A1.card ** 3


def lemma2_machinery(A: FpSet) -> dict:
    """Run anchor, level sets, dichotomy and injection on one set."""
    b0, total = popular_anchor(A)
    dec = dyadic_levels(A, b0)
    quadruple, branch = injection_quadruple(dec.A1)
    record = bg_injection_audit(A, dec, quadruple)
    n_shift = shifted_product(A).card
    log_lhs, log_rhs = dec.log_form(n_shift)
    return {
        "p": A.p,
        "card_A": A.card,
        "card_shifted_product": n_shift,
        "b0": b0,
        "total": total,
        "anchor_lhs": total * n_shift,
        "anchor_rhs": A.card ** 3,
        "N": dec.N,
        "card_A1": dec.A1.card,
        "class_count": dec.class_count,
        "pigeonhole_lhs": dec.N * dec.A1.card * dec.class_count,
        "pigeonhole_rhs": total,
        "pigeonhole_exact": dec.pigeonhole_exact,
        "log2_form_lhs": log_lhs,
        "log2_form_rhs": log_rhs,
        "log2_form_holds": log_lhs >= log_rhs,
        "branch": branch,
        "quadruple": list(quadruple),
        "card_S": record.S.card,
        "domain_size": record.domain_size,
        "image_size": record.image_size,
        "injective": record.injective,
        "counting_lhs": record.counting_lhs,
        "counting_rhs": record.counting_rhs,
        "injection_ratio": injection_ratio(record, dec.A1),
    }


def bsg_witness_search(A: FpSet, B: FpSet, E: PairRelation) -> FpSet:
    """Smallest-first, lexicographic search for a subset A' of A with
    ``|A'| >= 0.1 |A| / K`` and ``|A -_E B|^4 >= |A'-A'| |A| |B|^2 / (10^4 K^5)``,
    where ``K = |A||B| / |E|``. All comparisons are between integers.
    """
    if len(E) == 0:
        raise ValueError("E must be nonempty")
    if E.left != A or E.right != B:
        raise ValueError("E must relate A and B")
    if A.card > MAX_BSG_SIZE:
        raise CapabilityError(f"exhaustive subset search capped at |A| <= {MAX_BSG_SIZE}")
    K = Fraction(A.card * B.card, len(E))
    d_E = restricted_difference(E).card
    lhs = d_E ** 4 * 10 ** 4 * K.numerator ** 5
    scale = A.card * B.card ** 2 * K.denominator ** 5
    smallest = max(1, math.ceil(Fraction(A.card, 10) / K))
    elems = A.tolist()
    for size in range(smallest, A.card + 1):
        for subset in combinations(elems, size):
            sub = FpSet(A.p, subset)
            if lhs >= difference_set(sub, sub).card * scale:
                return sub
    raise AuditFailure("no subset satisfies the BSG inequality",
                       p=A.p, A=elems, B=B.tolist(), K=str(K))


def ruzsa_mult_audit(A: FpSet) -> dict:
    """|AA| |A| <= |A(A+1)|^2 (multiplicative Ruzsa triangle inequality)."""
    if A.card == 0:
        raise ValueError("A must be nonempty")
    if 0 in A or A.p - 1 in A:
        raise ValueError("A must lie in F_p^* and avoid -1")
    n_aa = product_set(A, A).card
    n_shift = shifted_product(A).card
    lhs, rhs = n_aa * A.card, n_shift ** 2
    if lhs > rhs:
        raise AuditFailure("Ruzsa triangle inequality fails", p=A.p, card_AA=n_aa,
                           card_A=A.card, card_shifted=n_shift)
    return {"p": A.p, "card_A": A.card, "card_AA": n_aa, "card_shifted_product": n_shift,
            "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs}


def _require_small(A: FpSet) -> None:
    if A.card <= 1:
        raise ValueError("need |A| >= 2")
    if A.card ** 2 >= A.p:
        raise ValueError(f"need |A| < sqrt(p), got |A|={A.card}, p={A.p}")


def lemma2_audit(A: FpSet) -> dict:
    _require_small(A)
    n = A.card
    n_diff = difference_set(A, A).card
    n_shift = shifted_product(A).card
    n_2a2a = two_a_minus_two_a(A).card
    ln = math.log(n)
    e = (8 * math.log(n_diff) + 4 * math.log(n_shift)) / ln
    sketch = (5 * math.log(n_diff) + math.log(n_2a2a) + 4 * math.log(n_shift)) / ln
    return {
        "p": A.p,
        "card_A": n,
        "card_diff": n_diff,
        "card_2a2a": n_2a2a,
        "card_shifted_product": n_shift,
        "exponent": e,
        "exponent_pass": e >= LEMMA2_EXPONENT,
        "sketch_exponent": sketch,
        "sketch_pass": sketch >= SKETCH_EXPONENT,
    }


def theorem1_exponent(A: FpSet) -> dict:
    _require_small(A)
    n = A.card
    n_shift = shifted_product(A).card
    beta = math.log(n_shift) / math.log(n)
    return {
        "p": A.p,
        "card_A": n,
        "card_shifted_product": n_shift,
        "beta": beta,
        # exact: |A(A+1)|^105 >= |A|^106
        "beta_pass": n_shift ** 105 >= n ** 106,
        "K": n_shift / n,
    }


def restricted_difference_identity(A: FpSet) -> bool:
    """-AA equals A -_E A(A+1) for E = {(x, x + xy)}."""
    p = A.p
    B = shifted_product(A)
    pairs = {(x, (x + x * y) % p) for x in A for y in A}
    E = PairRelation(A, B, tuple(sorted(pairs)))
    return restricted_difference(E) == affine_image(product_set(A, A), -1, 0)


__all__ = [
    "AnchorDecomposition",
    "InjectionRecord",
    "bg_injection_audit",
    "bsg_witness_search",
    "dyadic_levels",
    "injection_quadruple",
    "lemma2_audit",
    "lemma2_machinery",
    "popular_anchor",
    "restricted_difference_identity",
    "ruzsa_mult_audit",
    "theorem1_exponent",
]

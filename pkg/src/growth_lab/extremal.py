"""Sets with unusually small A(A+1), built from a window of discrete logs.

With ``M = floor(2*sqrt(N*p))`` and ``X = {g**n - 1 : 1 <= n <= M}``, some
window ``{g**(L+1), ..., g**(L+M)}`` contains at least ``M**2 / (p-1) >= N``
elements of X. Taking A to be that intersection, every product
``a(a'+1)`` is a power ``g**k`` with ``L+2 <= k <= L+2M``, so
``|A(A+1)| <= 2M - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from growth_lab.errors import AuditFailure
from growth_lab.field_core import DlogTable, PrimeField, build_dlog_table
from growth_lab.set_arith import FpSet, shifted_product


@dataclass(frozen=True)
class ExtremalResult:
    p: int
    N: int
    g: int
    M: int
    L: int
    A: FpSet = field(repr=False)
    window_count: int
    zero_filtered: bool = False


def window_length(p: int, N: int) -> int:
    return math.isqrt(4 * N * p)


def best_window_offset(logs, M: int, m: int) -> tuple[int, int]:
    """Offset L maximizing ``#{k in logs : k = L+j (mod m), 1 <= j <= M}``.

    Ties go to the smallest L. Runs in ``O(|logs| + m)`` with a prefix sum
    over the doubled indicator of ``logs``.
    """
    logs = np.asarray(logs, dtype=np.int64)
    if logs.size == 0:
        return 0, 0
    if M >= m:
        return 0, int(logs.size)
    hit = np.zeros(2 * m, dtype=np.int64)
    hit[logs] = 1
    hit[logs + m] = 1
    prefix = np.concatenate(([0], np.cumsum(hit)))
    offsets = np.arange(m)
    # window for L covers positions L+1 .. L+M in the doubled array
    counts = prefix[offsets + M + 1] - prefix[offsets + 1]
    L = int(np.argmax(counts))
    return L, int(counts[L])


def build_extremal_set(p: int, N: int, table: DlogTable | None = None) -> ExtremalResult:
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    if 10 * N >= p:
        raise ValueError(f"need N < 0.1*p, got N={N}, p={p}")
    if table is None:
        table = build_dlog_table(PrimeField.of(p))
    elif table.p != p:
        raise ValueError(f"dlog table is for p={table.p}, not {p}")
    M = window_length(p, N)
    if not 1 <= M <= p - 2:
        raise ValueError(f"window length M={M} outside [1, p-2]")

    m = p - 1
    X = (table.power[np.arange(1, M + 1) % m] - 1) % p
    zero_filtered = bool((X == 0).any())
    X = X[X != 0]
    logs = np.sort(table.log_of[X])
    L, count = best_window_offset(logs, M, m)

    in_window = (logs - L - 1) % m < M
    A = FpSet(p, table.power[logs[in_window]])
    if A.card != count:
        raise AuditFailure("window count disagrees with constructed set",
                           p=p, N=N, L=L, count=count, card=A.card)
    if A.card < N:
        raise AuditFailure("pigeonhole window holds fewer than N elements",
                           p=p, N=N, M=M, L=L, card=A.card)
    return ExtremalResult(p=p, N=N, g=table.g, M=M, L=L, A=A,
                          window_count=count, zero_filtered=zero_filtered)


def _brute_shifted_product_size(A: FpSet) -> int:
    """|A(A+1)| from the full product table, without set_arith kernels."""
    p = A.p
    a = A.elements
    seen = np.zeros(p, dtype=bool)
    shifted = (a + 1) % p
    rows = max(1, (1 << 22) // max(1, a.size))
    for i in range(0, a.size, rows):
        seen[(a[i:i + rows, None] * shifted[None, :]) % p] = True
    return int(seen.sum())


def verify_extremal(result: ExtremalResult) -> dict:
    """Recheck an :class:`ExtremalResult` from scratch.

    Raises :class:`AuditFailure` listing every violated property; otherwise
    returns the verification report.
    """
    p, M, L, g = result.p, result.M, result.L, result.g
    A = result.A
    m = p - 1
    violations = []

    if M != window_length(p, result.N):
        violations.append(f"M={M} but floor(2*sqrt(Np))={window_length(p, result.N)}")
    window = {pow(g, L + j, p) for j in range(1, M + 1)}
    shifts = {pow(g, n, p) for n in range(1, M + 1)}
    outside = [a for a in A if a not in window]
    if outside:
        violations.append(f"{len(outside)} elements outside the exponent window, e.g. {outside[:3]}")
    unshifted = [a for a in A if (a + 1) % p not in shifts]
    if unshifted:
        violations.append(f"{len(unshifted)} elements with a+1 not a power g^n, n<=M, e.g. {unshifted[:3]}")
    if A.card != result.window_count:
        violations.append(f"|A|={A.card} but window_count={result.window_count}")
    if A.card < result.N:
        violations.append(f"|A|={A.card} < N={result.N}")

    size = _brute_shifted_product_size(A)
    if size != shifted_product(A).card:
        violations.append("brute-force and kernel |A(A+1)| disagree")
    if size > 2 * M:
        violations.append(f"|A(A+1)|={size} > 2M={2 * M}")
    if size * size > 16 * p * A.card:
        violations.append(f"|A(A+1)|={size} > 4*sqrt(p|A|)")

    # Containment in {g^(L+2), ..., g^(L+2M)}: exponent offsets in [0, 2M-2].
    if not outside and not unshifted and A.card:
        table_window = {pow(g, L + k, p) for k in range(2, 2 * M + 1)}
        product = shifted_product(A)
        stray = [x for x in product if x not in table_window]
        if stray:
            violations.append(f"{len(stray)} products outside g^(L+2..L+2M)")

    if violations:
        raise AuditFailure("extremal construction failed verification",
                           p=p, N=result.N, M=M, L=L, violations=violations)
    sqrt_term = math.sqrt(p * A.card)
    return {
        "p": p,
        "N": result.N,
        "g": g,
        "M": M,
        "L": L,
        "card_A": A.card,
        "window_count": result.window_count,
        "card_shifted_product": size,
        "two_M": 2 * M,
        "four_sqrt_p_card_A": 4 * sqrt_term,
        "ratio": size / sqrt_term,
        "ratio_to_two_M": size / (2 * M),
        "zero_filtered": result.zero_filtered,
    }

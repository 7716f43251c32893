import math
from fractions import Fraction
from itertools import combinations, product

import pytest

from growth_lab import AuditFailure, CapabilityError, FpSet, PairRelation
from growth_lab.proof_lab import (THEOREM1_EXPONENT, bg_injection_audit, bsg_witness_search,
                                  dyadic_levels, injection_quadruple, lemma2_audit,
                                  lemma2_machinery, popular_anchor, restricted_difference_identity,
                                  ruzsa_mult_audit, theorem1_exponent)
from growth_lab.set_arith import AllOfFp, Quadruple, gk_dichotomy, ratio_set
from tests.conftest import random_fpset


def overlap(A, a, b):
    p = A.p
    return len({(a + 1) * x % p for x in A} & {(b + 1) * x % p for x in A})


def anchor_by_double_loop(A):
    best = None
    for b in A:
        total = sum(overlap(A, a, b) for a in A)
        if best is None or total > best[1]:
            best = (b, total)
    return best


def sizes(A):
    p = A.p
    elems = A.tolist()
    diff = {(a - b) % p for a in elems for b in elems}
    two = {(a + b - c - d) % p for a, b, c, d in product(elems, repeat=4)}
    shifted = {a * (b + 1) % p for a in elems for b in elems}
    prod_ = {a * b % p for a in elems for b in elems}
    return len(diff), len(two), len(shifted), len(prod_)


# -- anchor ----------------------------------------------------------------

def test_anchor_examples():
    assert popular_anchor(FpSet(7, [1, 2])) == (1, 2)
    assert popular_anchor(FpSet(7, [1])) == (1, 1)


def test_anchor_matches_double_loop(rng):
    for _ in range(100):
        A = random_fpset(rng, 101, int(rng.integers(1, 15)), exclude=(0, -1))
        b0, total = popular_anchor(A)
        assert (b0, total) == anchor_by_double_loop(A)
        assert total * sizes(A)[2] >= A.card ** 3


def test_anchor_domain():
    with pytest.raises(ValueError):
        popular_anchor(FpSet(7, [0, 1]))
    with pytest.raises(ValueError):
        popular_anchor(FpSet(7, [6]))


# -- level sets ------------------------------------------------------------

def test_levels_example():
    dec = dyadic_levels(FpSet(7, [1, 2]), 1)
    assert dec.counts == {1: 2, 2: 0}
    assert (dec.N, dec.A1.tolist(), dec.class_count, dec.total) == (2, [1], 1, 2)


def test_levels_single_class_takes_all_of_a():
    # A = {1, 2, 4} in F_7 is the subgroup of squares; with b0 = 2 the two
    # nonzero counts are both 3.
    dec = dyadic_levels(FpSet(7, [1, 2, 4]))
    assert dec.b0 == 2
    assert dec.counts == {1: 0, 2: 3, 4: 3}
    assert (dec.N, dec.A1.tolist(), dec.class_count, dec.total) == (2, [2, 4], 1, 6)


def test_levels_pigeonhole_without_factor_two_can_fail():
    # N |A1| classes = 4 < 6 = total for the set above; the factor 2 is needed.
    dec = dyadic_levels(FpSet(7, [1, 2, 4]))
    assert not dec.pigeonhole_exact
    assert dec.pigeonhole_strict


def test_levels_invariants_on_random_sets(rng):
    for _ in range(100):
        A = random_fpset(rng, 101, int(rng.integers(1, 15)), exclude=(0, -1))
        dec = dyadic_levels(A)
        b0 = dec.b0
        counts = {a: overlap(A, a, b0) for a in A}
        assert dec.counts == counts
        assert dec.total == sum(counts.values())
        assert all(dec.N <= counts[a] < 2 * dec.N for a in dec.A1)
        levels = {1 << (c.bit_length() - 1) for c in counts.values() if c}
        assert dec.class_count == len(levels)
        assert 2 * dec.N * dec.A1.card * dec.class_count > dec.total


def test_levels_rejects_foreign_anchor():
    with pytest.raises(ValueError):
        dyadic_levels(FpSet(7, [1, 2]), 3)


# -- injection -------------------------------------------------------------

def injection_by_dicts(A, b0, N, A1, quadruple):
    """Independent construction of the map with plain dictionaries."""
    p = A.p
    elems = A.tolist()
    b1, b2, b3, b4 = quadruple
    rep = {}
    for a, a2 in product(elems, repeat=2):
        rep.setdefault(((b1 - b2) * a + (b3 - b4) * a2) % p, (a, a2))
    parts = []
    for b in quadruple:
        part = {}
        for a in elems:
            for a2 in elems:
                if (b + 1) * a % p == (b0 + 1) * a2 % p:
                    part[(b + 1) * a % p] = (a, a2)
        parts.append(part)
    images = set()
    count = 0
    for x, (ax, ax2) in rep.items():
        for reps in product(*(part.values() for part in parts)):
            (c1, d1), (c2, d2), (c3, d3), (c4, d4) = reps
            image = ((d1 - d2 + d3 - d4) % p, (ax - c1) % p, (ax - c2) % p,
                     (ax2 - c3) % p, (ax2 - c4) % p)
            images.add(image)
            count += 1
    return len(rep), count, len(images)


def test_injection_matches_dictionary_construction(rng):
    for _ in range(10):
        A = random_fpset(rng, 101, 7, exclude=(0, -1))
        dec = dyadic_levels(A)
        quadruple, _ = injection_quadruple(dec.A1)
        record = bg_injection_audit(A, dec, quadruple)
        card_S, domain, image = injection_by_dicts(A, dec.b0, dec.N, dec.A1, quadruple)
        assert (record.S.card, record.domain_size, record.image_size) == (card_S, domain, image)
        assert domain == image


def test_injection_degenerate_quadruple():
    A = FpSet(101, [3, 10, 17, 44])
    dec = dyadic_levels(A)
    b = dec.A1.tolist()[0]
    record = bg_injection_audit(A, dec, (b, b, b, b))
    assert record.S.tolist() == [0]
    assert record.injective
    assert record.counting_lhs <= record.counting_rhs


def test_injection_on_random_sets(rng):
    branches = set()
    for p in (101, 499):
        for _ in range(10):
            A = random_fpset(rng, p, 12, exclude=(0, -1))
            r = lemma2_machinery(A)
            assert r["injective"]
            assert r["counting_lhs"] <= r["counting_rhs"]
            assert r["anchor_lhs"] >= r["anchor_rhs"]
            d, two, _, _ = sizes(A)
            assert r["counting_rhs"] == d ** 4 * two
            branches.add(r["branch"])
    assert branches


def test_injection_quadruple_branches():
    assert injection_quadruple(FpSet(5, [3])) == (Quadruple(3, 3, 3, 3), "singleton")
    assert injection_quadruple(FpSet(5, [1, 2])) == (Quadruple(1, 2, 2, 1), "quadruple")
    q, branch = injection_quadruple(FpSet(5, [0, 1, 2]))
    assert branch == "all-of-Fp" and q == Quadruple(0, 1, 0, 1)
    assert isinstance(gk_dichotomy(FpSet(5, [0, 1, 2])), AllOfFp)
    assert len(ratio_set(FpSet(5, [0, 1, 2]))) == 5


def test_injection_rejects_quadruple_outside_a1():
    A = FpSet(7, [1, 2])
    dec = dyadic_levels(A)
    with pytest.raises(ValueError):
        bg_injection_audit(A, dec, (2, 2, 2, 2))


# -- BSG -------------------------------------------------------------------

def bsg_holds(A, B, E, sub):
    p = A.p
    K = Fraction(A.card * B.card, len(E))
    d_E = len({(a - b) % p for a, b in E.pairs})
    d_sub = len({(x - y) % p for x in sub for y in sub})
    return (len(sub) >= Fraction(A.card, 10) / K
            and d_E ** 4 * 10 ** 4 * K.numerator ** 5 >= d_sub * A.card * B.card ** 2 * K.denominator ** 5)


def test_bsg_example():
    A = FpSet(7, [0, 1])
    E = PairRelation.full(A, A)
    witness = bsg_witness_search(A, A, E)
    assert witness.tolist() == [0]
    assert 3 ** 4 * 10 ** 4 >= 1 * 2 * 4


def test_bsg_preconditions():
    A = FpSet(7, [0, 1])
    with pytest.raises(ValueError):
        bsg_witness_search(A, A, PairRelation(A, A, ()))
    big = FpSet(101, range(20))
    with pytest.raises(CapabilityError):
        bsg_witness_search(big, FpSet(101, [0]), PairRelation.full(big, FpSet(101, [0])))


def test_bsg_random_instances(rng):
    for _ in range(100):
        A = random_fpset(rng, 101, int(rng.integers(1, 9)))
        B = random_fpset(rng, 101, int(rng.integers(1, 9)))
        pairs = list(product(A.tolist(), B.tolist()))
        k = int(rng.integers(math.ceil(len(pairs) / 2), len(pairs) + 1))
        chosen = sorted(rng.choice(len(pairs), k, replace=False).tolist())
        E = PairRelation(A, B, tuple(pairs[i] for i in chosen))
        witness = bsg_witness_search(A, B, E)
        assert witness.issubset(A)
        assert bsg_holds(A, B, E, witness.tolist())
        # nothing smaller (in the search order) qualifies
        for size in range(1, witness.card):
            assert not any(bsg_holds(A, B, E, s) for s in combinations(A.tolist(), size))


# -- Ruzsa, exponents --------------------------------------------------------

def test_ruzsa_examples():
    r = ruzsa_mult_audit(FpSet(7, [1, 2]))
    assert (r["card_AA"], r["card_shifted_product"], r["lhs"], r["rhs"]) == (3, 4, 6, 16)
    r = ruzsa_mult_audit(FpSet(7, [1]))
    assert (r["lhs"], r["rhs"]) == (1, 1)
    with pytest.raises(ValueError):
        ruzsa_mult_audit(FpSet(7, [6]))


def test_ruzsa_random(rng):
    for p in (101, 1009):
        for _ in range(100):
            A = random_fpset(rng, p, int(rng.integers(1, 20)), exclude=(0, -1))
            r = ruzsa_mult_audit(A)
            shifted = len({a * (b + 1) % p for a in A for b in A})
            prod_ = len({a * b % p for a in A for b in A})
            assert (r["card_AA"], r["card_shifted_product"]) == (prod_, shifted)
            assert prod_ * A.card <= shifted ** 2


def test_lemma2_example(rng):
    A = random_fpset(rng, 10007, 50)
    r = lemma2_audit(A)
    assert 20 < r["exponent"] < 24
    assert r["exponent_pass"]
    with pytest.raises(ValueError):
        lemma2_audit(FpSet(10007, [5]))
    with pytest.raises(ValueError):
        lemma2_audit(random_fpset(rng, 101, 11))


def test_lemma2_small_set_against_enumeration():
    A = FpSet(10007, [2, 3, 5, 7, 11, 13])
    r = lemma2_audit(A)
    d, two, shifted, _ = sizes(A)
    assert (r["card_diff"], r["card_2a2a"], r["card_shifted_product"]) == (d, two, shifted)
    assert r["exponent"] == pytest.approx((8 * math.log(d) + 4 * math.log(shifted)) / math.log(6))


def test_theorem1_exponent(rng):
    A = random_fpset(rng, 10007, 50)
    r = theorem1_exponent(A)
    assert r["beta"] > float(THEOREM1_EXPONENT)
    assert r["beta_pass"]
    assert r["K"] == r["card_shifted_product"] / 50
    gp = FpSet(10007, [pow(5, i, 10007) for i in range(1, 51)])
    assert theorem1_exponent(gp)["beta"] > 1
    with pytest.raises(ValueError):
        theorem1_exponent(FpSet(10007, [1]))


def test_beta_flag_is_exact():
    # |A(A+1)| = 4, |A| = 2: 4**105 >= 2**106 exactly
    r = theorem1_exponent(FpSet(7, [1, 2]))
    assert r["card_shifted_product"] == 4
    assert r["beta_pass"] == (4 ** 105 >= 2 ** 106)


def test_restricted_difference_identity(rng):
    assert restricted_difference_identity(FpSet(7, [1, 2]))
    for _ in range(20):
        assert restricted_difference_identity(random_fpset(rng, 101, 8))


def test_machinery_reports_spec_and_log_forms(rng):
    A = random_fpset(rng, 101, 12, exclude=(0, -1))
    r = lemma2_machinery(A)
    assert r["pigeonhole_lhs"] == r["N"] * r["card_A1"] * r["class_count"]
    assert r["pigeonhole_exact"] == (r["pigeonhole_lhs"] >= r["pigeonhole_rhs"])
    assert r["branch"] in {"singleton", "all-of-Fp", "quadruple"}

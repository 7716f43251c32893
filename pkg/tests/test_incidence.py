import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from growth_lab import AuditFailure
from growth_lab.incidence import (IncidenceConfig, as_rational, build_elekes_config,
                                  count_incidences, line_witness_counts, per_line_counts,
                                  rational_canonical, theorem3_audit)

F = Fraction


def incidences_by_enumeration(config):
    points = {(x, y) for x in config.xs for y in config.ys}
    return sum(1 for m, c in config.lines for x, y in points if y == m * x + c)


@pytest.mark.parametrize("num,den,expected", [(2, 4, (1, 2)), (1, -2, (-1, 2)), (0, 5, (0, 1))])
def test_rational_canonical(num, den, expected):
    r = rational_canonical(num, den)
    assert (r.numerator, r.denominator) == expected


def test_rational_inputs():
    with pytest.raises(ZeroDivisionError):
        rational_canonical(1, 0)
    with pytest.raises(TypeError):
        as_rational(0.5)
    assert as_rational("3/6") == F(1, 2)


def test_elekes_example():
    config = build_elekes_config([1, 2], [1], [1])
    assert set(config.points()) == {(1, 2), (1, 3), (2, 2), (2, 3)}
    assert config.lines == ((F(1), F(1)),)
    assert count_incidences(config) == 2
    assert incidences_by_enumeration(config) == 2


def test_generic_configurations():
    empty = IncidenceConfig((), (), ((F(1), F(0)),))
    assert count_incidences(empty) == 0
    square = IncidenceConfig((F(0), F(1)), (F(0), F(1)), ((F(0), F(0)),))
    assert count_incidences(square) == 2
    assert count_incidences(square, ("brute",)) == 2
    assert count_incidences(square, ("lines",)) == 2


def test_elekes_preconditions():
    with pytest.raises(ValueError):
        build_elekes_config([1, 2], [0, 1], [1])
    with pytest.raises(ValueError):
        build_elekes_config([1, -1], [1], [1])
    with pytest.raises(ValueError):
        build_elekes_config([1], [1], [0])
    with pytest.raises(ValueError):
        theorem3_audit([-1, 2], [1], [1])


def test_line_count_is_bc(rng):
    A, B, C = (rng.choice(np.arange(1, 1000), 7, replace=False).tolist() for _ in range(3))
    config = build_elekes_config(A, B, C)
    assert config.n_lines == len(set(config.lines)) == 49


nonzero_rationals = st.builds(F, st.integers(-30, 30).filter(bool), st.integers(1, 6))


@given(st.lists(nonzero_rationals, min_size=1, max_size=5, unique=True),
       st.lists(nonzero_rationals, min_size=1, max_size=5, unique=True),
       st.lists(nonzero_rationals, min_size=1, max_size=5, unique=True))
def test_all_methods_agree_with_enumeration_on_rationals(A, B, C):
    A = [a for a in A if a != -1] or [F(1)]
    config = build_elekes_config(A, B, C)
    expected = incidences_by_enumeration(config)
    for method in ("brute", "lines", "join", "pencil"):
        assert count_incidences(config, (method,)) == expected
    assert int(per_line_counts(config).sum()) == expected
    assert line_witness_counts(config).min() >= len(config.A)


@given(st.lists(st.integers(-50, 50).filter(lambda v: v not in (0, -1)), min_size=1, max_size=6, unique=True),
       st.lists(st.integers(-50, 50).filter(bool), min_size=1, max_size=6, unique=True),
       st.lists(st.integers(-50, 50).filter(bool), min_size=1, max_size=6, unique=True))
def test_all_methods_agree_with_enumeration_on_integers(A, B, C):
    config = build_elekes_config(A, B, C)
    expected = incidences_by_enumeration(config)
    for method in ("brute", "lines", "join", "pencil"):
        assert count_incidences(config, (method,)) == expected


def test_methods_agree_on_larger_integer_triple(rng):
    A, B, C = (rng.integers(1, 10 ** 6, 40).tolist() for _ in range(3))
    config = build_elekes_config(A, B, C)
    counts = {m: count_incidences(config, (m,)) for m in ("lines", "join", "pencil")}
    assert len(set(counts.values())) == 1


def test_methods_agree_on_structured_triple():
    # progressions create many extra incidences
    A = list(range(1, 21))
    B = list(range(1, 21))
    C = list(range(2, 42, 2))
    config = build_elekes_config(A, B, C)
    counts = {m: count_incidences(config, (m,)) for m in ("lines", "join", "pencil")}
    assert len(set(counts.values())) == 1
    assert counts["lines"] > 20 ** 3


def test_audit_example():
    r = theorem3_audit([1, 2], [1], [1])
    assert r["incidences"] == 2 >= r["lower"]
    assert r["ratio"] == pytest.approx(4 / math.sqrt(8))
    assert r["constant_one_holds"]


def test_audit_random_integer_triples(rng):
    for _ in range(5):
        A, B, C = (rng.choice(np.arange(1, 10 ** 6), 24, replace=False).tolist() for _ in range(3))
        r = theorem3_audit(A, B, C)
        assert r["n_lines"] == 24 * 24
        assert r["min_line_witnesses"] >= 24
        assert r["incidences"] >= 24 ** 3
        assert r["product_lhs"] ** 2 >= 24 ** 5


def test_disagreeing_methods_raise(monkeypatch):
    import growth_lab.incidence as inc

    monkeypatch.setitem(inc.METHODS, "pencil", lambda config: -1)
    with pytest.raises(AuditFailure):
        inc.count_incidences(build_elekes_config([1, 2], [1], [1]), ("lines", "pencil"))

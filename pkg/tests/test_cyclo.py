from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from iwasawa_growth import polyarith as pa
from iwasawa_growth.cyclo import (evaluate_at_eps, evaluate_poly_at_eps, field, matrix_evaluate_at_eps, min_poly_eps,
                                  phi_iterate_at_eps)
from iwasawa_growth.errors import PrecisionError
from iwasawa_growth.iwasawa import omega
from iwasawa_growth.logmatrix import SeriesMatrix
from iwasawa_growth.series import TruncatedSeries, phi_poly, q_poly
from iwasawa_growth.valuation import INF

levels = st.sampled_from([(3, 1), (3, 2), (3, 3), (5, 1), (5, 2)])


def test_min_poly_degrees():
    assert min_poly_eps(5, 1) == tuple(q_poly(5, 10**9))
    assert min_poly_eps(5, 1)[0] == 5 and len(min_poly_eps(5, 1)) == 5
    assert len(min_poly_eps(3, 2)) == 7
    for p, n in [(3, 1), (3, 2), (5, 2), (7, 1)]:
        F = field(p, n, 20)
        poly = min_poly_eps(p, n)
        assert F.element(list(poly)).is_zero_within_precision()
        assert (F.zeta() ** (p**n) - F.one()).is_zero_within_precision()
        assert not (F.zeta() ** (p ** (n - 1)) - F.one()).is_zero_within_precision()


def test_valuation_examples():
    assert evaluate_poly_at_eps([0, 1], 5, 1).valuation() == Fraction(1, 4)
    assert evaluate_poly_at_eps(phi_poly([0, 1], 5, 5**20), 5, 2).valuation() == Fraction(1, 4)
    assert field(5, 1).element([5, 1]).valuation() == Fraction(1, 4)
    assert evaluate_poly_at_eps(omega(1, 5), 5, 2).valuation() == Fraction(1, 4)
    for p, n in [(3, 2), (5, 2), (3, 3)]:
        F = field(p, n)
        for j in range(F.d):
            assert (F.eps() ** j).valuation() == Fraction(j, F.d)


def test_frobenius_iterates_of_q():
    for p, n in [(3, 3), (3, 4), (5, 3)]:
        mod = p**40
        for i in range(1, n - 1):
            q_i = phi_poly(q_poly(p, mod), p, mod, times=i)
            assert evaluate_poly_at_eps(q_i, p, n).valuation() == Fraction(1, p ** (n - i - 1))
        assert phi_iterate_at_eps(p, n, 1).valuation() == Fraction(1, (p - 1) * p ** (n - 2))
        assert phi_iterate_at_eps(p, n, n).valuation() == INF


def test_truncated_series_guard():
    f = TruncatedSeries.from_ints(5, [0, 1], 4, 20)
    x = evaluate_at_eps(f, 2)
    assert x.precision_bound() == Fraction(4, 20)
    with pytest.raises(PrecisionError):
        evaluate_at_eps(f, 2, guard=1)


def test_identity_matrix_valuations():
    _, vm, _ = matrix_evaluate_at_eps(SeriesMatrix.identity(5, 20), 2)
    assert [list(r) for r in vm.entries] == [[0, INF], [INF, 0]]


def test_cross_level_needs_lift():
    a, b = field(3, 1).eps(), field(3, 2).eps()
    with pytest.raises(ValueError):
        a + b
    lifted = a.lift(2)
    assert lifted.valuation() == Fraction(1, 2)
    assert lifted.n == 2


polys = st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=12)


@settings(max_examples=40, deadline=None)
@given(levels, polys, polys)
def test_evaluation_is_a_ring_homomorphism(level, f, g):
    p, n = level
    N = 25
    mod = p**N
    ef, eg = evaluate_poly_at_eps(f, p, n, N), evaluate_poly_at_eps(g, p, n, N)
    assert evaluate_poly_at_eps(pa.mul(f, g, mod), p, n, N) == ef * eg
    assert evaluate_poly_at_eps(pa.add(f, g, mod), p, n, N) == ef + eg


def _norm(f, p, n, N):
    """Product of all Galois conjugates of f(eps_n)."""
    mod = p**N
    out = field(p, n, N).one()
    for a in range(1, p**n):
        if a % p == 0:
            continue
        conj = pa.binomial_series(a, a + 1, mod)
        conj[0] -= 1
        out = out * evaluate_poly_at_eps(pa.compose(f, conj, mod), p, n, N)
    return out


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(3, 1), (3, 2), (5, 1)]), st.lists(st.integers(-50, 50), min_size=1, max_size=6))
def test_norm_valuation_is_an_integer(level, f):
    p, n = level
    N = 40
    x = evaluate_poly_at_eps(f, p, n, N)
    v = x.valuation()
    if v.is_inf or v > 3:
        return
    norm = _norm(f, p, n, N)
    assert all(c == 0 for c in norm.coords[1:])
    assert norm.valuation() == v * field(p, n).d
    assert norm.valuation().value.denominator == 1

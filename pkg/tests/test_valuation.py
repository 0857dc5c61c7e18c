import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from iwasawa_growth.cyclo import evaluate_poly_at_eps
from iwasawa_growth.valuation import INF, ExtValuation, ValMatrix, eps_order, trop_matmul, vmin, vmin_tie

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=50)
ext = st.one_of(rationals.map(ExtValuation), st.just(INF))
matrices = st.lists(ext, min_size=4, max_size=4).map(lambda xs: ValMatrix.of([xs[:2], xs[2:]]))


def test_vmin_examples():
    assert vmin(1, 0) == 0
    assert vmin(INF, Fraction(2, 5)) == Fraction(2, 5)
    value, tie = vmin_tie(Fraction(2, 5), Fraction(2, 5))
    assert value == Fraction(2, 5) and tie
    assert vmin_tie(1, 0) == (ExtValuation(0), False)
    assert vmin_tie(INF, INF) == (INF, False)


def test_parse_and_arithmetic():
    assert ExtValuation("2/5") == Fraction(2, 5)
    assert ExtValuation("inf").is_inf
    assert INF + 3 == INF
    assert ExtValuation(1) < INF
    assert not INF < INF
    with pytest.raises(ValueError):
        ExtValuation(1) - INF
    with pytest.raises(ValueError):
        ExtValuation(1) * -1


def test_trop_matmul_worked_rows():
    a = ValMatrix.of([[1, 0], [None, None]])
    b = ValMatrix.of([[1, 0], [Fraction(2, 5), None]])
    c = trop_matmul(a, b)
    assert c.entries == ValMatrix.of([[Fraction(2, 5), 1], [None, None]]).entries
    assert c.unique[0] == (True, True)
    assert (a @ a).entries == ValMatrix.of([[2, 1], [None, None]]).entries


def test_tie_drops_exact_flag():
    a = ValMatrix.of([[1, 1], [0, 0]])
    c = a @ ValMatrix.of([[0, 0], [0, 0]])
    assert c[0, 0] == 1 and not c.unique[0][0]


def test_eps_order():
    assert eps_order(Fraction(1, 4), 5, 1) == 1
    assert eps_order(Fraction(2, 5), 5, 2) == 8
    assert eps_order(INF, 3, 4).is_inf
    with pytest.raises(ValueError):
        eps_order(1, 5, 0)


@given(matrices, matrices, matrices)
def test_min_plus_associative(a, b, c):
    assert ((a @ b) @ c).same_values(a @ (b @ c))


@given(matrices, matrices, matrices)
def test_min_plus_distributes_over_min(a, b, c):
    def emin(x, y):
        return ValMatrix.of([[vmin(x[i, j], y[i, j]) for j in range(2)] for i in range(2)])

    assert (a @ emin(b, c)).same_values(emin(a @ b, a @ c))


@given(matrices)
def test_identity_and_absorbing(a):
    zero = ValMatrix.of([[None, None], [None, None]])
    assert (ValMatrix.identity() @ a).same_values(a)
    assert (a @ ValMatrix.identity()).same_values(a)
    assert (a @ zero).same_values(zero)


def _random_poly(p, rng):
    while True:
        coeffs = [rng.randrange(p**4) * p ** rng.randint(0, 3) for _ in range(rng.randint(1, 6))]
        if any(coeffs):
            return coeffs


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(1, 3), st.integers(0, 10**9))
def test_flagged_entries_match_exact_products(p, n, seed):
    rng = random.Random(seed)
    N = 30
    A = [[_random_poly(p, rng) for _ in range(2)] for _ in range(2)]
    B = [[_random_poly(p, rng) for _ in range(2)] for _ in range(2)]
    ea = [[evaluate_poly_at_eps(f, p, n, N) for f in row] for row in A]
    eb = [[evaluate_poly_at_eps(f, p, n, N) for f in row] for row in B]
    va = ValMatrix.of([[x.valuation() for x in row] for row in ea])
    vb = ValMatrix.of([[x.valuation() for x in row] for row in eb])
    trop = va @ vb
    for i in range(2):
        for j in range(2):
            exact = (ea[i][0] * eb[0][j] + ea[i][1] * eb[1][j]).valuation()
            if trop.unique[i][j]:
                assert trop[i, j] == exact
            else:
                assert trop[i, j] <= exact

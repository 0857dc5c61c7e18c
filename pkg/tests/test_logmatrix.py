import random
from fractions import Fraction

import pytest

from iwasawa_growth.cyclo import evaluate_at_eps
from iwasawa_growth.errors import HypothesisViolation, InvalidChangeOfBasis
from iwasawa_growth.logmatrix import (FormParams, SeriesMatrix, build_A, build_P, build_P_inverse, check_Mlog_congruence,
                                      closed_form_Hn, closed_form_row, compute_Hn, exact_Hn, logarithmic_matrix,
                                      random_seed_matrix, script_H, script_H_at_eps, structured_M, tropical_Hn,
                                      valuation_matrix_Hn)
from iwasawa_growth.valuation import INF

F53 = FormParams(5, 3, 5)


def _row(vm):
    return [x if x.is_inf else x.value for x in vm.row(0)]


def test_form_params_hypotheses():
    with pytest.raises(HypothesisViolation):
        FormParams(4, 3, 4)
    with pytest.raises(HypothesisViolation):
        FormParams(3, 5, 3)
    with pytest.raises(HypothesisViolation):
        FormParams(5, 3, 7)
    with pytest.raises(HypothesisViolation):
        FormParams(5, 3, 5, j=3)
    assert F53.v == 1


def test_matrix_A():
    A = build_A(F53)
    assert A == ((0, Fraction(-1, 25)), (1, Fraction(1, 5)))
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    assert abs(det) == Fraction(1, 25)
    P = build_P(F53, 6)
    for i in range(2):
        for j in range(2):
            assert P[i, j].coefficient(0) == A[i][j]


def test_P_inverse():
    Pinv = build_P_inverse(F53)
    assert Pinv[1, 1].is_zero()
    M = 10
    prod = build_P(F53, M) @ Pinv.truncated(M)
    ident = SeriesMatrix.identity(5).truncated(M)
    for i in range(2):
        for j in range(2):
            assert prod[i, j].agrees_with(ident[i, j], abs_prec=F53.N - 2)


@pytest.mark.parametrize("p,k,n", [(5, 3, 3), (5, 3, 4), (3, 3, 4), (5, 5, 3)])
def test_frobenius_twists_of_P_inverse(p, k, n):
    params = FormParams(p, k, p)
    Pinv = build_P_inverse(params)
    for i in range(1, n - 1):
        entry = Pinv.phi(i)[1, 0]
        assert evaluate_at_eps(entry, n, polynomial=True).valuation() == Fraction(k - 1, p ** (n - i - 1))


def test_first_H_matrices():
    H1 = compute_Hn(F53, 1)
    assert all(H1[i, j].is_zero() == (i != j) for i in range(2) for j in range(2))
    assert compute_Hn(F53, 2).entries == build_P_inverse(F53).phi().entries
    for n in (2, 3):
        literal = exact_Hn(F53, n, indexing="literal").matrix
        assert literal.row(1) == (INF, INF)


def test_worked_valuation_rows():
    assert _row(valuation_matrix_Hn(F53, 1)) == [1, 0]
    assert _row(valuation_matrix_Hn(F53, 2)) == [Fraction(2, 5), 1]
    assert _row(valuation_matrix_Hn(F53, 1, "closed_form")) == [1, 0]
    assert _row(valuation_matrix_Hn(F53, 2, "closed_form")) == [Fraction(2, 5), 1]
    assert _row(closed_form_Hn(F53, 3)) == [Fraction(7, 5), Fraction(2, 25)]
    # the exact value at n = 3 is the exponent-swapped odd form
    assert _row(valuation_matrix_Hn(F53, 3)) == [Fraction(27, 25), Fraction(2, 5)]
    assert _row(closed_form_Hn(F53, 3, "recursion")) == [Fraction(27, 25), Fraction(2, 5)]


def test_closed_form_conventions_agree_on_even_levels():
    for n in (2, 4, 6):
        assert closed_form_row(5, 3, 1, n) == closed_form_row(5, 3, 1, n, "recursion")
    assert closed_form_row(5, 3, 1, 1) == (1, 0)
    with pytest.raises(ValueError):
        closed_form_row(5, 3, 1, 3, "other")


@pytest.mark.parametrize("p,k", [(3, 3), (5, 3), (5, 5), (7, 3)])
def test_exact_equals_tropical_and_recursion_form(p, k):
    params = FormParams(p, k, p)
    for n in (1, 2, 3) if p < 7 else (1, 2):
        ex = exact_Hn(params, n)
        trop = tropical_Hn(params, n)
        assert ex.matrix.row(0) == trop.row(0)
        assert trop.unique[0] == (True, True)
        assert ex.matrix.row(0) == closed_form_Hn(params, n, "recursion").row(0)
        assert ex.min_guard >= 2


def test_script_H_level_one_is_identity():
    H = script_H(F53, 1)
    one, zero = H[0][0], H[0][1]
    assert all(c.coefficient(0) == 1 and all(x == 0 for x in c.coeffs[1:]) for c in one.components)
    assert all(c.is_zero() for c in zero.components)


@pytest.mark.parametrize("n", [1, 2])
def test_script_H_at_eps_matches_H(n):
    vals = [e.valuation() for e in script_H_at_eps(F53, n)[0]]
    assert vals == list(exact_Hn(F53, n).matrix.row(0))


def test_log_matrix_of_identity_is_A():
    A = build_A(F53)
    G = logarithmic_matrix(SeriesMatrix.identity(5), F53, 2)
    for i in range(2):
        for j in range(2):
            comp = G[i][j].component(0)
            assert comp.coefficient(0) == A[i][j]
            assert all(comp.coefficient(d) == 0 for d in range(1, comp.M))


def test_log_matrix_rejects_bad_change_of_basis():
    bad = SeriesMatrix.identity(5)
    bad = SeriesMatrix(((bad[0, 0], build_P_inverse(F53)[0, 1]), bad.entries[1]), True)
    with pytest.raises(InvalidChangeOfBasis):
        logarithmic_matrix(bad, F53, 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_congruence_structured(n):
    M = structured_M(F53, n, random_seed_matrix(F53, random.Random(n)))
    rep = check_Mlog_congruence(M, F53, n, require_congruence=False)
    assert rep.passed and rep.achieved_precision >= rep.target_precision


def test_congruence_identity_at_first_level():
    rep = check_Mlog_congruence(SeriesMatrix.identity(5), F53, 1)
    assert rep.passed and rep.remainder_valuation.is_inf


def test_congruence_negative_control_is_only_reported():
    rng = random.Random(5)
    R = random_seed_matrix(F53, rng)
    rep = check_Mlog_congruence(R, F53, 2)
    assert rep.target_precision == F53.N - 4
    assert isinstance(rep.passed, bool)

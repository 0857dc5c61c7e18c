from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from iwasawa_growth.cyclo import evaluate_poly_at_eps
from iwasawa_growth.errors import IndeterminateInvariants, PrecisionError
from iwasawa_growth.series import (IwasawaInvariants, TruncatedSeries, delta_element, delta_inverse_poly, gamma_act,
                                   iwasawa_invariants, newton_lower_bound, phi, phi_poly, psi, psi_poly, q_element,
                                   teichmuller)
from iwasawa_growth.polyarith import trim

primes = st.sampled_from([3, 5])


@st.composite
def series(draw, M=40, N=12):
    p = draw(primes)
    coeffs = draw(st.lists(st.integers(0, p**N - 1), min_size=M, max_size=M))
    return TruncatedSeries.from_ints(p, coeffs, M, N)


def test_invariants_examples():
    p = 5
    assert iwasawa_invariants(TruncatedSeries.from_ints(p, [p, 0, 1], 8, 20)) == IwasawaInvariants(0, 2)
    assert iwasawa_invariants(TruncatedSeries.from_ints(p, [0, p], 8, 20)) == IwasawaInvariants(1, 1)
    assert iwasawa_invariants(TruncatedSeries.from_ints(p, [2, 7, 5], 8, 20)) == IwasawaInvariants(0, 0)
    with pytest.raises(IndeterminateInvariants):
        iwasawa_invariants(TruncatedSeries.zero(p, 8, 20))


def test_newton_examples():
    b = newton_lower_bound(IwasawaInvariants(0, 2), Fraction(1, 4))
    assert b.value == Fraction(1, 2) and b.exact
    assert newton_lower_bound(IwasawaInvariants(3, 0), Fraction(7, 3)).value == 3
    assert newton_lower_bound(IwasawaInvariants(1, 1), Fraction(1, 20)).value == Fraction(21, 20)
    assert not newton_lower_bound(IwasawaInvariants(0, 2), 1).exact
    with pytest.raises(ValueError):
        newton_lower_bound(IwasawaInvariants(0, 2), 0)


def test_newton_example_against_cyclotomic_value():
    # p * (X + p) at eps_2 for p = 5: ord eps_2 = 1/20
    x = evaluate_poly_at_eps([25, 5], 5, 2)
    assert x.valuation() == Fraction(21, 20)


def test_distinguished_elements():
    for p in (3, 5, 7):
        M, N = 12, 20
        q = q_element(p, M, N)
        dinv = TruncatedSeries.from_ints(p, delta_inverse_poly(p), M, N)
        pi_pow = TruncatedSeries.from_ints(p, [0] * (p - 1) + [1], M, N)
        assert (dinv * p + pi_pow) == q
        assert (delta_element(p, M, N) * dinv) == TruncatedSeries.one(p, M, N)
        pi = TruncatedSeries.variable(p, M, N)
        assert (pi * q).agrees_with(phi(pi))


def test_teichmuller_lifts():
    for p in (3, 5, 7):
        N = 15
        for a in range(1, p):
            t = teichmuller(a, p, N)
            assert t % p == a and pow(t, p - 1, p**N) == 1


def test_rational_coefficients_and_inverse():
    f = TruncatedSeries.from_fractions(5, [Fraction(1, 5), 1, 2], 6, 20)
    assert f.B == 1 and f.coefficient(0) == Fraction(1, 5)
    g = TruncatedSeries.from_ints(5, [5, 1], 6, 20)
    assert (g * g.inverse()).agrees_with(TruncatedSeries.one(5, 6, 20), abs_prec=10)


def test_psi_needs_room():
    with pytest.raises(PrecisionError):
        psi(TruncatedSeries.from_ints(5, [1, 2, 3], 3, 10))


@settings(max_examples=40, deadline=None)
@given(series())
def test_psi_left_inverse_of_phi(f):
    g = psi(phi(f))
    assert g.agrees_with(f, M=g.M)


@settings(max_examples=40, deadline=None)
@given(primes, st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=30))
def test_phi_psi_projector_is_idempotent(p, coeffs):
    mod = p**40
    once = phi_poly(psi_poly(coeffs, p, mod), p, mod)
    twice = phi_poly(psi_poly(once, p, mod), p, mod)
    assert once == twice
    assert psi_poly(phi_poly(coeffs, p, mod), p, mod) == (trim([c % mod for c in coeffs]) or [0])


@settings(max_examples=30, deadline=None)
@given(series(), st.integers(1, 10**6))
def test_psi_commutes_with_gamma(f, c):
    if c % f.p == 0:
        c += 1
    left = psi(gamma_act(f, c))
    right = gamma_act(psi(f), c)
    assert left.agrees_with(right, M=min(left.M, right.M))


@settings(max_examples=40, deadline=None)
@given(primes, st.integers(0, 3), st.integers(0, 6), st.integers(0, 3), st.integers(0, 6), st.data())
def test_invariants_additive_and_unit_invariant(p, mu1, lam1, mu2, lam2, data):
    M, N = 30, 20

    def make(mu, lam):
        tail = data.draw(st.lists(st.integers(0, 50), min_size=M, max_size=M))
        c = [p * t for t in tail]
        c[lam] = data.draw(st.integers(1, p - 1))
        c[lam + 1:] = [t for t in tail[lam + 1:]]
        return TruncatedSeries.from_ints(p, [x * p**mu for x in c], M, N)

    f, g = make(mu1, lam1), make(mu2, lam2)
    unit = TruncatedSeries.from_ints(p, [data.draw(st.integers(1, p - 1))] +
                                     data.draw(st.lists(st.integers(0, 99), min_size=M - 1, max_size=M - 1)), M, N)
    a, b = iwasawa_invariants(f), iwasawa_invariants(g)
    assert (a.mu, a.lam) == (mu1, lam1)
    ab = iwasawa_invariants(f * g)
    assert (ab.mu, ab.lam) == (mu1 + mu2, lam1 + lam2)
    assert iwasawa_invariants(f * unit) == a


@settings(max_examples=25, deadline=None)
@given(primes, st.integers(0, 2), st.integers(0, 5), st.integers(1, 3), st.data())
def test_newton_bound_is_exact_in_range(p, mu, lam, n, data):
    d = (p - 1) * p ** (n - 1)
    if lam and Fraction(1, d) >= Fraction(1, lam):
        return
    M, N = 3 * d + lam + 2, 30
    tail = data.draw(st.lists(st.integers(0, p**4), min_size=M, max_size=M))
    c = [p * t for t in tail[:lam]] + [data.draw(st.integers(1, p - 1))] + tail[lam + 1:]
    coeffs = [x * p**mu for x in c]
    f = TruncatedSeries.from_ints(p, coeffs, M, N)
    bound = newton_lower_bound(iwasawa_invariants(f), Fraction(1, d))
    assert bound.exact
    assert evaluate_poly_at_eps(coeffs, p, n, N).valuation() == bound.value

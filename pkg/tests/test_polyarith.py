from math import comb

from hypothesis import given, strategies as st

from iwasawa_growth import polyarith as pa

MOD = 3**20
polys = st.lists(st.integers(0, MOD - 1), min_size=1, max_size=40)


def naive_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % MOD
    return pa.trim(out)


@given(polys, polys)
def test_mul_matches_schoolbook(a, b):
    assert pa.trim(pa.mul(a, b, MOD)) == naive_mul(a, b)


@given(polys, st.lists(st.integers(0, MOD - 1), min_size=1, max_size=8))
def test_monic_division(a, tail):
    m = tail + [1]
    q, r = pa.MonicReducer(m, MOD).divmod(a)
    assert len(pa.trim(r)) < len(m)
    assert pa.trim(pa.add(naive_mul(q, m) if q else [0], r, MOD)) == pa.trim([x % MOD for x in a])


@given(st.lists(st.integers(1, MOD - 1), min_size=1, max_size=20).map(lambda a: [1] + a[1:]), st.integers(1, 25))
def test_series_inverse(a, n):
    inv = pa.series_inverse(a, MOD, n)
    prod = pa.mul(a, inv, MOD, n)
    assert (prod + [0] * n)[:n] == [1] + [0] * (n - 1)


@given(st.integers(-50, 200), st.integers(1, 15))
def test_binomial_series(c, length):
    got = pa.binomial_series(c, length, MOD)
    if c >= 0:
        assert got == [comb(c, i) % MOD for i in range(length)]
    assert pa.binom_mod(c, 0, MOD) == 1


@given(polys, st.integers(-5, 5))
def test_taylor_shift_inverts(a, c):
    assert pa.trim(pa.taylor_shift(pa.taylor_shift(a, c, MOD), -c, MOD)) == pa.trim([x % MOD for x in a])

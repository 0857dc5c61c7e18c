"""Dense univariate polynomial kernels over Z/mZ.

Polynomials are plain lists of non-negative ints, lowest degree first.
Large products go through Kronecker substitution so that the heavy lifting
happens inside CPython's big-integer multiply.
"""

from __future__ import annotations

from math import comb
from typing import List, Sequence

Poly = List[int]

_SCHOOLBOOK_CUTOFF = 24


def trim(a: Poly) -> Poly:
    while a and a[-1] == 0:
        a.pop()
    return a


def reduce(a: Sequence[int], mod: int) -> Poly:
    return [c % mod for c in a]


def add(a: Sequence[int], b: Sequence[int], mod: int) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % mod
    return out


def sub(a: Sequence[int], b: Sequence[int], mod: int) -> Poly:
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % mod
    return out


def scale(a: Sequence[int], c: int, mod: int) -> Poly:
    return [(x * c) % mod for x in a]


def _pack(a: Sequence[int], width: int) -> int:
    return int.from_bytes(b"".join(c.to_bytes(width, "little") for c in a), "little")


def _unpack(x: int, width: int, count: int, mod: int) -> Poly:
    raw = x.to_bytes(width * count, "little")
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little") % mod for i in range(count)]


def mul(a: Sequence[int], b: Sequence[int], mod: int, trunc: int | None = None) -> Poly:
    """Product mod ``mod``; if ``trunc`` is given, only the first ``trunc`` coefficients."""
    if not a or not b:
        return []
    if trunc is not None:
        a = a[:trunc]
        b = b[:trunc]
    a = [c % mod for c in a]
    b = [c % mod for c in b]
    la, lb = len(a), len(b)
    n = la + lb - 1
    if min(la, lb) <= _SCHOOLBOOK_CUTOFF:
        out = [0] * n
        if la < lb:
            a, b, la, lb = b, a, lb, la
        for j, cb in enumerate(b):
            if cb:
                for i, ca in enumerate(a):
                    out[i + j] += ca * cb
        out = [c % mod for c in out]
    else:
        bound = (mod - 1) * (mod - 1) * min(la, lb)
        width = (bound.bit_length() + 8) // 8
        prod = _pack(a, width) * _pack(b, width)
        out = _unpack(prod, width, n, mod)
    if trunc is not None:
        out = out[:trunc]
    return out


def square(a: Sequence[int], mod: int, trunc: int | None = None) -> Poly:
    return mul(a, a, mod, trunc)


def power(a: Sequence[int], e: int, mod: int, trunc: int | None = None) -> Poly:
    result: Poly = [1 % mod]
    base = list(a)
    while e:
        if e & 1:
            result = mul(result, base, mod, trunc)
        e >>= 1
        if e:
            base = mul(base, base, mod, trunc)
    return result


def series_inverse(a: Sequence[int], mod: int, n: int) -> Poly:
    """Inverse of ``a`` mod x^n; the constant term must be a unit mod ``mod``."""
    c0 = a[0] % mod
    inv0 = pow(c0, -1, mod)
    g = [inv0]
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        # Newton step g <- g (2 - a g)
        ag = mul(a[:prec], g, mod, prec)
        corr = [(-c) % mod for c in ag]
        corr[0] = (corr[0] + 2) % mod
        g = mul(g, corr, mod, prec)
    return g[:n] + [0] * (n - len(g))


class MonicReducer:
    """Remainder by a fixed monic polynomial using a precomputed reversed inverse."""

    def __init__(self, modulus: Sequence[int], mod: int):
        f = trim(reduce(modulus, mod))
        if not f or f[-1] != 1 % mod:
            raise ValueError("modulus must be monic")
        self.f = f
        self.deg = len(f) - 1
        self.mod = mod
        self._rev_f = f[::-1]
        self._inv_len = 0
        self._inv: Poly = []

    def _rev_inverse(self, length: int) -> Poly:
        if length > self._inv_len:
            self._inv_len = max(length, 2 * self._inv_len)
            self._inv = series_inverse(self._rev_f, self.mod, self._inv_len)
        return self._inv[:length]

    def rem(self, a: Sequence[int]) -> Poly:
        d = self.deg
        mod = self.mod
        a = list(a)
        if len(a) <= d:
            return reduce(a, mod) + [0] * (d - len(a))
        if d == 0:
            return []
        qlen = len(a) - d
        rev_a = a[::-1][:qlen]
        qrev = mul(rev_a, self._rev_inverse(qlen), mod, qlen)
        q = qrev[::-1]
        qf = mul(q, self.f, mod, d)
        r = [(a[i] - (qf[i] if i < len(qf) else 0)) % mod for i in range(d)]
        return r

    def divmod(self, a: Sequence[int]) -> tuple[Poly, Poly]:
        d = self.deg
        mod = self.mod
        if len(a) <= d:
            return [], reduce(a, mod) + [0] * (d - len(a))
        qlen = len(a) - d
        rev_a = list(a)[::-1][:qlen]
        qrev = mul(rev_a, self._rev_inverse(qlen), mod, qlen)
        q = qrev[::-1]
        qf = mul(q, self.f, mod, d)
        r = [(a[i] - (qf[i] if i < len(qf) else 0)) % mod for i in range(d)]
        return q, r


def compose(f: Sequence[int], g: Sequence[int], mod: int, trunc: int | None = None) -> Poly:
    """f(g(x)) by divide and conquer on the coefficients of f."""
    f = list(f)
    if not f:
        return []
    powers = [list(g)]  # g^(2^i)
    while (1 << len(powers)) < len(f):
        powers.append(mul(powers[-1], powers[-1], mod, trunc))

    def rec(lo: int, hi: int, level: int) -> Poly:
        if hi - lo == 1:
            return [f[lo] % mod]
        half = 1 << (level - 1)
        mid = min(lo + half, hi)
        left = rec(lo, mid, level - 1)
        if mid >= hi:
            return left
        right = rec(mid, hi, level - 1)
        return add(left, mul(right, powers[level - 1], mod, trunc), mod)

    level = max(0, (len(f) - 1).bit_length())
    out = rec(0, len(f), level)
    if trunc is not None:
        out = out[:trunc]
    return out


def taylor_shift(f: Sequence[int], c: int, mod: int) -> Poly:
    """f(x + c)."""
    return compose(f, [c % mod, 1 % mod], mod)


def binomial_series(c: int, length: int, mod: int) -> Poly:
    """Coefficients of (1+x)^c mod x^length for an integer (possibly huge) exponent c."""
    out = [1 % mod]
    num = 1
    den = 1
    for i in range(1, length):
        num *= c - i + 1
        den *= i
        out.append((num // den) % mod)
    return out


def binom_mod(c: int, i: int, mod: int) -> int:
    if i < 0:
        return 0
    if c >= 0:
        return comb(c, i) % mod if c >= i else 0
    # C(c, i) = (-1)^i C(i - c - 1, i)
    val = comb(i - c - 1, i)
    return (-val if i % 2 else val) % mod


def derivative(f: Sequence[int], mod: int) -> Poly:
    return [(i * f[i]) % mod for i in range(1, len(f))]

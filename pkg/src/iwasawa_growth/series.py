"""Truncated power series over Z_p with Frobenius, psi and the Gamma-action.

A :class:`TruncatedSeries` stores ``p^-B * sum(c_i * pi^i)`` for ``i < M`` with the
integers ``c_i`` known modulo ``p^N``; the absolute p-adic precision of every
coefficient is therefore ``N - B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, NamedTuple, Sequence

from . import polyarith as pa
from .errors import IndeterminateInvariants, PrecisionError
from .valuation import ExtValuation, INF


def ord_p(x: int, p: int, cap: int | None = None) -> int | None:
    """p-adic valuation of an integer; ``None`` for zero (or when it reaches ``cap``)."""
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if cap is not None and v >= cap:
            return None
    return v


def fraction_to_padic(x: Fraction, p: int, N: int) -> tuple[int, int]:
    """Write ``x = p^-B * c`` with ``c`` an integer mod p^N; returns (c, B)."""
    num, den = x.numerator, x.denominator
    B = 0
    while den % p == 0:
        den //= p
        B += 1
    mod = p**N
    return (num * pow(den, -1, mod)) % mod, B


@dataclass(frozen=True)
class TruncatedSeries:
    p: int
    coeffs: tuple[int, ...]
    N: int
    B: int = 0

    def __post_init__(self) -> None:
        if len(self.coeffs) < 1:
            raise ValueError("truncation degree M must be >= 1")
        if self.N < 1:
            raise PrecisionError("p-adic precision exhausted", achieved=self.N)
        if self.B < 0:
            raise ValueError("denominator exponent must be >= 0")
        mod = self.p**self.N
        object.__setattr__(self, "coeffs", tuple(int(c) % mod for c in self.coeffs))

    # construction -----------------------------------------------------
    @classmethod
    def from_ints(cls, p: int, coeffs: Iterable[int], M: int, N: int, B: int = 0) -> "TruncatedSeries":
        cs = list(coeffs)[:M]
        cs += [0] * (M - len(cs))
        return cls(p, tuple(cs), N, B)

    @classmethod
    def from_fractions(cls, p: int, coeffs: Iterable[Fraction | int], M: int, N: int) -> "TruncatedSeries":
        cs = [Fraction(c) for c in list(coeffs)[:M]]
        cs += [Fraction(0)] * (M - len(cs))
        pairs = [fraction_to_padic(c, p, N + 64) for c in cs]
        B = max(b for _, b in pairs)
        mod = p**N
        ints = [(c * p ** (B - b)) % mod for c, b in pairs]
        return cls(p, tuple(ints), N, B)

    @classmethod
    def zero(cls, p: int, M: int, N: int) -> "TruncatedSeries":
        return cls(p, (0,) * M, N)

    @classmethod
    def one(cls, p: int, M: int, N: int) -> "TruncatedSeries":
        return cls.from_ints(p, [1], M, N)

    @classmethod
    def variable(cls, p: int, M: int, N: int) -> "TruncatedSeries":
        return cls.from_ints(p, [0, 1], M, N)

    # basic accessors --------------------------------------------------
    @property
    def M(self) -> int:
        return len(self.coeffs)

    @property
    def mod(self) -> int:
        return self.p**self.N

    @property
    def abs_precision(self) -> int:
        return self.N - self.B

    def coefficient(self, i: int) -> Fraction:
        """Exact rational representative of the i-th coefficient."""
        return Fraction(_signed(self.coeffs[i], self.mod), self.p**self.B)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def normalized(self) -> "TruncatedSeries":
        """Strip common factors of p out of the denominator (lowering N accordingly)."""
        B, N, cs = self.B, self.N, list(self.coeffs)
        while B > 0 and N > 1 and all(c % self.p == 0 for c in cs):
            cs = [c // self.p for c in cs]
            B -= 1
            N -= 1
        return TruncatedSeries(self.p, tuple(cs), N, B)

    def with_precision(self, M: int | None = None, N: int | None = None) -> "TruncatedSeries":
        M = self.M if M is None else M
        N = self.N if N is None else N
        if M > self.M or N > self.N:
            raise PrecisionError("cannot raise precision of a truncated series", achieved=min(self.M, self.N))
        return TruncatedSeries(self.p, self.coeffs[:M], N, self.B)

    def _rescaled(self, B: int, N: int) -> list[int]:
        shift = p_pow(self.p, B - self.B)
        return [(c * shift) % self.p**N for c in self.coeffs]

    def _check(self, other: "TruncatedSeries") -> None:
        if self.p != other.p:
            raise ValueError("series over different primes")

    # ring operations --------------------------------------------------
    def __add__(self, other: "TruncatedSeries | int") -> "TruncatedSeries":
        if isinstance(other, int):
            other = TruncatedSeries.from_ints(self.p, [other], self.M, self.N)
        self._check(other)
        M = min(self.M, other.M)
        B = max(self.B, other.B)
        N = min(self.N - self.B, other.N - other.B) + B
        a = self._rescaled(B, N)[:M]
        b = other._rescaled(B, N)[:M]
        return TruncatedSeries(self.p, tuple(x + y for x, y in zip(a, b)), N, B)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.p, tuple(-c for c in self.coeffs), self.N, self.B)

    def __sub__(self, other: "TruncatedSeries | int") -> "TruncatedSeries":
        if isinstance(other, int):
            other = TruncatedSeries.from_ints(self.p, [other], self.M, self.N)
        return self + (-other)

    def __rsub__(self, other: int) -> "TruncatedSeries":
        return (-self) + other

    def __mul__(self, other: "TruncatedSeries | int | Fraction") -> "TruncatedSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        M = min(self.M, other.M)
        N = min(self.N, other.N)
        mod = self.p**N
        c = pa.mul(self.coeffs[:M], other.coeffs[:M], mod, M)
        return TruncatedSeries.from_ints(self.p, c, M, N, self.B + other.B)

    __rmul__ = __mul__

    def scale(self, c: int | Fraction) -> "TruncatedSeries":
        num, B = fraction_to_padic(Fraction(c), self.p, self.N + 64)
        mod = self.mod
        return TruncatedSeries(self.p, tuple((x * num) % mod for x in self.coeffs), self.N, self.B + B)

    def __pow__(self, e: int) -> "TruncatedSeries":
        if e < 0:
            return self.inverse() ** (-e)
        c = pa.power(self.coeffs, e, self.mod, self.M)
        return TruncatedSeries.from_ints(self.p, c, self.M, self.N, self.B * e)

    def inverse(self) -> "TruncatedSeries":
        """Inverse of a series whose constant term is a p-adic unit times a power of p."""
        c0 = self.coeffs[0]
        v = ord_p(c0, self.p, self.N)
        if v is None:
            raise PrecisionError("constant term is zero within precision", achieved=self.N)
        if v == 0:
            inv = pa.series_inverse(self.coeffs, self.mod, self.M)
            return TruncatedSeries(self.p, tuple(inv), self.N, 0).scale(Fraction(self.p**self.B))
        # constant term p^v * unit: go through exact rationals, growing denominators are tracked
        fr = [self.coefficient(i) for i in range(self.M)]
        return TruncatedSeries.from_fractions(self.p, fraction_series_inverse(fr, self.M), self.M, self.N)

    def derivative_d(self) -> "TruncatedSeries":
        """(1+pi) d/dpi, truncated to M - 1 terms."""
        d = pa.derivative(self.coeffs, self.mod)
        if not d:
            d = [0]
        shifted = [0] + d
        out = pa.add(d, shifted, self.mod)[: max(1, self.M - 1)]
        return TruncatedSeries.from_ints(self.p, out, max(1, self.M - 1), self.N, self.B)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs, self.N, self.B))

    def agrees_with(self, other: "TruncatedSeries", M: int | None = None, abs_prec: int | None = None) -> bool:
        """Equality of the first M coefficients up to absolute precision ``abs_prec``."""
        diff = self - other
        M = diff.M if M is None else min(M, diff.M)
        A = diff.abs_precision if abs_prec is None else min(abs_prec, diff.abs_precision)
        if A <= 0:
            return True
        need = p_pow(self.p, A + diff.B)
        return all(c % need == 0 for c in diff.coeffs[:M])

    def valuations(self) -> list[ExtValuation]:
        out = []
        for c in self.coeffs:
            v = ord_p(c, self.p, self.N)
            out.append(INF if v is None else ExtValuation(v - self.B))
        return out

    def __repr__(self) -> str:
        head = ", ".join(str(_signed(c, self.mod)) for c in self.coeffs[:6])
        more = ", ..." if self.M > 6 else ""
        den = f"p^-{self.B} * " if self.B else ""
        return f"TruncatedSeries(p={self.p}, {den}[{head}{more}], M={self.M}, N={self.N})"


def p_pow(p: int, e: int) -> int:
    if e < 0:
        raise ValueError("negative exponent")
    return p**e


def _signed(c: int, mod: int) -> int:
    return c - mod if c > mod // 2 else c


def fraction_series_inverse(a: Sequence[Fraction], M: int) -> list[Fraction]:
    a = [Fraction(x) for x in a]
    if a[0] == 0:
        raise ZeroDivisionError("constant term is zero")
    inv0 = 1 / a[0]
    g = [inv0]
    for i in range(1, M):
        s = sum((a[j] * g[i - j] for j in range(1, min(i, len(a) - 1) + 1)), Fraction(0))
        g.append(-s * inv0)
    return g


# Frobenius, psi, Gamma ----------------------------------------------------

def phi_pi_poly(p: int, mod: int) -> list[int]:
    """(1+pi)^p - 1."""
    return [0] + [pa.binom_mod(p, i, mod) for i in range(1, p + 1)]


def phi(f: TruncatedSeries) -> TruncatedSeries:
    """pi -> (1+pi)^p - 1."""
    c = pa.compose(f.coeffs, phi_pi_poly(f.p, f.mod), f.mod, f.M)
    return TruncatedSeries.from_ints(f.p, c, f.M, f.N, f.B)


def phi_poly(coeffs: Sequence[int], p: int, mod: int, times: int = 1) -> list[int]:
    """Exact Frobenius of a polynomial, iterated ``times`` times."""
    out = list(coeffs)
    g = phi_pi_poly(p, mod)
    for _ in range(times):
        out = pa.compose(out, g, mod)
    return pa.trim(out) or [0]


def psi(f: TruncatedSeries, out_degree: int | None = None) -> TruncatedSeries:
    """Left inverse of phi.

    The unknown tail ``pi^M * r`` of ``f`` contributes to the s-th output coefficient
    with p-adic valuation at least ``floor(M/p) - s``; the output is returned with
    ``out_degree`` coefficients and absolute precision reduced accordingly.  By default
    the largest truncation that keeps the input's absolute precision is used.
    """
    p = f.p
    j = f.M // p
    A = f.abs_precision
    if out_degree is None:
        out_degree = max(1, j - A + 1)
    if out_degree > j:
        raise PrecisionError(f"psi needs M >= p * out_degree (have M={f.M})", achieved=j)
    A_out = min(A, j - out_degree + 1)
    if A_out < 1:
        raise PrecisionError("psi exhausted p-adic precision; raise the truncation degree M", achieved=A_out)
    coeffs = psi_poly(f.coeffs, p, f.mod)
    coeffs = (coeffs + [0] * out_degree)[:out_degree]
    return TruncatedSeries.from_ints(p, coeffs, out_degree, A_out + f.B, f.B)


def psi_poly(coeffs: Sequence[int], p: int, mod: int) -> list[int]:
    """Exact psi of a polynomial in pi: select the y^(p i) terms in the (1+pi)-basis."""
    y = pa.taylor_shift(coeffs, -1, mod)  # coefficients in y = 1 + pi
    sel = y[::p]
    return pa.taylor_shift(sel, 1, mod) if sel else [0]


def binomial_unit_power(c: int, M: int, N: int, p: int) -> list[int]:
    """(1+pi)^c mod (pi^M, p^N) for an exact integer exponent c (may be negative or huge)."""
    mod = p**N
    # C(c, i) mod p^N depends only on c mod p^(N + v_p(i!)); keep enough digits
    extra = 0
    i = M - 1
    while i:
        i //= p
        extra += i
    cmod = p ** (N + extra + 1)
    c = c % cmod
    return pa.binomial_series(c, M, mod)


def gamma_act(f: TruncatedSeries, c: int) -> TruncatedSeries:
    """pi -> (1+pi)^c - 1 for a unit c, given as an integer representative."""
    if c % f.p == 0:
        raise ValueError("gamma_act needs a p-adic unit")
    sub = binomial_unit_power(c, f.M, f.N, f.p)
    sub[0] = (sub[0] - 1) % f.mod
    out = pa.compose(f.coeffs, sub, f.mod, f.M)
    return TruncatedSeries.from_ints(f.p, out, f.M, f.N, f.B)


def teichmuller(a: int, p: int, N: int) -> int:
    """Teichmuller lift of a mod p, to precision p^N, by iterated p-th powering."""
    mod = p**N
    x = a % mod
    if x % p == 0:
        return 0
    for _ in range(N):
        x = pow(x, p, mod)
    return x


# distinguished elements ----------------------------------------------------

def q_poly(p: int, mod: int) -> list[int]:
    """q = phi(pi)/pi, a polynomial of degree p - 1."""
    return [pa.binom_mod(p, i, mod) for i in range(1, p + 1)]


def delta_inverse_poly(p: int) -> list[int]:
    """1/delta = (q - pi^(p-1))/p, an integral polynomial with constant term 1."""
    return [comb(p, i) // p for i in range(1, p)]


def q_element(p: int, M: int, N: int) -> TruncatedSeries:
    return TruncatedSeries.from_ints(p, q_poly(p, p**N), M, N)


def delta_element(p: int, M: int, N: int) -> TruncatedSeries:
    dinv = TruncatedSeries.from_ints(p, delta_inverse_poly(p), M, N)
    return dinv.inverse()


# Iwasawa invariants --------------------------------------------------------

@dataclass(frozen=True)
class IwasawaInvariants:
    mu: int
    lam: int
    e: int = 1

    @property
    def lambda_(self) -> int:
        return self.lam


def iwasawa_invariants(f: TruncatedSeries) -> IwasawaInvariants:
    """(mu, lambda) read off the coefficient valuations (Weierstrass preparation)."""
    best = None
    idx = None
    for i, c in enumerate(f.coeffs):
        v = ord_p(c, f.p, f.N)
        if v is not None and (best is None or v < best):
            best, idx = v, i
    if best is None:
        raise IndeterminateInvariants("series vanishes within precision")
    mu = best - f.B
    if mu < 0:
        raise ValueError("series is not integral; mu would be negative")
    return IwasawaInvariants(mu, idx)


class NewtonBound(NamedTuple):
    value: ExtValuation
    exact: bool


def newton_lower_bound(inv: IwasawaInvariants, ordx: ExtValuation | Fraction | int | str) -> NewtonBound:
    """min((mu+1)/e, mu/e + lambda*ord(x)); exact when ord(x) < 1/(e*lambda)."""
    x = ordx if isinstance(ordx, ExtValuation) else ExtValuation(ordx)
    if x.is_inf or x.value <= 0:
        raise ValueError("need 0 < ord_p(x) < inf")
    e = inv.e
    a = Fraction(inv.mu + 1, e)
    b = Fraction(inv.mu, e) + inv.lam * x.value
    value = min(a, b)
    exact = inv.lam == 0 or x.value < Fraction(1, e * inv.lam)
    return NewtonBound(ExtValuation(value), exact)

"""Exact arithmetic in Z_p[zeta_{p^n}] in the power basis of eps_n = zeta_{p^n} - 1.

This module is the ground truth for every valuation claim in the package: an
element is stored as ``p^-B * sum(c_i * eps_n^i)`` for ``i < d = p^(n-1)(p-1)``
with the ``c_i`` known mod ``p^N``.  Because eps_n is a uniformizer of valuation
``1/d`` the minimum ``ord_p(c_i) + i/d`` is attained at a single index, so the
valuation is exact as soon as it is below the precision bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import NamedTuple, Sequence

from . import polyarith as pa
from .errors import PrecisionError
from .series import TruncatedSeries, ord_p, phi_pi_poly
from .valuation import ExtValuation, INF


@lru_cache(maxsize=None)
def min_poly_eps(p: int, n: int) -> tuple[int, ...]:
    """Minimal polynomial of eps_n over Q_p: Phi_{p^n}(1 + pi) = phi^(n-1)(q), exact integers."""
    if n < 1:
        raise ValueError("level must be >= 1")
    step = p ** (n - 1)
    d = step * (p - 1)
    coeffs = []
    for i in range(d + 1):
        coeffs.append(sum(comb(j * step, i) for j in range(p)))
    return tuple(coeffs)


@lru_cache(maxsize=None)
def _field(p: int, n: int, N: int) -> "CyclotomicField":
    return CyclotomicField(p, n, N)


class CyclotomicField:
    """Q_p(zeta_{p^n}) at working precision N; use :func:`field` to get a cached instance."""

    def __init__(self, p: int, n: int, N: int):
        self.p = p
        self.n = n
        self.N = N
        self.mod = p**N
        self.d = p ** (n - 1) * (p - 1)
        self.minpoly = [c % self.mod for c in min_poly_eps(p, n)]
        self.reducer = pa.MonicReducer(self.minpoly, self.mod)

    def __repr__(self) -> str:
        return f"CyclotomicField(p={self.p}, n={self.n}, N={self.N})"

    def element(self, coords: Sequence[int], B: int = 0, trunc: ExtValuation = INF) -> "CyclotomicElement":
        return CyclotomicElement(self, tuple(self.reducer.rem(list(coords))), B, trunc)

    def zero(self) -> "CyclotomicElement":
        return self.element([0])

    def one(self) -> "CyclotomicElement":
        return self.element([1])

    def eps(self) -> "CyclotomicElement":
        return self.element([0, 1])

    def zeta(self) -> "CyclotomicElement":
        return self.element([1, 1])

    def eps_at_level(self, m: int) -> "CyclotomicElement":
        """eps_m = zeta_{p^n}^(p^(n-m)) - 1 as an element of this field (0 <= m <= n)."""
        if not 0 <= m <= self.n:
            raise ValueError("need 0 <= m <= n")
        z = self.zeta() ** (self.p ** (self.n - m))
        return z - self.one()


def field(p: int, n: int, N: int = 40) -> CyclotomicField:
    return _field(p, n, N)


class ValuationReport(NamedTuple):
    value: ExtValuation
    bound: ExtValuation
    guard: ExtValuation
    exact: bool


@dataclass(frozen=True)
class CyclotomicElement:
    field: CyclotomicField
    coords: tuple[int, ...]
    B: int = 0
    trunc: ExtValuation = INF  # lower bound for the valuation of the unknown truncation error

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def n(self) -> int:
        return self.field.n

    def _same(self, other: "CyclotomicElement") -> None:
        if other.field.p != self.field.p or other.field.n != self.field.n:
            raise ValueError("elements live at different levels; lift explicitly first")

    def _rescaled(self, B: int) -> list[int]:
        s = self.p ** (B - self.B)
        return [(c * s) % self.field.mod for c in self.coords]

    def __add__(self, other: "CyclotomicElement") -> "CyclotomicElement":
        self._same(other)
        B = max(self.B, other.B)
        a, b = self._rescaled(B), other._rescaled(B)
        return CyclotomicElement(self.field, tuple((x + y) % self.field.mod for x, y in zip(a, b)), B,
                                 min(self.trunc, other.trunc))

    def __neg__(self) -> "CyclotomicElement":
        return CyclotomicElement(self.field, tuple((-c) % self.field.mod for c in self.coords), self.B, self.trunc)

    def __sub__(self, other: "CyclotomicElement") -> "CyclotomicElement":
        return self + (-other)

    def __mul__(self, other: "CyclotomicElement | int") -> "CyclotomicElement":
        if isinstance(other, int):
            return CyclotomicElement(self.field, tuple((c * other) % self.field.mod for c in self.coords),
                                     self.B, self.trunc)
        self._same(other)
        prod = pa.mul(self.coords, other.coords, self.field.mod)
        coords = self.field.reducer.rem(prod)
        trunc = INF
        if not (self.trunc.is_inf and other.trunc.is_inf):
            va, vb = self.lower_valuation(), other.lower_valuation()
            trunc = min(va + other.trunc, vb + self.trunc, self.trunc + other.trunc)
        return CyclotomicElement(self.field, tuple(coords), self.B + other.B, trunc)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "CyclotomicElement":
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def precision_bound(self) -> ExtValuation:
        return min(ExtValuation(self.field.N - self.B), self.trunc)

    def valuation_report(self) -> ValuationReport:
        d = self.field.d
        N = self.field.N
        best: Fraction | None = None
        for i, c in enumerate(self.coords):
            v = ord_p(c, self.p, N)
            if v is None:
                continue
            w = Fraction(v) + Fraction(i, d)
            if best is None or w < best:
                best = w
        bound = self.precision_bound()
        if best is None:
            return ValuationReport(INF, bound, INF, False)
        value = ExtValuation(best - self.B)
        if value < bound:
            return ValuationReport(value, bound, bound - value, True)
        return ValuationReport(INF, bound, INF, False)

    def valuation(self) -> ExtValuation:
        """ord_p of this element; +inf means zero within precision (not proven zero)."""
        return self.valuation_report().value

    def lower_valuation(self) -> ExtValuation:
        r = self.valuation_report()
        return r.value if r.exact else r.bound

    def is_zero_within_precision(self) -> bool:
        return not self.valuation_report().exact

    def lift(self, n_new: int) -> "CyclotomicElement":
        """Image under the inclusion of level n into level n_new (eps_n = phi^(n_new-n)(pi) at eps_{n_new})."""
        if n_new < self.n:
            raise ValueError("can only lift to a higher level")
        target = field(self.p, n_new, self.field.N)
        img = target.eps_at_level(self.n)
        out = target.zero()
        for c in reversed(self.coords):
            out = out * img + target.element([c])
        return CyclotomicElement(target, out.coords, self.B, self.trunc)

    def __repr__(self) -> str:
        return f"CyclotomicElement(p={self.p}, n={self.n}, v={self.valuation()})"


def evaluate_poly_at_eps(coeffs: Sequence[int], p: int, n: int, N: int = 40, B: int = 0) -> CyclotomicElement:
    """Exact evaluation of the polynomial p^-B * sum(coeffs_i pi^i) at eps_n."""
    F = field(p, n, N)
    return CyclotomicElement(F, tuple(F.reducer.rem([c % F.mod for c in coeffs])), B, INF)


def evaluate_at_eps(f: TruncatedSeries, n: int, *, polynomial: bool = False, guard: int | Fraction | None = None,
                    N: int | None = None) -> CyclotomicElement:
    """Substitute pi = eps_n.

    Unless ``polynomial`` is set the unknown tail ``pi^M * r`` of ``f`` has valuation at
    least ``M/d - B``; that bound is stored on the result.  When ``guard`` is given and
    the truncation bound does not reach it a :class:`PrecisionError` is raised.
    """
    N = f.N if N is None else N
    F = field(f.p, n, N)
    coords = F.reducer.rem([c % F.mod for c in f.coeffs])
    trunc = INF if polynomial else ExtValuation(Fraction(f.M, F.d) - f.B)
    if guard is not None and trunc < ExtValuation(guard):
        raise PrecisionError(f"truncation M={f.M} gives valuation guard {trunc} < {guard}", achieved=trunc)
    return CyclotomicElement(F, tuple(coords), f.B, trunc)


def matrix_evaluate_at_eps(m, n: int, *, polynomial: bool | None = None, N: int | None = None):
    """Entrywise evaluation of a SeriesMatrix; returns (elements, valuation grid)."""
    from .valuation import ValMatrix

    poly = m.exact if polynomial is None else polynomial
    elems = tuple(tuple(evaluate_at_eps(e, n, polynomial=poly, N=N) for e in row) for row in m.entries)
    reports = [[e.valuation_report() for e in row] for row in elems]
    vm = ValMatrix(tuple(tuple(r.value for r in row) for row in reports),
                   tuple(tuple(True for _ in row) for row in reports))
    return elems, vm, reports


def phi_iterate_at_eps(p: int, n: int, i: int, N: int = 40) -> CyclotomicElement:
    """phi^i(pi) evaluated at eps_n, i.e. eps_{n-i} (zero when i >= n)."""
    F = field(p, n, N)
    if i >= n:
        return F.zero()
    g = [0, 1]
    phi_pi = phi_pi_poly(p, F.mod)
    for _ in range(i):
        g = pa.compose(g, phi_pi, F.mod)
    return evaluate_poly_at_eps(g, p, n, N)

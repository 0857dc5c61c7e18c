"""The Iwasawa algebra O[Delta][[X]], the omega polynomials, the twist and the Mellin transform.

An element is stored through its p - 1 isotypic components: component ``a`` is the
image under the character ``omega^a`` of Delta (omega = Teichmuller), a series in
X = gamma_1 - 1.  The group element ``delta_zeta * gamma_1^r`` acts on 1 + pi as
``(1+pi)^(zeta * u^r)`` with ``u = 1 + p``.

Finite level: Lambda / omega_tilde_{n-1,m} is identified with
``O[y] / ((y^(p^n) - 1)^(m+1))`` restricted to psi = 0, where ``y = 1 + pi``.
Writing ``w = y^(p^n) - 1`` every monomial becomes ``y^c0 (1+w)^e`` with
``0 <= c0 < p^n``, so the transform splits into one small unimodular block per
unit residue ``c0``.  Both directions are explicit; a dense linear solve is
kept only as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import polyarith as pa
from .cyclo import CyclotomicElement, evaluate_at_eps, field
from .errors import InconsistentSystem, PrecisionError
from .series import TruncatedSeries, fraction_to_padic, gamma_act, ord_p, teichmuller
from .snf import inverse_mod, matvec_mod
from .valuation import ExtValuation, INF


@dataclass(frozen=True)
class CyclotomicUnit:
    """u = chi(gamma), a principal unit that generates 1 + pZ_p."""

    p: int
    u: int

    def __post_init__(self) -> None:
        if self.u % self.p != 1 or self.u % (self.p * self.p) == 1:
            raise ValueError("u must be 1 mod p and not 1 mod p^2")

    @classmethod
    def standard(cls, p: int) -> "CyclotomicUnit":
        return cls(p, 1 + p)


def _u(p: int, u: int | None) -> int:
    return 1 + p if u is None else CyclotomicUnit(p, u).u


@lru_cache(maxsize=None)
def teichmuller_table(p: int, N: int) -> tuple[int, ...]:
    """Entry a is the Teichmuller lift of a (a = 1, ..., p - 1); entry 0 is unused."""
    return (0,) + tuple(teichmuller(a, p, N) for a in range(1, p))


# omega polynomials ------------------------------------------------------------

def omega(n: int, p: int, N: int = 40) -> list[int]:
    """omega_n(X) = (1+X)^(p^n) - 1, coefficients mod p^N."""
    if n < 0:
        raise ValueError("n must be >= 0")
    mod = p**N
    out = pa.binomial_series(p**n, p**n + 1, mod)
    out[0] = (out[0] - 1) % mod
    return out


def omega_twisted(n: int, m: int, p: int, N: int = 40, u: int | None = None) -> list[int]:
    """omega_{n,m}(X) = omega_n(u^-m (1+X) - 1) = u^(-m p^n) (1+X)^(p^n) - 1."""
    mod = p**N
    c = pow(_u(p, u), -m * p**n, mod)
    out = pa.scale(pa.binomial_series(p**n, p**n + 1, mod), c, mod)
    out[0] = (out[0] - 1) % mod
    return out


def omega_tilde(n: int, m: int, p: int, N: int = 40, u: int | None = None) -> list[int]:
    """prod_{i=0}^m omega_{n,i}, of degree (m+1) p^n."""
    mod = p**N
    out = [1]
    for i in range(m + 1):
        out = pa.mul(out, omega_twisted(n, i, p, N, u), mod)
    return out


@lru_cache(maxsize=None)
def omega_tilde_monic(n: int, m: int, p: int, N: int, u: int | None = None) -> tuple[int, ...]:
    """The monic generator prod_i ((1+X)^(p^n) - u^(i p^n)) of the same ideal as omega_tilde."""
    mod = p**N
    uu = _u(p, u)
    base = pa.binomial_series(p**n, p**n + 1, mod)
    out = [1]
    for i in range(m + 1):
        f = list(base)
        f[0] = (f[0] - pow(uu, i * p**n, mod)) % mod
        out = pa.mul(out, f, mod)
    return tuple(out)


@lru_cache(maxsize=None)
def _reducer(n: int, m: int, p: int, N: int, u: int | None) -> pa.MonicReducer:
    return pa.MonicReducer(omega_tilde_monic(n, m, p, N, u), p**N)


# elements -------------------------------------------------------------------

@dataclass(frozen=True)
class IwasawaElement:
    p: int
    components: tuple[TruncatedSeries, ...]
    exact: bool = False  # components are polynomials, no unknown tail
    level: tuple[int, int] | None = None  # (n-1, m) when reduced mod omega_tilde_{n-1,m}

    def __post_init__(self) -> None:
        if len(self.components) != self.p - 1:
            raise ValueError(f"need exactly p - 1 = {self.p - 1} components")
        if any(c.p != self.p for c in self.components):
            raise ValueError("components over a different prime")

    @classmethod
    def from_series(cls, F: TruncatedSeries, exact: bool = False) -> "IwasawaElement":
        """The image of F(gamma_1 - 1) in O[[Gamma_1]] (all isotypic components equal F)."""
        return cls(F.p, (F,) * (F.p - 1), exact)

    @classmethod
    def one(cls, p: int, M: int = 1, N: int = 40) -> "IwasawaElement":
        return cls.from_series(TruncatedSeries.one(p, M, N), exact=True)

    @classmethod
    def from_gamma1_parts(cls, p: int, parts: Sequence[TruncatedSeries], exact: bool = False,
                          level: tuple[int, int] | None = None) -> "IwasawaElement":
        """Assemble sum_zeta delta_zeta G_zeta(X); ``parts[a-1]`` is G for zeta = teich(a)."""
        if len(parts) != p - 1:
            raise ValueError("need one part per element of Delta")
        N = min(g.N for g in parts)
        B = max(g.B for g in parts)
        M = min(g.M for g in parts)
        mod = p**N
        teich = teichmuller_table(p, N)
        comps = []
        for a in range(p - 1):
            acc = [0] * M
            for z in range(1, p):
                g = parts[z - 1]
                s = pow(teich[z], a, mod) * p ** (B - g.B)
                for i in range(M):
                    acc[i] = (acc[i] + s * g.coeffs[i]) % mod
            comps.append(TruncatedSeries(p, tuple(acc), N, B))
        return cls(p, tuple(comps), exact, level)

    @property
    def M(self) -> int:
        return min(c.M for c in self.components)

    @property
    def N(self) -> int:
        return min(c.N for c in self.components)

    @property
    def B(self) -> int:
        return max(c.B for c in self.components)

    def component(self, a: int) -> TruncatedSeries:
        return self.components[a % (self.p - 1)]

    def is_gamma1(self) -> bool:
        """True when the element lies in O[[Gamma_1]], i.e. all components coincide."""
        c0 = self.components[0]
        return all(c == c0 for c in self.components[1:])

    def gamma1_parts(self) -> list[TruncatedSeries]:
        """G_zeta with self = sum_zeta delta_zeta G_zeta(X); inverse of :meth:`from_gamma1_parts`."""
        p = self.p
        N, B, M = self.N, self.B, self.M
        mod = p**N
        teich = teichmuller_table(p, N)
        inv = pow(p - 1, -1, mod)
        out = []
        for z in range(1, p):
            zinv = pow(teich[z], -1, mod)
            acc = [0] * M
            for a, comp in enumerate(self.components):
                s = pow(zinv, a, mod) * inv * p ** (B - comp.B)
                for i in range(M):
                    acc[i] = (acc[i] + s * comp.coeffs[i]) % mod
            out.append(TruncatedSeries(p, tuple(acc), N, B))
        return out

    def _zip(self, other: "IwasawaElement", op) -> "IwasawaElement":
        if other.p != self.p:
            raise ValueError("different primes")
        level = self.level if self.level == other.level else None
        return IwasawaElement(self.p, tuple(op(a, b) for a, b in zip(self.components, other.components)),
                              self.exact and other.exact, level)

    def __add__(self, other: "IwasawaElement") -> "IwasawaElement":
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other: "IwasawaElement") -> "IwasawaElement":
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self) -> "IwasawaElement":
        return IwasawaElement(self.p, tuple(-c for c in self.components), self.exact, self.level)

    def scale(self, c: int | Fraction) -> "IwasawaElement":
        return IwasawaElement(self.p, tuple(x.scale(c) for x in self.components), self.exact, self.level)

    def __mul__(self, other: "IwasawaElement | int | Fraction") -> "IwasawaElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if self.exact and other.exact:
            # exact polynomial product; reduce afterwards if both sides live at one level
            comps = []
            for a, b in zip(self.components, other.components):
                N = min(a.N, b.N)
                c = pa.mul(a.coeffs, b.coeffs, a.p**N)
                comps.append(TruncatedSeries(a.p, tuple(c), N, a.B + b.B))
            out = IwasawaElement(self.p, tuple(comps), True)
            if self.level is not None and self.level == other.level:
                out = out.reduce(*self.level)
            return out
        return self._zip(other, lambda a, b: a * b)

    def reduce(self, n_minus_1: int, m: int = 0, u: int | None = None) -> "IwasawaElement":
        """Canonical representative mod omega_tilde_{n-1,m} (components of degree < (m+1)p^(n-1))."""
        deg = (m + 1) * self.p**n_minus_1
        comps = []
        for c in self.components:
            if not self.exact and c.M < deg:
                raise PrecisionError("component truncated below the degree of omega_tilde", achieved=c.M)
            r = _reducer(n_minus_1, m, self.p, c.N, u).rem(c.coeffs)
            comps.append(TruncatedSeries.from_ints(self.p, r, deg, c.N, c.B))
        return IwasawaElement(self.p, tuple(comps), True, (n_minus_1, m))

    def max_abs_valuation(self) -> ExtValuation:
        """Least coefficient valuation over all components (+inf if zero within precision)."""
        best = INF
        for c in self.components:
            for v in c.valuations():
                best = min(best, v)
        return best

    def __repr__(self) -> str:
        lvl = f", level={self.level}" if self.level else ""
        return f"IwasawaElement(p={self.p}, M={self.M}, N={self.N}, B={self.B}{lvl})"


# twist --------------------------------------------------------------------

def _substitute_unit_shift(f: TruncatedSeries, c: int, exact: bool) -> TruncatedSeries:
    """f(c(1+X) - 1) for a principal unit c."""
    mod = f.mod
    sub = [(c - 1) % mod, c % mod]
    out = pa.compose(f.coeffs, sub, mod)
    if exact:
        out = pa.trim(out) or [0]
        return TruncatedSeries.from_ints(f.p, out, max(len(out), f.M), f.N, f.B)
    # the unknown tail X^M r feeds coefficient i through (c-1)^(M-i)
    vc = ord_p((c - 1) % mod, f.p, f.N)
    if vc is None:
        return TruncatedSeries.from_ints(f.p, out, f.M, f.N, f.B)
    A = f.abs_precision
    M_out = max(1, f.M - -(-A // vc))
    A_out = min(A, vc * (f.M - M_out + 1))
    return TruncatedSeries.from_ints(f.p, out, M_out, A_out + f.B, f.B)


def twist(g: IwasawaElement, m: int, u: int | None = None) -> IwasawaElement:
    """Tw^m: sigma -> chi(sigma)^m sigma.

    Component a of the result is component a + m of g with X replaced by u^m(1+X) - 1.
    """
    if m == 0:
        return g
    p = g.p
    N = g.N
    c = pow(_u(p, u), m, p ** (N + 1))
    comps = tuple(_substitute_unit_shift(g.component(a + m), c, g.exact) for a in range(p - 1))
    return IwasawaElement(p, comps, g.exact)


# Mellin transform on truncated series -------------------------------------------

def mellin(g: IwasawaElement, M: int, N: int | None = None, u: int | None = None) -> TruncatedSeries:
    """The action of g on 1 + pi, as a series mod pi^M.

    Horner evaluation in the operator T = gamma_1 - 1 applied to (1+pi)^zeta.  If g has an
    unknown tail X^L r then T^L maps into (p, pi^p)^L, which costs p-adic precision
    ``L - floor((M-1)/p)``; that loss is reflected in the output.
    """
    p = g.p
    N = g.N if N is None else min(N, g.N)
    uu = _u(p, u)
    B = g.B
    parts = g.gamma1_parts()
    L = max(x.M for x in parts)
    extra = 0
    i = M - 1
    while i:
        i //= p
        extra += i
    teich = teichmuller_table(p, N + extra + 1)
    total = TruncatedSeries.zero(p, M, N)
    for z in range(1, p):
        G = parts[z - 1]
        if not any(G.coeffs):
            continue
        v = TruncatedSeries.from_ints(p, pa.binomial_series(teich[z], M, p**N), M, N)
        acc = TruncatedSeries.zero(p, M, N)
        for coeff in reversed(G.coeffs):
            acc = (gamma_act(acc, uu) - acc) + v * coeff
        total = total + acc
    A = N - B
    if not g.exact:
        A = min(A, L - (M - 1) // p)
        if A < 1:
            raise PrecisionError(f"Mellin transform needs a longer X-series (L={L}) for M={M}", achieved=A)
    return TruncatedSeries(p, total.coeffs, A + B, B)


def mellin_at_eps(g: IwasawaElement, n: int, N: int | None = None, u: int | None = None) -> CyclotomicElement:
    """Exact value of the Mellin transform of g at pi = eps_n.

    (1 + eps_n)^c only depends on c mod p^n, so a polynomial g gives an exact answer.
    """
    p = g.p
    N = g.N if N is None else N
    uu = _u(p, u)
    P = p**n
    mod = p**N
    teich = teichmuller_table(p, n + 2)
    ypoly = [0] * P
    for z, G in enumerate(g.gamma1_parts(), start=1):
        b = pa.taylor_shift(G.coeffs, -1, mod)  # coefficients of gamma_1^r
        c = teich[z] % P
        for coeff in b:
            ypoly[c] = (ypoly[c] + coeff) % mod
            c = (c * uu) % P
    F = field(p, n, N)
    coords = F.reducer.rem(pa.taylor_shift(ypoly, 1, mod))
    trunc = INF
    if not g.exact and n >= 2:
        trunc = ExtValuation(Fraction(g.M, p ** (n - 2) * (p - 1)) - g.B)
    return CyclotomicElement(F, tuple(coords), g.B, trunc)


def evaluate_component_at_eps(g: IwasawaElement, n: int, a: int = 0, N: int | None = None) -> CyclotomicElement:
    """omega^a-component of g evaluated at X = eps_n."""
    return evaluate_at_eps(g.component(a), n, polynomial=g.exact, N=N)


# finite level ------------------------------------------------------------------

class MellinLevel:
    """The Mellin isomorphism Lambda/omega_tilde_{n-1,m} -> (A+)^{psi=0} / phi^n(pi^(m+1)) mod p^N."""

    def __init__(self, p: int, n: int, m: int = 0, N: int = 40, u: int | None = None):
        if n < 1 or m < 0:
            raise ValueError("need n >= 1 and m >= 0")
        self.p, self.n, self.m, self.N = p, n, m, N
        self.u = _u(p, u)
        self.P = p**n
        self.mod = p**N
        self.rank = (m + 1) * (p - 1) * p ** (n - 1)
        step = p ** (n - 1)
        Nw = N + n + 2 * (m + 1) + 4
        wmod = p**Nw
        teich = teichmuller_table(p, Nw)
        U = pow(self.u, step, wmod)
        # block c0 -> (a, j, [C(e_s, i)] matrix, inverse)
        self.blocks: dict[int, tuple[int, int, list[list[int]]]] = {}
        for a in range(1, p):
            x = teich[a]
            for j in range(step):
                c0 = x % self.P
                mat = [[0] * (m + 1) for _ in range(m + 1)]
                cs = x
                for s in range(m + 1):
                    e = (cs - c0) // self.P
                    for i in range(m + 1):
                        mat[i][s] = pa.binom_mod(e, i, self.mod)
                    cs = (cs * U) % wmod
                self.blocks[c0] = (a, j, mat)
                x = (x * self.u) % wmod
        self._inverses: dict[int, list[list[int]]] = {}
        self.wpoly_reducer = pa.MonicReducer(self._modulus_y(), self.mod)

    def _modulus_y(self) -> list[int]:
        base = [0] * (self.P + 1)
        base[0] = self.mod - 1
        base[self.P] = 1
        return pa.power(base, self.m + 1, self.mod)

    def _inverse(self, c0: int) -> list[list[int]]:
        inv = self._inverses.get(c0)
        if inv is None:
            inv = inverse_mod(self.blocks[c0][2], self.p, self.N)
            self._inverses[c0] = inv
        return inv

    # coordinates in R = O[y]/((y^P - 1)^(m+1)), basis y^c0 w^i ----------------
    def coords_from_y(self, ycoeffs: Sequence[int]) -> list[list[int]]:
        r = self.wpoly_reducer.rem([c % self.mod for c in ycoeffs])
        coords = [[0] * (self.m + 1) for _ in range(self.P)]
        for c, h in enumerate(r):
            if not h:
                continue
            c0, t = c % self.P, c // self.P
            row = coords[c0]
            for i in range(min(t, self.m) + 1):
                row[i] = (row[i] + h * pa.binom_mod(t, i, self.mod)) % self.mod
        return coords

    def y_from_coords(self, coords: Sequence[Sequence[int]]) -> list[int]:
        out = [0] * ((self.m + 1) * self.P)
        wpow = [1]
        wbase = [0] * (self.P + 1)
        wbase[0] = self.mod - 1
        wbase[self.P] = 1
        wpows = []
        for i in range(self.m + 1):
            wpows.append(wpow)
            wpow = pa.mul(wpow, wbase, self.mod)
        for c0, row in enumerate(coords):
            for i, h in enumerate(row):
                if h:
                    for d, w in enumerate(wpows[i]):
                        if w:
                            out[c0 + d] = (out[c0 + d] + h * w) % self.mod
        return out

    # the transform ---------------------------------------------------------
    def forward_coords(self, g: IwasawaElement) -> list[list[int]]:
        g = g.reduce(self.n - 1, self.m, self.u if self.u != 1 + self.p else None)
        step = self.p ** (self.n - 1)
        coords = [[0] * (self.m + 1) for _ in range(self.P)]
        by_a = {}
        for c0, (a, j, _) in self.blocks.items():
            by_a[(a, j)] = c0
        for a, G in enumerate(g.gamma1_parts(), start=1):
            b = pa.taylor_shift(G.coeffs, -1, self.mod)
            b += [0] * ((self.m + 1) * step - len(b))
            for j in range(step):
                c0 = by_a[(a, j)]
                vec = [b[j + step * s] for s in range(self.m + 1)]
                coords[c0] = matvec_mod(self.blocks[c0][2], vec, self.mod)
        return coords

    def forward(self, g: IwasawaElement) -> TruncatedSeries:
        """Representative in O[pi] (degree < (m+1)p^n) of the image of g."""
        y = self.y_from_coords(self.forward_coords(g))
        pis = pa.taylor_shift(y, 1, self.mod)
        return TruncatedSeries.from_ints(self.p, pis, len(pis), self.N, g.B)

    def inverse_coords(self, coords: Sequence[Sequence[int]], B: int = 0, abs_prec: int | None = None
                       ) -> IwasawaElement:
        p = self.p
        A = self.N - B if abs_prec is None else abs_prec
        if A < 1:
            raise PrecisionError("no p-adic precision left for the inverse Mellin transform", achieved=A)
        check = p ** (A + B) if A + B < self.N else self.mod
        for c0 in range(0, self.P, p):
            if any(h % check for h in coords[c0]):
                raise InconsistentSystem(f"input has a non-zero y^{c0} component: not in the psi = 0 subspace")
        step = p ** (self.n - 1)
        length = (self.m + 1) * step
        parts_b = [[0] * length for _ in range(p - 1)]
        for c0, (a, j, _) in self.blocks.items():
            sol = matvec_mod(self._inverse(c0), coords[c0], self.mod)
            for s, val in enumerate(sol):
                parts_b[a - 1][j + step * s] = val
        parts = [TruncatedSeries.from_ints(p, pa.taylor_shift(b, 1, self.mod), length, A + B, B) for b in parts_b]
        return IwasawaElement.from_gamma1_parts(p, parts, exact=True, level=(self.n - 1, self.m))

    def inverse_y(self, ycoeffs: Sequence[int], B: int = 0, abs_prec: int | None = None) -> IwasawaElement:
        return self.inverse_coords(self.coords_from_y(ycoeffs), B, abs_prec)

    def inverse(self, h: TruncatedSeries, polynomial: bool = False) -> IwasawaElement:
        """Preimage of h mod phi^n(pi^(m+1)).

        For a truncated h the tail pi^M r only matters through p-adically small terms:
        pi^((m+1)p^n) lies in (p) modulo phi^n(pi)^(m+1).
        """
        A = h.abs_precision
        if not polynomial:
            A = min(A, h.M // ((self.m + 1) * self.P))
        ys = pa.taylor_shift(h.coeffs, -1, h.mod)
        if h.N < self.N:
            raise PrecisionError("input carries fewer p-adic digits than the level", achieved=h.N)
        return self.inverse_y(ys, h.B, A)

    # cross-checks -------------------------------------------------------
    def basis_columns(self) -> list[tuple[int, int, int]]:
        step = self.p ** (self.n - 1)
        return [(a, j, s) for a in range(1, self.p) for j in range(step) for s in range(self.m + 1)]

    def basis_matrix(self) -> list[list[int]]:
        """Coordinates (rows y^c0 w^i, all c0 mod p^n) of the images of delta_zeta gamma_1^j gamma_n^s."""
        rows = self.P * (self.m + 1)
        index = {(a, j): c0 for c0, (a, j, _) in self.blocks.items()}
        cols = []
        for a, j, s in self.basis_columns():
            c0 = index[(a, j)]
            col = [0] * rows
            mat = self.blocks[c0][2]
            for i in range(self.m + 1):
                col[c0 * (self.m + 1) + i] = mat[i][s]
            cols.append(col)
        return [list(r) for r in zip(*cols)]

    def direct_basis_matrix(self) -> list[list[int]]:
        """Same matrix, built by raising y to the integer power zeta*u^r modulo (y^P - 1)^(m+1).

        This path does not use the block decomposition and serves as its cross-check.
        """
        p, mod = self.p, self.mod
        Nw = self.N + self.n + 2 * (self.m + 1) + 4
        teich = teichmuller_table(p, Nw)
        wmod = p**Nw
        step = p ** (self.n - 1)
        rows = self.P * (self.m + 1)
        red = self.wpoly_reducer
        cols = []
        for a, j, s in self.basis_columns():
            c = teich[a] * pow(self.u, j + step * s, wmod) % wmod
            result, base = [1], [0, 1]
            while c:
                if c & 1:
                    result = red.rem(pa.mul(result, base, mod))
                c >>= 1
                if c:
                    base = red.rem(pa.mul(base, base, mod))
            coords = self.coords_from_y(result)
            cols.append([coords[r // (self.m + 1)][r % (self.m + 1)] for r in range(rows)])
        return [list(r) for r in zip(*cols)]


@lru_cache(maxsize=64)
def mellin_level(p: int, n: int, m: int = 0, N: int = 40, u: int | None = None) -> MellinLevel:
    return MellinLevel(p, n, m, N, u)


def mellin_inverse(h: TruncatedSeries, n: int, m: int = 0, polynomial: bool = False,
                   u: int | None = None) -> IwasawaElement:
    """The element g mod omega_tilde_{n-1,m} with Mellin(g) = h mod phi^n(pi^(m+1))."""
    return mellin_level(h.p, n, m, h.N, u).inverse(h, polynomial=polynomial)

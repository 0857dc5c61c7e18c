"""The matrices A, P, P^-1, the products H_n and their Mellin preimages, and the
logarithmic matrix with its congruence.

P^-1 has polynomial entries, so H_n = phi^(n-1)(P^-1) ... phi(P^-1) is an exact
polynomial matrix.  For the Mellin side the products are formed directly in the
variable y = 1 + pi, where phi is simply y -> y^p.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import polyarith as pa
from .cyclo import CyclotomicElement, ValuationReport, evaluate_at_eps
from .errors import HypothesisViolation, InvalidChangeOfBasis, PrecisionError
from .iwasawa import IwasawaElement, MellinLevel, mellin_level
from .series import (TruncatedSeries, delta_inverse_poly, ord_p, phi_pi_poly, q_poly)
from .valuation import ExtValuation, INF, ValMatrix

DEFAULT_N = 40


@dataclass(frozen=True)
class FormParams:
    p: int
    k: int
    a_p: int
    j: int = 1
    eps_p: int = 1
    N: int = DEFAULT_N

    def __post_init__(self) -> None:
        p, k = self.p, self.k
        if p < 3 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise HypothesisViolation(f"p = {p} must be an odd prime")
        if not 3 <= k <= p:
            raise HypothesisViolation(f"need 3 <= k <= p, got k = {k}")
        if not 1 <= self.j <= k - 1:
            raise HypothesisViolation(f"need 1 <= j <= k - 1, got j = {self.j}")
        if self.eps_p % p == 0:
            raise HypothesisViolation("eps(p) must be a p-adic unit")
        v = self.v
        if v.is_inf or v <= 0:
            raise HypothesisViolation("need 0 < ord_p(a_p) < inf")
        if 2 * v.value <= Fraction(k - 1, p):
            raise HypothesisViolation(f"need 2v > (k-1)/p; got v = {v}, (k-1)/p = {Fraction(k - 1, p)}")

    @property
    def v(self) -> ExtValuation:
        w = ord_p(self.a_p, self.p)
        return INF if w is None else ExtValuation(w)

    @property
    def mod(self) -> int:
        return self.p**self.N


# exact polynomial helpers ----------------------------------------------------

def _poly(p: int, coeffs: Sequence[int], N: int, B: int = 0) -> TruncatedSeries:
    cs = pa.trim([c % p**N for c in coeffs]) or [0]
    return TruncatedSeries(p, tuple(cs), N, B)


def _pmul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    N = min(a.N, b.N)
    return _poly(a.p, pa.mul(a.coeffs, b.coeffs, a.p**N), N, a.B + b.B)


def _padd(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    L = max(a.M, b.M)
    a2 = TruncatedSeries.from_ints(a.p, a.coeffs, L, a.N, a.B)
    b2 = TruncatedSeries.from_ints(b.p, b.coeffs, L, b.N, b.B)
    s = a2 + b2
    return _poly(s.p, s.coeffs, s.N, s.B)


@dataclass(frozen=True)
class SeriesMatrix:
    """2x2 matrix of series; ``exact`` marks polynomial entries with no truncation tail."""

    entries: tuple[tuple[TruncatedSeries, TruncatedSeries], tuple[TruncatedSeries, TruncatedSeries]]
    exact: bool = False

    @property
    def p(self) -> int:
        return self.entries[0][0].p

    @classmethod
    def identity(cls, p: int, N: int = DEFAULT_N) -> "SeriesMatrix":
        one, zero = _poly(p, [1], N), _poly(p, [0], N)
        return cls(((one, zero), (zero, one)), True)

    def __getitem__(self, ij: tuple[int, int]) -> TruncatedSeries:
        return self.entries[ij[0]][ij[1]]

    def __matmul__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        exact = self.exact and other.exact
        rows = []
        for i in range(2):
            row = []
            for j in range(2):
                if exact:
                    row.append(_padd(_pmul(self[i, 0], other[0, j]), _pmul(self[i, 1], other[1, j])))
                else:
                    row.append(self[i, 0] * other[0, j] + self[i, 1] * other[1, j])
            rows.append(tuple(row))
        return SeriesMatrix(tuple(rows), exact)

    def scale_rows(self, A: Sequence[Sequence[Fraction]]) -> "SeriesMatrix":
        """Left multiplication by a constant rational matrix."""
        rows = []
        for i in range(2):
            row = []
            for j in range(2):
                terms = [self[k, j].scale(A[i][k]) for k in range(2)]
                row.append(_padd(terms[0], terms[1]) if self.exact else terms[0] + terms[1])
            rows.append(tuple(row))
        return SeriesMatrix(tuple(rows), self.exact)

    def phi(self, times: int = 1) -> "SeriesMatrix":
        def f(s: TruncatedSeries) -> TruncatedSeries:
            mod = s.mod
            out = list(s.coeffs)
            g = phi_pi_poly(s.p, mod)
            for _ in range(times):
                out = pa.compose(out, g, mod, None if self.exact else s.M)
            if self.exact:
                return _poly(s.p, out, s.N, s.B)
            return TruncatedSeries.from_ints(s.p, out, s.M, s.N, s.B)
        return SeriesMatrix(tuple(tuple(f(e) for e in row) for row in self.entries), self.exact)

    def truncated(self, M: int) -> "SeriesMatrix":
        return SeriesMatrix(tuple(tuple(TruncatedSeries.from_ints(e.p, e.coeffs, M, e.N, e.B) for e in row)
                                  for row in self.entries), False)

    def congruent_to_identity(self, order: int) -> bool:
        """Entries agree with the identity matrix modulo pi^order (exactly, at the stored precision)."""
        for i in range(2):
            for j in range(2):
                e = self[i, j]
                target = 1 if i == j else 0
                for d in range(order):
                    c = e.coefficient(d) if d < e.M else Fraction(0)
                    want = target if d == 0 else 0
                    diff = c - want
                    if diff != 0 and (diff.numerator == 0 or _frac_val(diff, e.p) < e.abs_precision):
                        return False
        return True


def _frac_val(x: Fraction, p: int) -> int:
    return (ord_p(x.numerator, p) or 0) - (ord_p(x.denominator, p) or 0)


# the matrices ------------------------------------------------------------------

def build_A(params: FormParams) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    pk = Fraction(params.p ** (params.k - 1))
    return ((Fraction(0), Fraction(-params.eps_p) / pk), (Fraction(1), Fraction(params.a_p) / pk))


def rat_matmul(a, b):
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(2)), Fraction(0)) for j in range(2)) for i in range(2))


def rat_matpow(a, n: int):
    out = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    for _ in range(n):
        out = rat_matmul(out, a)
    return out


def build_P(params: FormParams, M: int, N: int | None = None) -> SeriesMatrix:
    """P = [[0, -eps/q^(k-1)], [delta^(k-1), a_p/q^(k-1)]] as truncated series (denominators p^(k-1))."""
    p, k = params.p, params.k
    N = params.N if N is None else N
    q = TruncatedSeries.from_ints(p, q_poly(p, p ** (N + 64)), M, N + 64)
    qinv = (q ** (k - 1)).inverse()
    dinv = TruncatedSeries.from_ints(p, delta_inverse_poly(p), M, N)
    d = dinv.inverse() ** (k - 1)
    zero = TruncatedSeries.zero(p, M, N)
    e01 = qinv.scale(-params.eps_p)
    e11 = qinv.scale(params.a_p)
    fix = lambda s: TruncatedSeries(p, tuple(c % p ** (N + s.B) for c in s.coeffs), min(s.N, N + s.B), s.B)
    return SeriesMatrix(((zero, fix(e01)), (d, fix(e11))), False)


@lru_cache(maxsize=None)
def _pinv_polys(p: int, k: int, a_p: int, eps_p: int, N: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    mod = p**N
    einv = pow(eps_p, -1, mod)
    dk = pa.power(delta_inverse_poly(p), k - 1, mod)
    qk = pa.power(q_poly(p, mod), k - 1, mod)
    e00 = pa.scale(dk, a_p * einv, mod)
    e10 = pa.scale(qk, -einv, mod)
    return ((tuple(e00), tuple(dk)), (tuple(e10), (0,)))


def build_P_inverse(params: FormParams, M: int | None = None, N: int | None = None) -> SeriesMatrix:
    """P^-1 = [[a_p/(delta^(k-1) eps), 1/delta^(k-1)], [-q^(k-1)/eps, 0]]; integral polynomials.

    With ``M`` given the entries are returned as truncated series instead.
    """
    N = params.N if N is None else N
    polys = _pinv_polys(params.p, params.k, params.a_p, params.eps_p, N)
    m = SeriesMatrix(tuple(tuple(_poly(params.p, e, N) for e in row) for row in polys), True)
    return m if M is None else m.truncated(M)


def compute_Hn(params: FormParams, n: int, N: int | None = None) -> SeriesMatrix:
    """H_n = phi^(n-1)(P^-1) ... phi(P^-1), with H_1 = I, via H_(n+1) = phi(H_n P^-1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    N = params.N if N is None else N
    H = SeriesMatrix.identity(params.p, N)
    Pinv = build_P_inverse(params, N=N)
    for _ in range(n - 1):
        H = (H @ Pinv).phi()
    return H


def compute_Kn(params: FormParams, n: int, N: int | None = None) -> SeriesMatrix:
    """phi^(n-2)(P^-1) ... P^-1 (identity for n = 1), so that H_n = phi(K_n)."""
    N = params.N if N is None else N
    K = SeriesMatrix.identity(params.p, N)
    Pinv = build_P_inverse(params, N=N)
    for _ in range(n - 1):
        K = K.phi() @ Pinv
    return K


# Mellin side -------------------------------------------------------------------

def _y_poly(coeffs: Sequence[int], mod: int) -> list[int]:
    return pa.taylor_shift(coeffs, -1, mod)


def hn_y_matrix(params: FormParams, n: int, level: MellinLevel) -> list[list[list[int]]]:
    """(1+pi) H_n in the y-basis, reduced modulo (y^(p^L) - 1)^(m+1) of the given level."""
    p = params.p
    mod = level.mod
    red = level.wpoly_reducer
    polys = _pinv_polys(p, params.k, params.a_p, params.eps_p, level.N)
    base = [[_y_poly(e, mod) for e in row] for row in polys]

    def frob(f: list[int], i: int) -> list[int]:
        s = p**i
        out = [0] * ((len(f) - 1) * s + 1)
        out[::s] = f
        return red.rem(out)

    H = [[[1], [0]], [[0], [1]]]
    for i in range(n - 1, 0, -1):
        F = [[frob(e, i) for e in row] for row in base]
        H = [[red.rem(pa.add(pa.mul(H[r][0], F[0][c], mod), pa.mul(H[r][1], F[1][c], mod), mod))
              for c in range(2)] for r in range(2)]
    return [[red.rem([0] + e) if e else [0] for e in row] for row in H]


def script_H(params: FormParams, n: int, level: int | None = None, m: int = 0,
             N: int | None = None) -> list[list[IwasawaElement]]:
    """Mellin preimage of (1+pi) H_n, reduced mod omega_tilde_{level-1, m} (default level n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    N = params.N if N is None else N
    level = n if level is None else level
    L = mellin_level(params.p, level, m, N)
    Y = hn_y_matrix(params, n, L)
    return [[L.inverse_y(e) for e in row] for row in Y]


def script_H_via_pi(params: FormParams, n: int, level: int | None = None, m: int = 0,
                    N: int | None = None) -> list[list[IwasawaElement]]:
    """Same as :func:`script_H` but through the pi-basis polynomials of :func:`compute_Hn`."""
    N = params.N if N is None else N
    level = n if level is None else level
    L = mellin_level(params.p, level, m, N)
    H = compute_Hn(params, n, N)
    out = []
    for row in H.entries:
        r = []
        for e in row:
            h = _poly(params.p, pa.mul([1, 1], e.coeffs, e.mod), e.N, e.B)
            r.append(L.inverse(h, polynomial=True))
        out.append(r)
    return out


def _lam_matmul_const(A, G: list[list[IwasawaElement]]) -> list[list[IwasawaElement]]:
    out = []
    for i in range(2):
        row = []
        for j in range(2):
            row.append(G[0][j].scale(A[i][0]) + G[1][j].scale(A[i][1]))
        out.append(row)
    return out


def logarithmic_matrix(m: SeriesMatrix, params: FormParams, level: int, require_congruence: bool = True
                       ) -> list[list[IwasawaElement]]:
    """M_log = Mellin^-1((1+pi) A phi(M)) modulo omega_tilde_{level-1, k-2}.

    M must be congruent to the identity modulo pi^(k-1) unless ``require_congruence`` is False.
    A truncated M costs p-adic precision: pi^D lies in (p) modulo phi^(level-1)(pi)^(k-1).
    """
    p, k = params.p, params.k
    if require_congruence and not m.congruent_to_identity(k - 1):
        raise InvalidChangeOfBasis("M is not congruent to the identity modulo pi^(k-1)")
    L = mellin_level(p, level, k - 2, params.N)
    phM = m.phi()
    G = []
    for row in phM.entries:
        r = []
        for e in row:
            N = e.N
            h = pa.mul([1, 1], e.coeffs, p**N)
            ys = pa.taylor_shift(h, -1, p**N)
            A = e.abs_precision
            if not m.exact:
                src_M = e.M
                A = min(A, src_M // ((k - 1) * p ** (level - 1)))
            if N < L.N:
                ys = [c % p**N for c in ys]
            r.append(L.inverse_y(ys, e.B, A))
        G.append(r)
    return _lam_matmul_const(build_A(params), G)


@dataclass(frozen=True)
class CongruenceReport:
    n: int
    working_level: int
    target_precision: int
    achieved_precision: int
    remainder_valuation: ExtValuation
    passed: bool


def check_Mlog_congruence(m: SeriesMatrix, params: FormParams, n: int, working_level: int | None = None,
                          require_congruence: bool = True) -> CongruenceReport:
    """Reduce M_log - A^n H_n (both formed at the working level) modulo omega_tilde_{n-1,k-2}."""
    k = params.k
    W = n + 1 if working_level is None else working_level
    lhs = logarithmic_matrix(m, params, W, require_congruence)
    An = rat_matpow(build_A(params), n)
    rhs = _lam_matmul_const(An, script_H(params, n, level=W, m=k - 2))
    worst = INF
    achieved = None
    for i in range(2):
        for j in range(2):
            d = (lhs[i][j] - rhs[i][j]).reduce(n - 1, k - 2)
            achieved = d.N - d.B if achieved is None else min(achieved, d.N - d.B)
            worst = min(worst, d.max_abs_valuation())
    target = params.N - (k - 1) * n
    if achieved < target:
        raise PrecisionError("congruence check ran below the target precision", achieved=achieved)
    passed = worst.is_inf or worst >= target
    return CongruenceReport(n, W, target, achieved, worst, passed)


def random_seed_matrix(params: FormParams, rng: random.Random, extra_degree: int = 3) -> SeriesMatrix:
    """I + pi^(k-1) R with R a random integral polynomial matrix."""
    p, k, N = params.p, params.k, params.N
    mod = p**N
    rows = []
    for i in range(2):
        row = []
        for j in range(2):
            cs = [1 if (i == j and d == 0) else 0 for d in range(k - 1)]
            cs += [rng.randrange(mod) for _ in range(extra_degree + 1)]
            row.append(_poly(p, cs, N))
        rows.append(tuple(row))
    return SeriesMatrix(tuple(rows), True)


def structured_M(params: FormParams, n: int, seed: SeriesMatrix) -> SeriesMatrix:
    """A^(n-1) phi^(n-1)(R) phi^(n-2)(P^-1) ... P^-1 for a seed R = I mod pi^(k-1).

    Such an M satisfies A phi(M) = A^n phi^n(R) H_n, the identity behind the congruence.
    """
    K = compute_Kn(params, n)
    R = seed.phi(n - 1) if n > 1 else seed
    return (R @ K).scale_rows(rat_matpow(build_A(params), n - 1))


# valuation matrices -------------------------------------------------------------

def _factor(params: FormParams, j: int) -> ValMatrix:
    """ord_p of P^-1 evaluated at eps_j (j >= 1): [[v, 0], [(k-1) ord q(eps_j), inf]]."""
    v = params.v
    low = INF if j == 1 else ExtValuation(Fraction(params.k - 1, params.p ** (j - 1)))
    return ValMatrix.of([[v, 0], [low, None]])


def tropical_Hn(params: FormParams, n: int, indexing: str = "shifted") -> ValMatrix:
    """Min-plus product of the factor valuations; shifted = H_(n+1)(eps_(n+1)), literal = H_n(eps_n)."""
    count = n if indexing == "shifted" else n - 1
    out = ValMatrix.identity()
    for j in range(1, count + 1):
        out = out @ _factor(params, j)
    return out


def closed_form_row(p: int, k: int, v: Fraction, n: int, convention: str = "stated") -> tuple[Fraction, Fraction]:
    """First-row valuations of H at level n from the odd/even closed formulas.

    ``stated`` evaluates the closed formulas term for term; ``recursion`` is the form produced by the
    min-plus recursion, which differs from ``stated`` in the odd case (the two exponent
    families swap).
    """
    c = Fraction(k - 1)
    v = Fraction(v)
    if n % 2:
        h = (n - 1) // 2
        odd_pows = sum((c / p ** (2 * i - 1) for i in range(1, h + 1)), Fraction(0))
        even_pows = sum((c / p ** (2 * i) for i in range(1, h + 1)), Fraction(0))
        if convention == "stated":
            return v + odd_pows, even_pows
        if convention == "recursion":
            return v + even_pows, odd_pows
        raise ValueError(f"unknown convention {convention!r}")
    if convention not in ("stated", "recursion"):
        raise ValueError(f"unknown convention {convention!r}")
    h = n // 2
    e1 = sum((c / p ** (2 * i - 1) for i in range(1, h + 1)), Fraction(0))
    e2 = v + sum((c / p ** (2 * i) for i in range(1, h)), Fraction(0))
    return e1, e2


def closed_form_Hn(params: FormParams, n: int, convention: str = "stated") -> ValMatrix:
    """First row from :func:`closed_form_row`, second row +inf."""
    row = closed_form_row(params.p, params.k, params.v.value, n, convention)
    return ValMatrix.of([list(row), [None, None]])


@dataclass(frozen=True)
class ExactHn:
    matrix: ValMatrix
    reports: tuple[tuple[ValuationReport, ValuationReport], tuple[ValuationReport, ValuationReport]]

    @property
    def min_guard(self) -> ExtValuation:
        g = [r.guard for row in self.reports for r in row if r.exact]
        return min(g) if g else INF


def exact_Hn(params: FormParams, n: int, indexing: str = "shifted") -> ExactHn:
    """Exact cyclotomic valuations: H_(n+1)(eps_(n+1)) (shifted) or H_n(eps_n) (literal)."""
    idx, lvl = (n + 1, n + 1) if indexing == "shifted" else (n, n)
    H = compute_Hn(params, idx)
    reports = []
    for row in H.entries:
        reports.append(tuple(evaluate_at_eps(e, lvl, polynomial=True).valuation_report() for e in row))
    vm = ValMatrix(tuple(tuple(r.value for r in row) for row in reports),
                   tuple(tuple(True for _ in row) for row in reports))
    return ExactHn(vm, tuple(reports))


def valuation_matrix_Hn(params: FormParams, n: int, method: str = "exact", indexing: str = "shifted",
                        convention: str = "stated") -> ValMatrix:
    if method == "tropical":
        return tropical_Hn(params, n, indexing)
    if method == "exact":
        return exact_Hn(params, n, indexing).matrix
    if method == "closed_form":
        return closed_form_Hn(params, n, convention)
    raise ValueError(f"unknown method {method!r}")


def script_H_at_eps(params: FormParams, n: int) -> list[list[CyclotomicElement]]:
    """(H_(n+1))-preimage entries evaluated at X = eps_n, computed mod omega_n."""
    H = script_H(params, n + 1, level=n + 1, m=0)
    return [[evaluate_at_eps(e.component(0), n, polynomial=True) for e in row] for row in H]

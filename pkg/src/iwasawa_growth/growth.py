"""Kobayashi ranks, the modesty choice tau(n, eta), q_n^* and the growth bounds.

Everything here is exact rational arithmetic on Iwasawa invariants, plus one
brute-force oracle: :func:`kobayashi_rank_oracle` builds the modules
``O[X]/(F, omega_n)`` as explicit Z/p^N presentations and reads lengths off
their Smith normal forms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from . import polyarith as pa
from .cyclo import evaluate_poly_at_eps, min_poly_eps
from .errors import HypothesisViolation, IndeterminateInvariants, PrecisionError
from .iwasawa import IwasawaElement, mellin_at_eps, twist
from .logmatrix import closed_form_row
from .series import TruncatedSeries, iwasawa_invariants
from .snf import smith_valuations
from .valuation import ExtValuation, INF

log = logging.getLogger(__name__)


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p**0.5) + 1))


def level_degree(p: int, n: int) -> int:
    """p^n - p^(n-1), the degree of Q_p(mu_{p^n}) over Q_p (1 at n = 0)."""
    return 1 if n == 0 else p ** (n - 1) * (p - 1)


# parameters ---------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthParams:
    p: int
    k: int
    v: Fraction
    j: int = 1
    e: int = 1
    d: int = 1
    r: int = 1
    n_range: tuple[int, int] = (1, 4)

    def __post_init__(self) -> None:
        object.__setattr__(self, "v", Fraction(self.v))
        p, k = self.p, self.k
        if p < 3 or not _is_prime(p):
            raise HypothesisViolation(f"p = {p} must be an odd prime")
        if not 3 <= k <= p:
            raise HypothesisViolation(f"need 3 <= k <= p, got k = {k}")
        if not 1 <= self.j <= k - 1:
            raise HypothesisViolation(f"need 1 <= j <= k - 1, got j = {self.j}")
        if min(self.e, self.d, self.r) < 1:
            raise HypothesisViolation("e, d and r must be positive")
        if self.d != self.e * self.r:
            raise HypothesisViolation(f"need d = e*r, got d={self.d}, e={self.e}, r={self.r}")
        if self.v <= 0:
            raise HypothesisViolation("need v = ord_p(a_p) > 0")
        if 2 * self.v <= Fraction(k - 1, p):
            raise HypothesisViolation(f"need 2v > (k-1)/p; got v = {self.v}, (k-1)/p = {Fraction(k - 1, p)}")
        lo, hi = self.n_range
        if not 1 <= lo <= hi:
            raise HypothesisViolation(f"bad level range {self.n_range}")

    @property
    def levels(self) -> range:
        return range(self.n_range[0], self.n_range[1] + 1)


@dataclass(frozen=True)
class CharacterInvariants:
    eta_index: int
    mu1: int
    mu2: int
    lambda1: int
    lambda2: int
    kappa1: int = 0
    kappa2: int = 0
    r_inf: int = 0
    mu0: int | None = None
    lambda0: int | None = None
    tamagawa: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("mu1", "mu2", "lambda1", "lambda2", "kappa1", "kappa2", "r_inf"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if (self.mu0 is None) != (self.lambda0 is None):
            raise ValueError("mu0 and lambda0 must be given together")

    def check_kappa(self, k: int) -> None:
        for kap in (self.kappa1, self.kappa2):
            if kap > k - 1:
                raise HypothesisViolation(f"kappa = {kap} exceeds k - 1 = {k - 1}")

    def mu(self, i: int) -> int:
        return (self.mu1, self.mu2)[i - 1]

    def lam(self, i: int) -> int:
        return (self.lambda1, self.lambda2)[i - 1]

    def kappa(self, i: int) -> int:
        return (self.kappa1, self.kappa2)[i - 1]

    @classmethod
    def from_series(cls, eta_index: int, F1: TruncatedSeries, F2: TruncatedSeries,
                    declared: dict | None = None, **kw) -> "CharacterInvariants":
        """Read (mu_i, lambda_i) off F_1, F_2; any declared values must match."""
        i1, i2 = iwasawa_invariants(F1), iwasawa_invariants(F2)
        derived = {"mu1": i1.mu, "lambda1": i1.lam, "mu2": i2.mu, "lambda2": i2.lam}
        for key, val in (declared or {}).items():
            if key in derived and val is not None and val != derived[key]:
                raise ValueError(f"{key}: declared {val} but the series gives {derived[key]}")
        return cls(eta_index, **derived, **kw)


# Kobayashi ranks --------------------------------------------------------------

@dataclass(frozen=True)
class KobayashiRankResult:
    value: Fraction | int | None
    method: str
    defined: bool
    details: dict = field(default_factory=dict, compare=False)


def kobayashi_rank_closed(n: int, mu: int, lam: int, p: int, e: int = 1, variant: str = "c") -> KobayashiRankResult:
    if n < 1:
        raise ValueError("level must be >= 1")
    dn = level_degree(p, n)
    if variant == "b":
        return KobayashiRankResult(e * lam + dn * mu, "closed_form_b", True)
    if variant == "c":
        return KobayashiRankResult(lam + dn * mu, "closed_form_c", True)
    raise ValueError(f"unknown variant {variant!r}")


def stabilization_threshold(lam: int, p: int, e: int = 1) -> int:
    """Least n >= 1 with e*lambda < p^(n-1)(p-1).

    From there on ord_p F(eps_n) = mu/e + lambda/(e p^(n-1)(p-1)) exactly, which is
    what the closed forms of the Kobayashi rank rely on.
    """
    n = 1
    while e * lam >= level_degree(p, n):
        n += 1
    return n


def _cyclotomic_factor(p: int, j: int) -> list[int]:
    """X for j = 0, otherwise Phi_{p^j}(1 + X), as exact integer coefficients."""
    return [0, 1] if j == 0 else list(min_poly_eps(p, j))


def _omega_exact(p: int, n: int) -> list[int]:
    P = p**n
    return [0] + [comb(P, i) for i in range(1, P + 1)]


def _exact_divides(g: Sequence[int], f: Sequence[int]) -> bool:
    """Whether the monic integer polynomial g divides f in Z[X]."""
    f = list(f)
    dg = len(g) - 1
    while len(f) > dg and any(f):
        while f and f[-1] == 0:
            f.pop()
        if len(f) <= dg:
            break
        c = f[-1]
        shift = len(f) - 1 - dg
        for i, gi in enumerate(g):
            f[shift + i] -= c * gi
        f.pop()
    return not any(f)


def free_rank(F: Sequence[int], p: int, n: int) -> int:
    """Z_p-rank of O[X]/(F, omega_n): the degree of gcd(F, omega_n)."""
    F = pa.trim(list(F))
    if not F:
        return p**n
    return sum(level_degree(p, j) for j in range(n + 1) if _exact_divides(_cyclotomic_factor(p, j), F))


def _multiplication_columns(F: Sequence[int], p: int, n: int, mod: int) -> list[list[int]]:
    """Columns F * X^i mod omega_n for i < p^n, in the monomial basis."""
    P = p**n
    w = [c % mod for c in _omega_exact(p, n)]  # monic of degree P
    col = pa.MonicReducer(w, mod).rem([c % mod for c in F]) if len(F) > P else [c % mod for c in F]
    col = col + [0] * (P - len(col))
    cols = []
    for _ in range(P):
        cols.append(col)
        top = col[-1]
        col = [0] + col[:-1]
        if top:
            col = [(c - top * wc) % mod for c, wc in zip(col, w)]
    return cols


def _lattice_data(cols: list[list[int]], p: int, N: int) -> tuple[int, int]:
    """(sum of finite divisor valuations, number of divisors vanishing mod p^N)."""
    rows = [list(r) for r in zip(*cols)]
    vals = smith_valuations(rows, p, N)
    return sum(v for v in vals if v is not None), sum(1 for v in vals if v is None) + max(0, len(rows) - len(vals))


def kobayashi_rank_oracle(F: TruncatedSeries | Sequence[int], n: int, p: int | None = None, N: int = 12,
                          max_N: int = 48) -> KobayashiRankResult:
    """len(ker pi_n) - len(coker pi_n) + rank N_(n-1) for N_m = O[X]/(F, omega_m).

    F is treated as an exact polynomial.  The kernel (F, omega_(n-1))/(F, omega_n) is
    measured at level n as an index of lattices, the cokernel of the projection is
    trivial, and the ranks come from exact divisibility by the factors of omega_n;
    the SNF zero-divisor counts must agree with them, otherwise N is raised.
    """
    if isinstance(F, TruncatedSeries):
        p = F.p
        if F.B:
            raise ValueError("F must be integral")
        coeffs = list(F.coeffs)
    else:
        if p is None:
            raise ValueError("p is required for a coefficient list")
        coeffs = [int(c) for c in F]
    if n < 1:
        raise ValueError("level must be >= 1")
    coeffs = pa.trim(coeffs)
    if not coeffs:
        raise IndeterminateInvariants("F is zero")
    rho_n, rho_prev = free_rank(coeffs, p, n), free_rank(coeffs, p, n - 1)
    if rho_n != rho_prev:
        return KobayashiRankResult(None, "oracle", False, {"rank_n": rho_n, "rank_prev": rho_prev})
    prec = N
    while True:
        mod = p**prec
        cols_n = _multiplication_columns(coeffs, p, n, mod)
        w_prev = _omega_exact(p, n - 1)
        cols_w = _multiplication_columns(w_prev, p, n, mod)
        len_n, zero_n = _lattice_data(cols_n, p, prec)
        len_sum, zero_sum = _lattice_data(cols_n + cols_w, p, prec)
        len_prev, zero_prev = _lattice_data(_multiplication_columns(coeffs, p, n - 1, mod), p, prec)
        if zero_n == rho_n and zero_sum == rho_prev and zero_prev == rho_prev:
            break
        if prec >= max_N:
            raise PrecisionError(f"elementary divisors not resolved at N = {prec}", achieved=prec)
        prec = min(2 * prec, max_N)
    ker = len_n - len_sum
    if ker != len_n - len_prev:
        raise PrecisionError("kernel length disagrees with the torsion difference", achieved=prec)
    value = ker - 0 + rho_prev
    return KobayashiRankResult(value, "oracle", True, {"ker": ker, "coker": 0, "rank_prev": rho_prev,
                                                        "len_n": len_n, "len_prev": len_prev, "N": prec})


def finite_tower_lengths(F: Sequence[int], p: int, n_max: int, N: int = 12) -> list[int]:
    """s_n = log_p #(O[X]/(F, omega_n)) for n = 0..n_max; requires a finite tower."""
    out = []
    for n in range(n_max + 1):
        if free_rank(F, p, n):
            raise ValueError(f"O[X]/(F, omega_{n}) is infinite")
        cols = _multiplication_columns(F, p, n, p**N)
        length, zeros = _lattice_data(cols, p, N)
        if zeros:
            raise PrecisionError(f"divisor vanishes mod p^{N}", achieved=N)
        out.append(length)
    return out


# modesty -----------------------------------------------------------------------

def modesty_tau(n: int, inv: CharacterInvariants, params: GrowthParams, use_selmer_mu: bool = False) -> int:
    """tau(n, eta) in {1, 2}; the comparisons are exact and keep their strictness.

    With ``use_selmer_mu`` the mu-invariants of the dual Selmer groups (mu_i + mu_0)
    are compared instead; only the difference mu_1 - mu_2 enters, so tau is the same.
    """
    e = params.e
    mu1, mu2 = Fraction(inv.mu1, e), Fraction(inv.mu2, e)
    if use_selmer_mu:
        shift = Fraction(inv.mu0 or 0, e)
        mu1, mu2 = mu1 + shift, mu2 + shift
    shift = params.v + Fraction(params.k - 1, params.p + 1)
    if n % 2:
        return 1 if mu1 + shift <= mu2 else 2
    return 1 if mu1 < mu2 + shift else 2


def q_star(n: int, tau: int, params: GrowthParams, convention: str = "stated") -> ExtValuation:
    """p^(n-1)(p-1) times the (1, tau) entry of the closed-form H-valuations."""
    if tau not in (1, 2):
        raise ValueError("tau must be 1 or 2")
    row = closed_form_row(params.p, params.k, params.v, n, convention)
    return ExtValuation(level_degree(params.p, n) * row[tau - 1])


# Shafarevich-Tate and Tamagawa growth -------------------------------------------------

@dataclass(frozen=True)
class BoundBreakdown:
    n: int
    eta_index: int
    tau: int
    q_star: Fraction
    nabla: Fraction
    kappa: int
    r_inf: int
    d: int
    e: int
    r: int
    value: Fraction

    def recompute(self) -> Fraction:
        return self.d * (self.q_star + self.nabla + self.kappa - Fraction(self.r_inf, self.e))

    def scaled_form(self, nabla_b: int) -> Fraction:
        """r(e q* + nabla_b + e kappa - r_inf), with nabla_b = e lambda + (p^n - p^(n-1)) mu."""
        return self.r * (self.e * self.q_star + nabla_b + self.e * self.kappa - self.r_inf)


def sha_growth_bound(n: int, inv: CharacterInvariants, params: GrowthParams, convention: str = "stated"
                     ) -> BoundBreakdown:
    """Upper bound for s_(n+1) - s_n in the normalized form d(q* + lambda + d_n mu/e + kappa - r_inf/e)."""
    inv.check_kappa(params.k)
    tau = modesty_tau(n, inv, params)
    q = q_star(n, tau, params, convention).value
    nabla = inv.lam(tau) + Fraction(level_degree(params.p, n) * inv.mu(tau), params.e)
    kappa = inv.kappa(tau)
    value = params.d * (q + nabla + kappa - Fraction(inv.r_inf, params.e))
    return BoundBreakdown(n, inv.eta_index, tau, q, nabla, kappa, inv.r_inf, params.d, params.e, params.r, value)


def tamagawa_correction(n: int, params: GrowthParams) -> int:
    return level_degree(params.p, n) * n * (params.k - params.j - 1)


def tamagawa_defect(n: int, b_n: int, b_next: int, params: GrowthParams) -> int:
    """b_(n+1) - b_n - p^(n-1)(p-1) n (k-j-1); a negative value means inconsistent inputs."""
    defect = b_next - b_n - tamagawa_correction(n, params)
    if defect < 0:
        log.warning("negative Tamagawa defect %s at n=%s: inputs are inconsistent", defect, n)
    return defect


def tamagawa_growth_delta(n: int, inv: CharacterInvariants, params: GrowthParams, convention: str = "stated"
                          ) -> Fraction:
    """t_(n+1) - t_n = q* + nabla + kappa - r_inf + p^(n-1)(p-1) n (k-j-1), with nabla = lambda + d_n mu."""
    inv.check_kappa(params.k)
    tau = modesty_tau(n, inv, params)
    q = q_star(n, tau, params, convention).value
    nabla = kobayashi_rank_closed(n, inv.mu(tau), inv.lam(tau), params.p, params.e, "c").value
    return q + nabla + inv.kappa(tau) - inv.r_inf + tamagawa_correction(n, params)


# dual Selmer groups -----------------------------------------------------------

@dataclass(frozen=True)
class SelmerDecomposition:
    lhs: int
    quotient_term: int | None
    x0_term: int | None
    kappa_term: int | None
    mu_tilde: int | None
    lambda_tilde: int | None

    @property
    def residual(self) -> int | None:
        if self.quotient_term is None:
            return None
        return self.lhs - (self.quotient_term + self.x0_term - self.kappa_term)


def nabla_X_i(n: int, inv: CharacterInvariants, params: GrowthParams, i: int) -> SelmerDecomposition:
    """Kobayashi rank of the i-th signed dual Selmer group and its decomposition.

    The invariants of X_i are those of the extension of X_0 by im(Col_i)/Col_i(z):
    mu~ = mu_i + mu_0 and lambda~ = lambda_i + lambda_0 - kappa_i.  The left side is
    evaluated from these, the right side term by term.  Without X_0 data the given
    (mu_i, lambda_i) are taken as those of X_i and no decomposition is returned.
    """
    if i not in (1, 2):
        raise ValueError("i must be 1 or 2")
    p, e = params.p, params.e
    mu, lam, kap = inv.mu(i), inv.lam(i), inv.kappa(i)

    def rank_b(m: int, l: int) -> int:
        return kobayashi_rank_closed(n, m, l, p, e, "b").value

    if inv.mu0 is None:
        return SelmerDecomposition(rank_b(mu, lam), None, None, None, None, None)
    mu_t, lam_t = mu + inv.mu0, lam + inv.lambda0 - kap
    if lam_t < 0:
        raise ValueError("lambda_i + lambda_0 - kappa_i is negative")
    return SelmerDecomposition(rank_b(mu_t, lam_t), rank_b(mu, lam), rank_b(inv.mu0, inv.lambda0), e * kap,
                               mu_t, lam_t)


# comparison of the two candidate columns ------------------------------------------------

@dataclass(frozen=True)
class ModestyComparison:
    n: int
    left: Fraction
    right: Fraction
    predicted_tau: int
    observed: str  # "left<right", "left=right" or "left>right"
    threshold: int | None
    margin: Fraction

    @property
    def matches(self) -> bool:
        if self.predicted_tau == 1:
            return self.left <= self.right if self.n % 2 else self.left < self.right
        return self.left > self.right if self.n % 2 else self.left >= self.right


def _sides(n: int, inv: CharacterInvariants, params: GrowthParams, convention: str) -> tuple[Fraction, Fraction]:
    dn = level_degree(params.p, n)
    row = closed_form_row(params.p, params.k, params.v, n, convention)
    left = inv.lambda1 + dn * (Fraction(inv.mu1, params.e) + row[0])
    right = inv.lambda2 + dn * (Fraction(inv.mu2, params.e) + row[1])
    return left, right


def deciding_margin(n: int, params: GrowthParams, convention: str = "stated") -> Fraction:
    """Column-sum difference entry1 - entry2 with v removed; tends to (k-1)/(p+1)."""
    row = closed_form_row(params.p, params.k, params.v, n, convention)
    diff = row[0] - row[1]
    return diff - params.v if n % 2 else diff + params.v


def _matches(n: int, inv: CharacterInvariants, params: GrowthParams, convention: str) -> bool:
    left, right = _sides(n, inv, params, convention)
    tau = modesty_tau(n, inv, params)
    if tau == 1:
        return left <= right if n % 2 else left < right
    return left > right if n % 2 else left >= right


def modesty_threshold(n_parity: int, inv: CharacterInvariants, params: GrowthParams,
                      convention: str = "stated", horizon: int = 40) -> int | None:
    """First level of the given parity from which the ordering agrees with tau.

    Both sides are affine in p^(n-1)(p-1) with a monotone column-sum term, so once the
    prediction holds it keeps holding; the scan up to ``horizon`` levels confirms this.
    ``None`` means the ordering disagrees with tau at the end of the scan.
    """
    start = 1 if n_parity % 2 else 2
    first = None
    for n in range(start, start + 2 * horizon, 2):
        if _matches(n, inv, params, convention):
            if first is None:
                first = n
        else:
            first = None
    return first


def cor_modesty_compare(n: int, inv: CharacterInvariants, params: GrowthParams,
                        convention: str = "stated") -> ModestyComparison:
    left, right = _sides(n, inv, params, convention)
    observed = "left<right" if left < right else ("left=right" if left == right else "left>right")
    return ModestyComparison(n, left, right, modesty_tau(n, inv, params), observed,
                             modesty_threshold(n % 2, inv, params, convention), deciding_margin(n, params, convention))


# twist and Mellin at eps ---------------------------------------------------------

@dataclass(frozen=True)
class TwistCheck:
    n: int
    ord_F: ExtValuation
    ord_mellin: ExtValuation
    ord_twist: ExtValuation

    @property
    def agree(self) -> bool:
        return self.ord_F == self.ord_mellin == self.ord_twist


def twist_check(F: TruncatedSeries, n: int, u: int | None = None) -> TwistCheck:
    """ord_p F(eps_n), ord_p of the Mellin transform at eps_(n+1) and ord_p Tw(F)(eps_n), all exact."""
    g = IwasawaElement.from_series(F, exact=True)
    ordF = evaluate_poly_at_eps(F.coeffs, F.p, n, F.N, F.B).valuation()
    ordM = mellin_at_eps(g, n + 1, u=u).valuation()
    tw = twist(g, 1, u).component(0)
    ordT = evaluate_poly_at_eps(tw.coeffs, F.p, n, tw.N, tw.B).valuation()
    return TwistCheck(n, ordF, ordM, ordT)


def twist_threshold(F: TruncatedSeries, e: int = 1) -> int:
    """Effective level from which the twist identities hold: F, its Mellin preimage and
    its twist share (mu, lambda), and their values at eps_n are then determined by them."""
    return stabilization_threshold(iwasawa_invariants(F).lam, F.p, e)


def random_polynomial(p: int, mu: int, lam: int, rng, unit_degree: int = 2) -> list[int]:
    """p^mu * (distinguished polynomial of degree lam) * (polynomial unit), exact integers."""
    dist = [p * rng.randrange(p * p) for _ in range(lam)] + [1]
    unit = [rng.randrange(1, p)] + [rng.randrange(p * p) for _ in range(unit_degree)]
    prod = [0] * (len(dist) + len(unit) - 1)
    for i, a in enumerate(dist):
        for j, b in enumerate(unit):
            prod[i + j] += a * b
    return [p**mu * c for c in prod]


def random_finite_tower(p: int, n_max: int, rng, mu_max: int = 2, lam_max: int = 3) -> list[int]:
    """A random polynomial whose quotients O[X]/(F, omega_n), n <= n_max, are all finite."""
    while True:
        F = random_polynomial(p, rng.randint(0, mu_max), rng.randint(0, lam_max), rng)
        if all(free_rank(F, p, n) == 0 for n in range(n_max + 1)):
            return F

"""Extended-rational valuations and 2x2 min-plus matrix algebra."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Tuple, Union

RationalLike = Union[int, Fraction, str]


@total_ordering
@dataclass(frozen=True)
class ExtValuation:
    """An exact rational number or +infinity.

    ``value`` is ``None`` for +infinity.
    """

    value: Fraction | None

    def __init__(self, value: "RationalLike | ExtValuation | None" = None):
        if isinstance(value, ExtValuation):
            value = value.value
        elif isinstance(value, str):
            value = None if value.strip() in ("inf", "+inf", "oo", "∞") else Fraction(value)
        elif value is not None:
            value = Fraction(value)
        object.__setattr__(self, "value", value)

    @classmethod
    def inf(cls) -> "ExtValuation":
        return INF

    @property
    def is_inf(self) -> bool:
        return self.value is None

    def __add__(self, other: "ExtValuation | RationalLike") -> "ExtValuation":
        other = _coerce(other)
        if self.is_inf or other.is_inf:
            return INF
        return ExtValuation(self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other: "ExtValuation | RationalLike") -> "ExtValuation":
        other = _coerce(other)
        if other.is_inf:
            raise ValueError("cannot subtract +inf")
        if self.is_inf:
            return INF
        return ExtValuation(self.value - other.value)

    def __mul__(self, k: RationalLike) -> "ExtValuation":
        k = Fraction(k)
        if k < 0:
            raise ValueError("valuations scale only by non-negative rationals")
        if self.is_inf:
            return INF
        return ExtValuation(self.value * k)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ExtValuation):
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value is not None and self.value == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("ExtValuation", self.value))

    def __lt__(self, other: "ExtValuation | RationalLike") -> bool:
        other = _coerce(other)
        if self.is_inf:
            return False
        if other.is_inf:
            return True
        return self.value < other.value

    def __str__(self) -> str:
        if self.is_inf:
            return "inf"
        return str(self.value)

    def __repr__(self) -> str:
        return f"ExtValuation({self})"


INF = ExtValuation(None)


def _coerce(x: "ExtValuation | RationalLike | None") -> ExtValuation:
    return x if isinstance(x, ExtValuation) else ExtValuation(x)


def vmin(a: "ExtValuation | RationalLike", b: "ExtValuation | RationalLike") -> ExtValuation:
    a, b = _coerce(a), _coerce(b)
    return a if a <= b else b


def vmin_tie(a: "ExtValuation | RationalLike", b: "ExtValuation | RationalLike") -> Tuple[ExtValuation, bool]:
    """Minimum together with a flag that is True when both arguments are equal and finite."""
    a, b = _coerce(a), _coerce(b)
    return vmin(a, b), (a == b and not a.is_inf)


def eps_order(w: "ExtValuation | RationalLike", p: int, n: int) -> ExtValuation:
    """Rescale an ord_p value at level n so that the uniformizer zeta_{p^n} - 1 has order 1."""
    if n < 1:
        raise ValueError("level must be >= 1")
    return _coerce(w) * (p ** (n - 1) * (p - 1))


Grid = Tuple[Tuple[ExtValuation, ExtValuation], Tuple[ExtValuation, ExtValuation]]
Flags = Tuple[Tuple[bool, bool], Tuple[bool, bool]]


@dataclass(frozen=True)
class ValMatrix:
    """2x2 matrix of valuations; ``unique[i][j]`` marks entries known to be exact valuations."""

    entries: Grid
    unique: Flags = field(default=((True, True), (True, True)))

    @classmethod
    def of(cls, rows: Iterable[Iterable["ExtValuation | RationalLike | None"]], unique: Flags | None = None) -> "ValMatrix":
        grid = tuple(tuple(_coerce(x) for x in row) for row in rows)
        if len(grid) != 2 or any(len(r) != 2 for r in grid):
            raise ValueError("ValMatrix is 2x2")
        return cls(grid, unique if unique is not None else ((True, True), (True, True)))

    @classmethod
    def identity(cls) -> "ValMatrix":
        return cls.of([[0, None], [None, 0]])

    def __getitem__(self, ij: Tuple[int, int]) -> ExtValuation:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> Tuple[ExtValuation, ExtValuation]:
        return self.entries[i]

    def __matmul__(self, other: "ValMatrix") -> "ValMatrix":
        return trop_matmul(self, other)

    def same_values(self, other: "ValMatrix") -> bool:
        return self.entries == other.entries

    def __str__(self) -> str:
        rows = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.entries)
        return f"[{rows}]"


def trop_matmul(a: ValMatrix, b: ValMatrix) -> ValMatrix:
    """Min-plus product; an output entry is flagged exact when its value is forced.

    Finite minimum: forced iff attained by a single term whose two factors are exact.
    Infinite minimum: forced iff every term contains an exact +inf factor.
    """
    entries = []
    flags = []
    for i in range(2):
        erow = []
        frow = []
        for j in range(2):
            terms = []
            for k in range(2):
                x, y = a.entries[i][k], b.entries[k][j]
                exact = a.unique[i][k] and b.unique[k][j]
                inf_exact = (x.is_inf and a.unique[i][k]) or (y.is_inf and b.unique[k][j])
                terms.append((x + y, exact, inf_exact))
            best = min(t[0] for t in terms)
            if best.is_inf:
                flag = all(t[2] for t in terms)
            else:
                attaining = [t for t in terms if t[0] == best]
                flag = len(attaining) == 1 and attaining[0][1]
            erow.append(best)
            frow.append(flag)
        entries.append(tuple(erow))
        flags.append(tuple(frow))
    return ValMatrix(tuple(entries), tuple(flags))

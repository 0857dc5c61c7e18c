"""JSON run configuration and the row schemas of the emitted tables.

Rationals are written as strings ("1", "2/5") so that no float ever enters the
computation.  The series F1, F2 may be coefficient lists or literals such as
``"5^-1 * (5 + 10*X + X^2)"``.  A minimal config::

    {
      "schema_version": 1,
      "params": {"p": 5, "k": 3, "v": "1", "n_range": [1, 4]},
      "characters": [{"eta_index": 0, "mu1": 0, "mu2": 0, "lambda1": 2, "lambda2": 2,
                      "kappa1": 1, "kappa2": 1, "r_inf": 0}]
    }
"""

from __future__ import annotations

import csv
import io
import json
import re
from fractions import Fraction
from typing import Annotated, Literal, Optional, Union, get_args

from pydantic import BaseModel, ConfigDict, Field, StringConstraints, field_validator, model_validator

from .growth import CharacterInvariants, GrowthParams
from .series import TruncatedSeries

SCHEMA_VERSION = 1

Rational = Annotated[str, StringConstraints(strip_whitespace=True, pattern=r"^-?\d+(/[1-9]\d*)?$")]
NonNeg = Annotated[int, Field(ge=0)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)


_PREFIX = re.compile(r"^\s*(\d+)\s*\^\s*-\s*(\d+)\s*\*\s*\((.*)\)\s*$")
_TERM = re.compile(r"^(\d+)?\s*(\*?\s*X(?:\s*\^\s*(\d+))?)?$")


def parse_series_literal(text: str, p: int) -> tuple[list[int], int]:
    """Parse ``"p^-B * (c0 + c1*X + c2*X^2)"`` (or just the bracketed sum) into (coefficients, B)."""
    B = 0
    m = _PREFIX.match(text)
    if m:
        if int(m.group(1)) != p:
            raise ValueError(f"series literal uses prime {m.group(1)}, expected {p}")
        B, text = int(m.group(2)), m.group(3)
    else:
        text = text.strip()
        if text.startswith("(") and text.endswith(")"):
            text = text[1:-1]
    body = text.replace(" ", "")
    if not body:
        raise ValueError("empty series literal")
    coeffs: dict[int, int] = {}
    for sign, term in re.findall(r"([+-]?)([^+-]+)", body):
        t = _TERM.match(term)
        if t is None or (t.group(1) is None and t.group(2) is None):
            raise ValueError(f"cannot read term {term!r}")
        if t.group(1) is not None and t.group(2) is not None and not t.group(2).startswith("*"):
            raise ValueError(f"write coefficients as c*X, got {term!r}")
        c = int(t.group(1)) if t.group(1) is not None else 1
        e = 0 if t.group(2) is None else int(t.group(3) or 1)
        coeffs[e] = coeffs.get(e, 0) + (-c if sign == "-" else c)
    out = [0] * (max(coeffs) + 1)
    for e, c in coeffs.items():
        out[e] = c
    return out, B


class ParamsModel(_Strict):
    p: int
    k: int
    v: Rational
    j: int = 1
    e: int = Field(1, ge=1)
    d: int = Field(1, ge=1)
    r: int = Field(1, ge=1)
    n_range: tuple[int, int] = (1, 4)

    @field_validator("n_range", mode="before")
    @classmethod
    def _list_to_tuple(cls, value):
        return tuple(value) if isinstance(value, list) else value

    def build(self) -> GrowthParams:
        return GrowthParams(self.p, self.k, Fraction(self.v), self.j, self.e, self.d, self.r, self.n_range)


class CharacterModel(_Strict):
    eta_index: NonNeg
    mu1: Optional[NonNeg] = None
    mu2: Optional[NonNeg] = None
    lambda1: Optional[NonNeg] = None
    lambda2: Optional[NonNeg] = None
    F1: Optional[Union[list[int], str]] = None
    F2: Optional[Union[list[int], str]] = None
    kappa1: NonNeg = 0
    kappa2: NonNeg = 0
    r_inf: NonNeg = 0
    mu0: Optional[NonNeg] = None
    lambda0: Optional[NonNeg] = None
    tamagawa: dict[str, int] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _sources(self):
        have_series = self.F1 is not None and self.F2 is not None
        if (self.F1 is None) != (self.F2 is None):
            raise ValueError("F1 and F2 must be given together")
        if not have_series and None in (self.mu1, self.mu2, self.lambda1, self.lambda2):
            raise ValueError("give mu1, mu2, lambda1, lambda2 or the series F1, F2")
        if (self.mu0 is None) != (self.lambda0 is None):
            raise ValueError("mu0 and lambda0 must be given together")
        for key in self.tamagawa:
            if not key.lstrip("-").isdigit():
                raise ValueError(f"tamagawa keys are levels, got {key!r}")
        return self

    def build(self, p: int, N: int) -> CharacterInvariants:
        extra = dict(kappa1=self.kappa1, kappa2=self.kappa2, r_inf=self.r_inf, mu0=self.mu0,
                     lambda0=self.lambda0, tamagawa={int(a): b for a, b in self.tamagawa.items()})
        if self.F1 is not None:
            series = []
            for F in (self.F1, self.F2):
                coeffs, B = parse_series_literal(F, p) if isinstance(F, str) else (F, 0)
                series.append(TruncatedSeries.from_ints(p, coeffs, max(len(coeffs), 1), N + B, B))
            declared = dict(mu1=self.mu1, mu2=self.mu2, lambda1=self.lambda1, lambda2=self.lambda2)
            return CharacterInvariants.from_series(self.eta_index, *series, declared=declared, **extra)
        return CharacterInvariants(self.eta_index, self.mu1, self.mu2, self.lambda1, self.lambda2, **extra)


class PrecisionModel(_Strict):
    N: int = Field(40, ge=2)
    M: Optional[int] = Field(None, ge=1)


class OutputModel(_Strict):
    format: Literal["csv", "jsonl"] = "csv"


class RunConfig(_Strict):
    schema_version: Literal[1]
    params: ParamsModel
    characters: list[CharacterModel] = Field(default_factory=list)
    precision: PrecisionModel = Field(default_factory=PrecisionModel)
    output: OutputModel = Field(default_factory=OutputModel)
    convention: Literal["stated", "recursion"] = "stated"


def load_config(text: str) -> RunConfig:
    return RunConfig.model_validate(json.loads(text))


# emitted rows ---------------------------------------------------------------

class BoundRow(_Strict):
    n: int
    eta: int
    tau: Annotated[int, Field(ge=1, le=2)]
    q_star: Rational
    nabla: Rational
    kappa: int
    r_inf: int
    bound_delta_s: Rational
    cumulative_bound: Rational


class TamagawaRow(_Strict):
    n: int
    eta: int
    b_n: Optional[int]
    b_next: Optional[int]
    correction: int
    defect: Optional[int]
    t_delta: Rational
    note: str


class VerifyRow(_Strict):
    suite: str
    case: str
    n: int
    eta: int
    passed: bool
    expected: str
    observed: str
    guard: str
    threshold: str
    note: str


ROW_MODELS = {"bound": BoundRow, "tamagawa": TamagawaRow, "verify": VerifyRow}


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "jsonl":
        return "".join(json.dumps({c: row[c] for c in columns}, ensure_ascii=False) + "\n" for row in rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def parse_table(text: str, fmt: str, kind: str) -> list[BaseModel]:
    """Re-read an emitted table and validate every row against its schema."""
    model = ROW_MODELS[kind]
    if fmt == "jsonl":
        return [model.model_validate(json.loads(line)) for line in text.splitlines() if line.strip()]
    nullable = {name for name, info in model.model_fields.items() if type(None) in get_args(info.annotation)}
    out = []
    for rec in csv.DictReader(io.StringIO(text, newline="")):
        fields = {k: (None if v == "" and k in nullable else v) for k, v in rec.items()}
        out.append(model.model_validate(fields, strict=False))
    return out

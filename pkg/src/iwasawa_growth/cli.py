"""Command line front end: ``iwasawa-growth {bound,tamagawa,verify}``.

Exit codes: 0 success, 2 schema error, 3 hypothesis violation, 4 verification
failure, 5 precision exhaustion.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from pydantic import ValidationError

from . import growth as gr
from .config import RunConfig, load_config, render
from .errors import HypothesisViolation, PrecisionError
from .logmatrix import FormParams
from .verify import SUITES, VerifyOptions, run_suite

EXIT_OK, EXIT_SCHEMA, EXIT_HYPOTHESIS, EXIT_VERIFY, EXIT_PRECISION = 0, 2, 3, 4, 5

BOUND_COLUMNS = ["n", "eta", "tau", "q_star", "nabla", "kappa", "r_inf", "bound_delta_s", "cumulative_bound"]
TAMAGAWA_COLUMNS = ["n", "eta", "b_n", "b_next", "correction", "defect", "t_delta", "note"]
VERIFY_COLUMNS = ["suite", "case", "n", "eta", "passed", "expected", "observed", "guard", "threshold", "note"]


class SchemaError(Exception):
    pass


def _rat(x: Fraction | int) -> str:
    return str(Fraction(x))


def _prepare(cfg: RunConfig):
    """Validate the mathematical hypotheses for every character before computing anything."""
    params = cfg.params.build()
    chars = []
    for ch in cfg.characters:
        try:
            inv = ch.build(params.p, cfg.precision.N)
        except ValueError as exc:
            raise SchemaError(f"characters[eta_index={ch.eta_index}]: {exc}") from exc
        inv.check_kappa(params.k)
        chars.append(inv)
    return params, sorted(chars, key=lambda c: c.eta_index)


def bound_rows(cfg: RunConfig) -> list[dict]:
    params, chars = _prepare(cfg)
    rows = []
    for inv in chars:
        total = Fraction(0)
        for n in params.levels:
            b = gr.sha_growth_bound(n, inv, params, cfg.convention)
            total += b.value
            rows.append(dict(n=n, eta=inv.eta_index, tau=b.tau, q_star=_rat(b.q_star), nabla=_rat(b.nabla),
                             kappa=b.kappa, r_inf=b.r_inf, bound_delta_s=_rat(b.value),
                             cumulative_bound=_rat(total)))
    return sorted(rows, key=lambda r: (r["n"], r["eta"]))


def tamagawa_rows(cfg: RunConfig) -> list[dict]:
    params, chars = _prepare(cfg)
    rows = []
    for inv in chars:
        for n in params.levels:
            corr = gr.tamagawa_correction(n, params)
            delta = gr.tamagawa_growth_delta(n, inv, params, cfg.convention)
            b_n, b_next = inv.tamagawa.get(n), inv.tamagawa.get(n + 1)
            defect, note = None, ""
            if b_n is None or b_next is None:
                note = f"b_{n} and b_{n + 1} are both needed for the defect"
            else:
                defect = gr.tamagawa_defect(n, b_n, b_next, params)
                if defect < 0:
                    note = "negative defect: inconsistent Tamagawa data"
            rows.append(dict(n=n, eta=inv.eta_index, b_n=b_n, b_next=b_next, correction=corr, defect=defect,
                             t_delta=_rat(delta), note=note))
    return sorted(rows, key=lambda r: (r["n"], r["eta"]))


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--out", type=Path, help="write the table here instead of stdout")
    parser.add_argument("--format", choices=["csv", "jsonl"], help="table format (default from config, else csv)")
    parser.add_argument("--precision-N", type=int, dest="precision_N", help="p-adic working precision")
    parser.add_argument("--trunc-M", type=int, dest="trunc_M", help="series truncation degree")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iwasawa-growth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("bound", "growth bound table for s_(n+1) - s_n"),
                       ("tamagawa", "Tamagawa defect and t_(n+1) - t_n table")):
        _common(sub.add_parser(name, help=text))
    ver = sub.add_parser("verify", help="run a property suite")
    ver.add_argument("suite", choices=SUITES)
    ver.add_argument("--p", type=int, default=5)
    ver.add_argument("--k", type=int, default=3)
    ver.add_argument("--ap", type=int, default=None, help="a_p (default p)")
    ver.add_argument("--n-max", type=int, default=3, dest="n_max")
    ver.add_argument("--count", type=int, default=4, help="random cases per suite")
    _common(ver)
    return parser


def _read_config(args) -> RunConfig:
    if args.config is None:
        raise SchemaError("--config is required for this command")
    try:
        text = args.config.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read config: {exc}") from exc
    try:
        cfg = load_config(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config is not valid JSON: {exc}") from exc
    updates = {}
    if args.precision_N is not None:
        updates["N"] = args.precision_N
    if args.trunc_M is not None:
        updates["M"] = args.trunc_M
    if updates:
        cfg = cfg.model_copy(update={"precision": cfg.precision.model_copy(update=updates)})
    return cfg


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_bytes(text.encode())


def _format(args, cfg: RunConfig | None) -> str:
    if args.format:
        return args.format
    return cfg.output.format if cfg is not None else "csv"


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            opts = VerifyOptions(p=args.p, k=args.k, ap=args.p if args.ap is None else args.ap, n_max=args.n_max,
                                 count=args.count, seed=args.seed, N=args.precision_N or 40, M=args.trunc_M or 40)
            if args.suite in ("logmatrix", "evaluate-h", "modesty"):
                FormParams(opts.p, opts.k, opts.ap, N=opts.N)
            results = run_suite(args.suite, opts, jobs=args.jobs)
            _emit(render([r.as_row() for r in results], VERIFY_COLUMNS, _format(args, None)), args.out)
            if any(r.suite == "error" and r.observed == "PrecisionError" for r in results):
                return EXIT_PRECISION
            return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY
        cfg = _read_config(args)
        rows = bound_rows(cfg) if args.command == "bound" else tamagawa_rows(cfg)
        columns = BOUND_COLUMNS if args.command == "bound" else TAMAGAWA_COLUMNS
        _emit(render(rows, columns, _format(args, cfg)), args.out)
        return EXIT_OK
    except ValidationError as exc:
        for err in exc.errors():
            loc = ".".join(str(x) for x in err["loc"]) or "<root>"
            print(f"schema error at {loc}: {err['msg']}", file=sys.stderr)
        return EXIT_SCHEMA
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except HypothesisViolation as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except PrecisionError as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()

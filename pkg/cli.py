#!/usr/bin/env python3
"""
Command line for ontfactor.

    gen {pauli|kernaghan|qutrit|binary-worst|random} [--m N] [--d D] [--s S] [--seed X] [--denominator-bound B]
    factor TABLE --model {1|2|3} [--merge {preparation|table}] [--determinize --policy {contiguous|random} --seed X]
    verify TABLE OF
    bounds TABLE
    compress TABLE OF --method {1|2} [--exhaustive] --seed X --restarts R --iterations I
    analyze TABLE OF
    realize TABLE [--tol T]
    ks-check {kernaghan|FILE}
    render INPUT --cell-px N --format {ppm|svg} [--block-size D] --out PATH

JSON goes to --out or standard output. Exit status: 0 success, 1 failed validation or
verification, 2 usage, input or I/O error.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ValidationError

from config import config
from errors import InvalidTableError, OntFactorError, TableParseError
from logging_config import get_logger
from models import CompressionParams, DataTable, DeterminizeMode, DeterminizePolicy, KSInstance, OntFactorization
from render import FORMATS, render_heatmap
from services import TABLE_NAMES, OntologyService
from table_core import parse_table, serialize_table

logger = get_logger("ontfactor.cli")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2


class InputError(Exception):
    """An input file could not be read; carries the path."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ontfactor", description="Exact ontological factorizations of data tables")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a data table")
    gen.add_argument("kind", choices=TABLE_NAMES)
    gen.add_argument("--m", type=int)
    gen.add_argument("--d", type=int)
    gen.add_argument("--s", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--denominator-bound", type=int, default=12)
    gen.add_argument("--out")

    factor = sub.add_parser("factor", help="build an ontological factorization")
    factor.add_argument("table")
    factor.add_argument("--model", type=int, choices=(1, 2, 3), required=True)
    factor.add_argument("--merge", choices=("preparation", "table"), default="preparation")
    factor.add_argument("--determinize", action="store_true")
    factor.add_argument("--policy", choices=("contiguous", "random"), default="contiguous")
    factor.add_argument("--seed", type=int, default=0)
    factor.add_argument("--out")

    verify = sub.add_parser("verify", help="check D = M P exactly")
    verify.add_argument("table")
    verify.add_argument("factorization")
    verify.add_argument("--out")

    bounds = sub.add_parser("bounds", help="bounds on the number of ontic states")
    bounds.add_argument("table")
    bounds.add_argument("--out")

    compress = sub.add_parser("compress", help="reduce the number of ontic states")
    compress.add_argument("table")
    compress.add_argument("factorization")
    compress.add_argument("--method", type=int, choices=(1, 2), required=True)
    compress.add_argument("--exhaustive", action="store_true")
    compress.add_argument("--seed", type=int, default=0)
    compress.add_argument("--restarts", type=int, default=1)
    compress.add_argument("--iterations", type=int, default=1000)
    compress.add_argument("--out")

    analyze = sub.add_parser("analyze", help="psi-class, contextuality and deficiency")
    analyze.add_argument("table")
    analyze.add_argument("factorization")
    analyze.add_argument("--out")

    realize = sub.add_parser("realize", help="quantum realization of a data table")
    realize.add_argument("table")
    realize.add_argument("--tol", type=float, default=config.REALIZATION_TOL)
    realize.add_argument("--out")

    ks = sub.add_parser("ks-check", help="search for a noncontextual truth assignment")
    ks.add_argument("instance", help="'kernaghan' or a JSON file {\"n\": ..., \"contexts\": [...]}")
    ks.add_argument("--out")

    render = sub.add_parser("render", help="heatmap of a table or factorization")
    render.add_argument("input")
    render.add_argument("--cell-px", type=int, default=8)
    render.add_argument("--format", choices=FORMATS, default="ppm")
    render.add_argument("--block-size", type=int)
    render.add_argument("--out")

    return parser


# --------------------------------------------------------------------------- I/O


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc


def _read_table(path: str) -> DataTable:
    data = _read_bytes(path)
    try:
        return parse_table(data)
    except TableParseError as exc:
        raise TableParseError(f"{path}: {exc}") from exc


def _read_factorization(path: str) -> OntFactorization:
    try:
        return OntFactorization.model_validate_json(_read_bytes(path))
    except ValidationError as exc:
        raise TableParseError(f"{path}: {exc.errors()[0]['msg']}") from exc


def _read_source(path: str) -> Union[DataTable, OntFactorization]:
    data = _read_bytes(path)
    try:
        document = json.loads(data)
    except ValueError as exc:
        raise TableParseError(f"{path}: not JSON ({exc})") from exc
    if isinstance(document, dict) and "omega" in document:
        return _read_factorization(path)
    return _read_table(path)


def _write(out: Optional[str], payload: bytes) -> None:
    if out:
        try:
            Path(out).write_bytes(payload)
        except OSError as exc:
            raise InputError(f"{out}: {exc.strerror or exc}") from exc
        return
    sys.stdout.buffer.write(payload)
    sys.stdout.flush()


def _write_model(out: Optional[str], model: BaseModel) -> None:
    _write(out, model.model_dump_json(indent=2).encode("utf-8") + b"\n")


def _write_json(out: Optional[str], document) -> None:
    _write(out, (json.dumps(document, indent=2) + "\n").encode("utf-8"))


# --------------------------------------------------------------------------- commands


def _command(args: argparse.Namespace, service: OntologyService) -> int:
    if args.command == "gen":
        table = service.generate(
            args.kind, d=args.d, m=args.m, s=args.s, seed=args.seed, denominator_bound=args.denominator_bound
        )
        _write(args.out, serialize_table(table))
        return EXIT_OK

    if args.command == "factor":
        mode = DeterminizeMode.SEEDED_RANDOM if args.policy == "random" else DeterminizeMode.CONTIGUOUS
        factorization = service.factor(
            _read_table(args.table),
            args.model,
            determinize_result=args.determinize,
            policy=DeterminizePolicy(mode=mode, seed=args.seed),
            merge=args.merge,
        )
        _write_model(args.out, factorization)
        return EXIT_OK

    if args.command == "verify":
        report = service.verify(_read_table(args.table), _read_factorization(args.factorization))
        _write_model(args.out, report)
        return EXIT_OK if report.valid else EXIT_INVALID

    if args.command == "bounds":
        _write_model(args.out, service.bounds(_read_table(args.table)))
        return EXIT_OK

    if args.command == "compress":
        params = CompressionParams(seed=args.seed, restarts=args.restarts, iterations=args.iterations)
        result = service.compress(
            _read_table(args.table),
            _read_factorization(args.factorization),
            args.method,
            params=params,
            exhaustive=args.exhaustive,
        )
        _write_model(args.out, result)
        return EXIT_OK

    if args.command == "analyze":
        _write_model(args.out, service.analyze(_read_table(args.table), _read_factorization(args.factorization)))
        return EXIT_OK

    if args.command == "realize":
        realization, error = service.realize(_read_table(args.table))
        _write_model(args.out, realization)
        if error > args.tol:
            logger.error("realization error %.3e exceeds --tol %.1e", error, args.tol)
            return EXIT_INVALID
        return EXIT_OK

    if args.command == "ks-check":
        instance = None
        if args.instance != "kernaghan":
            try:
                instance = KSInstance.model_validate_json(_read_bytes(args.instance))
            except ValidationError as exc:
                raise TableParseError(f"{args.instance}: {exc.errors()[0]['msg']}") from exc
        _write_json(args.out, service.ks_check(instance))
        return EXIT_OK

    if args.command == "render":
        if args.cell_px < 1:
            raise TableParseError("--cell-px must be at least 1")
        image = render_heatmap(_read_source(args.input), args.cell_px, args.format, args.block_size)
        _write(args.out, image)
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command}")


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    service = OntologyService()
    try:
        return _command(args, service)
    except InvalidTableError as exc:
        logger.error("%s", exc)
        return EXIT_INVALID
    except ValidationError as exc:
        first = exc.errors()[0]
        logger.error("%s: %s", ".".join(str(part) for part in first["loc"]), first["msg"])
        return EXIT_USAGE
    except (OntFactorError, InputError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

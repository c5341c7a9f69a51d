"""Command-line front end: ``ctrs-nonconf [options] FILE``.

Prints ``NO`` (followed by the proof) when a checked witness was found and
``MAYBE`` otherwise.  With ``--check PATH`` the witness document at PATH is
verified against FILE instead and ``CERTIFIED`` or ``REJECTED`` is printed.

Exit status: 0 for any verdict (including ``MAYBE`` after a timeout) and
for ``CERTIFIED``; 1 for usage errors, unreadable or malformed input, and
rejected witnesses; 2 when the prover's own witness fails its checker.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .cops import CopsError, parse_cops
from .narrowing import NarrowConfig
from .nonconfluence import CertificationError, Method, Options, SearchTimeout, prove_nonconfluence
from .witness import WitnessFormatError, check_witness, emit_witness, parse_witness, witness_to_json

log = logging.getLogger("ctrs_nonconf")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTERNAL = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise _UsageError(message)


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _methods(text: str) -> tuple[Method, ...]:
    names = [m.strip().upper() for m in text.split(",") if m.strip()]
    try:
        chosen = {Method(name) for name in names}
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown method in {text!r}") from None
    return tuple(m for m in Method if m in chosen)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="ctrs-nonconf",
        description="Prove non-confluence of oriented conditional rewrite systems (Cops format).",
    )
    p.add_argument("file", type=Path, help="Cops problem file")
    p.add_argument(
        "--methods",
        type=_methods,
        default=tuple(Method),
        help="comma-separated subset of urnf,ucp,narrowing (default: all)",
    )
    p.add_argument("--no-preprocess", action="store_true", help="keep infeasible rules")
    p.add_argument("--narrow-max-len", type=_positive, default=3, metavar="N")
    p.add_argument("--narrow-max-level", type=_positive, default=2, metavar="N")
    p.add_argument("--cond-max-len", type=_positive, default=3, metavar="N")
    p.add_argument("--cond-budget", type=_positive, default=4, metavar="N")
    p.add_argument("--timeout", type=float, default=60.0, metavar="SECONDS")
    p.add_argument("--jobs", type=_positive, default=1, metavar="N")
    p.add_argument("--witness-out", type=Path, metavar="PATH", help="write the JSON witness here")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--check", type=Path, metavar="PATH", help="verify a witness document")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=1, ensure_ascii=False))


def _check_mode(args: argparse.Namespace, system) -> int:
    try:
        witness = parse_witness(args.check.read_bytes())
    except OSError as exc:
        print(f"ctrs-nonconf: cannot read {args.check}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    except WitnessFormatError as exc:
        print(f"ctrs-nonconf: {args.check}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    verdict = check_witness(system, witness)
    word = "CERTIFIED" if verdict else "REJECTED"
    if args.format == "json":
        _print_json({"verdict": word, "reason": verdict.reason})
    else:
        print(word)
    if not verdict:
        print(f"ctrs-nonconf: {verdict.reason}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"ctrs-nonconf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")

    try:
        source = args.file.read_bytes()
    except OSError as exc:
        print(f"ctrs-nonconf: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    try:
        system = parse_cops(source)
    except CopsError as exc:
        print(f"ctrs-nonconf: {args.file}:{exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.check is not None:
        return _check_mode(args, system)

    options = Options(
        methods=args.methods,
        preprocess=not args.no_preprocess,
        narrowing=NarrowConfig(args.narrow_max_len, args.narrow_max_level, args.cond_max_len),
        step_budget=args.cond_budget,
        timeout=args.timeout,
        jobs=args.jobs,
    )
    try:
        witness = prove_nonconfluence(system, options)
    except SearchTimeout:
        log.info("timeout after %s seconds", args.timeout)
        witness = None
    except CertificationError as exc:
        print(f"ctrs-nonconf: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    if witness is None:
        if args.format == "json":
            _print_json({"verdict": "MAYBE"})
        else:
            print("MAYBE")
        return EXIT_OK

    text = source.decode("utf-8")
    if args.witness_out is not None:
        args.witness_out.write_bytes(emit_witness(witness, "structured", text))
    if args.format == "json":
        _print_json(
            {"verdict": "NO", "method": witness.method.value, "witness": witness_to_json(witness, text)}
        )
    else:
        print("NO")
        sys.stdout.write(emit_witness(witness, "text").decode("utf-8"))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

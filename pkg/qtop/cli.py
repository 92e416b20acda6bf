"""
Command-line entry point.

    python -m qtop jones --r 3 --braid "2: 1 1 1" --colors 1
    python -m qtop ado --r 3 --knot unknot --alpha 0.5
    python -m qtop nr0 --r 3 --knot trefoil --f 1 --omega 0
    python -m qtop wrt --r 5 --surgery unknot:+1
    python -m qtop verify all --r 3

Results are printed as JSON with complex numbers as [re, im] and floats to
17 significant digits. Exit codes:
0 success, 2 parse error, 3 contract violation, 4 numerical failure
(including failed verification checks).
"""

import argparse
import json
import logging
import math
import re
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from qtop.config import configure_logging, get_settings
from qtop.models.job import Command, JobSpec
from qtop.services.errors import ParseError, QtopError
from qtop.services.jobs import JobRunner
from qtop.services.verify import VerificationService

logger = logging.getLogger("qtop.cli")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CONTRACT = 3
EXIT_NUMERIC = 4

_SURGERY = re.compile(r"^\s*([A-Za-z0-9_]+)\s*:\s*([+-]?\d+)\s*$")


def _add_link_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--braid", help="braid text, e.g. '2: 1 1 1'")
    group.add_argument("--knot", help="knot-table name (unknot, trefoil, figure8, hopf)")
    group.add_argument("--json", dest="link", help="JSON link, inline or a file path")
    parser.add_argument("--framings", type=int, nargs="+", default=[], help="framing per component")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--r", type=int, required=True, help="q = exp(iπ/r)")
    parser.add_argument("--threads", type=int, default=None, help="worker threads for batched evaluation")
    parser.add_argument("--output", help="also write the JSON result to this file")
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtop", description="Quantum invariants at roots of unity")
    sub = parser.add_subparsers(dest="command", required=True)

    jones = sub.add_parser("jones", help="colored Jones polynomial")
    _add_common(jones)
    _add_link_options(jones)
    jones.add_argument("--colors", nargs="+", required=True, help="color n in 0..r−1 per component")
    jones.add_argument("--method", choices=["rt", "skein", "both"], default="rt")
    jones.add_argument("--both", action="store_true", help="shorthand for --method both")

    ado = sub.add_parser("ado", help="modified invariant F′")
    _add_common(ado)
    _add_link_options(ado)
    ado.add_argument("--colors", nargs="+", default=[], help="color labels such as V0.5 S1 tau")
    ado.add_argument("--alpha", action="append", default=[], help="sample V_α on a knot (repeatable)")
    ado.add_argument("--grid", nargs=3, metavar=("START", "STOP", "NUM"), help="real α samples")

    for name, text in (("nr0", "N⁰_r of knot surgery"), ("wrt", "WRT_r invariant"), ("nr", "N_r invariant")):
        cmd = sub.add_parser(name, help=text)
        _add_common(cmd)
        _add_link_options(cmd)
        cmd.add_argument("--surgery", help="knot surgery shorthand NAME:FRAMING, e.g. unknot:+1")
        cmd.add_argument("--f", type=int, help="surgery framing")
        cmd.add_argument("--omega", type=int, default=0, choices=[0, 1])
        if name == "nr0":
            cmd.add_argument("--path", choices=["direct", "cabled", "limit"], default="direct")
            cmd.add_argument("--alpha", help="generic color for the cabled path")
        else:
            cmd.add_argument("--class", dest="classes", action="append", default=[],
                             metavar="COMP=DEGREE", help="surgery component and meridian class")
            cmd.add_argument("--cargo", action="append", default=[], metavar="COMP=COLOR",
                             help="cargo component and color label")

    verify = sub.add_parser("verify", help="run verification suites")
    _add_common(verify)
    verify.add_argument("suite", choices=list(VerificationService.SUITES) + ["all"])
    verify.add_argument("--knot", default="trefoil")
    return parser


def _pairs(items: Sequence[str], what: str) -> Dict[int, str]:
    result = {}
    for item in items:
        component, sep, value = item.partition("=")
        if not sep or not component.strip().isdigit():
            raise ParseError(f"expected COMP=VALUE for {what}, got {item!r}")
        result[int(component)] = value.strip()
    return result


def _load_link(text: Optional[str]) -> Optional[Dict[str, Any]]:
    if text is None:
        return None
    if not text.lstrip().startswith("{"):
        try:
            with open(text) as handle:
                text = handle.read()
        except OSError as e:
            raise ParseError(f"cannot read link file: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", e.pos)


def spec_from_args(args: argparse.Namespace) -> JobSpec:
    """Translates parsed arguments into a JobSpec."""
    fields: Dict[str, Any] = {"command": Command(args.command), "r": args.r, "output": args.output}
    if args.command == "verify":
        fields.update(suite=args.suite, knot=args.knot)
        return JobSpec(**fields)

    fields.update(braid=args.braid, knot=args.knot, link=_load_link(args.link), framings=args.framings)
    if args.command == "jones":
        fields.update(colors=args.colors, method="both" if args.both else args.method)
    elif args.command == "ado":
        alphas: List[str] = list(args.alpha)
        if args.grid:
            try:
                start, stop, num = float(args.grid[0]), float(args.grid[1]), int(args.grid[2])
            except ValueError:
                raise ParseError(f"--grid expects START STOP NUM, got {args.grid}")
            alphas.extend(repr(float(x)) for x in np.linspace(start, stop, num))
        fields.update(colors=args.colors, alphas=alphas)
    else:
        fields.update(f=args.f, omega=args.omega)
        if args.surgery:
            match = _SURGERY.match(args.surgery)
            if not match:
                raise ParseError(f"expected NAME:FRAMING for --surgery, got {args.surgery!r}")
            fields.update(knot=match.group(1), braid=None, link=None, f=int(match.group(2)))
        if args.command == "nr0":
            fields.update(path=args.path, alpha=args.alpha)
        else:
            fields.update(surgery=_pairs(args.classes, "--class"), cargo=_pairs(args.cargo, "--cargo"))
    return JobSpec(**fields)


class ExactFloatEncoder(json.JSONEncoder):
    """JSON encoder writing every float with 17 significant digits."""

    def iterencode(self, o, _one_shot=False):
        def floatstr(value: float) -> str:
            if not math.isfinite(value):
                if not self.allow_nan:
                    raise ValueError(f"out of range float value {value!r}")
                return "NaN" if math.isnan(value) else ("Infinity" if value > 0 else "-Infinity")
            text = format(value, ".17g")
            return text if any(c in text for c in ".en") else text + ".0"

        encode_str = json.encoder.encode_basestring_ascii if self.ensure_ascii else json.encoder.encode_basestring
        return json.encoder._make_iterencode(
            {} if self.check_circular else None, self.default, encode_str, self.indent, floatstr,
            self.key_separator, self.item_separator, self.sort_keys, self.skipkeys, _one_shot,
        )(o, 0)


def _emit(result: Dict[str, Any], output: Optional[str]) -> None:
    text = json.dumps(result, indent=2, cls=ExactFloatEncoder)
    print(text)
    if output:
        with open(output, "w") as handle:
            handle.write(text + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    settings = get_settings()
    if args.threads:
        settings.threads = max(1, args.threads)

    try:
        spec = spec_from_args(args)
        logger.debug("job spec: %s", spec.model_dump_json())
        result = JobRunner(settings).run(spec)
    except ValidationError as e:
        print(f"error: invalid input: {e}", file=sys.stderr)
        return EXIT_PARSE
    except QtopError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code

    _emit(result, spec.output)
    if spec.command is Command.VERIFY and not result["passed"]:
        failed = [r["name"] for r in result["reports"] if not r["pass"]]
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

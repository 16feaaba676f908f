"""Command-line interface for diffconcepts."""

from __future__ import annotations

import argparse
import logging
import sys
import tempfile
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from diffconcepts import __version__, config, formats
from diffconcepts.analysis import (
    ORIENTATIONS,
    Curve,
    common_intents,
    concept_diff,
    diff_matrix,
    relation,
    signatures,
)
from diffconcepts.encoder import SampleSeries, encode
from diffconcepts.errors import (
    CapacityError,
    DerivationError,
    DiffConceptsError,
    InvalidValueError,
    ParseError,
    SchemaError,
)
from diffconcepts.fca import concepts, lattice
from diffconcepts.sensor import (
    SENSOR_SYMBOLS,
    AttributeSelection,
    derive_series,
    format_series_csv,
    parse_polyline_json,
    parse_series_csv,
    resample_uniform,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_CAPACITY = 3

COMMANDS = ("encode", "concepts", "lattice", "diff", "matrix", "common", "derive")
MULTI_CURVE_COMMANDS = ("diff", "matrix", "common")
# commands whose comparisons can leave out the top and bottom concepts
BOUNDED_COMMANDS = ("diff", "matrix")
FORMATS = {
    "encode": ("json",),
    "concepts": ("json",),
    "lattice": ("dot", "json"),
    "diff": ("json",),
    "matrix": ("csv", "json"),
    "common": ("json",),
    "derive": ("csv",),
}
# (minimum, maximum) number of input files; None means unbounded.
INPUT_COUNTS = {
    "encode": (1, 1),
    "concepts": (1, 1),
    "lattice": (1, 1),
    "diff": (2, 2),
    "matrix": (2, None),
    "common": (1, None),
    "derive": (1, 1),
}
HELP = {
    "encode": "Encode one curve into its formal context",
    "concepts": "List the formal concepts of one curve",
    "lattice": "Build the concept lattice of one curve",
    "diff": "Compare the concept sets of two curves",
    "matrix": "Pairwise concept-set difference sizes of several curves",
    "common": "Concept intents shared by every curve",
    "derive": "Derive a sensor series from a polyline",
}
_SENSOR_ALIASES = {
    **{name: symbol for name, symbol in SENSOR_SYMBOLS.items()},
    **{symbol: symbol for symbol in SENSOR_SYMBOLS.values()},
}


class UsageError(Exception):
    """Raised for malformed command lines."""


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting on bad input."""

    def error(self, message: str):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Validated options of one invocation."""

    command: str
    inputs: tuple[Path, ...]
    attrs: str | None
    eps: float | None
    output_format: str
    out: Path | None
    max_breakpoints: int | None
    max_concepts: int | None
    include_top: bool
    include_bottom: bool
    orientation: str
    step: float | None
    workers: int

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        low, high = INPUT_COUNTS[args.command]
        count = len(args.inputs)
        if count < low or (high is not None and count > high):
            expected = str(low) if low == high else f"at least {low}"
            raise UsageError(
                f"{args.command} expects {expected} input file(s), got {count}"
            )
        if args.command != "derive" and not args.attrs:
            raise UsageError(f"{args.command} requires --attrs")
        return cls(
            command=args.command,
            inputs=tuple(Path(path) for path in args.inputs),
            attrs=args.attrs,
            eps=args.eps,
            output_format=args.format or FORMATS[args.command][0],
            out=Path(args.out) if args.out else None,
            max_breakpoints=args.max_breakpoints,
            max_concepts=args.max_concepts,
            include_top=args.include_top,
            include_bottom=args.include_bottom,
            orientation=args.orientation,
            step=args.step,
            workers=args.workers,
        )


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in {"true", "yes", "1"}:
        return True
    if lowered in {"false", "no", "0"}:
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def non_negative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value != value or value in (float("inf"), float("-inf")) or value < 0:
        raise argparse.ArgumentTypeError(
            f"expected a finite non-negative number, got {text!r}"
        )
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def add_command_subparser(
    subparsers: argparse._SubParsersAction, command: str
) -> None:
    """Add one pipeline command with the options it understands."""
    parser = subparsers.add_parser(command, help=HELP[command])
    parser.set_defaults(
        include_top=True,
        include_bottom=True,
        orientation=ORIENTATIONS[0],
        workers=1,
    )
    parser.add_argument("inputs", nargs="*", metavar="INPUT")
    parser.add_argument(
        "--attrs",
        help=(
            "Comma-separated attributes: CSV column names, or sensor attributes "
            "angle,width,x,y (a, w) for polyline JSON input"
        ),
    )
    parser.add_argument(
        "--format", choices=FORMATS[command], help="Output format"
    )
    parser.add_argument("--out", help="Write the result to a file instead of stdout")
    parser.add_argument(
        "--step",
        type=non_negative_float,
        help="Resample polyline input every STEP units of arc length",
    )
    parser.add_argument(
        "--verbose", action="store_true", help="Log progress to stderr"
    )
    if command == "derive":
        return

    parser.add_argument(
        "--eps",
        type=non_negative_float,
        help="Comparison tolerance (default DIFFCONCEPTS_EPS or 1e-9)",
    )
    parser.add_argument("--max-breakpoints", type=positive_int)
    parser.add_argument("--max-concepts", type=positive_int)
    if command in BOUNDED_COMMANDS:
        parser.add_argument(
            "--include-top", type=parse_bool, default=True, metavar="true|false"
        )
        parser.add_argument(
            "--include-bottom", type=parse_bool, default=True, metavar="true|false"
        )
    if command == "matrix":
        parser.add_argument(
            "--orientation", choices=ORIENTATIONS, default=ORIENTATIONS[0]
        )
    if command in MULTI_CURVE_COMMANDS:
        parser.add_argument(
            "--workers",
            type=positive_int,
            default=1,
            help="Encode curves on this many threads",
        )


def build_parser() -> argparse.ArgumentParser:
    """Build the top-level argument parser."""
    parser = ArgumentParser(prog="diffconcepts")
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", parser_class=ArgumentParser)
    for command in COMMANDS:
        add_command_subparser(subparsers, command)
    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _with_path(exc: DiffConceptsError, path: Path) -> DiffConceptsError:
    return type(exc)(f"{path}: {exc}")


def _labels(attrs: str) -> tuple[str, ...]:
    """Attribute labels; sensor names map to their short symbols."""
    names = [item.strip() for item in attrs.split(",") if item.strip()]
    labels = tuple(_SENSOR_ALIASES.get(name.lower(), name) for name in names)
    if not labels:
        raise SchemaError("--attrs selects no attribute")
    if len(set(labels)) != len(labels):
        raise SchemaError(f"duplicate attributes in --attrs {attrs!r}")
    return labels


def _column_for(series: SampleSeries, requested: str, label: str) -> str:
    candidates = [requested, label]
    candidates += [name for name, symbol in SENSOR_SYMBOLS.items() if symbol == label]
    for candidate in candidates:
        if candidate in series.attributes:
            return candidate
    raise SchemaError(
        f"unknown attribute {requested!r}; series {series.name!r} has "
        f"{list(series.attributes)}"
    )


def project_series(series: SampleSeries, attrs: str) -> SampleSeries:
    """Select the ``--attrs`` columns of a CSV series under their labels."""
    requested = [item.strip() for item in attrs.split(",") if item.strip()]
    labels = _labels(attrs)
    columns = [
        series.column(_column_for(series, name, label))
        for name, label in zip(requested, labels)
    ]
    return SampleSeries(series.name, labels, np.column_stack(columns))


def load_curve(path: Path, run: RunConfig) -> Curve:
    """Read one input file as a named series over the selected attributes."""
    suffix = path.suffix.lower()
    if suffix not in {".csv", ".json"}:
        raise UsageError(f"{path}: inputs must be .csv series or .json polylines")
    text = _read_text(path)
    try:
        if suffix == ".csv":
            series = parse_series_csv(text, name=path.stem)
            if run.attrs:
                series = project_series(series, run.attrs)
            return series.name, series

        polyline = parse_polyline_json(text)
        if run.step is not None:
            polyline = resample_uniform(polyline, run.step)
        selection = AttributeSelection.parse(run.attrs or "angle,width,x,y")
        series = derive_series(polyline, selection)
        logger.debug("%s: derived %d samples", path, len(series))
        return series.name, series
    except DiffConceptsError as exc:
        raise _with_path(exc, path) from exc


def _caps(run: RunConfig) -> dict[str, int | None]:
    return {"max_breakpoints": run.max_breakpoints, "max_concepts": run.max_concepts}


def run_command(run: RunConfig) -> str:
    """Compute the full output text of one command."""
    if run.command == "derive":
        if run.inputs[0].suffix.lower() != ".json":
            raise UsageError("derive reads a polyline .json file")
        _, series = load_curve(run.inputs[0], run)
        return format_series_csv(series).rstrip("\n")

    curves = [load_curve(path, run) for path in run.inputs]
    attrs = curves[0][1].attributes
    if run.command in {"encode", "concepts", "lattice"}:
        _, series = curves[0]
        context = encode(series, attrs, run.eps, max_breakpoints=run.max_breakpoints)
        if run.command == "encode":
            return formats.export_context_json(context)
        found = concepts(context, max_concepts=run.max_concepts)
        if run.command == "concepts":
            return formats.export_concepts_json(context, found)
        ordered = lattice(context, found)
        if run.output_format == "json":
            return formats.export_lattice_json(context, ordered)
        return formats.export_lattice_dot(context, ordered)

    if run.command == "diff":
        signed = signatures(
            curves,
            attrs,
            run.eps,
            include_top=run.include_top,
            include_bottom=run.include_bottom,
            workers=run.workers,
            **_caps(run),
        )
        (name_a, sig_a), (name_b, sig_b) = signed
        return formats.export_diff_json(
            (name_a, name_b),
            concept_diff(sig_a, sig_b),
            concept_diff(sig_b, sig_a),
            relation(sig_a, sig_b),
        )

    if run.command == "matrix":
        matrix = diff_matrix(
            curves,
            attrs,
            run.eps,
            include_top=run.include_top,
            include_bottom=run.include_bottom,
            orientation=run.orientation,
            workers=run.workers,
            **_caps(run),
        )
        if run.output_format == "json":
            return formats.export_matrix_json(matrix, orientation=run.orientation)
        return formats.export_matrix_csv(matrix).rstrip("\n")

    shared = common_intents(curves, attrs, run.eps, workers=run.workers, **_caps(run))
    return formats.export_common_json([name for name, _ in curves], shared)


def write_output(text: str, out: Path | None) -> None:
    """Write the result to stdout or atomically to ``out``."""
    if out is None:
        sys.stdout.write(text + "\n")
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", dir=out.parent, delete=False, newline="\n"
    ) as handle:
        handle.write(text + "\n")
        tmp_path = Path(handle.name)
    tmp_path.replace(out)


def exit_code_for(exc: Exception) -> int:
    if isinstance(exc, CapacityError):
        return EXIT_CAPACITY
    if isinstance(exc, (ParseError, SchemaError, InvalidValueError, DerivationError)):
        return EXIT_INPUT
    return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    """Dispatch the CLI and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_OK

    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    configure_logging(args.verbose)
    if args.command == "derive":
        args.eps = args.max_breakpoints = args.max_concepts = None

    try:
        config.load_env_files()
        run = RunConfig.from_args(args)
        text = run_command(run)
        write_output(text, run.out)
    except (UsageError, DiffConceptsError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except OSError as exc:
        print(f"Error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK

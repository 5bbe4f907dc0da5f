"""Command-line front end.

Two subcommands::

    pqc-complexity sweep --qubits 4,8 --layers 1..10 --out results/
    pqc-complexity quantify entanglement --family pqc --topology ring --qubits 4 --layers 5

Sweeps write one file per quantifier. Each file starts with a comment line
(a ``meta`` object for JSON) carrying the tool version, schema version and
the canonical invocation; ``--threads`` and ``--out`` are left out of it so
the bytes depend only on what was computed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from typing import Iterable, Sequence, TextIO

from . import __version__
from .circuits import G3, PQC, Topology
from .experiments import (
    ENTANGLEMENT,
    EXPRESSIBILITY,
    HAAR,
    MAJORIZATION,
    QUANTIFIERS,
    ResultRecord,
    SweepConfig,
    evaluate_point,
    g3_point,
    haar_point,
    pqc_point,
    run_sweep,
    set_threads,
)

SCHEMA_VERSION = 1
SEED_ENV = "PQC_COMPLEXITY_SEED"
DEFAULT_SEED = 42
PROG = "pqc-complexity"

COMMON_COLUMNS = ["family", "topology", "qubits", "layers", "gates", "samples"]
CSV_COLUMNS = {
    EXPRESSIBILITY: COMMON_COLUMNS + ["bins", "seed", "kl"],
    MAJORIZATION: COMMON_COLUMNS + ["seed", "k", "std_cumulant"],
    ENTANGLEMENT: COMMON_COLUMNS + ["seed", "mean_q", "std_q", "cue_mean", "cue_std"],
}

log = logging.getLogger(PROG)


def fmt_float(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _json_float(x):
    if isinstance(x, float):
        return None if math.isnan(x) else x
    return x


def _record_prefix(record: ResultRecord) -> list[str]:
    return [
        record.family,
        record.topology,
        str(record.n_qubits),
        str(record.layers),
        str(record.gates),
        str(record.samples),
    ]


def csv_rows(record: ResultRecord) -> list[list[str]]:
    prefix = _record_prefix(record)
    p = record.payload
    if record.quantifier == EXPRESSIBILITY:
        return [prefix + [str(record.bins), str(record.seed), fmt_float(p["kl"])]]
    if record.quantifier == MAJORIZATION:
        if not p["k"]:
            return [prefix + [str(record.seed), "", "nan"]]
        return [prefix + [str(record.seed), str(k), fmt_float(s)] for k, s in zip(p["k"], p["std_cumulant"])]
    return [prefix + [str(record.seed)] + [fmt_float(p[c]) for c in ("mean_q", "std_q", "cue_mean", "cue_std")]]


def record_to_json(record: ResultRecord) -> dict:
    out = {
        "family": record.family,
        "topology": record.topology,
        "qubits": record.n_qubits,
        "layers": record.layers,
        "gates": record.gates,
        "quantifier": record.quantifier,
        "samples": record.samples,
        "seed": record.seed,
    }
    if record.bins is not None:
        out["bins"] = record.bins
    p = record.payload
    if record.quantifier == MAJORIZATION:
        out["rows"] = [{"k": k, "std_cumulant": _json_float(s)} for k, s in zip(p["k"], p["std_cumulant"])]
    else:
        out.update({key: _json_float(v) for key, v in p.items()})
    if record.error is not None:
        out["error"] = record.error
    return out


def header_line(invocation: str) -> str:
    return f"# {PROG} {__version__} schema={SCHEMA_VERSION} invocation: {invocation}"


def write_csv(records: Iterable[ResultRecord], quantifier: str, fh: TextIO, invocation: str) -> None:
    fh.write(header_line(invocation) + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS[quantifier])
    for record in records:
        writer.writerows(csv_rows(record))


def write_json(records: Iterable[ResultRecord], quantifier: str, fh: TextIO, invocation: str) -> None:
    doc = {
        "meta": {"tool": PROG, "version": __version__, "schema": SCHEMA_VERSION, "invocation": invocation},
        "quantifier": quantifier,
        "records": [record_to_json(r) for r in records],
    }
    json.dump(doc, fh, indent=1)
    fh.write("\n")


WRITERS = {"csv": write_csv, "json": write_json}


def parse_int_list(text: str) -> tuple[int, ...]:
    """Parse ``"4"``, ``"4,8"``, ``"1..10"`` or mixtures like ``"1..4,8"``."""
    values: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo_i, hi_i = int(lo), int(hi)
            if hi_i < lo_i:
                raise argparse.ArgumentTypeError(f"empty range {part!r}")
            values.extend(range(lo_i, hi_i + 1))
        else:
            values.append(int(part))
    if not values:
        raise argparse.ArgumentTypeError(f"no integers in {text!r}")
    return tuple(dict.fromkeys(values))


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return parse_int_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _choice_list(choices: Sequence[str], all_value: Sequence[str]):
    def parse(text: str) -> tuple[str, ...]:
        items = [t.strip().lower() for t in text.split(",") if t.strip()]
        if items == ["all"]:
            return tuple(all_value)
        bad = [t for t in items if t not in choices]
        if bad or not items:
            raise argparse.ArgumentTypeError(f"invalid choice(s) {bad or text!r}; choose from {', '.join(choices)}")
        return tuple(dict.fromkeys(items))

    return parse


def _topology_list(text: str) -> tuple[str, ...]:
    if text.strip().lower() == "all":
        return tuple(t.value for t in Topology)
    try:
        return tuple(dict.fromkeys(Topology.parse(t).value for t in text.split(",") if t.strip()))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise SystemExit(f"{PROG}: error: {SEED_ENV}={env!r} is not an integer")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-record progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--samples", type=int, default=10_000, help="circuit samples per point (even)")
        p.add_argument("--bins", type=int, default=75, help="fidelity histogram bins")
        p.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV} or {DEFAULT_SEED})")
        p.add_argument("--threads", type=int, default=None, help="simulation threads (does not change results)")

    sw = sub.add_parser("sweep", help="run a parameter sweep and write one file per quantifier")
    sw.add_argument("--qubits", type=_int_list, default=(4, 8), help="qubit counts, e.g. 4,8 or 4..8")
    sw.add_argument("--layers", type=_int_list, default=tuple(range(1, 11)), help="layer counts (default 1..10)")
    sw.add_argument("--topologies", type=_topology_list, default=tuple(t.value for t in Topology),
                    help="comma list of none,linear,ring,star")
    sw.add_argument("--families", type=_choice_list((PQC, G3), (PQC, G3)), default=(PQC, G3), help="comma list of pqc,g3")
    sw.add_argument("--quantifiers", type=_choice_list(QUANTIFIERS, QUANTIFIERS), default=QUANTIFIERS, help="comma list or all")
    sw.add_argument("--no-haar", action="store_true", help="skip the Haar reference rows")
    sw.add_argument("--format", choices=sorted(WRITERS), default="csv")
    sw.add_argument("--out", default="results", help="output directory")
    common(sw)

    qu = sub.add_parser("quantify", help="evaluate one quantifier on one ensemble and print the record")
    qu.add_argument("quantifier", choices=QUANTIFIERS)
    qu.add_argument("--family", choices=(PQC, G3, HAAR), default=PQC)
    qu.add_argument("--topology", type=lambda t: Topology.parse(t).value, default=None, help="pqc only")
    qu.add_argument("--qubits", type=int, required=True)
    qu.add_argument("--layers", type=int, default=None, help="pqc only")
    qu.add_argument("--gates", type=int, default=None, help="g3 only")
    qu.add_argument("--format", choices=sorted(WRITERS), default="json")
    common(qu)
    return parser


def _validate_common(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.samples < 2 or args.samples % 2:
        parser.error(f"--samples must be an even integer >= 2 (fidelities pair samples), got {args.samples}")
    if args.bins < 1:
        parser.error(f"--bins must be positive, got {args.bins}")
    if args.seed is None:
        args.seed = _default_seed()


def sweep_invocation(args: argparse.Namespace) -> str:
    parts = [
        "sweep",
        f"--qubits {','.join(map(str, args.qubits))}",
        f"--layers {','.join(map(str, args.layers))}",
        f"--topologies {','.join(args.topologies)}",
        f"--families {','.join(args.families)}",
        f"--quantifiers {','.join(args.quantifiers)}",
        f"--samples {args.samples}",
        f"--bins {args.bins}",
        f"--seed {args.seed}",
        f"--format {args.format}",
    ]
    if args.no_haar:
        parts.append("--no-haar")
    return " ".join(parts)


def quantify_invocation(args: argparse.Namespace) -> str:
    parts = [f"quantify {args.quantifier}", f"--family {args.family}"]
    if args.topology is not None:
        parts.append(f"--topology {args.topology}")
    parts.append(f"--qubits {args.qubits}")
    if args.layers is not None:
        parts.append(f"--layers {args.layers}")
    if args.gates is not None:
        parts.append(f"--gates {args.gates}")
    parts += [f"--samples {args.samples}", f"--bins {args.bins}", f"--seed {args.seed}", f"--format {args.format}"]
    return " ".join(parts)


def cmd_sweep(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    _validate_common(parser, args)
    try:
        config = SweepConfig(
            qubit_list=args.qubits,
            layer_range=args.layers,
            topologies=tuple(Topology.parse(t) for t in args.topologies),
            families=args.families,
            samples_per_point=args.samples,
            n_bins=args.bins,
            master_seed=args.seed,
            quantifiers=args.quantifiers,
            haar_reference=not args.no_haar,
        )
    except ValueError as exc:
        parser.error(str(exc))

    invocation = f"{PROG} {sweep_invocation(args)}"
    by_quantifier: dict[str, list[ResultRecord]] = {q: [] for q in config.quantifiers}
    n_failed = 0
    for record in run_sweep(config, threads=args.threads):
        by_quantifier[record.quantifier].append(record)
        if not record.ok:
            n_failed += 1
            print(f"{PROG}: diagnostic: {record.quantifier} {record.point}: {record.error}", file=sys.stderr)

    try:
        os.makedirs(args.out, exist_ok=True)
        for quantifier, records in by_quantifier.items():
            path = os.path.join(args.out, f"{quantifier}.{args.format}")
            buf = io.StringIO()
            WRITERS[args.format](records, quantifier, buf, invocation)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
            print(path, file=sys.stderr)
    except OSError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    if n_failed:
        print(f"{PROG}: {n_failed} diagnostic record(s) written", file=sys.stderr)
    return 0


def cmd_quantify(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    _validate_common(parser, args)
    try:
        if args.family == PQC:
            if args.topology is None or args.layers is None:
                parser.error("--family pqc needs --topology and --layers")
            if args.gates is not None:
                parser.error("--gates applies to --family g3 only")
            point = pqc_point(args.qubits, args.topology, args.layers)
        elif args.family == G3:
            if args.gates is None:
                parser.error("--family g3 needs --gates")
            if args.topology is not None or args.layers is not None:
                parser.error("--family g3 takes --gates, not --topology/--layers")
            point = g3_point(args.qubits, args.gates)
        else:
            if not 2 <= args.qubits <= 24:
                raise ValueError(f"n_qubits must be in [2, 24], got {args.qubits}")
            point = haar_point(args.qubits)
    except ValueError as exc:
        parser.error(str(exc))

    set_threads(args.threads)
    record = evaluate_point(point, args.quantifier, args.samples, args.seed, args.bins)
    WRITERS[args.format]([record], args.quantifier, sys.stdout, f"{PROG} {quantify_invocation(args)}")
    if not record.ok:
        print(f"{PROG}: error: {record.error}", file=sys.stderr)
        return 1
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if args.command == "sweep":
        return cmd_sweep(parser, args)
    return cmd_quantify(parser, args)


if __name__ == "__main__":
    sys.exit(main())

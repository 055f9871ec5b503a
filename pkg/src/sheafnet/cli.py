"""``sheafnet`` command line: one binary, one subcommand per pipeline stage.

Exit codes: 0 ok, 2 bad input or usage, 3 enumeration cap exceeded,
4 ``--assert`` failed. Errors are a single ``sheafnet: error: ...`` line on
stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from collections.abc import Sequence
from pathlib import Path

from sheafnet import __version__
from sheafnet import complex as cx
from sheafnet.activation import DEFAULT_CAP, enumerate_global_sections, sections_to_json
from sheafnet.errors import EnumerationCapError, SheafNetError
from sheafnet.geometry import (
    interference_complex,
    link_complex,
    random_network,
    read_nodes_csv,
    write_nodes_csv,
)
from sheafnet.homology import DEFAULT_MAX_K, cohomology_report, lh_averages, lh_field, read_lh_csv, write_lh_csv
from sheafnet.traffic import (
    DEFAULT_BINS,
    DEFAULT_TOP_PERCENT,
    correlate,
    forwarding_stats,
    ingest_trace,
    simulate,
    write_trace_csv,
)

EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_ASSERT = 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT) -> None:
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # one line, not usage + message
        raise CliError(f"usage: {self.prog}: {message}")


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise argparse.ArgumentTypeError(f"no such file: {path}")
    return p


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _dump_json(obj: object) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load_complex(path: Path) -> cx.Complex:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return cx.from_json(obj)


def cmd_gen(args: argparse.Namespace) -> int:
    net = random_network(args.count, args.area, args.radius, args.seed)
    buf = io.StringIO()
    write_nodes_csv(net, buf)
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_complex(args: argparse.Namespace) -> int:
    net = read_nodes_csv(args.nodes)
    X = link_complex(net) if args.kind == "link" else interference_complex(net)
    _emit(cx.dumps(X), args.out)
    counts = " ".join(f"dim{k}={n}" for k, n in enumerate(X.counts()))
    print(f"{args.kind} complex: {counts} facets={len(cx.facets(X))}", file=sys.stderr)
    return 0


def cmd_lh(args: argparse.Namespace) -> int:
    X = _load_complex(args.complex)
    scores = lh_field(X, args.max_k)
    buf = io.StringIO()
    write_lh_csv(scores, buf, args.max_k)
    _emit(buf.getvalue(), args.out)
    for k in range(args.max_k + 1):
        avg = lh_averages(scores, k)
        print(f"mean lh{k}: nodes={avg['nodes']} cells={avg['cells']}", file=sys.stderr)
    return 0


def cmd_sections(args: argparse.Namespace) -> int:
    X = _load_complex(args.complex)
    sections = enumerate_global_sections(X, cap=args.cap)
    _emit(_dump_json(sections_to_json(sections)), args.out)
    return 0


def cmd_sim(args: argparse.Namespace) -> int:
    net = read_nodes_csv(args.nodes)
    trace = simulate(net, args.packets, args.seed)
    buf = io.StringIO()
    write_trace_csv(trace, buf)
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_correlate(args: argparse.Namespace) -> int:
    scores = read_lh_csv(args.lh)
    nodes = [s.cell[0] for s in scores if len(s.cell) == 1]
    if not any(s.lh.get(1) is not None for s in scores):
        raise CliError(f"{args.lh}: no lh1 column")
    trace = ingest_trace(args.trace, nodes=nodes)
    stats = forwarding_stats(trace, nodes=nodes)
    report = correlate(stats, scores, bins=args.bins, top_percent=args.top_percent)
    _emit(_dump_json(report.to_json()), args.out)
    if args.assert_flag and not report.top_bin_all_high_lh:
        raise CliError("assertion failed: a top forwarder has lh1 = 0", EXIT_ASSERT)
    return 0


def cmd_cohomology(args: argparse.Namespace) -> int:
    X = _load_complex(args.complex)
    _emit(_dump_json(cohomology_report(X)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sheafnet", description="Activation sheaves and local homology of wireless networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, func, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("--version", action="version", version=f"sheafnet {__version__}")
        p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
        p.set_defaults(func=func)
        return p

    p = add("gen", cmd_gen, "write a random geometric node CSV")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--area", type=float, required=True, help="side of the square region, meters")
    p.add_argument("--radius", type=float, required=True, help="coverage radius, meters")
    p.add_argument("--seed", type=int, required=True)

    p = add("complex", cmd_complex, "build a link or interference complex from a node CSV")
    p.add_argument("--nodes", type=_existing, required=True)
    p.add_argument("--kind", choices=("link", "interference"), default="link")

    p = add("lh", cmd_lh, "local homology of every cell as CSV")
    p.add_argument("--complex", type=_existing, required=True)
    p.add_argument("--max-k", type=int, default=DEFAULT_MAX_K)

    p = add("sections", cmd_sections, "enumerate global sections of the activation sheaf")
    p.add_argument("--complex", type=_existing, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="refuse complexes with more nodes")

    p = add("sim", cmd_sim, "simulate shortest-path traffic and write a trace CSV")
    p.add_argument("--nodes", type=_existing, required=True)
    p.add_argument("--packets", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    p = add("correlate", cmd_correlate, "relate forwarding load to lh1")
    p.add_argument("--lh", type=_existing, required=True)
    p.add_argument("--trace", type=_existing, required=True)
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.add_argument("--top-percent", type=float, default=DEFAULT_TOP_PERCENT)
    p.add_argument("--assert", dest="assert_flag", action="store_true",
                   help="exit 4 unless every top forwarder has lh1 >= 1")

    p = add("cohomology", cmd_cohomology, "cohomology of the vector activation sheaf")
    p.add_argument("--complex", type=_existing, required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "max_k", 0) < 0:
            raise CliError("--max-k must be non-negative")
        return args.func(args)
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except EnumerationCapError as exc:
        code, msg = EXIT_CAP, str(exc)
    except (SheafNetError, ValueError, OSError) as exc:
        code, msg = EXIT_INPUT, str(exc)
    print(f"sheafnet: error: {' '.join(msg.split())}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

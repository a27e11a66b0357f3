"""Command-line sweeps and reports, emitted as deterministic CSV.

Every subcommand writes plain CSV (comma separators, ``\\n`` line ends,
a trailing newline) to stdout or ``--out``.  Numeric cells use Python's
``str()`` — the shortest round-trip form — so a rerun with identical
arguments is byte-identical.  Exit codes: 0 on success, 1 for bad input
(arguments, domains, parse failures), 2 for I/O failures.

Error sweeps fan out across a thread pool; cap it with the
``MOA_LAB_THREADS`` environment variable (results are gathered in cell
order, so the cap never changes the output).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .adders import AdderSpec, Exhaustive, MonteCarlo, mred
from .cost import (
    CostModel,
    DEFAULT_COST_MODEL,
    cost_binary_adder,
    cost_serial_moa,
    cost_tree_shape,
    load_cost_model,
)
from .errors import InputDomainError
from .layer import (
    LayerShape,
    SerialArch,
    TreeArch,
    load_weight_file,
    map_layer,
    operand_stats,
)
from .scm import csd_recode
from .serial import DEFAULT_BASE_FREQ_HZ, SerialMoaConfig
from .tree import ExactAll, UniformRatio, approx_bits_for, level_specs

DEFAULT_SAMPLE_COUNT = 100_000
DEFAULT_RATIOS = (0.0, 0.125, 0.25, 0.375, 0.5)

Row = tuple


def thread_cap() -> int:
    """Worker count for sweep fan-out, honoring MOA_LAB_THREADS."""
    raw = os.environ.get("MOA_LAB_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        cap = int(raw)
    except ValueError:
        raise InputDomainError(
            f"MOA_LAB_THREADS must be a positive integer, got {raw!r}"
        ) from None
    if cap < 1:
        raise InputDomainError(f"MOA_LAB_THREADS must be >= 1, got {cap}")
    return cap


@dataclass(frozen=True)
class SweepSpec:
    """Grid for the error/cost sweeps; empty axes are rejected at use."""

    bitwidths: tuple[int, ...] = ()
    ratios: tuple[float, ...] = ()
    cluster_sizes: tuple[int, ...] = ()
    seed: int = 0
    sample_count: int = DEFAULT_SAMPLE_COUNT
    exhaustive: bool = False
    operand_width: int = 8
    base_freq_hz: float = DEFAULT_BASE_FREQ_HZ

    def __post_init__(self):
        for ratio in self.ratios:
            if not 0.0 <= ratio <= 1.0:
                raise InputDomainError(f"ratio must be in [0, 1], got {ratio}")
        if self.sample_count < 1:
            raise InputDomainError(
                f"sample_count must be >= 1, got {self.sample_count}"
            )


def _map_cells(func, cells: list) -> list:
    cap = min(thread_cap(), len(cells))
    if cap <= 1:
        return [func(cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        return list(pool.map(func, cells))


def mred_sweep_rows(
    spec: SweepSpec, model: CostModel = DEFAULT_COST_MODEL
) -> tuple[tuple[str, ...], list[Row]]:
    """One row per (width, ratio): mean relative error and adder ALM cost."""
    if not spec.bitwidths:
        raise InputDomainError("mred sweep needs at least one bit width")
    if not spec.ratios:
        raise InputDomainError("mred sweep needs at least one ratio")
    sampling = (
        Exhaustive()
        if spec.exhaustive
        else MonteCarlo(spec.sample_count, spec.seed)
    )

    def cell(point: tuple[int, float]) -> Row:
        width, ratio = point
        low = approx_bits_for(UniformRatio(ratio), 1, width)
        adder = AdderSpec(width, low)
        return (
            width,
            ratio,
            low,
            mred(adder, sampling),
            cost_binary_adder(adder, model).alm_total,
        )

    cells = [(w, r) for w in spec.bitwidths for r in spec.ratios]
    header = ("width_bits", "ratio", "approx_low_bits", "mred", "alm_cost")
    return header, _map_cells(cell, cells)


def serial_cost_rows(
    spec: SweepSpec, model: CostModel = DEFAULT_COST_MODEL
) -> tuple[tuple[str, ...], list[Row]]:
    """Serializer/accumulator cost vs. the tree it replaces, per cluster size."""
    if not spec.cluster_sizes:
        raise InputDomainError("serial cost sweep needs at least one cluster size")
    header = (
        "cluster_size",
        "serializer_alm",
        "accumulator_alm",
        "serial_total_alm",
        "tree_alm",
        "fast_clock_mhz",
    )
    rows: list[Row] = []
    for cluster in spec.cluster_sizes:
        config = SerialMoaConfig(cluster, spec.operand_width, spec.base_freq_hz)
        parts = cost_serial_moa(config, model).breakdown
        tree_alm = cost_tree_shape(cluster, spec.operand_width, ExactAll(), model)
        rows.append(
            (
                cluster,
                parts["serializer"],
                parts["accumulator"],
                parts["serializer"] + parts["accumulator"],
                tree_alm.alm_total,
                config.fast_freq_hz / 1e6,
            )
        )
    return header, rows


def tree_build_rows(
    n: int,
    operand_width: int,
    ratio: float,
    model: CostModel = DEFAULT_COST_MODEL,
) -> tuple[tuple[str, ...], list[Row]]:
    header = ("level", "adders", "width_bits", "approx_low_bits", "alm")
    rows: list[Row] = []
    for level, (count, spec) in enumerate(
        level_specs(n, operand_width, UniformRatio(ratio)), start=1
    ):
        alm = count * cost_binary_adder(spec, model).alm_total
        rows.append((level, count, spec.width, spec.approx_low_bits, alm))
    return header, rows


def scm_rows(constant: int) -> tuple[tuple[str, ...], list[Row]]:
    net = csd_recode(constant)
    terms = "".join(
        f"{'+' if term.sign > 0 else '-'}2^{term.shift}"
        for term in sorted(net.terms, key=lambda t: -t.shift)
    )
    header = ("constant", "terms", "term_count", "adder_count")
    return header, [(constant, terms or "0", len(net.terms), net.adder_count)]


def write_csv(
    header: tuple[str, ...], rows: list[Row], out: Path | None
) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(str(cell) for cell in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def parse_int_list(text: str) -> tuple[int, ...]:
    """Parse ``"2,4,8"`` / ``"2-64"`` / mixtures of both into a tuple."""
    values: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise InputDomainError(f"empty entry in integer list {text!r}")
        lo, dash, hi = part.partition("-")
        try:
            if dash and lo:
                start, stop = int(lo), int(hi)
                if stop < start:
                    raise InputDomainError(f"descending range {part!r}")
                values.extend(range(start, stop + 1))
            else:
                values.append(int(part))
        except ValueError:
            raise InputDomainError(f"{part!r} is not an integer or range") from None
    return tuple(values)


def parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part.strip()) for part in text.split(","))
    except ValueError:
        raise InputDomainError(f"{text!r} is not a comma-separated float list") from None


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad arguments by default; our contract reserves
    # 2 for I/O failures, so route usage errors to exit code 1.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_model(args: argparse.Namespace) -> CostModel:
    if args.cost_model is None:
        return DEFAULT_COST_MODEL
    return load_cost_model(args.cost_model)


def _cmd_mred_sweep(args: argparse.Namespace) -> None:
    spec = SweepSpec(
        bitwidths=parse_int_list(args.bits),
        ratios=parse_float_list(args.ratios),
        seed=args.seed,
        sample_count=args.samples,
        exhaustive=args.exhaustive,
    )
    header, rows = mred_sweep_rows(spec, _load_model(args))
    write_csv(header, rows, args.out)


def _cmd_serial_cost(args: argparse.Namespace) -> None:
    spec = SweepSpec(
        cluster_sizes=parse_int_list(args.clusters),
        operand_width=args.width,
        base_freq_hz=_mhz_to_hz(args.f0_mhz),
    )
    header, rows = serial_cost_rows(spec, _load_model(args))
    write_csv(header, rows, args.out)


def _mhz_to_hz(mhz: float) -> float:
    if not mhz > 0:
        raise InputDomainError(f"base frequency must be > 0 MHz, got {mhz}")
    # Round to whole Hz so 27.6 MHz prints back as exactly 165.6 etc.
    return float(round(mhz * 1e6))


def _cmd_layer_report(args: argparse.Namespace) -> None:
    weights = load_weight_file(args.weights)
    n, c, j, k = weights.shape
    shape = LayerShape(n, c, j, k)
    if args.arch == "serial":
        arch = SerialArch(args.cluster_size, _mhz_to_hz(args.f0_mhz))
    else:
        arch = TreeArch()
    report = map_layer(
        shape,
        weights,
        policy=UniformRatio(args.ratio),
        arch=arch,
        model=_load_model(args),
        input_width=args.input_width,
        weight_width=args.weight_width,
    )
    if args.per_filter:
        header = (
            "filter",
            "operands",
            "adders",
            "depth",
            "scm_alm",
            "moa_alm",
            "moa_fraction",
        )
        rows: list[Row] = [
            (
                f.index,
                f.operand_count,
                f.adder_count,
                f.depth,
                f.scm_alm,
                f.moa_alm,
                f.moa_fraction,
            )
            for f in report.filters
        ]
    else:
        stats = operand_stats(weights)
        header = (
            "n_filters",
            "cjk",
            "n_opd_mean",
            "total_adders",
            "scm_alm",
            "moa_alm",
            "total_alm",
            "moa_fraction",
        )
        rows = [
            (
                shape.n_filters,
                stats.cjk,
                stats.n_opd_mean,
                report.total_adder_count,
                report.scm_alm,
                report.moa_alm,
                report.total_alm,
                report.moa_fraction,
            )
        ]
    write_csv(header, rows, args.out)


def _cmd_tree_build(args: argparse.Namespace) -> None:
    header, rows = tree_build_rows(args.n, args.width, args.ratio, _load_model(args))
    write_csv(header, rows, args.out)


def _cmd_scm(args: argparse.Namespace) -> None:
    header, rows = scm_rows(args.constant)
    write_csv(header, rows, args.out)


def _add_cost_model_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--cost-model",
        type=Path,
        default=None,
        metavar="FILE",
        help="key = value file overriding per-bit ALM coefficients",
    )


def _add_out_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--out", type=Path, default=None, metavar="FILE",
        help="write CSV here instead of stdout",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="moa-lab",
        description="Multi-operand adder error/cost sweeps for mapped CNN layers.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mred-sweep", help="mean relative error vs. approximation")
    p.add_argument("--bits", default="4,8,16", help="bit widths, e.g. 4,8,16 or 4-12")
    p.add_argument(
        "--ratios",
        default=",".join(str(r) for r in DEFAULT_RATIOS),
        help="approximated-fraction values in [0,1]",
    )
    p.add_argument("--seed", type=int, default=0, help="Monte-Carlo RNG seed")
    p.add_argument(
        "--samples", type=int, default=DEFAULT_SAMPLE_COUNT,
        help="Monte-Carlo operand pairs per cell",
    )
    p.add_argument(
        "--exhaustive", action="store_true",
        help="enumerate every operand pair (widths up to 12 bits only)",
    )
    _add_cost_model_arg(p)
    _add_out_arg(p)
    p.set_defaults(func=_cmd_mred_sweep)

    p = sub.add_parser("serial-cost", help="serializer/accumulator vs. tree cost")
    p.add_argument("--clusters", default="2-64", help="cluster sizes, e.g. 2-64")
    p.add_argument("--width", type=int, default=8, help="operand width in bits")
    p.add_argument(
        "--f0-mhz", type=float, default=27.6, help="base (frame) clock in MHz"
    )
    _add_cost_model_arg(p)
    _add_out_arg(p)
    p.set_defaults(func=_cmd_serial_cost)

    p = sub.add_parser("layer-report", help="map a weight file onto adder hardware")
    p.add_argument("weights", type=Path, help="weight file: 'N C J K' then values")
    p.add_argument("--input-width", type=int, default=8, help="feature bits")
    p.add_argument(
        "--weight-width", type=int, default=None,
        help="weight bits (default: narrowest fit)",
    )
    p.add_argument(
        "--ratio", type=float, default=0.0,
        help="fraction of each adder's low bits to approximate",
    )
    p.add_argument(
        "--arch", choices=("tree", "serial"), default="tree",
        help="multi-operand adder architecture",
    )
    p.add_argument(
        "--cluster-size", type=int, default=8,
        help="operands per serial cluster (serial arch only)",
    )
    p.add_argument(
        "--f0-mhz", type=float, default=27.6, help="base clock in MHz (serial arch)"
    )
    p.add_argument(
        "--per-filter", action="store_true",
        help="one row per filter instead of the layer summary",
    )
    _add_cost_model_arg(p)
    _add_out_arg(p)
    p.set_defaults(func=_cmd_layer_report)

    p = sub.add_parser("tree-build", help="per-level shape and cost of one tree")
    p.add_argument("--n", type=int, required=True, help="operand count")
    p.add_argument("--width", type=int, default=8, help="operand width in bits")
    p.add_argument(
        "--ratio", type=float, default=0.0,
        help="fraction of each adder's low bits to approximate",
    )
    _add_cost_model_arg(p)
    _add_out_arg(p)
    p.set_defaults(func=_cmd_tree_build)

    p = sub.add_parser("scm", help="canonical signed-digit recoding of a constant")
    p.add_argument("constant", type=int, help="multiplier constant")
    _add_out_arg(p)
    p.set_defaults(func=_cmd_scm)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse --help (0) or usage error (1)
        return int(exc.code or 0)
    try:
        args.func(args)
    except InputDomainError as exc:
        print(f"moa-lab: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"moa-lab: i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


def cli() -> None:
    raise SystemExit(main(sys.argv[1:]))

"""Command-line front end (``ghz-witness``).

Exit codes: 0 success, 1 usage error, 2 computation error, 3 failed verification.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import math
import sys
from typing import Iterator, Sequence, TextIO

import numpy as np

from . import oracle
from .errors import CapExceededError, ModelError, NoRootError, UnsupportedFrameError, WitnessError
from .models import critical_beta, ghz_critical_scaling, parse_model, scaling_exponent
from .modelfile import ModelSource, parse_source
from .optimize import OptimizerConfig, maximize_w_a, maximize_w_b
from .states import DEFAULT_DENSE_CAP, StabilizerThermalState, StateBackend
from .witness import StrataReport, _fmt, strata, w_b_fixed_frame

EXIT_USAGE, EXIT_COMPUTE, EXIT_VERIFY = 1, 2, 3
FIGURE_THRESHOLDS = (1.0, 2.0, 4.0, 8.0)
PURIFICATION_BETA = math.log(math.sqrt(2) + 1)
FIGURE_MODELS = ("ghz:5", "cluster:7")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def beta_grid(text: str) -> np.ndarray:
    """``start:stop:count`` with inclusive ends."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
    if count < 1 or start < 0 or stop < 0:
        raise argparse.ArgumentTypeError("need count >= 1 and non-negative beta")
    return np.linspace(start, stop, count)


def non_negative(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def size_range(text: str) -> list[int]:
    lo, _, hi = text.partition(":")
    try:
        return list(range(int(lo), int(hi or lo) + 1))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ghz-witness", description="GHZ-projector entanglement witnesses.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def optimizer_flags(p):
        p.add_argument("--restarts", type=int, default=None,
                       help="continuous restarts (default: 0 for stabilizer models, 8 otherwise)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cap", type=int, default=DEFAULT_DENSE_CAP, help="largest N for dense matrices")

    p = sub.add_parser("compute", help="witness values and strata for one state")
    p.add_argument("--model", required=True, help="ghz:N | cluster:N | ring:N | file:<path>")
    p.add_argument("--beta", type=non_negative)
    p.add_argument("--witness", choices=("wa", "wb", "both"), default="both")
    p.add_argument("--out", help="write a CSV row here")
    optimizer_flags(p)

    p = sub.add_parser("sweep", help="witness values over a beta grid (CSV)")
    p.add_argument("--model", required=True)
    p.add_argument("--beta-grid", type=beta_grid, required=True)
    p.add_argument("--witness", choices=("wa", "wb", "both"), default="both")
    p.add_argument("--out")
    optimizer_flags(p)

    p = sub.add_parser("figure1", help="ghz:5 and cluster:7 curves with threshold annotations (CSV)")
    p.add_argument("--beta-grid", type=beta_grid, default=beta_grid("0:5:51"))
    p.add_argument("--out")
    optimizer_flags(p)

    p = sub.add_parser("critical", help="solve for the critical inverse temperature")
    p.add_argument("--model", action="append", help="ghz:N | cluster:N | cluster-limit (repeatable)")
    p.add_argument("--witness", choices=("wa", "wb", "both"), default="both")
    p.add_argument("--threshold", type=float, default=1.0)
    p.add_argument("--scaling", type=size_range, help="GHZ sizes lo:hi; also report the log-log slope")
    p.add_argument("--out")

    p = sub.add_parser("wscan", help="recover the size of a hidden W state")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=oracle.SCAN_CONFIG.restarts)

    p = sub.add_parser("verify", help="run the brute-force verification suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-10, help=argparse.SUPPRESS)
    return parser


@contextlib.contextmanager
def _output(path: str | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise WitnessError(f"cannot write {path}: {exc.strerror}") from None
    with fh:
        yield fh


def _config(args, state: StateBackend) -> OptimizerConfig:
    restarts = args.restarts
    if restarts is None:
        restarts = 0 if isinstance(state, StabilizerThermalState) else 8
    return OptimizerConfig(restarts=restarts, seed=args.seed, cap=args.cap)


def evaluate(state: StateBackend, witness: str, config: OptimizerConfig) -> StrataReport:
    """Best-frame values for ``state``; the unsearched value is taken at the searched frame."""
    n = state.n_qubits
    if witness == "wb":
        return strata(maximize_w_b(state, config).value, n)
    wa_result = maximize_w_a(state, config)
    if witness == "wa":
        wb = w_b_fixed_frame(state, wa_result.frame, config.cap)
    else:
        wb = maximize_w_b(state, config).value
    return strata(wa_result.value, n, value_wb=wb)


def _source(args) -> ModelSource:
    try:
        return parse_source(args.model, args.cap)
    except (ModelError, ValueError, FileNotFoundError) as exc:
        raise UsageError(str(exc)) from None


def cmd_compute(args) -> int:
    source = _source(args)
    try:
        state = source.state(args.beta)
    except (ModelError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    report = evaluate(state, args.witness, _config(args, state))
    print(f"model={source.name}")
    print(report.to_record())
    if args.out:
        with _output(args.out) as fh:
            fh.write(report.to_csv())
    return 0


SWEEP_HEADER = [
    "beta", "model", "W_A", "W_B", "W_C",
    "min_entangled_qubits", "min_partiteness", "multi_setting_wwzb_violated",
]


def cmd_sweep(args) -> int:
    source = _source(args)
    rows = []
    for beta in args.beta_grid:
        state = source.state(float(beta))
        r = evaluate(state, args.witness, _config(args, state))
        rows.append([_fmt(float(beta)), source.name, _fmt(r.value_wa), _fmt(r.value_wb), _fmt(r.value_wc),
                     r.min_entangled_qubits, r.min_partiteness, _fmt(r.multi_setting_wwzb_violated)])
    with _output(args.out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        writer.writerows(rows)
    return 0


FIGURE_HEADER = ["beta", "model", "W_A", "W_B", "W_A_pipeline", "W_B_pipeline", "thresholds_crossed"]


def figure1_rows(grid: Sequence[float], restarts: int = 0, seed: int = 0, cap: int = DEFAULT_DENSE_CAP) -> list[list]:
    """Closed-form curves, pipeline values, then annotation rows (``hline``/``vline``)."""
    rows = []
    config = OptimizerConfig(restarts=restarts, seed=seed, cap=cap)
    for name in FIGURE_MODELS:
        model, source = parse_model(name), parse_source(name)
        for beta in grid:
            beta = float(beta)
            wa, wb = model.value(beta, "wa"), model.value(beta, "wb")
            state = source.state(beta)
            pa, pb = maximize_w_a(state, config).value, maximize_w_b(state, config).value
            crossed = ";".join(f"{t:g}" for t in FIGURE_THRESHOLDS if wa > t)
            rows.append([_fmt(beta), name, _fmt(wa), _fmt(wb), _fmt(pa), _fmt(pb), crossed])
    for t in FIGURE_THRESHOLDS:
        rows.append(["", "hline", _fmt(t), "", "", "", ""])
    rows.append([_fmt(PURIFICATION_BETA), "vline", "", "", "", "", ""])
    return rows


def cmd_figure1(args) -> int:
    rows = figure1_rows(args.beta_grid, args.restarts or 0, args.seed, args.cap)
    with _output(args.out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIGURE_HEADER)
        writer.writerows(rows)
    return 0


def cmd_critical(args) -> int:
    names = args.model or ["cluster-limit"]
    kinds = ["wa", "wb"] if args.witness == "both" else [args.witness]
    models = []
    for name in names:
        try:
            models.append(parse_model(name))
        except (ModelError, ValueError) as exc:
            raise UsageError(str(exc)) from None
    failed = False
    with _output(args.out) as fh:
        fh.write("model,kind,threshold,beta_crit\n")
        for model in models:
            for kind in kinds:
                try:
                    value = f"{critical_beta(model, kind, args.threshold):.6f}"
                except NoRootError as exc:
                    value, failed = f"no-root ({exc})", True
                fh.write(f"{model.name},{kind},{args.threshold:g},{value}\n")
        if args.scaling:
            for kind in kinds:
                points = ghz_critical_scaling(args.scaling, kind)
                fh.write(f"# ghz {kind} slope of log tanh(beta_crit/2) vs log N: {scaling_exponent(points):.6f}\n")
    return EXIT_COMPUTE if failed else 0


def cmd_wscan(args) -> int:
    if not 2 <= args.m <= args.n <= oracle.ORACLE_CAP:
        raise UsageError(f"need 2 <= m <= n <= {oracle.ORACLE_CAP}")
    config = OptimizerConfig(**{**oracle.SCAN_CONFIG.__dict__, "restarts": args.restarts, "seed": args.seed})
    result = oracle.w_state_scan(args.m, args.n, args.seed, config)
    print(f"positions={','.join(map(str, result.positions))}")
    print(f"full_value={_fmt(result.full_value)}")
    print("leave_one_out=" + ",".join(_fmt(v) for v in result.values))
    print(f"estimate={result.estimate}")
    print(f"low_confidence={_fmt(result.low_confidence)}")
    return 0


def cmd_verify(args) -> int:
    report = oracle.default_verification(seed=args.seed, tol=args.tolerance)
    print(report.text())
    return 0 if report.passed else EXIT_VERIFY


COMMANDS = {
    "compute": cmd_compute,
    "sweep": cmd_sweep,
    "figure1": cmd_figure1,
    "critical": cmd_critical,
    "wscan": cmd_wscan,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ghz-witness: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapExceededError, UnsupportedFrameError, NoRootError, WitnessError, ValueError) as exc:
        print(f"ghz-witness: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())

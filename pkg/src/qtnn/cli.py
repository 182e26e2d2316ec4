"""Command-line harness: ``train``, ``sweep`` and ``prep-dump``.

Worker processes for ``sweep`` are taken from ``QTNN_WORKERS`` (default 1).
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from qtnn.boolean_core import (
    ArityError,
    BooleanFunction,
    ParseError,
    anf_from_truth_table,
    format_anf,
    parse_function,
    word_to_str,
)
from qtnn.learner import (
    IDEAL,
    SAMPLED,
    SOURCES,
    QtMode,
    UnsupportedModeError,
    default_max_updates,
    train,
)
from qtnn.state_prep import DIRECTIONS, prepare, ranking

STATEVECTOR_LIMIT = 12
SWEEP_ARITIES = (2, 3, 4)
CSV_HEADER = ["function_index", "mode", "trials", "mean_updates", "mean_error_rate", "convergence_fraction"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2


class CliError(Exception):
    pass


def _policy(text: str):
    if text in ("paper", "exact"):
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"policy must be paper, exact or a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("fixed shot count must be >= 1")
    return value


def make_mode(kind: str, n: int, seed: int = 0, policy="exact", source=None, mask_depth=None, floor=False) -> QtMode:
    if kind == IDEAL:
        return QtMode.ideal(source=source, simulate=n <= STATEVECTOR_LIMIT)
    return QtMode.sampled(policy=policy, seed=seed, source=source, mask_depth=mask_depth, floor_rounding=floor)


def trial_seed(seed_base: int, function_index: int, trial: int) -> int:
    """Independent, reproducible seed for one trial of one function."""
    ss = np.random.SeedSequence(seed_base, spawn_key=(function_index, trial))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _fmt(x: float) -> str:
    return format(x, ".6g")


# ---------------------------------------------------------------------------
# train


def cmd_train(args, out=sys.stdout) -> int:
    try:
        f = parse_function(args.function, args.n)
    except (ParseError, ArityError) as exc:
        raise CliError(str(exc)) from exc
    mode = make_mode(args.mode, args.n, args.seed, args.policy, args.source, args.mask_depth, args.floor)
    try:
        report = train(f, mode, args.max_updates)
    except UnsupportedModeError as exc:
        raise CliError(str(exc)) from exc
    n = args.n
    print(f"target: {f.bitstring()} ({format_anf(anf_from_truth_table(f))})", file=out)
    print(f"mode: {args.mode}", file=out)
    for k, e in enumerate(report.error_sets):
        words = ",".join(word_to_str(x, n) for x in sorted(e)) or "-"
        print(f"E({k}) = {{{words}}}", file=out)
    print(f"updates: {report.updates}", file=out)
    print(f"config: {report.final_config.serialize()}", file=out)
    print(f"anf: {format_anf(report.learned_anf)}", file=out)
    print(f"error_rate: {_fmt(report.error_rate)}", file=out)
    if report.shots_per_update:
        print(f"shots: {sum(report.shots_per_update)}", file=out)
    print("converged" if report.converged else "not converged", file=out)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


# ---------------------------------------------------------------------------
# sweep


@dataclass(frozen=True)
class SweepRow:
    function_index: int
    mode: str
    trials: int
    mean_updates: float
    mean_error_rate: float
    convergence_fraction: float

    def as_csv(self) -> list[str]:
        return [
            str(self.function_index),
            self.mode,
            str(self.trials),
            _fmt(self.mean_updates),
            _fmt(self.mean_error_rate),
            _fmt(self.convergence_fraction),
        ]


@dataclass(frozen=True)
class _Job:
    n: int
    function_index: int
    kind: str
    trials: int
    seed_base: int
    policy: object
    max_updates: int


def _run_job(job: _Job) -> SweepRow:
    f = BooleanFunction.from_index(job.n, job.function_index)
    updates = errors = converged = 0
    for t in range(job.trials):
        mode = make_mode(job.kind, job.n, trial_seed(job.seed_base, job.function_index, t), job.policy)
        r = train(f, mode, job.max_updates)
        updates += r.updates
        errors += r.error_rate
        converged += r.converged
    return SweepRow(
        job.function_index, job.kind, job.trials, updates / job.trials, errors / job.trials, converged / job.trials
    )


def sweep_indices(n: int, sample: int, seed_base: int) -> list[int]:
    count = 1 << (1 << n)
    if n <= 3:
        return list(range(count))
    rng = np.random.default_rng(np.random.SeedSequence(seed_base, spawn_key=(n,)))
    chosen = set()
    while len(chosen) < min(sample, count):
        chosen.add(int(rng.integers(0, count)))
    return sorted(chosen)


def run_sweep(n, modes, trials, seed_base=0, policy="exact", sample=100, max_updates=None, workers=1) -> list[SweepRow]:
    if n not in SWEEP_ARITIES:
        raise CliError(f"sweep supports n in {SWEEP_ARITIES}, got {n}")
    if trials < 1:
        raise CliError("trials must be >= 1")
    max_updates = max_updates or default_max_updates(n)
    jobs = [
        _Job(n, idx, kind, trials, seed_base, policy, max_updates)
        for idx in sweep_indices(n, sample, seed_base)
        for kind in modes
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_job, jobs, chunksize=8))
    else:
        rows = [_run_job(j) for j in jobs]
    return sorted(rows, key=lambda r: (r.function_index, r.mode))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.as_csv())
    return buf.getvalue()


def _workers() -> int:
    raw = os.environ.get("QTNN_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise CliError(f"QTNN_WORKERS must be an integer, got {raw!r}")


def cmd_sweep(args, out=sys.stdout) -> int:
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    for m in modes:
        if m not in (IDEAL, SAMPLED):
            raise CliError(f"unknown mode {m!r}")
    rows = run_sweep(
        args.n, modes, args.trials, args.seed_base, args.policy, args.functions, args.max_updates, _workers()
    )
    text = rows_to_csv(rows)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# prep-dump

PREP_MAX_N = 8


def cmd_prep_dump(args, out=sys.stdout) -> int:
    n = args.n
    if not 1 <= n <= PREP_MAX_N:
        raise CliError(f"prep-dump supports 1 <= n <= {PREP_MAX_N}, got {n}")
    circuit, state = prepare(n, args.direction)
    p = ranking(n).p
    total = 2 ** (2**n) - 1
    print(f"# preparation circuit n={n} direction={args.direction}", file=out)
    if circuit.dump():
        print(circuit.dump(), file=out)
    print(f"# {len(circuit.rotation)} rotation gates, {len(circuit.permutation)} permutation gates", file=out)
    print("# word rank amplitude weight", file=out)
    amps = state.amps[0::2]
    for x in sorted(range(1 << n), key=lambda x: p[x]):
        weight = amps[x] ** 2 * total
        print(f"{word_to_str(x, n)} {p[x]} {amps[x]:.12f} {weight:.6g}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtnn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train one network and print its trace")
    t.add_argument("-n", type=int, required=True, help="number of input bits")
    t.add_argument("-f", "--function", required=True, help="truth table (x=0..2^n-1) or ANF such as x0^x1.x2")
    t.add_argument("--mode", choices=(IDEAL, SAMPLED), default=IDEAL)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--policy", type=_policy, default="exact", help="paper, exact or a fixed shot count")
    t.add_argument("--source", choices=SOURCES, default=None)
    t.add_argument("--mask-depth", type=int, default=None)
    t.add_argument("--floor", action="store_true", help="floor instead of nearest rounding when decoding")
    t.add_argument("--max-updates", type=int, default=None)
    t.set_defaults(handler=cmd_train)

    s = sub.add_parser("sweep", help="train every function of n inputs and write a CSV summary")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--modes", default="ideal,sampled", help="comma-separated: ideal, sampled")
    s.add_argument("--seed-base", type=int, default=0)
    s.add_argument("--policy", type=_policy, default="exact")
    s.add_argument("--functions", type=int, default=100, help="functions sampled when n=4")
    s.add_argument("--max-updates", type=int, default=None)
    s.add_argument("-o", "--output", default=None, help="CSV path (default stdout)")
    s.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("prep-dump", help="print a state-preparation circuit and its amplitudes")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--direction", choices=DIRECTIONS, default="down")
    p.set_defaults(handler=cmd_prep_dump)
    return parser


def main(argv=None, out=sys.stdout) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "max_updates", None) is not None and args.max_updates < 1:
        print("error: --max-updates must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.handler(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

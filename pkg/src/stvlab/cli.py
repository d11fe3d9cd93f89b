"""Command line front end: gen, solve, experiment, fit.

Exit codes for solve encode the verdict (0 manipulable, 1 not, 2 budget
exhausted); any usage problem exits 3 and runtime failures exit 4, so shell
pipelines can branch on manipulability safely.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .core import MAX_INDEX, TieRule
from .experiments import (
    GridConfig,
    POWERS_OF_TWO,
    fit_exponential,
    run_grid,
    summarize,
)
from .fileio import (
    read_profile_file,
    read_results_csv,
    write_profile_file,
)
from .solver import (
    Decision,
    ManipulationInstance,
    SearchLimits,
    manipulate_single,
)
from .votegen import IC, Resample, Urn, rng_from_seed, sample
from . import fileio

USAGE_ERROR = 3
RUNTIME_ERROR = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _fresh_seed() -> int:
    return int.from_bytes(os.urandom(8), "little")


def _tie_rule(name: str, seed: int) -> TieRule:
    return MAX_INDEX if name == "maxindex" else TieRule.seeded(seed)


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")


def _distribution(args, parser):
    if args.dist == "ic":
        return IC()
    if args.dist == "urn":
        return Urn(args.b if args.b is not None else 1.0)
    if args.base is None:
        parser.error("--dist resample requires --base <profile file>")
    base_profile = read_profile_file(args.base)
    from .votegen import BaseProfile

    return Resample(BaseProfile(base_profile, Path(args.base).stem))


def _cmd_gen(args, parser) -> int:
    seed = args.seed if args.seed is not None else _fresh_seed()
    dist = _distribution(args, parser)
    profile = sample(dist, args.m, args.n, rng_from_seed(seed))
    write_profile_file(args.out, profile, comment=f"seed={seed}")
    print(f"seed={seed}", file=sys.stderr)
    print(f"wrote {args.out}: m={profile.m}, {len(profile.ballots)} ballots")
    return 0


def _cmd_solve(args, parser) -> int:
    if args.base is None:
        parser.error("solve requires --base <profile file>")
    fixed = read_profile_file(args.base)
    seed = args.seed if args.seed is not None else 0
    instance = ManipulationInstance(
        fixed, args.weight, args.pref, _tie_rule(args.tie, seed)
    )
    limits = SearchLimits(max_nodes=args.max_nodes)
    result = manipulate_single(instance, limits)
    print(f"verdict: {result.decision.value}")
    if result.witness is not None:
        print("witness: " + ">".join(str(c) for c in result.witness.ranking))
    print(f"nodes: {result.nodes}")
    print(f"time_ms: {result.elapsed * 1e3:.2f}")
    if args.tie == "random":
        print(f"seed={seed}", file=sys.stderr)
    if result.decision is Decision.MANIPULABLE:
        return 0
    if result.decision is Decision.NOT_MANIPULABLE:
        return 1
    return 2


def _cmd_experiment(args, parser) -> int:
    seed = args.seed if args.seed is not None else _fresh_seed()
    dist = _distribution(args, parser)
    config = GridConfig(
        distribution=dist,
        m_values=tuple(args.m),
        n_values=tuple(args.n),
        trials=args.trials,
        manipulator_weight=args.weight,
        master_seed=seed,
        limits=SearchLimits(max_nodes=args.max_nodes),
        tie_rule=_tie_rule(args.tie, seed),
    )
    print(f"seed={seed}", file=sys.stderr)
    results = run_grid(
        config,
        csv_path=args.out,
        workers=args.workers,
        record_time=args.record_time,
        progress=True,
    )
    print(summarize(results, plot_dir=args.plot))
    print(f"wrote {args.out}")
    return 0


def _cmd_fit(args, parser) -> int:
    rows = read_results_csv(args.csv)
    series: dict[tuple, list] = {}
    for row in rows:
        key = (row["distribution"], row["b_param"], row["weight"], row["n"])
        series.setdefault(key, []).append(row)
    printed = 0
    for (dist, b_param, weight, n), group in sorted(
        series.items(), key=lambda kv: [str(k) for k in kv[0]]
    ):
        pts = [
            (row["m"], row["nodes_mean"])
            for row in group
            if row["nodes_mean"] is not None and row["nodes_mean"] > 0
        ]
        if len(pts) < 2:
            continue
        fit = fit_exponential(pts)
        b_str = f" b_param={b_param:g}" if b_param is not None else ""
        print(
            f"{dist}{b_str} weight={weight} n={n}: "
            f"a={fit.a:.6g} b={fit.b:.6g} r2={fit.r2:.6g} points={len(pts)}"
        )
        printed += 1
    if printed == 0:
        print("no series with at least two positive mean-node points", file=sys.stderr)
        return RUNTIME_ERROR
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="stvlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common_dist = dict(
        dist=(["--dist"], dict(choices=["ic", "urn", "resample"], default="ic")),
        b=(["--b"], dict(type=float, default=None, help="urn correlation parameter")),
        base=(["--base"], dict(default=None, help="base profile file")),
        seed=(["--seed"], dict(type=int, default=None)),
    )

    gen = sub.add_parser("gen", help="write a random profile file")
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    for flags, kw in common_dist.values():
        gen.add_argument(*flags, **kw)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    solve = sub.add_parser("solve", help="decide manipulability of a profile file")
    solve.add_argument("--base", required=True, help="fixed-votes profile file")
    solve.add_argument("--pref", type=int, required=True)
    solve.add_argument("--weight", type=int, default=1)
    solve.add_argument("--tie", choices=["maxindex", "random"], default="maxindex")
    solve.add_argument("--max-nodes", type=int, default=None)
    solve.add_argument("--seed", type=int, default=None)
    solve.set_defaults(func=_cmd_solve)

    exp = sub.add_parser("experiment", help="run a Monte-Carlo grid to CSV")
    exp.add_argument("--m", type=_int_list, default=list(POWERS_OF_TWO))
    exp.add_argument("--n", type=_int_list, default=list(POWERS_OF_TWO))
    for flags, kw in common_dist.values():
        exp.add_argument(*flags, **kw)
    exp.add_argument("--weight", type=int, default=1)
    exp.add_argument("--trials", type=int, default=1000)
    exp.add_argument("--tie", choices=["maxindex", "random"], default="maxindex")
    exp.add_argument("--max-nodes", type=int, default=10_000_000)
    exp.add_argument("--out", default="results.csv")
    exp.add_argument("--plot", default=None, help="directory for SVG charts")
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument(
        "--record-time",
        action="store_true",
        help="fill time_mean_ms with wall time (breaks byte-reproducibility)",
    )
    exp.set_defaults(func=_cmd_experiment)

    fit = sub.add_parser("fit", help="fit a*b**m to mean nodes per series")
    fit.add_argument("csv", help="results CSV from the experiment command")
    fit.set_defaults(func=_cmd_fit)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except BrokenPipeError:
        return RUNTIME_ERROR
    except (OSError, ValueError, fileio.ProfileParseError) as exc:
        print(f"stvlab: error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())

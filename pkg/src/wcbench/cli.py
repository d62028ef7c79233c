"""Command-line interface.

Subcommands: generate, explore, serve, build-bench, stats, eval.  Report
paths (stats, eval) write delimited output plus matplotlib figures.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import benchmark, explorer, generators, harness, service
from .equivalence import load_config
from .smtlib import serialize_canonical


def _cmd_generate(args) -> int:
    program = generators.get_program(args.program)
    print(serialize_canonical(generators.generate(program, args.n)))
    return 0


def _cmd_explore(args) -> int:
    toy = explorer.get_toy(args.program)
    wc = explorer.worst_case(toy, args.n)
    print(f"worst-case constraint: {serialize_canonical(wc.condition)}")
    print(f"cost: {wc.cost}")
    print("n\tfeasible_paths")
    for n, count in explorer.path_growth(toy, range(1, args.n + 1)):
        print(f"{n}\t{count}")
    if args.show_paths:
        for res in explorer.enumerate_paths(toy, args.n):
            print(f"cost={res.cost}\ttrace={''.join('T' if d else 'F' for d in res.trace)}"
                  f"\t{serialize_canonical(res.condition)}")
    return 0


def _cmd_serve(args) -> int:
    solver = load_config(args.solver_config)
    cfg = service.ServiceConfig(solver=solver,
                                strict_semantic_requires_template=args.strict)
    if args.mode == "http":
        print(f"serving on http://{args.bind}", file=sys.stderr)
    service.serve(args.mode, args.bind, cfg)
    return 0


def _cmd_build_bench(args) -> int:
    with open(args.config) as fh:
        raw = json.load(fh)
    cfg = benchmark.BuildConfig(
        programs=raw.get("programs", [p.name for p in generators.list_programs()]),
        tier_mix=raw.get("tier_mix", {"small": 10, "medium": 10, "large": 5}),
        token_budget=raw.get("token_budget", benchmark.DEFAULT_TOKEN_BUDGET),
        seed=raw.get("seed", 0),
    )
    report = benchmark.build_benchmark(cfg, args.out)
    print(f"emitted\t{report.emitted}")
    print(f"excluded\t{report.excluded}")
    for tier, count in report.per_tier.items():
        print(f"tier_{tier}\t{count}")
    return 0


def _cmd_stats(args) -> int:
    instances = benchmark.load_benchmark(args.infile)
    stats = benchmark.profile(instances)
    print(json.dumps(stats, indent=2))
    if args.out_dir:
        import os

        from .plots import render_profile_figures

        os.makedirs(args.out_dir, exist_ok=True)
        with open(f"{args.out_dir}/stats.json", "w") as fh:
            json.dump(stats, fh, indent=2)
        with open(f"{args.out_dir}/stats.tsv", "w") as fh:
            fh.write("metric\tvalue\n")
            fh.write(f"instances\t{stats['instances']}\n")
            for tier, d in stats["tiers"].items():
                fh.write(f"tier_{tier}_count\t{d['count']}\n")
                fh.write(f"tier_{tier}_percent\t{d['percent']}\n")
            for group in ("target_n", "examples_per_instance",
                          "question_tokens", "answer_tokens"):
                for k, v in stats[group].items():
                    fh.write(f"{group}_{k}\t{v}\n")
        for path in render_profile_figures(instances, args.out_dir):
            print(f"figure\t{path}")
    return 0


def _cmd_eval(args) -> int:
    instances = benchmark.load_benchmark(args.bench)
    solver = load_config(args.solver_config)
    if args.completions:
        source = harness.CompletionsFile(args.completions)
    elif args.endpoint_config:
        with open(args.endpoint_config) as fh:
            source = harness.ModelEndpoint(**json.load(fh))
    else:
        print("error: one of --completions / --endpoint-config is required",
              file=sys.stderr)
        return 2
    report = harness.run_eval(instances, source, trials=args.trials, cfg=solver)
    data = report.to_dict()
    print(f"instances\t{report.instances}")
    for i, acc in enumerate(report.trials, 1):
        print(f"trial_{i}\t{acc:.4f}")
    print(f"mean\t{report.mean:.4f}")
    print(f"stddev\t{report.stddev:.4f}")
    for tier, acc in report.per_tier.items():
        print(f"tier_{tier}\t{acc:.4f}")
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(data, fh, indent=2)
        import os

        fig_dir = args.figures_dir or os.path.dirname(os.path.abspath(args.report))
        from .plots import render_eval_figures

        for path in render_eval_figures(data, fig_dir):
            print(f"figure\t{path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wcbench",
        description="Worst-case path-constraint workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="print a ground-truth constraint")
    p.add_argument("--program", required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("explore", help="symbolically explore a toy program")
    p.add_argument("--program", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--show-paths", action="store_true")
    p.set_defaults(fn=_cmd_explore)

    p = sub.add_parser("serve", help="run the reward service")
    p.add_argument("--mode", choices=("http", "stdio"), default="http")
    p.add_argument("--bind", default="127.0.0.1:8841")
    p.add_argument("--solver-config", default=None)
    p.add_argument("--strict", action="store_true",
                   help="semantic reward additionally requires the template")
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("build-bench", help="build a tiered benchmark file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_build_bench)

    p = sub.add_parser("stats", help="profile a benchmark file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out-dir", default=None,
                   help="write stats.tsv/json and figures here")
    p.set_defaults(fn=_cmd_stats)

    p = sub.add_parser("eval", help="score completions against a benchmark")
    p.add_argument("--bench", required=True)
    p.add_argument("--completions", default=None)
    p.add_argument("--endpoint-config", default=None)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--report", default=None)
    p.add_argument("--figures-dir", default=None)
    p.add_argument("--solver-config", default=None)
    p.set_defaults(fn=_cmd_eval)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

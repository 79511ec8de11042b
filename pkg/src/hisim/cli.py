"""Command line entry point.

Exit codes: 0 success, 2 input error, 3 scale guard.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import benchmark
from .metrics import MetricWeights
from .pipeline import (
    ORACLE_LIMIT,
    PipelineConfig,
    ScaleGuardError,
    SimilarityCalculator,
    brute_force_oracle,
    config_dict,
    find_clusters,
    ingest,
    rankable,
    run,
    write_oracle_csv,
    write_report_csv,
    write_run,
)
from .synthetic import GeneratorSpec, generate_synthetic
from .wkt import IngestError, WktParseError, write_polygons

EXIT_OK, EXIT_INPUT, EXIT_SCALE = 0, 2, 3

log = logging.getLogger("hisim")


class InputError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_pipeline_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--source", required=True, type=Path)
    sp.add_argument("--target", required=True, type=Path)
    sp.add_argument("--top-fraction", type=float, default=0.1)
    sp.add_argument("--desired-recall", type=float, default=0.9)
    sp.add_argument("--sample-size", type=int, default=400)
    sp.add_argument("--class-size", type=int, default=160)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--weights", type=_floats, help="eight comma-separated metric weights summing to 1")
    sp.add_argument("--range-normalize", action="store_true", help="use (max - min) as the scaling denominator")
    sp.add_argument("--si-members", choices=("with-rep", "sources-only"), default="with-rep")
    sp.add_argument("--sampling", choices=("uniform", "pairs"), default="uniform")
    sp.add_argument("--out", required=True, type=Path)


def _config(args) -> PipelineConfig:
    try:
        weights = MetricWeights.from_sequence(args.weights) if args.weights else MetricWeights()
        return PipelineConfig(
            top_fraction=args.top_fraction,
            desired_recall=args.desired_recall,
            sample_size=args.sample_size,
            class_size=args.class_size,
            weights=weights,
            seed=args.seed,
            range_normalize=args.range_normalize,
            si_members=args.si_members,
            sampling=args.sampling,
            full_budget=getattr(args, "full_budget", False),
        )
    except ValueError as exc:
        raise InputError(f"invalid configuration: {exc}") from None


def _load(args):
    for p in (args.source, args.target):
        if not p.is_file():
            raise InputError(f"no such file: {p}")
    return ingest(args.source, args.target)


def _oracle(scan, si, args):
    return brute_force_oracle(
        rankable(scan.clusters, si), si, limit=args.oracle_limit, force=args.force
    )


def cmd_generate(args) -> int:
    try:
        spec = GeneratorSpec(
            n_targets=args.n_targets, high_fraction=args.high_fraction, noise=args.noise
        )
        sources, targets = generate_synthetic(spec, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    args.out.mkdir(parents=True, exist_ok=True)
    write_polygons(args.out / "sources.wkt", sources)
    write_polygons(args.out / "targets.wkt", targets)
    print(f"wrote {len(sources)} sources and {len(targets)} targets to {args.out}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    sources, targets = _load(args)
    scan = find_clusters(sources, targets, cfg)
    si = SimilarityCalculator.for_config(sources, targets, cfg)
    oracle = _oracle(scan, si, args) if args.with_oracle else None
    result = run(cfg, sources, targets, scan=scan, si=si, oracle=oracle)
    out = write_run(args.out, result, targets)
    with open(out / "config.json", "w") as fh:
        json.dump(config_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")
    m = result.metrics
    print(
        f"threshold={m['threshold']:.6f} max_size={m['max_size']} "
        f"checked={m['checked']}/{m['total_clusters']} links={len(result.links)}"
    )
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = _config(args)
    sources, targets = _load(args)
    scan = find_clusters(sources, targets, cfg)
    si = SimilarityCalculator.for_config(sources, targets, cfg)
    ranked = _oracle(scan, si, args)
    args.out.mkdir(parents=True, exist_ok=True)
    write_oracle_csv(args.out / "oracle.csv", ranked, targets)
    print(f"ranked {len(ranked)} clusters")
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = _config(args)
    sources, targets = _load(args)
    p_values = sorted(set(args.p_values))
    for p in p_values:
        if not 0.0 < p < 1.0:
            raise InputError(f"top fraction {p} outside (0, 1)")
    args.out.mkdir(parents=True, exist_ok=True)
    rep = benchmark.sweep(cfg, sources, targets, p_values, with_oracle=not args.no_oracle)
    write_report_csv(args.out / "report.csv", rep)
    for r in rep.rows:
        print(f"p={r.p:g} checked={r.checked_fraction:.4f} ratio={r.ratio:.3f} recall={r.achieved_recall}")
    return EXIT_OK


def cmd_bench(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    table = benchmark.time_kernels(args.n_pairs, args.repeats, args.seed)
    benchmark.write_timing_csv(args.out / "timing.csv", table)
    for t in table:
        print(f"{t.metric:14s} {t.mean_ns / 1e3:10.1f} us  (std {t.std_ns / 1e3:.1f})")
    if args.source or args.target:
        if not (args.source and args.target):
            raise InputError("--source and --target must be given together")
        sources, targets = _load(args)
    else:
        sources, targets = generate_synthetic(GeneratorSpec(n_targets=args.n_targets), args.seed)
    cfg = PipelineConfig(seed=args.seed)
    values = benchmark.cluster_si_values(
        cfg, sources, targets, limit=args.oracle_limit, force=args.force
    )
    counts = benchmark.si_histogram(values, limit=args.oracle_limit, force=args.force)
    benchmark.write_histogram_csv(args.out / "si_histogram.csv", counts)
    print("si histogram:", " ".join(str(int(c)) for c in counts))
    if args.p_values:
        rep = benchmark.sweep(replace(cfg), sources, targets, args.p_values)
        write_report_csv(args.out / "sweep.csv", rep)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hisim", description="Top-p cluster similarity search")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic source/target pair")
    g.add_argument("--n-targets", type=int, default=2000)
    g.add_argument("--high-fraction", type=float, default=0.1)
    g.add_argument("--noise", type=float, default=0.005)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, type=Path)
    g.set_defaults(func=cmd_generate)

    for name, func, text in (
        ("run", cmd_run, "run the full pipeline"),
        ("oracle", cmd_oracle, "rank every cluster by exact similarity index"),
        ("report", cmd_report, "sweep the pipeline over several top fractions"),
    ):
        sp = sub.add_parser(name, help=text)
        _add_pipeline_flags(sp)
        sp.add_argument("--oracle-limit", type=int, default=ORACLE_LIMIT)
        sp.add_argument("--force", action="store_true", help="lift the brute-force scale guard")
        sp.set_defaults(func=func)
        if name == "run":
            sp.add_argument("--full-budget", action="store_true", help="verify every cluster")
            sp.add_argument("--with-oracle", action="store_true", help="also report recall against brute force")
        if name == "report":
            sp.add_argument("--p-values", type=_floats, default=[0.1, 0.3, 0.5])
            sp.add_argument("--no-oracle", action="store_true")

    b = sub.add_parser("bench", help="kernel timings and SI histogram")
    b.add_argument("--n-pairs", type=int, default=200)
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--n-targets", type=int, default=500)
    b.add_argument("--source", type=Path)
    b.add_argument("--target", type=Path)
    b.add_argument("--p-values", type=_floats)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--oracle-limit", type=int, default=ORACLE_LIMIT)
    b.add_argument("--force", action="store_true")
    b.add_argument("--out", required=True, type=Path)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s"
    )
    try:
        return args.func(args)
    except (InputError, IngestError, WktParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ScaleGuardError as exc:
        print(f"error: {exc} (use --force to override)", file=sys.stderr)
        return EXIT_SCALE


if __name__ == "__main__":
    sys.exit(main())

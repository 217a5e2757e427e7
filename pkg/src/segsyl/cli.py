"""Command-line interface.

Exit status: 0 success, 1 usage error, 2 data or validation error
(including a failed harness invariant), 3 no complete path.
"""

from __future__ import annotations

import argparse
import sys

from segsyl import io
from segsyl.errors import NoCompletePathError, SegSylError
from segsyl.harness import SynthConfig, compare_strategies, gen_input, gen_synthetic_dictionary
from segsyl.recognizer import recognize
from segsyl.search import SearchStrategy, SynthesisGraph, count_compositions, enumerate_paths
from segsyl.stitching import MODELS, stitch

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NO_PATH = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _lengths(text: str) -> tuple[int, ...]:
    try:
        values = tuple(sorted({int(v) for v in text.split(",") if v.strip()}))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or values[0] < 1:
        raise argparse.ArgumentTypeError("lengths must be positive integers")
    return values


def _add_synth_args(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--syllables", type=int, default=12, help="dictionary size N")
    p.add_argument("--dim", type=int, default=1, help="parameters per frame P")
    p.add_argument("--lengths", type=_lengths, default=(2, 3, 4))
    p.add_argument("--frames-min", type=int, default=3)
    p.add_argument("--frames-max", type=int, default=6)


def _config(args, **extra) -> SynthConfig:
    return SynthConfig(
        seed=args.seed,
        syllable_count=args.syllables,
        parameter_dim=args.dim,
        lengths=args.lengths,
        frames_per_segment=(args.frames_min, args.frames_max),
        **extra,
    )


def cmd_gen_dict(args) -> int:
    dictionary = gen_synthetic_dictionary(_config(args))
    io.write_json(args.out, io.dictionary_to_doc(dictionary))
    print(f"wrote {len(dictionary)} syllables (P={dictionary.parameter_dim}, lengths {list(dictionary.lengths)}) to {args.out}")
    return EXIT_OK


def cmd_gen_input(args) -> int:
    dictionary = io.parse_dictionary_file(args.dict)
    segmented, truth = gen_input(dictionary, args.seed, args.count, args.noise)
    io.write_json(args.out, io.input_to_doc(segmented, truth))
    print(
        f"wrote input of {len(segmented.trajectory)} frames, {segmented.segment_count} segments "
        f"({' '.join(truth)}) to {args.out}"
    )
    return EXIT_OK


def cmd_recognize(args) -> int:
    dictionary = io.parse_dictionary_file(args.dict)
    segmented, truth = io.input_from_doc(io.read_json(args.input), args.input)
    result = recognize(segmented, dictionary, args.strategy, args.model)
    doc = io.report_document(result)
    if args.out:
        io.write_json(args.out, doc)
    if args.stitched_out:
        io.write_csv(args.stitched_out, result.stitched.stitched.frames)
    print(f"strategy {result.strategy.value}, model {result.model}")
    print(f"path     {result.path}")
    print(f"labels   {' '.join(result.labels)}")
    if truth is not None:
        print(f"truth    {' '.join(truth)}")
    print(f"d        {result.total_distance:.6g}  (per syllable: {', '.join(f'{d:.4g}' for d in result.per_syllable_distances)})")
    print(f"sigma2   {', '.join(f'{v:.6g}' for v in result.stitched.sigma2)}")
    if result.stitched.fallback_channels:
        print(f"fallback channels {list(result.stitched.fallback_channels)} (singular system)")
    stats = result.stats
    print(
        f"arcs evaluated {stats.arcs_evaluated}, nodes expanded {stats.nodes_expanded}, "
        f"wall {result.wall_time * 1e3:.2f} ms, DTW(X, X*) {result.info_distance:.6g}"
    )
    return EXIT_OK


def cmd_stitch(args) -> int:
    dictionary = io.parse_dictionary_file(args.dict)
    labels = [s for s in args.labels.split(",") if s]
    try:
        patterns = [dictionary.by_label(label) for label in labels]
    except KeyError as exc:
        raise SegSylError(f"unknown syllable label {exc.args[0]!r}") from None
    if not patterns:
        raise UsageError("--labels must name at least one syllable")
    st = stitch([p.trajectory for p in patterns], args.model)
    doc = {"labels": labels, **io.stitch_document(st)}
    if args.out:
        io.write_json(args.out, doc)
    if args.stitched_out:
        io.write_csv(args.stitched_out, st.stitched.frames)
    print(f"model {st.model}, {len(patterns)} syllables, {len(st.stitched)} frames")
    print(f"sigma2 {', '.join(f'{v:.6g}' for v in st.sigma2)}")
    if st.junction_residuals.size:
        print(f"max junction residual {st.junction_residuals.max():.3g}")
    if st.fallback_channels:
        print(f"fallback channels {list(st.fallback_channels)} (singular system)")
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _config(args, noise_sigma=args.noise)
    report = compare_strategies(cfg, args.instances, workers=args.workers)
    if args.out:
        io.write_json(args.out, report.to_dict(instances=args.per_instance))
    print(f"{report.instance_count} instances, {report.multi_path_instances} with >= 2 complete paths")
    print(f"{'strategy':8} {'mean d':>10} {'median d':>10} {'hops':>6} {'arcs':>7} {'expanded':>9} {'ms':>8} {'acc':>6}")
    for name, s in report.strategies.items():
        print(
            f"{name:8} {s.mean_cost:10.4g} {s.median_cost:10.4g} {s.mean_hops:6.2f} "
            f"{s.mean_arcs_evaluated:7.2f} {s.mean_nodes_expanded:9.2f} {s.mean_wall_time * 1e3:8.3f} {s.accuracy:6.3f}"
        )
    print(f"arc ratio vs full: dfs {report.mean_arc_ratio['dfs']:.3f}, bfs {report.mean_arc_ratio['bfs']:.3f}")
    b = report.bfs_vs_dfs
    print(
        f"bfs vs dfs: mean d {b['mean_cost_bfs']:.4g} vs {b['mean_cost_dfs']:.4g}; "
        f"bfs cheaper {b['bfs_cheaper']}, dfs cheaper {b['dfs_cheaper']}, ties {b['ties']}"
    )
    for name, m in report.models.items():
        slope = "" if m.mean_slope_residual is None else f", slope residual {m.mean_slope_residual:.3g}"
        print(
            f"{name:9} mean sigma2 {m.mean_sigma2:.4g}, junction residual {m.mean_junction_residual:.3g}"
            f"{slope}, DTW(X, X*) {m.mean_info_distance:.4g}, fallbacks {m.fallback_instances}"
        )
    return EXIT_OK


def cmd_enumerate(args) -> int:
    graph = SynthesisGraph(args.segments, args.lengths, lambda i, n: (0.0, None))
    paths = enumerate_paths(graph)
    count = count_compositions(args.segments, args.lengths)
    rows = []
    for nodes in paths:
        parts = [b - a for a, b in zip(nodes, nodes[1:])]
        rows.append({"nodes": list(nodes), "lengths": parts})
        print(f"{'-'.join(map(str, nodes))} ({'-'.join(map(str, parts))})")
    print(f"count {count}")
    if args.out:
        io.write_json(
            args.out,
            {"segments": args.segments, "lengths": list(args.lengths), "count": count, "paths": rows},
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="segsyl", description="Syllable recognition over segmented parameter trajectories.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-dict", help="write a seeded synthetic dictionary")
    _add_synth_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_dict)

    p = sub.add_parser("gen-input", help="write a seeded input built from dictionary syllables")
    p.add_argument("--dict", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=3, help="number of syllables to concatenate")
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian noise standard deviation")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_input)

    p = sub.add_parser("recognize", help="recognize an input and stitch the chosen syllables")
    p.add_argument("--dict", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--strategy", choices=[s.value for s in SearchStrategy], default="full")
    p.add_argument("--model", choices=MODELS, default="linear")
    p.add_argument("--out")
    p.add_argument("--stitched-out")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("stitch", help="stitch named dictionary syllables")
    p.add_argument("--dict", required=True)
    p.add_argument("--labels", required=True, help="comma-separated syllable labels, in order")
    p.add_argument("--model", choices=MODELS, default="linear")
    p.add_argument("--out")
    p.add_argument("--stitched-out")
    p.set_defaults(func=cmd_stitch)

    p = sub.add_parser("compare", help="compare search strategies on seeded synthetic instances")
    _add_synth_args(p)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--per-instance", action="store_true", help="include per-instance records in --out")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("enumerate", help="list every segmentation of p segments into allowed lengths")
    p.add_argument("--segments", type=int, required=True)
    p.add_argument("--lengths", type=_lengths, default=(2, 3, 4))
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)
    return parser


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"segsyl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoCompletePathError as exc:
        print(f"segsyl: {exc}", file=sys.stderr)
        return EXIT_NO_PATH
    except (SegSylError, ValueError) as exc:
        print(f"segsyl: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()

"""Seeded synthetic data and the search-strategy comparison experiment.

Random numbers come from numpy's ``default_rng`` (PCG64). Instance ``i`` of
an experiment draws from ``SeedSequence([seed, i])``, spawned into one child
for its dictionary and one for its input, so results do not depend on
execution order or on how many workers run.

Dictionary generation, per syllable ``k`` in order:

1. segment count ``n = lengths[rng.integers(len(lengths))]`` (lengths sorted),
2. for each segment, frame count ``m = rng.integers(lo, hi + 1)``,
3. coefficients ``rng.uniform(-1, 1, size=(4, P))`` of a cubic in
   ``t = linspace(0, 1, m)``, evaluated as ``c0 + c1*t + c2*t**2 + c3*t**3``.

Input generation: ``rng.integers(N, size=count)`` picks syllables with
replacement, then ``rng.normal(0, sigma, size=frames.shape)`` is added.
"""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from segsyl.errors import SegSylError, ValidationError
from segsyl.search import (
    SearchStrategy,
    SynthesisGraph,
    _require_path,
    build_graph,
    enumerate_paths,
    search,
)
from segsyl.stitching import MODELS, stitch
from segsyl.compare import dtw_distance
from segsyl.trajectory import (
    Dictionary,
    SegmentBoundaries,
    SegmentedInput,
    SyllablePattern,
    Trajectory,
)


class HarnessInvariantError(SegSylError, AssertionError):
    def __init__(self, violations, report=None):
        self.violations = list(violations)
        self.report = report
        super().__init__(f"{len(self.violations)} invariant violation(s): " + "; ".join(self.violations[:5]))


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    syllable_count: int = 12
    parameter_dim: int = 1
    lengths: tuple[int, ...] = (2, 3, 4)
    frames_per_segment: tuple[int, int] = (3, 6)
    noise_sigma: float = 0.0
    input_syllables: tuple[int, int] = (1, 3)

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(sorted({int(n) for n in self.lengths})))
        object.__setattr__(self, "frames_per_segment", tuple(int(v) for v in self.frames_per_segment))
        object.__setattr__(self, "input_syllables", tuple(int(v) for v in self.input_syllables))
        if self.syllable_count < 1 or self.parameter_dim < 1:
            raise ValidationError("syllable_count and parameter_dim must be >= 1")
        if not self.lengths or self.lengths[0] < 1:
            raise ValidationError("lengths must be a nonempty set of positive integers")
        lo, hi = self.frames_per_segment
        if not 1 <= lo <= hi:
            raise ValidationError(f"bad frames_per_segment range {self.frames_per_segment}")
        lo, hi = self.input_syllables
        if not 1 <= lo <= hi:
            raise ValidationError(f"bad input_syllables range {self.input_syllables}")
        if self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be >= 0")


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def gen_synthetic_dictionary(cfg: SynthConfig, seed=None) -> Dictionary:
    rng = _rng(cfg.seed if seed is None else seed)
    lo, hi = cfg.frames_per_segment
    P = cfg.parameter_dim
    syllables = []
    for k in range(cfg.syllable_count):
        n = cfg.lengths[int(rng.integers(len(cfg.lengths)))]
        pieces, starts = [], []
        for _ in range(n):
            m = int(rng.integers(lo, hi + 1))
            coef = rng.uniform(-1.0, 1.0, size=(4, P))
            t = np.linspace(0.0, 1.0, m)[:, None]
            starts.append(sum(len(x) for x in pieces))
            pieces.append(coef[0] + coef[1] * t + coef[2] * t ** 2 + coef[3] * t ** 3)
        label = f"s{k:03d}"
        syllables.append(
            SyllablePattern(
                label=label,
                phonemes=tuple(f"{label}.{j}" for j in range(n)),
                trajectory=Trajectory(np.concatenate(pieces)),
                boundaries=SegmentBoundaries(tuple(starts)),
            )
        )
    return Dictionary(tuple(syllables), P)


def gen_input(dictionary: Dictionary, seed, syllable_count: int, noise_sigma: float = 0.0):
    """Concatenate randomly chosen syllables and perturb them.

    Returns ``(SegmentedInput, truth_labels)``.
    """
    if len(dictionary) == 0:
        raise ValidationError("dictionary is empty")
    rng = _rng(seed)
    picks = rng.integers(len(dictionary), size=int(syllable_count))
    chosen = [dictionary.syllables[int(i)] for i in picks]
    frames, starts, offset = [], [], 0
    for s in chosen:
        frames.append(s.trajectory.frames)
        starts.extend(offset + b for b in s.boundaries.starts)
        offset += len(s.trajectory)
    x = np.concatenate(frames)
    x = x + rng.normal(0.0, noise_sigma, size=x.shape)
    segmented = SegmentedInput(Trajectory(x), SegmentBoundaries(tuple(starts)))
    return segmented, tuple(s.label for s in chosen)


def oracle_shortest_path(graph: SynthesisGraph) -> float:
    """Cheapest complete path by a forward dynamic program over the lattice."""
    _require_path(graph)
    best = [float("inf")] * (graph.p + 1)
    best[0] = 0.0
    for v in range(1, graph.p + 1):
        for n in graph.allowed_lengths:
            u = v - n
            if u >= 0 and best[u] < float("inf"):
                cand = best[u] + graph.weight(u, n)
                if cand < best[v]:
                    best[v] = cand
    return best[graph.p]


def label_accuracy(predicted, truth) -> float:
    """Position-wise matches over the longer of the two sequences."""
    width = max(len(predicted), len(truth))
    if width == 0:
        return 1.0
    return sum(a == b for a, b in zip(predicted, truth)) / width


@dataclass
class StrategySummary:
    mean_cost: float
    median_cost: float
    mean_hops: float
    mean_arcs_evaluated: float
    mean_nodes_expanded: float
    mean_wall_time: float
    accuracy: float


@dataclass
class ModelSummary:
    mean_sigma2: float
    mean_junction_residual: float
    mean_slope_residual: float | None
    mean_info_distance: float
    fallback_instances: int


@dataclass
class ExperimentReport:
    config: dict
    instance_count: int
    strategies: dict[str, StrategySummary]
    models: dict[str, ModelSummary]
    multi_path_instances: int
    mean_arc_ratio: dict[str, float]
    bfs_vs_dfs: dict[str, float]
    violations: list[str] = field(default_factory=list)
    instances: list[dict] = field(default_factory=list)

    def to_dict(self, timing: bool = False, instances: bool = False) -> dict:
        out = asdict(self)
        if not timing:
            for s in out["strategies"].values():
                s.pop("mean_wall_time")
            for rec in out["instances"]:
                for s in rec["strategies"].values():
                    s.pop("wall_time")
        if not instances:
            out.pop("instances")
        return out


def run_instance(cfg: SynthConfig, index: int) -> dict:
    """Generate instance ``index`` and run every strategy and model on it."""
    dict_seed, input_seed = np.random.SeedSequence([cfg.seed, index]).spawn(2)
    dictionary = gen_synthetic_dictionary(cfg, dict_seed)
    count_rng = _rng(input_seed)
    lo, hi = cfg.input_syllables
    count = int(count_rng.integers(lo, hi + 1))
    segmented, truth = gen_input(dictionary, count_rng, count, cfg.noise_sigma)

    record = {"index": index, "segments": segmented.segment_count, "truth": list(truth), "strategies": {}}
    violations = []
    results = {}
    full_graph = None
    for strategy in SearchStrategy:
        t0 = time.perf_counter()
        graph = build_graph(segmented, dictionary)
        path = search(graph, strategy)
        wall = time.perf_counter() - t0
        if strategy is SearchStrategy.FULL:
            full_graph = graph
        results[strategy] = path
        record["strategies"][strategy.value] = {
            "nodes": list(path.nodes),
            "labels": list(path.labels),
            "cost": path.cost,
            "hops": path.hops,
            "arcs_evaluated": path.stats.arcs_evaluated,
            "nodes_expanded": path.stats.nodes_expanded,
            "wall_time": wall,
            "accuracy": label_accuracy(path.labels, truth),
        }

    full, dfs, bfs = (results[s] for s in SearchStrategy)
    oracle = oracle_shortest_path(full_graph)
    paths = enumerate_paths(full_graph)
    record["complete_paths"] = len(paths)
    record["min_hops"] = min(len(p) - 1 for p in paths)
    tag = f"instance {index}"
    if full.cost != oracle:
        violations.append(f"{tag}: full cost {full.cost!r} != oracle {oracle!r}")
    for name, other in (("dfs", dfs), ("bfs", bfs)):
        if not full.cost <= other.cost:
            violations.append(f"{tag}: full cost {full.cost!r} > {name} cost {other.cost!r}")
        if len(paths) >= 2 and not other.stats.arcs_evaluated < full.stats.arcs_evaluated:
            violations.append(
                f"{tag}: {name} evaluated {other.stats.arcs_evaluated} arcs, full {full.stats.arcs_evaluated}"
            )
    if bfs.hops > record["min_hops"]:
        violations.append(f"{tag}: bfs hops {bfs.hops} > shortest {record['min_hops']}")

    record["models"] = {}
    patterns = [dictionary.by_label(label) for label in full.labels]
    for model in MODELS:
        st = stitch([p.trajectory for p in patterns], model)
        record["models"][model] = {
            "sigma2": float(st.sigma2.mean()),
            "junction_residual": float(st.junction_residuals.max()) if st.junction_residuals.size else 0.0,
            "slope_residual": (
                float(st.slope_residuals.max()) if st.slope_residuals is not None and st.slope_residuals.size
                else (0.0 if st.slope_residuals is not None else None)
            ),
            "info_distance": dtw_distance(segmented.trajectory.frames, st.stitched.frames),
            "fallback": bool(st.fallback_channels),
        }
    record["violations"] = violations
    return record


def _mean(values):
    values = list(values)
    return float(sum(values) / len(values)) if values else 0.0


def compare_strategies(cfg: SynthConfig, instance_count: int, workers: int = 1, check: bool = True):
    """Run ``instance_count`` seeded instances and aggregate per strategy and model.

    Raises :class:`HarnessInvariantError` when ``check`` is set and any
    instance breaks a hard invariant: full cost equal to the lattice oracle,
    full cost no worse than DFS or BFS, strictly fewer arc evaluations for
    DFS and BFS when the graph has two or more complete paths, and BFS hop
    count no larger than any complete path's.
    """
    if instance_count < 1:
        raise ValidationError("instance_count must be >= 1")
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            records = list(pool.map(lambda i: run_instance(cfg, i), range(instance_count)))
    else:
        records = [run_instance(cfg, i) for i in range(instance_count)]

    strategies = {}
    for s in SearchStrategy:
        rows = [r["strategies"][s.value] for r in records]
        costs = [row["cost"] for row in rows]
        strategies[s.value] = StrategySummary(
            mean_cost=_mean(costs),
            median_cost=float(statistics.median(costs)),
            mean_hops=_mean(row["hops"] for row in rows),
            mean_arcs_evaluated=_mean(row["arcs_evaluated"] for row in rows),
            mean_nodes_expanded=_mean(row["nodes_expanded"] for row in rows),
            mean_wall_time=_mean(row["wall_time"] for row in rows),
            accuracy=_mean(row["accuracy"] for row in rows),
        )

    models = {}
    for m in MODELS:
        rows = [r["models"][m] for r in records]
        slopes = [row["slope_residual"] for row in rows if row["slope_residual"] is not None]
        models[m] = ModelSummary(
            mean_sigma2=_mean(row["sigma2"] for row in rows),
            mean_junction_residual=_mean(row["junction_residual"] for row in rows),
            mean_slope_residual=_mean(slopes) if slopes else None,
            mean_info_distance=_mean(row["info_distance"] for row in rows),
            fallback_instances=sum(row["fallback"] for row in rows),
        )

    multi = [r for r in records if r["complete_paths"] >= 2]
    ratio = {
        name: _mean(
            r["strategies"][name]["arcs_evaluated"] / r["strategies"]["full"]["arcs_evaluated"] for r in multi
        )
        for name in ("dfs", "bfs")
    }
    bfs_costs = [r["strategies"]["bfs"]["cost"] for r in records]
    dfs_costs = [r["strategies"]["dfs"]["cost"] for r in records]
    bfs_vs_dfs = {
        "mean_cost_bfs": _mean(bfs_costs),
        "mean_cost_dfs": _mean(dfs_costs),
        "bfs_cheaper": sum(b < d for b, d in zip(bfs_costs, dfs_costs)),
        "dfs_cheaper": sum(d < b for b, d in zip(bfs_costs, dfs_costs)),
        "ties": sum(b == d for b, d in zip(bfs_costs, dfs_costs)),
    }
    violations = [v for r in records for v in r["violations"]]
    config = asdict(cfg)
    config = {k: list(v) if isinstance(v, tuple) else v for k, v in config.items()}
    report = ExperimentReport(
        config=config,
        instance_count=instance_count,
        strategies=strategies,
        models=models,
        multi_path_instances=len(multi),
        mean_arc_ratio=ratio,
        bfs_vs_dfs=bfs_vs_dfs,
        violations=violations,
        instances=records,
    )
    if check and violations:
        raise HarnessInvariantError(violations, report)
    return report

from __future__ import annotations

import time
from dataclasses import dataclass

from segsyl.compare import dtw_distance
from segsyl.search import SearchStrategy, SolutionPath, build_graph, search
from segsyl.stitching import Model, StitchResult, stitch
from segsyl.trajectory import Dictionary, SegmentedInput


@dataclass(frozen=True, eq=False)
class RecognitionResult:
    labels: tuple[str, ...]
    per_syllable_distances: tuple[float, ...]
    total_distance: float
    stitched: StitchResult
    strategy: SearchStrategy
    model: str
    path: SolutionPath
    info_distance: float
    wall_time: float

    @property
    def stats(self):
        return self.path.stats


def total_distance(path: SolutionPath) -> float:
    return float(sum(path.weights))


def recognize(
    segmented: SegmentedInput,
    dictionary: Dictionary,
    strategy: SearchStrategy | str = SearchStrategy.FULL,
    model: Model = "linear",
) -> RecognitionResult:
    """Label the input with dictionary syllables and build the adjusted reference.

    The search picks the syllable sequence; the chosen reference trajectories
    are then stitched with ``model``. ``info_distance`` is the DTW distance
    between the input and the stitched reference and plays no part in the
    choice.
    """
    strategy = SearchStrategy(strategy)
    t0 = time.perf_counter()
    graph = build_graph(segmented, dictionary)
    path = search(graph, strategy)
    patterns = [dictionary.by_label(label) for label in path.labels]
    stitched = stitch([p.trajectory for p in patterns], model)
    info = dtw_distance(segmented.trajectory.frames, stitched.stitched.frames)
    wall = time.perf_counter() - t0
    return RecognitionResult(
        labels=tuple(path.labels),
        per_syllable_distances=path.weights,
        total_distance=total_distance(path),
        stitched=stitched,
        strategy=strategy,
        model=model,
        path=path,
        info_distance=info,
        wall_time=wall,
    )

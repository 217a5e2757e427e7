"""Syllable-level recognition of segmented parameter trajectories.

Inputs are already split into phoneme segments. The recognizer searches a
lattice over segment boundaries for the cheapest covering by dictionary
syllables, then fuses the chosen reference trajectories into one continuous
trajectory with a linear or quadratic per-syllable value transform.
"""

from segsyl.errors import (
    NoCompletePathError,
    SegmentCountMismatchError,
    SegSylError,
    SingularSystemError,
    ValidationError,
)
from segsyl.trajectory import (
    Dictionary,
    SegmentBoundaries,
    SegmentedInput,
    SyllablePattern,
    Trajectory,
    dictionary_by_length,
    slice_segments,
    validate_trajectory,
)
from segsyl.compare import best_pattern, dtw_distance, frame_distance, syllable_distance
from segsyl.stitching import StitchResult, solve_dense, stitch
from segsyl.search import (
    SearchStrategy,
    SolutionPath,
    SynthesisGraph,
    build_graph,
    count_compositions,
    enumerate_paths,
    search,
)
from segsyl.recognizer import RecognitionResult, recognize

__version__ = "0.1.0"

__all__ = [
    "Dictionary",
    "NoCompletePathError",
    "RecognitionResult",
    "SearchStrategy",
    "SegSylError",
    "SegmentBoundaries",
    "SegmentCountMismatchError",
    "SegmentedInput",
    "SingularSystemError",
    "SolutionPath",
    "StitchResult",
    "SyllablePattern",
    "SynthesisGraph",
    "Trajectory",
    "ValidationError",
    "best_pattern",
    "build_graph",
    "count_compositions",
    "dictionary_by_length",
    "dtw_distance",
    "enumerate_paths",
    "frame_distance",
    "recognize",
    "search",
    "slice_segments",
    "solve_dense",
    "stitch",
    "syllable_distance",
    "validate_trajectory",
]

"""Segment and syllable comparison by dynamic time warping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from segsyl.errors import SegmentCountMismatchError, ValidationError
from segsyl.trajectory import Dictionary, Segment, SyllablePattern, dictionary_by_length


def frame_distance(f, g) -> float:
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise ValidationError(f"frame dimension mismatch: {f.shape} vs {g.shape}")
    return float(np.sqrt(np.sum((f - g) ** 2)))


def _as_frames(seq) -> np.ndarray:
    arr = np.asarray(seq, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValidationError("DTW needs a nonempty frame sequence")
    return arr


def dtw_distance(a, b) -> float:
    """Unnormalized symmetric DTW distance with Euclidean local cost.

    Steps are (1,0), (0,1) and (1,1), each with weight one; the path is
    anchored at both first frames and both last frames.
    """
    a = _as_frames(a)
    b = _as_frames(b)
    if a.shape[1] != b.shape[1]:
        raise ValidationError(f"frame dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    local = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)).tolist()
    # plain floats: the loop is scalar-bound
    inf = float("inf")
    prev = [0.0] + [inf] * len(local[0])
    for row in local:
        cur = [inf]
        for j, cost in enumerate(row):
            cur.append(cost + min(prev[j], prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


@dataclass(frozen=True)
class SyllableGroup:
    """Contiguous input segments ``[start_node, end_node)`` considered as one syllable."""

    segments: tuple[Segment, ...]
    start_node: int
    end_node: int

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValidationError("a syllable group needs at least one segment")
        if self.end_node - self.start_node != len(self.segments):
            raise ValidationError("group node span does not match its segment count")
        for prev, nxt in zip(self.segments, self.segments[1:]):
            if prev.stop != nxt.start:
                raise ValidationError("group segments are not contiguous")

    @classmethod
    def from_segments(cls, segments: Sequence[Segment], start: int, count: int) -> "SyllableGroup":
        return cls(tuple(segments[start:start + count]), start, start + count)

    def __len__(self) -> int:
        return len(self.segments)


def syllable_distance(group: SyllableGroup, pattern: SyllablePattern) -> float:
    if len(group) != pattern.segment_count:
        raise SegmentCountMismatchError(
            f"segment count mismatch: group has {len(group)}, "
            f"{pattern.label!r} has {pattern.segment_count}"
        )
    return sum(dtw_distance(x.frames, y.frames) for x, y in zip(group.segments, pattern.segments))


def best_pattern(group: SyllableGroup, dictionary: Dictionary) -> tuple[SyllablePattern, float]:
    """Closest pattern with the group's segment count; the earliest one wins ties."""
    candidates = dictionary_by_length(dictionary, len(group))
    if not candidates:
        raise SegmentCountMismatchError(f"no pattern with {len(group)} segments in the dictionary")
    best, best_d = None, np.inf
    for pattern in candidates:
        d = syllable_distance(group, pattern)
        if d < best_d:
            best, best_d = pattern, d
    return best, float(best_d)

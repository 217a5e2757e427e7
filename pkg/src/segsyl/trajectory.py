"""Trajectories, segment boundaries, syllable patterns and dictionaries.

A trajectory is an ``(m, P)`` float array of ``m`` frames with ``P`` parameters
each. All containers are frozen and hold read-only arrays, so they can be
shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from segsyl.errors import ValidationError


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Trajectory:
    frames: np.ndarray

    def __post_init__(self):
        frames = np.array(self.frames, dtype=float, copy=True)
        if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
            raise ValidationError(f"trajectory must be a nonempty 2-d array, got shape {frames.shape}")
        if not np.all(np.isfinite(frames)):
            bad = int(np.argwhere(~np.isfinite(frames))[0, 0])
            raise ValidationError(f"non-finite value at frame {bad}")
        object.__setattr__(self, "frames", _readonly(frames))

    def __len__(self) -> int:
        return self.frames.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return self.frames.shape == other.frames.shape and bool(np.array_equal(self.frames, other.frames))

    __hash__ = None

    @property
    def dim(self) -> int:
        return self.frames.shape[1]

    def tolist(self) -> list[list[float]]:
        return self.frames.tolist()


def validate_trajectory(frames: Iterable[Sequence[float]]) -> Trajectory:
    """Check a raw frame sequence and wrap it as a :class:`Trajectory`.

    Raises :class:`ValidationError` naming the first offending frame for an
    empty input, ragged frame dimensions or a non-finite value.
    """
    rows = list(frames)
    if not rows:
        raise ValidationError("empty trajectory")
    dim = None
    for i, row in enumerate(rows):
        try:
            values = [float(v) for v in row]
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"frame {i} is not a sequence of numbers") from exc
        if dim is None:
            if not values:
                raise ValidationError("frame 0 has no parameters")
            dim = len(values)
        elif len(values) != dim:
            raise ValidationError(f"ragged at frame {i}: expected {dim} values, got {len(values)}")
        for v in values:
            if not math.isfinite(v):
                raise ValidationError(f"non-finite value at frame {i}")
    return Trajectory(np.asarray(rows, dtype=float))


@dataclass(frozen=True)
class SegmentBoundaries:
    """Start frame of each segment; segment ``j`` ends where ``j + 1`` starts."""

    starts: tuple[int, ...]

    def __post_init__(self):
        starts = tuple(int(s) for s in self.starts)
        if not starts:
            raise ValidationError("boundaries must list at least one segment start")
        if starts[0] != 0:
            raise ValidationError(f"boundaries must start at 0, got {starts[0]}")
        for j in range(1, len(starts)):
            if starts[j] <= starts[j - 1]:
                raise ValidationError(f"boundaries not strictly increasing at index {j}")
        object.__setattr__(self, "starts", starts)

    def __len__(self) -> int:
        return len(self.starts)

    def check(self, frame_count: int) -> None:
        if self.starts[-1] >= frame_count:
            raise ValidationError(
                f"boundary {self.starts[-1]} leaves an empty last segment in {frame_count} frames"
            )

    def ranges(self, frame_count: int) -> list[tuple[int, int]]:
        self.check(frame_count)
        ends = self.starts[1:] + (frame_count,)
        return list(zip(self.starts, ends))


@dataclass(frozen=True)
class Segment:
    start: int
    stop: int
    frames: np.ndarray

    def __len__(self) -> int:
        return self.stop - self.start


def slice_segments(traj: Trajectory, bounds: SegmentBoundaries) -> list[Segment]:
    return [Segment(a, b, traj.frames[a:b]) for a, b in bounds.ranges(len(traj))]


@dataclass(frozen=True)
class SyllablePattern:
    label: str
    phonemes: tuple[str, ...]
    trajectory: Trajectory
    boundaries: SegmentBoundaries

    def __post_init__(self):
        object.__setattr__(self, "phonemes", tuple(self.phonemes))
        if len(self.phonemes) != len(self.boundaries):
            raise ValidationError(
                f"syllable {self.label!r}: {len(self.phonemes)} phonemes but "
                f"{len(self.boundaries)} segments"
            )
        try:
            self.boundaries.check(len(self.trajectory))
        except ValidationError as exc:
            raise ValidationError(f"syllable {self.label!r}: {exc}") from None
        object.__setattr__(self, "_segments", tuple(slice_segments(self.trajectory, self.boundaries)))

    @property
    def segment_count(self) -> int:
        return len(self.boundaries)

    @property
    def segments(self) -> tuple[Segment, ...]:
        return self._segments


@dataclass(frozen=True)
class Dictionary:
    syllables: tuple[SyllablePattern, ...]
    parameter_dim: int

    def __post_init__(self):
        syllables = tuple(self.syllables)
        object.__setattr__(self, "syllables", syllables)
        if self.parameter_dim < 1:
            raise ValidationError("parameter_dim must be >= 1")
        seen = set()
        for s in syllables:
            if s.label in seen:
                raise ValidationError(f"duplicate syllable label {s.label!r}")
            seen.add(s.label)
            if s.trajectory.dim != self.parameter_dim:
                raise ValidationError(
                    f"syllable {s.label!r}: frames have {s.trajectory.dim} parameters, "
                    f"dictionary declares {self.parameter_dim}"
                )

    def __len__(self) -> int:
        return len(self.syllables)

    def __iter__(self):
        return iter(self.syllables)

    def by_label(self, label: str) -> SyllablePattern:
        for s in self.syllables:
            if s.label == label:
                return s
        raise KeyError(label)

    @property
    def lengths(self) -> tuple[int, ...]:
        """Distinct segment counts present, ascending."""
        return tuple(sorted({s.segment_count for s in self.syllables}))


def dictionary_by_length(dictionary: Dictionary, n: int) -> list[SyllablePattern]:
    return [s for s in dictionary.syllables if s.segment_count == n]


@dataclass(frozen=True)
class SegmentedInput:
    trajectory: Trajectory
    boundaries: SegmentBoundaries

    def __post_init__(self):
        self.boundaries.check(len(self.trajectory))

    @property
    def segment_count(self) -> int:
        return len(self.boundaries)

    def segments(self) -> list[Segment]:
        return slice_segments(self.trajectory, self.boundaries)

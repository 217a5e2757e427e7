"""JSON file formats for dictionaries, inputs and reports.

Dictionary::

    {"parameter_dim": P,
     "syllables": [{"label": "...", "phonemes": ["..", ..],
                    "frames": [[..], ..], "boundaries": [0, ..]}, ..]}

Input::

    {"parameter_dim": P, "frames": [[..], ..], "boundaries": [0, ..],
     "labels": ["..", ..]}            # "labels" optional: ground truth

Floats are written with Python's shortest round-trip repr, so a parse of a
written file reproduces every value bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from segsyl.errors import ValidationError
from segsyl.trajectory import (
    Dictionary,
    SegmentBoundaries,
    SegmentedInput,
    SyllablePattern,
    validate_trajectory,
)


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(path, doc) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def read_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def _require(doc, key, where):
    if not isinstance(doc, dict):
        raise ValidationError(f"{where}: expected a JSON object")
    if key not in doc:
        raise ValidationError(f"{where}: missing field {key!r}")
    return doc[key]


def _dim(doc, where) -> int:
    dim = _require(doc, "parameter_dim", where)
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ValidationError(f"{where}: parameter_dim must be a positive integer")
    return dim


def _boundaries(raw, where) -> SegmentBoundaries:
    if not isinstance(raw, list) or not all(isinstance(b, int) and not isinstance(b, bool) for b in raw):
        raise ValidationError(f"{where}: boundaries must be a list of integers")
    try:
        return SegmentBoundaries(tuple(raw))
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _frames(raw, dim, where):
    try:
        traj = validate_trajectory(raw)
    except (ValidationError, TypeError) as exc:
        raise ValidationError(f"{where}: frames: {exc}") from None
    if traj.dim != dim:
        raise ValidationError(f"{where}: frames have {traj.dim} parameters, parameter_dim is {dim}")
    return traj


def dictionary_from_doc(doc, source="dictionary") -> Dictionary:
    dim = _dim(doc, source)
    raw = _require(doc, "syllables", source)
    if not isinstance(raw, list):
        raise ValidationError(f"{source}: syllables must be a list")
    seen = set()
    syllables = []
    for i, entry in enumerate(raw):
        label = _require(entry, "label", f"{source}: syllable {i}")
        if not isinstance(label, str):
            raise ValidationError(f"{source}: syllable {i}: label must be a string")
        where = f"{source}: syllable {label!r}"
        if label in seen:
            raise ValidationError(f"{source}: duplicate syllable label {label!r}")
        seen.add(label)
        phonemes = _require(entry, "phonemes", where)
        if not isinstance(phonemes, list) or not all(isinstance(p, str) for p in phonemes):
            raise ValidationError(f"{where}: phonemes must be a list of strings")
        traj = _frames(_require(entry, "frames", where), dim, where)
        bounds = _boundaries(_require(entry, "boundaries", where), where)
        try:
            syllables.append(SyllablePattern(label, tuple(phonemes), traj, bounds))
        except ValidationError as exc:
            raise ValidationError(f"{source}: {exc}") from None
    return Dictionary(tuple(syllables), dim)


def dictionary_to_doc(dictionary: Dictionary) -> dict:
    return {
        "parameter_dim": dictionary.parameter_dim,
        "syllables": [
            {
                "label": s.label,
                "phonemes": list(s.phonemes),
                "frames": s.trajectory.tolist(),
                "boundaries": list(s.boundaries.starts),
            }
            for s in dictionary.syllables
        ],
    }


def input_from_doc(doc, source="input") -> tuple[SegmentedInput, tuple[str, ...] | None]:
    dim = _dim(doc, source)
    traj = _frames(_require(doc, "frames", source), dim, source)
    bounds = _boundaries(_require(doc, "boundaries", source), source)
    try:
        segmented = SegmentedInput(traj, bounds)
    except ValidationError as exc:
        raise ValidationError(f"{source}: {exc}") from None
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise ValidationError(f"{source}: labels must be a list of strings")
        labels = tuple(labels)
    return segmented, labels


def input_to_doc(segmented: SegmentedInput, labels=None) -> dict:
    doc = {
        "parameter_dim": segmented.trajectory.dim,
        "frames": segmented.trajectory.tolist(),
        "boundaries": list(segmented.boundaries.starts),
    }
    if labels is not None:
        doc["labels"] = list(labels)
    return doc


def parse_dictionary_file(path) -> Dictionary:
    return dictionary_from_doc(read_json(path), str(path))


def parse_input_file(path) -> SegmentedInput:
    return input_from_doc(read_json(path), str(path))[0]


def _floats(arr) -> list:
    return np.asarray(arr, dtype=float).tolist()


def stitch_document(st) -> dict:
    coeff_names = ("a", "b") if st.model == "linear" else ("a", "b", "c")
    arr = st.coeffs.as_array()
    return {
        "model": st.model,
        "coefficients": [
            [dict(zip(coeff_names, channel)) for channel in syllable] for syllable in arr.tolist()
        ],
        "sigma2": _floats(st.sigma2),
        "junction_residuals": _floats(st.junction_residuals),
        "slope_residuals": None if st.slope_residuals is None else _floats(st.slope_residuals),
        "solver_residuals": _floats(st.solver_residuals),
        "fallback_channels": list(st.fallback_channels),
        "syllable_offsets": list(st.syllable_offsets),
        "stitched_frames": st.stitched.tolist(),
    }


def report_document(result) -> dict:
    """JSON form of a recognition result. Wall time is left out so output is reproducible."""
    stats = result.path.stats
    return {
        "labels": list(result.labels),
        "nodes": list(result.path.nodes),
        "per_syllable_distances": list(result.per_syllable_distances),
        "total_distance": result.total_distance,
        "strategy": result.strategy.value,
        "model": result.model,
        "stats": {
            "arcs_evaluated": stats.arcs_evaluated,
            "nodes_expanded": stats.nodes_expanded,
            "paths_considered": stats.paths_considered,
        },
        "info_distance": result.info_distance,
        "stitch": stitch_document(result.stitched),
    }


def write_csv(path, frames) -> None:
    lines = [",".join(repr(float(v)) for v in row) for row in np.asarray(frames, dtype=float)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

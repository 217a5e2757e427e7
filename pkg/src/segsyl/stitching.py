"""Continuity-constrained value transforms for concatenated syllables.

Each syllable ``k`` gets a transform ``g_k`` applied to its own values,
either ``a*y + b`` (linear) or ``a*y**2 + b*y + c`` (quadratic). The
coefficients come from one square linear system per channel whose rows are

* the least-squares normal equations of syllable 1,
* value equality at every merge point (last frame of ``k`` against the
  first frame of ``k + 1``),
* for the quadratic model, equality of ``2*a*y + b`` at every merge point,
* one reduced normal equation (the ``b`` or ``c`` row) for each syllable
  after the first.

Unknowns are interleaved per syllable: ``(a1, b1, a2, b2, ...)`` or
``(a1, b1, c1, a2, ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from segsyl.errors import SingularSystemError, ValidationError
from segsyl.trajectory import Trajectory

Model = Literal["linear", "quadratic"]
MODELS: tuple[str, ...] = ("linear", "quadratic")

PIVOT_RTOL = 1e-12

# Identity coefficients per model, in unknown order.
IDENTITY = {"linear": (1.0, 0.0), "quadratic": (0.0, 1.0, 0.0)}


@dataclass(frozen=True)
class DenseSystem:
    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        r = np.asarray(self.rhs, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or r.shape != (m.shape[0],):
            raise ValidationError(f"system must be square with matching rhs, got {m.shape} and {r.shape}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "rhs", r)

    @property
    def size(self) -> int:
        return self.rhs.shape[0]

    def residual(self, x) -> float:
        """Max-norm residual of ``matrix @ x - rhs``."""
        return float(np.max(np.abs(self.matrix @ np.asarray(x, dtype=float) - self.rhs)))


def solve_dense(system: DenseSystem) -> np.ndarray:
    """Gaussian elimination with partial pivoting.

    A pivot smaller than ``PIVOT_RTOL`` times the largest entry of the
    original matrix raises :class:`SingularSystemError`.
    """
    a = system.matrix.copy()
    x = system.rhs.copy()
    n = x.shape[0]
    threshold = PIVOT_RTOL * (float(np.max(np.abs(a))) if n else 0.0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        pivot = a[p, k]
        if not abs(pivot) > threshold:
            raise SingularSystemError(k, float(abs(pivot)), threshold)
        if p != k:
            a[[k, p]] = a[[p, k]]
            x[[k, p]] = x[[p, k]]
        for i in range(k + 1, n):
            lam = a[i, k] / a[k, k]
            if lam != 0.0:
                a[i, k:] -= lam * a[k, k:]
                x[i] -= lam * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


def _values(ys: Sequence) -> list[np.ndarray]:
    out = [np.asarray(y, dtype=float).reshape(-1) for y in ys]
    if not out:
        raise ValidationError("need at least one syllable")
    for k, y in enumerate(out):
        if y.size == 0:
            raise ValidationError(f"syllable {k} has no frames")
    return out


def build_linear_system(ys: Sequence) -> DenseSystem:
    """Square ``2R`` system for the linear model on one channel."""
    ys = _values(ys)
    R = len(ys)
    A = np.zeros((2 * R, 2 * R))
    rhs = np.zeros(2 * R)
    y1 = ys[0]
    s1, s2 = y1.sum(), (y1 ** 2).sum()
    A[0, 0:2] = (s2, s1)
    rhs[0] = s2
    A[1, 0:2] = (s1, y1.size)
    rhs[1] = s1
    row = 2
    for k in range(R - 1):
        left, right = ys[k][-1], ys[k + 1][0]
        A[row, 2 * k:2 * k + 2] = (left, 1.0)
        A[row, 2 * k + 2:2 * k + 4] = (-right, -1.0)
        row += 1
    for k in range(1, R):
        y = ys[k]
        s = y.sum()
        A[row, 2 * k:2 * k + 2] = (s, y.size)
        rhs[row] = s
        row += 1
    return DenseSystem(A, rhs)


def build_quadratic_system(ys: Sequence) -> DenseSystem:
    """Square ``3R`` system for the quadratic model on one channel."""
    ys = _values(ys)
    R = len(ys)
    A = np.zeros((3 * R, 3 * R))
    rhs = np.zeros(3 * R)
    y1 = ys[0]
    p1, p2, p3, p4 = (float((y1 ** e).sum()) for e in (1, 2, 3, 4))
    A[0, 0:3] = (p4, p3, p2)
    rhs[0] = p3
    A[1, 0:3] = (p3, p2, p1)
    rhs[1] = p2
    A[2, 0:3] = (p2, p1, y1.size)
    rhs[2] = p1
    row = 3
    for k in range(R - 1):
        left, right = ys[k][-1], ys[k + 1][0]
        A[row, 3 * k:3 * k + 3] = (left ** 2, left, 1.0)
        A[row, 3 * k + 3:3 * k + 6] = (-right ** 2, -right, -1.0)
        row += 1
    for k in range(R - 1):
        left, right = ys[k][-1], ys[k + 1][0]
        A[row, 3 * k:3 * k + 2] = (2.0 * left, 1.0)
        A[row, 3 * k + 3:3 * k + 5] = (-2.0 * right, -1.0)
        row += 1
    for k in range(1, R):
        y = ys[k]
        s1, s2 = y.sum(), (y ** 2).sum()
        A[row, 3 * k:3 * k + 3] = (s2, s1, y.size)
        rhs[row] = s1
        row += 1
    return DenseSystem(A, rhs)


_BUILDERS = {"linear": build_linear_system, "quadratic": build_quadratic_system}


@dataclass(frozen=True, eq=False)
class LinearCoeffs:
    """``a[k, c]`` and ``b[k, c]`` for syllable ``k`` and channel ``c``."""

    a: np.ndarray
    b: np.ndarray
    model = "linear"

    def apply(self, k: int, values: np.ndarray) -> np.ndarray:
        return self.a[k] * values + self.b[k]

    def slope(self, k: int, values: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.a[k], np.shape(values))

    def as_array(self) -> np.ndarray:
        """Shape ``(R, P, 2)``."""
        return np.stack([self.a, self.b], axis=-1)

    @classmethod
    def from_array(cls, arr) -> "LinearCoeffs":
        arr = np.asarray(arr, dtype=float)
        return cls(arr[..., 0].copy(), arr[..., 1].copy())


@dataclass(frozen=True, eq=False)
class QuadraticCoeffs:
    """``a``, ``b``, ``c`` of shape ``(R, P)``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    model = "quadratic"

    def apply(self, k: int, values: np.ndarray) -> np.ndarray:
        return self.a[k] * values ** 2 + self.b[k] * values + self.c[k]

    def slope(self, k: int, values: np.ndarray) -> np.ndarray:
        return 2.0 * self.a[k] * values + self.b[k]

    def as_array(self) -> np.ndarray:
        return np.stack([self.a, self.b, self.c], axis=-1)

    @classmethod
    def from_array(cls, arr) -> "QuadraticCoeffs":
        arr = np.asarray(arr, dtype=float)
        return cls(arr[..., 0].copy(), arr[..., 1].copy(), arr[..., 2].copy())


_COEFFS = {"linear": LinearCoeffs, "quadratic": QuadraticCoeffs}


def _syllable_arrays(ys: Sequence) -> list[np.ndarray]:
    if len(ys) == 0:
        raise ValidationError("need at least one syllable to stitch")
    arrays = []
    for k, y in enumerate(ys):
        frames = y.frames if isinstance(y, Trajectory) else np.asarray(y, dtype=float)
        if frames.ndim == 1:
            frames = frames[:, None]
        if frames.ndim != 2 or frames.shape[0] == 0:
            raise ValidationError(f"syllable {k} has no frames")
        arrays.append(frames)
    dims = {f.shape[1] for f in arrays}
    if len(dims) != 1:
        raise ValidationError(f"channel mismatch between syllables: {sorted(dims)}")
    return arrays


def sigma_squared(coeffs, ys: Sequence) -> np.ndarray:
    """Per-channel sum of squared differences between transformed and original values."""
    arrays = _syllable_arrays(ys)
    if coeffs.a.shape != (len(arrays), arrays[0].shape[1]):
        raise ValidationError(
            f"coefficient shape {coeffs.a.shape} does not fit {len(arrays)} syllables "
            f"of {arrays[0].shape[1]} channels"
        )
    total = np.zeros(arrays[0].shape[1])
    for k, y in enumerate(arrays):
        total += ((coeffs.apply(k, y) - y) ** 2).sum(axis=0)
    return total


@dataclass(frozen=True, eq=False)
class StitchResult:
    model: str
    coeffs: LinearCoeffs | QuadraticCoeffs
    stitched: Trajectory
    sigma2: np.ndarray
    junction_residuals: np.ndarray
    slope_residuals: np.ndarray | None
    solver_residuals: np.ndarray
    fallback_channels: tuple[int, ...] = field(default=())
    syllable_offsets: tuple[int, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.fallback_channels


def fit_channel(ys: Sequence, model: Model) -> tuple[np.ndarray, float]:
    """Solve one channel's system; returns ``(coefficients (R, k), residual)``."""
    system = _BUILDERS[model](ys)
    x = solve_dense(system)
    width = len(IDENTITY[model])
    return x.reshape(len(ys), width), system.residual(x)


def stitch(ys: Sequence, model: Model = "linear") -> StitchResult:
    """Fit the chosen model to each channel and concatenate the transformed syllables.

    A channel whose system is singular keeps the identity transform and is
    listed in ``fallback_channels``.
    """
    if model not in _BUILDERS:
        raise ValidationError(f"unknown model {model!r}; expected one of {MODELS}")
    arrays = _syllable_arrays(ys)
    R, P = len(arrays), arrays[0].shape[1]
    width = len(IDENTITY[model])
    coeff = np.empty((R, P, width))
    solver_res = np.zeros(P)
    fallback = []
    for c in range(P):
        try:
            coeff[:, c, :], solver_res[c] = fit_channel([y[:, c] for y in arrays], model)
        except SingularSystemError:
            coeff[:, c, :] = IDENTITY[model]
            fallback.append(c)
    coeffs = _COEFFS[model].from_array(coeff)

    adjusted = [coeffs.apply(k, y) for k, y in enumerate(arrays)]
    junction = np.zeros((R - 1, P))
    slope = np.zeros((R - 1, P)) if model == "quadratic" else None
    for k in range(R - 1):
        junction[k] = np.abs(adjusted[k][-1] - adjusted[k + 1][0])
        if slope is not None:
            slope[k] = np.abs(coeffs.slope(k, arrays[k][-1]) - coeffs.slope(k + 1, arrays[k + 1][0]))
    offsets = tuple(int(v) for v in np.cumsum([0] + [len(y) for y in arrays]))
    return StitchResult(
        model=model,
        coeffs=coeffs,
        stitched=Trajectory(np.concatenate(adjusted, axis=0)),
        sigma2=sigma_squared(coeffs, arrays),
        junction_residuals=junction,
        slope_residuals=slope,
        solver_residuals=solver_res,
        fallback_channels=tuple(fallback),
        syllable_offsets=offsets,
    )

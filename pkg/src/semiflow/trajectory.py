"""Piecewise trajectories on [0, infinity) with left-continuous semantics.

A trajectory is a finite breakpoint sequence 0 = t_0 < t_1 < ... < t_J, one
segment descriptor per interval (t_j, t_{j+1}] (constant or affine, the value
taken left-continuously), a separate value at t = 0, and a constant tail on
(t_J, infinity).  Every point evaluation equals the left limit for t > 0 and
the right limit exists everywhere, so the defining conditions of the
trajectory space hold structurally instead of being checked.

All types are immutable and hashable; every operation is a pure function.
Constructors normalise to a canonical form (adjacent segments that continue
each other are merged, a trailing constant equal to the tail is absorbed), so
trajectories that agree pointwise after splicing or shifting compare equal.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from math import isfinite
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Segment",
    "Trajectory",
    "ExtendedTrajectory",
    "continue_at",
    "trajectory_to_dict",
    "trajectory_from_dict",
]

Vector = tuple[float, ...]


def _as_vector(values: Iterable[float], dim: int | None = None) -> Vector:
    vec = tuple(float(v) for v in values)
    if dim is not None and len(vec) != dim:
        raise ValueError(f"expected a vector of dimension {dim}, got {len(vec)}")
    if not all(isfinite(v) for v in vec):
        raise ValueError("trajectory values must be finite")
    return vec


@dataclass(frozen=True)
class Segment:
    """Value descriptor on one half-open interval (t_j, t_{j+1}].

    ``start`` is the limit from the right at t_j, ``end`` the value attained
    at t_{j+1}.  ``start == end`` encodes a constant piece; otherwise the
    value interpolates affinely between the endpoints.
    """

    start: Vector
    end: Vector

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", _as_vector(self.start))
        object.__setattr__(self, "end", _as_vector(self.end, len(self.start)))

    @property
    def is_constant(self) -> bool:
        return self.start == self.end

    def value_at(self, t: float, t0: float, t1: float) -> Vector:
        """Value at time t inside (t0, t1].  Endpoint hits are exact."""
        if self.is_constant:
            return self.start
        if t == t1:
            return self.end
        theta = (t - t0) / (t1 - t0)
        return tuple(a + (b - a) * theta for a, b in zip(self.start, self.end))


def _collinear(prev: Segment, cur: Segment, dt_prev: float, dt_cur: float) -> bool:
    # Cross-multiplied slope test: exact for dyadic inputs, conservative
    # otherwise (a failed merge never changes pointwise semantics).
    return all(
        (pe - ps) * dt_cur == (ce - cs) * dt_prev
        for ps, pe, cs, ce in zip(prev.start, prev.end, cur.start, cur.end)
    )


def _canonicalize(
    breakpoints: list[float], segments: list[Segment], tail: Vector
) -> tuple[tuple[float, ...], tuple[Segment, ...]]:
    """Merge redundant breakpoints without changing any value or right limit."""
    out_bp: list[float] = [breakpoints[0]]
    out_seg: list[Segment] = []
    for j, seg in enumerate(segments):
        t0, t1 = breakpoints[j], breakpoints[j + 1]
        if out_seg:
            prev = out_seg[-1]
            p0 = out_bp[-2] if len(out_bp) >= 2 else out_bp[-1]
            p1 = out_bp[-1]
            if prev.end == seg.start and _collinear(prev, seg, p1 - p0, t1 - t0):
                out_seg[-1] = Segment(prev.start, seg.end)
                out_bp[-1] = t1
                continue
        out_seg.append(seg)
        out_bp.append(t1)
    # Absorb a trailing constant piece that already equals the tail.
    while out_seg and out_seg[-1].is_constant and out_seg[-1].start == tail:
        out_seg.pop()
        out_bp.pop()
    return tuple(out_bp), tuple(out_seg)


@dataclass(frozen=True)
class Trajectory:
    """Left-continuous piecewise trajectory with a constant tail.

    Invariants enforced at construction: breakpoints start at 0 and increase
    strictly, segment count is one less than breakpoint count, all values
    share the coordinate dimension, and the stored form is canonical.
    """

    dim: int
    breakpoints: tuple[float, ...]
    segments: tuple[Segment, ...]
    initial_value: Vector
    tail_value: Vector

    def __post_init__(self) -> None:
        dim = int(self.dim)
        if dim < 1:
            raise ValueError("dim must be a positive integer")
        bp = [float(t) for t in self.breakpoints]
        if not bp or bp[0] != 0.0:
            raise ValueError("breakpoints must start at 0")
        if any(not isfinite(t) for t in bp):
            raise ValueError("breakpoints must be finite")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        segs = list(self.segments)
        if len(segs) != len(bp) - 1:
            raise ValueError("need exactly one segment per breakpoint interval")
        init = _as_vector(self.initial_value, dim)
        tail = _as_vector(self.tail_value, dim)
        for seg in segs:
            if len(seg.start) != dim:
                raise ValueError("segment dimension mismatch")
        cbp, cseg = _canonicalize(bp, segs, tail)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "breakpoints", cbp)
        object.__setattr__(self, "segments", cseg)
        object.__setattr__(self, "initial_value", init)
        object.__setattr__(self, "tail_value", tail)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value: Iterable[float]) -> "Trajectory":
        vec = _as_vector(value)
        return Trajectory(len(vec), (0.0,), (), vec, vec)

    @staticmethod
    def from_samples(times: Sequence[float], values: Sequence[Iterable[float]]) -> "Trajectory":
        """Piecewise-affine interpolation of samples; constant after the last."""
        if len(times) != len(values) or len(times) < 1:
            raise ValueError("need matching, non-empty times and values")
        vecs = [_as_vector(v) for v in values]
        dim = len(vecs[0])
        segs = [Segment(vecs[i], vecs[i + 1]) for i in range(len(vecs) - 1)]
        return Trajectory(dim, tuple(float(t) for t in times), tuple(segs), vecs[0], vecs[-1])

    # -- pointwise semantics ----------------------------------------------

    @property
    def right_limits(self) -> tuple[Vector, ...]:
        """Right limit at each breakpoint; the last one is the tail value."""
        return tuple(seg.start for seg in self.segments) + (self.tail_value,)

    def value_tuple(self, t: float) -> Vector:
        if t < 0:
            raise ValueError("trajectories are defined on [0, infinity)")
        if t == 0.0:
            return self.initial_value
        bp = self.breakpoints
        idx = bisect_left(bp, t)
        if idx == len(bp):
            return self.tail_value
        if bp[idx] == t:
            if idx == 0:
                return self.initial_value
            return self.segments[idx - 1].end
        return self.segments[idx - 1].value_at(t, bp[idx - 1], bp[idx])

    def right_limit_tuple(self, t: float) -> Vector:
        if t < 0:
            raise ValueError("trajectories are defined on [0, infinity)")
        bp = self.breakpoints
        idx = bisect_left(bp, t)
        if idx < len(bp) and bp[idx] == t:
            return self.right_limits[idx]
        if idx == len(bp):
            return self.tail_value
        # Interior of a segment: the function is continuous there.
        return self.value_tuple(t)

    def eval(self, t: float) -> np.ndarray:
        """Value at time t under the left-continuous convention."""
        return np.asarray(self.value_tuple(t), dtype=float)

    def right_limit(self, t: float) -> np.ndarray:
        """Limit from the right at time t."""
        return np.asarray(self.right_limit_tuple(t), dtype=float)

    # -- structure queries --------------------------------------------------

    def disc_set(self, horizon: float) -> tuple[float, ...]:
        """Breakpoints in (0, horizon] where the value and right limit differ."""
        if horizon <= 0:
            raise ValueError("horizon must be positive")
        jumps = []
        limits = self.right_limits
        for j, t in enumerate(self.breakpoints):
            if t <= 0 or t > horizon:
                continue
            if self.value_tuple(t) != limits[j]:
                jumps.append(t)
        return tuple(jumps)

    def has_jump_at_zero(self) -> bool:
        return self.initial_value != self.right_limits[0]

    # -- operators -----------------------------------------------------------

    def project(self, k: int) -> "Trajectory":
        """Scalar trajectory of coordinate k (1-based)."""
        if not 1 <= k <= self.dim:
            raise ValueError(f"coordinate index {k} out of range 1..{self.dim}")
        i = k - 1
        segs = tuple(Segment((s.start[i],), (s.end[i],)) for s in self.segments)
        return Trajectory(
            1, self.breakpoints, segs, (self.initial_value[i],), (self.tail_value[i],)
        )

    def shift(self, offset: float) -> "Trajectory":
        """Trajectory t -> value(offset + t); requires offset > 0."""
        if offset <= 0:
            raise ValueError("shift offset must be positive")
        bp = self.breakpoints
        if offset >= bp[-1]:
            init = self.value_tuple(offset)
            return Trajectory(self.dim, (0.0,), (), init, self.tail_value)
        j = bisect_right(bp, offset) - 1  # bp[j] <= offset < bp[j+1]
        new_bp = (0.0,) + tuple(t - offset for t in bp[j + 1 :])
        if bp[j] == offset:
            new_segs = self.segments[j:]
            init = self.value_tuple(offset)
        else:
            cut = self.segments[j].value_at(offset, bp[j], bp[j + 1])
            new_segs = (Segment(cut, self.segments[j].end),) + self.segments[j + 1 :]
            init = cut
        return Trajectory(self.dim, new_bp, new_segs, init, self.tail_value)

    def truncate(self, horizon: float) -> "Trajectory":
        """Freeze the trajectory at its value from `horizon` onwards."""
        if horizon <= 0:
            raise ValueError("horizon must be positive")
        bp = self.breakpoints
        if bp[-1] <= horizon:
            return self
        j = bisect_right(bp, horizon) - 1  # bp[j] <= horizon < bp[j+1]
        frozen = self.value_tuple(horizon)
        new_bp = bp[: j + 1]
        new_segs = self.segments[:j]
        if bp[j] != horizon:
            cut = Segment(self.segments[j].start, frozen)
            new_bp = new_bp + (horizon,)
            new_segs = new_segs + (cut,)
        return Trajectory(self.dim, new_bp, new_segs, self.initial_value, frozen)

    def extend(self, horizon: float) -> "ExtendedTrajectory":
        """Compact extension: initial value on [-1,0], frozen after `horizon`."""
        return ExtendedTrajectory(self, horizon)


def continue_at(first: Trajectory, second: Trajectory, at: float) -> Trajectory:
    """Splice: `first` on [0, at], then `second` restarted at time `at`.

    The right limit at the junction is second's right limit at 0, so a jump
    may appear there; left-continuity at the junction comes from `first`.
    """
    if at <= 0:
        raise ValueError("continuation time must be positive")
    if first.dim != second.dim:
        raise ValueError("dimension mismatch between trajectories")
    bp1 = first.breakpoints
    if at < bp1[-1]:
        j = bisect_right(bp1, at) - 1
        head_bp = bp1[: j + 1]
        head_segs = list(first.segments[:j])
        if bp1[j] != at:
            cut = first.segments[j].value_at(at, bp1[j], bp1[j + 1])
            head_segs.append(Segment(first.segments[j].start, cut))
            head_bp = head_bp + (at,)
    elif at == bp1[-1]:
        head_bp = bp1
        head_segs = list(first.segments)
    else:
        head_bp = bp1 + (at,)
        head_segs = list(first.segments) + [Segment(first.tail_value, first.tail_value)]
    tail_bp = tuple(at + t for t in second.breakpoints[1:])
    segs = tuple(head_segs) + second.segments
    return Trajectory(
        first.dim, head_bp + tail_bp, segs, first.initial_value, second.tail_value
    )


@dataclass(frozen=True)
class ExtendedTrajectory:
    """View of a trajectory on [-1, horizon + 1].

    Takes the value at 0 on [-1, 0], the trajectory itself on (0, horizon),
    and the value at `horizon` on [horizon, horizon + 1].  Any jump exactly at
    `horizon` is removed by the construction.
    """

    base: Trajectory
    horizon: float

    def __post_init__(self) -> None:
        if self.horizon <= 0:
            raise ValueError("extension horizon must be positive")
        object.__setattr__(self, "horizon", float(self.horizon))

    def _check_domain(self, t: float) -> None:
        if t < -1.0 or t > self.horizon + 1.0:
            raise ValueError(f"time {t} outside [-1, {self.horizon + 1}]")

    def value_tuple(self, t: float) -> Vector:
        self._check_domain(t)
        if t <= 0.0:
            return self.base.initial_value
        if t >= self.horizon:
            return self.base.value_tuple(self.horizon)
        return self.base.value_tuple(t)

    def right_limit_tuple(self, t: float) -> Vector:
        self._check_domain(t)
        if t < 0.0:
            return self.base.initial_value
        if t >= self.horizon:
            return self.base.value_tuple(self.horizon)
        return self.base.right_limit_tuple(t)

    def eval(self, t: float) -> np.ndarray:
        return np.asarray(self.value_tuple(t), dtype=float)

    def right_limit(self, t: float) -> np.ndarray:
        return np.asarray(self.right_limit_tuple(t), dtype=float)

    def knots(self) -> tuple[float, ...]:
        """Times partitioning [-1, horizon+1] into affine pieces."""
        inner = [t for t in self.base.breakpoints if 0.0 < t < self.horizon]
        return (-1.0, 0.0, *inner, self.horizon, self.horizon + 1.0)


# -- serialization -----------------------------------------------------------


def trajectory_to_dict(traj: Trajectory) -> dict:
    segments = []
    for seg in traj.segments:
        if seg.is_constant:
            segments.append({"kind": "const", "v": list(seg.start)})
        else:
            segments.append({"kind": "linear", "v0": list(seg.start), "v1": list(seg.end)})
    return {
        "dim": traj.dim,
        "initial_value": list(traj.initial_value),
        "right_limit_0": list(traj.right_limits[0]),
        "breakpoints": list(traj.breakpoints),
        "segments": segments,
        "right_limits": [list(v) for v in traj.right_limits],
        "tail": list(traj.tail_value),
    }


def trajectory_from_dict(data: dict) -> Trajectory:
    try:
        dim = int(data["dim"])
        breakpoints = [float(t) for t in data["breakpoints"]]
        raw_segments = data["segments"]
        initial = data["initial_value"]
        tail = data["tail"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed trajectory record: {exc}") from exc
    if any(b <= a for a, b in zip(breakpoints, breakpoints[1:])):
        raise ValueError("breakpoints must be strictly increasing")
    segments = []
    for rec in raw_segments:
        kind = rec.get("kind")
        if kind == "const":
            v = _as_vector(rec["v"], dim)
            segments.append(Segment(v, v))
        elif kind == "linear":
            segments.append(Segment(_as_vector(rec["v0"], dim), _as_vector(rec["v1"], dim)))
        else:
            raise ValueError(f"unknown segment kind: {kind!r}")
    traj = Trajectory(dim, tuple(breakpoints), tuple(segments), tuple(initial), tuple(tail))
    if "right_limits" in data:
        declared = [tuple(float(x) for x in v) for v in data["right_limits"]]
        if declared != [tuple(v) for v in traj.right_limits] and declared != [
            tuple(v) for v in _right_limits_of(breakpoints, segments, tuple(tail))
        ]:
            raise ValueError("declared right limits contradict the segment data")
    return traj


def _right_limits_of(
    breakpoints: list[float], segments: list[Segment], tail: Vector
) -> list[Vector]:
    return [seg.start for seg in segments] + [tail]

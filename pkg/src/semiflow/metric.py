"""Skorokhod-type distances on trajectories via completed graphs.

The compact-interval distance treats a scalar trajectory on [-1, M+1] as a
connected curve in the (time, value) plane: the graph of the extended
function plus a vertical segment at each jump.  The distance between two such
curves is the infimum over monotone parametric matchings of the larger of the
time and value mismatch, approximated here by a discrete Frechet dynamic
program over sampled polylines with Chebyshev ground cost and resolution
refinement.  Jump values themselves never enter, only the left and right
limits, which is the point of the completed-graph construction.

The full distance between vector trajectories sums the per-coordinate,
per-horizon compact distances with weights 2^-(M+k) after the bounded
transform d -> d/(1+d); truncating the double sum at M+k <= N leaves a tail
of at most (N+1) * 2^-N, reported as a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .trajectory import Trajectory

__all__ = [
    "CompletedGraph",
    "CompactDistance",
    "MetricReport",
    "MetricRefinementError",
    "completed_graph",
    "skorokhod_distance",
    "skorokhod_distance_report",
    "tail_bound",
    "trajectory_distance",
    "sup_distance",
    "check_convergence_ae",
    "check_monotone_equiv",
    "check_continuous_uniform",
    "is_monotone_scalar",
]

DEFAULT_RESOLUTION = 64
DEFAULT_DM_TOL = 1e-6
DEFAULT_TRUNCATION = 12


class MetricRefinementError(RuntimeError):
    """Raised when resolution doubling fails to stabilise the distance.

    Carries the best bracket seen: the true distance lies in
    [value - spacing, value] for the finest computed sampling.
    """

    def __init__(self, value: float, spacing: float, resolution: int):
        super().__init__(
            f"distance refinement did not converge: value={value!r} "
            f"bracket=[{value - spacing!r}, {value!r}] at resolution {resolution}"
        )
        self.value = value
        self.spacing = spacing
        self.resolution = resolution


@dataclass(frozen=True)
class CompletedGraph:
    """Polyline tracing a scalar trajectory's completed graph on [-1, M+1]."""

    vertices: tuple[tuple[float, float], ...]
    horizon: float

    def __post_init__(self) -> None:
        times = [p[0] for p in self.vertices]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("completed graph times must be non-decreasing")
        if not self.vertices or self.vertices[0][0] != -1.0:
            raise ValueError("completed graph must start at time -1")
        if self.vertices[-1][0] != self.horizon + 1.0:
            raise ValueError("completed graph must end at time horizon + 1")

    def sample(self, resolution: int) -> np.ndarray:
        """Sample each polyline segment at `resolution` points (endpoints shared)."""
        if resolution < 2:
            raise ValueError("resolution must be at least 2")
        pts = np.asarray(self.vertices, dtype=float)
        chunks = [pts[:1]]
        for a, b in zip(pts[:-1], pts[1:]):
            theta = np.linspace(0.0, 1.0, resolution)[1:, None]
            chunks.append(a[None, :] + theta * (b - a)[None, :])
        return np.concatenate(chunks, axis=0)

    def spacing(self, resolution: int) -> float:
        """Largest Chebyshev gap between consecutive samples at `resolution`."""
        pts = np.asarray(self.vertices, dtype=float)
        gaps = np.abs(pts[1:] - pts[:-1]).max(axis=1)
        return float(gaps.max()) / (resolution - 1) if len(gaps) else 0.0


def completed_graph(phi: Trajectory, horizon: float) -> CompletedGraph:
    """Completed graph of a scalar trajectory extended to [-1, horizon+1]."""
    if phi.dim != 1:
        raise ValueError("completed graphs are defined for scalar trajectories")
    ext = phi.extend(horizon)
    verts: list[tuple[float, float]] = []

    def push(t: float, v: float) -> None:
        if verts and verts[-1] == (t, v):
            return
        if len(verts) >= 2:
            (t0, v0), (t1, v1) = verts[-2], verts[-1]
            cross = (t1 - t0) * (v - v1) - (v1 - v0) * (t - t1)
            along = (t1 - t0) * (t - t1) + (v1 - v0) * (v - v1)
            if cross == 0.0 and along >= 0.0:
                verts[-1] = (t, v)
                return
        verts.append((t, v))

    for t in ext.knots():
        push(t, ext.value_tuple(t)[0])
        r = ext.right_limit_tuple(t)[0]
        if r != ext.value_tuple(t)[0]:
            push(t, r)
    return CompletedGraph(tuple(verts), float(horizon))


def _discrete_frechet(p: np.ndarray, q: np.ndarray) -> float:
    """Discrete Frechet distance with Chebyshev ground cost, by anti-diagonals.

    Each anti-diagonal of the min-max table depends only on the previous two,
    so the table fills with vectorised slices instead of a cell loop.
    """
    cost = np.maximum(
        np.abs(p[:, 0, None] - q[None, :, 0]), np.abs(p[:, 1, None] - q[None, :, 1])
    )
    m, n = cost.shape
    prev = prev2 = None
    prev_lo = prev2_lo = 0

    def gather(arr: np.ndarray | None, arr_lo: int, want: np.ndarray) -> np.ndarray:
        out = np.full(want.shape, np.inf)
        if arr is None:
            return out
        pos = want - arr_lo
        ok = (pos >= 0) & (pos < len(arr)) & (want >= 0)
        out[ok] = arr[pos[ok]]
        return out

    for s in range(m + n - 1):
        lo = max(0, s - n + 1)
        hi = min(m - 1, s)
        i = np.arange(lo, hi + 1)
        d = cost[i, s - i]
        if s == 0:
            cur = d
        else:
            best = np.minimum(
                np.minimum(gather(prev, prev_lo, i - 1), gather(prev, prev_lo, i)),
                gather(prev2, prev2_lo, i - 1),
            )
            cur = np.maximum(d, best)
        prev2, prev2_lo = prev, prev_lo
        prev, prev_lo = cur, lo
    return float(prev[-1])


@dataclass(frozen=True)
class CompactDistance:
    """Compact-interval distance with its sampling certificate.

    The true matching infimum lies in [value - spacing, value].
    """

    value: float
    spacing: float
    resolution: int
    refinements: int


def skorokhod_distance_report(
    phi: Trajectory,
    psi: Trajectory,
    horizon: float,
    resolution: int = DEFAULT_RESOLUTION,
    tol: float | None = DEFAULT_DM_TOL,
    max_refinements: int = 6,
) -> CompactDistance:
    """Completed-graph distance on [-1, horizon+1] with refinement bracket.

    Both argument orders are evaluated and the larger kept, so the result is
    symmetric by construction.  With ``tol=None`` a single fixed-resolution
    pass is made; fixed resolution keeps the discrete distance an exact
    metric across pairs, which the axiom tests rely on.
    """
    if phi.dim != 1 or psi.dim != 1:
        raise ValueError("compact distance is defined for scalar trajectories")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    ga = completed_graph(phi, horizon)
    gb = completed_graph(psi, horizon)
    r = resolution
    previous = None
    for step in range(max_refinements + 1):
        a = ga.sample(r)
        b = gb.sample(r)
        value = max(_discrete_frechet(a, b), _discrete_frechet(b, a))
        spacing = max(ga.spacing(r), gb.spacing(r))
        if tol is None or (previous is not None and abs(value - previous) < tol):
            return CompactDistance(value, spacing, r, step)
        previous = value
        r *= 2
    raise MetricRefinementError(previous, max(ga.spacing(r // 2), gb.spacing(r // 2)), r // 2)


def skorokhod_distance(
    phi: Trajectory,
    psi: Trajectory,
    horizon: float,
    resolution: int = DEFAULT_RESOLUTION,
    tol: float | None = DEFAULT_DM_TOL,
    max_refinements: int = 6,
) -> float:
    return skorokhod_distance_report(phi, psi, horizon, resolution, tol, max_refinements).value


def tail_bound(truncation: int) -> float:
    """Bound on all omitted terms with M + k > truncation: (N+1) * 2^-N."""
    return (truncation + 1) * 2.0 ** (-truncation)


@dataclass(frozen=True)
class MetricReport:
    """Truncated product distance with a certified truncation tail."""

    value: float
    truncation: int
    tail_bound: float
    terms: tuple[tuple[int, int, float], ...]  # (horizon M, coordinate k, distance)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "N": self.truncation,
            "tail_bound": self.tail_bound,
            "terms": [{"M": m, "k": k, "dM": d} for m, k, d in self.terms],
        }


def trajectory_distance(
    a: Trajectory,
    b: Trajectory,
    truncation: int = DEFAULT_TRUNCATION,
    resolution: int = DEFAULT_RESOLUTION,
    tol: float | None = DEFAULT_DM_TOL,
    max_refinements: int = 6,
) -> MetricReport:
    """Weighted sum over horizons M and coordinates k with M + k <= truncation.

    Coordinates beyond the shared dimension project to identical zero
    trajectories and contribute nothing, so they are skipped outright.
    """
    if a.dim != b.dim:
        raise ValueError("trajectories must share a coordinate dimension")
    if truncation < 2:
        raise ValueError("truncation level must be at least 2")
    value = 0.0
    terms = []
    for m in range(1, truncation):
        for k in range(1, min(a.dim, truncation - m) + 1):
            d = skorokhod_distance(
                a.project(k), b.project(k), float(m), resolution, tol, max_refinements
            )
            value += 2.0 ** (-(m + k)) * d / (1.0 + d)
            terms.append((m, k, d))
    return MetricReport(value, truncation, tail_bound(truncation), tuple(terms))


def sup_distance(a: Trajectory, b: Trajectory, horizon: float) -> float:
    """Exact uniform distance of the extended functions on [-1, horizon+1].

    Piecewise-affine differences attain their supremum at knots or one-sided
    limits, so evaluating both at every knot of either trajectory is exact.
    """
    if a.dim != b.dim:
        raise ValueError("trajectories must share a coordinate dimension")
    ea, eb = a.extend(horizon), b.extend(horizon)
    knots = sorted(set(ea.knots()) | set(eb.knots()))
    worst = 0.0
    for t in knots:
        dv = max(abs(x - y) for x, y in zip(ea.value_tuple(t), eb.value_tuple(t)))
        dr = max(abs(x - y) for x, y in zip(ea.right_limit_tuple(t), eb.right_limit_tuple(t)))
        worst = max(worst, dv, dr)
    return worst


# -- convergence diagnostics ---------------------------------------------------


def is_monotone_scalar(phi: Trajectory, horizon: float) -> bool:
    """True when the scalar trajectory is non-increasing or non-decreasing on [0, horizon]."""
    if phi.dim != 1:
        raise ValueError("monotonicity check expects a scalar trajectory")
    seq: list[float] = [phi.initial_value[0]]
    limits = phi.right_limits
    for j, t in enumerate(phi.breakpoints):
        if t > horizon:
            break
        seq.append(phi.value_tuple(t)[0])
        seq.append(limits[j][0])
    seq.append(phi.value_tuple(horizon)[0])
    up = all(x <= y for x, y in zip(seq, seq[1:]))
    down = all(x >= y for x, y in zip(seq, seq[1:]))
    return up or down


@dataclass(frozen=True)
class PointwiseDiagnostic:
    converged: bool
    exceptional: tuple[float, ...]
    checked: tuple[float, ...]


def check_convergence_ae(
    sequence: list[Trajectory],
    limit: Trajectory,
    k: int,
    sample_times: list[float],
    tol: float = 1e-6,
    tail_window: int | None = None,
) -> PointwiseDiagnostic:
    """Pointwise convergence of coordinate k off the limit's jump set.

    A sample time counts as converged when every member in the trailing
    window stays within `tol` of the limit there.  Jump times of the limit
    are excluded from the check and never enter the exceptional set.
    """
    if not sequence:
        raise ValueError("need at least one trajectory in the sequence")
    if any(t.dim != limit.dim for t in sequence):
        raise ValueError("dimension mismatch in sequence")
    horizon = max(sample_times) if sample_times else 1.0
    jumps = set(limit.disc_set(max(horizon, 1e-9)))
    window = tail_window if tail_window is not None else max(1, len(sequence) // 4)
    tail = sequence[-window:]
    exceptional = []
    checked = []
    i = k - 1
    for t in sample_times:
        if t in jumps:
            continue
        checked.append(t)
        target = limit.value_tuple(t)[i]
        if any(abs(member.value_tuple(t)[i] - target) > tol for member in tail):
            exceptional.append(t)
    return PointwiseDiagnostic(not exceptional, tuple(exceptional), tuple(checked))


@dataclass(frozen=True)
class EquivalenceDiagnostic:
    pointwise_converges: bool
    metric_converges: bool
    distances: tuple[float, ...]

    @property
    def agree(self) -> bool:
        return self.pointwise_converges == self.metric_converges


def check_monotone_equiv(
    sequence: list[Trajectory],
    limit: Trajectory,
    horizon: float,
    tol: float,
    resolution: int = 16,
) -> EquivalenceDiagnostic:
    """Monotone members: sampled pointwise and metric verdicts must agree."""
    for member in sequence:
        if not is_monotone_scalar(member, horizon):
            raise ValueError("check_monotone_equiv requires monotone members")
    grid = [horizon * i / 64.0 for i in range(65)]
    pointwise = check_convergence_ae(sequence, limit, 1, grid, tol)
    distances = tuple(
        skorokhod_distance(member, limit, horizon, resolution, tol=None)
        for member in sequence
    )
    metric_ok = distances[-1] <= tol
    return EquivalenceDiagnostic(pointwise.converged, metric_ok, distances)


def check_continuous_uniform(
    sequence: list[Trajectory],
    limit: Trajectory,
    horizon: float,
    k: int,
    tol: float,
    resolution: int = 16,
) -> EquivalenceDiagnostic:
    """Continuous members: uniform and metric verdicts must agree."""
    for member in sequence:
        if member.disc_set(horizon) or member.has_jump_at_zero():
            raise ValueError("check_continuous_uniform requires continuous members")
    sups = tuple(
        sup_distance(member.project(k), limit.project(k), horizon) for member in sequence
    )
    distances = tuple(
        skorokhod_distance(member.project(k), limit.project(k), horizon, resolution, tol=None)
        for member in sequence
    )
    return EquivalenceDiagnostic(sups[-1] <= tol, distances[-1] <= tol, distances)

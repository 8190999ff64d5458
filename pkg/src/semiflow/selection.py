"""Laplace-weighted selection of a single trajectory from finite candidate sets.

Each selection step evaluates the exponentially discounted integral of a
bounded strictly increasing transform of one coordinate and keeps the
candidates attaining the minimum (up to a tie tolerance).  Iterating the
steps along a fixed enumeration of (decay rate, coordinate) pairs shrinks a
candidate set to a single trajectory; distinct trajectories cannot share all
functional values because the integrals determine the transformed coordinate
paths almost everywhere, so a stall at the iteration budget is resolved by a
pairwise-distance coincidence check instead of an arbitrary pick.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .bundle import Bundle
from .metric import trajectory_distance
from .trajectory import Trajectory, trajectory_to_dict

__all__ = [
    "Envelope",
    "SelectionFunctional",
    "SelectionConfig",
    "TraceStep",
    "SelectionOutcome",
    "QuadratureBudgetError",
    "NonSingletonSelection",
    "MissingEnergyCoordinate",
    "dyadic_rate",
    "rate_coordinate_pair",
    "eval_functional",
    "argmin_reduce",
    "select",
    "energy_first_select",
    "semigroup_check",
    "SemigroupVerdict",
]


class QuadratureBudgetError(RuntimeError):
    """Adaptive quadrature ran out of subdivisions; carries its best estimate."""

    def __init__(self, partial: float, estimate: float, detail: str):
        super().__init__(f"quadrature budget exhausted ({detail}); partial={partial!r}")
        self.partial = partial
        self.estimate = estimate


class MissingEnergyCoordinate(ValueError):
    """Energy-first selection on a bundle that declares no energy coordinate."""


class NonSingletonSelection(RuntimeError):
    """Iteration budget reached with survivors that are not coincident."""

    def __init__(self, survivors: tuple[Trajectory, ...], trace: tuple["TraceStep", ...]):
        super().__init__(f"selection stalled with {len(survivors)} non-coincident survivors")
        self.survivors = survivors
        self.trace = trace


@dataclass(frozen=True)
class Envelope:
    """Smooth, bounded, strictly increasing transform applied inside the integral.

    tanh with a configurable input scale; larger scales delay saturation on
    large-magnitude coordinates.
    """

    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError("envelope scale must be positive")

    def __call__(self, z: float) -> float:
        return math.tanh(z / self.scale)

    @property
    def bound(self) -> float:
        return 1.0


@dataclass(frozen=True)
class SelectionFunctional:
    """Discounted coordinate functional: integral of e^(-decay*t) f(x_k(t))."""

    decay: float
    coord: int
    envelope: Envelope = Envelope()
    quad_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.decay <= 0:
            raise ValueError("decay rate must be positive")
        if self.coord < 1:
            raise ValueError("coordinate index is 1-based")
        if self.quad_tol <= 0:
            raise ValueError("quadrature tolerance must be positive")


def eval_functional(traj: Trajectory, functional: SelectionFunctional) -> float:
    """Evaluate the discounted integral over [0, infinity).

    Constant pieces and the constant tail integrate in closed form; affine
    pieces go through adaptive quadrature at relative tolerance quad_tol.
    The result is bounded by sup|f| / decay.
    """
    if functional.coord > traj.dim:
        raise ValueError(f"coordinate {functional.coord} exceeds dimension {traj.dim}")
    lam = functional.decay
    f = functional.envelope
    i = functional.coord - 1
    total = 0.0
    bp = traj.breakpoints
    for j, seg in enumerate(traj.segments):
        t0, t1 = bp[j], bp[j + 1]
        if seg.is_constant:
            total += f(seg.start[i]) * (math.exp(-lam * t0) - math.exp(-lam * t1)) / lam
            continue
        a, b = seg.start[i], seg.end[i]
        if a == b:
            total += f(a) * (math.exp(-lam * t0) - math.exp(-lam * t1)) / lam
            continue
        slope = (b - a) / (t1 - t0)

        def integrand(t: float, a: float = a, t0: float = t0, slope: float = slope) -> float:
            return math.exp(-lam * t) * f(a + slope * (t - t0))

        value, err, info, *trouble = quad(
            integrand, t0, t1, epsabs=1e-14, epsrel=functional.quad_tol,
            limit=200, full_output=1,
        )
        if trouble:
            raise QuadratureBudgetError(total + value, err, str(trouble[0]))
        total += value
    total += f(traj.tail_value[i]) * math.exp(-lam * bp[-1]) / lam
    return total


def argmin_reduce(
    candidates: Sequence[Trajectory],
    functional: SelectionFunctional,
    tie_tol: float = 0.0,
) -> list[Trajectory]:
    """Keep every candidate within tie_tol of the minimal functional value.

    The result is a non-empty subset of the input, stable under permutation
    of the candidate list, and reducing twice changes nothing.
    """
    if not candidates:
        raise ValueError("argmin_reduce needs a non-empty candidate set")
    if tie_tol < 0:
        raise ValueError("tie tolerance must be non-negative")
    values = [eval_functional(c, functional) for c in candidates]
    cutoff = min(values) + tie_tol
    return [c for c, v in zip(candidates, values) if v <= cutoff]


# -- enumerations --------------------------------------------------------------


def dyadic_rate(j: int) -> float:
    """j-th decay rate from the diagonal enumeration of odd/2^q dyadics.

    Walks diagonals of (odd numerator index, exponent): 1, 1/2, 3, 1/4, 3/2,
    5, 1/8, ...  Every positive dyadic rational appears exactly once, so the
    set is dense in (0, infinity).
    """
    if j < 1:
        raise ValueError("rate index is 1-based")
    r = j - 1
    s = 0
    while r >= s + 1:
        r -= s + 1
        s += 1
    a, q = r, s - r
    return (2 * a + 1) / 2.0**q


def rate_coordinate_pair(i: int, dim: int) -> tuple[int, int]:
    """i-th (rate index, coordinate) pair, diagonal over j >= 1, 1 <= k <= dim."""
    if i < 1:
        raise ValueError("enumeration index is 1-based")
    if dim < 1:
        raise ValueError("dimension must be positive")
    count = 0
    s = 2
    while True:
        width = min(dim, s - 1)
        if i <= count + width:
            k = i - count
            return s - k, k
        count += width
        s += 1


@dataclass(frozen=True)
class SelectionConfig:
    """Knobs for the iterated reduction. Defaults reproduce the CLI defaults."""

    max_iters: int = 64
    quad_tol: float = 1e-9
    tie_tol: float | None = None  # default: 10 * quad_tol
    envelope: Envelope = Envelope()
    coincidence_tol: float = 1e-6
    coincidence_truncation: int = 8
    coincidence_resolution: int = 8
    seed_order: str = "asc"  # survivor pick among coincident sets
    rate_enumeration: Callable[[int], float] = dyadic_rate
    index_enumeration: Callable[[int, int], tuple[int, int]] = rate_coordinate_pair

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.quad_tol <= 0:
            raise ValueError("quad_tol must be positive")
        if self.tie_tol is not None and self.tie_tol < 0:
            raise ValueError("tie_tol must be non-negative")
        if self.seed_order not in ("asc", "desc"):
            raise ValueError("seed_order must be 'asc' or 'desc'")

    def resolved_tie_tol(self) -> float:
        return 10.0 * self.quad_tol if self.tie_tol is None else self.tie_tol


@dataclass(frozen=True)
class TraceStep:
    """One reduction step: enumeration index, rate, coordinate, survivors, minimum."""

    i: int
    rate: float
    coord: int
    survivors: int
    min_value: float

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "lambda": self.rate,
            "k": self.coord,
            "survivors": self.survivors,
            "min_value": self.min_value,
        }


@dataclass(frozen=True)
class SelectionOutcome:
    trajectory: Trajectory
    trace: tuple[TraceStep, ...]
    coincident: bool = False
    survivors: tuple[Trajectory, ...] = ()


def _run_selection(
    candidates: list[Trajectory],
    dim: int,
    config: SelectionConfig,
    lead_functionals: list[SelectionFunctional],
) -> SelectionOutcome:
    tie_tol = config.resolved_tie_tol()
    survivors = list(candidates)
    trace: list[TraceStep] = []
    step = 0
    enumeration_cursor = 0
    while step < config.max_iters:
        step += 1
        if lead_functionals:
            functional = lead_functionals.pop(0)
        else:
            enumeration_cursor += 1
            j, k = config.index_enumeration(enumeration_cursor, dim)
            functional = SelectionFunctional(
                config.rate_enumeration(j), k, config.envelope, config.quad_tol
            )
        values = [eval_functional(c, functional) for c in survivors]
        cutoff = min(values) + tie_tol
        survivors = [c for c, v in zip(survivors, values) if v <= cutoff]
        trace.append(
            TraceStep(step, functional.decay, functional.coord, len(survivors), min(values))
        )
        if len(survivors) == 1:
            return SelectionOutcome(survivors[0], tuple(trace))
    if len(survivors) == 1:
        return SelectionOutcome(survivors[0], tuple(trace))
    for a in range(len(survivors)):
        for b in range(a + 1, len(survivors)):
            report = trajectory_distance(
                survivors[a],
                survivors[b],
                truncation=config.coincidence_truncation,
                resolution=config.coincidence_resolution,
                tol=None,
            )
            if report.value > config.coincidence_tol:
                raise NonSingletonSelection(tuple(survivors), tuple(trace))
    keyed = sorted(survivors, key=lambda t: json.dumps(trajectory_to_dict(t)))
    chosen = keyed[0] if config.seed_order == "asc" else keyed[-1]
    return SelectionOutcome(chosen, tuple(trace), coincident=True, survivors=tuple(survivors))


def select(bundle: Bundle, point, config: SelectionConfig | None = None) -> SelectionOutcome:
    """Reduce the candidate set at `point` to a single trajectory.

    Applies argmin reductions along the configured enumeration until a
    singleton survives or the budget runs out; at the budget, pairwise
    near-zero distance between survivors is accepted as coincidence and
    resolved by serialization order.
    """
    config = config or SelectionConfig()
    candidates = list(bundle.lookup(point))
    return _run_selection(candidates, bundle.dim, config, [])


def energy_first_select(
    bundle: Bundle, point, config: SelectionConfig | None = None
) -> SelectionOutcome:
    """Like select, but the first reduction minimises the unit-rate energy integral."""
    config = config or SelectionConfig()
    if bundle.energy_index is None:
        raise MissingEnergyCoordinate("bundle declares no energy coordinate")
    lead = [
        SelectionFunctional(1.0, bundle.energy_index, config.envelope, config.quad_tol)
    ]
    candidates = list(bundle.lookup(point))
    return _run_selection(candidates, bundle.dim, config, lead)


@dataclass(frozen=True)
class SemigroupVerdict:
    passed: bool
    discrepancy: float
    t1: float
    t2: float


def semigroup_check(
    select_fn: Callable[[Bundle, object], SelectionOutcome],
    bundle: Bundle,
    point,
    t1: float,
    t2: float,
    tol: float,
) -> SemigroupVerdict:
    """Verify select(x)(t1+t2) == select(select(x)(t1))(t2) at one grid pair.

    Raises UnknownInitialPoint when the state reached at t1 is not a bundle
    key, which signals that the bundle is not closed under shifts.
    """
    if t1 < 0 or t2 < 0:
        raise ValueError("shift times must be non-negative")
    first = select_fn(bundle, point).trajectory
    mid_state = first.eval(t1)
    second = select_fn(bundle, mid_state).trajectory
    gap = float(np.max(np.abs(first.eval(t1 + t2) - second.eval(t2))))
    return SemigroupVerdict(gap <= tol, gap, t1, t2)

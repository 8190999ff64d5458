"""Generators of analytically understood trajectory bundles and step fixtures.

The power-law ODE x' = c * x^alpha with alpha in (0, 1) started at zero has a
one-parameter family of forward solutions: wait at zero for any time s, then
grow along [c (1-alpha) (t-s)]^(1/(1-alpha)).  The bundle generator samples
these on a dyadic grid as piecewise-affine trajectories, keys them by
quantized initial point, and closes the result on the shift grid so every
reachable state carries its candidate set.  Positive initial points pick up
the unique forward branch through the closure.

The step generator produces non-increasing jump profiles used as energy-like
fixtures by the metric diagnostics and the admissibility preorder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bundle import Bundle, DEFAULT_QUANTUM, generate_closure
from .trajectory import Segment, Trajectory

__all__ = [
    "SqrtOdeFamily",
    "waiting_solution_value",
    "waiting_solution",
    "gen_sqrt_ode_bundle",
    "step_trajectory",
    "gen_step_family",
]


@dataclass(frozen=True)
class SqrtOdeFamily:
    """Configuration of the non-unique power-law ODE bundle.

    closure: "shift" closes under shifts only (enough for semigroup runs on
    fine grids), "full" also closes under continuations (finite only for
    coarse grids; frozen tails re-enter the dynamics otherwise), "none"
    leaves the seed family untouched.
    """

    alpha: float = 0.5
    rate: float = 1.0
    waiting_times: tuple[float, ...] = (0.0, 1.0, 2.0, math.inf)
    horizon: float = 8.0
    samples_per_unit: int = 8
    time_grid: tuple[float, ...] = (0.5, 1.0, 1.5, 2.0)
    quantum: float = DEFAULT_QUANTUM
    closure: str = "shift"
    closure_budget: int = 20000

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.rate <= 0:
            raise ValueError("growth rate must be positive")
        if not self.waiting_times:
            raise ValueError("need at least one waiting time")
        if self.horizon <= 0 or self.samples_per_unit < 1:
            raise ValueError("horizon and sampling resolution must be positive")
        if self.closure not in ("shift", "full", "none"):
            raise ValueError("closure must be one of shift|full|none")


def waiting_solution_value(family: SqrtOdeFamily, s: float, t: float) -> float:
    """Closed-form solution with waiting time s, evaluated at t."""
    if t <= s:
        return 0.0
    power = 1.0 / (1.0 - family.alpha)
    return (family.rate * (1.0 - family.alpha) * (t - s)) ** power


def waiting_solution(family: SqrtOdeFamily, s: float) -> Trajectory:
    """Piecewise-affine sampling of the waiting solution on the family grid."""
    n = int(round(family.horizon * family.samples_per_unit))
    times = [i / family.samples_per_unit for i in range(n + 1)]
    values = [(waiting_solution_value(family, s, t),) for t in times]
    return Trajectory.from_samples(times, values)


def gen_sqrt_ode_bundle(family: SqrtOdeFamily) -> Bundle:
    """Bundle of waiting solutions at the origin, closed per the family config."""
    members = {waiting_solution(family, s): None for s in family.waiting_times}
    seed = Bundle.from_groups(
        dim=1,
        quantum=family.quantum,
        time_grid=family.time_grid,
        groups=[((0.0,), list(members))],
        horizon=family.horizon,
    )
    if family.closure == "none":
        return seed
    return generate_closure(
        seed,
        budget=family.closure_budget,
        continuations=(family.closure == "full"),
    )


def step_trajectory(levels, jump_times, horizon: float) -> Trajectory:
    """Non-increasing step profile: levels[i] on (jump_{i-1}, jump_i]."""
    levels = [float(v) for v in levels]
    jumps = [float(t) for t in jump_times]
    if len(levels) != len(jumps) + 1:
        raise ValueError("need exactly one more level than jump times")
    if any(b <= a for a, b in zip(jumps, jumps[1:])):
        raise ValueError("jump times must be strictly increasing")
    if jumps and not (0.0 < jumps[0] and jumps[-1] < horizon):
        raise ValueError("jump times must lie inside (0, horizon)")
    if any(b > a for a, b in zip(levels, levels[1:])):
        raise ValueError("step profiles must be non-increasing")
    breakpoints = (0.0, *jumps)
    segments = tuple(Segment((levels[i],), (levels[i],)) for i in range(len(jumps)))
    return Trajectory(1, breakpoints, segments, (levels[0],), (levels[-1],))


def gen_step_family(heights, jump_times, horizon: float) -> list[Trajectory]:
    """Step fixtures: a flat `heights` gives one profile, nested gives a family.

    With nested heights, `jump_times` may be nested to vary per member or
    flat to share one jump schedule across the family.
    """
    if heights and isinstance(heights[0], (list, tuple)):
        if jump_times and isinstance(jump_times[0], (list, tuple)):
            pairs = list(zip(heights, jump_times))
        else:
            pairs = [(levels, jump_times) for levels in heights]
        return [step_trajectory(levels, jumps, horizon) for levels, jumps in pairs]
    return [step_trajectory(heights, jump_times, horizon)]

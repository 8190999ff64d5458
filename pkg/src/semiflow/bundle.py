"""Finite set-valued trajectory bundles with shift/continuation verifiers.

A bundle maps quantized initial points to finite, non-empty trajectory sets.
Keys are integer tuples (coordinates divided by the quantum and rounded), so
lookups never depend on float equality.  Verifiers check that shifting any
member lands in the set at the reached state (shift invariance) and that
splicing a member with a member from its reached state stays in the original
set (continuation).  At zero tolerance both checks compare canonical
trajectory structure exactly; with a positive tolerance they fall back to the
product metric.

Continuations of horizon-limited trajectories outrun every finite family, so
closure generation and the continuation check compare continuations after
freezing them at the bundle horizon.  Without that restriction no finite
bundle whose zero state carries more than one trajectory can be closed: the
splice map at a self-looping key strictly lengthens waiting times forever.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite

import numpy as np

from .trajectory import Trajectory, continue_at, trajectory_from_dict, trajectory_to_dict

__all__ = [
    "Bundle",
    "UnknownInitialPoint",
    "ClosureBudgetError",
    "Violation",
    "verify_P4",
    "verify_P5",
    "generate_closure",
    "bundle_to_dict",
    "bundle_from_dict",
]

DEFAULT_QUANTUM = 2.0**-20

Key = tuple[int, ...]


def _quantize(point, quantum: float, dim: int) -> Key:
    vec = np.atleast_1d(np.asarray(point, dtype=float))
    if vec.shape != (dim,):
        raise ValueError(f"point must have dimension {dim}")
    return tuple(int(round(float(x) / quantum)) for x in vec)


class UnknownInitialPoint(KeyError):
    """Lookup of a state that is not a bundle key.

    During shift or continuation checks this signals that the bundle is not
    closed: some member reaches a state with no recorded candidate set.
    """

    def __init__(self, point):
        super().__init__(str(point))
        self.point = tuple(float(x) for x in np.atleast_1d(point))

    def __str__(self) -> str:
        return f"no candidate set for initial point {self.point}"


class ClosureBudgetError(RuntimeError):
    """Closure generation hit its size budget; carries the partial bundle."""

    def __init__(self, partial: "Bundle", budget: int):
        super().__init__(f"closure exceeded the budget of {budget} trajectories")
        self.partial = partial
        self.budget = budget


@dataclass
class Bundle:
    """Immutable-after-construction map from quantized points to trajectory sets."""

    dim: int
    quantum: float
    time_grid: tuple[float, ...]
    entries: dict[Key, tuple[Trajectory, ...]]
    horizon: float
    energy_index: int | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not (self.quantum > 0 and isfinite(self.quantum)):
            raise ValueError("quantum must be a positive real")
        grid = tuple(float(t) for t in self.time_grid)
        if any(t <= 0 for t in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("time_grid must be strictly increasing and positive")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.energy_index is not None and not 1 <= self.energy_index <= self.dim:
            raise ValueError("energy_index out of range")
        self.time_grid = grid
        self.horizon = float(self.horizon)
        for key, trajectories in self.entries.items():
            if not trajectories:
                raise ValueError(f"empty candidate set at key {key}")
            for traj in trajectories:
                if traj.dim != self.dim:
                    raise ValueError("trajectory dimension mismatch in bundle")
                if self.quantize(traj.initial_value) != key:
                    raise ValueError(
                        f"trajectory at key {key} starts at {traj.initial_value}"
                    )

    # -- key handling ------------------------------------------------------

    def quantize(self, point) -> Key:
        return _quantize(point, self.quantum, self.dim)

    def key_point(self, key: Key) -> tuple[float, ...]:
        return tuple(k * self.quantum for k in key)

    def lookup(self, point) -> tuple[Trajectory, ...]:
        key = self.quantize(point)
        try:
            return self.entries[key]
        except KeyError:
            raise UnknownInitialPoint(point) from None

    @staticmethod
    def from_groups(
        dim: int,
        quantum: float,
        time_grid,
        groups,
        horizon: float,
        energy_index: int | None = None,
    ) -> "Bundle":
        """Build from (point, trajectories) pairs, quantizing the points."""
        entries: dict[Key, tuple[Trajectory, ...]] = {}
        for point, trajectories in groups:
            key = _quantize(point, quantum, dim)
            seen = dict.fromkeys(entries.get(key, ()))
            seen.update(dict.fromkeys(trajectories))
            entries[key] = tuple(seen)
        return Bundle(dim, quantum, tuple(time_grid), entries, horizon, energy_index)


@dataclass(frozen=True)
class Violation:
    """One failed shift or continuation membership check."""

    property: str  # "P4" or "P5"
    key: tuple[float, ...]
    T: float
    distance: float

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "key": list(self.key),
            "T": self.T,
            "distance": self.distance,
        }


def _matches(
    candidate: Trajectory, pool: tuple[Trajectory, ...], tol: float, metric_options: dict
) -> tuple[bool, float]:
    if tol == 0.0:
        hit = candidate in pool
        return hit, 0.0 if hit else float("inf")
    from .metric import trajectory_distance

    best = float("inf")
    for member in pool:
        best = min(best, trajectory_distance(candidate, member, **metric_options).value)
        if best <= tol:
            return True, best
    return best <= tol, best


def verify_P4(
    bundle: Bundle, tol: float = 0.0, metric_options: dict | None = None
) -> list[Violation]:
    """Check shift invariance: shifted members belong to the reached state's set."""
    metric_options = metric_options or {}
    violations = []
    for key, trajectories in bundle.entries.items():
        for traj in trajectories:
            for t in bundle.time_grid:
                reached = bundle.quantize(traj.value_tuple(t))
                if reached not in bundle.entries:
                    violations.append(
                        Violation("P4", bundle.key_point(key), t, float("inf"))
                    )
                    continue
                shifted = traj.shift(t)
                ok, dist = _matches(shifted, bundle.entries[reached], tol, metric_options)
                if not ok:
                    violations.append(Violation("P4", bundle.key_point(key), t, dist))
    return violations


def verify_P5(
    bundle: Bundle, tol: float = 0.0, metric_options: dict | None = None
) -> list[Violation]:
    """Check continuation: horizon-frozen splices stay in the starting set."""
    metric_options = metric_options or {}
    violations = []
    for key, trajectories in bundle.entries.items():
        pool = bundle.entries[key]
        for first in trajectories:
            for t in bundle.time_grid:
                reached = bundle.quantize(first.value_tuple(t))
                for second in bundle.entries.get(reached, ()):
                    spliced = continue_at(first, second, t).truncate(bundle.horizon)
                    ok, dist = _matches(spliced, pool, tol, metric_options)
                    if not ok:
                        violations.append(
                            Violation("P5", bundle.key_point(key), t, dist)
                        )
    return violations


def generate_closure(
    bundle: Bundle,
    budget: int = 20000,
    continuations: bool = True,
) -> Bundle:
    """Close the bundle under shifts (and optionally continuations) on its grid.

    Repeatedly inserts the shift of every member at the reached state's key
    and, when `continuations` is set, the horizon-frozen splice of every
    member pair joined through a grid time, until nothing new appears.  The
    result passes verify_P4 (and verify_P5) at zero tolerance by
    construction.  Continuation closure over fine grids can blow up
    combinatorially (frozen tails re-enter the dynamics as lazy variants), so
    a size budget guards the loop; exhausting it raises with the partial
    bundle attached.
    """
    entries: dict[Key, dict[Trajectory, None]] = {
        key: dict.fromkeys(trajs) for key, trajs in bundle.entries.items()
    }
    total = sum(len(v) for v in entries.values())

    def insert(key: Key, traj: Trajectory) -> bool:
        nonlocal total
        pool = entries.setdefault(key, {})
        if traj in pool:
            return False
        pool[traj] = None
        total += 1
        if total > budget:
            partial = Bundle(
                bundle.dim,
                bundle.quantum,
                bundle.time_grid,
                {k: tuple(v) for k, v in entries.items()},
                bundle.horizon,
                bundle.energy_index,
            )
            raise ClosureBudgetError(partial, budget)
        return True

    changed = True
    while changed:
        changed = False
        for key in list(entries):
            for traj in list(entries[key]):
                for t in bundle.time_grid:
                    reached = _quantize(traj.value_tuple(t), bundle.quantum, bundle.dim)
                    if insert(reached, traj.shift(t)):
                        changed = True
        if not continuations:
            continue
        for key in list(entries):
            for first in list(entries[key]):
                for t in bundle.time_grid:
                    reached = _quantize(first.value_tuple(t), bundle.quantum, bundle.dim)
                    for second in list(entries.get(reached, ())):
                        spliced = continue_at(first, second, t).truncate(bundle.horizon)
                        if insert(key, spliced):
                            changed = True
    return Bundle(
        bundle.dim,
        bundle.quantum,
        bundle.time_grid,
        {k: tuple(v) for k, v in entries.items()},
        bundle.horizon,
        bundle.energy_index,
    )


# -- serialization -------------------------------------------------------------


def bundle_to_dict(bundle: Bundle) -> dict:
    entry_list = []
    for key in sorted(bundle.entries):
        entry_list.append(
            {
                "key": list(bundle.key_point(key)),
                "trajectories": [
                    trajectory_to_dict(t) for t in bundle.entries[key]
                ],
            }
        )
    return {
        "dim": bundle.dim,
        "quantum": bundle.quantum,
        "time_grid": list(bundle.time_grid),
        "horizon": bundle.horizon,
        "energy_index": bundle.energy_index,
        "entries": entry_list,
    }


def bundle_from_dict(data: dict) -> Bundle:
    try:
        dim = int(data["dim"])
        quantum = float(data["quantum"])
        time_grid = tuple(float(t) for t in data["time_grid"])
        horizon = float(data["horizon"])
        energy_index = data.get("energy_index")
        raw_entries = data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed bundle record: {exc}") from exc
    groups = []
    for rec in raw_entries:
        point = tuple(float(x) for x in rec["key"])
        trajectories = [trajectory_from_dict(t) for t in rec["trajectories"]]
        groups.append((point, trajectories))
    return Bundle.from_groups(
        dim,
        quantum,
        time_grid,
        groups,
        horizon,
        int(energy_index) if energy_index is not None else None,
    )

"""Desk-scale compressible-fluid state surrogate on a 1D grid.

States carry a per-cell density and momentum plus a scalar total energy.
The pressure law is the isentropic power law with its matching potential,
the total energy is the cell sum of kinetic and potential densities with the
convex extension at vacuum (zero momentum contributes nothing, nonzero
momentum over vacuum is infinite), and membership in the admissible initial
set is the energy inequality against the stored scalar.  States embed into
trajectory coordinates through damped cosine modes so that high spatial
frequencies are suppressed, with the energy appended as the last coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

from .trajectory import Trajectory

__all__ = [
    "PressureLaw",
    "FluidState",
    "pressure",
    "pressure_potential",
    "kinetic_energy_density",
    "energy_functional",
    "d_membership",
    "state_in_initial_set",
    "admissible_leq",
    "embed_state",
    "fluid_state_to_dict",
    "fluid_state_from_dict",
]


@dataclass(frozen=True)
class PressureLaw:
    """Isentropic pressure p = a * rho^gamma with a > 0, gamma >= 1."""

    a: float
    gamma: float

    def __post_init__(self) -> None:
        if self.a <= 0:
            raise ValueError("pressure coefficient a must be positive")
        if self.gamma < 1:
            raise ValueError("adiabatic exponent gamma must be at least 1")


def pressure(law: PressureLaw, rho: float) -> float:
    if rho < 0:
        raise ValueError("density must be non-negative")
    return law.a * rho**law.gamma


def pressure_potential(law: PressureLaw, rho: float) -> float:
    """Potential P with rho * P'(rho) - P(rho) = p(rho); P(0) = 0 by continuity."""
    if rho < 0:
        raise ValueError("density must be non-negative")
    if rho == 0.0:
        return 0.0
    if law.gamma == 1.0:
        return law.a * rho * math.log(rho)
    return law.a / (law.gamma - 1.0) * rho**law.gamma


def kinetic_energy_density(rho: float, m: float) -> float:
    """Convex extension of |m|^2 / (2 rho): 0 at rest, infinite on moving vacuum."""
    if m == 0.0:
        return 0.0
    if rho > 0.0:
        return 0.5 * m * m / rho
    return math.inf


@dataclass(frozen=True)
class FluidState:
    """Density and momentum cells on [0, length], plus scalar total energy.

    trace_constant is the positive compatibility constant carried with the
    state; it enters no computation here.
    """

    length: float
    rho: tuple[float, ...]
    m: tuple[float, ...]
    energy: float
    trace_constant: float = 1.0

    def __post_init__(self) -> None:
        rho = tuple(float(x) for x in self.rho)
        m = tuple(float(x) for x in self.m)
        if not rho or len(rho) != len(m):
            raise ValueError("rho and m must be non-empty and equally sized")
        if any(x < 0 for x in rho):
            raise ValueError("density must be non-negative cellwise")
        if self.length <= 0:
            raise ValueError("domain length must be positive")
        if not math.isfinite(self.energy):
            raise ValueError("total energy must be finite")
        if self.trace_constant <= 0:
            raise ValueError("trace constant must be positive")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "length", float(self.length))
        object.__setattr__(self, "energy", float(self.energy))

    @property
    def cells(self) -> int:
        return len(self.rho)

    @property
    def spacing(self) -> float:
        return self.length / self.cells


def energy_functional(state: FluidState, law: PressureLaw) -> float:
    """Cell sum of kinetic plus potential energy density; may be infinite."""
    h = state.spacing
    total = 0.0
    for rho, m in zip(state.rho, state.m):
        kin = kinetic_energy_density(rho, m)
        if math.isinf(kin):
            return math.inf
        total += kin + pressure_potential(law, rho)
    return h * total


def d_membership(rho0, m0, e0: float, law: PressureLaw, length: float = 1.0) -> bool:
    """Energy inequality for initial data: stored energy dominates the functional."""
    state = FluidState(length, tuple(rho0), tuple(m0), float(e0))
    return energy_functional(state, law) <= e0


def state_in_initial_set(state: FluidState, law: PressureLaw) -> bool:
    return energy_functional(state, law) <= state.energy


def _is_non_increasing(profile: Trajectory) -> bool:
    seq = [profile.initial_value[0]]
    limits = profile.right_limits
    for j, t in enumerate(profile.breakpoints):
        if t > 0:
            seq.append(profile.value_tuple(t)[0])
        seq.append(limits[j][0])
    return all(a >= b for a, b in zip(seq, seq[1:]))


def admissible_leq(e1: Trajectory, e2: Trajectory, grid) -> bool:
    """Energy-profile preorder: e1 below e2 at every grid time, both limits.

    Both profiles must be scalar and non-increasing; a crossing pair is
    incomparable (false in both orders).
    """
    if e1.dim != 1 or e2.dim != 1:
        raise ValueError("energy profiles must be scalar trajectories")
    times = [float(t) for t in grid]
    if not times:
        raise ValueError("comparison grid must be non-empty")
    for profile in (e1, e2):
        if not _is_non_increasing(profile):
            raise ValueError("energy profiles must be non-increasing")
    for t in times:
        if e1.value_tuple(t)[0] > e2.value_tuple(t)[0]:
            return False
        if e1.right_limit_tuple(t)[0] > e2.right_limit_tuple(t)[0]:
            return False
    return True


def embed_state(state: FluidState, n_modes: int, sobolev_order: float = 2.0) -> np.ndarray:
    """Damped cosine-mode coordinates of (rho, m) with the energy appended.

    Mode j of each field is the orthonormal type-II cosine coefficient times
    sqrt(h), matching the continuum inner product on cell centers, scaled by
    (1 + (pi j / L)^2)^(-order/2).  The map is linear in (rho, m) and the
    damping weights decrease strictly in j for positive order.
    """
    if not 1 <= n_modes <= state.cells:
        raise ValueError("n_modes must lie between 1 and the cell count")
    h = state.spacing
    weights = np.array(
        [
            (1.0 + (math.pi * j / state.length) ** 2) ** (-sobolev_order / 2.0)
            for j in range(n_modes)
        ]
    )
    rho_modes = dct(np.asarray(state.rho), norm="ortho")[:n_modes] * math.sqrt(h)
    m_modes = dct(np.asarray(state.m), norm="ortho")[:n_modes] * math.sqrt(h)
    return np.concatenate([rho_modes * weights, m_modes * weights, [state.energy]])


# -- serialization -------------------------------------------------------------


def fluid_state_to_dict(state: FluidState, law: PressureLaw) -> dict:
    return {
        "L": state.length,
        "cells": state.cells,
        "rho": list(state.rho),
        "m": list(state.m),
        "E": state.energy,
        "a": law.a,
        "gamma": law.gamma,
    }


def fluid_state_from_dict(data: dict) -> tuple[FluidState, PressureLaw]:
    try:
        state = FluidState(float(data["L"]), tuple(data["rho"]), tuple(data["m"]), float(data["E"]))
        law = PressureLaw(float(data["a"]), float(data["gamma"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed fluid state record: {exc}") from exc
    if "cells" in data and int(data["cells"]) != state.cells:
        raise ValueError("declared cell count disagrees with the field arrays")
    return state, law

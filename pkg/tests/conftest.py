"""Shared strategies: dyadic times and values keep the algebra exact."""

from __future__ import annotations

import hypothesis.strategies as st
from hypothesis import settings, HealthCheck

from semiflow import Segment, Trajectory

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

DENOM = 8


def dyadic(lo: int = -16, hi: int = 16):
    return st.integers(lo * DENOM, hi * DENOM).map(lambda k: k / DENOM)


def positive_dyadic(hi: int = 4):
    return st.integers(1, hi * DENOM).map(lambda k: k / DENOM)


@st.composite
def vectors(draw, dim: int):
    return tuple(draw(st.integers(-16 * DENOM, 16 * DENOM)) / DENOM for _ in range(dim))


@st.composite
def trajectories(draw, dim: int | None = None, max_breaks: int = 3):
    d = dim if dim is not None else draw(st.integers(1, 3))
    extra = draw(
        st.lists(st.integers(1, 4 * DENOM), max_size=max_breaks, unique=True).map(sorted)
    )
    bp = (0.0, *[t / DENOM for t in extra])
    segs = []
    for _ in range(len(bp) - 1):
        if draw(st.booleans()):
            v = draw(vectors(d))
            segs.append(Segment(v, v))
        else:
            segs.append(Segment(draw(vectors(d)), draw(vectors(d))))
    return Trajectory(d, bp, tuple(segs), draw(vectors(d)), draw(vectors(d)))


@st.composite
def scalar_trajectories(draw, max_breaks: int = 3):
    return draw(trajectories(dim=1, max_breaks=max_breaks))

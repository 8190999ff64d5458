"""Completed graphs, compact distances against the brute-force oracle,
the truncated product metric, and the convergence diagnostics."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from semiflow import (
    MetricRefinementError,
    Segment,
    Trajectory,
    check_continuous_uniform,
    check_convergence_ae,
    check_monotone_equiv,
    completed_graph,
    skorokhod_distance,
    skorokhod_distance_report,
    step_trajectory,
    sup_distance,
    tail_bound,
    trajectory_distance,
)
from semiflow.metric import _discrete_frechet

from conftest import scalar_trajectories, trajectories
from oracles import brute_force_frechet


def const(v: float) -> Trajectory:
    return Trajectory.constant([v])


def ramp(v0: float, v1: float, until: float = 2.0) -> Trajectory:
    return Trajectory(1, (0.0, until), (Segment((v0,), (v1,)),), (v0,), (v1,))


class TestCompletedGraph:
    def test_constant_single_segment(self):
        g = completed_graph(const(0.0), 1.0)
        assert g.vertices == ((-1.0, 0.0), (2.0, 0.0))

    def test_step_has_one_vertical(self):
        g = completed_graph(step_trajectory([1.0, 0.0], [1.0], 3.0), 2.0)
        assert g.vertices == ((-1.0, 1.0), (1.0, 1.0), (1.0, 0.0), (3.0, 0.0))

    def test_ramp_has_no_verticals(self):
        g = completed_graph(ramp(0.0, 1.0), 2.0)
        times = [t for t, _ in g.vertices]
        assert len(times) == len(set(times))

    def test_covers_extension_domain(self):
        g = completed_graph(ramp(0.0, 1.0), 3.0)
        assert g.vertices[0][0] == -1.0
        assert g.vertices[-1][0] == 4.0


class TestCompactDistance:
    def test_identical_is_zero(self):
        s = step_trajectory([2.0, 1.0], [0.5], 3.0)
        assert skorokhod_distance(s, s, 2.0, resolution=8, tol=None) == 0.0

    def test_two_constants(self):
        # Derived: the graphs are parallel horizontal lines, so every monotone
        # matching pays the value gap and nothing more.
        assert skorokhod_distance(const(0.0), const(0.75), 1.0, resolution=8, tol=None) == 0.75

    def test_shifted_unit_steps_cost_the_time_warp(self):
        # Derived via the exhaustive oracle: sliding the jump from 1.0 to 1.1
        # costs the time shift 0.1, cheaper than the value gap 1.
        a = step_trajectory([1.0, 0.0], [1.0], 3.0)
        b = step_trajectory([1.0, 0.0], [1.1], 3.0)
        d = skorokhod_distance(a, b, 2.0, resolution=64, tol=1e-6)
        assert d == pytest.approx(0.1, abs=1e-9)

    def test_symmetric_by_construction(self):
        a = step_trajectory([1.0, 0.5], [0.75], 3.0)
        b = ramp(1.0, 0.0)
        x = skorokhod_distance(a, b, 2.0, resolution=8, tol=None)
        y = skorokhod_distance(b, a, 2.0, resolution=8, tol=None)
        assert x == y

    @given(scalar_trajectories(), scalar_trajectories())
    @settings(max_examples=30)
    def test_bounded_by_sup_distance_plus_bracket(self, a, b):
        report = skorokhod_distance_report(a, b, 2.0, resolution=8, tol=None)
        assert report.value <= sup_distance(a, b, 2.0) + report.spacing + 1e-12

    def test_resolution_precondition(self):
        with pytest.raises(ValueError):
            skorokhod_distance(const(0.0), const(1.0), 1.0, resolution=1)

    def test_refinement_budget_failure_carries_bracket(self):
        with pytest.raises(MetricRefinementError) as exc:
            skorokhod_distance(const(0.0), const(1.0), 1.0, resolution=4, tol=1e-9,
                               max_refinements=0)
        assert exc.value.value >= 0.0
        assert exc.value.spacing >= 0.0


class TestOracleAgreement:
    FIXTURES = [
        const(0.0),
        const(1.0),
        const(-0.5),
        step_trajectory([1.0, 0.0], [1.0], 3.0),
        step_trajectory([1.0, 0.0], [1.1], 3.0),
        step_trajectory([2.0, 1.0, 0.5], [0.5, 1.5], 3.0),
        ramp(0.0, 1.0),
        ramp(1.0, -1.0),
    ]

    def test_dp_equals_brute_force_on_identical_sampling(self):
        for i, a in enumerate(self.FIXTURES):
            for b in self.FIXTURES[i:]:
                ga, gb = completed_graph(a, 2.0), completed_graph(b, 2.0)
                p, q = ga.sample(2), gb.sample(2)
                dp = max(_discrete_frechet(p, q), _discrete_frechet(q, p))
                bf = max(brute_force_frechet(p, q), brute_force_frechet(q, p))
                assert dp == bf

    def test_default_resolution_within_coarse_bracket(self):
        for i, a in enumerate(self.FIXTURES):
            for b in self.FIXTURES[i:]:
                fine = skorokhod_distance_report(a, b, 2.0, resolution=64, tol=None)
                ga, gb = completed_graph(a, 2.0), completed_graph(b, 2.0)
                p, q = ga.sample(3), gb.sample(3)
                coarse = max(brute_force_frechet(p, q), brute_force_frechet(q, p))
                bracket = max(ga.spacing(3), gb.spacing(3))
                assert abs(fine.value - coarse) <= bracket + 1e-12


class TestProductMetric:
    def test_identical_is_zero(self):
        t = Trajectory(2, (0.0, 1.0), (Segment((0.0, 1.0), (1.0, 0.0)),), (0.0, 1.0), (1.0, 0.0))
        report = trajectory_distance(t, t, truncation=6, resolution=4, tol=None)
        assert report.value == 0.0

    def test_first_term_weight_for_constants(self):
        c = 0.75
        report = trajectory_distance(const(0.0), const(c), truncation=6, resolution=4, tol=None)
        m, k, d = report.terms[0]
        assert (m, k) == (1, 1)
        assert d == c
        assert 0.25 * c / (1 + c) == pytest.approx(0.25 * d / (1 + d))

    def test_terms_within_weight_bounds(self):
        a = step_trajectory([1.0, 0.0], [1.0], 3.0)
        report = trajectory_distance(a, const(0.5), truncation=8, resolution=4, tol=None)
        total = 0.0
        for m, k, d in report.terms:
            contribution = 2.0 ** (-(m + k)) * d / (1 + d)
            assert 0.0 <= contribution < 2.0 ** (-(m + k))
            total += contribution
        assert report.value == pytest.approx(total)

    def test_tail_bound_formula_matches_direct_sum(self):
        # Derived: sum over s > N of (s-1) 2^-s telescopes to (N+1) 2^-N.
        for n in range(2, 20):
            direct = sum((s - 1) * 2.0**-s for s in range(n + 1, 61))
            assert tail_bound(n) == pytest.approx(direct, rel=1e-12)

    @given(trajectories(max_breaks=2), trajectories(max_breaks=2))
    @settings(max_examples=15)
    def test_truncation_certificate(self, a, b):
        if a.dim != b.dim:
            a, b = a.project(1), b.project(1)
        for n in (4, 6, 8):
            lo = trajectory_distance(a, b, truncation=n, resolution=3, tol=None).value
            hi = trajectory_distance(a, b, truncation=n + 2, resolution=3, tol=None).value
            assert abs(hi - lo) <= tail_bound(n)

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValueError):
            trajectory_distance(const(0.0), Trajectory.constant([0.0, 0.0]))

    @given(st.data())
    @settings(max_examples=20)
    def test_metric_axioms_small(self, data):
        dim = data.draw(st.integers(1, 2))
        a = data.draw(trajectories(dim=dim, max_breaks=2))
        b = data.draw(trajectories(dim=dim, max_breaks=2))
        c = data.draw(trajectories(dim=dim, max_breaks=2))
        kw = dict(truncation=5, resolution=3, tol=None)
        dab = trajectory_distance(a, b, **kw).value
        dba = trajectory_distance(b, a, **kw).value
        dac = trajectory_distance(a, c, **kw).value
        dcb = trajectory_distance(c, b, **kw).value
        assert dab == dba
        assert dab <= dac + dcb + 1e-9


class TestDiagnostics:
    def test_constant_sequence_converges_everywhere(self):
        base = step_trajectory([1.0, 0.0], [1.0], 4.0)
        diag = check_convergence_ae([base] * 8, base, 1, [i / 8 for i in range(33)])
        assert diag.converged
        assert diag.exceptional == ()

    def test_moving_jump_exceptional_set_within_limit_jump(self):
        base = step_trajectory([1.0, 0.0], [1.0], 4.0)
        seq = [step_trajectory([1.0, 0.0], [1.0 + 1.0 / n], 4.0) for n in range(1, 33)]
        diag = check_convergence_ae(seq, base, 1, [i / 16 for i in range(33)], tol=1e-9)
        assert set(diag.exceptional) <= {1.0}

    def test_divergent_sequence_converges_nowhere(self):
        base = const(0.0)
        seq = [const(float(n)) for n in range(1, 9)]
        diag = check_convergence_ae(seq, base, 1, [0.25, 0.5, 1.0], tol=0.5)
        assert not diag.converged
        assert diag.exceptional == (0.25, 0.5, 1.0)

    def test_monotone_equivalence_convergent(self):
        base = step_trajectory([1.0, 0.0], [1.0], 4.0)
        seq = [
            step_trajectory([1.0 + 1.0 / n, 1.0 / n], [1.0], 4.0) for n in range(1, 33)
        ]
        diag = check_monotone_equiv(seq, base, 2.0, tol=0.1)
        assert diag.pointwise_converges and diag.metric_converges and diag.agree

    def test_monotone_equivalence_divergent(self):
        base = step_trajectory([1.0, 0.0], [1.0], 4.0)
        seq = [
            step_trajectory([1.0, 0.0], [1.0], 4.0)
            if n % 2
            else step_trajectory([2.0, 1.0], [2.0], 4.0)
            for n in range(1, 9)
        ]
        diag = check_monotone_equiv(seq, base, 3.0, tol=0.05)
        assert not diag.pointwise_converges and not diag.metric_converges and diag.agree

    def test_monotone_rejects_non_monotone(self):
        vee = Trajectory(
            1, (0.0, 1.0, 2.0),
            (Segment((1.0,), (0.0,)), Segment((0.0,), (1.0,))),
            (1.0,), (1.0,),
        )
        with pytest.raises(ValueError):
            check_monotone_equiv([vee], const(0.0), 2.0, tol=0.1)

    def test_continuous_uniform_agreement(self):
        limit = ramp(0.0, 1.0)
        seq = [
            Trajectory(
                1, (0.0, 2.0),
                (Segment((1.0 / n,), (1.0 + 1.0 / n,)),),
                (1.0 / n,), (1.0 + 1.0 / n,),
            )
            for n in range(1, 33)
        ]
        diag = check_continuous_uniform(seq, limit, 2.0, 1, tol=0.1)
        assert diag.pointwise_converges and diag.metric_converges and diag.agree

    def test_continuous_uniform_fixed_gap_diverges(self):
        limit = ramp(0.0, 1.0)
        seq = [
            Trajectory(1, (0.0, 2.0), (Segment((1.0,), (2.0,)),), (1.0,), (2.0,))
            for _ in range(8)
        ]
        diag = check_continuous_uniform(seq, limit, 2.0, 1, tol=0.1)
        assert not diag.pointwise_converges and not diag.metric_converges and diag.agree

    def test_continuous_rejects_jumps(self):
        with pytest.raises(ValueError):
            check_continuous_uniform(
                [step_trajectory([1.0, 0.0], [1.0], 4.0)], const(0.0), 2.0, 1, tol=0.1
            )


class TestFrechetKernel:
    def test_single_point_sequences(self):
        p = np.array([[0.0, 0.0]])
        q = np.array([[1.0, 2.0], [1.5, 2.0]])
        assert _discrete_frechet(p, q) == 2.0

    @given(st.integers(2, 6), st.integers(2, 6), st.randoms(use_true_random=False))
    @settings(max_examples=25)
    def test_matches_brute_force_on_random_polylines(self, m, n, rng):
        p = np.array([[rng.uniform(0, 4), rng.uniform(-2, 2)] for _ in range(m)])
        q = np.array([[rng.uniform(0, 4), rng.uniform(-2, 2)] for _ in range(n)])
        p = p[np.argsort(p[:, 0])]
        q = q[np.argsort(q[:, 0])]
        assert _discrete_frechet(p, q) == pytest.approx(brute_force_frechet(p, q), abs=1e-12)

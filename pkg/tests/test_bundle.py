"""Bundle keys, shift/continuation verifiers, closure generation, files."""

from __future__ import annotations

import json
import math

import pytest

from semiflow import (
    Bundle,
    ClosureBudgetError,
    Segment,
    SqrtOdeFamily,
    Trajectory,
    UnknownInitialPoint,
    bundle_from_dict,
    bundle_to_dict,
    continue_at,
    gen_sqrt_ode_bundle,
    generate_closure,
    verify_P4,
    verify_P5,
)


def ramp_to(level: float, at: float = 1.0) -> Trajectory:
    return Trajectory(1, (0.0, at), (Segment((0.0,), (level,)),), (0.0,), (level,))


def closed_ramp_bundle() -> Bundle:
    ramp, flat = ramp_to(2.0), Trajectory.constant([2.0])
    return Bundle.from_groups(
        1, 2.0**-20, (1.0,), [((0.0,), [ramp]), ((2.0,), [flat])], horizon=3.0
    )


class TestKeys:
    def test_quantize_round_trip(self):
        bundle = closed_ramp_bundle()
        for key in bundle.entries:
            assert bundle.quantize(bundle.key_point(key)) == key

    def test_lookup_unknown_point(self):
        with pytest.raises(UnknownInitialPoint):
            closed_ramp_bundle().lookup([13.0])

    def test_dim_checked(self):
        with pytest.raises(ValueError):
            closed_ramp_bundle().quantize([0.0, 0.0])

    def test_entries_must_start_at_key(self):
        with pytest.raises(ValueError):
            Bundle(1, 2.0**-20, (1.0,), {(0,): (Trajectory.constant([5.0]),)}, horizon=2.0)

    def test_entries_must_be_non_empty(self):
        with pytest.raises(ValueError):
            Bundle(1, 2.0**-20, (1.0,), {(0,): ()}, horizon=2.0)

    def test_from_groups_deduplicates(self):
        flat = Trajectory.constant([0.0])
        bundle = Bundle.from_groups(
            1, 2.0**-20, (1.0,), [((0.0,), [flat, flat]), ((0.0,), [flat])], horizon=2.0
        )
        assert bundle.entries[bundle.quantize([0.0])] == (flat,)


class TestVerifiers:
    def test_constant_bundle_clean(self):
        flat = Trajectory.constant([1.5])
        bundle = Bundle.from_groups(1, 2.0**-20, (0.5, 1.0), [((1.5,), [flat])], horizon=2.0)
        assert verify_P4(bundle, 0.0) == []
        assert verify_P5(bundle, 0.0) == []

    def test_closed_ramp_bundle_clean(self):
        bundle = closed_ramp_bundle()
        assert verify_P4(bundle, 0.0) == []
        assert verify_P5(bundle, 0.0) == []

    def test_deleted_shift_image_is_one_p4_violation(self):
        ramp = ramp_to(2.0)
        broken = Bundle(1, 2.0**-20, (1.0,), {(0,): (ramp,)}, horizon=3.0)
        p4 = verify_P4(broken, 0.0)
        p5 = verify_P5(broken, 0.0)
        assert len(p4) == 1 and p5 == []
        record = p4[0].to_dict()
        assert record["property"] == "P4"
        assert record["key"] == [0.0]
        assert record["T"] == 1.0
        assert record["distance"] == math.inf

    def test_deleted_continuation_is_p5_violation(self):
        # Two members at the origin, but only one continuation retained.
        zero = Trajectory.constant([0.0])
        dip = Trajectory(1, (0.0, 1.0), (Segment((-1.0,), (0.0,)),), (0.0,), (0.0,))
        bundle = Bundle.from_groups(
            1, 2.0**-20, (1.0,), [((0.0,), [zero, dip])], horizon=2.0
        )
        assert verify_P4(bundle, 0.0) == []
        violations = verify_P5(bundle, 0.0)
        assert violations and all(v.property == "P5" for v in violations)

    def test_positive_tolerance_uses_metric(self):
        # The recorded member sits one sub-quantum above the true shift image,
        # so exact matching fails but the metric check clears it.
        ramp = ramp_to(2.0)
        wobble = Trajectory.constant([2.0 + 2.0**-22])
        bundle = Bundle.from_groups(
            1, 2.0**-20, (1.0,),
            [((0.0,), [ramp]), ((2.0,), [wobble])],
            horizon=3.0,
        )
        assert verify_P4(bundle, 0.0)  # exact match fails
        assert verify_P4(bundle, 1e-3, {"truncation": 5, "resolution": 4, "tol": None}) == []


class TestClosure:
    def test_already_closed_unchanged(self):
        bundle = closed_ramp_bundle()
        closed = generate_closure(bundle)
        assert closed.entries == bundle.entries

    def test_single_trajectory_one_shift_time_two_keys(self):
        seed = Bundle(1, 2.0**-20, (1.0,), {(0,): (ramp_to(2.0),)}, horizon=3.0)
        closed = generate_closure(seed)
        assert len(closed.entries) == 2
        assert verify_P4(closed, 0.0) == [] and verify_P5(closed, 0.0) == []

    def test_idempotent(self):
        fam = SqrtOdeFamily(waiting_times=(0.0, 1.0, math.inf), horizon=4.0,
                            time_grid=(1.0, 2.0), closure="none")
        seed = gen_sqrt_ode_bundle(fam)
        once = generate_closure(seed)
        twice = generate_closure(once)
        assert once.entries == twice.entries

    def test_budget_exhaustion_carries_partial(self):
        fam = SqrtOdeFamily(closure="none")
        seed = gen_sqrt_ode_bundle(fam)
        with pytest.raises(ClosureBudgetError) as exc:
            generate_closure(seed, budget=6)
        partial = exc.value.partial
        assert sum(len(v) for v in partial.entries.values()) >= 6

    def test_continuations_frozen_at_horizon(self):
        fam = SqrtOdeFamily(waiting_times=(0.0, 1.0, math.inf), horizon=4.0,
                            time_grid=(1.0, 2.0), closure="full")
        bundle = gen_sqrt_ode_bundle(fam)
        key0 = bundle.quantize([0.0])
        first = next(t for t in bundle.entries[key0] if t.tail_value != (0.0,))
        second = bundle.entries[key0][0]
        spliced = continue_at(first, second, 1.0).truncate(bundle.horizon)
        assert spliced.breakpoints[-1] <= bundle.horizon
        assert verify_P5(bundle, 0.0) == []


class TestSerialization:
    def test_round_trip(self):
        bundle = gen_sqrt_ode_bundle(
            SqrtOdeFamily(waiting_times=(0.0, 1.0, math.inf), horizon=4.0,
                          time_grid=(1.0, 2.0), closure="full")
        )
        text = json.dumps(bundle_to_dict(bundle))
        again = bundle_from_dict(json.loads(text))
        assert again.dim == bundle.dim
        assert again.quantum == bundle.quantum
        assert again.time_grid == bundle.time_grid
        assert again.horizon == bundle.horizon
        assert set(again.entries) == set(bundle.entries)
        for key, trajectories in bundle.entries.items():
            assert set(again.entries[key]) == set(trajectories)

    def test_energy_index_preserved(self):
        flat = Trajectory.constant([1.0, 2.0])
        bundle = Bundle.from_groups(
            2, 2.0**-20, (1.0,), [((1.0, 2.0), [flat])], horizon=2.0, energy_index=2
        )
        again = bundle_from_dict(bundle_to_dict(bundle))
        assert again.energy_index == 2

    def test_malformed_rejected(self):
        with pytest.raises(ValueError):
            bundle_from_dict({"dim": 1})

"""Empirical check of the truncation certificate on random trajectory pairs.

For each pair, evaluates the truncated product distance at increasing levels
and compares the jump from N to N+2 against the certified tail (N+1) 2^-N.

    python3 scripts/truncation_sweep.py [--pairs 20] [--seed 0]
"""

import argparse

import numpy as np

from semiflow import Segment, Trajectory, tail_bound, trajectory_distance


def random_trajectory(rng: np.random.Generator, dim: int) -> Trajectory:
    extra = sorted(set((rng.integers(1, 32, size=rng.integers(0, 4)) / 8.0).tolist()))
    bp = (0.0, *extra)

    def vec():
        return tuple((rng.integers(-16, 17, size=dim) / 8.0).tolist())

    segs = []
    for _ in range(len(bp) - 1):
        if rng.random() < 0.5:
            v = vec()
            segs.append(Segment(v, v))
        else:
            segs.append(Segment(vec(), vec()))
    return Trajectory(dim, bp, tuple(segs), vec(), vec())


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--pairs", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'N':>3} {'max |gap|':>12} {'bound':>12} {'ratio':>8}")
    gaps: dict[int, float] = {n: 0.0 for n in range(4, 13)}
    for _ in range(args.pairs):
        dim = int(rng.integers(1, 3))
        a, b = random_trajectory(rng, dim), random_trajectory(rng, dim)
        values = {
            n: trajectory_distance(a, b, truncation=n, resolution=4, tol=None).value
            for n in range(4, 15)
        }
        for n in gaps:
            gaps[n] = max(gaps[n], abs(values[n + 2] - values[n]))
    for n, gap in gaps.items():
        bound = tail_bound(n)
        print(f"{n:>3} {gap:>12.3e} {bound:>12.3e} {gap / bound:>8.3f}")


if __name__ == "__main__":
    main()

"""Expected distance and the bounds that sandwich it without touching the pdf."""

import numpy as np

from ukmeans import (Mbr, DiscretePdf, UncertainObject, EdCounters,
                     expected_distance, min_dist, max_dist, min_max_dist,
                     object_centroid)


def make_object():
    mbr = Mbr([2.0, 1.0], [4.0, 3.0])
    rng = np.random.default_rng(5)
    masses = rng.random(16)
    masses /= masses.sum()
    pdf = DiscretePdf(grid_dims=(4, 4), masses=masses, owner_mbr=mbr)
    return UncertainObject(1, mbr, pdf, object_centroid(pdf))


def main():
    obj = make_object()
    counters = EdCounters()
    print(f"object mbr lo={obj.mbr.lo} hi={obj.mbr.hi}, 4x4 random pdf\n")

    # min_dist and max_dist come from the rectangle alone, so they hold
    # for every pdf living on it; ED must land between them.
    print(f"{'query':>14} {'min_dist':>9} {'ED':>9} {'max_dist':>9}")
    for y in ([3.0, 2.0], [5.0, 2.0], [0.0, 0.0], [10.0, 10.0]):
        ed = expected_distance(obj, y, counters)
        lo = min_dist(obj.mbr, y)
        hi = max_dist(obj.mbr, y)
        assert lo <= ed <= hi
        print(f"{str(y):>14} {lo:9.4f} {ed:9.4f} {hi:9.4f}")
    print(f"\nfull evaluations so far: {counters.ed_evals}")

    # min_max_dist over a candidate set: the best worst case.  Any rep
    # whose min_dist exceeds it can never be the expected-nearest.
    reps = np.array([[3.0, 6.0], [6.0, 2.0], [20.0, 20.0]])
    val, idx = min_max_dist(obj.mbr, reps)
    print(f"\nreps:\n{reps}")
    print(f"min_max_dist = {val:.4f}, attained by rep {idx}")
    for j, rep in enumerate(reps):
        verdict = "prunable" if min_dist(obj.mbr, rep) > val else "kept"
        print(f"  rep {j}: min_dist={min_dist(obj.mbr, rep):8.4f}  -> {verdict}")


if __name__ == "__main__":
    main()

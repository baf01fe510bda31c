"""Candidate pruning: rectangle bounds pass, cell-containment pass, hybrid."""

import math

import numpy as np
import pytest

from conftest import box_object, random_box_object

from ukmeans import (
    CandidateSet,
    EdCounters,
    Mbr,
    expected_distance,
    hybrid_prune,
    mmbb_prune,
    vcp_prune,
)

FUZZ_SEED = 20260817
UNIT = Mbr([0.0, 0.0], [1.0, 1.0])


def _full(mbr, k):
    return CandidateSet.full(mbr, k)


def _alive(cand):
    return sorted(int(j) for j in cand.alive)


def test_mmbb_prunes_far_rep():
    reps = np.array([[0.5, 0.5], [10.0, 10.0]])
    # MinD to the far rep is d((1,1),(10,10)) ~ 12.728, MinMaxD is sqrt(0.5)
    assert math.dist((1, 1), (10, 10)) > math.sqrt(0.5)
    ctr = EdCounters()
    out = mmbb_prune(UNIT, reps, _full(UNIT, 2), ctr)
    assert _alive(out) == [0]
    assert out.mmbb_ran and not out.vcp_ran
    assert ctr.cand_pairs == 2 and ctr.ed_evals == 0


def test_mmbb_single_candidate_unchanged():
    reps = np.array([[3.0, 3.0]])
    out = mmbb_prune(UNIT, reps, _full(UNIT, 1), EdCounters())
    assert _alive(out) == [0]


def test_mmbb_symmetric_reps_both_survive():
    reps = np.array([[-1.0, 0.5], [2.0, 0.5]])
    out = mmbb_prune(UNIT, reps, _full(UNIT, 2), EdCounters())
    assert _alive(out) == [0, 1]


def test_mmbb_counts_alive_pairs_only():
    reps = np.array([[0.5, 0.5], [10.0, 10.0], [11.0, 11.0]])
    ctr = EdCounters()
    cand = CandidateSet(UNIT, np.array([0, 2]))
    mmbb_prune(UNIT, reps, cand, ctr)
    assert ctr.cand_pairs == 2


def test_vcp_isolates_contained_rectangle():
    reps = np.array([[0.0, 0.0], [10.0, 0.0]])
    mbr = Mbr([1.0, 0.0], [2.0, 1.0])
    out = vcp_prune(mbr, reps, _full(mbr, 2), EdCounters())
    assert _alive(out) == [0]
    assert out.vcp_ran


def test_vcp_straddling_rectangle_unchanged():
    reps = np.array([[0.0, 0.0], [10.0, 0.0]])
    mbr = Mbr([4.0, 0.0], [6.0, 1.0])  # crosses the x=5 midline
    out = vcp_prune(mbr, reps, _full(mbr, 2), EdCounters())
    assert _alive(out) == [0, 1]
    assert out.vcp_ran


def test_vcp_touching_the_midline_is_not_pruned():
    # strict test: a corner exactly on the bisector blocks containment
    reps = np.array([[0.0, 0.0], [10.0, 0.0]])
    mbr = Mbr([4.0, 0.0], [5.0, 1.0])
    out = vcp_prune(mbr, reps, _full(mbr, 2), EdCounters())
    assert _alive(out) == [0, 1]


def test_vcp_single_candidate():
    reps = np.array([[7.0, 7.0]])
    out = vcp_prune(UNIT, reps, _full(UNIT, 1), EdCounters())
    assert _alive(out) == [0]


def test_vcp_counts_alive_pairs():
    reps = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    ctr = EdCounters()
    vcp_prune(UNIT, reps, _full(UNIT, 3), ctr)
    assert ctr.cand_pairs == 3 and ctr.ed_evals == 0


def test_hybrid_short_circuits_after_containment():
    reps = np.array([[0.0, 0.0], [10.0, 0.0]])
    mbr = Mbr([1.0, 0.0], [2.0, 1.0])
    ctr = EdCounters()
    out = hybrid_prune(mbr, reps, _full(mbr, 2), ctr)
    assert _alive(out) == [0]
    assert out.vcp_ran and not out.mmbb_ran
    assert ctr.cand_pairs == 2  # only the containment pass paid


def test_hybrid_falls_back_to_rectangle_bounds():
    # three reps, rectangle near two of them: containment fails, bounds prune
    reps = np.array([[0.0, 0.0], [1.4, 0.0], [40.0, 40.0]])
    mbr = Mbr([0.0, 0.0], [1.0, 1.0])
    ctr_h = EdCounters()
    out_h = hybrid_prune(mbr, reps, _full(mbr, 3), ctr_h)
    ctr_m = EdCounters()
    out_m = mmbb_prune(mbr, reps, _full(mbr, 3), ctr_m)
    assert out_h.vcp_ran and out_h.mmbb_ran
    assert _alive(out_h) == _alive(out_m)
    assert ctr_h.cand_pairs == ctr_m.cand_pairs + 3


def _brute_argmin(obj, reps):
    eds = [expected_distance(obj, y) for y in reps]
    return int(np.argmin(eds))


def test_pruning_soundness_fuzz():
    """The true argmin-ED cluster survives every pruner; nothing empties."""
    rng = np.random.default_rng(FUZZ_SEED)
    for i in range(3000):
        m = 1 + i % 3
        obj = random_box_object(rng, i, m=m, max_cells=3)
        k = int(rng.integers(2, 7))
        reps = rng.random((k, m)) * 100
        best = _brute_argmin(obj, reps)
        for prune in (mmbb_prune, vcp_prune, hybrid_prune):
            out = prune(obj.mbr, reps, _full(obj.mbr, k), EdCounters())
            assert len(out) >= 1
            assert best in set(_alive(out))


def test_hybrid_subset_of_both_passes_fuzz():
    rng = np.random.default_rng(FUZZ_SEED + 1)
    for i in range(2000):
        m = int(rng.integers(1, 4))
        obj = random_box_object(rng, i, m=m, max_cells=2)
        k = int(rng.integers(2, 8))
        reps = rng.random((k, m)) * 60
        h = set(_alive(hybrid_prune(obj.mbr, reps, _full(obj.mbr, k), EdCounters())))
        v = set(_alive(vcp_prune(obj.mbr, reps, _full(obj.mbr, k), EdCounters())))
        b = set(_alive(mmbb_prune(obj.mbr, reps, _full(obj.mbr, k), EdCounters())))
        assert h and h <= v and h <= b


def test_vcp_singleton_means_strictly_nearer_everywhere():
    rng = np.random.default_rng(FUZZ_SEED + 2)
    hits = 0
    for i in range(2000):
        m = 2
        obj = random_box_object(rng, i, m=m, max_cells=2, max_side=2.0)
        k = int(rng.integers(2, 6))
        reps = rng.random((k, m)) * 40
        out = vcp_prune(obj.mbr, reps, _full(obj.mbr, k), EdCounters())
        if len(out) != 1:
            continue
        hits += 1
        j = int(out.alive[0])
        pts = obj.mbr.lo + rng.random((25, m)) * obj.mbr.sides
        dj = np.sqrt(((pts - reps[j]) ** 2).sum(axis=1))
        for q in range(k):
            if q == j:
                continue
            dq = np.sqrt(((pts - reps[q]) ** 2).sum(axis=1))
            assert np.all(dj < dq)
    assert hits > 50  # the case must actually occur for the test to mean anything


def test_reduced_set_stays_sound_for_sub_rectangles():
    # prune a rectangle, then prune a contained rectangle starting from the
    # survivor set: any object inside keeps its argmin cluster alive
    rng = np.random.default_rng(FUZZ_SEED + 3)
    for i in range(1500):
        m = 2
        outer_lo = rng.random(m) * 60
        outer_sides = rng.random(m) * 8 + 0.5
        outer = Mbr(outer_lo, outer_lo + outer_sides)
        frac_lo = rng.random(m) * 0.5
        frac_hi = frac_lo + rng.random(m) * (1 - frac_lo - 0.05) + 0.05
        inner = Mbr(outer_lo + frac_lo * outer_sides, outer_lo + frac_hi * outer_sides)
        k = int(rng.integers(2, 7))
        reps = rng.random((k, m)) * 80
        first = hybrid_prune(outer, reps, _full(outer, k), EdCounters())
        second = hybrid_prune(inner, reps,
                              CandidateSet(inner, first.alive.copy()), EdCounters())
        assert set(_alive(second)) <= set(_alive(first))
        grid = (2, 2)
        masses = np.full(4, 0.25)
        obj = box_object(i, inner.lo, inner.hi, grid, masses)
        assert _brute_argmin(obj, reps) in set(_alive(second))


def test_candidate_set_rejects_empty_and_bad_indices():
    with pytest.raises(ValueError):
        CandidateSet.full(UNIT, 0)
    reps = np.array([[0.0, 0.0]])
    with pytest.raises(ValueError):
        mmbb_prune(UNIT, reps, CandidateSet(UNIT, np.array([], dtype=np.int64)),
                   EdCounters())
    with pytest.raises(ValueError):
        mmbb_prune(UNIT, reps, CandidateSet(UNIT, np.array([1])), EdCounters())

"""Candidate-set reduction for one rectangle at a time.

Two pruning rules over a shared candidate-set abstraction:

* mmbb_prune keeps only clusters whose best-case distance to the
  rectangle does not exceed the smallest worst-case distance among the
  candidates (min over reps of the farthest-corner distance).
* vcp_prune detects when the rectangle lies strictly inside one
  candidate's Voronoi cell, in which case that candidate is the nearest
  for every point of the rectangle and all others can go.  No Voronoi
  diagram is built: containment is decided by pairwise bisector tests
  against extremal corners.

Both rules are sound for expected distances because
min_dist <= ED <= max_dist holds for any pdf on the rectangle, and both
apply equally to a single object's MBR or to a group MBR covering many
objects.  hybrid_prune chains them, cheap geometric test first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distance import EdCounters, max_dist_many, min_dist_many
from .model import Mbr


@dataclass
class CandidateSet:
    """Surviving cluster indices for one rectangle, with flags recording
    which pruners have run on it."""

    mbr: Mbr
    alive: np.ndarray
    vcp_ran: bool = False
    mmbb_ran: bool = False

    def __post_init__(self):
        self.alive = np.asarray(self.alive, dtype=np.int64)

    @classmethod
    def full(cls, mbr: Mbr, k: int) -> "CandidateSet":
        if k < 1:
            raise ValueError("need at least one candidate cluster")
        return cls(mbr, np.arange(k, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.alive.shape[0])


def _check(mbr: Mbr, reps: np.ndarray, cand: CandidateSet) -> np.ndarray:
    reps = np.asarray(reps, dtype=np.float64)
    if reps.ndim != 2 or reps.shape[1] != mbr.dim:
        raise ValueError("reps must be (k, m) with m matching the rectangle")
    if len(cand) == 0:
        raise ValueError("candidate set is empty")
    if cand.alive.min() < 0 or cand.alive.max() >= reps.shape[0]:
        raise ValueError("candidate indices out of range")
    return reps


def mmbb_prune(mbr: Mbr, reps, cand: CandidateSet, counters: EdCounters) -> CandidateSet:
    """Drop candidates whose nearest-possible distance beats no one.

    Computes min_dist and max_dist for every alive candidate, takes the
    smallest max_dist as the threshold, and removes every candidate
    whose min_dist exceeds it.  The threshold's own candidate always
    survives, so the result is never empty.
    """
    reps = _check(mbr, reps, cand)
    sel = reps[cand.alive]
    counters.cand_pairs += len(cand)
    minds = min_dist_many(mbr.lo, mbr.hi, sel)
    maxds = max_dist_many(mbr.lo, mbr.hi, sel)
    keep = minds <= maxds.min()
    return CandidateSet(mbr, cand.alive[keep], cand.vcp_ran, True)


def vcp_prune(mbr: Mbr, reps, cand: CandidateSet, counters: EdCounters) -> CandidateSet:
    """Collapse to one candidate when its Voronoi cell swallows the rectangle.

    The cell test is relative to the alive candidates only.  If no single
    cell contains the rectangle the set is returned unchanged (apart from
    the flag); this pruner never partially filters.
    """
    reps = _check(mbr, reps, cand)
    counters.cand_pairs += len(cand)
    if len(cand) == 1:
        return CandidateSet(mbr, cand.alive, True, cand.mmbb_ran)
    sel = reps[cand.alive]
    # Only the rep nearest the rectangle's center can contain the whole
    # rectangle: containment puts every point of it, center included,
    # strictly closer to that rep than to any other candidate.
    center = mbr.center
    dc = sel - center
    j_local = int(np.argmin((dc * dc).sum(axis=1)))
    cj = sel[j_local]
    direction = sel - cj
    corner = np.where(direction > 0, mbr.hi, mbr.lo)
    d_to_j = np.sqrt(((corner - cj) ** 2).sum(axis=1))
    d_to_q = np.sqrt(((corner - sel) ** 2).sum(axis=1))
    others = np.arange(len(cand)) != j_local
    if np.all(d_to_j[others] < d_to_q[others]):
        return CandidateSet(mbr, cand.alive[j_local:j_local + 1], True, cand.mmbb_ran)
    return CandidateSet(mbr, cand.alive, True, cand.mmbb_ran)


def hybrid_prune(mbr: Mbr, reps, cand: CandidateSet, counters: EdCounters) -> CandidateSet:
    """Voronoi-cell test first; fall back to min/max bounds if it misses.

    When the cell test already isolates one candidate the bound pass is
    skipped entirely and contributes nothing to the pair counter.  The
    reduced set is safe to hand down to sub-rectangles: both rules only
    ever remove candidates that cannot win anywhere inside the rectangle,
    hence cannot win inside any part of it.
    """
    out = vcp_prune(mbr, reps, cand, counters)
    if len(out) > 1:
        out = mmbb_prune(mbr, reps, out, counters)
    return out

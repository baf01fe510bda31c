"""Expected distance between an uncertain object and a point, plus the
closed-form lower/upper bounds used for pruning.

The expected distance ED(o, y) is the probability-weighted mean of the
Euclidean distance from y to each pdf cell center.  min_dist/max_dist
bound it from below/above using only the object's bounding rectangle,
which is what makes candidate pruning possible without touching the pdf.

Work counters are explicit accumulator objects passed by the caller, so
parallel callers can keep private counters and merge them afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Mbr, UncertainObject, cell_centers


@dataclass
class EdCounters:
    """Tally of expensive work: full ED evaluations, candidate pairs
    examined by pruners, and clustering iterations."""

    ed_evals: int = 0
    cand_pairs: int = 0
    iterations: int = 0

    def merge(self, other: "EdCounters") -> "EdCounters":
        self.ed_evals += other.ed_evals
        self.cand_pairs += other.cand_pairs
        self.iterations += other.iterations
        return self

    def copy(self) -> "EdCounters":
        return EdCounters(self.ed_evals, self.cand_pairs, self.iterations)


def ed_to_points(masses: np.ndarray, centers: np.ndarray, pts: np.ndarray,
                 counters: EdCounters | None = None) -> np.ndarray:
    """Expected distances from one pdf to each of c query points.

    masses (s,), centers (s, m), pts (c, m) -> (c,).  Counts c full
    evaluations.  The reduction over samples runs along the outer axis,
    which numpy accumulates in a fixed order per column, so a candidate's
    value does not depend on which other candidates were batched with it
    (for c >= 2); that keeps pruned and unpruned strategies bit-comparable.
    """
    diff = centers[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    eds = (masses[:, None] * dist).sum(axis=0)
    if counters is not None:
        counters.ed_evals += pts.shape[0]
    return eds


def expected_distance(obj: UncertainObject, y, counters: EdCounters | None = None) -> float:
    """ED(obj, y): mean distance from y to the object under its pdf."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (obj.mbr.dim,):
        raise ValueError(f"query point has shape {y.shape}, expected ({obj.mbr.dim},)")
    centers = cell_centers(obj.pdf)
    return float(ed_to_points(obj.pdf.masses, centers, y[None, :], counters)[0])


def min_dist_many(lo: np.ndarray, hi: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Distance from each point to the nearest point of the box [lo, hi]."""
    clamped = np.clip(pts, lo, hi)
    diff = pts - clamped
    return np.sqrt((diff * diff).sum(axis=-1))


def max_dist_many(lo: np.ndarray, hi: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Distance from each point to its farthest corner of the box [lo, hi]."""
    far = np.maximum(np.abs(pts - lo), np.abs(hi - pts))
    return np.sqrt((far * far).sum(axis=-1))


def min_dist(mbr: Mbr, y) -> float:
    """Smallest possible distance from y to any point inside the MBR.

    Zero exactly when y lies inside.  Lower-bounds ED for any pdf on the
    MBR.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (mbr.dim,):
        raise ValueError(f"point has shape {y.shape}, expected ({mbr.dim},)")
    return float(min_dist_many(mbr.lo, mbr.hi, y))


def max_dist(mbr: Mbr, y) -> float:
    """Largest possible distance from y to any point inside the MBR.

    Attained at the corner farthest from y; upper-bounds ED for any pdf
    on the MBR.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (mbr.dim,):
        raise ValueError(f"point has shape {y.shape}, expected ({mbr.dim},)")
    return float(max_dist_many(mbr.lo, mbr.hi, y))


def min_max_dist(mbr: Mbr, reps) -> tuple:
    """Smallest max_dist over a set of representative points.

    Returns (value, index of the attaining rep); ties go to the lowest
    index.  Any candidate whose min_dist exceeds this value can never be
    the nearest in expectation.
    """
    reps = np.asarray(reps, dtype=np.float64)
    if reps.ndim != 2 or reps.shape[0] == 0:
        raise ValueError("reps must be a non-empty (k, m) array")
    if reps.shape[1] != mbr.dim:
        raise ValueError(f"reps have dimension {reps.shape[1]}, mbr has {mbr.dim}")
    maxds = max_dist_many(mbr.lo, mbr.hi, reps)
    i = int(np.argmin(maxds))
    return float(maxds[i]), i

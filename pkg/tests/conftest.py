"""Shared builders for the test suite."""

import numpy as np

from ukmeans import DiscretePdf, Mbr, UncertainObject, object_centroid


def box_object(oid, lo, hi, grid, masses):
    """Build one object from explicit rectangle, grid, and masses."""
    mbr = Mbr(np.asarray(lo, dtype=np.float64), np.asarray(hi, dtype=np.float64))
    pdf = DiscretePdf(tuple(grid), np.asarray(masses, dtype=np.float64), mbr)
    return UncertainObject(oid, mbr, pdf, object_centroid(pdf))


def point_object(oid, p):
    """Degenerate object: single cell, all mass at p."""
    p = np.asarray(p, dtype=np.float64)
    return box_object(oid, p, p, (1,) * p.shape[0], [1.0])


def random_box_object(rng, oid, m=2, max_cells=4, span=100.0, max_side=3.0):
    """Random valid object for fuzz runs; small grids keep brute force cheap."""
    sides = max_side * (1.0 - rng.random(m))
    lo = rng.random(m) * (span - sides)
    grid = tuple(int(g) for g in rng.integers(1, max_cells + 1, size=m))
    s = int(np.prod(grid))
    masses = 1.0 - rng.random(s)
    masses = masses / masses.sum()
    return box_object(oid, lo, lo + sides, grid, masses)

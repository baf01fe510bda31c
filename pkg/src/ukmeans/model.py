"""Domain types for clustering uncertain spatial objects.

An uncertain object is a discretized probability density over an
axis-aligned bounding rectangle: the rectangle is cut into a regular
grid of cells and each cell carries a probability mass.  Everything
downstream (expected distances, pruning, spatial indexing) works on
these types, so they are kept deliberately small and immutable.

Coordinates live in a fixed workspace [0, 100]^m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

WORKSPACE_LO = 0.0
WORKSPACE_HI = 100.0

MASS_SUM_TOL = 1e-9
CENTROID_TOL = 1e-9


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Mbr:
    """Axis-aligned minimum bounding rectangle with lo/hi corner vectors."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = _frozen_array(np.atleast_1d(self.lo))
        hi = _frozen_array(np.atleast_1d(self.hi))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lo and hi must be 1-d vectors of equal length")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    @property
    def sides(self) -> np.ndarray:
        return self.hi - self.lo

    def contains_point(self, p) -> bool:
        p = np.asarray(p, dtype=np.float64)
        return bool(np.all(p >= self.lo) and np.all(p <= self.hi))

    @staticmethod
    def union(mbrs: Sequence["Mbr"]) -> "Mbr":
        if not mbrs:
            raise ValueError("union of zero rectangles is undefined")
        lo = np.min([m.lo for m in mbrs], axis=0)
        hi = np.max([m.hi for m in mbrs], axis=0)
        return Mbr(lo, hi)


@dataclass(frozen=True, eq=False)
class DiscretePdf:
    """Probability masses on a row-major grid of cells over an owner MBR.

    grid_dims gives the number of cells per dimension; cell index c maps
    to the multi-index np.unravel_index(c, grid_dims).  Masses are meant
    to be nonnegative and sum to 1; violations are reported by
    validate_dataset rather than rejected here, so that broken inputs
    can still be diagnosed.
    """

    grid_dims: tuple
    masses: np.ndarray
    owner_mbr: Mbr

    def __post_init__(self):
        dims = tuple(int(g) for g in self.grid_dims)
        object.__setattr__(self, "grid_dims", dims)
        object.__setattr__(self, "masses", _frozen_array(self.masses))

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.grid_dims))


@dataclass(frozen=True, eq=False)
class UncertainObject:
    """One uncertain object: id, bounding rectangle, pdf, precomputed centroid."""

    id: int
    mbr: Mbr
    pdf: DiscretePdf
    centroid: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "centroid", _frozen_array(self.centroid))


@dataclass(frozen=True)
class Params:
    """Experiment parameters; defaults follow the reference configuration."""

    n: int = 20000
    k: int = 50
    l: float = 2.0
    s: int = 128
    d: int = 2
    b: int = 512
    seed: int = 0
    max_iters: int = 100
    move_tol: float = 1e-6


@dataclass
class ClusterState:
    """Cluster representative points plus the object-to-cluster assignment.

    assignment maps object id to a cluster index in [0, k).
    """

    reps: np.ndarray
    assignment: dict
    iteration: int = 0


def cell_pitch(pdf: DiscretePdf) -> np.ndarray:
    dims = np.asarray(pdf.grid_dims, dtype=np.float64)
    return (pdf.owner_mbr.hi - pdf.owner_mbr.lo) / dims


def cell_center(pdf: DiscretePdf, cell_index: int) -> np.ndarray:
    """Center point of one grid cell, row-major cell numbering."""
    s = pdf.n_cells
    if not 0 <= cell_index < s:
        raise ValueError(f"cell index {cell_index} outside [0, {s})")
    multi = np.asarray(np.unravel_index(cell_index, pdf.grid_dims), dtype=np.float64)
    return pdf.owner_mbr.lo + (multi + 0.5) * cell_pitch(pdf)


def cell_centers(pdf: DiscretePdf) -> np.ndarray:
    """All cell centers as an (s, m) array in row-major cell order."""
    pitch = cell_pitch(pdf)
    lo = pdf.owner_mbr.lo
    axes = [lo[t] + (np.arange(g, dtype=np.float64) + 0.5) * pitch[t]
            for t, g in enumerate(pdf.grid_dims)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def object_centroid(pdf: DiscretePdf) -> np.ndarray:
    """Probability-weighted mean position of the pdf."""
    centers = cell_centers(pdf)
    return (pdf.masses[:, None] * centers).sum(axis=0)


def _near_equal_factors(s: int, m: int) -> list:
    # Split s into m integer factors, product exactly s, as close to
    # s**(1/m) as divisibility allows.  Greedy: repeatedly take the
    # smallest divisor at or above the geometric mean of what is left.
    out = []
    rem = int(s)
    for slots in range(m, 0, -1):
        if slots == 1:
            out.append(rem)
            break
        target = rem ** (1.0 / slots)
        d = max(1, math.ceil(target - 1e-9))
        while rem % d != 0:
            d += 1
        out.append(d)
        rem //= d
    out.sort(reverse=True)
    return out


def grid_shape(s: int, m: int, sides) -> tuple:
    """Grid dimensions for s cells over an m-dim box with the given side lengths.

    Larger factors go to longer sides; on equal sides the lower dimension
    index takes the larger factor.
    """
    if s < 1:
        raise ValueError("cell count must be at least 1")
    if m < 1:
        raise ValueError("dimension must be at least 1")
    sides = np.asarray(sides, dtype=np.float64)
    factors = _near_equal_factors(s, m)
    order = sorted(range(m), key=lambda t: (-sides[t], t))
    dims = [0] * m
    for rank, t in enumerate(order):
        dims[t] = factors[rank]
    return tuple(dims)


def validate_dataset(objects: Iterable[UncertainObject]) -> list:
    """Check every dataset invariant; return one message per violation.

    Never raises: broken objects are reported by id so a bad file can be
    diagnosed in one pass.  An empty return value means the dataset is
    clean.
    """
    diagnostics = []
    objects = list(objects)
    dims_seen = {}
    for obj in objects:
        oid = obj.id
        mbr = obj.mbr
        if oid < 0:
            diagnostics.append(f"object {oid}: negative id")
        dims_seen.setdefault(mbr.dim, []).append(oid)
        if np.any(mbr.hi < mbr.lo):
            diagnostics.append(f"object {oid}: mbr hi < lo in some dimension")
            continue
        pdf = obj.pdf
        if len(pdf.grid_dims) != mbr.dim:
            diagnostics.append(f"object {oid}: grid rank {len(pdf.grid_dims)} != mbr dim {mbr.dim}")
            continue
        if any(g < 1 for g in pdf.grid_dims):
            diagnostics.append(f"object {oid}: non-positive grid dimension {pdf.grid_dims}")
            continue
        if pdf.n_cells != pdf.masses.shape[0]:
            diagnostics.append(
                f"object {oid}: {pdf.masses.shape[0]} masses for {pdf.n_cells} grid cells")
            continue
        if np.any(pdf.masses < 0):
            diagnostics.append(f"object {oid}: negative probability mass")
        total = float(pdf.masses.sum())
        if abs(total - 1.0) > MASS_SUM_TOL:
            diagnostics.append(
                f"object {oid}: masses sum to {total!r}, expected 1 within {MASS_SUM_TOL}")
        if obj.centroid.shape != (mbr.dim,):
            diagnostics.append(f"object {oid}: centroid has wrong dimension")
            continue
        if np.any(obj.centroid < mbr.lo) or np.any(obj.centroid > mbr.hi):
            diagnostics.append(f"object {oid}: centroid outside its mbr")
        recomputed = object_centroid(pdf)
        err = float(np.max(np.abs(recomputed - obj.centroid)))
        if err > CENTROID_TOL:
            diagnostics.append(
                f"object {oid}: stored centroid off by {err:.3e} from the pdf")
    if len(dims_seen) > 1:
        parts = ", ".join(f"m={m} x{len(ids)}" for m, ids in sorted(dims_seen.items()))
        diagnostics.append(f"dataset: mixed dimensionality ({parts})")
    return diagnostics


@dataclass
class PackedObjects:
    """Array view of an object list for the clustering hot loops.

    Rows are in the order of the input list; masses/centers stay ragged
    per object, with stacked copies available when every object shares
    one sample count (the common case for generated datasets).
    """

    ids: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    centroids: np.ndarray
    mbrs: list
    masses: list
    centers: list
    stacked_masses: Optional[np.ndarray] = None
    stacked_centers: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.ids.shape[0]

    @property
    def m(self) -> int:
        return self.lo.shape[1]

    @classmethod
    def from_objects(cls, objects: Sequence[UncertainObject]) -> "PackedObjects":
        objects = list(objects)
        if not objects:
            raise ValueError("cannot pack an empty object list")
        m = objects[0].mbr.dim
        if any(o.mbr.dim != m for o in objects):
            raise ValueError("objects mix dimensionalities")
        ids = np.array([o.id for o in objects], dtype=np.int64)
        lo = np.stack([o.mbr.lo for o in objects])
        hi = np.stack([o.mbr.hi for o in objects])
        centroids = np.stack([o.centroid for o in objects])
        masses = [o.pdf.masses for o in objects]
        centers = [cell_centers(o.pdf) for o in objects]
        packed = cls(ids=ids, lo=lo, hi=hi, centroids=centroids,
                     mbrs=[o.mbr for o in objects], masses=masses, centers=centers)
        counts = {ms.shape[0] for ms in masses}
        if len(counts) == 1:
            packed.stacked_masses = np.stack(masses)
            packed.stacked_centers = np.stack(centers)
        return packed

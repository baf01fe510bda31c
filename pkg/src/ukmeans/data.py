"""Synthetic dataset generation, plain-text serialization, and CSV
ingestion of point data into uncertain objects.

Generation places each object's rectangle at a uniform anchor in the
workspace with side lengths uniform on (0, l]; rectangles sticking out
of the workspace are shifted back in, never shrunk.  The pdf grid splits
the requested cell count into near-equal per-dimension factors, larger
factors on longer sides, and draws cell masses uniform on (0, 1] before
normalizing.

Each object gets its own generator stream seeded by (seed, object index),
so generation order does not matter and objects can be produced in
parallel without changing the dataset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import (WORKSPACE_HI, WORKSPACE_LO, DiscretePdf, Mbr, Params,
                    UncertainObject, grid_shape, object_centroid)


class DatasetFormatError(ValueError):
    """Raised for malformed dataset files; carries the byte offset of the
    offending region."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (at byte offset {byte_offset})")
        self.byte_offset = byte_offset


@dataclass(frozen=True)
class GenSpec:
    """Generation request: parameter block plus the fixed workspace."""

    params: Params

    @property
    def workspace(self) -> tuple:
        return (WORKSPACE_LO, WORKSPACE_HI)


def _check_gen_args(l: float, s: int) -> None:
    if l <= 0:
        raise ValueError(f"max side length must be positive, got {l}")
    if l > WORKSPACE_HI - WORKSPACE_LO:
        raise ValueError(f"max side length {l} exceeds the workspace span")
    if s < 1:
        raise ValueError(f"cell count must be at least 1, got {s}")


def _object_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _make_object(oid: int, lo: np.ndarray, sides: np.ndarray, s: int,
                 rng: np.random.Generator) -> UncertainObject:
    hi = lo + sides
    mbr = Mbr(lo, hi)
    dims = grid_shape(s, lo.shape[0], sides)
    masses = 1.0 - rng.random(s)       # uniform on (0, 1]
    masses = masses / masses.sum()
    pdf = DiscretePdf(dims, masses, mbr)
    return UncertainObject(oid, mbr, pdf, object_centroid(pdf))


def generate(spec: GenSpec) -> list:
    """Synthesize spec.params.n uncertain objects, deterministic per seed.

    Draw order per object: anchor (m values), side lengths (m values),
    masses (s values), each from that object's own stream.
    """
    p = spec.params
    _check_gen_args(p.l, p.s)
    span = WORKSPACE_HI - WORKSPACE_LO
    objects = []
    for i in range(p.n):
        rng = _object_rng(p.seed, i)
        anchor = WORKSPACE_LO + span * rng.random(p.d)
        sides = p.l * (1.0 - rng.random(p.d))          # (0, l]
        lo = np.minimum(anchor, WORKSPACE_HI - sides)  # shift, never shrink
        objects.append(_make_object(i, lo, sides, p.s, rng))
    return objects


def uncertainize(points, l: float, s: int, seed: int) -> list:
    """Wrap each point in a generated uncertain object containing it.

    The rectangle is centered on the point with random sides up to l,
    shifted to stay inside the workspace; the point always remains
    inside.  Points must already lie in the workspace.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.size == 0:
        raise ValueError("no points to uncertainize")
    _check_gen_args(l, s)
    if np.any(points < WORKSPACE_LO) or np.any(points > WORKSPACE_HI):
        raise ValueError("points must lie inside the workspace; rescale first")
    objects = []
    for i, p in enumerate(points):
        rng = _object_rng(seed, i)
        sides = l * (1.0 - rng.random(points.shape[1]))
        lo = p - 0.5 * sides
        lo = np.clip(lo, WORKSPACE_LO, WORKSPACE_HI - sides)
        objects.append(_make_object(i, lo, sides, s, rng))
    return objects


def _fmt(x: float) -> str:
    return repr(float(x))


def save_dataset(objects: Sequence[UncertainObject], path) -> None:
    """Write objects as plain text: a (m, n, s) header line, then one line
    per object holding id, lo, hi, grid dims, and masses.

    Floats use shortest round-trip formatting, so load_dataset restores
    the exact values.
    """
    objects = list(objects)
    if not objects:
        raise ValueError("refusing to save an empty dataset")
    m = objects[0].mbr.dim
    s = objects[0].pdf.masses.shape[0]
    if any(o.mbr.dim != m or o.pdf.masses.shape[0] != s for o in objects):
        raise ValueError("dataset file format needs uniform dimension and cell count")
    with open(path, "w") as fh:
        fh.write(f"{m} {len(objects)} {s}\n")
        for o in objects:
            parts = [str(o.id)]
            parts += [_fmt(v) for v in o.mbr.lo]
            parts += [_fmt(v) for v in o.mbr.hi]
            parts += [str(g) for g in o.pdf.grid_dims]
            parts += [_fmt(v) for v in o.pdf.masses]
            fh.write(" ".join(parts) + "\n")


def load_dataset(path) -> list:
    """Parse a dataset file back into objects; centroids are recomputed
    from the pdf, which restores them exactly for files we wrote.

    Malformed or truncated files raise DatasetFormatError naming the
    byte offset where parsing failed.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    offset = 0
    lines = []                 # (byte offset of line start, text)
    for chunk in raw.split(b"\n"):
        lines.append((offset, chunk.decode("utf-8", errors="replace")))
        offset += len(chunk) + 1
    lines = [(off, txt) for off, txt in lines if txt.strip()]
    eof = len(raw)
    if not lines:
        raise DatasetFormatError("empty dataset file", 0)

    head_off, head = lines[0]
    tokens = head.split()
    if len(tokens) != 3:
        raise DatasetFormatError(f"header needs 3 fields (m n s), got {len(tokens)}", head_off)
    try:
        m, n, s = (int(t) for t in tokens)
    except ValueError:
        raise DatasetFormatError("header fields must be integers", head_off) from None
    if m < 1 or n < 0 or s < 1:
        raise DatasetFormatError(f"nonsensical header m={m} n={n} s={s}", head_off)

    body = lines[1:]
    if len(body) < n:
        raise DatasetFormatError(
            f"truncated: header promises {n} objects, file holds {len(body)}", eof)
    want = 1 + 3 * m + s
    objects = []
    for off, txt in body[:n]:
        tokens = txt.split()
        if len(tokens) != want:
            raise DatasetFormatError(
                f"object line has {len(tokens)} fields, expected {want}", off)
        try:
            oid = int(tokens[0])
            lo = np.array([float(t) for t in tokens[1:1 + m]])
            hi = np.array([float(t) for t in tokens[1 + m:1 + 2 * m]])
            dims = tuple(int(t) for t in tokens[1 + 2 * m:1 + 3 * m])
            masses = np.array([float(t) for t in tokens[1 + 3 * m:]])
        except ValueError:
            raise DatasetFormatError("unparsable numeric field", off) from None
        if int(np.prod(dims)) != s:
            raise DatasetFormatError(
                f"grid {dims} holds {int(np.prod(dims))} cells, header says {s}", off)
        mbr = Mbr(lo, hi)
        pdf = DiscretePdf(dims, masses, mbr)
        objects.append(UncertainObject(oid, mbr, pdf, object_centroid(pdf)))
    return objects


def dataset_equal(a: Sequence[UncertainObject], b: Sequence[UncertainObject]) -> bool:
    """Exact (bitwise) equality of two object lists."""
    a, b = list(a), list(b)
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if x.id != y.id or x.pdf.grid_dims != y.pdf.grid_dims:
            return False
        if not (np.array_equal(x.mbr.lo, y.mbr.lo) and np.array_equal(x.mbr.hi, y.mbr.hi)):
            return False
        if not np.array_equal(x.pdf.masses, y.pdf.masses):
            return False
        if not np.array_equal(x.centroid, y.centroid):
            return False
    return True


def run_result_record(result, n_objects: int) -> dict:
    """Named-field summary of a run: per-iteration wall time, normalized
    ED and candidate-pair counts, iterations, objective."""
    c = result.counters
    denom = n_objects * max(result.iterations, 1)
    return {
        "t1_ms": result.wall_time_per_iter,
        "n_ed": c.ed_evals / denom,
        "n_cand": c.cand_pairs / denom,
        "iterations": result.iterations,
        "objective": result.objective,
        "ed_evals": c.ed_evals,
        "cand_pairs": c.cand_pairs,
        "build_ms": result.build_ms,
    }


def save_run_result(path, result, n_objects: int) -> None:
    with open(path, "w") as fh:
        json.dump(run_result_record(result, n_objects), fh, indent=2)
        fh.write("\n")


def load_run_result(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def read_points_csv(path, columns: Sequence[int], delimiter: str = ",",
                    skip_header: bool = False) -> np.ndarray:
    """Pull selected numeric columns out of a delimited text file."""
    rows = np.loadtxt(path, delimiter=delimiter, usecols=tuple(columns),
                      skiprows=1 if skip_header else 0, ndmin=2)
    return rows


def rescale_points(points, bounds: Optional[tuple] = None) -> tuple:
    """Min-max rescale columns into the workspace.

    bounds, if given, is (mins, maxs) to rescale against (so several
    files can share one mapping); otherwise the data's own extent is
    used.  A constant column lands on the workspace midpoint.  Returns
    (scaled points, the bounds used).
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if bounds is None:
        mins, maxs = points.min(axis=0), points.max(axis=0)
    else:
        mins = np.asarray(bounds[0], dtype=np.float64)
        maxs = np.asarray(bounds[1], dtype=np.float64)
    span = maxs - mins
    mid = 0.5 * (WORKSPACE_LO + WORKSPACE_HI)
    scaled = np.full_like(points, mid)
    ok = span > 0
    scaled[:, ok] = (WORKSPACE_LO + (points[:, ok] - mins[ok]) / span[ok]
                     * (WORKSPACE_HI - WORKSPACE_LO))
    return scaled, (mins, maxs)

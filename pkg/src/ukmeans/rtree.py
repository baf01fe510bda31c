"""Sort-Tile-Recursive bulk-loaded R*-tree over object bounding rectangles,
with per-subtree aggregates (object count, centroid) for group pruning.

The tree is static: it is bulk loaded once per clustering run and never
mutated, so no insert/delete/reinsertion machinery exists.  Fanout comes
from a block-size byte model: an entry stores an MBR (2*m*8 bytes), a
centroid (m*8), a count or id (8) and a child or pdf reference (8).
PDFs themselves live outside the nodes in an arena keyed by object id;
leaf entries only carry the key.

Group assignment walks the tree depth first.  Each entry's rectangle is
pruned against the surviving clusters handed down from its parent; if a
single cluster survives, the entire subtree is assigned to it with zero
expected-distance evaluations and its stored aggregates stand in for the
member objects during readjustment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .distance import EdCounters, ed_to_points
from .model import Mbr, PackedObjects, UncertainObject
from .pruning import CandidateSet, hybrid_prune

MBR_BYTES_PER_DIM = 16      # lo and hi, 8 bytes each
CENTROID_BYTES_PER_DIM = 8
REF_BYTES = 8               # child pointer / pdf reference
META_BYTES = 8              # count / object id


def entry_bytes(m: int) -> int:
    return MBR_BYTES_PER_DIM * m + CENTROID_BYTES_PER_DIM * m + META_BYTES + REF_BYTES


def fanout_for_block(block_size: int, m: int) -> int:
    f = int(block_size) // entry_bytes(m)
    if f < 2:
        raise ValueError(
            f"block size {block_size} holds {f} entries at m={m}; need at least 2")
    return f


@dataclass
class LeafEntry:
    """One object in a leaf: its rectangle, centroid, id, and the arena
    key of its pdf (the id doubles as the key)."""

    mbr: Mbr
    centroid: np.ndarray
    object_id: int
    pdf_ref: int
    row: int


@dataclass
class InternalEntry:
    """Child pointer plus the child's aggregates."""

    mbr: Mbr
    count: int
    centroid: np.ndarray
    child: "RStarNode"


@dataclass
class RStarNode:
    level: int                  # 0 at the leaves
    entries: list
    mbr: Mbr = None
    count: int = 0
    centroid: np.ndarray = None
    start: int = 0              # object range [start, end) into tree.order
    end: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.level == 0


class PdfArena:
    """Object-id keyed access to the pdf arrays, kept outside the nodes."""

    def __init__(self, packed: PackedObjects):
        self._packed = packed
        self._row_of = {int(oid): i for i, oid in enumerate(packed.ids)}

    def get(self, object_id: int):
        row = self._row_of[int(object_id)]
        return self._packed.masses[row], self._packed.centers[row]


@dataclass
class RStarTree:
    root: RStarNode
    height: int
    leaf_fanout: int
    internal_fanout: int
    node_count: int
    block_size: int
    order: np.ndarray           # object rows in leaf order
    packed: PackedObjects
    arena: PdfArena
    object_ids: np.ndarray      # sorted, for stale-index checks

    @property
    def n_objects(self) -> int:
        return self.packed.n

    def leaves(self) -> list:
        out = []

        def walk(node):
            if node.is_leaf:
                out.append(node)
            else:
                for e in node.entries:
                    walk(e.child)

        walk(self.root)
        return out


def _balanced_groups(n: int, fanout: int) -> list:
    """Sizes for ceil(n/fanout) groups differing by at most one."""
    pages = math.ceil(n / fanout)
    base, extra = divmod(n, pages)
    return [base + 1] * extra + [base] * (pages - extra)


def _slab_sizes(n: int, fanout: int, dims_left: int) -> list:
    pages = math.ceil(n / fanout)
    per_slab = fanout * math.ceil(pages ** ((dims_left - 1) / dims_left))
    sizes = []
    left = n
    while left > 0:
        take = min(per_slab, left)
        sizes.append(take)
        left -= take
    # a lone trailing rectangle would become a 1-entry node; fold it in
    if len(sizes) > 1 and sizes[-1] == 1:
        last = sizes.pop()
        sizes[-1] += last
    return sizes


def _tile(order: np.ndarray, cents: np.ndarray, dim: int, m: int, fanout: int) -> list:
    """Sort-Tile-Recursive grouping: returns runs of row indices, each run
    destined for one node."""
    n = order.shape[0]
    key = cents[order, dim]
    srt = order[np.argsort(key, kind="stable")]
    if n <= fanout:
        return [srt]
    if dim == m - 1:
        groups = []
        at = 0
        for size in _balanced_groups(n, fanout):
            groups.append(srt[at:at + size])
            at += size
        return groups
    groups = []
    at = 0
    for size in _slab_sizes(n, fanout, m - dim):
        groups.extend(_tile(srt[at:at + size], cents, dim + 1, m, fanout))
        at += size
    return groups


def _node_from_entries(level: int, entries: list) -> RStarNode:
    lo = np.min([e.mbr.lo for e in entries], axis=0)
    hi = np.max([e.mbr.hi for e in entries], axis=0)
    if level == 0:
        count = len(entries)
        centroid = np.sum([e.centroid for e in entries], axis=0) / count
    else:
        count = int(sum(e.count for e in entries))
        centroid = np.sum([e.count * e.centroid for e in entries], axis=0) / count
    return RStarNode(level=level, entries=entries, mbr=Mbr(lo, hi),
                     count=count, centroid=centroid)


def bulk_load(objects: Union[Sequence[UncertainObject], PackedObjects],
              block_size: int) -> RStarTree:
    """Build the whole tree bottom-up from a dataset.

    Leaf runs come from STR tiling of object centroids; upper levels
    re-tile the node MBR centers until a single root remains.  Every
    level is packed to the fanout with near-equal runs, so non-root
    nodes keep at least two entries whenever the fanout is at least 3.
    """
    packed = objects if isinstance(objects, PackedObjects) else PackedObjects.from_objects(objects)
    m = packed.m
    fanout = fanout_for_block(block_size, m)

    rows = np.arange(packed.n, dtype=np.int64)
    leaf_runs = _tile(rows, packed.centroids, 0, m, fanout)
    nodes = []
    for run in leaf_runs:
        entries = [LeafEntry(mbr=packed.mbrs[i], centroid=packed.centroids[i],
                             object_id=int(packed.ids[i]), pdf_ref=int(packed.ids[i]),
                             row=int(i))
                   for i in run]
        nodes.append(_node_from_entries(0, entries))

    height = 1
    level = 0
    while len(nodes) > 1:
        level += 1
        height += 1
        centers = np.stack([nd.mbr.center for nd in nodes])
        idx = np.arange(len(nodes), dtype=np.int64)
        runs = _tile(idx, centers, 0, m, fanout)
        parents = []
        for run in runs:
            entries = [InternalEntry(mbr=nodes[i].mbr, count=nodes[i].count,
                                     centroid=nodes[i].centroid, child=nodes[i])
                       for i in run]
            parents.append(_node_from_entries(level, entries))
        nodes = parents

    root = nodes[0]
    order = np.empty(packed.n, dtype=np.int64)
    node_count = 0

    def assign_ranges(node, at):
        nonlocal node_count
        node_count += 1
        node.start = at
        if node.is_leaf:
            for e in node.entries:
                order[at] = e.row
                at += 1
        else:
            for e in node.entries:
                at = assign_ranges(e.child, at)
        node.end = at
        return at

    assign_ranges(root, 0)
    return RStarTree(root=root, height=height, leaf_fanout=fanout,
                     internal_fanout=fanout, node_count=node_count,
                     block_size=int(block_size), order=order, packed=packed,
                     arena=PdfArena(packed),
                     object_ids=np.sort(packed.ids.copy()))


def centroid_of_subtree(entry) -> tuple:
    """(object count, centroid) for the subtree under an entry, straight
    from stored aggregates; a leaf entry is its own subtree of one."""
    if isinstance(entry, InternalEntry):
        return entry.count, entry.centroid
    return 1, entry.centroid


def check_structure(tree: RStarTree, tol: float = 1e-9) -> list:
    """Verify the structural invariants; returns one message per violation."""
    problems = []
    packed = tree.packed
    leaf_depths = set()

    def walk(node, depth, is_root):
        if node.is_leaf:
            leaf_depths.add(depth)
        # a 2-entry block cannot pair up an odd level, so one node may
        # legitimately hold a single entry there
        min_fill = 1 if tree.internal_fanout == 2 else 2
        if not is_root and len(node.entries) < min_fill:
            problems.append(f"non-root node at depth {depth} has {len(node.entries)} entries")
        fanout = tree.leaf_fanout if node.is_leaf else tree.internal_fanout
        if len(node.entries) > fanout:
            problems.append(f"node at depth {depth} overflows fanout {fanout}")
        count = 0
        weighted = np.zeros(packed.m)
        for e in node.entries:
            if np.any(e.mbr.lo < node.mbr.lo) or np.any(e.mbr.hi > node.mbr.hi):
                problems.append(f"entry mbr escapes its node at depth {depth}")
            c, cent = centroid_of_subtree(e)
            count += c
            weighted += c * np.asarray(cent)
            if isinstance(e, InternalEntry):
                if e.count != e.child.count:
                    problems.append(f"entry/child count mismatch at depth {depth}")
                walk(e.child, depth + 1, False)
        if count != node.count:
            problems.append(f"aggregate count {node.count} != {count} at depth {depth}")
        elif np.max(np.abs(weighted / count - node.centroid)) > tol:
            problems.append(f"aggregate centroid off at depth {depth}")

    walk(tree.root, 0, True)
    if len(leaf_depths) != 1:
        problems.append(f"leaves at mixed depths {sorted(leaf_depths)}")
    rows = np.sort(tree.order)
    if not np.array_equal(rows, np.arange(packed.n)):
        problems.append("leaf ranges are not a permutation of the objects")
    if tree.root.count != packed.n:
        problems.append(f"root count {tree.root.count} != {packed.n} objects")
    flat = packed.centroids.mean(axis=0)
    if np.max(np.abs(tree.root.centroid - flat)) > 1e-7:
        problems.append("root centroid disagrees with the flat centroid mean")
    return problems


def _assign_leaf_node(tree: RStarTree, node: RStarNode, reps, alive,
                      counters: EdCounters, labels, sums, counts) -> None:
    """Assign every object of one leaf node, candidates batched across rows.

    Runs the same cell test, bound test, and residual full evaluations as
    the entry-at-a-time path, with the same tie rules and the same counter
    increments; only the loop structure differs, so results and counters
    must stay bit-identical to pruning each row on its own.
    """
    packed = tree.packed
    rows = tree.order[node.start:node.end]
    lo = packed.lo[rows]
    hi = packed.hi[rows]
    sel = reps[alive]
    nr, q = rows.shape[0], alive.shape[0]

    # Cell test, all rows at once.  Mirrors vcp_prune: only the candidate
    # nearest the rectangle center can contain it, and containment needs
    # every corner extremal toward a rival to sit strictly nearer.
    counters.cand_pairs += nr * q
    center = 0.5 * (lo + hi)
    dc = sel[None, :, :] - center[:, None, :]
    jl = np.argmin((dc * dc).sum(axis=2), axis=1)
    cj = sel[jl]
    direction = sel[None, :, :] - cj[:, None, :]
    corner = np.where(direction > 0, hi[:, None, :], lo[:, None, :])
    d_to_j = np.sqrt(((corner - cj[:, None, :]) ** 2).sum(axis=2))
    d_to_q = np.sqrt(((corner - sel[None, :, :]) ** 2).sum(axis=2))
    ok = d_to_j < d_to_q
    ok[np.arange(nr), jl] = True
    contained = ok.all(axis=1)

    # Bound test only for the rows the cell test left open.
    open_rows = np.flatnonzero(~contained)
    keep = None
    if open_rows.size:
        counters.cand_pairs += open_rows.size * q
        lo2 = lo[open_rows][:, None, :]
        hi2 = hi[open_rows][:, None, :]
        pts = sel[None, :, :]
        clamped = np.clip(pts, lo2, hi2)
        diff = pts - clamped
        minds = np.sqrt((diff * diff).sum(axis=2))
        far = np.maximum(np.abs(pts - lo2), np.abs(hi2 - pts))
        maxds = np.sqrt((far * far).sum(axis=2))
        keep = minds <= maxds.min(axis=1)[:, None]

    pos = 0                     # open_rows cursor, advanced in row order
    for i in range(nr):
        row = int(rows[i])
        if contained[i]:
            j = int(alive[jl[i]])
        else:
            krow = keep[pos]
            pos += 1
            live = alive[krow]
            if live.shape[0] == 1:
                j = int(live[0])
            else:
                eds = ed_to_points(packed.masses[row], packed.centers[row],
                                   reps[live], counters)
                j = int(live[int(np.argmin(eds))])
        labels[row] = j
        sums[j] += packed.centroids[row]
        counts[j] += 1


def visit_entry(tree: RStarTree, entry, reps, alive, counters: EdCounters,
                labels, sums, counts) -> None:
    """Prune one entry against the inherited candidates and assign its
    subtree, recursing only where more than one candidate survives.

    Every child entry is pruned against a fresh view of the parent's
    surviving set, so siblings never influence each other.
    """
    cand = hybrid_prune(entry.mbr, reps, CandidateSet(entry.mbr, alive), counters)
    if len(cand) == 1:
        j = int(cand.alive[0])
        if isinstance(entry, InternalEntry):
            child = entry.child
            labels[tree.order[child.start:child.end]] = j
            sums[j] += entry.count * entry.centroid
            counts[j] += entry.count
        else:
            labels[entry.row] = j
            sums[j] += entry.centroid
            counts[j] += 1
        return
    if isinstance(entry, InternalEntry):
        child = entry.child
        if child.is_leaf:
            _assign_leaf_node(tree, child, reps, cand.alive, counters,
                              labels, sums, counts)
        else:
            for e in child.entries:
                visit_entry(tree, e, reps, cand.alive, counters, labels, sums, counts)
    else:
        packed = tree.packed
        masses, centers = packed.masses[entry.row], packed.centers[entry.row]
        eds = ed_to_points(masses, centers, reps[cand.alive], counters)
        j = int(cand.alive[int(np.argmin(eds))])
        labels[entry.row] = j
        sums[j] += entry.centroid
        counts[j] += 1


def assign_with_aggregates(tree: RStarTree, reps, counters: EdCounters):
    """One assignment pass over the tree.

    Returns (labels, sums, counts): labels[i] is the cluster of object
    row i; sums/counts accumulate per-cluster centroid mass for the
    readjustment step, using subtree aggregates wherever a whole subtree
    was bulk-assigned.
    """
    reps = np.asarray(reps, dtype=np.float64)
    packed = tree.packed
    if reps.ndim != 2 or reps.shape[1] != packed.m:
        raise ValueError("reps must be (k, m) matching the indexed objects")
    k = reps.shape[0]
    labels = np.empty(packed.n, dtype=np.int64)
    sums = np.zeros((k, packed.m))
    counts = np.zeros(k, dtype=np.int64)
    full = np.arange(k, dtype=np.int64)
    for e in tree.root.entries:
        visit_entry(tree, e, reps, full, counters, labels, sums, counts)
    return labels, sums, counts


def cluster_assign_with_tree(tree: RStarTree, reps, counters: EdCounters) -> np.ndarray:
    """Assign every indexed object to its expected-nearest cluster.

    Returns labels aligned with the object order the tree was built
    from.  Matches the plain per-object argmin over expected distances;
    the tree only changes how much work that takes.
    """
    labels, _, _ = assign_with_aggregates(tree, reps, counters)
    return labels


def dump_lines(tree: RStarTree) -> list:
    """One text line per node: depth, kind, mbr, count, centroid."""
    lines = []

    def fmt(node, depth):
        box = "x".join(f"[{float(lo)!r}..{float(hi)!r}]"
                       for lo, hi in zip(node.mbr.lo, node.mbr.hi))
        cent = "(" + ", ".join(repr(float(c)) for c in node.centroid) + ")"
        kind = "leaf" if node.is_leaf else "internal"
        lines.append(f"{depth}, {kind}, {box}, {node.count}, {cent}")
        if not node.is_leaf:
            for e in node.entries:
                fmt(e.child, depth + 1)

    fmt(tree.root, 0)
    return lines


def dump(tree: RStarTree, path) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(dump_lines(tree)) + "\n")

"""UK-means clustering of uncertain objects, with optional pruning.

Each iteration assigns every object to the cluster representative with
the smallest expected distance, then moves each representative to the
mean centroid of its members.  The four assignment strategies differ
only in how much work the argmin takes:

* baseline   - evaluate every (object, cluster) expected distance
* mmbb       - min/max bounding-box pruning, then EDs over survivors
* vcp        - Voronoi-cell containment first, bounding-box pruning on a
               miss, then EDs over survivors
* rmm_vcp    - the same pruning applied group-wise down an R*-tree, with
               whole subtrees bulk-assigned when one candidate survives

A pruned-to-one candidate is assigned directly with no ED evaluation.
All strategies produce identical assignments; the counters in the result
record how much each one actually computed.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .distance import EdCounters, ed_to_points
from .model import (WORKSPACE_HI, WORKSPACE_LO, ClusterState, PackedObjects,
                    Params, UncertainObject)
from .pruning import CandidateSet, hybrid_prune, mmbb_prune
from .rtree import RStarTree, assign_with_aggregates, bulk_load, visit_entry

STRATEGY_KINDS = ("baseline", "mmbb", "vcp", "rmm_vcp")


@dataclass
class AssignStrategy:
    """Which assignment path to run; rmm_vcp may carry a prebuilt index."""

    kind: str
    index: Optional[RStarTree] = None

    def __post_init__(self):
        kind = self.kind.replace("-", "_")
        if kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy {self.kind!r}; choose from {STRATEGY_KINDS}")
        self.kind = kind
        if self.index is not None and kind != "rmm_vcp":
            raise ValueError("only rmm_vcp uses a spatial index")


@dataclass
class RunResult:
    final_state: ClusterState
    iterations: int
    counters: EdCounters
    objective: float
    wall_time_per_iter: float       # milliseconds
    build_ms: float = 0.0
    history: Optional[list] = None


def init_reps(params: Params, rng_seed: int) -> np.ndarray:
    """k starting representatives drawn uniformly from the workspace.

    The draw is a fresh stream keyed only by rng_seed, separate from the
    per-object dataset streams, so rep initialization and data generation
    never interact.
    """
    if params.k < 1:
        raise ValueError("need at least one cluster")
    rng = np.random.default_rng(rng_seed)
    return rng.uniform(WORKSPACE_LO, WORKSPACE_HI, size=(params.k, params.d))


def readjust(objects: Sequence[UncertainObject], state: ClusterState) -> np.ndarray:
    """Move each representative to the mean centroid of its members.

    A cluster with no members keeps its previous representative.  The
    sum runs in object order, so the result is reproducible.
    """
    k = state.reps.shape[0]
    labels = np.array([state.assignment[o.id] for o in objects], dtype=np.int64)
    centroids = np.stack([o.centroid for o in objects])
    return _means_from_labels(labels, centroids, k, state.reps)


def _means_from_labels(labels, centroids, k, old_reps):
    counts = np.bincount(labels, minlength=k)
    sums = np.empty((k, centroids.shape[1]))
    for t in range(centroids.shape[1]):
        sums[:, t] = np.bincount(labels, weights=centroids[:, t], minlength=k)
    return _means_from_sums(sums, counts, old_reps)


def _means_from_sums(sums, counts, old_reps):
    new = old_reps.copy()
    occupied = counts > 0
    new[occupied] = sums[occupied] / counts[occupied, None]
    return new


def _assign_rows(packed: PackedObjects, reps, kind, rows, counters, labels) -> None:
    k = reps.shape[0]
    full = np.arange(k, dtype=np.int64)
    masses, centers, mbrs = packed.masses, packed.centers, packed.mbrs
    for i in rows:
        if kind == "baseline":
            eds = ed_to_points(masses[i], centers[i], reps, counters)
            labels[i] = int(np.argmin(eds))
            continue
        cand = CandidateSet(mbrs[i], full)
        if kind == "mmbb":
            cand = mmbb_prune(mbrs[i], reps, cand, counters)
        else:
            cand = hybrid_prune(mbrs[i], reps, cand, counters)
        if len(cand) == 1:
            labels[i] = int(cand.alive[0])
        else:
            eds = ed_to_points(masses[i], centers[i], reps[cand.alive], counters)
            labels[i] = int(cand.alive[int(np.argmin(eds))])


def _assign_flat(packed, reps, kind, counters, threads) -> np.ndarray:
    labels = np.empty(packed.n, dtype=np.int64)
    if threads <= 1 or packed.n < 2 * threads:
        _assign_rows(packed, reps, kind, range(packed.n), counters, labels)
        return labels
    chunks = np.array_split(np.arange(packed.n), threads)
    locals_ = [EdCounters() for _ in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_assign_rows, packed, reps, kind, chunk, ctr, labels)
                   for chunk, ctr in zip(chunks, locals_)]
        for f in futures:
            f.result()
    for ctr in locals_:
        counters.merge(ctr)
    return labels


def _objective(packed: PackedObjects, labels, reps) -> float:
    """Sum of squared expected distances to the assigned representatives.

    Bookkeeping only: never touches the work counters.
    """
    sel = reps[labels]
    if packed.stacked_centers is not None:
        diff = packed.stacked_centers - sel[:, None, :]
        dist = np.sqrt((diff * diff).sum(axis=2))
        eds = (packed.stacked_masses * dist).sum(axis=1)
    else:
        eds = np.array([ed_to_points(packed.masses[i], packed.centers[i], sel[i:i + 1])[0]
                        for i in range(packed.n)])
    return float((eds * eds).sum())


def run(objects: Sequence[UncertainObject], params: Params,
        strategy: Union[AssignStrategy, str], *, threads: int = 1,
        initial_reps=None, record_history: bool = False) -> RunResult:
    """Cluster a dataset and report what it cost.

    Stops when the assignment map repeats and no representative moved by
    move_tol or more, or after max_iters iterations.  Ties in the argmin
    go to the lowest cluster index, so all strategies agree exactly.
    With threads > 1 the assignment phase fans out over object blocks
    (or subtrees for rmm_vcp); counters merge deterministically.
    """
    if isinstance(strategy, str):
        strategy = AssignStrategy(strategy)
    objects = list(objects)
    if not objects:
        raise ValueError("cannot cluster an empty dataset")
    packed = PackedObjects.from_objects(objects)
    if packed.m != params.d:
        raise ValueError(f"dataset is {packed.m}-dimensional, params.d is {params.d}")

    if initial_reps is not None:
        reps = np.array(initial_reps, dtype=np.float64, copy=True)
        if reps.shape != (params.k, params.d):
            raise ValueError(f"initial reps must have shape ({params.k}, {params.d})")
    else:
        reps = init_reps(params, params.seed)

    counters = EdCounters()
    build_ms = 0.0
    tree = None
    if strategy.kind == "rmm_vcp":
        if strategy.index is not None:
            tree = strategy.index
            if not np.array_equal(tree.object_ids, np.sort(packed.ids)):
                raise ValueError("index was built over a different object set")
        else:
            t0 = time.perf_counter()
            tree = bulk_load(packed, params.b)
            build_ms = (time.perf_counter() - t0) * 1e3

    history = [] if record_history else None
    labels_prev = None
    objective = float("nan")
    iters = 0
    t_loop = time.perf_counter()
    while iters < params.max_iters:
        iters += 1
        if tree is not None:
            labels, sums, counts = _tree_assign(tree, reps, counters, threads)
            new_reps = _means_from_sums(sums, counts, reps)
        else:
            labels = _assign_flat(packed, reps, strategy.kind, counters, threads)
            new_reps = _means_from_labels(labels, packed.centroids, params.k, reps)
        counters.iterations += 1
        if record_history:
            history.append(labels.copy())
        moved = float(np.sqrt(((new_reps - reps) ** 2).sum(axis=1)).max())
        stable = (labels_prev is not None and np.array_equal(labels, labels_prev)
                  and moved < params.move_tol)
        reps = new_reps
        labels_prev = labels
        if stable:
            break
    wall_ms = (time.perf_counter() - t_loop) * 1e3

    objective = _objective(packed, labels_prev, reps)
    assignment = {int(oid): int(lbl) for oid, lbl in zip(packed.ids, labels_prev)}
    state = ClusterState(reps=reps, assignment=assignment, iteration=iters)
    return RunResult(final_state=state, iterations=iters, counters=counters,
                     objective=objective, wall_time_per_iter=wall_ms / iters,
                     build_ms=build_ms, history=history)


def _tree_assign(tree, reps, counters, threads):
    if threads <= 1 or len(tree.root.entries) < 2 or tree.root.is_leaf:
        return assign_with_aggregates(tree, reps, counters)
    # One task per root entry: each subtree is walked with a private
    # counter and its own partial sums, merged in entry order.  Label
    # writes are disjoint by construction.
    packed = tree.packed
    k = reps.shape[0]
    labels = np.empty(packed.n, dtype=np.int64)
    full = np.arange(k, dtype=np.int64)

    def one_entry(entry, ctr):
        sums = np.zeros((k, packed.m))
        counts = np.zeros(k, dtype=np.int64)
        visit_entry(tree, entry, reps, full, ctr, labels, sums, counts)
        return sums, counts

    locals_ = [EdCounters() for _ in tree.root.entries]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(one_entry, e, ctr)
                   for e, ctr in zip(tree.root.entries, locals_)]
        partials = [f.result() for f in futures]
    sums = np.zeros((k, packed.m))
    counts = np.zeros(k, dtype=np.int64)
    for (ps, pc), ctr in zip(partials, locals_):
        sums += ps
        counts += pc
        counters.merge(ctr)
    return labels, sums, counts

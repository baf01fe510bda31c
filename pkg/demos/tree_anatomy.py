"""Bulk-load a packed tree, inspect its shape, then assign whole subtrees at once."""

import numpy as np

from ukmeans import (Params, GenSpec, EdCounters, generate, bulk_load,
                     fanout_for_block, entry_bytes, check_structure,
                     dump_lines, cluster_assign_with_tree,
                     assign_with_aggregates)


def main():
    params = Params(n=24, k=2, l=2.0, s=16, d=2, seed=3)
    objs = generate(GenSpec(params))

    # 192-byte blocks at m=2 hold three 64-byte entries per node.
    b = 192
    print(f"entry_bytes(m=2) = {entry_bytes(2)}, fanout at b={b}: {fanout_for_block(b, 2)}")

    tree = bulk_load(objs, b)
    print(f"\ntree: n={tree.n_objects} height={tree.height} nodes={tree.node_count}")
    print(f"structure problems: {check_structure(tree) or 'none'}\n")
    for line in dump_lines(tree):
        depth = int(line.split(",")[0])
        print("  " * depth + line)

    # Two distant reps: every node's rectangle falls wholly into one
    # Voronoi cell, so subtrees are assigned off their aggregates and
    # not a single expected distance is evaluated.
    reps = np.array([[25.0, 25.0], [400.0, 400.0]])
    counters = EdCounters()
    labels = cluster_assign_with_tree(tree, reps, counters)
    print(f"\nfar reps {reps.tolist()}")
    print(f"  labels: {labels.tolist()}")
    print(f"  ed_evals={counters.ed_evals} cand_pairs={counters.cand_pairs}")

    # The same pass also returns per-cluster aggregate sums for the
    # readjustment step; they match the raw centroids exactly.
    counters = EdCounters()
    labels, sums, counts = assign_with_aggregates(tree, reps, counters)
    raw = np.stack([o.centroid for o in objs])
    for j in range(2):
        direct = raw[labels == j].sum(axis=0) if counts[j] else np.zeros(2)
        print(f"  cluster {j}: count={counts[j]} "
              f"aggregate sum={np.round(sums[j], 6)} raw sum={np.round(direct, 6)}")


if __name__ == "__main__":
    main()

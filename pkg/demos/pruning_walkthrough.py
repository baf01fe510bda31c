"""The two pruning rules on one small scene, with the work they charge."""

import numpy as np

from ukmeans import (Mbr, EdCounters, CandidateSet, mmbb_prune, vcp_prune,
                     hybrid_prune)


def show(tag, cand, counters):
    print(f"  {tag:<22} alive={cand.alive.tolist()}  "
          f"cand_pairs={counters.cand_pairs}  ed_evals={counters.ed_evals}")


def main():
    # Four reps: one inside the rectangle, one just past its edge so the
    # bisector cuts through it, and two far out.
    reps = np.array([[1.0, 1.0],
                     [2.5, 1.0],
                     [40.0, 0.0],
                     [0.0, 40.0]])
    box = Mbr([0.0, 0.0], [2.0, 2.0])
    full = np.arange(4)

    print(f"rectangle {box.lo}..{box.hi}, reps:\n{reps}\n")

    # The far pair dies to the bounds; reps 0 and 1 both survive because
    # neither's worst case beats the other's best case.
    counters = EdCounters()
    cand = mmbb_prune(box, reps, CandidateSet(box, full), counters)
    show("mmbb alone", cand, counters)

    # The cell test is all or nothing: the box crosses the 0|1 bisector,
    # so no single cell contains it and nothing is removed.
    counters = EdCounters()
    cand = vcp_prune(box, reps, CandidateSet(box, full), counters)
    show("vcp, straddled box", cand, counters)

    # Shrink the rectangle until it sits wholly inside rep 0's cell;
    # the cell test then collapses to one candidate with no ED at all.
    small = Mbr([0.6, 0.6], [1.4, 1.4])
    counters = EdCounters()
    cand = vcp_prune(small, reps, CandidateSet(small, full), counters)
    show("vcp, contained box", cand, counters)

    # hybrid runs the cell test first and only falls back to the bounds
    # when it misses, so the contained box is settled in one pass.
    counters = EdCounters()
    cand = hybrid_prune(small, reps, CandidateSet(small, full), counters)
    show("hybrid, contained box", cand, counters)

    counters = EdCounters()
    cand = hybrid_prune(box, reps, CandidateSet(box, full), counters)
    show("hybrid, straddled box", cand, counters)

    print("\npair counts: each pass charges one pair per alive candidate;")
    print("the hybrid hit cost 4, the miss cost 4 + 4 and still left two")
    print("survivors for the expected-distance argmin to settle.")


if __name__ == "__main__":
    main()

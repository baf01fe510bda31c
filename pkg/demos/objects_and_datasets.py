"""Build uncertain objects by hand, generate a dataset, and round-trip a file."""

import os
import tempfile

import numpy as np

from ukmeans import (Mbr, DiscretePdf, UncertainObject, Params, GenSpec,
                     cell_centers, cell_pitch, object_centroid, generate,
                     validate_dataset, save_dataset, load_dataset, dataset_equal)


def handmade_object():
    # A 2x2 rectangle carrying a 2x2 grid with most mass in one corner.
    mbr = Mbr([0.0, 0.0], [2.0, 2.0])
    pdf = DiscretePdf(grid_dims=(2, 2), masses=np.array([0.7, 0.1, 0.1, 0.1]),
                      owner_mbr=mbr)
    obj = UncertainObject(id=0, mbr=mbr, pdf=pdf, centroid=object_centroid(pdf))
    print("handmade object")
    print(f"  mbr        lo={mbr.lo} hi={mbr.hi} sides={mbr.sides}")
    print(f"  cell pitch {cell_pitch(pdf)}")
    print(f"  centers    {cell_centers(pdf).tolist()}")
    print(f"  masses     {pdf.masses.tolist()}")
    print(f"  centroid   {obj.centroid}  (pulled toward the heavy cell)")
    return obj


def generated_dataset():
    params = Params(n=6, k=2, l=3.0, s=8, d=2, seed=42)
    objs = generate(GenSpec(params))
    print(f"\ngenerated {len(objs)} objects, l={params.l}, s={params.s}, seed={params.seed}")
    for o in objs[:3]:
        print(f"  id={o.id} sides={np.round(o.mbr.sides, 3)} "
              f"centroid={np.round(o.centroid, 3)}")
    print(f"  validation: {validate_dataset(objs) or 'clean'}")
    return objs


def broken_dataset(objs):
    # Scale one pdf's masses so they stop summing to 1; the validator
    # names the object instead of raising.
    bad = objs[2]
    pdf = DiscretePdf(bad.pdf.grid_dims, bad.pdf.masses * 1.5, bad.pdf.owner_mbr)
    broken = list(objs)
    broken[2] = UncertainObject(bad.id, bad.mbr, pdf, bad.centroid)
    print("\nbroken copy diagnostics:")
    for problem in validate_dataset(broken):
        print(f"  {problem}")


def file_round_trip(objs):
    path = os.path.join(tempfile.mkdtemp(), "demo_dataset.txt")
    save_dataset(objs, path)
    back = load_dataset(path)
    with open(path) as fh:
        head = [next(fh).rstrip() for _ in range(2)]
    print(f"\nwrote {path}")
    print(f"  header: {head[0]!r}")
    print(f"  first record starts: {head[1][:60]}...")
    print(f"  reload equal: {dataset_equal(objs, back)}")


def main():
    handmade_object()
    objs = generated_dataset()
    broken_dataset(objs)
    file_round_trip(objs)


if __name__ == "__main__":
    main()

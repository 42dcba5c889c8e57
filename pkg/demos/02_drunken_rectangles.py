"""Alternating tall and wide rectangles.

Odd terms are |x|<1, |y|<3, even terms |x|<3, |y|<1 (clipped to the
window).  The kernel at 0 is the unit square, but the two constant
subsequences have the rectangles themselves as kernels, so the sequence
does not converge to its kernel.
"""
# %%
import os
from pathlib import Path

from kernelconv import (PointedMask, Rect, convergence_check, kernel, load_config,
                        normal_limit_verify, pre_kernel, rasterize_shape, select_subsequence,
                        write_pgm)
from kernelconv.kernel import all_residue_subsets, kernel_of_residue_subset

out = Path(os.environ.get("DEMO_OUT", "demo-out")) / "drunken"
out.mkdir(parents=True, exist_ok=True)
seq = load_config("drunken.json").sequence

# %% kernel and pre-kernel
k = kernel(seq)
square = rasterize_shape(Rect((0, 0), (1, 1)), seq.grid)
print("kernel cells", k.mask.count, "| unit-square raster cells", square.count)
print("pre-kernel cells", pre_kernel(seq).count)

# %% every residue subset and its kernel size (1 = odd terms, 2 = even terms)
for S in all_residue_subsets(seq.tail.period):
    print(f"  residues {sorted(S)} -> {kernel_of_residue_subset(seq, S).mask.count} cells")

# %% convergence diagnosis
verdict = convergence_check(seq)
print("converges:", verdict.converges, "witness:", verdict.as_dict()["witness"])
for r, pm in verdict.residue_kernels.items():
    write_pgm(pm.mask, out / f"residue_{r}.pgm")

# %% a convergent subsequence with maximal kernel
r, pm = select_subsequence(seq)
print("selected residue", r, "with", pm.mask.count, "cells")

# %% the normal limit is the square, not one of the rectangles
q = seq.limit_cell
for name, shape in (("unit square", Rect((0, 0), (1, 1))), ("tall rectangle", Rect((0, 0), (1, 3)))):
    rep = normal_limit_verify(seq, PointedMask(rasterize_shape(shape, seq.grid), q), trials=50)
    print(f"{name:15s} normal limit: {rep.holds}  (cond. 1 failures {rep.condition1_failures},"
          f" cond. 2 failures {rep.condition2_failures}, {rep.tested} sets tested)")

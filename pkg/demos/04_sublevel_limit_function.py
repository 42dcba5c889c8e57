"""Kernels of sublevel sets through the limit function Psi.

psi_j = r^2 + s^2 + (1/j) log(s^2) - 1 is the radial profile of a family of
domains in two complex variables (r = |z|, s = |w|).  Each {psi_j < 0}
misses the axis s = 0, where psi_j = -inf would otherwise be; the regularized
limit Psi = inf_k usc(sup_{j>=k} psi_j) is r^2 + s^2 - 1, whose sublevel set
is the quarter disc in profile coordinates, i.e. the unit ball.
"""
# %%
import os
from pathlib import Path

import numpy as np

from kernelconv import (HalfspaceGraph, Sublevel, cross_check_sublevel, kernel_from_psi,
                        load_config, mismatch_band, rasterize_shape, sample_field, write_pgm)
from kernelconv.sublevel import capital_psi_report

out = Path(os.environ.get("DEMO_OUT", "demo-out")) / "sublevel"
out.mkdir(parents=True, exist_ok=True)
cfg = load_config("sj_profile.json")
grid, fseq = cfg.grid, cfg.field_seq

# %% the s = 0 row is -inf for every j
row = grid.cell_of((0.5, 0.0))[1]
f5 = sample_field(fseq, 5, grid)
print("psi_5 on the s=0 row, first cells:", f5.values[:4, row])

# %% Psi absorbs that row
res = capital_psi_report(fseq, grid)
x, _ = grid.centers()
print("Psi on the s=0 row, first cells:  ", np.round(res.psi.values[:4, row], 4))
print("   vs r^2 - 1:                     ", np.round(x[:4, 0] ** 2 - 1, 4))
print("inf over k stopped at k =", res.stabilization.k_or_J_reached, "-", res.stabilization.note or "stable")
write_pgm(res.psi, out / "psi.pgm")

# %% kernel from Psi vs the quarter disc, and vs the direct kernel of the sublevel domains
k = kernel_from_psi(fseq, cfg.field_limit, grid, psi=res.psi)
quarter = rasterize_shape(Sublevel("max(max(r^2+s^2-1, -r-1e-12), -s-1e-12)"), grid)
print("band vs quarter disc:", mismatch_band(k.mask, quarter))
report = cross_check_sublevel(fseq, cfg.field_limit, grid, point_track=cfg.field_track)
print("cross-check:", report.as_dict())
write_pgm(k.mask, out / "psi_kernel.pgm")

# %% graph domains x > sin(y)/j converge to the right half-plane
g = load_config("graph.json")
kg = kernel_from_psi(g.field_seq, g.field_limit, g.grid)
print("graph domains: band vs {x > 0} =", mismatch_band(kg.mask, rasterize_shape(HalfspaceGraph("0"), g.grid)))

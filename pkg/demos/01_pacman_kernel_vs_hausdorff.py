"""Slit discs: Hausdorff limit versus kernel.

The unit disc with the segment [-1, 1 - 1/j] of the real axis removed
converges to the closed unit disc in the Hausdorff sense once closures are
taken, yet, pointed at i/2, its kernel is only the upper half-disc.
"""
# %%
import os
from pathlib import Path

from kernelconv import (Disc, Sublevel, closure, domain_at, hausdorff_distance, kernel,
                        load_config, masks_equal_within_band, mismatch_band, rasterize_shape,
                        tameness_check, write_pgm)

out = Path(os.environ.get("DEMO_OUT", "demo-out")) / "pacman"
out.mkdir(parents=True, exist_ok=True)

cfg = load_config("pacman.json")
seq = cfg.sequence
print("grid:", seq.grid.shape, "h =", seq.grid.h)

# %% the sequence is tamed at i/2: a ball of radius ~1/2 sits in every late tail
t = tameness_check(seq)
print(f"tamed={t.tamed} k={t.k} ball radius={t.ball_radius:.4f}")

# %% closures approach the closed disc
disc_closure = closure(rasterize_shape(Disc((0, 0), 1.0), seq.grid))
for j in (4, 8, 16, 32):
    d = hausdorff_distance(closure(domain_at(seq, j)), disc_closure)
    print(f"j={j:3d}  d_H(closure G_j, closed disc) = {d:.4f}  (bound 1/j + 2h = {1 / j + 2 * seq.grid.h:.4f})")
    write_pgm(domain_at(seq, j), out / f"G_{j:02d}.pgm")

# %% ... while the kernel is the upper half-disc
k = kernel(seq)
half = rasterize_shape(Sublevel("max(x^2+y^2-1, -y)"), seq.grid)
print("kernel cells:", k.mask.count, " half-disc cells:", half.count)
print("mismatch band vs half-disc:", mismatch_band(k.mask, half),
      " within 2 cells:", masks_equal_within_band(k.mask, half, 2)[0])
print("stabilization:", k.stabilization.as_dict())
write_pgm(k.mask, out / "kernel.pgm")
print("wrote", sorted(p.name for p in out.iterdir()))

"""Monotone sequences: direct formulas versus the general kernel.

For discs growing to the unit disc the kernel is the union; for discs
shrinking to it, the component of the interior of the intersection.
"""
# %%
from kernelconv import (Disc, kernel, kernel_monotone, liminf_set, load_config,
                        masks_equal_within_band, mismatch_band, rasterize_shape)
from kernelconv.errors import MonotoneError

for name, direction in (("increasing_discs.json", "increasing"), ("decreasing_discs.json", "decreasing")):
    seq = load_config(name).sequence
    fast = kernel_monotone(seq, direction)
    slow = kernel(seq)
    disc = rasterize_shape(Disc((0, 0), 1.0), seq.grid)
    print(f"{direction:10s} shortcut == kernel: {fast.mask == slow.mask}"
          f"   band vs unit disc: {mismatch_band(slow.mask, disc)}"
          f"   general kernel stopped at k={slow.k_stabilized}")

# %% the lower limit of the increasing family is the union too
seq = load_config("increasing_discs.json").sequence
print("liminf ~ unit disc (band 2):",
      masks_equal_within_band(liminf_set(seq), rasterize_shape(Disc((0, 0), 1.0), seq.grid), 2)[0])

# %% the shortcut refuses sequences that are not monotone
try:
    kernel_monotone(load_config("drunken.json").sequence, "increasing")
except MonotoneError as err:
    print("drunken rectangles:", err)

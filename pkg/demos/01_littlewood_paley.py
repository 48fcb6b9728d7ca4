"""Dyadic blocks of a modulated bump.

A bump psi with compactly supported transform, modulated at (33/24) 2^n,
lives in exactly one Littlewood-Paley block.  We print the block norms of
a few such waves and of their sum.
"""

from fwlab import BesovParams, besov_norm, block_norms, localized_wave, make_grid

grid = make_grid(2**14, 48)

waves = {n: localized_wave(grid, n).field for n in (2, 4, 6)}
for n, g in waves.items():
    js, norms = block_norms(g, 2)
    live = js[norms > 1e-12 * norms.max()]
    print(f"g_{n}: nonzero blocks {live.tolist()}")

total = waves[2] + waves[4] + waves[6]
js, norms = block_norms(total, 2)
print("\nblock norms of g_2 + g_4 + g_6")
for j, v in zip(js, norms):
    print(f"  j={j:>2}  {v:.3e}")

for s in (0.0, 1.0, 2.0):
    print(f"B^{s:g}_(2,2) norm: {besov_norm(total, BesovParams(s, 2, 2)):.5f}")


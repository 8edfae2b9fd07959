"""Build one cell around the unit disc and look at it.

The hyperplanes of an isotropic Poisson process that miss the disc cut out
a polygon containing it. With intensity 400 that polygon hugs the disc
closely, so its mean width is barely above 2.
"""

from kcell import Ball, Isotropic, ProcessConfig, build_cell, hitting_diff, mean_width, rng_stream, volume

K, D = Ball(1.0, 2), Isotropic(2)
cell = build_cell(ProcessConfig(400, K, D, sampler="shell"), rng_stream(7, 0, 0))

print(f"facets          {cell.n_facets}")
print(f"vertices        {len(cell.vertices)}")
print(f"area            {volume(cell):.5f}   (disc: 3.14159)")
print(f"mean width      {mean_width(cell):.5f}   (disc: 2)")
print(f"hitting excess  {hitting_diff(cell, K, D):.5f}")

# every vertex sits outside the disc, and the farthest one bounds the cell
r = (cell.vertices ** 2).sum(axis=1) ** 0.5
print(f"vertex radii    {r.min():.4f} .. {r.max():.4f}")

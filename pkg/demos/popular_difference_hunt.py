"""Hunt for a popular difference in a random planar set.

Draws a density-0.3 set in Z101 x Z101, tabulates corner counts for every
difference, and compares the best nonzero difference against the alpha^3
heuristic. Rerunning always prints the same numbers.
"""

import numpy as np

from cornerlab import PlaneSet, corner_count_by_difference, parse_group_spec, popular_difference

G = parse_group_spec("Z101")
A = PlaneSet.random(G, 0.3, seed=11)
alpha = A.density

profile = corner_count_by_difference(A)
d_star, best = popular_difference(A, profile)

counts = np.asarray(profile.counts)
nonzero = counts[1:]

print(f"group            {G}")
print(f"density          {alpha:.6f}")
print(f"total corners    {profile.total}")
print(f"best difference  d = {d_star.index}")
print(f"count at best    {best}")
print(f"alpha^3 |G|^2    {alpha**3 * G.order**2:.1f}")
print(f"mean over d!=0   {nonzero.mean():.1f}")
print(f"ratio best/mean  {best / nonzero.mean():.3f}")

assert best >= 0.8 * alpha**3 * G.order**2
print("the best difference clears 0.8 * alpha^3 * |G|^2")

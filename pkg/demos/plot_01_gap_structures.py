"""
Fiber relations of a partial map
================================

A partial map ``sigma`` on a finite set gives a decreasing chain of domains
``U_n`` and, on each, the relation "same image under ``sigma^n``".  This
script builds that structure, checks its axioms and shows what a broken one
looks like.
"""

import numpy as np

from gapqi import SpaceModel, decompose_class, gap_from_partitions, gap_from_sigma, validate_gap

# %%
# Four points: 1 and 2 both map to 0, and 3 maps to 1.  Point 0 is outside
# the domain, so ``U_1 = {1, 2, 3}`` and ``U_2 = {3}``.
model = SpaceModel.from_mapping([0, 1, 2, 3], {1: 0, 2: 0, 3: 1})
g = gap_from_sigma(model, depth=3)
for n in range(g.depth + 1):
    print(f"level {n}:", [[g.points[i] for i in c] for c in g.classes(n)])

# %%
# The relation at each level is a boolean matrix, so the axioms can be
# checked by scanning every pair.
rep = validate_gap(g)
print("valid:", rep.ok)

# %%
# A class at a coarse level splits into classes of a finer one.
for rep_pt, block in decompose_class(g, 0, 1, 1):
    print("block of", g.points[rep_pt], "->", [g.points[i] for i in block])

# %%
# Hand-built partitions need not come from a map.  Here 0 and 1 are related
# at level 1 but only 1 survives to level 2, which the validator reports
# together with the offending pair.
bad = gap_from_partitions(range(4), [[[0, 1], [2]], [[1]]])
rep = validate_gap(bad)
print("valid:", rep.ok)
for name, witness in rep.witnesses.items():
    print(f"  {name}: {witness}")

# %%
# Random models behave the same way at any size.
rng = np.random.default_rng(0)
sigma = np.where(rng.random(150) < 0.6, rng.integers(0, 150, 150), -1)
big = gap_from_sigma(SpaceModel.from_array(sigma), depth=6)
print("random model valid:", validate_gap(big).ok,
      "| class counts:", [len(big.classes(n)) for n in range(big.depth + 1)])

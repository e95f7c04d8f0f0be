"""beta_c over all 3^9 labelings of K_{3,3} with d=3, and the class sizes."""
from xordgames.game import complete_bipartite_pairs
from xordgames.classical import classical_value
from xordgames.survey import ALL_LD, census, enum_labelings

pairs = complete_bipartite_pairs(3, 3)
cen = census(6, pairs, 3)
total = sum(cen.values())
for b in sorted(cen):
    print(f"beta_c={b}: {cen[b]:6d}  ({100 * cen[b] / total:.2f}%)")

classes = enum_labelings(6, pairs, 3, ALL_LD, bipartition=({0, 1, 2}, {3, 4, 5}), class_sizes=True)
print(f"\n{len(classes)} equivalence classes")
for c in classes:
    print(f"  size {c.size:5d}  beta_c={classical_value(c.game).beta_c}  {c.canonical.hex()}")

"""Walk through the lifted action of Gamma = <a, b, c | a^2 = b^3 = c^7 = abc> on the line.

Run: python demos/group_action.py
"""
from fractions import Fraction

from gamma237 import group as G
from gamma237.group import CoverPoint, element

A, B, C = G.generator_elements()
T = G.central_element()

print("matrix entries live in", G.TOWER)
print("relations that fail:", G.check_relations([A, B, C]) or "none")

# abc acts as the unit translation, on rational and algebraic points alike
p = CoverPoint.from_slope(Fraction(2, 5))
print(f"p = {p.to_float():.6f}, abc(p) = {T(p).to_float():.6f}")

for w in ("a", "b", "c", "abc", "aBC"):
    g = element(w)
    print(f"{w:>4}: {G.classify(g):<14} translation number {G.translation_number(g)}")

# a hyperbolic element has two fixed circle points; its stabilizer is cyclic
g = element("aBC")
att, rep = G.fixed_points(g)
print(f"aBC fixes {att.to_float():.6f} (attracting) and {rep.to_float():.6f} (repelling)")
q, k = G.stabilizer_of_fixed_point(g)
print("primitive stabilizer generator at the attracting point:", G.display_word(k.word))

print("ball sizes:", [len(G.ball(n)) for n in range(6)])

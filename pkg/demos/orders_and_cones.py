"""Left-orders from basepoints: cone tables, conjugation and the sign of abc.

Run: python demos/orders_and_cones.py
"""
from gamma237 import group as G
from gamma237.orders import (
    abc_sign,
    cone_table,
    cone_violations_on_ball,
    conjugate_order,
    fixed_point_oracle,
    order_sign,
    random_free_oracles,
)

o, o2 = random_free_oracles(2, seed=1)
print("sampled basepoints:", o.describe(), o2.describe())

F = G.ball(2).without_identity()
table = cone_table(o, F)
print(f"positive cone on ball(2): {len(table.positive())} of {len(table)} elements")
print("cone-axiom violations on ball(4):", len(cone_violations_on_ball(o, 4)))

# conjugating moves the basepoint; the sign of abc never changes
g = G.element("bCa")
og = conjugate_order(o, g)
h = G.element("cb")
print("sign of cb under o conjugated by bCa:", order_sign(og, h),
      "= sign of its conjugate under o:", order_sign(o, G.compose(G.compose(G.invert(g), h), g)))
print("abc sign of o, its conjugate, its reverse:", abc_sign(o), abc_sign(og), abc_sign(o.flipped()))

# a basepoint fixed by k: the side of the tiebreak decides the sign of k
for side in ("left", "right"):
    fo = fixed_point_oracle("aBC", side)
    print(f"fixed-point order, {side} side: sign of aBC = {order_sign(fo, G.element('aBC')):+d}")

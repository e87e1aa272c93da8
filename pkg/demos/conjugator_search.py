"""Approximating one order by conjugates of another, and why abc splits them in two.

Run: python demos/conjugator_search.py
"""
from gamma237 import group as G
from gamma237.orders import fixed_point_oracle, random_free_oracles
from gamma237.search import (
    component_scan,
    find_conjugator_bfs,
    find_conjugator_guided,
    obstruction_check,
)

F = G.ball(3).without_identity()
orders = random_free_oracles(4, seed=12)

for target, source in [(orders[0], orders[1]), (fixed_point_oracle("acb", "left"), orders[2])]:
    rep = find_conjugator_guided(target, source, F)
    bfs = find_conjugator_bfs(target, source, F)
    print(f"guided: {G.display_word(rep.g.word)} (length {rep.word_length}, side {rep.details['side']}); "
          f"breadth-first: {G.display_word(bfs.g.word)} (length {bfs.word_length})")

# opposite signs of abc: no conjugate can ever agree on abc
res = obstruction_check(orders[0], orders[3].flipped(), F, max_length=6)
print(f"opposite-sign pair: {res['candidates']} candidates, {res['false_merges']} merges")

scan = component_scan(orders[:3] + [o.flipped() for o in orders[:2]], F)
for row in scan.matrix():
    print(" ".join(f"{s:<10}" for s in row))
print("two blocks:", scan.is_two_block(), "| word lengths:", scan.histogram())

"""Blowing up orbits into gaps, and rebuilding an action from a sign oracle.

Run: python demos/blowup_and_realization.py
"""
from fractions import Fraction

from gamma237 import group as G
from gamma237.group import CoverPoint
from gamma237.orders import cone_table, random_free_oracles
from gamma237.realization import (
    blowup_defect,
    blowup_from_descriptors,
    build_realization,
    gap_stabilizer,
)

bmap = blowup_from_descriptors([{"fixed_point": "aBC"}, {"slope": "2/5"}])
print("total inserted length:", bmap.total_length())

samples = [bmap.orbit_point(1, w, Fraction(1, 3)) for w in ("", "a", "cB")]
samples.append(bmap.lift(CoverPoint.from_slope(Fraction(7, 11))))
print("semi-conjugacy defect on ball(3):", blowup_defect(bmap, samples, G.ball(3)))

st = gap_stabilizer(bmap, 0)
print("stabilizer of the gap at the fixed point of aBC:", st.kind, G.display_word(st.generator.word))

o = random_free_oracles(1, seed=4)[0]
r = build_realization(o, 4)
F = G.ball(3).without_identity()
print("stage-4 realization reproduces the cone table on ball(3):", r.cone_table(F) == cone_table(o, F))
print("first placements:", r.to_csv().splitlines()[1:5])

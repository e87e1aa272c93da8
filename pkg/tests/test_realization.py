import json
import random
from fractions import Fraction

import pytest

from gamma237 import group as G
from gamma237.group import CoverPoint
from gamma237.orders import (
    STANDARD,
    InconsistentOracle,
    cone_table,
    fixed_point_oracle,
    oracle_from_descriptor,
    random_free_oracles,
)
from gamma237.realization import (
    PLMap,
    blow_up,
    blowup_defect,
    blowup_from_descriptors,
    blowup_oracle,
    build_realization,
    check_semiconjugacy,
    collapse_oracle,
    gap_stabilizer,
    orbit_order_mismatches,
)


@pytest.fixture(scope="module")
def free_order():
    return random_free_oracles(1, seed=3)[0]


@pytest.fixture(scope="module")
def bmap():
    return blowup_from_descriptors([{"fixed_point": "aBC"}, {"slope": "2/5"}])


def test_pl_map_interpolates_and_inverts():
    m = PLMap([Fraction(0), Fraction(2)], [Fraction(1), Fraction(5)])
    assert m(Fraction(1)) == 3 and m(Fraction(-1)) == 0 and m(Fraction(3)) == 6
    assert m.inverse()(m(Fraction(7, 5))) == Fraction(7, 5)
    with pytest.raises(InconsistentOracle):
        PLMap([Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)])


def test_stage_zero(free_order):
    r = build_realization(free_order, 0)
    assert r.placement == {"": 0}


def test_placement_order_matches_orbit_order(free_order):
    r = build_realization(free_order, 3)
    p = free_order.basepoint
    elems = list(G.ball(3))
    for g in elems:
        for h in elems:
            c = g(p).compare(h(p))
            d = (r.placement[g.word] > r.placement[h.word]) - (r.placement[g.word] < r.placement[h.word])
            assert c == d


def test_partial_equivariance_and_defining_property(free_order):
    r = build_realization(free_order, 3)
    assert r.placement[""] == 0
    assert r.equivariance_defects() == []
    F = G.ball(2).without_identity()
    assert r.cone_table(F) == cone_table(free_order, F)


def test_round_trip_for_fixed_point_order():
    o = fixed_point_oracle("bac", "right")
    r = build_realization(o, 3)
    F = G.ball(2).without_identity()
    assert r.cone_table(F) == cone_table(o, F)


def test_corrupted_table_raises(free_order):
    table = cone_table(free_order, G.ball(4).without_identity())
    table.signs["ab"] *= -1
    with pytest.raises(InconsistentOracle):
        build_realization(table, 2)


def test_realization_csv(free_order):
    r = build_realization(free_order, 2)
    rows = r.to_csv().splitlines()
    assert rows[0] == "word,placement" and len(rows) == len(G.ball(2)) + 1


def test_empty_blowup_is_identity():
    b = blow_up([])
    p = CoverPoint.from_slope(Fraction(1, 3))
    x = b.lift(p)
    for g in G.ball(2):
        assert b.collapse(b.act(g, x)).compare(g(p)) == 0
    assert b.total_length() == 0


def test_blowup_lengths(bmap):
    assert bmap.total_length() == Fraction(3, 4)
    gaps = bmap.export(6)["gaps"]
    assert all(Fraction(g["gap_length"]) > 0 for g in gaps)
    assert sum(Fraction(g["gap_length"]) for g in gaps) < bmap.total_length()
    json.dumps(bmap.export(3))


def test_semiconjugacy_defect_zero(bmap):
    rng = random.Random(8)
    words = G.ball(3).words()
    samples = [bmap.orbit_point(rng.randrange(2), rng.choice(words), Fraction(rng.randint(0, 4), 4))
               for _ in range(10)]
    samples += [bmap.lift(CoverPoint.from_slope(Fraction(rng.randint(-30, 30), rng.randint(1, 9))))
                for _ in range(10)]
    assert blowup_defect(bmap, samples, G.ball(2)) == 0


def test_semiconjugacy_designed_failures():
    p = [CoverPoint.from_slope(Fraction(1, 2))]
    same = check_semiconjugacy(lambda x: x, STANDARD.act, STANDARD.act, p, G.ball(2))
    assert same == 0
    shifted = check_semiconjugacy(lambda x: x, STANDARD.act, lambda g, x: g(x).translate(1), p, G.ball(1))
    assert shifted > 0.99


def test_blown_orbit_order(bmap):
    q = bmap.orbit_point(0, "", Fraction(1, 3))
    assert orbit_order_mismatches(bmap, q, list(G.ball(3))) == []
    q2 = bmap.lift(CoverPoint.from_slope(Fraction(7, 11)))
    assert orbit_order_mismatches(bmap, q2, list(G.ball(3))) == []


def test_gap_stabilizer_is_cyclic(bmap):
    st = gap_stabilizer(bmap, 0)
    assert st.is_cyclic
    left, right = bmap.gap(0)
    k = st.generator
    assert bmap.act(k, left).compare(left) == 0 and bmap.act(k, right).compare(right) == 0


def test_same_gap_same_table(bmap):
    F = G.ball(3).without_identity()
    o1 = blowup_oracle(bmap, 1, "cb", Fraction(1, 4))
    o2 = blowup_oracle(bmap, 1, "cb", Fraction(3, 4))
    assert cone_table(o1, F) == cone_table(o2, F)


def test_blowup_oracle_descriptor_and_collapse(bmap):
    F = G.ball(3).without_identity()
    o = blowup_oracle(bmap, 0, "b", Fraction(1, 2), tiebreak=[(1, "", Fraction(0))])
    rebuilt = oracle_from_descriptor(o.describe())
    assert cone_table(rebuilt, F) == cone_table(o, F)
    assert cone_table(collapse_oracle(o), F) == cone_table(o, F)


def test_distinct_points_required():
    p = CoverPoint.from_slope(Fraction(1, 2))
    with pytest.raises(ValueError):
        blow_up([p, p.translate(1)])
    with pytest.raises(ValueError):
        blow_up([p], [Fraction(-1)])

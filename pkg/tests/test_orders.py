import random
from fractions import Fraction

import pytest

from gamma237 import group as G
from gamma237.group import element
from gamma237.orders import (
    ConeTable,
    OrderOracle,
    ProductIndex,
    TiebreakExhausted,
    abc_sign,
    cone_table,
    cone_violations_on_ball,
    conjugate_order,
    fixed_point_oracle,
    free_oracle,
    in_neighborhood,
    oracle_from_descriptor,
    order_sign,
    random_free_oracles,
    standard_oracle,
)

ABC = element("abc")


@pytest.fixture(scope="module")
def free_orders():
    return random_free_oracles(4, seed=11)


def test_abc_positive_for_any_basepoint(free_orders):
    for o in free_orders:
        assert order_sign(o, ABC) == 1
        assert abc_sign(o) == 1
        assert abc_sign(o.flipped()) == -1


def test_inverse_antisymmetry(free_orders):
    o = free_orders[0]
    for g in G.ball(3).without_identity():
        assert order_sign(o, g) == -order_sign(o, G.invert(g))


def test_identity_has_no_sign(free_orders):
    with pytest.raises(ValueError):
        order_sign(free_orders[0], G.identity())


def test_fixed_point_tiebreak_orients_generator():
    for w in ("aBC", "bac"):
        p, k = G.stabilizer_of_fixed_point(element(w))
        assert order_sign(fixed_point_oracle(w, "left"), k) == 1
        assert order_sign(fixed_point_oracle(w, "right"), k) == -1


def test_tiebreak_exhausted_without_auxiliary_point():
    p, k = G.stabilizer_of_fixed_point(element("aBC"))
    with pytest.raises(TiebreakExhausted):
        order_sign(standard_oracle(p), k)


def test_cone_table_of_abc_and_serialisation(free_orders):
    o = free_orders[1]
    t = cone_table(o, [ABC])
    assert t.signs == {"abc": 1}
    F = G.ball(2).without_identity()
    table = cone_table(o, F)
    assert ConeTable.from_json(table.to_json()) == table
    lines = table.to_csv().splitlines()
    assert lines[0] == "word,length,sign" and len(lines) == len(F) + 1


def test_cone_axioms_on_ball4_for_20_basepoints():
    for o in random_free_oracles(20, seed=2024, depth=6):
        assert cone_violations_on_ball(o, 4) == []


def test_cone_axioms_for_fixed_point_orders():
    for side in ("left", "right"):
        assert cone_violations_on_ball(fixed_point_oracle("acb", side), 4) == []


def test_corrupted_table_is_detected(free_orders):
    F = G.ball(2).without_identity()
    table = cone_table(free_orders[0], F)
    w = next(iter(table.signs))
    table.signs[w] *= -1
    assert table.check_axioms(ProductIndex.for_ball(2))


def test_conjugate_by_identity_is_same_order(free_orders):
    o = free_orders[0]
    F = G.ball(4).without_identity()
    assert cone_table(conjugate_order(o, G.identity()), F) == cone_table(o, F)


def test_conjugation_compatibility(free_orders):
    rng = random.Random(7)
    b3 = G.ball(3).without_identity()
    for o in free_orders[:2] + [fixed_point_oracle("aBC", "right")]:
        for g in rng.sample(list(G.ball(4)), 4):
            og = conjugate_order(o, g)
            gi = G.invert(g)
            for h in b3:
                assert order_sign(og, h) == order_sign(o, G.compose(G.compose(gi, h), g))
            assert abc_sign(og) == abc_sign(o)


def test_neighbourhood_examples(free_orders):
    o, o2 = free_orders[0], free_orders[1]
    F = G.ball(2).without_identity()
    assert in_neighborhood(o, o, F)
    assert in_neighborhood(o2, o, [ABC])
    assert not in_neighborhood(o2.flipped(), o, [ABC])


def test_descriptor_round_trip():
    for o in (free_oracle(Fraction(5, 3), 1), fixed_point_oracle("bac", "right"),
              free_oracle(Fraction(-2, 9)).flipped(),
              conjugate_order(free_oracle(Fraction(1, 4)), element("cB"))):
        o2 = oracle_from_descriptor(o.describe())
        F = G.ball(3).without_identity()
        assert cone_table(o2, F) == cone_table(o, F)


def test_random_sample_is_seeded():
    a = [o.describe() for o in random_free_oracles(3, seed=5)]
    b = [o.describe() for o in random_free_oracles(3, seed=5)]
    assert a == b


def test_oracle_is_immutable(free_orders):
    with pytest.raises(Exception):
        free_orders[0].reversed = True
    assert isinstance(free_orders[0], OrderOracle)

from fractions import Fraction

import pytest

from gamma237 import group as G
from gamma237.group import CoverPoint, element
from gamma237.orders import (
    conjugate_order,
    fixed_point_oracle,
    free_oracle,
    in_neighborhood,
    random_free_oracles,
)
from gamma237.search import (
    BudgetExhausted,
    HypothesisViolated,
    SearchBudget,
    SideReport,
    Target,
    component_scan,
    find_conjugator,
    find_conjugator_bfs,
    find_conjugator_guided,
    find_point_mover,
    obstruction_check,
    shift_point,
    uniform_sign_interval,
)

ABC = element("abc")


@pytest.fixture(scope="module")
def orders():
    return random_free_oracles(4, seed=21)


@pytest.fixture(scope="module")
def F2():
    return G.ball(2).without_identity()


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(max_candidates=0)


def test_bfs_same_order_gives_identity(orders, F2):
    rep = find_conjugator_bfs(orders[0], orders[0], F2)
    assert rep.found and rep.word_length == 0 and rep.strategy == "bfs"


def test_bfs_planted(orders, F2):
    w = element("bCa")
    o = orders[0]
    o_prime = conjugate_order(o, G.invert(w))
    rep = find_conjugator_bfs(o, o_prime, F2)
    assert rep.found and rep.word_length <= 3
    assert in_neighborhood(conjugate_order(o_prime, rep.g), o, F2)


def test_bfs_hypothesis(orders):
    with pytest.raises(HypothesisViolated):
        find_conjugator_bfs(orders[0], orders[1].flipped(), [ABC])


def test_bfs_not_found_is_a_report(orders):
    rep = find_conjugator_bfs(orders[0], orders[1].flipped(), [ABC],
                              SearchBudget(max_word_length=2), enforce_hypothesis=False)
    assert not rep.found and rep.candidates == len(G.ball(2))


def test_shift_point_moves_in_the_right_direction():
    p = CoverPoint.from_slope(Fraction(-1, 3))
    for t in (Fraction(1), Fraction(1, 8)):
        assert p.compare(shift_point(p, t)) < 0 < p.compare(shift_point(p, -t))
    assert abs(shift_point(p, Fraction(1)).to_float() - p.to_float() - 0.5) < 1e-12


def test_uniform_interval_central_only():
    p = CoverPoint.from_slope(Fraction(2, 3))
    V = uniform_sign_interval(p, [ABC])
    assert V.lo is None and V.hi is None


def test_uniform_interval_certifies_signs_and_is_maximal():
    F3 = G.ball(3).without_identity()
    p = CoverPoint.from_slope(Fraction(4, 9))
    V = uniform_sign_interval(p, F3)
    assert not isinstance(V, SideReport)
    assert V.contains(p) and V.lo is not None and V.hi is not None
    eps = Fraction(1, 10 ** 9)
    inside = [shift_point(V.lo, eps), shift_point(V.hi, -eps), p]
    for f in F3:
        s = V.signs[G.display_word(f.word)]
        for y in inside:
            assert V.contains(y)
            assert (f(y).compare(y) > 0) == (s == "+")
    # each endpoint is a fixed point of some f, so V cannot be widened
    for end in (V.lo, V.hi):
        assert any(f(end).compare(end) == 0 for f in F3)


def test_uniform_interval_without_fixed_points_is_unbounded(F2):
    V = uniform_sign_interval(CoverPoint.from_slope(Fraction(4, 9)), F2)
    assert V.lo is None and V.hi is None and V.radius == "unbounded"


def test_side_report_at_attracting_fixed_point():
    g = element("aBC")
    p, k = G.stabilizer_of_fixed_point(g)
    rep = uniform_sign_interval(p, [k])
    assert isinstance(rep, SideReport)
    assert rep.fixed[G.display_word(k.word)] == ("+", "-")


def test_point_mover(orders):
    p = orders[0].basepoint
    g, n = find_point_mover(p, Target(shift_point(p, Fraction(-1, 4)), shift_point(p, Fraction(1, 4))))
    assert G.is_identity(g) and n == 1
    q = orders[1].basepoint
    lo, hi = shift_point(q, Fraction(-1, 400)), shift_point(q, Fraction(1, 400))
    g, _ = find_point_mover(p, Target(lo, hi))
    assert lo.compare(g(p)) < 0 < hi.compare(g(p))
    lo1, hi1 = lo.translate(1), hi.translate(1)
    g1, _ = find_point_mover(p, Target(lo1, hi1))
    assert lo1.compare(g1(p)) < 0 < hi1.compare(g1(p))
    with pytest.raises(BudgetExhausted):
        find_point_mover(p, Target(shift_point(q, Fraction(-1, 10 ** 6)), shift_point(q, Fraction(1, 10 ** 6))),
                         SearchBudget(max_word_length=3))


def test_guided_free_pair(orders, F2):
    rep = find_conjugator_guided(orders[0], orders[1], F2)
    assert rep.found and rep.strategy == "guided"
    assert in_neighborhood(conjugate_order(orders[1], rep.g), orders[0], F2)
    assert set(rep.certificates) == {G.display_word(f.word) for f in F2}


@pytest.mark.parametrize("side", ["left", "right"])
def test_guided_with_cyclic_stabilizer(orders, side):
    F = G.ball(3).without_identity()
    o = fixed_point_oracle("acb", side)
    rep = find_conjugator_guided(o, orders[2], F)
    assert rep.found and rep.details["side"] == side
    assert in_neighborhood(conjugate_order(orders[2], rep.g), o, F)


def test_guided_reversed_pair(orders, F2):
    o, op = orders[0].flipped(), orders[3].flipped()
    rep = find_conjugator_guided(o, op, F2)
    assert rep.found and in_neighborhood(conjugate_order(op, rep.g), o, F2)


def test_guided_hypothesis(orders, F2):
    with pytest.raises(HypothesisViolated):
        find_conjugator_guided(orders[0], orders[1].flipped(), F2)


def test_guided_and_bfs_agree_when_both_succeed(orders, F2):
    a = find_conjugator_guided(orders[1], orders[2], F2)
    b = find_conjugator_bfs(orders[1], orders[2], F2)
    assert a.found and b.found
    assert b.word_length <= a.word_length


def test_component_scan_two_block(orders, F2):
    sample = [orders[0], orders[1], orders[2].flipped()]
    res = component_scan(sample, F2, SearchBudget(max_word_length=10))
    assert res.is_two_block()
    m = res.matrix()
    assert m[0][2] == m[2][0] == "obstructed" and m[0][1] == "found"
    assert res.matrix_csv().startswith("target\\source")
    assert res.histogram_csv().startswith("word_length,count")
    assert res.to_json()["two_block"]


def test_component_scan_single():
    res = component_scan([free_oracle(Fraction(1, 5))], [ABC])
    assert res.entries[0, 0]["word_length"] == 0


def test_find_conjugator_wrapper(orders, F2):
    rep = find_conjugator(orders[2], orders[3], F2)
    assert rep.found


def test_obstruction(orders):
    res = obstruction_check(orders[0], orders[1].flipped(), [ABC], max_length=5)
    assert res["false_merges"] == 0 and res["sign_changes"] == 0

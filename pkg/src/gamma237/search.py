"""Conjugator search: given orders o, o' with abc positive and a finite set F,
find g with the conjugate of o' by g agreeing with o on F.

Two strategies:

* :func:`find_conjugator_bfs` tries every g in shortlex order.
* :func:`find_conjugator_guided` locates an interval V around the basepoint p
  of o on which every element of F moves points the same way it moves p,
  then looks for g sending the basepoint of o' into V.  When some element of
  F fixes p, the stabiliser of p is cyclic with a generator k contracting
  toward p, and g(p') is placed on the side of p where k moves points the
  way o orders k.

Every witness is re-checked with :func:`orders.in_neighborhood` on the
original oracles before it is reported.
"""
from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cmp_to_key
from typing import Callable, Iterable, Optional, Sequence

from . import group as G
from .group import CoverPoint, LiftedElement
from .numerics import PrecisionExhausted
from .orders import (
    STANDARD,
    OrderOracle,
    abc_sign,
    conjugate_order,
    in_neighborhood,
    order_sign,
)
from .realization import collapse_oracle


class HypothesisViolated(ValueError):
    """The two orders give the central element abc different signs."""


class BudgetExhausted(RuntimeError):
    """No candidate within the search budget satisfied the target."""


@dataclass(frozen=True)
class SearchBudget:
    max_word_length: int = 12
    max_candidates: int = 10 ** 6
    max_bits: Optional[int] = None

    def __post_init__(self):
        if self.max_word_length < 0 or self.max_candidates <= 0:
            raise ValueError("budget fields must be positive")
        if self.max_bits is not None and self.max_bits <= 0:
            raise ValueError("budget fields must be positive")


@dataclass
class ConjugatorReport:
    found: bool
    g: Optional[LiftedElement]
    word_length: Optional[int]
    strategy: str
    certificates: dict = field(default_factory=dict)
    candidates: int = 0
    details: dict = field(default_factory=dict)

    @property
    def word(self) -> Optional[str]:
        return None if self.g is None else self.g.word

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "witness": None if self.g is None else G.display_word(self.g.word),
            "winding": None if self.g is None else self.g.winding,
            "word_length": self.word_length,
            "strategy": self.strategy,
            "candidates": self.candidates,
            "certificates": self.certificates,
            "details": self.details,
        }


def _domain(F: Iterable[LiftedElement]) -> list:
    return [f for f in F if not G.is_identity(f)]


def certificates(o: OrderOracle, o_prime: OrderOracle, g: LiftedElement, F: Sequence[LiftedElement]) -> dict:
    """Per-element signs under o and under the conjugate of o' by g."""
    conj = conjugate_order(o_prime, g)
    out = {}
    for f in F:
        s, t = order_sign(o, f), order_sign(conj, f)
        out[G.display_word(f.word)] = {"target": "+" if s > 0 else "-",
                                       "conjugate": "+" if t > 0 else "-"}
    return out


def verify_witness(o: OrderOracle, o_prime: OrderOracle, g: LiftedElement, F: Iterable[LiftedElement]) -> bool:
    return in_neighborhood(conjugate_order(o_prime, g), o, _domain(F))


def _check_hypothesis(o: OrderOracle, o_prime: OrderOracle) -> int:
    s, t = abc_sign(o), abc_sign(o_prime)
    if s != t:
        raise HypothesisViolated(f"abc has sign {s:+d} for the target order and {t:+d} for the source order")
    return s


def _candidates(max_length: int):
    if max_length <= 12:
        return iter(G.ball(max_length, cap=max(max_length, G.BALL_CAP)))
    return G.iter_shortlex(max_length)


# ---------------------------------------------------------------------------
# breadth-first search
# ---------------------------------------------------------------------------

def find_conjugator_bfs(o: OrderOracle, o_prime: OrderOracle, F: Iterable[LiftedElement],
                        budget: Optional[SearchBudget] = None,
                        enforce_hypothesis: bool = True) -> ConjugatorReport:
    """First g in shortlex order whose conjugate of o' agrees with o on F."""
    budget = budget or SearchBudget()
    F = _domain(F)
    if enforce_hypothesis:
        _check_hypothesis(o, o_prime)
    # central elements first: they decide most mismatches immediately
    F_sorted = sorted(F, key=lambda f: not G.is_central(f))
    target = {f.key(): order_sign(o, f) for f in F_sorted}
    examined = 0
    for g in _candidates(budget.max_word_length):
        if examined >= budget.max_candidates:
            break
        examined += 1
        conj = conjugate_order(o_prime, g)
        if all(order_sign(conj, f) == target[f.key()] for f in F_sorted):
            if not verify_witness(o, o_prime, g, F):
                raise AssertionError("witness failed independent verification")
            return ConjugatorReport(True, g, len(g.word), "bfs", certificates(o, o_prime, g, F), examined)
    return ConjugatorReport(False, None, None, "bfs", {}, examined,
                            {"reason": "budget exhausted", "max_word_length": budget.max_word_length})


# ---------------------------------------------------------------------------
# uniform-sign neighbourhoods
# ---------------------------------------------------------------------------

def shift_point(p: CoverPoint, t: Fraction) -> CoverPoint:
    """Rotate ``p`` by the angle ``2 atan(t)`` (exact rational rotation), keeping track of the sheet."""
    t = Fraction(t)
    c, s = 1 - t * t, 2 * t
    q = CoverPoint(p.sheet, c * p.u - s * p.v, s * p.u + c * p.v)
    cmp = q.compare(p)
    if t > 0 and cmp <= 0:
        q = q.translate(1)
    elif t < 0 and cmp >= 0:
        q = q.translate(-1)
    return q


@dataclass
class SignInterval:
    """Certified open interval (lo, hi) around ``center`` (None = unbounded).

    ``signs`` maps words of the elements of F that move ``center`` to the
    constant sign of ``f(x) - x`` on the interval.
    """

    center: CoverPoint
    lo: Optional[CoverPoint]
    hi: Optional[CoverPoint]
    signs: dict
    radius: Optional[str] = None

    def contains(self, q: CoverPoint) -> bool:
        return (self.lo is None or self.lo.compare(q) < 0) and (self.hi is None or q.compare(self.hi) < 0)

    def to_json(self) -> dict:
        return {
            "center": self.center.to_float(),
            "lo": None if self.lo is None else self.lo.to_float(),
            "hi": None if self.hi is None else self.hi.to_float(),
            "radius": self.radius,
            "signs": self.signs,
        }


@dataclass
class SideReport(SignInterval):
    """A :class:`SignInterval` whose center is fixed by some elements of F.

    ``fixed`` maps their words to the pair (sign left of center, sign right
    of center), each constant on its half of the interval.
    """

    fixed: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = super().to_json()
        out["fixed"] = {w: {"left": l, "right": r} for w, (l, r) in self.fixed.items()}
        return out


def fixed_point_lifts(f: LiftedElement, p: CoverPoint) -> Optional[tuple]:
    """Nearest points left and right of ``p`` (excluding p) fixed by the lift ``f``.

    None when ``f`` fixes no point of the line: elliptic and central lifts,
    and hyperbolic lifts whose translation number is a nonzero integer.
    """
    if G.classify(f) != "hyperbolic":
        return None
    att, rep = G.fixed_points(f)
    if f(att).compare(att) != 0:
        return None
    # the fixed set is every translate of att and rep
    cand = [q.translate(p.sheet + d) for q in (att, rep) for d in (-2, -1, 0, 1, 2)]
    key = cmp_to_key(lambda x, y: x.compare(y))
    left = max((q for q in cand if q.compare(p) < 0), key=key)
    right = min((q for q in cand if q.compare(p) > 0), key=key)
    return left, right


def uniform_sign_interval(p: CoverPoint, F: Iterable[LiftedElement]) -> SignInterval:
    """Largest interval around ``p`` on which each f in F keeps its sign, cut at p -/+ 1.

    An element's sign can only change at one of its fixed points, so the
    interval runs from the nearest fixed point of any f on the left to the
    nearest on the right.  Elements fixing ``p`` itself get a sign per side.
    """
    F = _domain(F)
    fixed, signs = {}, {}
    lo, hi = p.translate(-1), p.translate(1)
    bounded = False
    for f in F:
        w = G.display_word(f.word)
        c = f(p).compare(p)
        if c:
            signs[w] = "+" if c > 0 else "-"
        else:
            fixed[w] = ("+", "-") if G.attracts_at(f, p) else ("-", "+")
        near = fixed_point_lifts(f, p)
        if near is None:
            continue
        bounded = True
        if near[0].compare(lo) > 0:
            lo = near[0]
        if near[1].compare(hi) < 0:
            hi = near[1]
    if not bounded:
        lo = hi = None
    radius = "fixed points" if bounded else "unbounded"
    if fixed:
        return SideReport(p, lo, hi, signs, radius, fixed)
    return SignInterval(p, lo, hi, signs, radius)


# ---------------------------------------------------------------------------
# point movers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Target:
    """Open interval (lo, hi) of the line; None means unbounded on that side."""

    lo: Optional[CoverPoint]
    hi: Optional[CoverPoint]

    def contains(self, q: CoverPoint) -> bool:
        return (self.lo is None or self.lo.compare(q) < 0) and (self.hi is None or q.compare(self.hi) < 0)


def find_point_mover(p_prime: CoverPoint, target: Target, budget: Optional[SearchBudget] = None,
                     accept: Optional[Callable[[LiftedElement], bool]] = None):
    """First g in shortlex order with g(p') inside ``target`` (and ``accept(g)`` if given).

    Returns ``(g, candidates examined)``; raises BudgetExhausted.
    """
    budget = budget or SearchBudget()
    lo_f = None if target.lo is None else target.lo.to_float() - 1e-6
    hi_f = None if target.hi is None else target.hi.to_float() + 1e-6
    examined = 0
    for g in _candidates(budget.max_word_length):
        if examined >= budget.max_candidates:
            break
        examined += 1
        q = g(p_prime)
        x = q.to_float()
        if (lo_f is not None and x < lo_f) or (hi_f is not None and x > hi_f):
            continue
        if target.contains(q) and (accept is None or accept(g)):
            return g, examined
    raise BudgetExhausted(f"no mover within word length {budget.max_word_length} "
                          f"({examined} candidates)")


# ---------------------------------------------------------------------------
# guided search
# ---------------------------------------------------------------------------

def _standard_form(o: OrderOracle, flip: bool) -> OrderOracle:
    o = collapse_oracle(o)
    if flip:
        o = replace(o, reversed=not o.reversed)
    if o.action is not STANDARD and not isinstance(o.action, type(STANDARD)):
        raise TypeError("guided search needs the standard action or a blow-up of it")
    return o


def find_conjugator_guided(o: OrderOracle, o_prime: OrderOracle, F: Iterable[LiftedElement],
                           budget: Optional[SearchBudget] = None,
                           stabilizer_depth: Optional[int] = None) -> ConjugatorReport:
    """Conjugator search following the basepoint argument (see module docstring)."""
    budget = budget or SearchBudget()
    F = _domain(F)
    s = _check_hypothesis(o, o_prime)
    oo, op = _standard_form(o, s < 0), _standard_form(o_prime, s < 0)
    p, p_prime = oo.basepoint, op.basepoint

    depth = stabilizer_depth or max([len(f.word) for f in F] + [1])
    st = G.point_stabilizer(p, depth, cap=max(depth, G.BALL_CAP))
    V = uniform_sign_interval(p, F)
    details = {"stabilizer": st.kind, "stabilizer_depth": depth, "interval": V.to_json()}

    if st.is_cyclic:
        k = st.generator
        sk = order_sign(oo, k)
        side = "left" if sk > 0 else "right"
        target = Target(V.lo, p) if side == "left" else Target(p, V.hi)
        details.update({"generator": G.display_word(k.word), "generator_sign": "+" if sk > 0 else "-",
                        "side": side})
    else:
        target = Target(V.lo, V.hi)
        details["side"] = "both"

    def accept(g):
        q = g(p_prime)
        # g K' g^-1 meets F exactly when some f in F fixes g(p')
        if any(f(q).compare(q) == 0 for f in F):
            return False
        return verify_witness(o, o_prime, g, F)

    try:
        g, examined = find_point_mover(p_prime, target, budget, accept)
    except BudgetExhausted as exc:
        details["reason"] = str(exc)
        return ConjugatorReport(False, None, None, "guided", {}, budget.max_candidates, details)
    return ConjugatorReport(True, g, len(g.word), "guided", certificates(o, o_prime, g, F), examined, details)


def find_conjugator(o: OrderOracle, o_prime: OrderOracle, F: Iterable[LiftedElement],
                    budget: Optional[SearchBudget] = None) -> ConjugatorReport:
    """Guided search, falling back to breadth-first search."""
    F = _domain(F)
    try:
        rep = find_conjugator_guided(o, o_prime, F, budget)
    except (PrecisionExhausted, TypeError) as exc:
        rep = ConjugatorReport(False, None, None, "guided", details={"reason": str(exc)})
    if rep.found:
        return rep
    fallback = find_conjugator_bfs(o, o_prime, F, budget)
    fallback.details["guided"] = rep.details
    return fallback


# ---------------------------------------------------------------------------
# component scan
# ---------------------------------------------------------------------------

@dataclass
class ScanResult:
    oracles: list
    entries: dict            # (i, j) -> dict
    signs: list

    def matrix(self) -> list:
        n = len(self.oracles)
        return [[self.entries[i, j]["status"] for j in range(n)] for i in range(n)]

    def lengths(self) -> list:
        return [e["word_length"] for e in self.entries.values() if e["status"] == "found"]

    def histogram(self) -> dict:
        return dict(sorted(Counter(self.lengths()).items()))

    def is_two_block(self) -> bool:
        for (i, j), e in self.entries.items():
            same = self.signs[i] == self.signs[j]
            if same and e["status"] != "found":
                return False
            if not same and e["status"] != "obstructed":
                return False
        return True

    def to_json(self) -> dict:
        n = len(self.oracles)
        pairs = []
        for i in range(n):
            for j in range(n):
                e = dict(self.entries[i, j])
                e.update({"target": i, "source": j})
                pairs.append(e)
        return {
            "oracles": [o.describe() for o in self.oracles],
            "abc_signs": ["+" if s > 0 else "-" for s in self.signs],
            "pairs": pairs,
            "two_block": self.is_two_block(),
            "histogram": {str(k): v for k, v in self.histogram().items()},
            "failures": [p for p in pairs if p["status"] == "not-found"],
        }

    def matrix_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = len(self.oracles)
        w.writerow(["target\\source"] + [str(j) for j in range(n)])
        for i in range(n):
            row = []
            for j in range(n):
                e = self.entries[i, j]
                row.append(str(e["word_length"]) if e["status"] == "found" else e["status"])
            w.writerow([str(i)] + row)
        return buf.getvalue()

    def histogram_csv(self) -> str:
        return histogram_csv(self.histogram())

    def histogram_svg(self) -> str:
        return histogram_svg(self.histogram())


def histogram_csv(hist: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["word_length", "count"])
    for k, v in sorted(hist.items()):
        w.writerow([k, v])
    return buf.getvalue()


def histogram_svg(hist: dict) -> str:
    """Bar chart of a word-length histogram as SVG text (needs matplotlib)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "gamma237"
    fig, ax = plt.subplots(figsize=(4, 2.5))
    keys = sorted(hist)
    ax.bar([str(k) for k in keys], [hist[k] for k in keys], color="#4a6fa5")
    ax.set_xlabel("witness word length")
    ax.set_ylabel("pairs")
    fig.tight_layout()
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def component_scan(oracles: Sequence[OrderOracle], F: Iterable[LiftedElement],
                   budget: Optional[SearchBudget] = None) -> ScanResult:
    """Run the conjugator search over all ordered pairs (target i, source j)."""
    F = _domain(F)
    signs = [abc_sign(o) for o in oracles]
    entries = {}
    for i, o in enumerate(oracles):
        for j, op in enumerate(oracles):
            if signs[i] != signs[j]:
                entries[i, j] = {"status": "obstructed", "word_length": None, "witness": None,
                                 "strategy": None}
                continue
            rep = find_conjugator(o, op, F, budget)
            entries[i, j] = {
                "status": "found" if rep.found else "not-found",
                "word_length": rep.word_length,
                "witness": None if rep.g is None else G.display_word(rep.g.word),
                "strategy": rep.strategy,
            }
    return ScanResult(list(oracles), entries, signs)


def obstruction_check(o: OrderOracle, o_prime: OrderOracle, F: Iterable[LiftedElement],
                      max_length: int = 8) -> dict:
    """Exhaustive search for a verifying g between opposite-sign orders (expected: none).

    Also checks that conjugating o' never changes the sign of abc.
    """
    F = _domain(F)
    rep = find_conjugator_bfs(o, o_prime, F, SearchBudget(max_word_length=max_length),
                              enforce_hypothesis=False)
    t = G.central_element()
    s = order_sign(o_prime, t)
    invariance_failures = [g.word for g in _candidates(max_length)
                           if order_sign(conjugate_order(o_prime, g), t) != s]
    return {"false_merges": 1 if rep.found else 0, "witness": rep.word,
            "candidates": rep.candidates, "sign_changes": len(invariance_failures)}


def report_json(report: ConjugatorReport, o: OrderOracle, o_prime: OrderOracle, F_descriptor: dict) -> str:
    data = {"target": o.describe(), "source": o_prime.describe(), "domain": F_descriptor, "report": report.to_json()}
    return json.dumps(data, indent=1, sort_keys=True)

"""Left-orders on Gamma given by a basepoint of an action on the line.

An :class:`OrderOracle` declares ``g`` positive when ``g`` moves the basepoint
to the right.  If ``g`` fixes the basepoint, the auxiliary points of the
tiebreak chain are consulted in turn.  The orders obtained this way are
exactly those realised by the standard action or one of its blow-ups.
"""
from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from . import group as G
from .group import CoverPoint, LiftedElement


class TiebreakExhausted(RuntimeError):
    """Every point of the tiebreak chain is fixed by the queried element."""


class InconsistentOracle(ValueError):
    """A sign function that violates the positive-cone axioms."""


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------

class StandardAction:
    """rho: Gamma -> Homeo+(R) through the central lift."""

    name = "standard"

    def act(self, g: LiftedElement, p: CoverPoint) -> CoverPoint:
        return g(p)

    def compare(self, p: CoverPoint, q: CoverPoint) -> int:
        return p.compare(q)

    def collapse(self, p):
        return p

    def to_json(self) -> dict:
        return {"kind": "standard"}

    def __eq__(self, other):
        return isinstance(other, StandardAction)

    def __hash__(self):
        return hash("standard")


STANDARD = StandardAction()


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrderOracle:
    basepoint: object
    action: object = STANDARD
    tiebreak: tuple = ()
    reversed: bool = False
    descriptor: dict = field(default_factory=dict)

    def sign(self, g: LiftedElement) -> int:
        return order_sign(self, g)

    def flipped(self) -> "OrderOracle":
        descriptor = {"kind": "reversed", "base": self.descriptor}
        return replace(self, reversed=not self.reversed, descriptor=descriptor)

    def describe(self) -> dict:
        return self.descriptor

    def __repr__(self):
        return f"OrderOracle({json.dumps(self.descriptor, sort_keys=True)})"


def order_sign(o: OrderOracle, g: LiftedElement) -> int:
    """+1 if ``g`` is in the positive cone of ``o``, else -1."""
    if G.is_identity(g):
        raise ValueError("the identity has no sign")
    act, cmp = o.action.act, o.action.compare
    for p in (o.basepoint,) + tuple(o.tiebreak):
        c = cmp(act(g, p), p)
        if c:
            return -c if o.reversed else c
    raise TiebreakExhausted(f"{G.display_word(g.word)} fixes every tiebreak point")


def abc_sign(o: OrderOracle) -> int:
    return order_sign(o, G.central_element())


def conjugate_order(o: OrderOracle, g: LiftedElement) -> OrderOracle:
    """The order with cone ``g P g^-1``: basepoint and tiebreak moved by ``g``."""
    act = o.action.act
    descriptor = {"kind": "conjugate", "base": o.descriptor, "by": G.display_word(g.word)}
    return replace(o, basepoint=act(g, o.basepoint),
                   tiebreak=tuple(act(g, p) for p in o.tiebreak), descriptor=descriptor)


# -- constructors ------------------------------------------------------------

def standard_oracle(p: CoverPoint, tiebreak: Sequence[CoverPoint] = (), descriptor: Optional[dict] = None) -> OrderOracle:
    descriptor = descriptor or {"kind": "point", "point": p.to_json()}
    return OrderOracle(p, STANDARD, tuple(tiebreak), False, descriptor)


def free_oracle(slope, sheet: int = 0) -> OrderOracle:
    """Order from the rational point with cotangent ``slope`` on the given sheet."""
    slope = Fraction(slope)
    p = CoverPoint.from_slope(slope, sheet)
    return OrderOracle(p, STANDARD, (), False,
                       {"kind": "slope", "slope": str(slope), "sheet": sheet})


def point_between(lo: CoverPoint, hi: CoverPoint) -> CoverPoint:
    """A point with rational coordinates strictly between ``lo < hi``."""
    if lo.compare(hi) >= 0:
        raise ValueError("empty interval")
    a, b = lo.to_float(), hi.to_float()
    for frac in (0.5, 0.25, 0.75, 0.125, 0.875):
        x = a + (b - a) * frac
        q = G.point_from_angle(Fraction(x))
        if lo.compare(q) < 0 and q.compare(hi) < 0:
            return q
    # fall back on exact projective midpoints of unit-normalised vectors
    lo_f, hi_f = lo, hi
    for _ in range(200):
        mid = G.point_from_angle(Fraction((lo_f.to_float() + hi_f.to_float()) / 2))
        c1, c2 = lo.compare(mid), mid.compare(hi)
        if c1 < 0 and c2 < 0:
            return mid
        if c1 >= 0:
            lo_f = mid if mid.compare(hi) < 0 else lo_f
        else:
            hi_f = mid
    raise ValueError("could not separate the interval at double precision")


def adjacent_fixed_points(k: LiftedElement, p: CoverPoint):
    """For ``k`` fixing the lifted point ``p``: nearest other fixed points left and right.

    The lift fixing ``p`` fixes every lift of both circle fixed points.
    """
    att, rep = G.fixed_points(k)
    other = rep if att.same_circle_point(p) else att
    cand = [other.translate(p.sheet - other.sheet + d) for d in (-2, -1, 0, 1, 2)]
    cand += [p.translate(-1), p.translate(1)]
    left = max((q for q in cand if q.compare(p) < 0), key=_Key)
    right = min((q for q in cand if q.compare(p) > 0), key=_Key)
    return left, right


class _Key:
    """Sort key wrapper for cover points."""

    __slots__ = ("p",)

    def __init__(self, p):
        self.p = p

    def __lt__(self, other):
        return self.p.compare(other.p) < 0


def fixed_point_oracle(word: str, side: str = "left", which: str = "attracting", sheet: int = 0) -> OrderOracle:
    """Basepoint at a fixed point of the hyperbolic element ``word``.

    The stabiliser of the basepoint is cyclic; its elements are ordered by
    the auxiliary point placed on ``side`` (between the basepoint and the
    adjacent fixed point), matching a blow-up of the basepoint's orbit.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    k = G.element(word)
    p, kk = G.stabilizer_of_fixed_point(k, which, sheet)
    left, right = adjacent_fixed_points(kk, p)
    aux = point_between(left, p) if side == "left" else point_between(p, right)
    descriptor = {"kind": "fixed_point", "element": G.display_word(k.word), "which": which,
            "side": side, "sheet": sheet}
    return OrderOracle(p, STANDARD, (aux,), False, descriptor)


def oracle_from_descriptor(descriptor: dict) -> OrderOracle:
    """Rebuild an oracle from its JSON description."""
    kind = descriptor["kind"]
    if kind == "slope":
        return free_oracle(Fraction(descriptor["slope"]), int(descriptor.get("sheet", 0)))
    if kind == "fixed_point":
        return fixed_point_oracle(descriptor["element"], descriptor.get("side", "left"),
                                  descriptor.get("which", "attracting"), int(descriptor.get("sheet", 0)))
    if kind == "reversed":
        return oracle_from_descriptor(descriptor["base"]).flipped()
    if kind == "conjugate":
        return conjugate_order(oracle_from_descriptor(descriptor["base"]), G.element(G.parse_word(descriptor["by"])))
    if kind == "blowup":
        from .realization import oracle_from_blowup_descriptor
        return oracle_from_blowup_descriptor(descriptor)
    raise ValueError(f"cannot rebuild oracle of kind {kind!r}")


def random_free_oracles(n: int, seed: int, max_den: int = 40, depth: int = 10) -> list:
    """Seeded rational basepoints, rejection-sampled for trivial stabiliser up to ``depth``."""
    rng = random.Random(seed)
    out = []
    seen = set()
    while len(out) < n:
        den = rng.randint(1, max_den)
        num = rng.randint(-3 * den, 3 * den)
        slope = Fraction(num, den)
        if slope in seen:
            continue
        seen.add(slope)
        p = CoverPoint.from_slope(slope)
        if G.point_stabilizer(p, depth, cap=max(depth, G.BALL_CAP)).is_cyclic:
            continue
        out.append(free_oracle(slope))
    return out


# ---------------------------------------------------------------------------
# cone tables
# ---------------------------------------------------------------------------

@dataclass
class ConeTable:
    """Signs of a positive cone restricted to a finite set (keys: canonical words)."""

    signs: dict
    elements: dict = field(default_factory=dict, repr=False)

    def __getitem__(self, word: str) -> int:
        return self.signs[word]

    def __len__(self):
        return len(self.signs)

    def __eq__(self, other):
        return isinstance(other, ConeTable) and self.signs == other.signs

    def positive(self) -> list:
        return [w for w, s in self.signs.items() if s > 0]

    def to_json(self) -> str:
        data = {G.display_word(w): ("+" if s > 0 else "-") for w, s in self._ordered()}
        return json.dumps(data, indent=1, ensure_ascii=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["word", "length", "sign"])
        for word, s in self._ordered():
            w.writerow([G.display_word(word), len(word), "+" if s > 0 else "-"])
        return buf.getvalue()

    def _ordered(self):
        return sorted(self.signs.items(), key=lambda kv: G.shortlex_key(kv[0]))

    @classmethod
    def from_json(cls, text: str) -> "ConeTable":
        data = json.loads(text)
        signs = {G.parse_word(k): (1 if v == "+" else -1) for k, v in data.items()}
        return cls(signs)

    def check_axioms(self, products: Optional["ProductIndex"] = None) -> list:
        """Violations of inverse antisymmetry and semigroup closure on the domain."""
        if products is None:
            products = ProductIndex.for_words(list(self.signs))
        violations = []
        for w, s in self.signs.items():
            iw = products.inverse_word(w)
            if iw is not None and iw in self.signs and self.signs[iw] != -s:
                violations.append(("antisymmetry", w, iw))
        for gw, hw, ghw in products.triples():
            if gw in self.signs and hw in self.signs and ghw in self.signs:
                if self.signs[gw] > 0 and self.signs[hw] > 0 and self.signs[ghw] < 0:
                    violations.append(("semigroup", gw, hw, ghw))
                if self.signs[gw] < 0 and self.signs[hw] < 0 and self.signs[ghw] > 0:
                    violations.append(("semigroup-negative", gw, hw, ghw))
        return violations


class ProductIndex:
    """All triples (g, h, gh) with g, h, gh in a finite set of elements, found exactly."""

    _cache: dict = {}

    def __init__(self, elements: Sequence[LiftedElement]):
        self.elements = list(elements)
        index = {g.key(): g.word for g in self.elements}
        self._triples = []
        self._inverse = {}
        for g in self.elements:
            gi = G.invert(g)
            if gi.key() in index:
                self._inverse[g.word] = index[gi.key()]
            for h in self.elements:
                k = G.compose(g, h).key()
                w = index.get(k)
                if w is not None:
                    self._triples.append((g.word, h.word, w))

    @classmethod
    def for_words(cls, words: Sequence[str]) -> "ProductIndex":
        key = tuple(sorted(words, key=G.shortlex_key))
        cached = cls._cache.get(key)
        if cached is None:
            cached = cls([G.element(w) for w in key])
            cls._cache[key] = cached
        return cached

    @classmethod
    def for_ball(cls, n: int) -> "ProductIndex":
        words = [g.word for g in G.ball(n).without_identity()]
        key = tuple(words)
        cached = cls._cache.get(key)
        if cached is None:
            cached = cls(G.ball(n).without_identity())
            cls._cache[key] = cached
        return cached

    def triples(self):
        return self._triples

    def inverse_word(self, word: str):
        return self._inverse.get(word)


def cone_table(o: OrderOracle, F: Iterable[LiftedElement]) -> ConeTable:
    """Signs of ``o`` on ``F``; the identity is dropped if present."""
    signs, elems = {}, {}
    for g in F:
        if G.is_identity(g):
            continue
        signs[g.word] = order_sign(o, g)
        elems[g.word] = g
    return ConeTable(signs, elems)


def in_neighborhood(o_prime: OrderOracle, o: OrderOracle, F: Iterable[LiftedElement]) -> bool:
    """True iff the two cones agree on ``F`` (the basic neighbourhood test)."""
    for g in F:
        if G.is_identity(g):
            continue
        if order_sign(o_prime, g) != order_sign(o, g):
            return False
    return True


def cone_violations_on_ball(o: OrderOracle, n: int) -> list:
    """Cone-axiom violations of ``o`` restricted to ball(n) minus the identity."""
    F = G.ball(n).without_identity()
    table = cone_table(o, F)
    return table.check_axioms(ProductIndex.for_ball(n))


def sign_function(source) -> Callable[[LiftedElement], int]:
    """Normalise an oracle, a ConeTable or a callable into ``g -> +-1``."""
    if isinstance(source, OrderOracle):
        return lambda g: order_sign(source, g)
    if isinstance(source, ConeTable):
        lookup = {}
        for w, s in source.signs.items():
            e = source.elements.get(w) or G.element(w)
            lookup[e.key()] = s

        def table_sign(g):
            try:
                return lookup[g.key()]
            except KeyError:
                raise InconsistentOracle(f"table has no sign for {G.display_word(g.word)}") from None
        return table_sign
    if callable(source):
        return source
    raise TypeError(f"not a sign source: {source!r}")

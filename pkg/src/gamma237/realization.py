"""Finite-stage dynamical realizations and blow-ups of the standard action.

A :class:`PartialRealization` places ball(n) on the rational line in the
order of a given positive cone and interpolates each generator by an
increasing piecewise-linear map.

A :class:`BlowupMap` inserts an interval at every point of one or more
Gamma-orbits.  Points of the blown-up line are kept symbolically as
``(base, t)``: a point of the original line together with a position
``t in [0, 1]`` inside the inserted gap (``t = 0`` for points off the
blown-up orbits).  The action moves the base and keeps ``t``, which is the
affine extension across gaps, and the collapse map forgets ``t``.  Both the
action and the collapse are therefore exact, and numeric coordinates are
only produced for export.
"""
from __future__ import annotations

import bisect
import csv
import io
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import mpmath

from . import group as G
from .group import CoverPoint, LiftedElement
from .orders import (
    STANDARD,
    ConeTable,
    InconsistentOracle,
    OrderOracle,
    ProductIndex,
    sign_function,
)


# ---------------------------------------------------------------------------
# piecewise-linear maps and partial realizations
# ---------------------------------------------------------------------------

class PLMap:
    """Increasing piecewise-linear map of Q through the given knots, slope 1 outside."""

    def __init__(self, xs: Sequence[Fraction], ys: Sequence[Fraction]):
        pairs = sorted(zip(xs, ys))
        self.xs = [x for x, _ in pairs]
        self.ys = [y for _, y in pairs]
        for i in range(1, len(self.xs)):
            if not (self.xs[i] > self.xs[i - 1] and self.ys[i] > self.ys[i - 1]):
                raise InconsistentOracle("knots of a generator extension are not increasing")

    def __call__(self, x: Fraction) -> Fraction:
        xs, ys = self.xs, self.ys
        if not xs:
            return x
        if x <= xs[0]:
            return ys[0] + (x - xs[0])
        if x >= xs[-1]:
            return ys[-1] + (x - xs[-1])
        i = bisect.bisect_right(xs, x)
        x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def inverse(self) -> "PLMap":
        return PLMap(self.ys, self.xs)


@dataclass
class PartialRealization:
    """Placement of ball(stage) on the line plus PL extensions of the generators."""

    stage: int
    placement: dict          # word -> Fraction
    order: list              # words, increasing
    extension: dict          # letter (all six) -> PLMap
    elements: dict = field(repr=False, default_factory=dict)

    def evaluate(self, word: str, x: Fraction = Fraction(0)) -> Fraction:
        """Image of ``x`` under the extension of ``word`` (rightmost letter first)."""
        for ch in reversed(word):
            x = self.extension[ch](x)
        return x

    def sign(self, g: LiftedElement) -> int:
        """Sign read off the realization: + iff the word moves 0 to the right."""
        x = self.evaluate(g.word)
        if x == 0:
            raise ValueError("the identity has no sign")
        return 1 if x > 0 else -1

    def cone_table(self, F: Iterable[LiftedElement]) -> ConeTable:
        signs = {g.word: self.sign(g) for g in F if g.word}
        return ConeTable(signs)

    def equivariance_defects(self) -> list:
        """(letter, word) pairs with g in ball(stage-1) where s(place(g)) != place(sg)."""
        b = G.ball(self.stage)
        bad = []
        for g in G.ball(max(self.stage - 1, 0)):
            for ch in G.ALPHABET:
                sg = b.lookup(G.compose(G.GENERATORS[ch], g))
                if sg is None:
                    continue
                if self.extension[ch](self.placement[g.word]) != self.placement[sg.word]:
                    bad.append((ch, g.word))
        return bad

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["word", "placement"])
        for word in self.order:
            w.writerow([G.display_word(word), str(self.placement[word])])
        return buf.getvalue()


def build_realization(source, n: int, check_axioms: bool = True) -> PartialRealization:
    """Realize the cone of ``source`` on ball(n).

    ``source`` is an oracle, a ConeTable or a callable sign function.  The
    ordering ``g < h`` iff ``g^-1 h`` is positive is built by binary
    insertion in shortlex order; each new element goes to the midpoint of
    its gap, or one unit past the current extremes.
    """
    sign = sign_function(source)
    b = G.ball(n, cap=max(n, G.BALL_CAP))
    elems = list(b)
    inv = {g.word: G.invert(g) for g in elems}

    if check_axioms and n > 0:
        products = ProductIndex.for_ball(n)
        table = _table_from(sign, b.without_identity())
        bad = table.check_axioms(products)
        if bad:
            raise InconsistentOracle(f"cone axioms fail on ball({n}): {bad[0]}")

    def less(g, h):
        return sign(G.compose(inv[g.word], h)) > 0

    order: list = []
    placement: dict = {}
    for g in elems:
        lo, hi = 0, len(order)
        while lo < hi:
            mid = (lo + hi) // 2
            if less(order[mid], g):
                lo = mid + 1
            else:
                hi = mid
        if not order:
            x = Fraction(0)
        elif lo == 0:
            x = placement[order[0].word] - 1
        elif lo == len(order):
            x = placement[order[-1].word] + 1
        else:
            x = (placement[order[lo - 1].word] + placement[order[lo].word]) / 2
        order.insert(lo, g)
        placement[g.word] = x

    for g, h in zip(order, order[1:]):
        if not less(g, h) or less(h, g):
            raise InconsistentOracle(
                f"order is not transitive near {G.display_word(g.word)} < {G.display_word(h.word)}")

    extension = {}
    for ch in "abc":
        xs, ys = [], []
        s = G.GENERATORS[ch]
        for g in elems:
            sg = b.lookup(G.compose(s, g))
            if sg is not None:
                xs.append(placement[g.word])
                ys.append(placement[sg.word])
        m = PLMap(xs, ys)
        extension[ch] = m
        extension[G.INVERSE_LETTER[ch]] = m.inverse()
    return PartialRealization(n, placement, [g.word for g in order], extension,
                              {g.word: g for g in elems})


def _table_from(sign, F) -> ConeTable:
    return ConeTable({g.word: sign(g) for g in F})


# ---------------------------------------------------------------------------
# blow-ups
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BlownPoint:
    """Point ``(base, t)`` of a blown-up line; ``orbit`` marks points of a blown-up orbit."""

    base: CoverPoint
    t: Fraction = Fraction(0)
    orbit: Optional[int] = None

    def compare(self, other: "BlownPoint") -> int:
        c = self.base.compare(other.base)
        if c:
            return c
        return (self.t > other.t) - (self.t < other.t)

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "t": str(self.t), "orbit": self.orbit}


class _OrbitEnumerator:
    """Breadth-first enumeration of one orbit on the circle (points mod the deck translation)."""

    def __init__(self, base: CoverPoint, limit: int = 200000):
        self.limit = limit
        p0 = CoverPoint(0, base.u, base.v, normalized=True)
        self.points = [p0]
        self.words = [""]
        self.rank = {p0.circle_key(): 0}
        self.queue = deque([0])

    def _step(self):
        i = self.queue.popleft()
        p, w = self.points[i], self.words[i]
        for ch in G.ALPHABET:
            q = G.GENERATORS[ch](p)
            k = q.circle_key()
            if k not in self.rank:
                self.rank[k] = len(self.points)
                self.points.append(CoverPoint(0, q.u, q.v, normalized=True))
                self.words.append(ch + w)
                self.queue.append(len(self.points) - 1)

    def rank_of(self, p: CoverPoint) -> int:
        k = p.circle_key()
        while k not in self.rank:
            if not self.queue or len(self.points) > self.limit:
                raise G.DepthInsufficient("point not reached in the orbit enumeration")
            self._step()
        return self.rank[k]

    def first(self, count: int) -> list:
        while len(self.points) < count and self.queue:
            self._step()
        return list(zip(self.words[:count], self.points[:count]))


class BlowupMap:
    """The standard action with a gap inserted at each point of the given orbits.

    Orbit ``i`` gets total length ``masses[i]``.  Within an orbit the circle
    point of enumeration rank ``r`` (breadth-first over the generators) on
    sheet ``s`` gets length ``masses[i] * 2^-(r+1) * 2^-|s| / 3``, so the
    lengths over the whole line sum to ``masses[i]``.
    """

    name = "blowup"

    def __init__(self, orbits: Sequence[CoverPoint], masses: Sequence[Fraction], descriptors: Sequence[dict] = ()):
        self.orbits = list(orbits)
        self.masses = [Fraction(m) for m in masses]
        self.descriptors = list(descriptors) or [{"point": p.to_json()} for p in self.orbits]
        self._enum = [_OrbitEnumerator(p) for p in self.orbits]

    # -- action interface used by OrderOracle --------------------------------
    def act(self, g: LiftedElement, x: BlownPoint) -> BlownPoint:
        return BlownPoint(g(x.base), x.t, x.orbit)

    def compare(self, x: BlownPoint, y: BlownPoint) -> int:
        return x.compare(y)

    def collapse(self, x: BlownPoint) -> CoverPoint:
        """The semi-conjugacy h to the standard action."""
        return x.base

    def to_json(self) -> dict:
        return {"kind": "blowup", "orbits": self.descriptors, "masses": [str(m) for m in self.masses]}

    # -- points ----------------------------------------------------------------
    def orbit_point(self, i: int, word: str = "", t: Fraction = Fraction(1, 2)) -> BlownPoint:
        g = G.element(word)
        return BlownPoint(g(self.orbits[i]), Fraction(t), i)

    def gap(self, i: int, word: str = "") -> tuple:
        """Endpoints of the gap inserted at ``word`` applied to the i-th orbit point."""
        return self.orbit_point(i, word, Fraction(0)), self.orbit_point(i, word, Fraction(1))

    def lift(self, p: CoverPoint, t: Fraction = Fraction(0)) -> BlownPoint:
        """A point of h^-1(p); ``t`` only matters when ``p`` lies on a blown-up orbit."""
        return BlownPoint(p, Fraction(t), None)

    def gap_length(self, x: BlownPoint) -> Fraction:
        if x.orbit is None:
            return Fraction(0)
        r = self._enum[x.orbit].rank_of(x.base)
        return self.masses[x.orbit] * Fraction(1, 2 ** (r + 1)) / (3 * 2 ** abs(x.base.sheet))

    def total_length(self) -> Fraction:
        return sum(self.masses, Fraction(0))

    def coordinate(self, x: BlownPoint, rank_limit: int = 64, sheet_limit: int = 8, prec: int = 64):
        """Enclosure (lo, hi) of the numeric blown-up coordinate of ``x``.

        Sums the lengths of enumerated gaps strictly left of ``x`` (rank below
        ``rank_limit``, sheets within ``sheet_limit`` of 0) and adds the mass
        of the gaps left out to the upper end.
        """
        base_iv = x.base.interval_angle(prec)
        lo = Fraction(0)
        tail = Fraction(0)
        for i, enum in enumerate(self._enum):
            pts = enum.first(rank_limit)
            covered = Fraction(0)
            for r, (_, p) in enumerate(pts):
                for s in range(-sheet_limit, sheet_limit + 1):
                    q = p.translate(s)
                    ell = self.masses[i] * Fraction(1, 2 ** (r + 1)) / (3 * 2 ** abs(s))
                    covered += ell
                    c = q.compare(x.base)
                    if c < 0 or (c == 0 and x.orbit == i):
                        lo += ell * (x.t if c == 0 else 1)
            tail += self.masses[i] - covered
        a = mpmath.mpf(base_iv.a) + mpmath.mpf(lo.numerator) / lo.denominator
        b = mpmath.mpf(base_iv.b) + mpmath.mpf(lo.numerator) / lo.denominator + \
            mpmath.mpf(tail.numerator) / tail.denominator
        return float(a), float(b)

    def export(self, count: int = 16) -> dict:
        """JSON-ready list of the first ``count`` orbit points of each orbit on sheet 0 and their gaps."""
        out = []
        for i, enum in enumerate(self._enum):
            for word, p in enum.first(count):
                left = BlownPoint(p, Fraction(0), i)
                length = self.gap_length(left)
                lo, hi = self.coordinate(left)
                out.append({
                    "orbit": i,
                    "word": G.display_word(word),
                    "point": p.to_json(),
                    "angle": p.to_float(),
                    "gap_length": str(length),
                    "gap_interval": [lo, hi + float(length)],
                })
        return {"action": self.to_json(), "total_length": str(self.total_length()), "gaps": out}


def blow_up(points: Sequence[CoverPoint], lengths: Optional[Sequence] = None,
            descriptors: Sequence[dict] = ()) -> BlowupMap:
    """Blow up the Gamma-orbits of ``points``; orbit k gets total length ``lengths[k]`` (default 2^-(k+1))."""
    points = list(points)
    for i in range(len(points)):
        for j in range(i):
            if points[i].same_circle_point(points[j]):
                raise ValueError("points must be pairwise distinct")
    if lengths is None:
        lengths = [Fraction(1, 2 ** (k + 1)) for k in range(len(points))]
    lengths = [Fraction(x) for x in lengths]
    if len(lengths) != len(points) or any(x <= 0 for x in lengths):
        raise ValueError("need one positive length per point")
    return BlowupMap(points, lengths, descriptors)


def _point_difference_bound(a: CoverPoint, b: CoverPoint, prec: int = 64):
    if a.compare(b) == 0:
        return Fraction(0)
    ia, ib = a.interval_angle(prec), b.interval_angle(prec)
    d = ia - ib
    return float(max(abs(d.a), abs(d.b)))


def check_semiconjugacy(h: Callable, phi: Callable, phi_prime: Callable,
                        samples: Iterable, elements: Iterable[LiftedElement]):
    """max over samples x elements of |h(phi'(g)(x)) - phi(g)(h(x))|.

    Exact zero is returned as ``Fraction(0)``; a nonzero defect is an upper
    bound from interval arithmetic.
    """
    worst = Fraction(0)
    elements = list(elements)
    for x in samples:
        hx = h(x)
        for g in elements:
            d = _point_difference_bound(h(phi_prime(g, x)), phi(g, hx))
            if d > worst:
                worst = d
    return worst


def blowup_defect(bmap: BlowupMap, samples: Iterable[BlownPoint], elements: Iterable[LiftedElement]):
    return check_semiconjugacy(bmap.collapse, STANDARD.act, bmap.act, samples, elements)


def orbit_order_mismatches(bmap: BlowupMap, q: BlownPoint, elements: Sequence[LiftedElement]) -> list:
    """Pairs (g, h) whose blown-up orbit order at q differs from the base order at h(q)."""
    p = bmap.collapse(q)
    imgs = [(g, bmap.act(g, q), g(p)) for g in elements]
    bad = []
    for i, (g, x, px) in enumerate(imgs):
        for h, y, py in imgs[i + 1:]:
            if x.compare(y) != px.compare(py):
                bad.append((g.word, h.word))
    return bad


def gap_stabilizer(bmap: BlowupMap, i: int, word: str = "", depth: int = 6):
    """Stabiliser of the gap at ``word`` applied to the i-th orbit point, via its endpoints."""
    left, right = bmap.gap(i, word)
    st = G.point_stabilizer(bmap.collapse(left), depth)
    if st.is_cyclic:
        k = st.generator
        if bmap.act(k, left).compare(left) or bmap.act(k, right).compare(right):
            raise AssertionError("stabiliser generator does not preserve the gap")
    return st


# ---------------------------------------------------------------------------
# oracles on blown-up lines
# ---------------------------------------------------------------------------

def orbit_point_from_descriptor(descriptor: dict) -> CoverPoint:
    if "slope" in descriptor:
        return CoverPoint.from_slope(Fraction(descriptor["slope"]), int(descriptor.get("sheet", 0)))
    if "fixed_point" in descriptor:
        p, _ = G.stabilizer_of_fixed_point(G.element(G.parse_word(descriptor["fixed_point"])),
                                          descriptor.get("which", "attracting"), int(descriptor.get("sheet", 0)))
        return p
    raise ValueError(f"cannot build orbit point from {descriptor!r}")


def blowup_from_descriptors(orbit_descriptors: Sequence[dict], masses: Optional[Sequence] = None) -> BlowupMap:
    pts = [orbit_point_from_descriptor(s) for s in orbit_descriptors]
    return blow_up(pts, masses, orbit_descriptors)


def blowup_oracle(bmap: BlowupMap, orbit: int, word: str = "", t=Fraction(1, 2),
                  tiebreak: Sequence[tuple] = ()) -> OrderOracle:
    """Oracle based at the point ``t`` of the gap at ``word`` applied to orbit point ``orbit``.

    ``tiebreak`` entries are ``(orbit, word, t)`` triples of further gap points.
    """
    base = bmap.orbit_point(orbit, word, t)
    aux = tuple(bmap.orbit_point(i, w, s) for i, w, s in tiebreak)
    descriptor = {
        "kind": "blowup",
        "orbits": bmap.descriptors,
        "masses": [str(m) for m in bmap.masses],
        "basepoint": {"orbit": orbit, "word": G.display_word(word), "t": str(Fraction(t))},
        "tiebreak": [{"orbit": i, "word": G.display_word(w), "t": str(Fraction(s))} for i, w, s in tiebreak],
    }
    return OrderOracle(base, bmap, aux, False, descriptor)


def oracle_from_blowup_descriptor(descriptor: dict) -> OrderOracle:
    bmap = blowup_from_descriptors(descriptor["orbits"], [Fraction(m) for m in descriptor["masses"]])
    bp = descriptor["basepoint"]
    tb = [(int(d["orbit"]), G.parse_word(d["word"]), Fraction(d["t"])) for d in descriptor.get("tiebreak", [])]
    return blowup_oracle(bmap, int(bp["orbit"]), G.parse_word(bp["word"]), Fraction(bp["t"]), tb)


def collapse_oracle(o: OrderOracle) -> OrderOracle:
    """The same order expressed through the standard action.

    Comparisons on a blown-up line agree with comparisons of the collapsed
    points whenever the latter differ, and both tie exactly together, so
    collapsing the basepoint and the tiebreak chain keeps every sign.
    """
    if o.action is STANDARD or isinstance(o.action, type(STANDARD)):
        return o
    c = o.action.collapse
    return OrderOracle(c(o.basepoint), STANDARD, tuple(c(p) for p in o.tiebreak), o.reversed,
                       {"kind": "collapsed", "base": o.descriptor})

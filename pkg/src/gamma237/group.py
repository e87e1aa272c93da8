"""The group Gamma = <a, b, c | a^2 = b^3 = c^7 = abc> acting on the line.

Elements are lifts to the universal cover of PSL(2, R) of matrices in the
(2,3,7) triangle group.  The circle RP^1 is parametrised by
``x -> [cos(pi x) : sin(pi x)]``, so the cover is R -> R/Z and the central
element abc acts as ``x -> x + 1``.

Points of the line are never stored as angles.  A :class:`CoverPoint` keeps an
integer sheet and a projective vector ``(u, v)`` with ``v >= 0`` (and ``u > 0``
when ``v == 0``); its angle coordinate is ``sheet + arg(u + iv)/pi``.  Every
comparison is therefore a sign test on exact algebraic numbers.

Matrix entries live in the tower Q(lam, mu) with ``lam = 2cos(pi/7)`` and
``mu = sqrt(lam^2 - 3)``; see :data:`TOWER`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath

from .numerics import (
    AlgebraicReal,
    NumberTower,
    Surd,
    exact_inverse,
    exact_sign,
)

# lam^3 - lam^2 - 2 lam + 1 = 0, lam = 2cos(pi/7); mu^2 = lam^2 - 3, mu > 0
TOWER = NumberTower([
    ("lam", [1, -2, -1, 1], ("9/5", "181/100")),
    ("mu", [{(0,): 3, (2,): -1}, 0, 1], ("49/100", "1/2")),
])
LAM = TOWER.gen("lam")
MU = TOWER.gen("mu")
ZERO = TOWER.zero()
ONE = TOWER.one()

ALPHABET = "aAbBcC"
INVERSE_LETTER = {"a": "A", "A": "a", "b": "B", "B": "b", "c": "C", "C": "c"}

Exact = Union[int, Fraction, AlgebraicReal, Surd]


class ConstructionFailure(RuntimeError):
    """The generator matrices do not satisfy the defining relations."""


class NotHyperbolic(ValueError):
    pass


class IterationBudgetExceeded(RuntimeError):
    pass


class DepthInsufficient(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------

def reduce_word(word: str) -> str:
    """Freely reduce a word over ``aAbBcC`` (uppercase = inverse)."""
    out: list = []
    for ch in word:
        if ch not in INVERSE_LETTER:
            raise ValueError(f"bad letter {ch!r} in word {word!r}")
        if out and out[-1] == INVERSE_LETTER[ch]:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def invert_word(word: str) -> str:
    return "".join(INVERSE_LETTER[ch] for ch in reversed(word))


def parse_word(text: str) -> str:
    """Accept ``e``/``1``/empty for the identity, ``^-1`` and ``^n`` suffixes."""
    text = text.replace(" ", "").replace("*", "")
    if text in ("", "e", "1", "id"):
        return ""
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        i += 1
        if ch not in INVERSE_LETTER:
            raise ValueError(f"bad letter {ch!r} in {text!r}")
        power = 1
        if i < len(text) and text[i] == "^":
            j = i + 1
            if j < len(text) and text[j] == "-":
                j += 1
            k = j
            while k < len(text) and text[k].isdigit():
                k += 1
            if k == j:
                raise ValueError(f"bad exponent in {text!r}")
            power = int(text[i + 1:k])
            i = k
        letter = ch if power > 0 else INVERSE_LETTER[ch]
        out.append(letter * abs(power))
    return reduce_word("".join(out))


def display_word(word: str) -> str:
    return word or "e"


def shortlex_key(word: str):
    return (len(word), [ALPHABET.index(ch) for ch in word])


# ---------------------------------------------------------------------------
# points of the line
# ---------------------------------------------------------------------------

def _normalize(u: Exact, v: Exact):
    sv = exact_sign(v)
    if sv < 0:
        return -u, -v
    if sv == 0:
        su = exact_sign(u)
        if su == 0:
            raise ValueError("zero vector is not a point of RP^1")
        if su < 0:
            return -u, -v
    return u, v


def _cross(u1, v1, u2, v2) -> int:
    """Sign of u1 v2 - u2 v1; positive iff angle(1) < angle(2) for normalised vectors."""
    return exact_sign(u1 * v2 - u2 * v1)


def _as_float(x) -> float:
    return float(x)


class CoverPoint:
    """A point of R, the universal cover of RP^1 (period 1)."""

    __slots__ = ("sheet", "u", "v", "_key")

    def __init__(self, sheet: int, u: Exact, v: Exact, normalized: bool = False):
        if not normalized:
            u, v = _normalize(u, v)
        self.sheet = sheet
        self.u = u
        self.v = v
        self._key = None

    @classmethod
    def from_slope(cls, slope: Exact, sheet: int = 0) -> "CoverPoint":
        """The line through ``(slope, 1)``; ``slope`` is the cotangent of the angle."""
        return cls(sheet, slope, 1)

    @classmethod
    def origin(cls, sheet: int = 0) -> "CoverPoint":
        return cls(sheet, 1, 0, normalized=True)

    def translate(self, n: int) -> "CoverPoint":
        return CoverPoint(self.sheet + n, self.u, self.v, normalized=True)

    def compare(self, other: "CoverPoint") -> int:
        """-1, 0, +1 for self <, =, > other."""
        if self.sheet != other.sheet:
            return -1 if self.sheet < other.sheet else 1
        c = _cross(self.u, self.v, other.u, other.v)
        return -c

    def same_circle_point(self, other: "CoverPoint") -> bool:
        return _cross(self.u, self.v, other.u, other.v) == 0

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, CoverPoint):
            return NotImplemented
        return self.compare(other) == 0

    def key(self):
        """Canonical hashable form (requires a division for algebraic points)."""
        if self._key is None:
            if exact_sign(self.v) == 0:
                self._key = (self.sheet, "inf")
            else:
                slope = self.u * exact_inverse(self.v)
                k = slope.key() if hasattr(slope, "key") else (
                    slope.normalized_key() if isinstance(slope, Surd) else Fraction(slope))
                self._key = (self.sheet, k)
        return self._key

    def __hash__(self):
        return hash(self.key())

    def circle_key(self):
        return self.key()[1]

    def to_float(self) -> float:
        """Angle coordinate ``sheet + theta/pi`` (display only)."""
        return float(self.to_mpf(53))

    def to_mpf(self, prec: int = 53):
        with mpmath.workprec(prec + 20):
            u = _to_mpf(self.u)
            v = _to_mpf(self.v)
            theta = mpmath.atan2(v, u)
            return self.sheet + theta / mpmath.pi

    def interval_angle(self, prec: int = 64):
        """Certified enclosure of the angle coordinate, as an mpmath interval."""
        if exact_sign(self.v) == 0:
            return mpmath.iv.mpf(self.sheet)
        iv = mpmath.iv
        saved = iv.prec
        iv.prec = prec
        try:
            u = _to_iv(self.u, prec)
            v = _to_iv(self.v, prec)
            return self.sheet + iv.atan2(v, u) / iv.pi
        finally:
            iv.prec = saved

    def to_json(self) -> dict:
        return {"sheet": self.sheet, "u": _exact_json(self.u), "v": _exact_json(self.v),
                "x": self.to_float()}

    def __repr__(self):
        return f"CoverPoint(x~{self.to_float():.6f})"


def _to_mpf(x):
    if isinstance(x, (int, Fraction)):
        q = Fraction(x)
        return mpmath.mpf(q.numerator) / q.denominator
    iv = x.interval(mpmath.mp.prec + 8)
    m = iv.mid
    return mpmath.mpf(m.numerator) / m.denominator


def _to_iv(x, prec):
    if isinstance(x, (int, Fraction)):
        q = Fraction(x)
        return mpmath.iv.mpf(q.numerator) / q.denominator
    iv = x.interval(prec)
    lo = mpmath.iv.mpf(iv.lo.numerator) / iv.lo.denominator
    hi = mpmath.iv.mpf(iv.hi.numerator) / iv.hi.denominator
    return mpmath.iv.mpf([lo.a, hi.b])


def _exact_json(x):
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    return x.to_json()


# ---------------------------------------------------------------------------
# matrices and lifted elements
# ---------------------------------------------------------------------------

Matrix = tuple  # (a, b, c, d) row major, entries AlgebraicReal


def mat_mul(m: Matrix, n: Matrix) -> Matrix:
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def mat_inv(m: Matrix) -> Matrix:
    a, b, c, d = m
    return (d, -b, -c, a)


def mat_normalize(m: Matrix) -> Matrix:
    """Choose the representative of +-m whose first nonzero coordinate is positive."""
    for entry in m:
        for coord in entry.coords:
            if coord:
                return m if coord > 0 else tuple(-x for x in m)
    raise ValueError("zero matrix")


def mat_key(m: Matrix):
    return tuple(x.key() for x in m)


def mat_trace(m: Matrix) -> AlgebraicReal:
    return m[0] + m[3]


def mat_det(m: Matrix) -> AlgebraicReal:
    return m[0] * m[3] - m[1] * m[2]


IDENTITY_MATRIX = mat_normalize((ONE, ZERO, ZERO, ONE))


def mat_is_scalar(m: Matrix) -> bool:
    return m[1].is_zero() and m[2].is_zero() and m[0] == m[3]


def mobius_apply(m: Matrix, p: CoverPoint, sheet: int = 0) -> CoverPoint:
    """Canonical lift of the projective action of ``m`` (sends 0 into [0, 1))."""
    a, b, c, d = m
    u, v = p.u, p.v
    nu, nv = _normalize(a * u + b * v, c * u + d * v)
    if exact_sign(v) == 0:
        # p is at angle 0 of its sheet, so it lands on F(0) in [0, 1)
        return CoverPoint(p.sheet + sheet, nu, nv, normalized=True)
    bu, bv = _normalize(a, c)
    # image lies in [F(0), F(0) + 1); same sheet iff its angle exceeds F(0)'s
    if _cross(bu, bv, nu, nv) > 0:
        return CoverPoint(p.sheet + sheet, nu, nv, normalized=True)
    return CoverPoint(p.sheet + sheet + 1, nu, nv, normalized=True)


_ORIGIN = None


class LiftedElement:
    """An element of Gamma: a normalised matrix, an integer winding, a witness word.

    The map on R is ``x -> F(x) + winding`` where ``F`` is the canonical lift
    of the matrix (the lift with ``F(0)`` in ``[0, 1)``).
    """

    __slots__ = ("matrix", "winding", "word", "_key")

    def __init__(self, matrix: Matrix, winding: int, word: str = "", normalized: bool = False):
        self.matrix = matrix if normalized else mat_normalize(matrix)
        self.winding = winding
        self.word = word
        self._key = None

    def key(self):
        if self._key is None:
            self._key = (self.winding, mat_key(self.matrix))
        return self._key

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        if not isinstance(other, LiftedElement):
            return NotImplemented
        return self.key() == other.key()

    def __call__(self, p: CoverPoint) -> CoverPoint:
        return mobius_apply(self.matrix, p, self.winding)

    def __mul__(self, other: "LiftedElement") -> "LiftedElement":
        return compose(self, other)

    def inverse(self) -> "LiftedElement":
        return invert(self)

    def __pow__(self, n: int) -> "LiftedElement":
        return power(self, n)

    @property
    def trace(self) -> AlgebraicReal:
        return mat_trace(self.matrix)

    def float_matrix(self):
        return [float(x) for x in self.matrix]

    def to_json(self, exact: bool = False) -> dict:
        out = {"word": display_word(self.word), "winding": self.winding}
        if exact:
            out["matrix"] = [x.to_json() for x in self.matrix]
        return out

    def __repr__(self):
        return f"LiftedElement({display_word(self.word)!r}, winding={self.winding})"


def _cocycle(m1: Matrix, m2: Matrix) -> int:
    """Integer ``d`` with ``F1 o F2 = F12 + d`` for canonical lifts."""
    p = mobius_apply(m1, mobius_apply(m2, CoverPoint.origin()))
    return p.sheet


def compose(g: LiftedElement, h: LiftedElement) -> LiftedElement:
    """``g o h`` (apply ``h`` first)."""
    m = mat_mul(g.matrix, h.matrix)
    w = g.winding + h.winding + _cocycle(g.matrix, h.matrix)
    word = reduce_word(g.word + h.word)
    return LiftedElement(m, w, word)


def invert(g: LiftedElement) -> LiftedElement:
    mi = mat_inv(g.matrix)
    w = -g.winding - _cocycle(g.matrix, mi)
    return LiftedElement(mi, w, invert_word(g.word))


def identity() -> LiftedElement:
    return LiftedElement(IDENTITY_MATRIX, 0, "", normalized=True)


def power(g: LiftedElement, n: int) -> LiftedElement:
    if n < 0:
        return power(invert(g), -n)
    result = identity()
    for _ in range(n):
        result = compose(result, g)
    return result


def is_identity(g: LiftedElement) -> bool:
    return g.winding == 0 and mat_is_scalar(g.matrix)


def is_central(g: LiftedElement) -> bool:
    return mat_is_scalar(g.matrix)


def evaluate(g: LiftedElement, x) -> CoverPoint:
    """rho(g)(x) for a :class:`CoverPoint` (or a number read as an angle coordinate).

    Numeric input is converted with :func:`point_from_angle`, which is only
    exact at multiples of 1/2; use cover points for certified work.
    """
    if not isinstance(x, CoverPoint):
        x = point_from_angle(x)
    return g(x)


def point_from_angle(x) -> CoverPoint:
    """Nearest convenient exact point to the angle coordinate ``x``.

    Integer and half-integer ``x`` are exact.  Other values are rounded to a
    rational slope at double precision (display and sampling helper only).
    """
    q = Fraction(x)
    n = math.floor(q)
    frac = q - n
    if frac == 0:
        return CoverPoint.origin(n)
    if frac == Fraction(1, 2):
        return CoverPoint(n, 0, 1)
    theta = float(frac) * math.pi
    slope = Fraction(math.cos(theta) / math.sin(theta)).limit_denominator(10 ** 12)
    return CoverPoint(n, slope, 1)


# ---------------------------------------------------------------------------
# the generators
# ---------------------------------------------------------------------------

HALF = Fraction(1, 2)
MATRIX_A = (ZERO, -ONE, ONE, ZERO)
MATRIX_B = (ONE * HALF, (MU - LAM) * HALF, (LAM + MU) * HALF, ONE * HALF)
MATRIX_C = ((LAM - MU) * HALF, -ONE * HALF, ONE * HALF, (LAM + MU) * HALF)


def check_relations(gens: Sequence[LiftedElement]) -> list:
    """List of failed relations among a^2 = b^3 = c^7 = abc (empty if all hold)."""
    A, B, C = gens
    failures = []
    for name, g in zip("ABC", gens):
        if not mat_det(g.matrix) == ONE:
            failures.append(f"det({name}) != 1")
    abc = compose(compose(A, B), C)
    powers = {"a^2": power(A, 2), "b^3": power(B, 3), "c^7": power(C, 7)}
    for name, g in powers.items():
        if not is_identity(compose(g, invert(abc))):
            failures.append(f"{name} != abc")
    if not (mat_is_scalar(abc.matrix) and abc.winding == 1):
        failures.append("abc is not translation by 1")
    return failures


def _build_generators(matrices=(MATRIX_A, MATRIX_B, MATRIX_C)):
    gens = tuple(LiftedElement(m, 0, w) for m, w in zip(matrices, "abc"))
    failures = check_relations(gens)
    if failures:
        raise ConstructionFailure("; ".join(failures))
    return gens


_GENERATORS = _build_generators()
GENERATORS = {"a": _GENERATORS[0], "b": _GENERATORS[1], "c": _GENERATORS[2]}
GENERATORS.update({INVERSE_LETTER[k]: invert(v) for k, v in list(GENERATORS.items())})
for _k, _v in GENERATORS.items():
    _v.word = _k


def generator_elements():
    """The lifts (A, B, C) of the rotations by pi, 2pi/3, 2pi/7."""
    return _GENERATORS


def central_element() -> LiftedElement:
    """abc, acting as x -> x + 1."""
    A, B, C = _GENERATORS
    t = compose(compose(A, B), C)
    t.word = "abc"
    return t


def element(word: str) -> LiftedElement:
    """The element spelled by ``word`` (see :func:`parse_word`)."""
    word = parse_word(word) if not set(word) <= set(ALPHABET) else reduce_word(word)
    g = identity()
    for ch in word:
        g = compose(g, GENERATORS[ch])
    g.word = word
    return g


def conjugate(g: LiftedElement, h: LiftedElement) -> LiftedElement:
    """``g h g^-1``."""
    return compose(compose(g, h), invert(g))


# ---------------------------------------------------------------------------
# classification, translation numbers, fixed points
# ---------------------------------------------------------------------------

def classify(g: LiftedElement) -> str:
    """'central-power', 'elliptic' or 'hyperbolic' from the exact trace."""
    if mat_is_scalar(g.matrix):
        return "central-power"
    t = g.trace
    s = exact_sign(t * t - 4)
    if s < 0:
        return "elliptic"
    if s > 0:
        return "hyperbolic"
    # |tr| = 2 but not +-I would be parabolic; a cocompact group has none
    raise ConstructionFailure(f"parabolic element {display_word(g.word)}")


def elliptic_order(g: LiftedElement, limit: int = 64) -> int:
    """Order of the image of ``g`` in PSL(2, R)."""
    h = g
    for n in range(1, limit + 1):
        if mat_is_scalar(h.matrix):
            return n
        h = compose(h, g)
    raise IterationBudgetExceeded(f"no power up to {limit} is central")


def translation_number(g: LiftedElement, tol: float = 1e-9, max_iter: int = 1 << 20):
    """Translation number of ``g``.

    Exact for every element of Gamma: central powers read off the winding,
    elliptics use the power identity ``g^n = (abc)^m``, hyperbolics are
    evaluated at a fixed point.  ``tol`` and ``max_iter`` only matter for the
    orbit-averaging fallback, which is not reached for elements of Gamma.
    """
    kind = classify(g)
    if kind == "central-power":
        return Fraction(g.winding)
    if kind == "elliptic":
        n = elliptic_order(g)
        gn = power(g, n)
        return Fraction(gn.winding, n)
    attracting, _ = fixed_points(g)
    p = attracting
    q = g(p)
    if not q.same_circle_point(p):
        raise ConstructionFailure("fixed point computation failed")
    return Fraction(q.sheet - p.sheet)


def translation_number_estimate(g: LiftedElement, tol: float, max_iter: int = 1 << 16):
    """Orbit-average enclosure ``(lo, hi)`` of width < tol, for diagnostics."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = max(1, math.ceil(2 / tol))
    if n > max_iter:
        raise IterationBudgetExceeded(f"{n} iterations needed for tol={tol}")
    x = CoverPoint.origin()
    for _ in range(n):
        x = g(x)
    # |g^n(0)/n - tau| < 1/n, and the angle is known to within [sheet, sheet + 1)
    lo = Fraction(x.sheet - 1, n)
    hi = Fraction(x.sheet + 2, n)
    return lo, hi


@dataclass(frozen=True)
class FixedPoint:
    point: CoverPoint
    kind: str  # 'attracting' or 'repelling'


def _eigen_surd(m: Matrix, sign: int):
    """Eigenvalue ``(t + sign*sqrt(t^2-4))/2`` and an eigenvector, as surds."""
    a, b, c, d = m
    t = a + d
    D = t * t - 4
    half = Fraction(1, 2)
    e = Surd(t * half, ONE * (sign * half), D)
    if not c.is_zero():
        u, v = e - d, Surd(c, ZERO, D)
    elif not b.is_zero():
        u, v = Surd(b, ZERO, D), e - a
    else:
        raise ConstructionFailure("diagonal hyperbolic matrix")
    return e, u, v


def fixed_points(g: LiftedElement):
    """(attracting, repelling) fixed points of the circle map, lifted to sheet 0.

    A fixed line is attracting when its eigenvalue has modulus > 1 (the
    derivative of the projective action there is ``1/eigenvalue^2``).
    """
    if classify(g) != "hyperbolic":
        raise NotHyperbolic(display_word(g.word))
    out = {}
    for sgn in (1, -1):
        e, u, v = _eigen_surd(g.matrix, sgn)
        p = CoverPoint(0, u, v)
        big = exact_sign(e * e - 1) > 0
        out["attracting" if big else "repelling"] = p
    return out["attracting"], out["repelling"]


def fixed_point_derivative(g: LiftedElement, which: str = "attracting"):
    """Certified enclosure of the derivative ``1/e^2`` at a fixed point (eigenvalue ``e``)."""
    t = g.trace
    D = t * t - 4
    half = Fraction(1, 2)
    e1 = Surd(t * half, ONE * half, D)
    e2 = Surd(t * half, -ONE * half, D)
    big = e1 if exact_sign(e1 * e1 - 1) > 0 else e2
    small = e2 if big is e1 else e1
    e = big if which == "attracting" else small
    iv = e.interval(128)
    return (iv * iv).reciprocal()


def derivative_at(g: LiftedElement, p: CoverPoint, prec: int = 128):
    """Certified enclosure of d/dx rho(g) at ``p`` (angle coordinates).

    For ``x -> [M (cos, sin)]`` the derivative is ``1 / |M w|^2`` with ``w`` the
    unit vector at ``p``.
    """
    iv = mpmath.iv
    saved = iv.prec
    iv.prec = prec
    try:
        a, b, c, d = (_to_iv(x, prec) for x in g.matrix)
        u, v = _to_iv(p.u, prec), _to_iv(p.v, prec)
        n2 = u * u + v * v
        nu, nv = a * u + b * v, c * u + d * v
        return n2 / (nu * nu + nv * nv)
    finally:
        iv.prec = saved


# ---------------------------------------------------------------------------
# balls in the Cayley graph
# ---------------------------------------------------------------------------

BALL_CAP = 8
_BALL_CACHE: dict = {}


class Ball:
    """Elements of word length <= n in shortlex order, with exact lookup."""

    def __init__(self, radius: int, elements: list, spheres: list):
        self.radius = radius
        self.elements = elements
        self.spheres = spheres
        self.index = {g.key(): i for i, g in enumerate(elements)}

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: LiftedElement):
        return g.key() in self.index

    def lookup(self, g: LiftedElement) -> Optional[LiftedElement]:
        i = self.index.get(g.key())
        return None if i is None else self.elements[i]

    def without_identity(self) -> list:
        return [g for g in self.elements if g.word]

    def words(self) -> list:
        return [g.word for g in self.elements]


def ball(n: int, cap: int = BALL_CAP) -> Ball:
    """All elements of word length <= n, one shortlex-minimal spelling each.

    Deduplication is exact: elements are keyed by the canonical coordinates
    of their normalised matrix together with the winding.
    """
    if n < 0:
        raise ValueError("radius must be nonnegative")
    if n > cap:
        raise ValueError(f"radius {n} exceeds cap {cap}")
    best = max((r for r in _BALL_CACHE if r <= n), default=None)
    if best is not None and best == n:
        return _BALL_CACHE[n]
    if best is None:
        e = identity()
        elements, spheres = [e], [[e]]
        seen = {e.key()}
        start = 0
    else:
        prev = _BALL_CACHE[best]
        elements = list(prev.elements)
        spheres = [list(s) for s in prev.spheres]
        seen = set(prev.index)
        start = best
    for r in range(start, n):
        new = []
        for g in spheres[r]:
            for ch in ALPHABET:
                if g.word and g.word[-1] == INVERSE_LETTER[ch]:
                    continue
                h = compose(g, GENERATORS[ch])
                h.word = g.word + ch
                k = h.key()
                if k in seen:
                    continue
                seen.add(k)
                new.append(h)
        spheres.append(new)
        elements.extend(new)
        _BALL_CACHE[r + 1] = Ball(r + 1, list(elements), [list(s) for s in spheres])
    if n == 0:
        _BALL_CACHE[0] = Ball(0, elements, spheres)
    return _BALL_CACHE[n]


def iter_shortlex(max_length: int):
    """Yield group elements in shortlex order of their minimal spelling.

    Generates sphere by sphere without storing more than two spheres plus the
    set of keys seen so far, so it can go beyond the cached ball cap.
    """
    e = identity()
    yield e
    seen = {e.key()}
    sphere = [e]
    for _ in range(max_length):
        new = []
        for g in sphere:
            for ch in ALPHABET:
                if g.word and g.word[-1] == INVERSE_LETTER[ch]:
                    continue
                h = compose(g, GENERATORS[ch])
                h.word = g.word + ch
                k = h.key()
                if k in seen:
                    continue
                seen.add(k)
                new.append(h)
                yield h
        sphere = new


# ---------------------------------------------------------------------------
# stabilisers
# ---------------------------------------------------------------------------

@dataclass
class Stabilizer:
    """Result of :func:`point_stabilizer`.

    ``kind`` is 'cyclic' or 'trivial-up-to-depth'.  For the cyclic case
    ``generator`` fixes the lifted point and contracts toward it: points just
    to the left move up, points just to the right move down.
    """

    kind: str
    depth: int
    generator: Optional[LiftedElement] = None
    other_fixed_point: Optional[CoverPoint] = None
    left_motion: Optional[str] = None
    right_motion: Optional[str] = None
    found: list = field(default_factory=list)

    @property
    def is_cyclic(self) -> bool:
        return self.kind == "cyclic"


def fixes(g: LiftedElement, p: CoverPoint) -> bool:
    return g(p).compare(p) == 0


def lift_to_fix(g: LiftedElement, p: CoverPoint) -> LiftedElement:
    """``g (abc)^-m`` where ``g`` fixes the circle point of ``p`` and moves ``p`` by ``m``."""
    q = g(p)
    if not q.same_circle_point(p):
        raise ValueError("element does not fix the circle point")
    m = q.sheet - p.sheet
    if m == 0:
        return g
    t = central_element()
    out = compose(g, power(invert(t), m) if m > 0 else power(t, -m))
    out.word = reduce_word(g.word + ("CBA" * m if m > 0 else "abc" * (-m)))
    return out


def attracts_at(k: LiftedElement, p: CoverPoint) -> bool:
    """Whether ``p``, a fixed circle point of hyperbolic ``k``, is attracting.

    With ``M(u, v) = e(u, v)`` the point attracts iff ``e^2 > 1``; ``e`` is read
    off in the field of ``p`` so no other radicand enters.
    """
    a, b, c, d = k.matrix
    if exact_sign(p.u) != 0:
        num, den = a * p.u + b * p.v, p.u
    else:
        num, den = c * p.u + d * p.v, p.v
    return exact_sign(num * num - den * den) > 0


def _orient_attracting(k: LiftedElement, p: CoverPoint) -> LiftedElement:
    return k if attracts_at(k, p) else invert(k)


def _abs_trace_cmp(g: LiftedElement, h: LiftedElement) -> int:
    tg, th = g.trace, h.trace
    return exact_sign(tg * tg - th * th)


def _cyclic_gcd(elements: list) -> LiftedElement:
    """Generator of the cyclic group spanned by elements ``k^m`` (all ``m > 0``).

    Subtractive Euclid on exponents; exponents are compared through |trace|,
    which grows with the exponent of a hyperbolic element.
    """
    x = elements[0]
    for y in elements[1:]:
        a, b = x, y
        while not is_identity(b):
            if _abs_trace_cmp(a, b) < 0:
                a, b = b, a
            a, b = b, compose(a, invert(b))
        x = a
    return x


def point_stabilizer(p: CoverPoint, search_depth: int = 4, cap: int = BALL_CAP) -> Stabilizer:
    """Stabiliser in Gamma of the lifted point ``p``.

    Searches ball(search_depth) for non-central elements fixing the circle
    point; a hit gives a cyclic stabiliser whose primitive generator is
    extracted with a Euclidean step and oriented to contract toward ``p``.
    No hit is reported honestly as trivial up to the depth searched.
    """
    hits = []
    for g in ball(search_depth, cap):
        if is_central(g):
            continue
        a, b, c, d = g.matrix
        u, v = p.u, p.v
        if _cross(u, v, a * u + b * v, c * u + d * v) == 0:
            hits.append(g)
    if not hits:
        return Stabilizer("trivial-up-to-depth", search_depth)
    lifted = [_orient_attracting(lift_to_fix(g, p), p) for g in hits]
    k = _cyclic_gcd(lifted)
    same = [h for h in lifted if h == k]
    k.word = min((h.word for h in same), key=shortlex_key) if same else reduce_word(k.word)
    _, rep = fixed_points(k)
    return Stabilizer("cyclic", search_depth, generator=k, other_fixed_point=rep,
                      left_motion="up", right_motion="down", found=hits)


def stabilizer_of_fixed_point(k: LiftedElement, which: str = "attracting", sheet: int = 0):
    """Lifted fixed point of hyperbolic ``k`` and the contracting stabiliser element.

    The returned element is a lift of ``k^{+-1}`` fixing the point and
    attracting toward it; it need not be primitive (see
    :func:`point_stabilizer`).
    """
    att, rep = fixed_points(k)
    p = (att if which == "attracting" else rep).translate(sheet)
    g = _orient_attracting(lift_to_fix(k, p), p)
    return p, g

"""Certified real arithmetic for the (2,3,7) computations.

Three layers live here:

* :class:`CertifiedInterval` -- closed intervals with dyadic-rational endpoints,
  rounded outward to a stated number of significant bits.
* :class:`NumberTower` / :class:`AlgebraicReal` -- exact arithmetic in a tower
  of simple extensions of Q with a fixed real embedding.  Zero testing is a
  coordinate check; sign testing encloses the embedding at increasing
  precision until the enclosure excludes zero.
* :class:`Expr` -- a small lazily evaluated expression DAG used by
  :func:`certified_sign` for ad-hoc expressions (square roots included).

Square roots of tower elements that are not in the tower are handled by
:class:`Surd` (``a + b*sqrt(D)``), whose sign is decided exactly from signs
in the base tower.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Sequence, Union

import mpmath

DEFAULT_START_BITS = 64
DEFAULT_MAX_BITS = 4096

Rational = Union[int, Fraction]


class PrecisionExhausted(ArithmeticError):
    """Raised when the precision cap is hit and no exact fallback applies."""


class NumericsConfig:
    """Process-wide precision policy (start bits, doubling, cap)."""

    def __init__(self, start_bits: int = DEFAULT_START_BITS, max_bits: int = DEFAULT_MAX_BITS):
        self.start_bits = start_bits
        self.max_bits = max_bits

    def schedule(self):
        bits = self.start_bits
        while bits < self.max_bits:
            yield bits
            bits *= 2
        yield self.max_bits


config = NumericsConfig()


def set_max_bits(bits: int) -> None:
    if bits < config.start_bits:
        raise ValueError(f"max_bits must be >= {config.start_bits}")
    config.max_bits = bits


# ---------------------------------------------------------------------------
# dyadic rounding and intervals
# ---------------------------------------------------------------------------

def _round(q: Fraction, bits: int, up: bool) -> Fraction:
    """Round ``q`` to ``bits`` significant bits, toward +inf if ``up``."""
    if q == 0:
        return q
    n, d = q.numerator, q.denominator
    # exponent e with 2**e <= |q| < 2**(e+1), up to one off; harmless
    e = abs(n).bit_length() - d.bit_length()
    shift = bits - 1 - e
    if shift >= 0:
        num, den = n << shift, d
    else:
        num, den = n, d << -shift
    f = num // den
    if up and f * den != num:
        f += 1
    return Fraction(f, 1 << shift) if shift >= 0 else Fraction(f << -shift)


class CertifiedInterval:
    """A closed interval ``[lo, hi]`` known to contain some real number.

    Endpoints are exact rationals; arithmetic rounds outward to
    ``precision_bits`` significant bits so the enclosure stays valid.
    ``lo`` and ``hi`` may be infinite (``float('inf')``) only for the
    unbounded interval produced by dividing through zero.
    """

    __slots__ = ("lo", "hi", "precision_bits")

    def __init__(self, lo, hi=None, precision_bits: int = DEFAULT_START_BITS):
        if hi is None:
            hi = lo
        lo = lo if isinstance(lo, float) else Fraction(lo)
        hi = hi if isinstance(hi, float) else Fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        self.precision_bits = precision_bits

    @classmethod
    def point(cls, q: Rational, precision_bits: int = DEFAULT_START_BITS) -> "CertifiedInterval":
        return cls(q, q, precision_bits)

    def _make(self, lo, hi, bits=None) -> "CertifiedInterval":
        bits = bits or self.precision_bits
        if not isinstance(lo, float):
            lo = _round(lo, bits, up=False)
        if not isinstance(hi, float):
            hi = _round(hi, bits, up=True)
        return CertifiedInterval(lo, hi, bits)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, other) -> bool:
        if isinstance(other, CertifiedInterval):
            return self.lo <= other.lo and other.hi <= self.hi
        return self.lo <= other <= self.hi

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0

    def sign(self):
        """-1, 0, +1 if certified, else None."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == 0 and self.hi == 0:
            return 0
        return None

    def intersect(self, other: "CertifiedInterval") -> "CertifiedInterval":
        return CertifiedInterval(max(self.lo, other.lo), min(self.hi, other.hi),
                                 max(self.precision_bits, other.precision_bits))

    def _bits(self, other) -> int:
        if isinstance(other, CertifiedInterval):
            return max(self.precision_bits, other.precision_bits)
        return self.precision_bits

    @staticmethod
    def _coerce(x, bits):
        if isinstance(x, CertifiedInterval):
            return x
        return CertifiedInterval.point(Fraction(x), bits)

    def __add__(self, other):
        bits = self._bits(other)
        o = self._coerce(other, bits)
        return self._make(self.lo + o.lo, self.hi + o.hi, bits)

    __radd__ = __add__

    def __neg__(self):
        return CertifiedInterval(-self.hi, -self.lo, self.precision_bits)

    def __sub__(self, other):
        bits = self._bits(other)
        o = self._coerce(other, bits)
        return self._make(self.lo - o.hi, self.hi - o.lo, bits)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        bits = self._bits(other)
        o = self._coerce(other, bits)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return self._make(min(ps), max(ps), bits)

    __rmul__ = __mul__

    def reciprocal(self) -> "CertifiedInterval":
        if not self.excludes_zero():
            raise ZeroDivisionError("interval contains zero")
        return self._make(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        bits = self._bits(other)
        return self * self._coerce(other, bits).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other, self.precision_bits) * self.reciprocal()

    def __pow__(self, n: int):
        if n < 0:
            return (self ** -n).reciprocal()
        result = CertifiedInterval.point(1, self.precision_bits)
        for _ in range(n):
            result = result * self
        if n % 2 == 0 and self.lo < 0 < self.hi:
            result = CertifiedInterval(0, result.hi, self.precision_bits)
        return result

    def sqrt(self) -> "CertifiedInterval":
        if self.hi < 0:
            raise ValueError("square root of a negative interval")
        bits = self.precision_bits
        lo = _sqrt_bound(max(self.lo, Fraction(0)), bits, up=False)
        hi = _sqrt_bound(self.hi, bits, up=True)
        return CertifiedInterval(lo, hi, bits)

    def refine_to(self, bits: int) -> "CertifiedInterval":
        return refine(self, bits)

    def __repr__(self):
        return f"CertifiedInterval({float(self.lo)!r}, {float(self.hi)!r}, bits={self.precision_bits})"


def _sqrt_bound(q: Fraction, bits: int, up: bool) -> Fraction:
    if q == 0:
        return Fraction(0)
    # scale so the integer square root carries ~bits+2 significant bits
    k = max(0, bits + 4 - (q.numerator.bit_length() - q.denominator.bit_length()) // 2)
    scaled = q * (1 << (2 * k))
    n = scaled.numerator // scaled.denominator
    r = math.isqrt(n)
    if up:
        if r * r * scaled.denominator != scaled.numerator:
            r += 1
        # ceil(sqrt(n)) may still undershoot sqrt(scaled) when scaled > n
        while r * r < scaled:
            r += 1
    return Fraction(r, 1 << k)


def refine(iv: CertifiedInterval, bits: int, value=None) -> CertifiedInterval:
    """Return an enclosure at ``bits`` contained in ``iv``.

    Without a ``value`` (anything with an ``interval(bits)`` method) this can
    only tighten the bookkeeping; with one, the new enclosure of the same
    quantity is intersected with ``iv`` so containment holds by construction.
    """
    if bits <= iv.precision_bits and not iv.is_point():
        raise ValueError("refine needs more bits than the input interval")
    if iv.is_point():
        return CertifiedInterval(iv.lo, iv.hi, bits)
    if value is None:
        return CertifiedInterval(iv.lo, iv.hi, bits)
    fresh = value.interval(bits)
    out = fresh.intersect(iv)
    out.precision_bits = bits
    return out


# ---------------------------------------------------------------------------
# number towers
# ---------------------------------------------------------------------------

def _signed_sum(terms) -> str:
    """Render [(coefficient, monomial), ...] as ``a*x - b*y + c``."""
    text = ""
    for v, mono in terms:
        mag = abs(v)
        body = mono if mono and mag == 1 else f"{mag}*{mono}" if mono else str(mag)
        if not text:
            text = body if v > 0 else "-" + body
        else:
            text += (" + " if v > 0 else " - ") + body
    return text or "0"


class NumberTower:
    """Q(t1)(t2)...(tk) with a power basis and integer structure constants.

    ``steps`` is a list of ``(symbol, minpoly, isolating_interval)``.  The
    minimal polynomial of ``t_j`` is monic over the previous level and given
    by its coefficients lowest degree first, each coefficient being a dict
    ``{exponent_tuple: int}`` over the monomials of the previous level (an
    ``int`` is shorthand for a constant).  ``isolating_interval`` is a pair of
    rationals bracketing the chosen real root with a sign change.

    Irreducibility of each step is the caller's responsibility; the tower
    uses coordinates as a canonical form, so it must genuinely be a field.
    """

    def __init__(self, steps):
        self._steps = list(steps)
        self.symbols = [s[0] for s in steps]
        self.degrees = [len(s[1]) - 1 for s in steps]
        self._minpolys = []
        for level, (_, coeffs, _) in enumerate(steps):
            norm = []
            for c in coeffs:
                if isinstance(c, dict):
                    norm.append({tuple(k) + (0,) * (len(self.degrees) - len(k)): Fraction(v) for k, v in c.items()})
                else:
                    norm.append({(0,) * len(self.degrees): Fraction(c)})
            if norm[-1] != {(0,) * len(self.degrees): 1}:
                raise ValueError(f"minimal polynomial of {self.symbols[level]} must be monic")
            self._minpolys.append(norm)
        self._brackets = [tuple(map(Fraction, s[2])) for s in steps]
        self.basis = list(product(*[range(d) for d in self.degrees]))
        # lexicographic with the first generator varying slowest
        self.index = {m: i for i, m in enumerate(self.basis)}
        self.dim = len(self.basis)
        self._table = self._structure_constants()
        self._mul_coords = self._compile_mul()
        self._enclosures = {}
        self._lock = threading.Lock()

    def describe(self) -> list:
        """One entry per adjoined element: symbol, minimal polynomial and isolating interval."""
        out = []
        for level, (symbol, coeffs, (lo, hi)) in enumerate(self._steps):
            terms = []
            for j, c in reversed(list(enumerate(coeffs))):
                power = "" if j == 0 else symbol if j == 1 else f"{symbol}^{j}"
                inner = self._coeff_terms(c, level)
                if len(inner) > 1 and power:
                    terms.append((1, f"({_signed_sum(inner)})*{power}"))
                else:
                    terms += [(v, "*".join(x for x in (m, power) if x)) for v, m in inner]
            out.append({"symbol": symbol, "minimal_polynomial": _signed_sum(terms) + " = 0",
                        "interval": [str(Fraction(lo)), str(Fraction(hi))]})
        return out

    def _coeff_terms(self, c, level: int) -> list:
        if not isinstance(c, dict):
            return [(Fraction(c), "")] if c else []
        terms = []
        for mono, v in sorted(c.items(), key=lambda kv: sum(kv[0]), reverse=True):
            factors = [f"{self.symbols[i]}^{e}" if e > 1 else self.symbols[i]
                       for i, e in enumerate(mono[:level]) if e]
            if v:
                terms.append((Fraction(v), "*".join(factors)))
        return terms

    def __repr__(self) -> str:
        return "NumberTower(" + "; ".join(d["minimal_polynomial"] for d in self.describe()) + ")"

    # -- symbolic reduction, used once to build the table -------------------
    def _reduce(self, poly: dict) -> dict:
        out: dict = {}
        work = dict(poly)
        while work:
            mono, coef = work.popitem()
            if coef == 0:
                continue
            top = next((j for j in range(len(mono) - 1, -1, -1) if mono[j] >= self.degrees[j]), None)
            if top is None:
                out[mono] = out.get(mono, 0) + coef
                continue
            d = self.degrees[top]
            base = list(mono)
            base[top] -= d
            # t^d = -sum_{j<d} c_j t^j
            for j, cj in enumerate(self._minpolys[top][:-1]):
                for cm, cv in cj.items():
                    m = [a + b for a, b in zip(base, cm)]
                    m[top] += j
                    m = tuple(m)
                    work[m] = work.get(m, 0) - coef * cv
        return {m: c for m, c in out.items() if c != 0}

    def _structure_constants(self):
        table = []
        for i, mi in enumerate(self.basis):
            for j, mj in enumerate(self.basis):
                prod_mono = tuple(a + b for a, b in zip(mi, mj))
                reduced = self._reduce({prod_mono: Fraction(1)})
                for m, c in reduced.items():
                    if c.denominator != 1:
                        raise ValueError("structure constants must be integral")
                    table.append((i, j, self.index[m], int(c)))
        by_pair: dict = {}
        for i, j, k, c in table:
            by_pair.setdefault((i, j), []).append((k, c))
        return [(i, j, tuple(by_pair[(i, j)])) for (i, j) in sorted(by_pair)]

    # -- elements -----------------------------------------------------------
    def element(self, coords: Sequence[Rational]) -> "AlgebraicReal":
        coords = [Fraction(c) for c in coords]
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in coords), 1)
        return AlgebraicReal(self, tuple(int(c * den) for c in coords), den)

    def rational(self, q: Rational) -> "AlgebraicReal":
        q = Fraction(q)
        return AlgebraicReal(self, (q.numerator,) + (0,) * (self.dim - 1), q.denominator)

    def gen(self, symbol: str) -> "AlgebraicReal":
        level = self.symbols.index(symbol)
        mono = tuple(1 if j == level else 0 for j in range(len(self.degrees)))
        if self.degrees[level] == 1:
            raise ValueError("degree-one step has no generator in the basis")
        coords = [0] * self.dim
        coords[self.index[mono]] = 1
        return AlgebraicReal(self, tuple(coords), 1)

    def zero(self) -> "AlgebraicReal":
        return AlgebraicReal(self, (0,) * self.dim, 1)

    def one(self) -> "AlgebraicReal":
        return self.rational(1)

    def descriptor(self) -> list:
        """Human readable list of adjoined elements and minimal polynomials."""
        out = []
        for sym, poly, bracket in zip(self.symbols, self._minpolys, self._brackets):
            terms = []
            for j, c in enumerate(poly):
                cs = " + ".join(f"{v}*{self._mono_name(m)}" for m, v in c.items() if v) or "0"
                terms.append(f"({cs})*{sym}^{j}")
            out.append({"symbol": sym, "minimal_polynomial": " + ".join(terms),
                        "root_bracket": [str(bracket[0]), str(bracket[1])]})
        return out

    def _mono_name(self, m) -> str:
        parts = [f"{s}^{e}" for s, e in zip(self.symbols, m) if e]
        return "*".join(parts) or "1"

    def basis_names(self) -> list:
        return [self._mono_name(m) for m in self.basis]

    # -- multiplication kernel ----------------------------------------------
    def _compile_mul(self):
        """Straight-line product of coordinate vectors from the structure constants."""
        acc = [[] for _ in range(self.dim)]
        for i, j, terms in self._table:
            for k, c in terms:
                acc[k].append(f"{c}*a{i}*b{j}" if c != 1 else f"a{i}*b{j}")
        names_a = ", ".join(f"a{i}" for i in range(self.dim))
        names_b = ", ".join(f"b{i}" for i in range(self.dim))
        body = ", ".join("(" + (" + ".join(t) or "0") + ")" for t in acc)
        src = f"def _mul(a, b):\n    {names_a}, = a\n    {names_b}, = b\n    return ({body},)\n"
        scope: dict = {}
        exec(compile(src, "<tower-mul>", "exec"), scope)
        return scope["_mul"]

    # -- enclosures -----------------------------------------------------------
    def _poly_interval(self, level: int, t: Fraction, lower, bits: int) -> CertifiedInterval:
        """Minimal polynomial of level ``level`` at ``t``; lower generators as intervals."""
        acc = CertifiedInterval.point(0, bits)
        tp = Fraction(1)
        for c in self._minpolys[level]:
            coef = CertifiedInterval.point(0, bits)
            for m, v in c.items():
                term = CertifiedInterval.point(v, bits)
                for g, e in enumerate(m[:level]):
                    if e:
                        term = term * lower[g] ** e
                coef = coef + term
            acc = acc + coef * tp
            tp *= t
        return acc

    def _newton(self, level: int, lower, bits: int) -> Fraction:
        """High precision approximation of the chosen root (not certified)."""
        lo, hi = self._brackets[level]
        with mpmath.workprec(bits + 32):
            mids = [mpmath.mpf(iv.mid.numerator) / iv.mid.denominator for iv in lower]
            coeffs = []
            for c in self._minpolys[level]:
                total = mpmath.mpf(0)
                for m, v in c.items():
                    term = mpmath.mpf(v.numerator) / v.denominator
                    for g, e in enumerate(m[:level]):
                        if e:
                            term *= mids[g] ** e
                    total += term
                coeffs.append(total)
            x = (mpmath.mpf(lo.numerator) / lo.denominator + mpmath.mpf(hi.numerator) / hi.denominator) / 2
            for _ in range(4 * (bits.bit_length() + 8)):
                f = mpmath.mpf(0)
                df = mpmath.mpf(0)
                for c in reversed(coeffs):
                    df = df * x + f
                    f = f * x + c
                if df == 0:
                    break
                step = f / df
                x -= step
                if step == 0 or abs(step) < mpmath.ldexp(1, -(bits + 24)):
                    break
            man, exp = mpmath.mpf(x).man_exp
            return Fraction(man) * (Fraction(2) ** exp)

    def _generator_enclosures(self, bits: int):
        """Intervals of width <= 2**-bits around each generator's real value.

        A Newton approximation is certified by a sign change of the minimal
        polynomial, evaluated in interval arithmetic.  Lower levels are
        enclosed more tightly so that they never mask the sign change.
        """
        k = len(self.degrees)
        encl = []
        for level in range(k):
            lo, hi = self._brackets[level]
            slo = self._poly_interval(level, lo, encl, 64 + bits).sign()
            shi = self._poly_interval(level, hi, encl, 64 + bits).sign()
            if slo is None or shi is None or slo == shi or slo == 0:
                raise ValueError(f"bad isolating interval for {self.symbols[level]}")
            tight = bits + 16 * (k - level)
            x = self._newton(level, encl, tight + 16)
            for extra in range(0, tight, 4):
                delta = Fraction(1, 1 << (tight + 1 - extra))
                a, b = max(lo, x - delta), min(hi, x + delta)
                sa = self._poly_interval(level, a, encl, tight + 64).sign()
                sb = self._poly_interval(level, b, encl, tight + 64).sign()
                if sa == slo and sb == shi:
                    break
            else:
                raise PrecisionExhausted(f"could not certify {self.symbols[level]}")
            encl.append(CertifiedInterval(a, b, tight))
        return encl

    def basis_enclosures(self, bits: int):
        """Integer pairs ``(L, H)`` with ``L <= 2**bits * b_i <= H`` for each basis element."""
        cached = self._enclosures.get(bits)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._enclosures.get(bits)
            if cached is not None:
                return cached
            gens = self._generator_enclosures(bits + 16)
            scale = 1 << bits
            out = []
            for mono in self.basis:
                iv = CertifiedInterval.point(1, bits + 16)
                for g, e in enumerate(mono):
                    if e:
                        iv = iv * gens[g] ** e
                lo = math.floor(iv.lo * scale)
                hi = math.ceil(iv.hi * scale)
                out.append((lo, hi))
            out = tuple(out)
            self._enclosures[bits] = out
            return out


class AlgebraicReal:
    """Exact element ``sum(coords[i] * basis[i]) / den`` of a :class:`NumberTower`."""

    __slots__ = ("tower", "coords", "den", "_hash")

    def __init__(self, tower: NumberTower, coords, den: int = 1):
        if den < 0:
            coords = tuple(-c for c in coords)
            den = -den
        g = math.gcd(den, *coords)
        if g > 1:
            coords = tuple(c // g for c in coords)
            den //= g
        self.tower = tower
        self.coords = tuple(coords)
        self.den = den
        self._hash = None

    # -- coercion ---------------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, AlgebraicReal):
            return other
        if isinstance(other, (int, Fraction)):
            return self.tower.rational(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational element")
        return Fraction(self.coords[0], self.den)

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        d1, d2 = self.den, other.den
        return AlgebraicReal(self.tower, tuple(a * d2 + b * d1 for a, b in zip(self.coords, other.coords)), d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicReal(self.tower, tuple(-c for c in self.coords), self.den)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return AlgebraicReal(self.tower, tuple(c * q.numerator for c in self.coords), self.den * q.denominator)
        if not isinstance(other, AlgebraicReal):
            return NotImplemented
        return AlgebraicReal(self.tower, self.tower._mul_coords(self.coords, other.coords), self.den * other.den)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** -n
        result = self.tower.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "AlgebraicReal":
        """Solve ``self * y = 1`` by exact Gaussian elimination."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.tower.dim
        cols = []
        for j in range(n):
            e = [0] * n
            e[j] = 1
            cols.append(self.tower._mul_coords(self.coords, e))
        m = [[Fraction(cols[j][i], self.den) for j in range(n)] + [Fraction(int(i == 0))] for i in range(n)]
        for c in range(n):
            piv = next(r for r in range(c, n) if m[r][c] != 0)
            m[c], m[piv] = m[piv], m[c]
            inv = 1 / m[c][c]
            m[c] = [v * inv for v in m[c]]
            for r in range(n):
                if r != c and m[r][c] != 0:
                    f = m[r][c]
                    m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        return self.tower.element([m[i][n] for i in range(n)])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    # -- ordering ---------------------------------------------------------------
    def interval(self, bits: int) -> CertifiedInterval:
        enc = self.tower.basis_enclosures(bits)
        lo = hi = 0
        for c, (bl, bh) in zip(self.coords, enc):
            if c > 0:
                lo += c * bl
                hi += c * bh
            elif c < 0:
                lo += c * bh
                hi += c * bl
        scale = self.den << bits
        return CertifiedInterval(Fraction(lo, scale), Fraction(hi, scale), bits)

    def sign(self) -> int:
        if self.is_zero():
            return 0
        if self.is_rational():
            return 1 if self.coords[0] > 0 else -1
        for bits in config.schedule():
            enc = self.tower.basis_enclosures(bits)
            lo = hi = 0
            for c, (bl, bh) in zip(self.coords, enc):
                if c > 0:
                    lo += c * bl
                    hi += c * bh
                elif c < 0:
                    lo += c * bh
                    hi += c * bl
            if lo > 0:
                return 1
            if hi < 0:
                return -1
        raise PrecisionExhausted(f"could not certify sign of nonzero element within {config.max_bits} bits")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.tower.rational(other)
        if not isinstance(other, AlgebraicReal):
            return NotImplemented
        return self.coords == other.coords and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.coords, self.den))
        return self._hash

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __float__(self):
        iv = self.interval(64)
        return float(iv.mid)

    def key(self):
        return (self.coords, self.den)

    def to_json(self) -> dict:
        return {"coords": [str(Fraction(c, self.den)) for c in self.coords],
                "basis": self.tower.basis_names()}

    def __repr__(self):
        terms = [f"{Fraction(c, self.den)}*{n}" for c, n in zip(self.coords, self.tower.basis_names()) if c]
        return "AlgebraicReal(" + (" + ".join(terms) or "0") + ")"


def _radicands(x) -> tuple:
    return x._sig if isinstance(x, Surd) else ()


def _expand(x) -> dict:
    """``x`` as ``{frozenset(radicand keys): base coefficient}``."""
    if not isinstance(x, Surd):
        return {frozenset(): x}
    out = dict(_expand(x.a))
    dk = x.D.key()
    for k, v in _expand(x.b).items():
        out[k | {dk}] = v
    return out


def _rebuild(terms: dict, sig: tuple):
    if not sig:
        if set(terms) - {frozenset()}:
            raise ValueError("element has radicands outside the target field")
        return terms.get(frozenset(), Fraction(0))
    D = sig[-1]
    dk = D.key()
    lower = {k: v for k, v in terms.items() if dk not in k}
    upper = {k - {dk}: v for k, v in terms.items() if dk in k}
    return Surd(_rebuild(lower, sig[:-1]), _rebuild(upper, sig[:-1]), D)


def _embed(x, sig: tuple):
    if _radicands(x) == sig:
        return x
    return _rebuild(_expand(x), sig)


def _common(x, y):
    sx, sy = _radicands(x), _radicands(y)
    if [d.key() for d in sx] == [d.key() for d in sy]:
        return x, y
    keys = {d.key() for d in sx}
    sig = sx + tuple(d for d in sy if d.key() not in keys)
    return _embed(x, sig), _embed(y, sig)


class Surd:
    """``a + b*sqrt(D)`` with ``D > 0`` in the base tower and ``a, b`` one level down.

    Levels nest, so an element may involve several square roots (needed when
    fixed points of different hyperbolic elements meet).  ``sqrt(D)`` is the
    positive root.  Signs are decided exactly from signs one level down, so
    no independence of the radicands is assumed.
    """

    __slots__ = ("a", "b", "D", "_sig")

    def __init__(self, a, b, D: AlgebraicReal):
        self.a = a
        self.b = b
        self.D = D
        self._sig = _radicands(a) + (D,)

    @classmethod
    def make(cls, a, b, D: AlgebraicReal) -> "Surd":
        a, b = _common(a, b)
        return cls(a, b, D)

    def _pair(self, other):
        if not isinstance(other, (Surd, AlgebraicReal, int, Fraction)):
            return None
        x, y = _common(self, other)
        return x, y

    def __add__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return Surd(x.a + y.a, x.b + y.b, x.D)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.D)

    def __sub__(self, other):
        if not isinstance(other, (Surd, AlgebraicReal, int, Fraction)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._pair(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        if exact_sign(y.b) == 0:
            return Surd(x.a * y.a, x.b * y.a, x.D)
        return Surd(x.a * y.a + x.b * y.b * x.D, x.a * y.b + x.b * y.a, x.D)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.sign() == 0

    def sign(self) -> int:
        sa, sb = exact_sign(self.a), exact_sign(self.b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 D
        diff = exact_sign(self.a * self.a - self.b * self.b * self.D)
        if diff == 0:
            return 0
        return sa if diff > 0 else sb

    def interval(self, bits: int) -> CertifiedInterval:
        return exact_interval(self.a, bits) + exact_interval(self.b, bits) * self.D.interval(bits).sqrt()

    def normalized_key(self):
        items = []
        for k, v in _expand(self).items():
            if exact_sign(v) != 0:
                vk = v.key() if isinstance(v, AlgebraicReal) else Fraction(v)
                items.append((tuple(sorted(k)), vk))
        return ("surd", tuple(sorted(items, key=repr)))

    def __eq__(self, other):
        if not isinstance(other, (Surd, AlgebraicReal, int, Fraction)):
            return NotImplemented
        return exact_sign(self - other) == 0

    def __hash__(self):
        return hash(self.normalized_key())

    def __float__(self):
        return float(self.interval(64).mid)

    def to_json(self) -> dict:
        return {"a": _json(self.a), "b": _json(self.b), "radicand": self.D.to_json()}

    def __repr__(self):
        return f"Surd({self.a!r} + {self.b!r}*sqrt({self.D!r}))"


def _json(x):
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    return x.to_json()


def exact_sign(x) -> int:
    """Sign of an exact value (int, Fraction, AlgebraicReal, Surd)."""
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    return x.sign()


def exact_inverse(x):
    """Inverse in the same exact domain; surds rationalise the denominator."""
    if isinstance(x, Surd):
        norm = x.a * x.a - x.b * x.b * x.D
        if exact_sign(norm) == 0:
            raise ZeroDivisionError("surd inverse of zero")
        ni = exact_inverse(norm)
        return Surd.make(x.a * ni, -(x.b * ni), x.D)
    if isinstance(x, AlgebraicReal):
        return x.inverse()
    return 1 / Fraction(x)


def exact_interval(x, bits: int) -> CertifiedInterval:
    if isinstance(x, (int, Fraction)):
        return CertifiedInterval.point(x, bits)
    return x.interval(bits)


# ---------------------------------------------------------------------------
# lazy expressions
# ---------------------------------------------------------------------------

class Expr:
    """Node of a lazily evaluated real expression.

    ``interval(bits)`` is memoised per precision level; ``exact()`` returns an
    exact value (rational, :class:`AlgebraicReal`) when one exists and None
    otherwise.
    """

    def __init__(self):
        self._cache: dict = {}
        self._exact_done = False
        self._exact = None

    def interval(self, bits: int) -> CertifiedInterval:
        iv = self._cache.get(bits)
        if iv is None:
            iv = self._eval(bits)
            self._cache[bits] = iv
        return iv

    def exact(self):
        if not self._exact_done:
            self._exact = self._exact_value()
            self._exact_done = True
        return self._exact

    def _eval(self, bits):
        raise NotImplementedError

    def _exact_value(self):
        return None

    @staticmethod
    def wrap(x) -> "Expr":
        if isinstance(x, Expr):
            return x
        if isinstance(x, float):
            x = Fraction(x)
        return Const(x)

    def __add__(self, other):
        return Add(self, Expr.wrap(other))

    def __radd__(self, other):
        return Add(Expr.wrap(other), self)

    def __sub__(self, other):
        return Add(self, Neg(Expr.wrap(other)))

    def __rsub__(self, other):
        return Add(Expr.wrap(other), Neg(self))

    def __mul__(self, other):
        return Mul(self, Expr.wrap(other))

    def __rmul__(self, other):
        return Mul(Expr.wrap(other), self)

    def __truediv__(self, other):
        return Mul(self, Inv(Expr.wrap(other)))

    def __rtruediv__(self, other):
        return Mul(Expr.wrap(other), Inv(self))

    def __neg__(self):
        return Neg(self)

    def __pow__(self, n: int):
        return Pow(self, n)


class Const(Expr):
    def __init__(self, value):
        super().__init__()
        self.value = value

    def _eval(self, bits):
        return exact_interval(self.value, bits)

    def _exact_value(self):
        if isinstance(self.value, Surd):
            return None
        return self.value


class Add(Expr):
    def __init__(self, x, y):
        super().__init__()
        self.x, self.y = x, y

    def _eval(self, bits):
        return self.x.interval(bits) + self.y.interval(bits)

    def _exact_value(self):
        a, b = self.x.exact(), self.y.exact()
        if a is None or b is None:
            return None
        return _exact_op(a, b, lambda u, v: u + v)


class Mul(Expr):
    def __init__(self, x, y):
        super().__init__()
        self.x, self.y = x, y

    def _eval(self, bits):
        return self.x.interval(bits) * self.y.interval(bits)

    def _exact_value(self):
        a, b = self.x.exact(), self.y.exact()
        if a is None or b is None:
            return None
        return _exact_op(a, b, lambda u, v: u * v)


class Neg(Expr):
    def __init__(self, x):
        super().__init__()
        self.x = x

    def _eval(self, bits):
        return -self.x.interval(bits)

    def _exact_value(self):
        a = self.x.exact()
        return None if a is None else -a


class Inv(Expr):
    def __init__(self, x):
        super().__init__()
        self.x = x

    def _eval(self, bits):
        return self.x.interval(bits).reciprocal()

    def _exact_value(self):
        a = self.x.exact()
        if a is None or exact_sign(a) == 0:
            return None
        return exact_inverse(a)


class Pow(Expr):
    def __init__(self, x, n: int):
        super().__init__()
        self.x, self.n = x, n

    def _eval(self, bits):
        return self.x.interval(bits) ** self.n

    def _exact_value(self):
        a = self.x.exact()
        return None if a is None else a ** self.n


class Sqrt(Expr):
    """Square root of a certified-nonnegative expression."""

    def __init__(self, x):
        super().__init__()
        self.x = Expr.wrap(x)

    def _eval(self, bits):
        return self.x.interval(bits).sqrt()

    def _exact_value(self):
        a = self.x.exact()
        if a is None:
            return None
        if isinstance(a, AlgebraicReal) and a.is_rational():
            a = a.as_fraction()
        if isinstance(a, (int, Fraction)):
            q = Fraction(a)
            if q < 0:
                return None
            rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
            if rn * rn == q.numerator and rd * rd == q.denominator:
                return Fraction(rn, rd)
            return None
        tower = a.tower
        for level, sym in enumerate(tower.symbols):
            poly = tower._minpolys[level]
            if len(poly) != 3 or any(poly[1].values()) or tower._brackets[level][0] < 0:
                continue
            # t^2 + c0 = 0 with t > 0, so t = sqrt(-c0)
            coords = [Fraction(0)] * tower.dim
            for m, v in poly[0].items():
                coords[tower.index[m]] -= v
            if tower.element(coords) == a:
                return tower.gen(sym)
        return None


def _exact_op(a, b, op):
    if isinstance(a, AlgebraicReal) and isinstance(b, AlgebraicReal) and a.tower is not b.tower:
        return None
    return op(a, b)


def certified_sign(x) -> int:
    """Sign of a real expression: -1, 0 or +1.

    Nonzero answers come from an interval that excludes zero; zero is only
    returned when the expression has an exact value that is zero.
    """
    if not isinstance(x, Expr):
        if isinstance(x, (int, Fraction, AlgebraicReal, Surd)):
            return exact_sign(x)
        x = Expr.wrap(x)
    for bits in config.schedule():
        iv = x.interval(bits)
        s = iv.sign()
        if s:
            return s
        if s == 0:
            # [0, 0] only arises from exact rational operations
            return 0
    exact = x.exact()
    if exact is not None:
        return exact_sign(exact)
    raise PrecisionExhausted(f"no certification within {config.max_bits} bits and no exact form")

"""Arithmetic codings: p-adic valuations, Cantor-style pairing, enumerated bases.

Neighbourhood indices are zero-based at the API boundary: ``decode_nbhd(space, i)``
is the basic set the formulas describe for ``n = i + 1``. Products are
left-nested, so ``(Real, Real, Nat)`` means ``(R x R) x N``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import count
from typing import Sequence, Union

FACTORS = ("Nat", "Baire", "Real", "ExtReal")

INF = math.inf


class ZeroArgument(ValueError):
    pass


class NotInImage(ValueError):
    pass


class IncompatibleSpaces(ValueError):
    pass


# valuations ---------------------------------------------------------------------
def padic_valuation(p: int, n: int) -> int:
    """Largest e with p**e dividing n."""
    if n == 0:
        raise ZeroArgument("valuation of 0 is undefined")
    n = abs(n)
    if p == 2:
        return (n & -n).bit_length() - 1
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


@lru_cache(maxsize=None)
def nth_prime(k: int) -> int:
    """p_0 = 2, p_1 = 3, ..."""
    found = -1
    for c in count(2):
        if all(c % q for q in range(2, math.isqrt(c) + 1)):
            found += 1
            if found == k:
                return c
    raise AssertionError


# pairing ------------------------------------------------------------------------
def pair2(x: int, y: int) -> int:
    """(x+y)(x+y+1) + 2y: injective, image = even naturals."""
    if x < 0 or y < 0:
        raise ValueError("pairing is defined on naturals")
    s = x + y
    return s * (s + 1) + 2 * y


def unpair2(v: int) -> tuple[int, int]:
    if v < 0 or v % 2:
        raise NotInImage(v)
    s = (math.isqrt(4 * v + 1) - 1) // 2
    y2 = v - s * (s + 1)
    y = y2 // 2
    if y > s:
        raise NotInImage(v)
    return s - y, y


def pairN(xs: Sequence[int]) -> int:
    """J_n(x1..xn) = J_2(J_{n-1}(x1..x_{n-1}), xn)."""
    if len(xs) < 2:
        raise ValueError("pairN needs at least two arguments")
    acc = pair2(xs[0], xs[1])
    for x in xs[2:]:
        acc = pair2(acc, x)
    return acc


def unpairN(v: int, n: int) -> tuple[int, ...]:
    if n < 2:
        raise ValueError("unpairN needs n >= 2")
    tail = []
    for _ in range(n - 2):
        v, last = unpair2(v)
        tail.append(last)
    a, b = unpair2(v)
    return (a, b) + tuple(reversed(tail))


def cantor_unpair(m: int) -> tuple[int, int]:
    """Inverse of the classical bijection (x+y)(x+y+1)/2 + y."""
    return unpair2(2 * m)


# spaces and codes -------------------------------------------------------------------
@dataclass(frozen=True)
class SpaceCode:
    factors: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("empty space")
        for f in self.factors:
            if f not in FACTORS:
                raise ValueError(f"unknown factor {f!r}")

    @classmethod
    def parse(cls, text: str) -> "SpaceCode":
        # factor names start with a capital, so "x" before one is a separator
        return cls(tuple(t.strip() for t in re.split(r"x(?=[A-Z])|\*|×", text) if t.strip()))

    @classmethod
    def reals_times_nat(cls, a: int) -> "SpaceCode":
        return cls(("Real",) * a + ("Nat",))

    def __len__(self):
        return len(self.factors)

    def __str__(self):
        return "x".join(self.factors)


@dataclass(frozen=True)
class ProductIndex:
    """Index i of N(X x Y, i) with i + 1 = 2**left * 3**right, kept factored."""

    left: "Index"
    right: "Index"


Index = Union[int, ProductIndex]

_COLLAPSE = 4096


def product_index(left: Index, right: Index) -> Index:
    if isinstance(left, int) and isinstance(right, int) and left <= _COLLAPSE and right <= _COLLAPSE:
        return 2**left * 3**right - 1
    return ProductIndex(left, right)


def split_index(i: Index) -> tuple[Index, Index]:
    if isinstance(i, ProductIndex):
        return i.left, i.right
    n = i + 1
    return padic_valuation(2, n), padic_valuation(3, n)


@dataclass(frozen=True)
class NbhdCode:
    space: SpaceCode
    index: Index


# regions ----------------------------------------------------------------------------
@dataclass(frozen=True)
class Point:
    value: int

    def contains(self, x) -> bool:
        return x == self.value

    def to_json(self):
        return {"type": "point", "value": self.value}


@dataclass(frozen=True)
class Cylinder:
    prefix: tuple[int, ...]

    def contains(self, seq) -> bool:
        seq = tuple(seq)
        if len(seq) < len(self.prefix):
            raise ValueError("sequence prefix too short to decide membership")
        return seq[: len(self.prefix)] == self.prefix

    def to_json(self):
        return {"type": "cylinder", "prefix": list(self.prefix)}


@dataclass(frozen=True)
class Interval:
    """Open interval (lo, hi) with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def contains(self, x) -> bool:
        return self.lo < x < self.hi

    def to_json(self):
        return {"type": "interval", "lo": str(self.lo), "hi": str(self.hi)}


@dataclass(frozen=True)
class UpperTail:
    """(bound, +inf] in the extended reals."""

    bound: int

    def contains(self, x) -> bool:
        return x > self.bound

    def to_json(self):
        return {"type": "upper", "from": str(self.bound)}


@dataclass(frozen=True)
class LowerTail:
    """[-inf, -bound) in the extended reals."""

    bound: int

    def contains(self, x) -> bool:
        return x < -self.bound

    def to_json(self):
        return {"type": "lower", "to": str(-self.bound)}


Part = Union[Point, Cylinder, Interval, UpperTail, LowerTail]


@dataclass(frozen=True)
class Region:
    space: SpaceCode
    parts: tuple[Part, ...]

    def contains(self, point: Sequence) -> bool:
        if len(point) != len(self.parts):
            raise IncompatibleSpaces("point dimension does not match region")
        return all(part.contains(x) for part, x in zip(self.parts, point))

    def to_json(self) -> dict:
        return {"space": str(self.space), "parts": [p.to_json() for p in self.parts]}


def _decode_factor(tag: str, i: int) -> Part:
    if not isinstance(i, int):
        raise ValueError(f"factored index cannot address a {tag} factor")
    if i < 0:
        raise ValueError("negative index")
    if tag == "Nat":
        return Point(i)
    n = i + 1
    if tag == "Baire":
        length = padic_valuation(2, n)
        return Cylinder(tuple(padic_valuation(nth_prime(j + 1), n) for j in range(length)))
    if tag == "Real":
        v2, v3, v5, v7 = (padic_valuation(p, n) for p in (2, 3, 5, 7))
        return Interval(Fraction(v3 - v5, 1 + v2), Fraction(v3 - v5 + v7 + 1, 1 + v2))
    if tag == "ExtReal":
        q, r = divmod(i, 3)
        if r == 0:
            return _decode_factor("Real", q)
        if r == 1:
            return UpperTail(q)
        return LowerTail(q)
    raise ValueError(tag)


def decode_nbhd(code: NbhdCode | SpaceCode, index: Index | None = None) -> Region:
    """Exact basic region for a zero-based index."""
    if isinstance(code, SpaceCode):
        space, idx = code, index
    else:
        space, idx = code.space, code.index
    parts: list[Part] = []

    def walk(factors: tuple[str, ...], i: Index):
        if len(factors) == 1:
            parts.append(_decode_factor(factors[0], i))
            return
        left, right = split_index(i)
        walk(factors[:-1], left)
        parts.append(_decode_factor(factors[-1], right))

    walk(space.factors, idx)
    return Region(space, tuple(parts))


# encoding ---------------------------------------------------------------------------
def encode_interval(a, b) -> int:
    """Zero-based index i with decode(Real, i) == (a, b)."""
    a, b = Fraction(a), Fraction(b)
    if not a < b:
        raise ValueError("need a < b")
    d = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    ad = int(a * d)
    width = int((b - a) * d)
    n = 2 ** (d - 1) * 3 ** max(ad, 0) * 5 ** max(-ad, 0) * 7 ** (width - 1)
    return n - 1


def encode_point(m: int) -> int:
    return m


def encode_product(indices: Sequence[Index]) -> Index:
    """Left-nested product index from per-factor indices."""
    acc = indices[0]
    for nxt in indices[1:]:
        acc = product_index(acc, nxt)
    return acc


def encode_box(intervals: Sequence[tuple], section: int | None = None) -> NbhdCode:
    """Code for a rational box, optionally times the singleton {section} in N."""
    idx = [encode_interval(a, b) for a, b in intervals]
    factors = ("Real",) * len(idx)
    if section is not None:
        idx.append(section)
        factors += ("Nat",)
    return NbhdCode(SpaceCode(factors), encode_product(idx))


# decisions --------------------------------------------------------------------------
def _part_subset(p: Part, q: Part) -> bool:
    if isinstance(p, Point):
        return isinstance(q, Point) and p.value == q.value
    if isinstance(p, Cylinder):
        return isinstance(q, Cylinder) and p.prefix[: len(q.prefix)] == q.prefix and len(p.prefix) >= len(q.prefix)
    if isinstance(p, Interval):
        if isinstance(q, Interval):
            return q.lo <= p.lo and p.hi <= q.hi
        if isinstance(q, UpperTail):
            return p.lo >= q.bound
        if isinstance(q, LowerTail):
            return p.hi <= -q.bound
    if isinstance(p, UpperTail):
        return isinstance(q, UpperTail) and p.bound >= q.bound
    if isinstance(p, LowerTail):
        return isinstance(q, LowerTail) and p.bound >= q.bound
    return False


def nbhd_subset(c1: NbhdCode, c2: NbhdCode) -> bool:
    """Inclusion of basic sets (all basic sets here are nonempty)."""
    if c1.space != c2.space:
        raise IncompatibleSpaces(f"{c1.space} vs {c2.space}")
    r1, r2 = decode_nbhd(c1), decode_nbhd(c2)
    return all(_part_subset(p, q) for p, q in zip(r1.parts, r2.parts))


def nbhd_member(point: Sequence, code: NbhdCode) -> bool:
    if len(point) != len(code.space):
        raise IncompatibleSpaces("point dimension does not match space")
    return decode_nbhd(code).contains(point)


def ball_in_box(center: Sequence, radius2, code: NbhdCode, section: int | None = None) -> bool:
    """Closed ball (center, sqrt(radius2)) inside the basic set, by exact arithmetic.

    The basic set must be a product of Real factors, optionally followed by one
    Nat factor which then has to equal ``section``.
    """
    factors = code.space.factors
    reals = [f for f in factors if f == "Real"]
    tail = factors[len(reals):]
    if factors[: len(reals)] != tuple(reals) or len(reals) != len(center) or tail not in ((), ("Nat",)):
        raise IncompatibleSpaces(f"ball in R^{len(center)} vs {code.space}")
    if tail and section is None:
        raise IncompatibleSpaces("section required for a Nat factor")
    return ball_in_region(center, radius2, decode_nbhd(code), section)


def ball_in_region(center: Sequence, radius2, region: Region, section: int | None = None) -> bool:
    """Same test against an already decoded region (Real factors, optional Nat last)."""
    radius2 = Fraction(radius2)
    if radius2 < 0:
        raise ValueError("negative squared radius")
    parts = region.parts
    if len(parts) == len(center) + 1:
        if section is None or parts[-1].value != section:
            return False
    for c, box in zip(center, parts):
        c = Fraction(c)
        if not box.lo < c < box.hi:
            return False
        if (c - box.lo) ** 2 <= radius2 or (box.hi - c) ** 2 <= radius2:
            return False
    return True

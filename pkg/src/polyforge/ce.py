"""Computably enumerable sets as pure step -> element functions.

A ``CeSet`` never holds iterator state: ``at(step)`` is a total function, so
enumerations are reproducible and can be evaluated in any order. A
``SemiOpenSet`` is a c.e. set of neighbourhood indices over a ``SpaceCode``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from . import coding as C
from .coding import Index, NbhdCode, NotInImage, SpaceCode


class DimensionMismatch(ValueError):
    pass


class OutOfRange(ValueError):
    pass


class Semi(str, enum.Enum):
    YES = "Yes"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class CeSet:
    """Deterministic enumerator: ``fn(step)`` is the element emitted at ``step`` or None."""

    name: str
    fn: Callable[[int], Optional[object]] = field(compare=False)

    def at(self, step: int):
        return self.fn(step)

    def emitted(self, budget: int) -> list:
        return [v for v in (self.fn(s) for s in range(budget)) if v is not None]

    def iter_steps(self, budget: int) -> Iterator[tuple[int, object]]:
        for s in range(budget):
            v = self.fn(s)
            if v is not None:
                yield s, v

    def semidecide(self, x, budget: int) -> bool:
        """True iff ``x`` is emitted at some step below ``budget``."""
        return any(v == x for _, v in self.iter_steps(budget))


def evens() -> CeSet:
    return CeSet("evens", lambda s: 2 * s)


def finite(values: Sequence[int], name: str = "finite") -> CeSet:
    vals = tuple(values)
    return CeSet(name, lambda s: vals[s] if s < len(vals) else None)


# semicomputable sets --------------------------------------------------------------
class SemiOpenSet:
    """Union of the basic neighbourhoods whose indices ``codes`` enumerates.

    ``denotes`` (optional) is an exact predicate for the same set, used only as a
    test oracle; it is never consulted by the semidecision procedures.
    """

    def __init__(self, space: SpaceCode, codes: CeSet, name: str = "",
                 denotes: Callable[[Sequence], bool] | None = None):
        self.space = space
        self.codes = codes
        self.name = name or codes.name
        self.denotes = denotes
        self._regions: dict[int, Optional[C.Region]] = {}

    def region(self, step: int) -> Optional[C.Region]:
        if step not in self._regions:
            idx = self.codes.at(step)
            self._regions[step] = None if idx is None else C.decode_nbhd(self.space, idx)
        return self._regions[step]

    def code(self, step: int) -> Optional[NbhdCode]:
        idx = self.codes.at(step)
        return None if idx is None else NbhdCode(self.space, idx)

    def __repr__(self):
        return f"SemiOpenSet({self.name!r} over {self.space})"


def member_semidecide(s: SemiOpenSet, point: Sequence, budget: int) -> Semi:
    if len(point) != len(s.space):
        raise DimensionMismatch(f"point of dimension {len(point)} in {s.space}")
    for step in range(budget):
        reg = s.region(step)
        if reg is not None and reg.contains(point):
            return Semi.YES
    return Semi.UNKNOWN


@dataclass(frozen=True)
class Pi02Spec:
    """{x in R^a : <x, n> in U for every n}."""

    a: int
    U: SemiOpenSet

    def __post_init__(self):
        if self.U.space != SpaceCode.reals_times_nat(self.a):
            raise DimensionMismatch(f"U lives in {self.U.space}, expected R^{self.a} x N")

    def denotes(self, x: Sequence, n_max: int) -> bool:
        """Exact membership via the preset oracle, truncated to sections n < n_max."""
        if self.U.denotes is None:
            raise ValueError("U carries no exact oracle")
        return all(self.U.denotes(tuple(x) + (n,)) for n in range(n_max))


# presets over R^a x N ---------------------------------------------------------------
def _box_index(intervals, section: int) -> Index:
    return C.encode_box(intervals, section).index


def _frac(s: str) -> Fraction:
    return Fraction(s.strip())


def preset(spec: str, a: int = 1) -> SemiOpenSet:
    """Named semicomputable subsets of R^a x N.

    ``empty``           nothing
    ``full``            everything, via boxes (-(R+1), R+1)^a x {j}
    ``box:lo,hi``       (lo, hi)^a x N (or ``box:lo1,hi1,...,loa,hia``)
    ``punct:c``         {x : some x_i != c} x N
    ``shrink:c``        section j is (c - 1/(j+1), c + 1/(j+1))^a
    """
    space = SpaceCode.reals_times_nat(a)
    kind, _, arg = spec.partition(":")
    if kind == "empty":
        return SemiOpenSet(space, CeSet("empty", lambda s: None), "empty", lambda p: False)

    if kind == "full":
        def full(s):
            r, j = C.cantor_unpair(s)
            return _box_index([(-(r + 1), r + 1)] * a, j)
        return SemiOpenSet(space, CeSet("full", full), "full", lambda p: True)

    if kind == "box":
        nums = [_frac(t) for t in arg.split(",")]
        if len(nums) == 2:
            nums = nums * a
        if len(nums) != 2 * a:
            raise ValueError(f"box preset needs 2 or {2 * a} endpoints")
        ivs = [(nums[2 * i], nums[2 * i + 1]) for i in range(a)]
        for lo, hi in ivs:
            if not lo < hi:
                raise ValueError("box preset needs lo < hi")
        return SemiOpenSet(
            space, CeSet(spec, lambda s: _box_index(ivs, s)), spec,
            lambda p: all(lo < x < hi for (lo, hi), x in zip(ivs, p[:a])),
        )

    if kind == "punct":
        c = _frac(arg)

        def punct(s):
            u, j = C.cantor_unpair(s)
            u, i = divmod(u, a)
            r, side = divmod(u, 2)
            near = Fraction(1, r + 2)
            ivs = [(-(r + 1) + c, r + 1 + c)] * a
            ivs[i] = (c - r - 1, c - near) if side == 0 else (c + near, c + r + 1)
            return _box_index(ivs, j)
        return SemiOpenSet(space, CeSet(spec, punct), spec, lambda p: any(x != c for x in p[:a]))

    if kind == "shrink":
        c = _frac(arg)

        def shrink(s):
            w = Fraction(1, s + 1)
            return _box_index([(c - w, c + w)] * a, s)
        return SemiOpenSet(
            space, CeSet(spec, shrink), spec,
            lambda p: all(abs(x - c) < Fraction(1, p[a] + 1) for x in p[:a]),
        )

    raise ValueError(f"unknown preset {spec!r}")


PRESET_NAMES = ("empty", "full", "box:<lo>,<hi>", "punct:<c>", "shrink:<c>")


# rational enumeration and the Vitali relation -----------------------------------------
def rational_at(m: int) -> Fraction:
    """q_m: (u, v) = Cantor-unpair(m); q_m = (-1)^u * floor(u/2) / (v+1)."""
    u, v = C.cantor_unpair(m)
    mag = Fraction(u // 2, v + 1)
    return mag if u % 2 == 0 else -mag


def rational_index(q) -> int:
    """Least m with rational_at(m) == q."""
    q = Fraction(q)
    m = 0
    while rational_at(m) != q:
        m += 1
    return m


def vitali_equiv_semidecide(x, y, budget: int) -> Semi:
    x, y = Fraction(x), Fraction(y)
    for v in (x, y):
        if not 0 <= v <= 1:
            raise OutOfRange(v)
    d = x - y
    for m in range(budget + 1):
        if rational_at(m) == d:
            return Semi.YES
    return Semi.UNKNOWN


# W1 -------------------------------------------------------------------------------------
def ball_poly_value(x: Sequence, k: Sequence[int]) -> Fraction:
    """r(x, k) = k1^2 k2 - k3 * sum (k1 x_i - k_{3+i} + k3)^2, exactly."""
    k1, k2, k3 = k[0], k[1], k[2]
    s = sum((k1 * Fraction(xi) - k[3 + i] + k3) ** 2 for i, xi in enumerate(x))
    return k1 * k1 * k2 - k3 * s


def ball_of(k: Sequence[int]) -> tuple[tuple[Fraction, ...], Fraction]:
    """Center and squared radius of {r >= 0} when k1, k3 > 0."""
    k1, k2, k3 = k[0], k[1], k[2]
    a = len(k) - 3
    return tuple(Fraction(k[3 + i] - k3, k1) for i in range(a)), Fraction(k2, k3)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Tuples of ``parts`` naturals summing to ``total``, lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _count(total: int, parts: int) -> int:
    return math.comb(total + parts - 1, parts - 1)


def unrank_tuple(step: int, parts: int) -> tuple[int, ...]:
    """The step-th tuple ordered by total weight, then lexicographically."""
    w = 0
    while step >= _count(w, parts):
        step -= _count(w, parts)
        w += 1
    out = []
    remaining = w
    for slot in range(parts - 1, 0, -1):
        first = 0
        while step >= _count(remaining - first, slot):
            step -= _count(remaining - first, slot)
            first += 1
        out.append(first)
        remaining -= first
    out.append(remaining)
    return tuple(out)


def rank_tuple(t: Sequence[int]) -> int:
    parts = len(t)
    w = sum(t)
    r = sum(_count(v, parts) for v in range(w))
    remaining = w
    for i, v in enumerate(t[:-1]):
        slot = parts - 1 - i
        r += sum(_count(remaining - f, slot) for f in range(v))
        remaining -= v
    return r


class W1Set(CeSet):
    """The set of J_{4+a}(n, k) satisfying (i), (ii) or (iii) for a given U.

    The enumeration dovetails over (n, k1..k_{3+a}, t) by total weight. The
    companion ``semidecide`` decodes a value directly and searches U-steps
    below the budget; both routes denote the same set.
    """

    def __init__(self, U: SemiOpenSet, a: int):
        if U.space != SpaceCode.reals_times_nat(a):
            raise DimensionMismatch(f"U lives in {U.space}, expected R^{a} x N")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "name", f"W1[{U.name}]")
        object.__setattr__(self, "fn", self._step)

    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other

    def condition(self, n: int, k: Sequence[int], t: Optional[int]) -> Optional[str]:
        """Which of (i)/(ii)/(iii) the tuple satisfies (iii only via U-step t)."""
        k1, k2, k3 = k[0], k[1], k[2]
        if n == 0:
            # (i): k1 = k2 = 1, k3 = 0, the only choice that makes the n = 0 value 1
            return "i" if (k1, k2, k3) == (1, 1, 0) else None
        if k1 == 0 and k3 == 0:
            return "ii"
        if k1 > 0 and k3 > 0 and t is not None:
            region = self.U.region(t)
            if region is not None:
                center, rad2 = ball_of(k)
                if C.ball_in_region(center, rad2, region, section=n - 1):
                    return "iii"
        return None

    def _step(self, step: int):
        tup = unrank_tuple(step, 5 + self.a)
        n, k, t = tup[0], tup[1:-1], tup[-1]
        if self.condition(n, k, t) is not None:
            return C.pairN((n,) + tuple(k))
        return None

    def decode(self, value: int) -> Optional[tuple[int, tuple[int, ...]]]:
        try:
            parts = C.unpairN(value, 4 + self.a)
        except NotInImage:
            return None
        return parts[0], parts[1:]

    def witness(self, n: int, k: Sequence[int], budget: int) -> Optional[tuple[str, Optional[int]]]:
        """(condition, U-step) justifying membership of J(n, k), if any step < budget does."""
        c = self.condition(n, k, None)
        if c is not None:
            return c, None
        if n > 0 and k[0] > 0 and k[2] > 0:
            center, rad2 = ball_of(k)
            for t in range(budget):
                region = self.U.region(t)
                if region is None or region.parts[-1].value != n - 1:
                    continue
                if C.ball_in_region(center, rad2, region, section=n - 1):
                    return "iii", t
        return None

    def semidecide(self, value, budget: int) -> bool:
        dec = self.decode(value)
        if dec is None:
            return False
        n, k = dec
        return self.witness(n, k, budget) is not None

    def rank_bound(self, n: int, k: Sequence[int], t: int) -> int:
        """Enumeration step at which the tuple (n, k, t) is examined."""
        return rank_tuple((n,) + tuple(k) + (t,))


def build_W1(U: SemiOpenSet, a: int) -> W1Set:
    return W1Set(U, a)

"""Free rotation group machinery on the sphere.

Words are tuples over the letters 0..3 = (tau, tau^-1, sigma, sigma^-1), mapped
to the rational rotations rho and phi. All group computations are exact; only
the irrational rotation alpha and normalised fixed points use interval
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from mpmath import iv

TAU, TAU_INV, SIGMA, SIGMA_INV = 0, 1, 2, 3
LETTERS = "tTsS"
NAMES = ("tau", "tau^-1", "sigma", "sigma^-1")


class DegenerateKernel(ArithmeticError):
    pass


class RefinementExhausted(RuntimeError):
    pass


class NotOnSphere(ValueError):
    pass


Word = tuple[int, ...]
IntMat = tuple[tuple[int, ...], ...]
RatMat = tuple[tuple[Fraction, ...], ...]


# words --------------------------------------------------------------------------------
def inverse_letter(l: int) -> int:
    return l ^ 1


def reduce_word(letters: Sequence[int]) -> Word:
    out: list[int] = []
    for l in letters:
        if out and out[-1] == inverse_letter(l):
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def word_mul(u: Word, v: Word) -> Word:
    return reduce_word(u + v)


def word_inverse(w: Word) -> Word:
    return tuple(inverse_letter(l) for l in reversed(w))


def word_str(w: Word) -> str:
    return "".join(LETTERS[l] for l in w) or "e"


def parse_word(s: str) -> Word:
    if s in ("", "e"):
        return ()
    return reduce_word([LETTERS.index(c) for c in s])


def enum_word(n: int) -> Word:
    """f(0) = e; for n > 0 the bijective base-4 digits of n, read as letters, reduced."""
    if n < 0:
        raise ValueError("n >= 0")
    digits = []
    while n > 0:
        n -= 1
        digits.append(n % 4)
        n //= 4
    return reduce_word(reversed(digits))


def reduced_words(length: int) -> Iterator[Word]:
    """All reduced words of exactly ``length`` letters, lexicographically."""
    if length == 0:
        yield ()
        return
    for w in reduced_words(length - 1):
        for l in range(4):
            if not w or w[-1] != inverse_letter(l):
                yield w + (l,)


def words_up_to(L: int) -> Iterator[Word]:
    for n in range(L + 1):
        yield from reduced_words(n)


# matrices -----------------------------------------------------------------------------------
RHO5: IntMat = ((3, 4, 0), (-4, 3, 0), (0, 0, 5))
PHI5: IntMat = ((5, 0, 0), (0, 3, 4), (0, -4, 3))


def transpose(m):
    return tuple(zip(*m))


GEN5: tuple[IntMat, ...] = (RHO5, transpose(RHO5), PHI5, transpose(PHI5))
IDENTITY: RatMat = tuple(tuple(Fraction(int(i == j)) for j in range(3)) for i in range(3))


def matmul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def matvec(a, v):
    return tuple(sum(a[i][k] * v[k] for k in range(3)) for i in range(3))


def det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _scaled(m: IntMat) -> RatMat:
    return tuple(tuple(Fraction(x, 5) for x in row) for row in m)


def rho() -> RatMat:
    return _scaled(RHO5)


def phi() -> RatMat:
    return _scaled(PHI5)


def word_int_matrix(w: Word) -> IntMat:
    """5^len(w) * g(w) as an integer matrix."""
    m: IntMat = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    for l in w:
        m = matmul(m, GEN5[l])
    return m


def word_to_matrix(w: Word) -> RatMat:
    w = reduce_word(w)
    scale = 5 ** len(w)
    return tuple(tuple(Fraction(x, scale) for x in row) for row in word_int_matrix(w))


def is_rotation(m: RatMat) -> bool:
    return matmul(m, transpose(m)) == IDENTITY and det3(m) == 1


# freeness ------------------------------------------------------------------------------------
def freeness_check(L: int) -> dict:
    """Every nontrivial reduced word of length <= L maps to a non-identity matrix.

    Two certificates: exact comparison of 5^len * g(w) with 5^len * I, and the
    residue of 5^len * g(w) modulo 5 being nonzero.
    """
    if L < 1:
        raise ValueError("L >= 1")
    checked = exact_ok = mod5_ok = at_max = 0
    collisions: list[str] = []
    frontier: list[tuple[Word, IntMat]] = [((), ((1, 0, 0), (0, 1, 0), (0, 0, 1)))]
    for length in range(1, L + 1):
        nxt = []
        scale_id = tuple(tuple(5**length if i == j else 0 for j in range(3)) for i in range(3))
        for w, m in frontier:
            for l in range(4):
                if w and w[-1] == inverse_letter(l):
                    continue
                wm = matmul(m, GEN5[l])
                w2 = w + (l,)
                checked += 1
                if length == L:
                    at_max += 1
                if wm != scale_id:
                    exact_ok += 1
                else:
                    collisions.append(word_str(w2))
                if any(x % 5 for row in wm for x in row):
                    mod5_ok += 1
                nxt.append((w2, wm))
        frontier = nxt
    return {
        "max_len": L, "checked": checked, "checked_at_max_len": at_max,
        "collisions": collisions, "exact_nonidentity": exact_ok,
        "mod5_nonzero": mod5_ok, "agree": exact_ok == mod5_ok == checked,
    }


# paradoxical decomposition of F2 ----------------------------------------------------------------
def classify_piece(w: Word) -> int:
    w = reduce_word(w)
    if not w or all(l == SIGMA_INV for l in w):
        return 3
    first = w[0]
    return {TAU: 1, TAU_INV: 2, SIGMA: 3, SIGMA_INV: 4}[first]


def decomposition_check(L: int) -> dict:
    if L < 2:
        raise ValueError("L >= 2")
    counts = {1: 0, 2: 0, 3: 0, 4: 0}
    total = law1 = law2 = 0
    failures: list[str] = []
    for w in words_up_to(L):
        total += 1
        counts[classify_piece(w)] += 1
        in1 = classify_piece(w) == 1 or classify_piece(word_mul((TAU_INV,), w)) == 2
        in2 = classify_piece(w) == 3 or classify_piece(word_mul((SIGMA_INV,), w)) == 4
        law1 += in1
        law2 += in2
        if not (in1 and in2):
            failures.append(word_str(w))
    expected_total = 1 + sum(4 * 3 ** (j - 1) for j in range(1, L + 1))
    return {
        "max_len": L, "total": total, "expected_total": expected_total, "counts": counts,
        "partition": sum(counts.values()) == total == expected_total,
        "law_A1_tauA2": law1, "law_A3_sigmaA4": law2, "failures": failures,
        "ok": not failures and total == expected_total,
    }


# fixed axes --------------------------------------------------------------------------------
def _kernel(m: RatMat) -> list[tuple[Fraction, ...]]:
    """Exact rational null space basis by row reduction."""
    rows = [list(r) for r in m]
    pivots = []
    r = 0
    for c in range(3):
        p = next((i for i in range(r, 3) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(3):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(3) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * 3
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(tuple(v))
    return basis


def primitive(v: Sequence[Fraction]) -> tuple[int, int, int]:
    """Integer multiple with coprime entries and first nonzero entry positive."""
    from math import gcd, lcm

    den = lcm(*(Fraction(x).denominator for x in v))
    ints = [int(Fraction(x) * den) for x in v]
    g = gcd(*ints)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def fixed_axis(w: Word) -> tuple[int, int, int]:
    w = reduce_word(w)
    if not w:
        raise DegenerateKernel("the identity fixes everything")
    m = word_to_matrix(w)
    diff = tuple(tuple(m[i][j] - (1 if i == j else 0) for j in range(3)) for i in range(3))
    basis = _kernel(diff)
    if len(basis) != 1:
        raise DegenerateKernel(f"kernel of dimension {len(basis)} for {word_str(w)}")
    v = primitive(basis[0])
    if matvec(m, v) != tuple(Fraction(x) for x in v):
        raise DegenerateKernel("eigen-equation failed")
    return v


def cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def same_axis(u, v) -> bool:
    return cross(u, v) == (0, 0, 0)


def distinct_axes(K: int, search_limit: int = 10**6) -> list[tuple[tuple[int, int, int], int]]:
    """First K pairwise non-parallel fixed axes in enumeration order, with their indices."""
    out: list[tuple[tuple[int, int, int], int]] = []
    for n in range(1, search_limit):
        w = enum_word(n)
        if not w:
            continue
        v = fixed_axis(w)
        if not any(same_axis(v, u) for u, _ in out):
            out.append((v, n))
            if len(out) == K:
                return out
    raise RuntimeError("search limit reached")


def in_D(point: Sequence, budget: int) -> Optional[int]:
    """Index j <= budget with the point on the fixed axis of g(f(j)), if any."""
    p = tuple(Fraction(x) for x in point)
    for j in range(1, budget + 1):
        w = enum_word(j)
        if w and same_axis(fixed_axis(w), p):
            return j
    return None


# alpha -------------------------------------------------------------------------------------------
def _with_prec(prec: int):
    class _Ctx:
        def __enter__(self):
            self.old = iv.prec
            iv.prec = prec

        def __exit__(self, *exc):
            iv.prec = self.old

    return _Ctx()


def _root2(n: int):
    return iv.mpf(2) ** (iv.mpf(1) / n)


def axis_vector():
    return (iv.mpf(1), _root2(3), _root2(5))


def alpha_matrix(precision: int = 128):
    """Interval rotation matrix of the quaternion (1, 1, 2^(1/3), 2^(1/5)), normalised."""
    if precision < 16:
        raise ValueError("precision >= 16")
    with _with_prec(precision + 32):
        a, b = iv.mpf(1), iv.mpf(1)
        c, d = _root2(3), _root2(5)
        n2 = a * a + b * b + c * c + d * d
        m = (
            (a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)),
            (2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)),
            (2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d),
        )
        return tuple(tuple(x / n2 for x in row) for row in m)


def iv_width(x) -> float:
    return float(x.delta)


def alpha_checks(precision: int = 128) -> dict:
    from .evaluate import interval_contains, interval_width

    A = alpha_matrix(precision)
    with _with_prec(precision + 32):
        AAt = tuple(tuple(sum((A[i][k] * A[j][k] for k in range(3)), iv.mpf(0)) for j in range(3))
                    for i in range(3))
        det = det3(A)
        axis = axis_vector()
        image = tuple(sum((A[i][k] * axis[k] for k in range(3)), iv.mpf(0)) for i in range(3))
        axis_ok = all(
            max(iv.mpf(image[i]).a, iv.mpf(axis[i]).a) <= min(iv.mpf(image[i]).b, iv.mpf(axis[i]).b)
            for i in range(3)
        )
    bound = Fraction(1, 2 ** (precision - 4))
    orth = all(interval_contains(AAt[i][j], int(i == j)) for i in range(3) for j in range(3))
    widths = [interval_width(AAt[i][j]) for i in range(3) for j in range(3)] + [interval_width(det)]
    return {
        "precision": precision,
        "orthogonal": orth,
        "det_contains_one": interval_contains(det, 1),
        "max_width": float(max(widths)),
        "width_ok": max(widths) <= bound,
        "axis_fixed": axis_ok,
        "entry_width_ok": all(interval_width(x) <= Fraction(1, 2**precision) for row in A for x in row),
    }


# separation ----------------------------------------------------------------------------------------
def _inner_products(axes, prec: int):
    with _with_prec(prec):
        w = axis_vector()
        out = []
        for v in axes:
            norm = iv.sqrt(sum((iv.mpf(x) ** 2 for x in v), iv.mpf(0)))
            s = sum((iv.mpf(x) * w[i] for i, x in enumerate(v)), iv.mpf(0)) / norm
            out.append(s)
            out.append(-s)
        return out


def _pairwise_disjoint(ivals) -> tuple[bool, Fraction]:
    from .evaluate import interval_bounds

    bounds = sorted(interval_bounds(x) for x in ivals)
    gap = None
    for (lo1, hi1), (lo2, hi2) in zip(bounds, bounds[1:]):
        g = lo2 - hi1
        if g <= 0:
            return False, g
        gap = g if gap is None else min(gap, g)
    return True, gap if gap is not None else Fraction(0)


def separation_check(K: int, precision: int = 128, cap: int = 512) -> dict:
    """Inner products of the first K fixed axes (both signs) with (1, 2^(1/3), 2^(1/5)) are distinct."""
    if K < 2:
        raise ValueError("K >= 2")
    axes = distinct_axes(K)
    prec = precision
    while prec <= cap:
        ok, gap = _pairwise_disjoint(_inner_products([v for v, _ in axes], prec))
        if ok:
            return {
                "K": K, "points": 2 * K, "precision": prec, "disjoint": True,
                "min_gap": float(gap), "axes": [list(v) for v, _ in axes[:5]],
            }
        prec *= 2
    raise RefinementExhausted(f"no separation up to {cap} bits")


# 16-piece classifier ------------------------------------------------------------------------------
class MockTransversal:
    """Stand-in for a transversal of the F-orbit relation, NOT a true transversal.

    The representative of p is the lexicographically least g(f(j))^-1 p over
    j <= budget, with ties broken by the smaller j.
    """

    def __init__(self, budget: int = 256):
        self.budget = budget

    def representative(self, p) -> tuple[int, Word, tuple]:
        best = None
        for j in range(self.budget + 1):
            w = enum_word(j)
            t = matvec(transpose(word_to_matrix(w)), p)
            if best is None or t < best[2]:
                best = (j, w, t)
        return best


REASSEMBLY = {1: (), 2: (TAU,), 3: (), 4: (SIGMA,)}


@dataclass(frozen=True)
class PieceResult:
    piece: Optional[int]
    part: int
    word: str
    in_D_star: str
    in_D_star_rotated: str
    witness: Optional[int]

    def to_json(self) -> dict:
        return {
            "piece": self.piece, "part": self.part, "word": self.word,
            "in_D_star": self.in_D_star, "in_D_star_rotated": self.in_D_star_rotated,
            "witness": self.witness,
        }


def piece16_classify(point: Sequence, budget: int, t: MockTransversal | None = None,
                     tolerance: Fraction = Fraction(0)) -> PieceResult:
    """Piece 1..16 = part + 4*[p in D*] + 8*[R p in D*], or None when undecided.

    Membership in D* is only semidecided (via exact hits on D within the
    budget); non-membership is never certified, so points outside D come back
    with piece None.
    """
    p = tuple(Fraction(x) for x in point)
    if abs(sum(x * x for x in p) - 1) > tolerance:
        raise NotOnSphere(point)
    t = t or MockTransversal(min(budget, 256))
    _, w, _ = t.representative(p)
    part = classify_piece(w)
    hit = in_D(p, budget)
    rotated = matvec(word_to_matrix(REASSEMBLY[part]), p)
    hit_rot = in_D(rotated, budget)
    yes = lambda h: "Yes" if h is not None else "Unknown"
    piece = None
    if hit is not None and hit_rot is not None:
        piece = part + 4 + 8
    return PieceResult(piece, part, word_str(w), yes(hit), yes(hit_rot), hit)

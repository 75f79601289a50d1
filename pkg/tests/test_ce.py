import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyforge import ce, coding as C
from polyforge.ce import Semi


def ball_inside_box(center, rad2, boxes):
    """Closed ball in an open box, by per-face squared distances."""
    for c, (lo, hi) in zip(center, boxes):
        if not (lo < c < hi and (c - lo) ** 2 > rad2 and (hi - c) ** 2 > rad2):
            return False
    return True


def test_presets_membership():
    full = ce.preset("full")
    # the full set is a union of growing boxes; the first one is (-1, 1) x {0}
    assert ce.member_semidecide(full, (Fraction(1, 2), 0), 1) == Semi.YES
    assert ce.member_semidecide(full, (Fraction(7, 3), 5), 100) == Semi.YES
    empty = ce.preset("empty")
    assert ce.member_semidecide(empty, (Fraction(0), 0), 500) == Semi.UNKNOWN
    box = ce.preset("box:0,1")
    assert ce.member_semidecide(box, (Fraction(1, 2), 3), 10) == Semi.YES
    assert ce.member_semidecide(box, (Fraction(3, 2), 3), 200) == Semi.UNKNOWN


def test_dimension_mismatch():
    with pytest.raises(ce.DimensionMismatch):
        ce.member_semidecide(ce.preset("full"), (Fraction(1),), 5)


def test_enumeration_is_deterministic():
    a = ce.preset("punct:1/3", 2).codes.emitted(200)
    b = ce.preset("punct:1/3", 2).codes.emitted(200)
    assert a == b
    # order independence: pointwise evaluation in reverse agrees
    fn = ce.preset("punct:1/3", 2).codes.at
    assert [fn(s) for s in reversed(range(200))][::-1] == a


@given(st.fractions(-3, 3, max_denominator=8), st.integers(0, 5), st.integers(1, 60))
def test_semidecide_monotone(x, n, budget):
    for name in ("punct:0", "shrink:1/2", "box:-1,1/2"):
        U = ce.preset(name)
        if ce.member_semidecide(U, (x, n), budget) == Semi.YES:
            assert ce.member_semidecide(U, (x, n), budget + 25) == Semi.YES


@given(st.fractions(-3, 3, max_denominator=8), st.integers(0, 4))
def test_presets_never_overclaim(x, n):
    for name in ("empty", "full", "box:0,1", "punct:1/2", "shrink:1/3"):
        U = ce.preset(name)
        if ce.member_semidecide(U, (x, n), 150) == Semi.YES:
            assert U.denotes((x, n))


def test_pi02_denotation():
    assert ce.Pi02Spec(1, ce.preset("full")).denotes((Fraction(9),), 5)
    box = ce.Pi02Spec(1, ce.preset("box:0,1"))
    assert box.denotes((Fraction(1, 2),), 10)
    assert not box.denotes((Fraction(1),), 10)
    shrink = ce.Pi02Spec(1, ce.preset("shrink:1/2"))
    assert shrink.denotes((Fraction(1, 2),), 10)
    assert not shrink.denotes((Fraction(1, 2) + Fraction(1, 7),), 10)


def test_rational_enumeration():
    qs = [ce.rational_at(m) for m in range(3000)]
    assert Fraction(0) in qs[:1]
    assert ce.rational_index(Fraction(-1, 2)) == 11
    assert ce.rational_at(11) == Fraction(-1, 2)
    for q in (Fraction(3, 4), Fraction(-5, 2), Fraction(1, 7)):
        assert q in qs


def test_vitali_relation():
    assert ce.vitali_equiv_semidecide(Fraction(1, 2), Fraction(1, 2), 1) == Semi.YES
    m = ce.rational_index(Fraction(-1, 2))
    assert ce.vitali_equiv_semidecide(Fraction(1, 3), Fraction(5, 6), m - 1) == Semi.UNKNOWN
    assert ce.vitali_equiv_semidecide(Fraction(1, 3), Fraction(5, 6), m) == Semi.YES
    with pytest.raises(ce.OutOfRange):
        ce.vitali_equiv_semidecide(Fraction(3, 2), Fraction(0), 5)


def test_tuple_ranking_roundtrip():
    for step in range(2000):
        t = ce.unrank_tuple(step, 4)
        assert ce.rank_tuple(t) == step
    weights = [sum(ce.unrank_tuple(s, 3)) for s in range(500)]
    assert weights == sorted(weights)


def test_w1_empty_only_trivial_conditions():
    W = ce.build_W1(ce.preset("empty"), 1)
    for v in W.emitted(3000):
        n, k = W.decode(v)
        assert (n == 0 and k[:3] == (1, 1, 0)) or (n > 0 and k[0] == 0 and k[2] == 0)
    assert C.pairN((0, 1, 1, 0, 0)) in W.emitted(3000)


def test_w1_full_space_balls():
    W = ce.build_W1(ce.preset("full"), 1)
    for k4 in range(4):
        assert W.semidecide(C.pairN((1, 1, 1, 1, k4)), 500)


def test_w1_box_witness_search():
    U = ce.preset("box:0,1")
    W = ce.build_W1(U, 1)
    unit = [(Fraction(0), Fraction(1))]
    found = None
    # brute force over k1, k2, k3 <= 50; k4 is then forced by the centre
    for k1, k2, k3 in itertools.product(range(1, 51), repeat=3):
        k4 = k3 * 2 + k1
        if k4 % 2 or k4 // 2 > 50:
            continue
        k = (k1, k2, k3, k4 // 2)
        center, rad2 = ce.ball_of(k)
        if center == (Fraction(1, 2),) and rad2 == Fraction(1, 16):
            found = k
            break
    assert found is not None
    assert ball_inside_box(*ce.ball_of(found), unit)
    assert W.semidecide(C.pairN((1,) + found), 50)
    # radius 2 balls never fit in (0, 1)
    big = (2, 4, 1, 2)
    assert ce.ball_of(big) == ((Fraction(1, 2),), Fraction(4))
    assert not W.semidecide(C.pairN((1,) + big), 300)


def test_w1_soundness():
    U = ce.preset("punct:0")
    W = ce.build_W1(U, 1)
    checked = 0
    for v in W.emitted(6000):
        n, k = W.decode(v)
        if n > 0 and k[0] > 0 and k[2] > 0:
            center, rad2 = ce.ball_of(k)
            ok = False
            for t in range(6000):
                reg = U.region(t)
                if reg.parts[1].value != n - 1:
                    continue
                iv = reg.parts[0]
                if ball_inside_box(center, rad2, [(iv.lo, iv.hi)]):
                    ok = True
                    break
            assert ok
            checked += 1
    assert checked > 0


def test_w1_completeness():
    U = ce.preset("box:0,1")
    W = ce.build_W1(U, 1)
    bound = 4
    ball_cases = 0
    for n, k1, k2, k3, k4 in itertools.product(range(bound + 1), repeat=5):
        k = (k1, k2, k3, k4)
        witness = None
        if n == 0:
            witness = 0 if k[:3] == (1, 1, 0) else None
        elif k1 == 0 and k3 == 0:
            witness = 0
        elif k1 > 0 and k3 > 0:
            center, rad2 = ce.ball_of(k)
            for t in range(40):
                reg = U.region(t)
                iv = reg.parts[0]
                if reg.parts[1].value == n - 1 and ball_inside_box(center, rad2, [(iv.lo, iv.hi)]):
                    witness = t
                    ball_cases += 1
                    break
        if witness is None:
            continue
        step = W.rank_bound(n, k, witness)
        assert W.at(step) == C.pairN((n,) + k)
    assert ball_cases > 0

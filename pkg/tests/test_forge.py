import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyforge import forge as F
from polyforge.ce import ball_of, preset as ce_preset
from polyforge.evaluate import interval_bounds, interval_eval
from polyforge.expr import QuantBlock, QuantifiedExpr, expand
from polyforge.expr.emit import parse_expr, to_text
from polyforge.expr.poly import Polynomial
from polyforge.universal import UniversalPoly, universal

JONES58 = universal("jones58")


def toy_universal():
    """A tiny symbolic stand-in: q(y1; l) = (y1 - l)^2, zero iff y1 = l."""
    body = parse_expr("(y1 - l)^2")
    return UniversalPoly("toy", "symbolic", 1, 2, body=body, unknowns=("y1",), arg="l")


def test_ball_poly_a1_example():
    r = F.ball_poly(1)
    x = Polynomial.var("x1")
    for k4 in range(-2, 5):
        inst = r.substitute({"k1": 1, "k2": 1, "k3": 1, "k4": k4})
        assert inst == 1 - (x - k4 + 1) ** 2
        for num in range(-40, 40):
            xv = Fraction(num, 4)
            assert (inst.evaluate({"x1": xv}) >= 0) == (k4 - 2 <= xv <= k4)


def test_ball_poly_degree_and_homogeneity():
    for a in (1, 2, 3):
        r = F.ball_poly(a)
        # the x^2 k1^2 k3 term gives total degree 5; in k alone r is a cubic form
        assert r.degree() == 5
        assert r.degree(constants=[f"x{i}" for i in range(1, a + 1)]) == 3
        t = Polynomial.var("t")
        ks = [f"k{i}" for i in range(1, 4 + a)]
        scaled = r.substitute({k: t * Polynomial.var(k) for k in ks})
        assert scaled == t**3 * r


def test_ball_radius_zero_is_center():
    r = F.ball_poly(1)
    inst = r.substitute({"k1": 2, "k2": 0, "k3": 3, "k4": 4})
    center = Fraction(4 - 3, 2)
    for num in range(-20, 20):
        xv = Fraction(num, 8)
        assert (inst.evaluate({"x1": xv}) >= 0) == (xv == center)


@settings(max_examples=200)
@given(
    st.integers(1, 20), st.integers(0, 40), st.integers(1, 20),
    st.lists(st.integers(-30, 30), min_size=2, max_size=2),
    st.lists(st.fractions(-5, 5, max_denominator=12), min_size=2, max_size=2),
)
def test_ball_sign_matches_membership(k1, k2, k3, tail, xs):
    k = (k1, k2, k3, *tail)
    r = F.ball_poly(2)
    value = r.evaluate({"x1": xs[0], "x2": xs[1], **{f"k{i + 1}": v for i, v in enumerate(k)}})
    center, rad2 = ball_of(k)
    dist2 = sum((x - c) ** 2 for x, c in zip(xs, center))
    assert (value >= 0) == (dist2 <= rad2)


def test_engineer_min_degree_shape():
    g = F.engineer(1, JONES58)
    assert g.k_count == 58 + 2 * (3 + 1) == 66
    assert g.qexpr.degree() == 7
    assert g.qexpr.free == ("x1", "n")


def test_engineer_min_vars_degree():
    g = F.engineer(1, universal("jones9"), F.MIN_VARS)
    assert g.qexpr.degree() == 47216 * 5**58 + 9731
    assert g.report()["k_count"] == 9 + 1 + 3 + 1


def test_engineer_space_mismatch():
    with pytest.raises(F.SpaceMismatch):
        F.engineer(ce_preset("full", 2), JONES58, xs=("x",))


@pytest.mark.parametrize("mode", [F.MIN_DEGREE, F.MIN_VARS])
def test_matrix_decomposition(mode):
    g = F.engineer(1, toy_universal(), mode)
    r, penalty = F.matrix_decomposition(g)
    budget = 10**6
    lhs = expand(g.matrix, budget)
    k1, k2 = Polynomial.var("k1"), Polynomial.var("k2")
    rhs = expand(r, budget) - k1**2 * k2 * expand(penalty, budget)
    assert lhs == rhs


def test_pi02_indicator_prefix():
    f = F.pi02_indicator(1, JONES58)
    assert [(b.kind, b.domain) for b in f.prefix] == [("inf", "N"), ("sup", "N")]
    assert f.prefix[0].vars == ("n",)
    assert len(f.prefix[1].vars) == 6 + 58 + 2


def test_stack_shapes():
    e1 = F.stack(F.SigmaSpec(1, 1), JONES58)
    assert [(b.kind, b.domain, len(b.vars)) for b in e1.prefix] == [
        ("sup", "R", 1), ("inf", "N", 1), ("sup", "N", 68)]
    e2 = F.stack(F.SigmaSpec(2, 1), JONES58)
    assert [(b.kind, b.domain, len(b.vars)) for b in e2.prefix] == [
        ("sup", "R", 1), ("inf", "R", 1), ("sup", "N", 1), ("inf", "N", 70)]
    assert e2.degree() == e1.degree() == 7


def test_even_level_matrix_is_one_minus_p():
    toy = toy_universal()
    e2 = F.stack(F.SigmaSpec(2, 1), toy)
    g = F.engineer(3, toy)
    # 1 - p with p the kernel matrix after renaming its inner variables to k1..
    inner, names = F._rename_inner(g)
    m = expand(e2.matrix, 10**6)
    ren = expand(inner, 10**6).rename({"x1": "x1", "x2": "z1", "x3": "z2"})
    assert m == 1 - ren


PRESET_EXPECT = {
    "vitali": (("x",), [("inf", "R", 1), ("sup", "R", 1), ("inf", "N", 1), ("sup", "N", 70)]),
    "wellorder": (("x", "y"), [("inf", "R", 1), ("sup", "R", 1), ("inf", "N", 1), ("sup", "N", 72)]),
    "inacc": (("x", "y"), [("sup", "R", 1), ("inf", "R", 1), ("sup", "R", 1), ("inf", "N", 1), ("sup", "N", 74)]),
    "banachtarski": (("m", "x", "y", "z"), [("inf", "R", 1), ("sup", "R", 1), ("inf", "N", 1), ("sup", "N", 76)]),
}


@pytest.mark.parametrize("name", sorted(PRESET_EXPECT))
def test_presets(name):
    qe, report = F.preset(name)
    free, blocks = PRESET_EXPECT[name]
    assert qe.free == free
    assert [(b.kind, b.domain, len(b.vars)) for b in qe.prefix] == blocks
    assert report["degree"] == "7"
    assert report["k_count"] == blocks[-1][2]


def test_vitali_text_header():
    qe, _ = F.preset("vitali")
    assert to_text(qe).startswith("inf_{y in R} sup_{z in R} inf_{n in N} sup_{k1..k70 in N^70}")


def test_arity_table_against_hand_formula():
    for a, m, nu in itertools.product(range(1, 6), range(0, 5), (0, 9, 58)):
        for delta in (0, 4, 10):
            t = F.arity_table(a, m, nu, delta)
            assert t["k_count"] == 6 + nu + 2 * a + 2 * m
            assert t["degree"] == max(3 + delta, 7)
            tv = F.arity_table(a, m, nu, delta, F.MIN_VARS)
            assert tv["k_count"] == nu + 1 + 3 + a + m
            assert tv["degree"] == max(3 + delta, 11 + 2 * (a + m))


def test_arity_table_matches_construction():
    for a, m in ((1, 1), (2, 2), (1, 3)):
        e = F.stack(F.SigmaSpec(m, a), JONES58)
        t = F.arity_table(a, m, 58, 4)
        assert len(e.prefix[-1].vars) == t["k_count"]
        assert e.degree() == t["degree"]


def test_foursquare_block_sizes():
    qe, _ = F.preset("vitali")
    fs = F.foursquare_transform(qe)
    assert [(b.kind, b.domain, len(b.vars)) for b in fs.prefix] == [
        ("inf", "R", 1), ("sup", "R", 1), ("inf", "Z", 4), ("sup", "Z", 280)]


def test_foursquare_simple_value():
    q = QuantifiedExpr(prefix=(QuantBlock("inf", "N", ("n",)),), matrix=Polynomial.var("n"), free=())
    fs = F.foursquare_transform(q)
    assert fs.prefix[0].domain == "Z" and len(fs.prefix[0].vars) == 4
    assert fs.matrix.evaluate({v: 0 for v in fs.prefix[0].vars}) == 0


def four_square_tuples(bound):
    side = int(bound**0.5) + 1
    for t in itertools.product(range(-side, side + 1), repeat=4):
        if sum(v * v for v in t) <= bound:
            yield t


small_terms = st.lists(
    st.tuples(st.integers(-9, 9), st.integers(0, 3), st.integers(0, 2)), min_size=1, max_size=4,
)


@settings(max_examples=50)
@given(small_terms, st.sampled_from(["inf", "sup"]), st.fractions(-2, 2, max_denominator=3))
def test_foursquare_preserves_budgeted_values(terms, kind, x):
    n, xv = Polynomial.var("n"), Polynomial.var("x")
    g = Polynomial.const(0, vars=("n", "x"))
    for c, en, ex in terms:
        g = g + c * n**en * xv**ex
    q = QuantifiedExpr(prefix=(QuantBlock(kind, "N", ("n",)),), matrix=g, free=("x",))
    fs = F.foursquare_transform(q)
    names = fs.prefix[0].vars
    bound = 6
    pick = min if kind == "inf" else max
    original = pick(g.evaluate({"n": v, "x": x}) for v in range(bound + 1))
    transformed = pick(
        fs.matrix.evaluate({**dict(zip(names, t)), "x": x}) for t in four_square_tuples(bound))
    assert original == transformed


def test_trig_relaxation_shape():
    g = parse_expr("(y - z)^2")
    q = QuantifiedExpr(
        prefix=(QuantBlock("inf", "Z", ("y",)), QuantBlock("sup", "Z", ("z",))), matrix=g, free=(),
    )
    t = F.trig_relaxation(q)
    assert [(b.kind, b.domain, b.vars) for b in t.prefix] == [
        ("inf", "R", ("y",)), ("sup", "R", ("beta", "z")), ("inf", "R", ("gamma",))]
    expected = parse_expr("(y - z)^2 + beta^2*sinpi(y)^2 - gamma^2*sinpi(z)^2")
    box = {"y": Fraction(1, 3), "z": Fraction(2, 7), "beta": 3, "gamma": Fraction(1, 2)}
    a, b = interval_eval(t.matrix, box), interval_eval(expected, box)
    assert interval_bounds(a) == interval_bounds(b)


def test_trig_relaxation_rejects_bad_shape():
    q = QuantifiedExpr(prefix=(QuantBlock("sup", "Z", ("y",)), QuantBlock("inf", "Z", ("z",))),
                       matrix=parse_expr("y*z"), free=())
    with pytest.raises(F.ShapeMismatch):
        F.trig_relaxation(q)


def test_trig_penalty_vanishes_on_integers():
    q = QuantifiedExpr(
        prefix=(QuantBlock("inf", "Z", ("y",)), QuantBlock("sup", "Z", ("z",))),
        matrix=parse_expr("(y - z)^2"), free=(),
    )
    t = F.trig_relaxation(q)
    rng = random.Random(3)
    for _ in range(40):
        pt = {v: rng.randint(-6, 6) for v in ("y", "z", "beta", "gamma")}
        lo, hi = interval_bounds(interval_eval(t.matrix, pt))
        exact = (pt["y"] - pt["z"]) ** 2
        assert lo <= exact <= hi and hi - lo < Fraction(1, 10**6)

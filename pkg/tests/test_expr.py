import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyforge.expr import (
    MINUS_INF, BudgetExceeded, Polynomial, QuantBlock, QuantifiedExpr, UnknownVariable,
    add, const, dag_degree, degree, expand, from_json, mul, neg, power, substitute, to_json, var,
)
from polyforge.expr.emit import parse_expr, to_latex, to_text
from polyforge.forge import J2

X, Y, Z = Polynomial.vars_("x", "y", "z")

terms = st.lists(
    st.tuples(st.integers(-10**30, 10**30), st.integers(0, 4), st.integers(0, 4), st.integers(0, 3)),
    max_size=6,
)


def build(ts):
    p = Polynomial.const(0, vars=("x", "y", "z"))
    for c, a, b, d in ts:
        p = p + c * X**a * Y**b * Z**d
    return p


polys = terms.map(build)


def test_degree_basics():
    assert degree(Polynomial.const(0)) is MINUS_INF
    assert degree(X**2 * Y + 3 * X) == 3
    assert degree(Polynomial.const(5)) == 0


def test_dag_degree_big_exponent():
    e = power(var("x") - power(var("y"), 5**60), 2)
    assert dag_degree(e) == 2 * 5**60


def test_dag_degree_rules():
    x, y = var("x"), var("y")
    assert dag_degree(add(power(x, 3), y)) == 3
    assert dag_degree(mul(power(x, 3), y)) == 4
    assert dag_degree(power(mul(x, y), 7)) == 14
    assert dag_degree(const(0)) is MINUS_INF
    # constants passed through are degree zero
    assert dag_degree(mul(var("m"), x), constants=("m",)) == 1


def test_expand_small():
    assert expand((var("x") + 1) ** 2, 10) == X**2 + 2 * X + 1
    assert expand(const(9), 1) == Polynomial.const(9)


def test_expand_budget():
    e = power(var("x") + 1, 5**60)
    with pytest.raises(BudgetExceeded):
        expand(e, 10**6)


def test_substitute_examples():
    assert substitute(X**2, {"x": X + 1}) == X**2 + 2 * X + 1
    assert substitute(X * Y, {"x": 2}) == 2 * Y
    j = expand(J2(var("x"), var("y")), 100)
    assert substitute(j, {"x": 0, "y": 0}) == Polynomial.const(0)


def test_substitute_unknown_variable():
    with pytest.raises(UnknownVariable):
        substitute(X**2, {"w": Y})


def test_substitute_is_simultaneous():
    assert substitute(X * Y**2, {"x": Y, "y": X}) == Y * X**2


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Polynomial.const(0)


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_degree_multiplicative(a, b):
    if a.is_zero() or b.is_zero():
        return
    assert (a * b).degree() == a.degree() + b.degree()


@settings(max_examples=60, deadline=None)
@given(polys, polys, st.integers(0, 3))
def test_substitution_degree_bound(a, b, k):
    s = substitute(a, {"x": b + Y**k})
    if a.is_zero():
        assert s.is_zero()
        return
    bound = a.degree() * max(b.degree() if not b.is_zero() else 0, k, 1)
    assert s.degree() <= bound


# random DAGs: built from positive coefficients only, so no cancellation can occur
leaves = st.sampled_from(["x", "y", "z"]).map(var) | st.integers(1, 5).map(const)


def _grow(children):
    return (
        st.tuples(children, children).map(lambda t: add(*t))
        | st.tuples(children, children).map(lambda t: mul(*t))
        | st.tuples(children, st.integers(0, 3)).map(lambda t: power(*t))
    )


positive_dags = st.recursive(leaves, _grow, max_leaves=8)


@settings(max_examples=80, deadline=None)
@given(positive_dags)
def test_dag_degree_matches_expansion(e):
    assert dag_degree(e) == expand(e, 10**5).degree()


@settings(max_examples=80, deadline=None)
@given(positive_dags, positive_dags)
def test_dag_degree_upper_bounds_expansion(a, b):
    # with cancellation the syntactic degree is only an upper bound
    e = add(a, neg(b))
    p = expand(e, 10**5)
    assert p.is_zero() or p.degree() <= dag_degree(e)


def test_text_emission():
    q = QuantifiedExpr(prefix=(QuantBlock("inf", "N", ("n",)),), matrix=Polynomial.var("n"), free=())
    assert to_text(q) == "inf_{n in N} [ n ]"


def test_latex_emission_is_deterministic():
    q = QuantifiedExpr(
        prefix=(QuantBlock("sup", "R", ("y",)), QuantBlock("inf", "N", ("n",))),
        matrix=X * Y - Polynomial.var("n") ** 2, free=("x",),
    )
    tex = to_latex(q)
    assert tex == to_latex(q)
    assert r"\sup" in tex and r"\inf" in tex and r"\mathbb{N}" in tex
    assert tex.count("{") == tex.count("}")


def test_parse_expr_roundtrip():
    p = expand(parse_expr("(x + 1)*(x - 1)"), 10)
    assert p == X**2 - 1


blocks = st.lists(
    st.tuples(st.sampled_from(["inf", "sup"]), st.sampled_from(["N", "Z", "R"]), st.integers(1, 3)),
    max_size=3,
)


@settings(max_examples=100, deadline=None)
@given(blocks, polys, st.booleans())
def test_json_roundtrip(bs, p, as_dag):
    prefix, used = [], 0
    for kind, dom, count in bs:
        names = tuple(f"v{used + i}" for i in range(count))
        used += count
        prefix.append(QuantBlock(kind, dom, names))
    bound = [v for b in prefix for v in b.vars]
    matrix = p
    for v in bound:
        matrix = matrix + Polynomial.var(v)
    if as_dag:
        from polyforge.expr import from_polynomial
        matrix = from_polynomial(matrix)
    q = QuantifiedExpr(prefix=tuple(prefix), matrix=matrix, free=("x", "y", "z"))
    assert from_json(to_json(q)) == q
    assert to_json(from_json(to_json(q))) == to_json(q)

"""Construction pipeline: ball polynomials, engineered polynomials, prefix stacking."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .ce import Pi02Spec, SemiOpenSet
from .coding import SpaceCode
from .expr import dag as D
from .expr.dag import Node
from .expr.poly import Polynomial
from .expr.quantified import QuantBlock, QuantifiedExpr
from .universal import UniversalPoly, universal

MIN_DEGREE = "mindeg"
MIN_VARS = "minvars"
MODES = (MIN_DEGREE, MIN_VARS)


class SpaceMismatch(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


def _names(stem: str, count: int) -> list[str]:
    return [f"{stem}{i}" for i in range(1, count + 1)]


# ball polynomial -------------------------------------------------------------------
def ball_poly(a: int, xs: Sequence[str] | None = None, ks: Sequence[str] | None = None) -> Polynomial:
    """r = k1^2 k2 - k3 * sum_i (k1 x_i - k_{3+i} + k3)^2."""
    if a < 1:
        raise ValueError("a >= 1")
    xs = list(xs or _names("x", a))
    ks = list(ks or _names("k", 3 + a))
    P = Polynomial.var
    k1, k2, k3 = P(ks[0]), P(ks[1]), P(ks[2])
    s = Polynomial.const(0)
    for i in range(a):
        s = s + (k1 * P(xs[i]) - P(ks[3 + i]) + k3) ** 2
    return (k1 * k1 * k2 - k3 * s).with_vars(xs + ks)


def _ball_dag(xs: Sequence[str], ks: Sequence[str]) -> tuple[Node, Node]:
    """(k1^2 k2, k3 * sum (k1 x_i - k_{3+i} + k3)^2) as DAG nodes."""
    k1, k2, k3 = D.var(ks[0]), D.var(ks[1]), D.var(ks[2])
    lead = D.mul(D.power(k1, 2), k2)
    squares = [D.power(k1 * D.var(x) - D.var(ks[3 + i]) + k3, 2) for i, x in enumerate(xs)]
    return lead, D.mul(k3, D.dag_sum(squares))


def J2(x, y) -> Node:
    x, y = D.as_node(x), D.as_node(y)
    s = x + y
    return s * (s + 1) + 2 * y


def JN(args: Sequence) -> Node:
    acc = J2(args[0], args[1])
    for a in args[2:]:
        acc = J2(acc, a)
    return acc


# engineered polynomial ----------------------------------------------------------------
@dataclass(frozen=True)
class EngineeredPoly:
    qexpr: QuantifiedExpr
    a: int
    m: int
    nu: int
    delta: int
    mode: str
    xs: tuple[str, ...]
    n: str
    ys: tuple[str, ...]
    ls: tuple[str, ...]
    ks: tuple[str, ...]
    universal: UniversalPoly = field(compare=False, repr=False)
    U: Optional[SemiOpenSet] = field(default=None, compare=False, repr=False)

    @property
    def matrix(self) -> Node:
        return self.qexpr.matrix

    @property
    def k_count(self) -> int:
        return len(self.ys) + len(self.ls) + len(self.ks)

    def report(self) -> dict:
        return {
            "a": self.a, "m": self.m, "nu": self.nu, "delta": str(self.delta),
            "mode": self.mode, "free": len(self.qexpr.free),
            "blocks": [[b.kind, b.domain, len(b.vars)] for b in self.qexpr.prefix],
            "k_count": self.k_count, "degree": str(self.qexpr.degree()),
        }


def _q_node(q: UniversalPoly, ys: Sequence[str], ell: str) -> Node:
    if q.kind == "virtual":
        # evaluation hook: the evaluator binds "q" to 0 (solvable) or 1
        return D.call("q", 0, [D.var(ell)])
    return q.instantiate([D.var(y) for y in ys], D.var(ell))


def engineered_matrix(q: UniversalPoly, xs, n, ys, ls, ks, mode: str) -> Node:
    lead, ball = _ball_dag(xs, ks)
    qn = _q_node(q, ys, ls[-1])
    if mode == MIN_DEGREE:
        chain = [D.power(D.var(ls[0]) - J2(D.var(n), D.var(ks[0])), 2)]
        for i in range(len(ls) - 1):
            chain.append(D.power(D.var(ls[i + 1]) - J2(D.var(ls[i]), D.var(ks[i + 1])), 2))
        inner = D.add(D.const(1), D.neg(qn), *[D.neg(c) for c in chain])
    elif mode == MIN_VARS:
        code = JN([D.var(n)] + [D.var(k) for k in ks])
        inner = D.add(D.const(1), D.neg(qn), D.neg(D.power(D.var(ls[0]) - code, 2)))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return D.add(D.mul(lead, inner), D.neg(ball))


def engineer(U: SemiOpenSet | int, q: UniversalPoly, mode: str = MIN_DEGREE,
             xs: Sequence[str] | None = None, n: str = "n", m: int = 0) -> EngineeredPoly:
    """g(x, n) = sup over (y, l, k) in N of p(x, n, y, l, k).

    ``U`` is a semicomputable subset of R^a x N, or just the dimension ``a``
    for symbolic emission.
    """
    if isinstance(U, int):
        a, Uset = U, None
    else:
        Uset = U
        factors = U.space.factors
        a = len(factors) - 1
        if a < 1 or U.space != SpaceCode.reals_times_nat(a):
            raise SpaceMismatch(f"U must live in R^a x N, got {U.space}")
    xs = tuple(xs or _names("x", a))
    if len(xs) != a:
        raise SpaceMismatch(f"{len(xs)} free names for a = {a}")
    ys = tuple(_names("y", q.nu))
    ls = tuple(_names("l", 3 + a)) if mode == MIN_DEGREE else ("l",)
    ks = tuple(_names("k", 3 + a))
    matrix = engineered_matrix(q, xs, n, ys, ls, ks, mode)
    inner = ys + ls + ks
    qexpr = QuantifiedExpr(
        prefix=(QuantBlock("sup", "N", inner),), matrix=matrix,
        free=xs + (n,), params=q.params,
    )
    return EngineeredPoly(qexpr, a, m, q.nu, q.delta, mode, xs, n, ys, ls, ks, q, Uset)


def matrix_decomposition(g: EngineeredPoly) -> tuple[Node, Node]:
    """(r, penalty) with matrix = r - k1^2 k2 * penalty, rebuilt independently."""
    lead, ball = _ball_dag(g.xs, g.ks)
    r = D.add(lead, D.neg(ball))
    qn = _q_node(g.universal, g.ys, g.ls[-1])
    if g.mode == MIN_DEGREE:
        chain = [D.power(D.var(g.ls[0]) - J2(D.var(g.n), D.var(g.ks[0])), 2)]
        for i in range(len(g.ls) - 1):
            chain.append(D.power(D.var(g.ls[i + 1]) - J2(D.var(g.ls[i]), D.var(g.ks[i + 1])), 2))
    else:
        chain = [D.power(D.var(g.ls[0]) - JN([D.var(g.n)] + [D.var(k) for k in g.ks]), 2)]
    return r, D.dag_sum([qn] + chain)


# Pi^0_2 indicators and stacking --------------------------------------------------------
def pi02_indicator(spec: Pi02Spec | int, q: UniversalPoly, mode: str = MIN_DEGREE,
                   xs: Sequence[str] | None = None) -> QuantifiedExpr:
    """f(x) = inf_n sup_k p(x, n, k)."""
    g = engineer(spec.U if isinstance(spec, Pi02Spec) else spec, q, mode, xs)
    inner = g.qexpr.prefix[0].vars
    return QuantifiedExpr(
        prefix=(QuantBlock("inf", "N", (g.n,)), QuantBlock("sup", "N", inner)),
        matrix=g.matrix, free=g.xs, params=g.qexpr.params, kernel=g,
    )


@dataclass(frozen=True)
class SigmaSpec:
    """A level-m set over R^a whose innermost kernel is a Pi^0_2 set over R^(a+m)."""

    m: int
    a: int
    kernel: Optional[Pi02Spec] = None
    complement: bool = False
    xs: Optional[tuple[str, ...]] = None
    zs: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m >= 1")
        if self.kernel is not None and self.kernel.a != self.a + self.m:
            raise SpaceMismatch("kernel must live over R^(a+m)")


def _rename_inner(g: EngineeredPoly, stem: str = "k") -> tuple[Node, tuple[str, ...]]:
    old = g.ys + g.ls + g.ks
    new = tuple(_names(stem, len(old)))
    mapping = {o: D.var(nn) for o, nn in zip(old, new)}
    return D.dag_substitute(g.matrix, mapping, strict=False), new


def stack(spec: SigmaSpec, q: UniversalPoly, mode: str = MIN_DEGREE) -> QuantifiedExpr:
    """Alternating real blocks over an engineered Pi^0_2 kernel.

    Odd m:  sup z1 inf z2 ... sup zm  inf_N n  sup_N k  [p]
    Even m: sup z1 inf z2 ... inf zm  sup_N n  inf_N k  [1 - p]
    With ``complement`` set the result is 1 - (that), written with the dual prefix.
    """
    a, m = spec.a, spec.m
    xs = tuple(spec.xs or _names("x", a))
    zs = tuple(spec.zs or _names("z", m))
    if len(xs) != a or len(zs) != m:
        raise SpaceMismatch("name lists do not match a and m")
    base = spec.kernel.U if spec.kernel is not None else a + m
    g = engineer(base, q, mode, xs + zs, m=m)
    matrix, ks = _rename_inner(g)
    blocks = [QuantBlock("sup" if i % 2 == 0 else "inf", "R", (z,)) for i, z in enumerate(zs)]
    if m % 2 == 1:
        blocks += [QuantBlock("inf", "N", (g.n,)), QuantBlock("sup", "N", ks)]
    else:
        blocks += [QuantBlock("sup", "N", (g.n,)), QuantBlock("inf", "N", ks)]
        matrix = D.add(D.const(1), D.neg(matrix))
    if spec.complement:
        blocks = [b.dual() for b in blocks]
        matrix = D.add(D.const(1), D.neg(matrix))
    return QuantifiedExpr(tuple(blocks), matrix, free=xs, params=g.qexpr.params, kernel=g)


# theorem presets -------------------------------------------------------------------------
PRESETS = {
    "vitali": dict(a=1, m=2, xs=("x",), zs=("y", "z"), complement=True),
    "wellorder": dict(a=2, m=2, xs=("x", "y"), zs=("z", "w"), complement=True),
    "inacc": dict(a=2, m=3, xs=("x", "y"), zs=("z", "w", "t"), complement=False),
    "banachtarski": dict(a=4, m=2, xs=("m", "x", "y", "z"), zs=("w", "t"), complement=True),
}


def preset(name: str, q: UniversalPoly | str = "jones58", mode: str = MIN_DEGREE,
           zero_based: bool = False) -> tuple[QuantifiedExpr, dict]:
    key = name.lower().replace("_", "").replace("-", "")
    if key not in PRESETS:
        raise ValueError(f"unknown preset {name!r}")
    cfg = PRESETS[key]
    if isinstance(q, str):
        q = universal(q)
    if zero_based:
        q = q.zero_based()
    spec = SigmaSpec(cfg["m"], cfg["a"], None, cfg["complement"], cfg["xs"], cfg["zs"])
    qe = stack(spec, q, mode)
    return qe, arity_report(qe, q, cfg["a"], cfg["m"], mode)


def arity_report(qe: QuantifiedExpr, q: UniversalPoly, a: int, m: int, mode: str) -> dict:
    k_count = len(qe.prefix[-1].vars)
    out = {
        "free": list(qe.free),
        "prefix": qe.signature(),
        "blocks": [[b.kind, b.domain, len(b.vars)] for b in qe.prefix],
        "k_count": k_count,
        "degree": str(qe.degree()),
        "var_count": len(qe.variables),
        "a": a, "m": m, "nu": q.nu, "delta": str(q.delta), "mode": mode,
    }
    if mode == MIN_VARS:
        out["k_count_outer_a"] = q.nu + 1 + 3 + a
    return out


def arity_table(a: int, m: int, nu: int, delta: int, mode: str = MIN_DEGREE) -> dict:
    """Closed-form bookkeeping for the stacked construction."""
    a_eff = a + m
    if mode == MIN_DEGREE:
        k = nu + 2 * (3 + a_eff)
        deg = max(3 + delta, 7)
    else:
        k = nu + 1 + 3 + a_eff
        deg = max(3 + delta, 11 + 2 * a_eff)
    return {"a": a, "m": m, "nu": nu, "delta": delta, "mode": mode, "k_count": k, "degree": deg}


# transformers ----------------------------------------------------------------------------
def foursquare_transform(q: QuantifiedExpr) -> QuantifiedExpr:
    """Replace each N-bound v by v_a^2 + v_b^2 + v_c^2 + v_d^2 with Z-bound v_a..v_d."""
    blocks, bindings = [], {}
    poly = isinstance(q.matrix, Polynomial)
    for b in q.prefix:
        if b.domain != "N":
            blocks.append(b)
            continue
        new = []
        for v in b.vars:
            parts = [f"{v}_{s}" for s in "abcd"]
            new += parts
            if poly:
                bindings[v] = sum((Polynomial.var(p) ** 2 for p in parts), Polynomial.const(0))
            else:
                bindings[v] = D.dag_sum(D.power(D.var(p), 2) for p in parts)
        blocks.append(QuantBlock(b.kind, "Z", tuple(new)))
    if poly:
        present = q.matrix.variables()
        matrix = q.matrix.substitute({v: e for v, e in bindings.items() if v in present})
    else:
        matrix = D.dag_substitute(q.matrix, bindings, strict=False)
    return q.replace(prefix=tuple(blocks), matrix=matrix)


def trig_relaxation(q: QuantifiedExpr, beta: str = "beta", gamma: str = "gamma") -> QuantifiedExpr:
    """inf_{y in Z} sup_{z in Z^k} g  ->  inf_{y in R} sup_{beta, z in R} inf_{gamma in R} [...]."""
    if len(q.prefix) < 2:
        raise ShapeMismatch("need at least two blocks")
    inf_b, sup_b = q.prefix[-2], q.prefix[-1]
    if (inf_b.kind, inf_b.domain, sup_b.kind, sup_b.domain) != ("inf", "Z", "sup", "Z"):
        raise ShapeMismatch("innermost blocks must be inf over Z then sup over Z")
    for name in (beta, gamma):
        if name in q.free or name in q.bound or name in q.params:
            raise ShapeMismatch(f"name {name!r} already in use")
    g = D.as_node(q.matrix)
    b, c = D.var(beta), D.var(gamma)
    y_pen = D.dag_sum(D.power(D.sinpi(D.var(y)), 2) for y in inf_b.vars)
    z_pen = D.dag_sum(D.power(D.sinpi(D.var(z)), 2) for z in sup_b.vars)
    matrix = D.add(g, D.mul(D.power(b, 2), y_pen), D.neg(D.mul(D.power(c, 2), z_pen)))
    blocks = q.prefix[:-2] + (
        QuantBlock("inf", "R", inf_b.vars),
        QuantBlock("sup", "R", (beta,) + sup_b.vars),
        QuantBlock("inf", "R", (gamma,)),
    )
    return q.replace(prefix=blocks, matrix=matrix)

"""Exact and budgeted evaluation of quantified expressions.

Generic expressions are evaluated by nested bounded search over rational
grids. Engineered expressions built over a virtual universal polynomial are
instead solved from their case structure: every matrix value is <= 0 unless
the l-chain is correct and the oracle accepts the code, in which case the
value is the ball polynomial r(x, k).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

import mpmath
from mpmath import iv
from mpmath.libmp import finf, fnan, fninf, fzero, to_rational

from . import coding as C
from .ce import Semi, SemiOpenSet, ball_of, ball_poly_value, member_semidecide
from .expr import dag as D
from .expr.dag import Node, NotPolynomial
from .expr.poly import Polynomial
from .expr.quantified import QuantifiedExpr


class AssignmentMismatch(ValueError):
    pass


# budgets and verdicts -------------------------------------------------------------------
@dataclass(frozen=True)
class Budget:
    nat_bound: int = 64
    real_step: Fraction = Fraction(1, 2)
    real_bound: Fraction = Fraction(2)
    threshold: Fraction = Fraction(10**6)
    stages: int = 3
    ce_budget: int = 1000
    n_max: int = 8

    def __post_init__(self):
        if self.nat_bound < 1:
            raise ValueError("nat_bound >= 1")
        if self.threshold <= 1:
            raise ValueError("threshold > 1")
        if self.stages < 1:
            raise ValueError("stages >= 1")
        if self.real_step <= 0:
            raise ValueError("real_step > 0")

    def replace(self, **kw) -> "Budget":
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(kw)
        return Budget(**data)


VALUE_ZERO = "ValueZero"
VALUE_ONE = "ValueOne"
FINITE = "Finite"
EXCEEDS = "ExceedsThreshold"
LOWER = "LowerBoundSoFar"
UPPER = "UpperBoundSoFar"


@dataclass(frozen=True)
class ExtRealClass:
    kind: str
    value: Optional[Fraction] = None
    history: tuple = field(default=(), compare=False)

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.value is not None:
            out["value"] = str(self.value)
        return out

    def __str__(self):
        return self.kind if self.value is None else f"{self.kind}({self.value})"


def classify(values: Sequence[Fraction], sup_rooted: bool, threshold) -> ExtRealClass:
    """Verdict from per-stage values (one per budget stage, in increasing order)."""
    hist = tuple(values)
    final = values[-1]
    if (sup_rooted and len(values) >= 3 and values[-3] < values[-2] < values[-1]
            and final > threshold):
        return ExtRealClass(EXCEEDS, Fraction(threshold), hist)
    if len(values) >= 2 and values[-1] == values[-2]:
        if final == 0:
            return ExtRealClass(VALUE_ZERO, None, hist)
        if final == 1:
            return ExtRealClass(VALUE_ONE, None, hist)
        return ExtRealClass(FINITE, final, hist)
    return ExtRealClass(LOWER if sup_rooted else UPPER, final, hist)


# exact evaluation -----------------------------------------------------------------------
def sinpi_exact(r: Fraction) -> Fraction:
    """sin(pi r) when it is rational (denominator 1, 2 or 6), else NotPolynomial."""
    r = Fraction(r) % 2
    table = {
        Fraction(0): 0, Fraction(1): 0, Fraction(1, 2): 1, Fraction(3, 2): -1,
        Fraction(1, 6): Fraction(1, 2), Fraction(5, 6): Fraction(1, 2),
        Fraction(7, 6): Fraction(-1, 2), Fraction(11, 6): Fraction(-1, 2),
    }
    if r in table:
        return Fraction(table[r])
    raise NotPolynomial(f"sin(pi*{r}) is irrational")


def compile_dag(root: Node, funcs: Mapping[str, Callable] | None = None) -> Callable[[Mapping], Fraction]:
    """Exact evaluator with the traversal order computed once."""
    nodes = D.postorder(root)
    index = {id(n): i for i, n in enumerate(nodes)}
    plan = [(n.op, n.payload, tuple(index[id(a)] for a in n.args)) for n in nodes]
    funcs = dict(funcs or {})

    def run(point: Mapping) -> Fraction:
        vals: list = [None] * len(plan)
        for i, (op, payload, args) in enumerate(plan):
            if op == "const":
                v = Fraction(payload)
            elif op == "var":
                try:
                    v = Fraction(point[payload])
                except KeyError:
                    raise D.UnboundVariable(payload) from None
            elif op == "add":
                v = sum((vals[j] for j in args), Fraction(0))
            elif op == "mul":
                v = Fraction(1)
                for j in args:
                    v *= vals[j]
                    if not v:
                        break
            elif op == "neg":
                v = -vals[args[0]]
            elif op == "pow":
                b = vals[args[0]]
                if payload.bit_length() > 24 and b not in (0, 1, -1):
                    raise OverflowError("exponent too large for exact evaluation")
                v = b ** payload
            elif op == "sinpi":
                v = sinpi_exact(vals[args[0]])
            else:
                v = Fraction(funcs[payload[0]](*[vals[j] for j in args]))
            vals[i] = v
        return vals[-1]

    return run


def eval_exact(p, point: Mapping, funcs: Mapping[str, Callable] | None = None) -> Fraction:
    if isinstance(p, Polynomial):
        return p.evaluate(point)
    return compile_dag(D.as_node(p), funcs)(point)


# generic bounded search -------------------------------------------------------------------
def _grid(domain: str, nat_bound: int, b: Budget) -> list:
    if domain == "N":
        return list(range(nat_bound + 1))
    if domain == "Z":
        return [0] + [s * i for i in range(1, nat_bound + 1) for s in (1, -1)]
    steps = int(b.real_bound / b.real_step)
    return [i * b.real_step for i in range(-steps, steps + 1)]


def _search(q: QuantifiedExpr, f: Callable, assign: dict, nat_bound: int, b: Budget) -> Fraction:
    def rec(level: int) -> Fraction:
        if level == len(q.prefix):
            return f(assign)
        block = q.prefix[level]
        grid = _grid(block.domain, nat_bound, b)
        best = None
        for combo in itertools.product(grid, repeat=len(block.vars)):
            assign.update(zip(block.vars, combo))
            v = rec(level + 1)
            if best is None or (v > best if block.kind == "sup" else v < best):
                best = v
        return best

    return rec(0)


def _stage_bounds(b: Budget) -> list[int]:
    return [max(1, b.nat_bound >> (b.stages - 1 - s)) for s in range(b.stages)]


def sup_inf_eval(q: QuantifiedExpr, free: Mapping, b: Budget = Budget(),
                 funcs: Mapping[str, Callable] | None = None) -> ExtRealClass:
    """Budgeted value of ``q`` at the free assignment, as a verdict."""
    if set(free) != set(q.free):
        raise AssignmentMismatch(f"expected free variables {q.free}, got {tuple(free)}")
    kernel = q.kernel
    if kernel is not None and getattr(kernel, "universal", None) is not None \
            and kernel.universal.kind == "virtual":
        solver = EngineeredSolver(kernel)
        shape = [(bl.kind, bl.domain) for bl in q.prefix]
        xs = tuple(Fraction(free[x]) for x in kernel.xs)
        if shape == [("sup", "N")] and set(q.free) == set(kernel.xs) | {kernel.n}:
            return solver.value(xs, int(free[kernel.n]), b)
        if shape == [("inf", "N"), ("sup", "N")] and q.free == kernel.xs:
            return solver.indicator(xs, b)
    params = {p: 0 for p in q.params}
    f = compile_dag(D.as_node(q.matrix), funcs) if not isinstance(q.matrix, Polynomial) \
        else (lambda pt, m=q.matrix: m.evaluate(pt))
    sup_rooted = not q.prefix or q.prefix[0].kind == "sup"
    values = []
    for nb in _stage_bounds(b):
        assign = {k: Fraction(v) for k, v in free.items()}
        assign.update(params)
        values.append(_search(q, f, assign, nb, b))
    return classify(values, sup_rooted, b.threshold)


def brute_force(q: QuantifiedExpr, free: Mapping, nat_bound: int, b: Budget = Budget(),
                funcs=None) -> Fraction:
    """Single-stage exhaustive value (the raw max/min over the searched grid)."""
    f = compile_dag(D.as_node(q.matrix), funcs) if not isinstance(q.matrix, Polynomial) \
        else (lambda pt, m=q.matrix: m.evaluate(pt))
    assign = {k: Fraction(v) for k, v in free.items()}
    assign.update({p: 0 for p in q.params})
    return _search(q, f, assign, nat_bound, b)


# engineered solver ------------------------------------------------------------------------
class SolverInconsistency(RuntimeError):
    pass


class EngineeredSolver:
    """Case-structured sup of an engineered matrix over a virtual universal."""

    def __init__(self, g):
        if g.universal.kind != "virtual":
            raise TypeError("structured solving needs a virtual universal polynomial")
        if g.U is None:
            raise TypeError("engineered polynomial carries no semicomputable set")
        self.g = g
        self.q = g.universal
        self.U: SemiOpenSet = g.U
        self.a = g.a

    # the matrix at a concrete (x, n, k) with the l-chain filled in correctly
    def chain(self, n: int, k: Sequence[int]) -> list[int]:
        if self.g.mode == "mindeg":
            ls = [C.pair2(n, k[0])]
            for i in range(1, len(self.g.ls)):
                ls.append(C.pair2(ls[-1], k[i]))
            return ls
        return [C.pairN((n,) + tuple(k))]

    def point(self, xs, n: int, k: Sequence[int]) -> dict:
        pt = dict(zip(self.g.xs, xs))
        pt[self.g.n] = n
        pt.update(zip(self.g.ks, k))
        pt.update(zip(self.g.ls, self.chain(n, k)))
        return pt

    def matrix_value(self, pt: Mapping, b: Budget) -> Fraction:
        """Full DAG evaluation with the oracle deciding q (0 if solvable, else 1)."""
        f = compile_dag(self.g.matrix, {"q": lambda ell: 0 if self.q.solvable(int(ell), b.ce_budget) else 1})
        return f(pt)

    def accepted(self, n: int, k: Sequence[int], b: Budget) -> bool:
        return self.q.solvable(C.pairN((n,) + tuple(k)), b.ce_budget)

    def _boxes(self, xs, n: int, b: Budget) -> list:
        pt = tuple(xs) + (n - 1,)
        out = []
        for t in range(b.ce_budget):
            reg = self.U.region(t)
            if reg is not None and reg.contains(pt):
                out.append(reg)
        return out

    def _best_ball(self, xs, n: int, boxes, B: int) -> Optional[tuple[Fraction, tuple[int, ...]]]:
        best = None
        a = self.a
        for reg in boxes:
            ivs = reg.parts[:a]
            for rounding in itertools.product((math.floor, math.ceil), repeat=a):
                k1 = B
                offs = [rnd(k1 * x) for rnd, x in zip(rounding, xs)]
                center = [Fraction(o, k1) for o in offs]
                if not all(iv_.lo < c < iv_.hi for iv_, c in zip(ivs, center)):
                    continue
                dmin2 = min(min(c - iv_.lo, iv_.hi - c) ** 2 for iv_, c in zip(ivs, center))
                dist2 = sum((x - c) ** 2 for x, c in zip(xs, center))
                k3 = max(B, max(-o for o in offs))
                k2 = math.ceil(dmin2 * k3) - 1
                if k2 < 0 or Fraction(k2, k3) <= dist2:
                    continue
                k = (k1, k2, k3) + tuple(o + k3 for o in offs)
                val = ball_poly_value(xs, k)
                if best is None or val > best[0]:
                    best = (val, k)
        return best

    def value(self, xs, n: int, b: Budget) -> ExtRealClass:
        xs = tuple(Fraction(x) for x in xs)
        if len(xs) != self.a:
            raise AssignmentMismatch(f"expected {self.a} coordinates")
        if n == 0:
            k = (1, 1, 0) + (0,) * self.a
            if not self.accepted(0, k, b):
                raise SolverInconsistency("oracle rejects the n = 0 code")
            v = self.matrix_value(self.point(xs, 0, k), b)
            if v != 1:
                raise SolverInconsistency(f"n = 0 witness evaluates to {v}")
            return ExtRealClass(VALUE_ONE, None, (v,))
        base = (0, 0, 0) + (0,) * self.a
        if not self.accepted(n, base, b) or self.matrix_value(self.point(xs, n, base), b) != 0:
            raise SolverInconsistency("the zero witness for n > 0 is not accepted")
        boxes = self._boxes(xs, n, b)
        if not boxes:
            # every accepted ball lies in an enumerated box that misses x, so r < 0 there
            return ExtRealClass(VALUE_ZERO, None, (Fraction(0),))
        values: list[Fraction] = []
        best = Fraction(0)
        for s in range(b.stages):
            B = b.nat_bound << s
            cand = self._best_ball(xs, n, boxes, B)
            if cand is not None and cand[0] > best:
                val, k = cand
                if not self.accepted(n, k, b):
                    raise SolverInconsistency(f"oracle rejects ball code {k}")
                p = self.matrix_value(self.point(xs, n, k), b)
                if p != val:
                    raise SolverInconsistency(f"matrix value {p} != r = {val}")
                best = val
            values.append(best)
            verdict = classify(values, True, b.threshold)
            if verdict.kind == EXCEEDS:
                return verdict
        if best == 0:
            return ExtRealClass(LOWER, Fraction(0), tuple(values))
        return classify(values, True, b.threshold)

    def indicator(self, xs, b: Budget) -> ExtRealClass:
        """inf over n <= n_max of g(x, n)."""
        verdicts = [self.value(xs, n, b) for n in range(b.n_max + 1)]
        kinds = [v.kind for v in verdicts]
        if VALUE_ZERO in kinds:
            return ExtRealClass(VALUE_ZERO, None, tuple(kinds))
        if all(k == EXCEEDS for k in kinds[1:]):
            return ExtRealClass(VALUE_ONE, None, tuple(kinds))
        lows = [v.value for v in verdicts if v.kind == LOWER]
        return ExtRealClass(UPPER, min([Fraction(1)] + lows), tuple(kinds))


# trichotomy verification -------------------------------------------------------------------
def expected_case(U: SemiOpenSet, xs, n: int, b: Budget) -> Optional[str]:
    if n == 0:
        return VALUE_ONE
    pt = tuple(Fraction(x) for x in xs) + (n - 1,)
    if member_semidecide(U, pt, b.ce_budget) == Semi.YES:
        return EXCEEDS
    if U.denotes is not None and U.denotes(pt):
        return None  # member, but not witnessed within the budget
    return VALUE_ZERO


def verify_trichotomy(g, U: SemiOpenSet, samples: Sequence[Sequence], n_max: int,
                      b: Budget = Budget(), thresholds: Sequence = ()) -> dict:
    """Compare structured sup verdicts with the membership case split."""
    solver = EngineeredSolver(g)
    thresholds = list(thresholds) or [b.threshold]
    agreements, disagreements, skips = 0, [], []
    rows = []
    for xs in samples:
        for n in range(n_max + 1):
            want = expected_case(U, xs, n, b)
            if want is None:
                skips.append({"x": [str(x) for x in xs], "n": n})
                continue
            got = [solver.value(xs, n, b.replace(threshold=Fraction(T))) for T in thresholds]
            ok = all(v.kind == want for v in got)
            row = {"x": [str(x) for x in xs], "n": n, "expected": want, "got": [str(v) for v in got]}
            rows.append(row)
            if ok:
                agreements += 1
            else:
                disagreements.append(row)
    return {
        "set": U.name, "universal": g.universal.name, "n_max": n_max,
        "nat_bound": b.nat_bound, "thresholds": [str(T) for T in thresholds],
        "agreements": agreements, "disagreements": disagreements, "skips": skips,
        "rows": rows,
    }


# interval evaluation ----------------------------------------------------------------------
def _raw_to_fraction(raw) -> Fraction:
    if raw in (fzero,):
        return Fraction(0)
    if raw in (finf, fninf, fnan):
        raise OverflowError("unbounded interval endpoint")
    p, q = to_rational(raw)
    return Fraction(int(p), int(q))


def mpf_to_fraction(x) -> Fraction:
    if hasattr(x, "_mpi_"):
        lo, hi = x._mpi_
        if lo != hi:
            raise ValueError("not a point interval")
        return _raw_to_fraction(lo)
    return _raw_to_fraction(mpmath.mpf(x)._mpf_)


def fraction_interval(q: Fraction):
    q = Fraction(q)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def interval_bounds(x) -> tuple[Fraction, Fraction]:
    lo, hi = iv.mpf(x)._mpi_
    return _raw_to_fraction(lo), _raw_to_fraction(hi)


def interval_contains(x, q) -> bool:
    lo, hi = interval_bounds(x)
    return lo <= Fraction(q) <= hi


def interval_width(x) -> Fraction:
    lo, hi = interval_bounds(x)
    return hi - lo


def _as_interval(v):
    if isinstance(v, tuple):
        lo, hi = Fraction(v[0]), Fraction(v[1])
        if lo > hi:
            raise ValueError("empty interval")
        return None if lo != hi else lo, iv.mpf([fraction_interval(lo).a, fraction_interval(hi).b])
    q = Fraction(v)
    return q, fraction_interval(q)


def interval_eval(e, box: Mapping, precision: int = 128, funcs: Mapping[str, Callable] | None = None):
    """Outward-rounded enclosure of ``e`` over ``box`` (values: rationals or (lo, hi) pairs).

    Exact rational subresults are tracked alongside the intervals, so sin(pi r)
    at rational r is reduced modulo 2 before any rounding happens.
    """
    root = D.as_node(e) if not isinstance(e, Polynomial) else D.from_polynomial(e)
    funcs = funcs or {}
    old = iv.prec
    iv.prec = precision
    try:
        memo: dict[int, tuple] = {}
        for node in D.postorder(root):
            op = node.op
            kids = [memo[id(a)] for a in node.args]
            exact = None
            if op == "const":
                exact = Fraction(node.payload)
            elif op == "var":
                if node.payload not in box:
                    raise D.UnboundVariable(node.payload)
                exact, ival = _as_interval(box[node.payload])
                memo[id(node)] = (exact, ival)
                continue
            elif all(k[0] is not None for k in kids) and op in ("add", "mul", "neg", "pow"):
                vals = [k[0] for k in kids]
                if op == "add":
                    exact = sum(vals, Fraction(0))
                elif op == "mul":
                    exact = math.prod(vals, start=Fraction(1))
                elif op == "neg":
                    exact = -vals[0]
                elif node.payload.bit_length() <= 16 or vals[0] in (0, 1, -1):
                    exact = vals[0] ** node.payload
            if exact is not None:
                memo[id(node)] = (exact, fraction_interval(exact))
                continue
            ivs = [k[1] for k in kids]
            if op == "add":
                ival = ivs[0]
                for x in ivs[1:]:
                    ival = ival + x
            elif op == "mul":
                ival = ivs[0]
                for x in ivs[1:]:
                    ival = ival * x
            elif op == "neg":
                ival = -ivs[0]
            elif op == "pow":
                k = node.payload
                if k.bit_length() > 24:
                    raise OverflowError("exponent too large for interval evaluation")
                ival = ivs[0] ** k
            elif op == "sinpi":
                r = kids[0][0]
                if r is not None:
                    r = r % 2
                    try:
                        exact = sinpi_exact(r)
                        memo[id(node)] = (exact, fraction_interval(exact))
                        continue
                    except NotPolynomial:
                        ival = iv.sin(iv.pi * fraction_interval(r))
                else:
                    ival = iv.sin(iv.pi * ivs[0])
            else:
                name = node.payload[0]
                if name not in funcs:
                    raise D.UnboundVariable(f"function {name}")
                ival = funcs[name](*ivs)
            memo[id(node)] = (None, ival)
        exact, ival = memo[id(root)]
        return ival
    finally:
        iv.prec = old

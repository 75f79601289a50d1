"""Hash-consed expression DAGs.

Nodes are interned: building the same subterm twice yields the same object,
so repeated subterms share storage and per-node memo tables stay small. The
exponent of a power node is an arbitrary-precision natural, which is what
lets ``x5^(5^60)`` exist without expansion.
"""

from __future__ import annotations

import weakref
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .poly import MINUS_INF, Polynomial, UnboundVariable, UnknownVariable


class NotPolynomial(TypeError):
    """Raised when a polynomial-only query meets ``sinpi`` nodes."""


class BudgetExceeded(RuntimeError):
    pass


_TABLE: "weakref.WeakValueDictionary[tuple, Node]" = weakref.WeakValueDictionary()

OPS = ("const", "var", "add", "mul", "neg", "pow", "sinpi", "call")


class Node:
    """One interned DAG node.

    ``payload`` holds the integer for ``const``, the name for ``var``, the
    exponent for ``pow`` and ``(name, degree)`` for ``call`` (an opaque
    polynomial symbol of known degree, used for universal polynomials whose
    body is not available).
    """

    __slots__ = ("op", "payload", "args", "__weakref__")

    def __new__(cls, op: str, payload=None, args: tuple = ()):
        key = (op, payload, tuple(id(a) for a in args))
        node = _TABLE.get(key)
        if node is not None:
            return node
        node = object.__new__(cls)
        node.op = op
        node.payload = payload
        node.args = tuple(args)
        _TABLE[key] = node
        return node

    def __init__(self, *a, **k):
        pass

    def __reduce__(self):
        return (Node, (self.op, self.payload, self.args))

    # operator sugar ----------------------------------------------------
    def __add__(self, other):
        return add(self, as_node(other))

    def __radd__(self, other):
        return add(as_node(other), self)

    def __sub__(self, other):
        return add(self, neg(as_node(other)))

    def __rsub__(self, other):
        return add(as_node(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_node(other))

    def __rmul__(self, other):
        return mul(as_node(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, k: int):
        return power(self, k)

    def __repr__(self):
        from .emit import dag_text

        text = dag_text(self)
        if len(text) > 80:
            text = text[:77] + "..."
        return f"Node({text})"


def const(c: int) -> Node:
    return Node("const", int(c))


def var(name: str) -> Node:
    return Node("var", str(name))


def add(*args: Node) -> Node:
    if len(args) == 1:
        return args[0]
    return Node("add", None, args)


def mul(*args: Node) -> Node:
    if len(args) == 1:
        return args[0]
    return Node("mul", None, args)


def neg(a: Node) -> Node:
    return Node("neg", None, (a,))


def power(a: Node, k: int) -> Node:
    k = int(k)
    if k < 0:
        raise ValueError("negative exponent")
    return Node("pow", k, (as_node(a),))


def sinpi(a) -> Node:
    """sin(pi * a), the only opaque transcendental symbol."""
    return Node("sinpi", None, (as_node(a),))


def call(name: str, degree: int, args: Iterable) -> Node:
    return Node("call", (name, int(degree)), tuple(as_node(a) for a in args))


def dag_sum(items: Iterable) -> Node:
    items = [as_node(i) for i in items]
    if not items:
        return const(0)
    return add(*items)


def dag_prod(items: Iterable) -> Node:
    items = [as_node(i) for i in items]
    if not items:
        return const(1)
    return mul(*items)


def as_node(x) -> Node:
    if isinstance(x, Node):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not an expression")
    if isinstance(x, int):
        return const(x)
    if isinstance(x, str):
        return var(x)
    if isinstance(x, Polynomial):
        return from_polynomial(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a DAG node")


def from_polynomial(p: Polynomial) -> Node:
    terms = []
    for mono, c in sorted(p, key=lambda t: t[0]):
        factors = [power(var(v), e) if e > 1 else var(v) for v, e in mono]
        if c != 1 or not factors:
            factors.insert(0, const(c))
        terms.append(dag_prod(factors))
    return dag_sum(terms)


# traversal ---------------------------------------------------------------
def postorder(root: Node) -> list[Node]:
    """Distinct nodes, children before parents."""
    out: list[Node] = []
    seen: set[int] = set()
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            out.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for child in reversed(node.args):
            if id(child) not in seen:
                stack.append((child, False))
    return out


def variables(root: Node) -> list[str]:
    """Variable names in first-occurrence order."""
    names = []
    seen = set()
    for node in postorder(root):
        if node.op == "var" and node.payload not in seen:
            seen.add(node.payload)
            names.append(node.payload)
    return names


def calls(root: Node) -> list[Node]:
    return [n for n in postorder(root) if n.op == "call"]


def has_trig(root: Node) -> bool:
    return any(n.op == "sinpi" for n in postorder(root))


def size(root: Node) -> int:
    return len(postorder(root))


# degree ------------------------------------------------------------------
def _max_deg(ds):
    best = MINUS_INF
    for d in ds:
        if d > best:
            best = d
    return best


def dag_degree(root: Node, constants: Iterable[str] = ()):
    """Syntactic total degree: max over sums, sum over products, times for powers.

    Exact whenever no leading terms cancel (always the case for the sums of
    squares built here); otherwise an upper bound.
    """
    skip = set(constants)
    memo: dict[int, object] = {}
    for node in postorder(root):
        op = node.op
        if op == "const":
            d = 0 if node.payload != 0 else MINUS_INF
        elif op == "var":
            d = 0 if node.payload in skip else 1
        elif op == "add":
            d = _max_deg(memo[id(a)] for a in node.args)
        elif op == "mul":
            ds = [memo[id(a)] for a in node.args]
            d = MINUS_INF if any(x is MINUS_INF for x in ds) else sum(ds)
        elif op == "neg":
            d = memo[id(node.args[0])]
        elif op == "pow":
            b = memo[id(node.args[0])]
            if node.payload == 0:
                d = 0
            elif b is MINUS_INF:
                d = MINUS_INF
            else:
                d = b * node.payload
        elif op == "call":
            inner = _max_deg(memo[id(a)] for a in node.args)
            if inner is MINUS_INF or inner == 0:
                d = 0
            else:
                d = node.payload[1] * inner
        else:
            raise NotPolynomial("sin(pi*.) has no polynomial degree")
        memo[id(node)] = d
    return memo[id(root)]


# expansion ---------------------------------------------------------------
def expand(root: Node, term_budget: int) -> Polynomial:
    """Fully expand ``root``.

    ``term_budget`` caps both the number of stored terms and the degree of
    every intermediate result (a dense slice of degree d carries d+1
    coefficients, so a degree beyond the budget is already out of reach).
    """
    if term_budget <= 0:
        raise ValueError("term_budget must be positive")

    def check(p: Polynomial) -> Polynomial:
        if len(p) > term_budget:
            raise BudgetExceeded(f"{len(p)} terms exceed budget {term_budget}")
        d = p.degree()
        if d is not MINUS_INF and d > term_budget:
            raise BudgetExceeded(f"degree {d} exceeds budget {term_budget}")
        return p

    order = variables(root)
    memo: dict[int, Polynomial] = {}
    for node in postorder(root):
        op = node.op
        if op == "const":
            p = Polynomial.const(node.payload)
        elif op == "var":
            p = Polynomial.var(node.payload)
        elif op == "add":
            p = Polynomial.const(0)
            for a in node.args:
                p = check(p + memo[id(a)])
        elif op == "mul":
            p = Polynomial.const(1)
            for a in node.args:
                p = check(p * memo[id(a)])
        elif op == "neg":
            p = -memo[id(node.args[0])]
        elif op == "pow":
            base = memo[id(node.args[0])]
            k = node.payload
            if len(base) == 1:
                (mono, c), = base
                if k > term_budget and (mono or c not in (0, 1, -1)):
                    raise BudgetExceeded(f"power {k} exceeds budget {term_budget}")
                p = check(base ** k)
            else:
                if k > term_budget:
                    raise BudgetExceeded(f"power {k} exceeds budget {term_budget}")
                p = Polynomial.const(1)
                for _ in range(k):
                    p = check(p * base)
        else:
            raise NotPolynomial(f"cannot expand '{op}' node")
        memo[id(node)] = p
    return memo[id(root)].with_vars(order)


# substitution ------------------------------------------------------------
def dag_substitute(root: Node, bindings: Mapping[str, object], strict: bool = True) -> Node:
    """Capture-free simultaneous substitution of expressions for variables."""
    if strict:
        present = set(variables(root))
        for v in bindings:
            if v not in present:
                raise UnknownVariable(v)
    subs = {v: as_node(e) for v, e in bindings.items()}
    memo: dict[int, Node] = {}
    for node in postorder(root):
        if node.op == "var":
            new = subs.get(node.payload, node)
        elif node.args:
            args = tuple(memo[id(a)] for a in node.args)
            new = node if args == node.args else Node(node.op, node.payload, args)
        else:
            new = node
        memo[id(node)] = new
    return memo[id(root)]


def rename(root: Node, mapping: Mapping[str, str]) -> Node:
    present = set(variables(root))
    return dag_substitute(
        root, {a: var(b) for a, b in mapping.items() if a in present}, strict=False
    )


# exact evaluation ----------------------------------------------------------
def dag_eval(
    root: Node,
    point: Mapping[str, object],
    funcs: Mapping[str, Callable] | None = None,
) -> Fraction:
    """Exact rational value. ``call`` nodes are resolved through ``funcs``."""
    funcs = funcs or {}
    memo: dict[int, Fraction] = {}
    for node in postorder(root):
        op = node.op
        if op == "const":
            v = Fraction(node.payload)
        elif op == "var":
            try:
                v = Fraction(point[node.payload])
            except KeyError:
                raise UnboundVariable(node.payload) from None
        elif op == "add":
            v = sum((memo[id(a)] for a in node.args), Fraction(0))
        elif op == "mul":
            v = Fraction(1)
            for a in node.args:
                v *= memo[id(a)]
                if v == 0:
                    break
        elif op == "neg":
            v = -memo[id(node.args[0])]
        elif op == "pow":
            b = memo[id(node.args[0])]
            k = node.payload
            if b in (0, 1) or k == 0:
                v = Fraction(1) if k == 0 else b
            elif b == -1:
                v = Fraction(-1 if k % 2 else 1)
            elif k.bit_length() > 24:
                raise OverflowError(f"exponent {k} too large for exact evaluation")
            else:
                v = b ** k
        elif op == "call":
            name = node.payload[0]
            if name not in funcs:
                raise UnboundVariable(f"function {name}")
            v = Fraction(funcs[name](*[memo[id(a)] for a in node.args]))
        else:
            raise NotPolynomial("sin(pi*.) has no exact rational value in general")
        memo[id(node)] = v
    return memo[id(root)]

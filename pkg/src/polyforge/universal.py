"""Positively universal polynomials.

Three kinds are supported:

* ``symbolic``: a concrete DAG body (Jones's 28-unknown polynomial), with the
  parameters m1, m2, m3 kept as symbols;
* ``metadata``: only (unknowns, degree) is known; the body is an opaque call
  node of the right degree so that arity and degree bookkeeping still runs;
* ``virtual``: no unknowns, and "solvable at l" is budgeted membership of l in
  a c.e. set. This is an evaluation hook, not a polynomial.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

from .ce import CeSet
from .expr import dag as D
from .expr.dag import Node
from .expr.emit import parse_expr

FIGURE1_TEXT = """\
(x1*x2*x3^2 + x4 - (x5 - n*m3)*x6^2)^2 + (x6 - x5^(5^60))^2 + (x7 + x6^4 - 1 - x7*x5^5)^2
+ (x8 + 2*m1 - x5^5)^2 + (x2 - m2 - x9*x8)^2 + (x1 - m3 - x10*x8)^2 + (x11 - x6^16)^2
+ ([x3 + x1*x6^3 + x2*x6^5 + (2*(x1 - m1*x7)*(1 + n*x5^5 + x3)^4 + x7*x5^5 + x7*x5^5*x6^4)*x6^4]*[x11^2 - x11]
   + [x6^3 - x5*x2 + x2 + x8*x7*x6^3 + (x5^5 - 2)*x6^5]*[x11^2 - 1] - x12)^2
+ (x13 - 2*x14*x15^2*x12^2*x11^2)^2 + (x13^2*x16^2 - x16^2 + 1 - x17^2)^2
+ (4*(x18 - x16*x15*x11^2)^2 + x19 - x16^2)^2 + (x16 - x12 - 1 - x20*x13 + x20)^2
+ (x21 - (x14*x11^2 + 1)*x12*x15*x11^2)^2 + (x18 - 2*x12 - 1 - x22)^2
+ (x23 - x5*x14 - x18*x21 + 2*x18 - 4*x21*x24 + 5*x24)^2
+ (x23^2 - (x21^2 - 1)*x18^2 - 1)^2 + (x25^2 - (x21^2 - 1)*x26^2*x18^4 - 1)^2
+ ((x23 + x27*x25)^2 - ((x21 + x25^2*(x23^2 - x21))^2 - 1)*(2*x12 + 1 + x28*x18)^2 - 1)^2
"""

FIGURE1_SHA256 = "b5837d01284e742a49c8e6e7bbb51ca477a6b406e889d6c7eb286897a98e5f2a"

FIGURE1_UNKNOWNS = tuple(f"x{i}" for i in range(1, 29))
FIGURE1_ARG = "n"
FIGURE1_PARAMS = ("m1", "m2", "m3")


class ChecksumMismatch(RuntimeError):
    pass


def figure1_checksum(text: str = FIGURE1_TEXT) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


@lru_cache(maxsize=1)
def _figure1() -> Node:
    if figure1_checksum() != FIGURE1_SHA256:
        raise ChecksumMismatch("Figure 1 transcription does not match its checksum")
    return parse_expr(FIGURE1_TEXT)


def jones_figure1() -> Node:
    """Jones's 28-unknown universal polynomial in x1..x28 with arguments n, m1, m2, m3."""
    return _figure1()


@dataclass(frozen=True)
class JonesMeta:
    records: frozenset

    def degree_for(self, unknowns: int) -> int:
        for nu, delta in self.records:
            if nu == unknowns:
                return delta
        raise KeyError(unknowns)


JONES_META = JonesMeta(frozenset({(58, 4), (28, 2 * 5**60), (9, 47216 * 5**58 + 9728)}))


def shift_one_based(e: Node, vars: Sequence[str]) -> Node:
    """Substitute x -> x + 1 for each listed variable."""
    return D.dag_substitute(e, {v: D.var(v) + 1 for v in vars})


@dataclass(frozen=True)
class UniversalPoly:
    name: str
    kind: str  # symbolic | metadata | virtual
    nu: int
    delta: int
    body: Optional[Node] = field(default=None, compare=False, repr=False)
    unknowns: tuple[str, ...] = ()
    arg: str = "l"
    params: tuple[str, ...] = ()
    oracle: Optional[CeSet] = field(default=None, compare=False, repr=False)
    one_based_shift: bool = False

    def zero_based(self) -> "UniversalPoly":
        """Same polynomial with every variable x replaced by x + 1."""
        if self.kind == "virtual":
            raise TypeError("virtual universal polynomials have no variables")
        if self.kind == "symbolic":
            body = shift_one_based(self.body, self.unknowns + (self.arg,) + self.params)
            return replace(self, body=body, name=self.name + "+zb")
        return replace(self, one_based_shift=True, name=self.name + "+zb")

    def instantiate(self, ys: Sequence, ell) -> Node:
        """The expression q(ys; ell, m) with the unknowns renamed to ``ys``."""
        if self.kind == "virtual":
            raise TypeError("virtual universal polynomials are evaluation-only")
        if len(ys) != self.nu:
            raise ValueError(f"expected {self.nu} unknowns, got {len(ys)}")
        if self.kind == "symbolic":
            binding = {u: D.as_node(y) for u, y in zip(self.unknowns, ys)}
            binding[self.arg] = D.as_node(ell)
            return D.dag_substitute(self.body, binding, strict=False)
        args = [D.as_node(y) for y in ys] + [D.as_node(ell)] + [D.var(p) for p in self.params]
        if self.one_based_shift:
            args = [x + 1 for x in args]
        return D.call("q", self.delta, args)

    def solvable(self, ell: int, budget: int) -> bool:
        """Budgeted "q(y; ell) = 0 has a solution" for virtual instances."""
        if self.kind != "virtual":
            raise TypeError("solvability is only decidable through an oracle")
        return self.oracle.semidecide(ell, budget)


def oracle_universal(w: CeSet) -> UniversalPoly:
    return UniversalPoly(name=f"oracle:{w.name}", kind="virtual", nu=0, delta=0, oracle=w)


def metadata_universal(nu: int, name: str | None = None) -> UniversalPoly:
    return UniversalPoly(
        name=name or f"jones{nu}", kind="metadata", nu=nu,
        delta=JONES_META.degree_for(nu), params=("m1",),
    )


def jones28() -> UniversalPoly:
    body = jones_figure1()
    return UniversalPoly(
        name="jones28", kind="symbolic", nu=28, delta=D.dag_degree(body, FIGURE1_PARAMS + (FIGURE1_ARG,)),
        body=body, unknowns=FIGURE1_UNKNOWNS, arg=FIGURE1_ARG, params=FIGURE1_PARAMS,
    )


def universal(name: str) -> UniversalPoly:
    """``jones58``, ``jones28``, ``jones9`` (symbolic or metadata-only)."""
    if name == "jones58":
        return metadata_universal(58)
    if name == "jones9":
        return metadata_universal(9)
    if name == "jones28":
        return jones28()
    raise ValueError(f"unknown universal polynomial {name!r}")

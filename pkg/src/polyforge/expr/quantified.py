"""Quantifier prefixes applied to polynomial or DAG matrices."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Literal, Union

from . import dag as _dag
from .dag import Node
from .poly import Polynomial

Kind = Literal["inf", "sup"]
Domain = Literal["N", "Z", "R"]
Matrix = Union[Polynomial, Node]

ROLES = ("unknown", "outer", "parameter")


@dataclass(frozen=True)
class VarId:
    name: str
    role: str = "outer"

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")


@dataclass(frozen=True)
class QuantBlock:
    kind: Kind
    domain: Domain
    vars: tuple[str, ...]

    def __post_init__(self):
        if self.kind not in ("inf", "sup"):
            raise ValueError(f"bad quantifier {self.kind!r}")
        if self.domain not in ("N", "Z", "R"):
            raise ValueError(f"bad domain {self.domain!r}")
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise ValueError("quantifier block without variables")

    def dual(self) -> "QuantBlock":
        return QuantBlock("sup" if self.kind == "inf" else "inf", self.domain, self.vars)


def matrix_variables(m: Matrix) -> list[str]:
    if isinstance(m, Polynomial):
        return [v for v in m.vars if v in m.variables()]
    return _dag.variables(m)


def matrix_degree(m: Matrix, constants=()):
    if isinstance(m, Polynomial):
        return m.degree(constants)
    return _dag.dag_degree(m, constants)


@dataclass(frozen=True)
class QuantifiedExpr:
    """``prefix`` blocks (outermost first) applied to ``matrix``.

    ``params`` are symbolic parameters (degree 0, never quantified);
    ``kernel`` is an optional evaluation hook attached by the construction
    pipeline and is ignored by equality and serialization.
    """

    prefix: tuple[QuantBlock, ...]
    matrix: Matrix
    free: tuple[str, ...] = ()
    params: tuple[str, ...] = ()
    kernel: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "free", tuple(self.free))
        object.__setattr__(self, "params", tuple(self.params))
        seen: set[str] = set()
        for name in list(self.free) + [v for b in self.prefix for v in b.vars] + list(self.params):
            if name in seen:
                raise ValueError(f"variable {name!r} declared twice")
            seen.add(name)
        for name in matrix_variables(self.matrix):
            if name not in seen:
                raise ValueError(f"matrix variable {name!r} is neither free, bound nor a parameter")

    @property
    def bound(self) -> tuple[str, ...]:
        return tuple(v for b in self.prefix for v in b.vars)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.free + self.bound

    def var_ids(self) -> list[VarId]:
        return (
            [VarId(v, "outer") for v in self.free]
            + [VarId(v, "unknown") for v in self.bound]
            + [VarId(v, "parameter") for v in self.params]
        )

    def degree(self):
        return matrix_degree(self.matrix, self.params)

    def arity(self) -> dict:
        return {
            "free": len(self.free),
            "blocks": [(b.kind, b.domain, len(b.vars)) for b in self.prefix],
            "degree": self.degree(),
        }

    def signature(self) -> str:
        """Compact prefix rendering, e.g. ``inf_R(y) sup_N(k1..k70)``."""
        return " ".join(f"{b.kind}_{b.domain}({compress_names(b.vars)})" for b in self.prefix)

    def replace(self, **changes) -> "QuantifiedExpr":
        data = dict(
            prefix=self.prefix, matrix=self.matrix, free=self.free,
            params=self.params, kernel=self.kernel,
        )
        data.update(changes)
        return QuantifiedExpr(**data)


_NUMBERED = re.compile(r"^([A-Za-z]+)(\d+)$")


def compress_names(names) -> str:
    names = list(names)
    if len(names) >= 3:
        parts = [_NUMBERED.match(n) for n in names]
        if all(parts) and len({p.group(1) for p in parts}) == 1:
            idx = [int(p.group(2)) for p in parts]
            if idx == list(range(idx[0], idx[0] + len(idx))):
                stem = parts[0].group(1)
                return f"{stem}{idx[0]}..{stem}{idx[-1]}"
    return ",".join(names)

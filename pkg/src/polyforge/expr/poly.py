"""Sparse multivariate polynomials with arbitrary-precision integer coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class _MinusInfinity:
    """Degree of the zero polynomial. Compares below every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "MinusInfinity"

    def __str__(self):
        return "-inf"

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("MinusInfinity")

    def __add__(self, other):
        return self

    __radd__ = __add__


MINUS_INF = _MinusInfinity()


class UnknownVariable(KeyError):
    pass


class UnboundVariable(KeyError):
    pass


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _merge_vars(a: tuple, b: tuple) -> tuple:
    if a == b or not b:
        return a
    seen = set(a)
    return a + tuple(v for v in b if v not in seen)


class Polynomial:
    """Immutable sparse polynomial.

    ``terms`` maps a monomial (a tuple of ``(var, exponent)`` pairs sorted by
    variable name) to a nonzero integer coefficient. ``vars`` records the
    declaration order used for canonical output.
    """

    __slots__ = ("_terms", "_vars", "_hash")

    def __init__(self, terms: Mapping[tuple, int] | None = None, vars: Iterable[str] = ()):
        clean = {}
        declared = list(vars)
        seen = set(declared)
        for mono, c in (terms or {}).items():
            c = int(c)
            if c == 0:
                continue
            mono = tuple(sorted((v, int(e)) for v, e in mono if e != 0))
            for v, e in mono:
                if e < 0:
                    raise ValueError("negative exponent")
                if v not in seen:
                    seen.add(v)
                    declared.append(v)
            clean[mono] = clean.get(mono, 0) + c
            if clean[mono] == 0:
                del clean[mono]
        self._terms = clean
        self._vars = tuple(declared)
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c: int, vars: Iterable[str] = ()) -> "Polynomial":
        return cls({(): c}, vars)

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): 1}, (name,))

    @classmethod
    def vars_(cls, *names: str) -> tuple["Polynomial", ...]:
        return tuple(cls.var(n) for n in names)

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def vars(self) -> tuple:
        return self._vars

    def variables(self) -> set:
        """Variables that actually occur with a positive exponent."""
        return {v for mono in self._terms for v, _ in mono}

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __eq__(self, other):
        if isinstance(other, int):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        from .emit import poly_text

        return f"Polynomial({poly_text(self)})"

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "Polynomial":
        if isinstance(x, Polynomial):
            return x
        if isinstance(x, int):
            return Polynomial.const(x)
        raise TypeError(f"cannot use {type(x).__name__} as a polynomial")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(out, _merge_vars(self._vars, other._vars))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self._terms.items()}, self._vars)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(out, _merge_vars(self._vars, other._vars))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        if len(self._terms) == 1:
            (mono, c), = self._terms.items()
            return Polynomial({tuple((v, e * k) for v, e in mono): c ** k}, self._vars)
        result = Polynomial.const(1, self._vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # queries -------------------------------------------------------------
    def degree(self, constants: Iterable[str] = ()):
        """Total degree; variables in ``constants`` count as degree 0."""
        if not self._terms:
            return MINUS_INF
        skip = set(constants)
        return max(sum(e for v, e in mono if v not in skip) for mono in self._terms)

    def degree_in(self, name: str) -> int:
        return max((e for mono in self._terms for v, e in mono if v == name), default=0)

    def coefficient(self, mono: Mapping[str, int]) -> int:
        key = tuple(sorted((v, e) for v, e in mono.items() if e))
        return self._terms.get(key, 0)

    def evaluate(self, point: Mapping[str, object]):
        """Exact value at ``point`` (ints or Fractions)."""
        total = 0
        cache: dict = {}
        for mono, c in self._terms.items():
            term = c
            for v, e in mono:
                if v not in point:
                    raise UnboundVariable(v)
                key = (v, e)
                if key not in cache:
                    cache[key] = Fraction(point[v]) ** e
                term = term * cache[key]
            total += term
        return Fraction(total)

    def substitute(self, bindings: Mapping[str, "Polynomial | int"]) -> "Polynomial":
        """Simultaneous substitution of polynomials for variables."""
        declared = set(self._vars) | self.variables()
        for v in bindings:
            if v not in declared:
                raise UnknownVariable(v)
        subs = {v: self._coerce(p) for v, p in bindings.items()}
        new_vars = tuple(v for v in self._vars if v not in subs)
        for p in subs.values():
            new_vars = _merge_vars(new_vars, p.vars)
        power_cache: dict = {}
        out = Polynomial.const(0, new_vars)
        for mono, c in self._terms.items():
            keep = []
            term = Polynomial.const(c)
            for v, e in mono:
                if v in subs:
                    key = (v, e)
                    if key not in power_cache:
                        power_cache[key] = subs[v] ** e
                    term = term * power_cache[key]
                else:
                    keep.append((v, e))
            if keep:
                term = term * Polynomial({tuple(keep): 1})
            out = out + term
        return Polynomial(out._terms, new_vars)

    def rename(self, mapping: Mapping[str, str]) -> "Polynomial":
        terms = {
            tuple(sorted((mapping.get(v, v), e) for v, e in mono)): c
            for mono, c in self._terms.items()
        }
        return Polynomial(terms, tuple(mapping.get(v, v) for v in self._vars))

    def with_vars(self, vars: Iterable[str]) -> "Polynomial":
        """Same polynomial with a new declaration order (extra names allowed)."""
        return Polynomial(self._terms, _merge_vars(tuple(vars), self._vars))

"""Text, LaTeX and JSON renderings, plus a small infix parser."""

from __future__ import annotations

import json
import re
from typing import Iterable, Literal

from . import dag as D
from .dag import Node
from .poly import MINUS_INF, Polynomial
from .quantified import QuantBlock, QuantifiedExpr, compress_names

Format = Literal["text", "latex", "json"]

_DOM_TEXT = {"N": "N", "Z": "Z", "R": "R"}
_DOM_TEX = {"N": r"\mathbb{N}", "Z": r"\mathbb{Z}", "R": r"\mathbb{R}"}


def _pretty_int(k: int) -> str:
    if k > 10**6:
        for b in range(2, 11):
            e, acc = 0, 1
            while acc < k:
                acc *= b
                e += 1
            if acc == k:
                return f"({b}^{e})"
    return str(k)


# canonical monomial order ---------------------------------------------------
def ordered_terms(p: Polynomial, order: Iterable[str] = ()) -> list:
    """Graded lexicographic order by declaration order (highest first)."""
    order = list(order) + [v for v in p.vars if v not in set(order)]
    pos = {v: i for i, v in enumerate(order)}
    extra = sorted(p.variables() - set(pos))
    for v in extra:
        pos[v] = len(pos)

    def key(item):
        mono, _ = item
        exps = [0] * len(pos)
        for v, e in mono:
            exps[pos[v]] = e
        return (-sum(exps), [-e for e in exps])

    return sorted(p, key=key)


def poly_text(p: Polynomial, order: Iterable[str] = ()) -> str:
    if p.is_zero():
        return "0"
    pos = {v: i for i, v in enumerate(list(order) + list(p.vars))}
    out = []
    for i, (mono, c) in enumerate(ordered_terms(p, order)):
        factors = [
            v if e == 1 else f"{v}^{_pretty_int(e)}"
            for v, e in sorted(mono, key=lambda t: pos.get(t[0], len(pos)))
        ]
        mag = abs(c)
        body = "*".join(([str(mag)] if mag != 1 or not factors else []) + factors)
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


# DAG text ---------------------------------------------------------------------
_PREC = {"add": 1, "neg": 2, "mul": 3, "pow": 4}


def _prec(node: Node) -> int:
    if node.op == "const" and node.payload < 0:
        return 2
    return _PREC.get(node.op, 5)


def dag_text(root: Node) -> str:
    memo: dict[int, str] = {}

    def wrap(child: Node, level: int) -> str:
        s = memo[id(child)]
        return f"({s})" if _prec(child) < level else s

    for node in D.postorder(root):
        op = node.op
        if op == "const":
            s = str(node.payload)
        elif op == "var":
            s = node.payload
        elif op == "add":
            parts = []
            for i, a in enumerate(node.args):
                if i and a.op == "neg":
                    parts.append("- " + wrap(a.args[0], 2))
                elif i and a.op == "const" and a.payload < 0:
                    parts.append(f"- {-a.payload}")
                else:
                    parts.append(("+ " if i else "") + wrap(a, 1))
            s = " ".join(parts)
        elif op == "mul":
            s = "*".join(wrap(a, 3) for a in node.args)
        elif op == "neg":
            s = "-" + wrap(node.args[0], 3)
        elif op == "pow":
            s = f"{wrap(node.args[0], 5)}^{_pretty_int(node.payload)}"
        elif op == "sinpi":
            s = f"sinpi({memo[id(node.args[0])]})"
        else:
            s = f"{node.payload[0]}({', '.join(memo[id(a)] for a in node.args)})"
        memo[id(node)] = s
    return memo[id(root)]


# LaTeX ------------------------------------------------------------------------
_GREEK = {"alpha", "beta", "gamma", "delta", "nu", "rho", "sigma", "tau", "phi"}


def tex_name(name: str) -> str:
    m = re.match(r"^([A-Za-z]+)_?([A-Za-z0-9]*)$", name)
    if not m:
        return name
    stem, sub = m.groups()
    if stem == "l":
        stem = r"\ell"
    elif stem in _GREEK:
        stem = "\\" + stem
    return f"{stem}_{{{sub}}}" if sub else stem


def _tex_int(k: int) -> str:
    s = _pretty_int(k)
    if s.startswith("("):
        b, e = s[1:-1].split("^")
        return f"{b}^{{{e}}}"
    return s


def dag_latex(root: Node) -> str:
    memo: dict[int, str] = {}

    def wrap(child: Node, level: int) -> str:
        s = memo[id(child)]
        return rf"\left({s}\right)" if _prec(child) < level else s

    for node in D.postorder(root):
        op = node.op
        if op == "const":
            s = str(node.payload)
        elif op == "var":
            s = tex_name(node.payload)
        elif op == "add":
            parts = []
            for i, a in enumerate(node.args):
                if i and a.op == "neg":
                    parts.append("- " + wrap(a.args[0], 2))
                elif i and a.op == "const" and a.payload < 0:
                    parts.append(f"- {-a.payload}")
                else:
                    parts.append(("+ " if i else "") + wrap(a, 1))
            s = " ".join(parts)
        elif op == "mul":
            pieces = [wrap(a, 3) for a in node.args]
            s = pieces[0]
            for a, piece in zip(node.args[1:], pieces[1:]):
                s += (r" \cdot " if a.op == "const" else " ") + piece
        elif op == "neg":
            s = "-" + wrap(node.args[0], 3)
        elif op == "pow":
            s = f"{{{wrap(node.args[0], 5)}}}^{{{_tex_int(node.payload)}}}"
        elif op == "sinpi":
            s = rf"\sin\left(\pi {wrap(node.args[0], 3)}\right)"
        else:
            s = rf"{tex_name(node.payload[0])}\left({', '.join(memo[id(a)] for a in node.args)}\right)"
        memo[id(node)] = s
    return memo[id(root)]


def poly_latex(p: Polynomial, order: Iterable[str] = ()) -> str:
    if p.is_zero():
        return "0"
    out = []
    for i, (mono, c) in enumerate(ordered_terms(p, order)):
        factors = [tex_name(v) if e == 1 else f"{tex_name(v)}^{{{_tex_int(e)}}}" for v, e in mono]
        mag = abs(c)
        body = " ".join(([str(mag)] if mag != 1 or not factors else []) + factors)
        sign = "-" if c < 0 else ("+" if i else "")
        out.append((sign + " " if sign and i else sign) + body)
    return " ".join(out)


def _block_text(b: QuantBlock) -> str:
    if len(b.vars) == 1:
        return f"{b.kind}_{{{b.vars[0]} in {_DOM_TEXT[b.domain]}}}"
    return f"{b.kind}_{{{compress_names(b.vars)} in {_DOM_TEXT[b.domain]}^{len(b.vars)}}}"


def _block_latex(b: QuantBlock) -> str:
    dom = _DOM_TEX[b.domain]
    if len(b.vars) == 1:
        return rf"\{b.kind}_{{{tex_name(b.vars[0])} \in {dom}}}"
    names = [tex_name(v) for v in b.vars]
    if len(names) > 3:
        shown = rf"{names[0]},\dots,{names[-1]}"
    else:
        shown = ",".join(names)
    return rf"\{b.kind}_{{{shown} \in {dom}^{{{len(b.vars)}}}}}"


def _order(q: QuantifiedExpr) -> list[str]:
    return list(q.free) + list(q.bound) + list(q.params)


def to_text(q: QuantifiedExpr) -> str:
    m = q.matrix
    body = poly_text(m, _order(q)) if isinstance(m, Polynomial) else dag_text(m)
    head = " ".join(_block_text(b) for b in q.prefix)
    return f"{head} [ {body} ]" if head else f"[ {body} ]"


def to_latex(q: QuantifiedExpr) -> str:
    m = q.matrix
    body = poly_latex(m, _order(q)) if isinstance(m, Polynomial) else dag_latex(m)
    head = " ".join(_block_latex(b) for b in q.prefix)
    return rf"\[ {head} \left[ {body} \right] \]"


# JSON -------------------------------------------------------------------------
def _matrix_json(m) -> dict:
    if isinstance(m, Polynomial):
        return {
            "kind": "poly",
            "vars": list(m.vars),
            "terms": [
                {"c": str(c), "e": {v: str(e) for v, e in mono}}
                for mono, c in ordered_terms(m)
            ],
        }
    nodes = D.postorder(m)
    index = {id(n): i for i, n in enumerate(nodes)}
    out = []
    for n in nodes:
        entry: dict = {"op": n.op}
        if n.op == "const":
            entry["v"] = str(n.payload)
        elif n.op == "var":
            entry["name"] = n.payload
        elif n.op == "pow":
            entry["exp"] = str(n.payload)
        elif n.op == "call":
            entry["fn"] = n.payload[0]
            entry["degree"] = str(n.payload[1])
        if n.args:
            entry["args"] = [index[id(a)] for a in n.args]
        out.append(entry)
    return {"kind": "dag", "nodes": out, "root": index[id(m)]}


def _matrix_from_json(d: dict):
    if d["kind"] == "poly":
        terms = {
            tuple((v, int(e)) for v, e in t["e"].items()): int(t["c"]) for t in d["terms"]
        }
        return Polynomial(terms, d.get("vars", ()))
    built: list[Node] = []
    for e in d["nodes"]:
        args = tuple(built[i] for i in e.get("args", ()))
        op = e["op"]
        if op == "const":
            built.append(D.const(int(e["v"])))
        elif op == "var":
            built.append(D.var(e["name"]))
        elif op == "pow":
            built.append(D.Node("pow", int(e["exp"]), args))
        elif op == "call":
            built.append(D.Node("call", (e["fn"], int(e["degree"])), args))
        elif op in ("add", "mul", "neg", "sinpi"):
            built.append(D.Node(op, None, args))
        else:
            raise ValueError(f"unknown node op {op!r}")
    return built[d["root"]]


def to_json_obj(q: QuantifiedExpr) -> dict:
    try:
        deg = q.degree()
        deg_s = "-inf" if deg is MINUS_INF else str(deg)
    except D.NotPolynomial:
        deg_s = None
    matrix = _matrix_json(q.matrix)
    matrix["params"] = list(q.params)
    return {
        "prefix": [{"q": b.kind, "dom": b.domain, "vars": list(b.vars)} for b in q.prefix],
        "free": list(q.free),
        "matrix": matrix,
        "meta": {"degree": deg_s, "var_count": len(q.variables)},
    }


def to_json(q: QuantifiedExpr) -> str:
    return json.dumps(to_json_obj(q), sort_keys=False, separators=(",", ":"))


def from_json(s: str | dict) -> QuantifiedExpr:
    d = json.loads(s) if isinstance(s, str) else s
    return QuantifiedExpr(
        prefix=tuple(QuantBlock(b["q"], b["dom"], tuple(b["vars"])) for b in d["prefix"]),
        matrix=_matrix_from_json(d["matrix"]),
        free=tuple(d["free"]),
        params=tuple(d["matrix"].get("params", ())),
    )


parse = from_json


def emit(q: QuantifiedExpr, fmt: Format = "text") -> str:
    fmt = fmt.lower()
    if fmt == "text":
        return to_text(q)
    if fmt == "latex":
        return to_latex(q)
    if fmt == "json":
        return to_json(q)
    raise ValueError(f"unknown format {fmt!r}")


# infix parser -------------------------------------------------------------------
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokens(text: str) -> list:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        num, name, sym = m.groups()
        if num is not None:
            out.append(("int", int(num)))
        elif name is not None:
            out.append(("name", name))
        elif sym is not None and not sym.isspace():
            out.append(("sym", {"[": "(", "]": ")"}.get(sym, sym)))
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, sym=None):
        tok = self.toks[self.i]
        if sym is not None and tok != ("sym", sym):
            raise SyntaxError(f"expected {sym!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self) -> Node:
        terms = [self.term()]
        while self.peek() in (("sym", "+"), ("sym", "-")):
            _, op = self.take()
            t = self.term()
            terms.append(t if op == "+" else D.neg(t))
        return D.dag_sum(terms)

    def term(self) -> Node:
        factors = [self.unary()]
        while self.peek() == ("sym", "*"):
            self.take()
            factors.append(self.unary())
        return D.dag_prod(factors)

    def unary(self) -> Node:
        if self.peek() == ("sym", "-"):
            self.take()
            return D.neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek() == ("sym", "^"):
            self.take()
            exp = self.unary()
            if D.variables(exp):
                raise SyntaxError("exponent must be a constant")
            k = D.dag_eval(exp, {})
            if k.denominator != 1 or k < 0:
                raise SyntaxError("exponent must be a natural number")
            return D.power(base, int(k))
        return base

    def atom(self) -> Node:
        kind, val = self.take()
        if kind == "int":
            return D.const(val)
        if kind == "name":
            if self.peek() == ("sym", "("):
                if val != "sinpi":
                    raise SyntaxError(f"unknown function {val!r}")
                self.take("(")
                arg = self.expr()
                self.take(")")
                return D.sinpi(arg)
            return D.var(val)
        if (kind, val) == ("sym", "("):
            e = self.expr()
            self.take(")")
            return e
        raise SyntaxError(f"unexpected token {val!r}")


def parse_expr(text: str) -> Node:
    """Parse ``+ - * ^``, parentheses/brackets, integers, names and ``sinpi(.)``."""
    p = _Parser(text)
    e = p.expr()
    if p.peek()[0] != "end":
        raise SyntaxError(f"trailing input at token {p.peek()[1]!r}")
    return e

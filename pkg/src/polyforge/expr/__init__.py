"""Exact polynomials, expression DAGs and quantified expressions."""

from .dag import (
    BudgetExceeded,
    Node,
    NotPolynomial,
    add,
    as_node,
    call,
    const,
    dag_degree,
    dag_eval,
    dag_prod,
    dag_substitute,
    dag_sum,
    expand,
    from_polynomial,
    mul,
    neg,
    postorder,
    power,
    rename,
    sinpi,
    var,
    variables,
)
from .emit import emit, from_json, parse, parse_expr, to_json, to_json_obj
from .poly import MINUS_INF, Polynomial, UnboundVariable, UnknownVariable
from .quantified import QuantBlock, QuantifiedExpr, VarId, compress_names


def degree(e, constants=()):
    """Total degree of a Polynomial or DAG without expanding anything."""
    if isinstance(e, Polynomial):
        return e.degree(constants)
    if isinstance(e, QuantifiedExpr):
        return e.degree()
    return dag_degree(as_node(e), constants)


def substitute(e, bindings):
    """Simultaneous substitution; returns the same kind as ``e``."""
    if isinstance(e, Polynomial):
        return e.substitute(bindings)
    return dag_substitute(e, bindings)


__all__ = [
    "BudgetExceeded", "MINUS_INF", "Node", "NotPolynomial", "Polynomial",
    "QuantBlock", "QuantifiedExpr", "UnboundVariable", "UnknownVariable", "VarId",
    "add", "as_node", "call", "compress_names", "const", "dag_degree", "dag_eval",
    "dag_prod", "dag_substitute", "dag_sum", "degree", "emit", "expand",
    "from_json", "from_polynomial", "mul", "neg", "parse", "parse_expr",
    "postorder", "power", "rename", "sinpi", "substitute", "to_json",
    "to_json_obj", "var", "variables",
]

"""Omega-expression syntax trees.

An expression is built from alphabet letters with two operators: binary
product (word concatenation) and the postfix omega iterator.  The trees are
immutable and hashable so they can key caches and dedup tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Letter:
    token: str


@dataclass(frozen=True)
class Product:
    left: "OmegaExpression"
    right: "OmegaExpression"


@dataclass(frozen=True)
class Omega:
    child: "OmegaExpression"


OmegaExpression = Union[Letter, Product, Omega]


def product_of(factors) -> OmegaExpression:
    """Left-associative product of one or more expressions."""
    factors = list(factors)
    if not factors:
        raise ValueError("product of zero expressions is undefined")
    expr = factors[0]
    for factor in factors[1:]:
        expr = Product(expr, factor)
    return expr


def expression_depth(expr: OmegaExpression) -> int:
    if isinstance(expr, Letter):
        return 1
    if isinstance(expr, Product):
        return 1 + max(expression_depth(expr.left), expression_depth(expr.right))
    if isinstance(expr, Omega):
        return 1 + expression_depth(expr.child)
    raise TypeError(f"not an omega-expression: {expr!r}")


def format_expression(expr: OmegaExpression) -> str:
    """Render an expression in the concrete syntax accepted by the parser.

    Products are space-separated and left-associative, so only a
    right-nested product needs parentheses; `^w` binds tighter than the
    product and stacks (``a^w^w``).
    """
    if isinstance(expr, Letter):
        return expr.token
    if isinstance(expr, Omega):
        inner = format_expression(expr.child)
        if isinstance(expr.child, Product):
            inner = f"({inner})"
        return f"{inner}^w"
    if isinstance(expr, Product):
        left = format_expression(expr.left)
        right = format_expression(expr.right)
        if isinstance(expr.right, Product):
            right = f"({right})"
        return f"{left} {right}"
    raise TypeError(f"not an omega-expression: {expr!r}")

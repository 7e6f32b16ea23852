"""Independent reference evaluator for calculator expressions.

Deliberately built on a different stack than the implementation under
test: Python's ast module does the parsing, and every arithmetic step
goes through a fresh 28-digit Decimal context. Only the surface grammar
(^ for power) is translated before parsing.
"""

from __future__ import annotations

import ast
from decimal import (
    Context, Decimal, DivisionByZero, InvalidOperation, Overflow,
)

CTX = Context(prec=28)


class RefError(Exception):
    pass


def ref_format(value: Decimal) -> str:
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    if text in ("", "-0"):
        return "0"
    return text


def ref_eval(expr: str, env: dict[str, Decimal] | None = None) -> Decimal:
    env = env or {}
    try:
        tree = ast.parse(expr.replace("^", "**"), mode="eval")
    except SyntaxError as err:
        raise RefError(f"syntax: {err}") from None
    return _ev(tree.body, env)


def _ev(node: ast.AST, env: dict[str, Decimal]) -> Decimal:
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise RefError("unsupported literal")
        return CTX.create_decimal(repr(node.value))
    if isinstance(node, ast.Name):
        if node.id not in env:
            raise RefError(f"undefined {node.id}")
        return env[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return CTX.minus(_ev(node.operand, env))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.UAdd):
        raise RefError("unary plus unsupported")
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or len(node.args) != 1 or node.keywords:
            raise RefError("unsupported call")
        arg = _ev(node.args[0], env)
        if node.func.id == "abs":
            return CTX.abs(arg)
        if node.func.id == "sqrt":
            if arg < 0:
                raise RefError("sqrt of negative")
            return CTX.sqrt(arg)
        raise RefError(f"unknown function {node.func.id}")
    if isinstance(node, ast.BinOp):
        a = _ev(node.left, env)
        b = _ev(node.right, env)
        try:
            if isinstance(node.op, ast.Add):
                return CTX.add(a, b)
            if isinstance(node.op, ast.Sub):
                return CTX.subtract(a, b)
            if isinstance(node.op, ast.Mult):
                return CTX.multiply(a, b)
            if isinstance(node.op, ast.Div):
                return CTX.divide(a, b)
            if isinstance(node.op, ast.Pow):
                if b != b.to_integral_value():
                    raise RefError("non-integer exponent")
                return CTX.power(a, b)
        except DivisionByZero:
            raise RefError("division by zero") from None
        except (InvalidOperation, Overflow):
            raise RefError("invalid operation") from None
    raise RefError(f"unsupported node {type(node).__name__}")

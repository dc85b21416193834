"""Tiny expression evaluator shared by all text formats.

Input is the usual ``c*x1^2*x3 - 1/2*q^-1`` style.  ``^`` is rewritten to
``**`` and the result is walked with :mod:`ast`; names are looked up in a
caller-supplied table, so the same code parses scalars, commutative
polynomials and noncommutative elements.
"""

from __future__ import annotations

import ast
import re
from fractions import Fraction
from typing import Callable, Mapping, Optional

from .errors import ParseError

_ALLOWED = re.compile(r"^[\sA-Za-z0-9_+\-*/^().]*$")


def parse_expression(
    text: str,
    names: Mapping[str, object],
    what: str = "expression",
    lookup: Optional[Callable[[str], object]] = None,
    mul: Optional[Callable[[object, object], object]] = None,
):
    """Evaluate ``text`` with Python arithmetic on the supplied atoms.

    ``lookup`` resolves names missing from ``names`` (raise ParseError for
    unknown ones).  ``mul`` overrides ``*`` (used to police normal order).
    """
    if not isinstance(text, str):
        raise ParseError(f"{what}: expected a string, got {type(text).__name__}")
    if not text.strip():
        raise ParseError(f"{what}: empty string")
    if not _ALLOWED.match(text):
        raise ParseError(f"{what}: unexpected character in {text!r}")
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"{what}: cannot parse {text!r} ({exc.msg})") from None

    def resolve(name):
        if name in names:
            return names[name]
        if lookup is not None:
            return lookup(name)
        raise ParseError(f"{what}: unknown symbol {name!r} in {text!r}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise ParseError(f"{what}: only integer literals allowed, got {node.value!r}")
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            return resolve(node.id)
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            if isinstance(node.op, ast.USub):
                return -v
            if isinstance(node.op, ast.UAdd):
                return v
        if isinstance(node, ast.BinOp):
            left = ev(node.left)
            if isinstance(node.op, ast.Pow):
                k = _int_exponent(node.right)
                if k is None:
                    raise ParseError(f"{what}: exponent must be an integer literal in {text!r}")
                try:
                    return left ** k
                except (ZeroDivisionError, TypeError, ValueError) as exc:
                    raise ParseError(f"{what}: bad power in {text!r}: {exc}") from None
            right = ev(node.right)
            try:
                if isinstance(node.op, ast.Add):
                    return left + right
                if isinstance(node.op, ast.Sub):
                    return left - right
                if isinstance(node.op, ast.Mult):
                    return mul(left, right) if mul else left * right
                if isinstance(node.op, ast.Div):
                    return left / right
            except ParseError:
                raise
            except (ZeroDivisionError, TypeError, ValueError, ArithmeticError) as exc:
                raise ParseError(f"{what}: cannot evaluate {text!r}: {exc}") from None
        raise ParseError(f"{what}: unsupported syntax in {text!r}")

    return ev(tree)


def _int_exponent(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        k = _int_exponent(node.operand)
        if k is None:
            return None
        return -k if isinstance(node.op, ast.USub) else k
    return None


def indexed_name(name: str, prefix: str, n: int, what: str) -> int:
    """Return i for names like ``x3`` (1-indexed, at most n)."""
    m = re.fullmatch(rf"{prefix}(\d+)", name)
    if not m:
        raise ParseError(f"{what}: unknown symbol {name!r}")
    i = int(m.group(1))
    if not 1 <= i <= n:
        raise ParseError(f"{what}: variable {name!r} out of range 1..{n} (variables are 1-indexed)")
    return i

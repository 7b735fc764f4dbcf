"""Built-in target functions, weights, and a small expression language for both."""
from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction
import math
import operator
from typing import Callable

import numpy as np

from .core import FunctionModel


class ExpressionError(ValueError):
    pass


@dataclass(frozen=True)
class TestFunction:
    """A suite member: target, the weight of its space, and whether rho' is integrable."""

    id: str
    model: FunctionModel
    weight: Callable | None = None
    weight_id: str = "one"
    absolutely_continuous: bool = True

    __test__ = False  # not a pytest class


def _const(x):
    return np.full_like(np.asarray(x, dtype=float), 1.5)


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


def inv_sqrt(x):
    return np.asarray(x, dtype=float) ** -0.5


WEIGHTS = {
    "one": None,
    "inv-sqrt": inv_sqrt,
}

FUNCTIONS = {
    "constant": TestFunction("constant", FunctionModel(_const, deriv=_zero, name="constant")),
    "identity": TestFunction("identity", FunctionModel(lambda x: x, deriv=_one, name="identity")),
    "abs-0.3": TestFunction(
        "abs-0.3",
        FunctionModel(
            lambda x: np.abs(x - 0.3),
            deriv=lambda x: np.sign(x - 0.3),
            breakpoints=(0.3,),
            name="abs-0.3",
        ),
    ),
    "sin10": TestFunction(
        "sin10",
        FunctionModel(lambda x: np.sin(10 * x), deriv=lambda x: 10 * np.cos(10 * x), name="sin10"),
    ),
    "exp": TestFunction("exp", FunctionModel(np.exp, deriv=np.exp, name="exp")),
    "xpow-0.25": TestFunction(
        "xpow-0.25",
        FunctionModel(
            lambda x: x**-0.25,
            deriv=lambda x: -0.25 * x**-1.25,
            singular_endpoints=(True, False),
            domination=1.0,
            name="xpow-0.25",
        ),
        weight=inv_sqrt,
        weight_id="inv-sqrt",
        absolutely_continuous=False,
    ),
}

DEFAULT_SUITE = tuple(FUNCTIONS)


def default_suite():
    return [FUNCTIONS[name] for name in DEFAULT_SUITE]


# -- expressions -------------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: np.power,
    ast.BitXor: np.power,
}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "abs": np.abs,
    "sqrt": np.sqrt,
    "log": np.log,
    "pow": np.power,
}
_NAMES = {"pi": math.pi, "e": math.e}


def _compile(node):
    if isinstance(node, ast.Expression):
        return _compile(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        value = float(node.value)
        return lambda x: value
    if isinstance(node, ast.Name):
        if node.id == "x":
            return lambda x: x
        if node.id in _NAMES:
            value = _NAMES[node.id]
            return lambda x: value
        raise ExpressionError(f"unknown name {node.id!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        op = _BINOPS[type(node.op)]
        left, right = _compile(node.left), _compile(node.right)
        if op is np.power:
            return lambda x: np.power(np.asarray(left(x), dtype=float), right(x))
        return lambda x: op(left(x), right(x))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        op, inner = _UNARY[type(node.op)], _compile(node.operand)
        return lambda x: op(inner(x))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        fn = _FUNCS.get(node.func.id)
        if fn is None:
            raise ExpressionError(f"unknown function {node.func.id!r}")
        arity = 2 if fn is np.power else 1
        if len(node.args) != arity:
            raise ExpressionError(f"{node.func.id} takes {arity} argument(s)")
        args = [_compile(a) for a in node.args]
        if arity == 2:
            return lambda x: np.power(np.asarray(args[0](x), dtype=float), args[1](x))
        return lambda x: fn(args[0](x))
    raise ExpressionError(f"unsupported syntax: {ast.dump(node)[:60]}")


def parse_expression(text):
    """Compile an arithmetic expression in x to a vectorized callable.

    Supports + - * / ^ (or **), unary minus, numbers, pi, e and the functions
    sin, cos, exp, abs, sqrt, log, pow.  Exponents such as 1/3 are evaluated
    as floats.
    """
    if not text or not text.strip():
        raise ExpressionError("empty expression")
    src = text.replace("×", "*").replace("÷", "/").replace("−", "-")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
    body = _compile(tree)

    def f(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.broadcast_to(np.asarray(body(x), dtype=float), x.shape)

    return f


def rational(text):
    """Parse '1/4', '-0.25' etc. exactly; handy for exponents on the command line."""
    return float(Fraction(text))


def resolve_function(fn_id=None, expr=None, singular="none"):
    if expr is not None:
        left = singular in ("left", "both")
        right = singular in ("right", "both")
        model = FunctionModel(parse_expression(expr), singular_endpoints=(left, right), name=expr)
        return TestFunction(expr, model, absolutely_continuous=not (left or right))
    if fn_id not in FUNCTIONS:
        raise KeyError(fn_id)
    return FUNCTIONS[fn_id]


def resolve_weight(weight_id):
    """Weight by registry id or expression; returns (callable or None, id)."""
    if weight_id in WEIGHTS:
        return WEIGHTS[weight_id], weight_id
    return parse_expression(weight_id), weight_id

"""Numeric semantics: typechecking and tree-walking evaluation.

Three evaluation contracts are supported:

* ``c32`` / ``c64`` — two's-complement wrapping integers of the given
  width, with doubles entering only through float literals and spreading
  by the usual arithmetic conversions.
* ``js`` — every value is an IEEE-754 double; bitwise operators coerce
  through ToInt32 the way the browser-based tools do.

Every kernel is total: division and modulus by zero, overlong shift
counts and overflow all have defined results, so a well-typed expression
can never trap during sample generation.  ``eval_ast`` is the reference
interpreter; the bytecode VM in :mod:`bytebeat.vm` is checked against it
byte by byte.
"""

from __future__ import annotations

import math
from enum import Enum

from .expr import Binary, Const, Expr, Unary, VarT


class SemanticsMode(str, Enum):
    C32 = "c32"
    C64 = "c64"
    JS = "js"

    @property
    def width(self) -> int | None:
        """Integer width in bits, or None for the all-double js mode."""
        if self is SemanticsMode.C32:
            return 32
        if self is SemanticsMode.C64:
            return 64
        return None


class TypecheckError(Exception):
    """Static rejection of an expression under a semantics mode."""

    def __init__(self, pos: int, msg: str):
        self.pos = pos
        self.msg = msg
        super().__init__(f"{msg} (at offset {pos})")


_INT_ONLY_OPS = frozenset({"%", "<<", ">>", "&", "^", "|"})
_COMPARE_OPS = frozenset({"<", "<=", ">", ">=", "==", "!="})
_ARITH_OPS = frozenset({"+", "-", "*", "/"})

_U32 = 1 << 32
_I32_MAX = (1 << 31) - 1


def to_int32(x: float) -> int:
    """ECMAScript ToInt32: NaN and infinities go to 0, everything else
    truncates toward zero and wraps into [-2^31, 2^31)."""
    if math.isnan(x) or math.isinf(x):
        return 0
    n = int(x) & 0xFFFFFFFF
    return n - _U32 if n > _I32_MAX else n


def to_uint32(x: float) -> int:
    if math.isnan(x) or math.isinf(x):
        return 0
    return int(x) & 0xFFFFFFFF


def to_double(x: int | float) -> float:
    """Exact int-to-double conversion, saturating to infinity far beyond
    the double range instead of raising."""
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf


def wrap_int(value: int, width: int) -> int:
    """Reduce an integer into the signed two's-complement range."""
    half = 1 << (width - 1)
    return ((value + half) & ((1 << width) - 1)) - half


# ── C integer kernels (width-parameterized) ──────────────────────────

def _make_c_int_kernels(width: int):
    half = 1 << (width - 1)
    mask = (1 << width) - 1
    shift_mask = width - 1

    def add(a, b):
        return ((a + b + half) & mask) - half

    def sub(a, b):
        return ((a - b + half) & mask) - half

    def mul(a, b):
        return ((a * b + half) & mask) - half

    def div(a, b):
        # Truncating division, totalized: x/0 is 0 and the lone overflow
        # case INT_MIN/-1 wraps back to INT_MIN.
        if b == 0:
            return 0
        q = -(-a // b) if (a < 0) != (b < 0) else a // b
        return ((q + half) & mask) - half

    def mod(a, b):
        # Sign of the dividend; x%0 is 0 (keeps div/mod consistent with
        # q*b + r == a whenever b != 0).
        if b == 0:
            return 0
        r = abs(a) % abs(b)
        return -r if a < 0 else r

    def shl(a, b):
        return (((a << (b & shift_mask)) + half) & mask) - half

    def shr(a, b):
        return a >> (b & shift_mask)

    return {
        "+": add,
        "-": sub,
        "*": mul,
        "/": div,
        "%": mod,
        "<<": shl,
        ">>": shr,
        "&": lambda a, b: a & b,
        "^": lambda a, b: a ^ b,
        "|": lambda a, b: a | b,
        "<": lambda a, b: 1 if a < b else 0,
        "<=": lambda a, b: 1 if a <= b else 0,
        ">": lambda a, b: 1 if a > b else 0,
        ">=": lambda a, b: 1 if a >= b else 0,
        "==": lambda a, b: 1 if a == b else 0,
        "!=": lambda a, b: 1 if a != b else 0,
    }


_C_INT_KERNELS = {32: _make_c_int_kernels(32), 64: _make_c_int_kernels(64)}


def double_to_int(x: float, width: int) -> int:
    """Double-to-integer conversion used by the (int) cast in C modes:
    same modular rule as ToInt32, generalized to the mode width."""
    if math.isnan(x) or math.isinf(x):
        return 0
    return wrap_int(int(x), width)


# ── IEEE double kernels (shared by the C double path and js) ─────────

def ieee_div(a: float, b: float) -> float:
    if b == 0.0:
        if math.isnan(a) or a == 0.0:
            return math.nan
        same_sign = (a > 0.0) == (math.copysign(1.0, b) > 0.0)
        return math.inf if same_sign else -math.inf
    return a / b


def js_mod(a: float, b: float) -> float:
    """ECMAScript remainder: sign of the dividend, NaN when the divisor
    is zero or either side is NaN, and x % inf == x."""
    if math.isnan(a) or math.isnan(b) or math.isinf(a) or b == 0.0:
        return math.nan
    if math.isinf(b) or a == 0.0:
        return a
    return math.fmod(a, b)


_C_DBL_KERNELS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": ieee_div,
    "<": lambda a, b: 1 if a < b else 0,
    "<=": lambda a, b: 1 if a <= b else 0,
    ">": lambda a, b: 1 if a > b else 0,
    ">=": lambda a, b: 1 if a >= b else 0,
    "==": lambda a, b: 1 if a == b else 0,
    "!=": lambda a, b: 1 if a != b else 0,
}

_JS_KERNELS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": ieee_div,
    "%": js_mod,
    "&": lambda a, b: float(to_int32(a) & to_int32(b)),
    "^": lambda a, b: float(to_int32(a) ^ to_int32(b)),
    "|": lambda a, b: float(to_int32(a) | to_int32(b)),
    "<<": lambda a, b: float(wrap_int(to_int32(a) << (to_uint32(b) & 31), 32)),
    ">>": lambda a, b: float(to_int32(a) >> (to_uint32(b) & 31)),
    "<": lambda a, b: 1.0 if a < b else 0.0,
    "<=": lambda a, b: 1.0 if a <= b else 0.0,
    ">": lambda a, b: 1.0 if a > b else 0.0,
    ">=": lambda a, b: 1.0 if a >= b else 0.0,
    "==": lambda a, b: 1.0 if a == b else 0.0,
    "!=": lambda a, b: 1.0 if a != b else 0.0,
}


def apply_binary(op: str, a: int | float, b: int | float, mode: SemanticsMode) -> int | float:
    """Scalar kernel for one binary operator on already-converted operands."""
    if mode is SemanticsMode.JS:
        return _JS_KERNELS[op](a, b)
    if isinstance(a, float) or isinstance(b, float):
        return _C_DBL_KERNELS[op](float(a), float(b))
    return _C_INT_KERNELS[mode.width][op](a, b)


def apply_unary(op: str, a: int | float, mode: SemanticsMode) -> int | float:
    if mode is SemanticsMode.JS:
        if op == "neg":
            return -a
        if op == "~":
            return float(~to_int32(a))
        return float(to_int32(a))  # cast
    width = mode.width
    if isinstance(a, float):
        if op == "neg":
            return -a
        return double_to_int(a, width)  # cast; ~ is rejected by typecheck
    if op == "neg":
        return wrap_int(-a, width)
    if op == "~":
        return ~a
    return a  # (int) cast of an int


def truthy(v: int | float) -> bool:
    """Condition test: nonzero and, for doubles, not NaN."""
    return v == v and v != 0


# ── Typechecking ─────────────────────────────────────────────────────

def infer_type(e: Expr, mode: SemanticsMode) -> str:
    """Return "int" or "double" for the node's result under a C mode,
    raising TypecheckError where C has no such operation.  In js mode
    every expression is legal and typed "double"."""
    if mode is SemanticsMode.JS:
        return "double"
    width = mode.width
    if isinstance(e, VarT):
        return "int"
    if isinstance(e, Const):
        if isinstance(e.value, float):
            return "double"
        if e.value >= (1 << width):
            raise TypecheckError(e.pos, f"integer literal does not fit in {width} bits")
        return "int"
    if isinstance(e, Unary):
        child = infer_type(e.child, mode)
        if e.op == "cast":
            return "int"
        if e.op == "~" and child == "double":
            raise TypecheckError(e.pos, "operator ~ requires an integer operand")
        return child
    if isinstance(e, Binary):
        left = infer_type(e.left, mode)
        right = infer_type(e.right, mode)
        has_double = left == "double" or right == "double"
        if e.op in _INT_ONLY_OPS:
            if has_double:
                raise TypecheckError(e.pos, f"operator {e.op} requires integer operands")
            return "int"
        if e.op in _COMPARE_OPS:
            return "int"
        return "double" if has_double else "int"
    # ternary: branches balance by the usual arithmetic conversions
    infer_type(e.cond, mode)
    then = infer_type(e.then, mode)
    other = infer_type(e.other, mode)
    return "double" if "double" in (then, other) else "int"


def typecheck(e: Expr, mode: SemanticsMode) -> Expr:
    """Validate an expression for a mode; returns it unchanged."""
    infer_type(e, mode)
    return e


# ── Tree-walking evaluation (the differential oracle) ────────────────

def _eval_c(e: Expr, t: int, kernels, width: int, half: int, mask: int):
    kind = type(e)
    if kind is Binary:
        a = _eval_c(e.left, t, kernels, width, half, mask)
        b = _eval_c(e.right, t, kernels, width, half, mask)
        if isinstance(a, float) or isinstance(b, float):
            return _C_DBL_KERNELS[e.op](float(a), float(b))
        return kernels[e.op](a, b)
    if kind is VarT:
        return ((t + half) & mask) - half
    if kind is Const:
        v = e.value
        if isinstance(v, int):
            return ((v + half) & mask) - half
        return v
    if kind is Unary:
        a = _eval_c(e.child, t, kernels, width, half, mask)
        if isinstance(a, float):
            return -a if e.op == "neg" else double_to_int(a, width)
        if e.op == "neg":
            return ((half - a) & mask) - half
        if e.op == "~":
            return ~a
        return a
    # ternary, evaluated eagerly so both branches share the VM's totality
    c = _eval_c(e.cond, t, kernels, width, half, mask)
    x = _eval_c(e.then, t, kernels, width, half, mask)
    y = _eval_c(e.other, t, kernels, width, half, mask)
    r = x if (c == c and c != 0) else y
    if isinstance(x, float) or isinstance(y, float):
        return float(r)
    return r


def _eval_js(e: Expr, t: int | float) -> float:
    kind = type(e)
    if kind is Binary:
        return _JS_KERNELS[e.op](_eval_js(e.left, t), _eval_js(e.right, t))
    if kind is VarT:
        return to_double(t)
    if kind is Const:
        v = e.value
        return v if isinstance(v, float) else to_double(v)
    if kind is Unary:
        a = _eval_js(e.child, t)
        if e.op == "neg":
            return -a
        if e.op == "~":
            return float(~to_int32(a))
        return float(to_int32(a))
    c = _eval_js(e.cond, t)
    x = _eval_js(e.then, t)
    y = _eval_js(e.other, t)
    return x if (c == c and c != 0.0) else y


def eval_ast(e: Expr, t: int, mode: SemanticsMode) -> int | float:
    """Evaluate an expression at time t, yielding the pre-truncation
    value.  Total for any well-typed expression and any integer t."""
    if mode is SemanticsMode.JS:
        return _eval_js(e, t)
    width = mode.width
    half = 1 << (width - 1)
    mask = (1 << width) - 1
    return _eval_c(e, t, _C_INT_KERNELS[width], width, half, mask)


def quantize(value: int | float) -> int:
    """Collapse an evaluation result to the output byte: the eight
    lowest bits, with doubles passing through ToInt32 first."""
    if isinstance(value, float):
        return to_int32(value) & 255
    return value & 255


def eval_ast_sample(e: Expr, t: int, mode: SemanticsMode) -> int:
    """Oracle path from expression to output byte."""
    return quantize(eval_ast(e, t, mode))

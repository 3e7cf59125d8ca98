"""Stack-bytecode compilation and fast sample rendering.

An expression compiles to a postfix ``Program`` whose instructions are
type-specialized for the chosen mode (integer ops carry the wrapping
width, js ops carry the ToInt32 coercions).  To execute, the instruction
stream is translated into a straight-line Python expression wrapped in a
sample function and a render loop, so the per-sample cost is one native
call instead of a tree walk.  The tree-walking ``eval_ast`` stays the
independent reference; the two are compared byte-for-byte in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from .audio import SampleChunk
from .expr import Binary, Const, Expr, Ternary, Unary, VarT, parse
from .semantics import (
    SemanticsMode,
    _C_INT_KERNELS,
    double_to_int,
    eval_ast,
    ieee_div,
    js_mod,
    to_double,
    to_int32,
    to_uint32,
    truthy,
    typecheck,
    wrap_int,
)


@dataclass(frozen=True, slots=True)
class Instr:
    op: str
    arg: int | float | None = None


_PUSH_OPS = frozenset({"pushi", "pushd", "loadt"})
_UNARY_OPS = frozenset({"negi", "negd", "noti", "notj", "casti", "castj", "i2d"})
_SELECT_OPS = frozenset({"seli", "seld"})

_C_INT_OPCODE = {
    "+": "addi", "-": "subi", "*": "muli", "/": "divi", "%": "modi",
    "<<": "shli", ">>": "shri", "&": "andi", "^": "xori", "|": "ori",
    "<": "lti", "<=": "lei", ">": "gti", ">=": "gei", "==": "eqi", "!=": "nei",
}
_C_DBL_OPCODE = {
    "+": "addd", "-": "subd", "*": "muld", "/": "divd",
    "<": "ltd", "<=": "led", ">": "gtd", ">=": "ged", "==": "eqd", "!=": "ned",
}
_JS_OPCODE = {
    "+": "addd", "-": "subd", "*": "muld", "/": "divd", "%": "modj",
    "<<": "shlj", ">>": "shrj", "&": "andj", "^": "xorj", "|": "orj",
    "<": "ltj", "<=": "lej", ">": "gtj", ">=": "gej", "==": "eqj", "!=": "nej",
}

# Result kind per opcode: "i" = two's-complement int, "d" = double.
_RESULT_KIND = {
    "pushi": "i", "loadt": "i", "pushd": "d",
    "negi": "i", "noti": "i", "casti": "i", "i2d": "d",
    "negd": "d", "notj": "d", "castj": "d",
    "addi": "i", "subi": "i", "muli": "i", "divi": "i", "modi": "i",
    "shli": "i", "shri": "i", "andi": "i", "xori": "i", "ori": "i",
    "lti": "i", "lei": "i", "gti": "i", "gei": "i", "eqi": "i", "nei": "i",
    "addd": "d", "subd": "d", "muld": "d", "divd": "d",
    "ltd": "i", "led": "i", "gtd": "i", "ged": "i", "eqd": "i", "ned": "i",
    "modj": "d", "andj": "d", "xorj": "d", "orj": "d", "shlj": "d", "shrj": "d",
    "ltj": "d", "lej": "d", "gtj": "d", "gej": "d", "eqj": "d", "nej": "d",
}


class Program:
    """Compiled form of one expression under one mode; immutable and
    safe to evaluate from any number of threads."""

    __slots__ = ("mode", "code", "max_stack", "generated_source", "_sample_fn", "_render_fn")

    def __init__(self, mode: SemanticsMode, code: tuple[Instr, ...]):
        self.mode = mode
        self.code = code
        self.max_stack = _check_postfix(code)
        source, namespace = _codegen(code, mode)
        self.generated_source = source
        exec(source, namespace)
        self._sample_fn = namespace["_sample"]
        self._render_fn = namespace["_render"]

    def __repr__(self) -> str:
        return f"<Program {self.mode.value} instrs={len(self.code)} max_stack={self.max_stack}>"


def _check_postfix(code: tuple[Instr, ...]) -> int:
    """Validate the postfix linearization and return its exact maximum
    stack depth."""
    depth = 0
    deepest = 0
    for ins in code:
        if ins.op in _PUSH_OPS:
            pops = 0
        elif ins.op in _UNARY_OPS:
            pops = 1
        elif ins.op in _SELECT_OPS:
            pops = 3
        elif ins.op in _RESULT_KIND:
            pops = 2
        else:
            raise ValueError(f"unknown opcode {ins.op!r}")
        if depth < pops:
            raise ValueError(f"stack underflow at {ins.op}")
        depth += 1 - pops
        deepest = max(deepest, depth)
    if depth != 1:
        raise ValueError(f"program leaves {depth} values on the stack")
    return deepest


# ── Compilation ──────────────────────────────────────────────────────

def _has_var(e: Expr) -> bool:
    if isinstance(e, VarT):
        return True
    if isinstance(e, Unary):
        return _has_var(e.child)
    if isinstance(e, Binary):
        return _has_var(e.left) or _has_var(e.right)
    if isinstance(e, Ternary):
        return _has_var(e.cond) or _has_var(e.then) or _has_var(e.other)
    return False


class _Compiler:
    def __init__(self, mode: SemanticsMode, fold: bool):
        self.mode = mode
        self.fold = fold
        self.instrs: list[Instr] = []

    def _push_value(self, v: int | float) -> str:
        if isinstance(v, float):
            self.instrs.append(Instr("pushd", v))
            return "double"
        self.instrs.append(Instr("pushi", v))
        return "int"

    def emit(self, e: Expr) -> str:
        """Append postfix code for e; returns its result type."""
        mode = self.mode
        if self.fold and not isinstance(e, (Const, VarT)) and not _has_var(e):
            return self._push_value(eval_ast(e, 0, mode))
        if isinstance(e, Const):
            if mode is SemanticsMode.JS:
                return self._push_value(to_double(e.value))
            if isinstance(e.value, int):
                return self._push_value(wrap_int(e.value, mode.width))
            return self._push_value(e.value)
        if isinstance(e, VarT):
            self.instrs.append(Instr("loadt"))
            return "double" if mode is SemanticsMode.JS else "int"
        if isinstance(e, Unary):
            return self._emit_unary(e)
        if isinstance(e, Binary):
            return self._emit_binary(e)
        return self._emit_ternary(e)

    def _emit_unary(self, e: Unary) -> str:
        kind = self.emit(e.child)
        if self.mode is SemanticsMode.JS:
            self.instrs.append(Instr({"neg": "negd", "~": "notj", "cast": "castj"}[e.op]))
            return "double"
        if e.op == "cast":
            if kind == "double":
                self.instrs.append(Instr("casti"))
            return "int"
        if e.op == "neg":
            self.instrs.append(Instr("negd" if kind == "double" else "negi"))
            return kind
        self.instrs.append(Instr("noti"))
        return "int"

    def _emit_binary(self, e: Binary) -> str:
        if self.mode is SemanticsMode.JS:
            self.emit(e.left)
            self.emit(e.right)
            self.instrs.append(Instr(_JS_OPCODE[e.op]))
            return "double"
        left_kind = self.emit(e.left)
        right_at = len(self.instrs)
        right_kind = self.emit(e.right)
        if left_kind == "int" and right_kind == "int":
            self.instrs.append(Instr(_C_INT_OPCODE[e.op]))
            return "int"
        # Usual arithmetic conversions: the integer side, if any, is
        # promoted before the double-typed operator runs.
        if left_kind == "int":
            self.instrs.insert(right_at, Instr("i2d"))
        elif right_kind == "int":
            self.instrs.append(Instr("i2d"))
        opcode = _C_DBL_OPCODE[e.op]
        self.instrs.append(Instr(opcode))
        return "int" if _RESULT_KIND[opcode] == "i" else "double"

    def _emit_ternary(self, e: Ternary) -> str:
        cond_kind = self.emit(e.cond)
        then_kind = self.emit(e.then)
        other_at = len(self.instrs)
        other_kind = self.emit(e.other)
        if then_kind != other_kind:
            if then_kind == "int":
                self.instrs.insert(other_at, Instr("i2d"))
            else:
                self.instrs.append(Instr("i2d"))
        select = "seld" if (self.mode is SemanticsMode.JS or cond_kind == "double") else "seli"
        self.instrs.append(Instr(select))
        return "double" if "double" in (then_kind, other_kind) else "int"


def compile_program(e: Expr, mode: SemanticsMode, fold: bool = True) -> Program:
    """Typecheck and compile an expression for a mode.  With fold=True,
    literal-only subtrees collapse to their kernel-exact value."""
    typecheck(e, mode)
    comp = _Compiler(mode, fold)
    comp.emit(e)
    return Program(mode, tuple(comp.instrs))


def build_program(source: str, mode: SemanticsMode, fold: bool = True) -> Program:
    """Parse, typecheck and compile in one step."""
    return compile_program(parse(source), mode, fold=fold)


# ── Code generation ──────────────────────────────────────────────────

def _codegen(code: tuple[Instr, ...], mode: SemanticsMode) -> tuple[str, dict]:
    namespace: dict = {"__builtins__": {}, "float": float, "_ti32": to_int32, "_tr": truthy}
    if mode is SemanticsMode.JS:
        namespace.update(
            _fl=to_double, _tu32=to_uint32, _fdiv=ieee_div, _jmod=js_mod,
            _shlj=lambda a, b: float(wrap_int(to_int32(a) << (to_uint32(b) & 31), 32)),
        )
        load_t = "_fl(t)"
        half = mask = shmask = 0  # unused in js templates
    else:
        width = mode.width
        half = 1 << (width - 1)
        mask = (1 << width) - 1
        shmask = width - 1
        kernels = _C_INT_KERNELS[width]
        namespace.update(
            _idiv=kernels["/"], _imod=kernels["%"], _fdiv=ieee_div,
            _di=lambda x, _w=width: double_to_int(x, _w),
        )
        load_t = f"(((t+{half})&{mask})-{half})"

    def wrap(expr: str) -> str:
        return f"((({expr})+{half})&{mask})-{half}"

    stack: list[tuple[str, str]] = []  # (expression text, result kind)

    for index, ins in enumerate(code):
        op = ins.op
        if op == "pushi":
            stack.append((f"({ins.arg})", "i"))
            continue
        if op == "pushd":
            name = f"_k{index}"
            namespace[name] = ins.arg
            stack.append((name, "d"))
            continue
        if op == "loadt":
            stack.append((load_t, "d" if mode is SemanticsMode.JS else "i"))
            continue
        if op in _UNARY_OPS:
            a, _ = stack.pop()
            if op == "negi":
                text = f"((({half}-{a})&{mask})-{half})"
            elif op == "negd":
                text = f"(-{a})"
            elif op == "noti":
                text = f"(~{a})"
            elif op == "notj":
                text = f"float(~_ti32({a}))"
            elif op == "casti":
                text = f"_di({a})"
            elif op == "castj":
                text = f"float(_ti32({a}))"
            else:  # i2d
                text = f"float({a})"
            stack.append((text, _RESULT_KIND[op]))
            continue
        if op in _SELECT_OPS:
            y, y_kind = stack.pop()
            x, _ = stack.pop()
            c, _ = stack.pop()
            cond = f"{c}!=0" if op == "seli" else f"_tr({c})"
            stack.append((f"({x} if {cond} else {y})", y_kind))
            continue
        b, _ = stack.pop()
        a, _ = stack.pop()
        if op == "addi":
            text = f"({wrap(f'{a}+{b}')})"
        elif op == "subi":
            text = f"({wrap(f'{a}-{b}')})"
        elif op == "muli":
            text = f"({wrap(f'{a}*{b}')})"
        elif op == "divi":
            text = f"_idiv({a},{b})"
        elif op == "modi":
            text = f"_imod({a},{b})"
        elif op == "shli":
            text = f"({wrap(f'{a}<<({b}&{shmask})')})"
        elif op == "shri":
            text = f"({a}>>({b}&{shmask}))"
        elif op == "andi":
            text = f"({a}&{b})"
        elif op == "xori":
            text = f"({a}^{b})"
        elif op == "ori":
            text = f"({a}|{b})"
        elif op in ("lti", "ltd"):
            text = f"(1 if {a}<{b} else 0)"
        elif op in ("lei", "led"):
            text = f"(1 if {a}<={b} else 0)"
        elif op in ("gti", "gtd"):
            text = f"(1 if {a}>{b} else 0)"
        elif op in ("gei", "ged"):
            text = f"(1 if {a}>={b} else 0)"
        elif op in ("eqi", "eqd"):
            text = f"(1 if {a}=={b} else 0)"
        elif op in ("nei", "ned"):
            text = f"(1 if {a}!={b} else 0)"
        elif op == "addd":
            text = f"({a}+{b})"
        elif op == "subd":
            text = f"({a}-{b})"
        elif op == "muld":
            text = f"({a}*{b})"
        elif op == "divd":
            text = f"_fdiv({a},{b})"
        elif op == "modj":
            text = f"_jmod({a},{b})"
        elif op == "andj":
            text = f"float(_ti32({a})&_ti32({b}))"
        elif op == "xorj":
            text = f"float(_ti32({a})^_ti32({b}))"
        elif op == "orj":
            text = f"float(_ti32({a})|_ti32({b}))"
        elif op == "shlj":
            text = f"_shlj({a},{b})"
        elif op == "shrj":
            text = f"float(_ti32({a})>>(_tu32({b})&31))"
        elif op == "ltj":
            text = f"(1.0 if {a}<{b} else 0.0)"
        elif op == "lej":
            text = f"(1.0 if {a}<={b} else 0.0)"
        elif op == "gtj":
            text = f"(1.0 if {a}>{b} else 0.0)"
        elif op == "gej":
            text = f"(1.0 if {a}>={b} else 0.0)"
        elif op == "eqj":
            text = f"(1.0 if {a}=={b} else 0.0)"
        elif op == "nej":
            text = f"(1.0 if {a}!={b} else 0.0)"
        else:
            raise ValueError(f"unknown opcode {op!r}")
        stack.append((text, _RESULT_KIND[op]))

    final, kind = stack[0]
    body = f"_ti32({final})&255" if kind == "d" else f"({final})&255"
    source = (
        f"def _sample(t):\n"
        f"    return {body}\n"
        f"\n"
        f"def _render(t, n, _append):\n"
        f"    end = t + n\n"
        f"    while t < end:\n"
        f"        _append({body})\n"
        f"        t += 1\n"
    )
    return source, namespace


# ── Execution ────────────────────────────────────────────────────────

def eval_sample(program: Program, t: int) -> int:
    """Run the program at time t and quantize to the output byte."""
    return program._sample_fn(t)


def render_range(program: Program, t0: int, n: int, rate: int = 8000) -> SampleChunk:
    """Render n consecutive samples starting at t0."""
    if n < 0:
        raise ValueError("sample count must be non-negative")
    out = bytearray()
    if n:
        program._render_fn(t0, n, out.append)
    return SampleChunk(t0=t0, data=bytes(out), rate=rate)

"""Expression mini-language for drift and observation functions.

Model functions are written as plain text over the variables ``x1..xD``,
e.g. ``"x1*(1+0.25*cos(x1))"``.  This module parses such text into a small
immutable AST, evaluates it pointwise (on scalars or numpy arrays), and
differentiates it symbolically.

Grammar (highest precedence first)::

    power   :=  atom ('^' factor)?          # right-associative exponent
    factor  :=  '-' factor | power           # unary minus binds below '^'
    term    :=  factor (('*'|'/') factor)*
    expr    :=  term (('+'|'-') term)*
    atom    :=  NUMBER | VARIABLE | FUNC '(' expr ')' | '(' expr ')'

Functions: sin, cos, exp, log, sqrt, tanh, abs, and sign (sign exists so
that derivatives of abs print and re-parse; sign(0) evaluates to 0, and
its own derivative is taken as 0 everywhere).

ASTs are frozen dataclasses: immutable after construction and safe to
evaluate concurrently from multiple threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np


class ExprError(ValueError):
    """Base class for expression language errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownVariableError(ExprSyntaxError):
    pass


class UnknownFunctionError(ExprSyntaxError):
    pass


class ArityError(ExprSyntaxError):
    pass


# --- AST node types -------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based: Var(1) is x1


@dataclass(frozen=True)
class Neg:
    arg: "ExprAst"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "ExprAst"


ExprAst = Union[Const, Var, Neg, BinOp, Call]

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "tanh", "abs", "sign")

_NUMPY_FN = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "tanh": np.tanh,
    "abs": np.abs,
    "sign": np.sign,
}

_VAR_RE = re.compile(r"^x([0-9]+)$")


# --- tokenizer / parser ---------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<num>(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(
                f"unexpected character {text[pos]!r}", _byte_offset(text, pos)
            )
        kind = m.lastgroup
        tokens.append((kind, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(("end", "", _byte_offset(text, n)))
    return tokens


class _Parser:
    def __init__(self, text: str, dim: int):
        self.text = text
        self.dim = dim
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, text, off = self.peek()
        if kind != "op" or text != op:
            raise ExprSyntaxError(f"expected {op!r}", off)
        return self.advance()

    def parse(self) -> ExprAst:
        ast = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", off)
        return ast

    def expr(self) -> ExprAst:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = BinOp(text, node, self.term())
            else:
                return node

    def term(self) -> ExprAst:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = BinOp(text, node, self.factor())
            else:
                return node

    def factor(self) -> ExprAst:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> ExprAst:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> ExprAst:
        kind, text, off = self.advance()
        if kind == "num":
            return Const(float(text))
        if kind == "ident":
            nxt_kind, nxt_text, _ = self.peek()
            if nxt_kind == "op" and nxt_text == "(":
                if text not in FUNCTIONS:
                    raise UnknownFunctionError(f"unknown function {text!r}", off)
                self.advance()
                arg = self.expr()
                kind2, text2, off2 = self.peek()
                if kind2 == "op" and text2 == ",":
                    raise ArityError(
                        f"function {text!r} takes exactly one argument", off2
                    )
                self.expect_op(")")
                return Call(text, arg)
            m = _VAR_RE.match(text)
            if m:
                index = int(m.group(1))
                if not 1 <= index <= self.dim:
                    raise UnknownVariableError(
                        f"unknown variable {text!r} (model dimension is {self.dim})",
                        off,
                    )
                return Var(index)
            raise UnknownVariableError(f"unknown identifier {text!r}", off)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(f"unexpected {text!r}" if text else "unexpected end of input", off)


def parse(text: str, dim: int) -> ExprAst:
    """Parse an expression over x1..x``dim`` into an AST."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    return _Parser(text, dim).parse()


# --- printing -------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}
_NEG_PREC = 2.5  # between mul/div and pow, per the grammar
_ATOM_PREC = 9


def _prec(ast: ExprAst) -> float:
    if isinstance(ast, BinOp):
        return _PREC[ast.op]
    if isinstance(ast, Neg):
        return _NEG_PREC
    return _ATOM_PREC


def _fmt_const(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def to_string(ast: ExprAst) -> str:
    """Render an AST as parseable text; parse(to_string(a)) == a structurally."""
    if isinstance(ast, Const):
        return _fmt_const(ast.value)
    if isinstance(ast, Var):
        return f"x{ast.index}"
    if isinstance(ast, Neg):
        inner = to_string(ast.arg)
        if _prec(ast.arg) < _NEG_PREC:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(ast, Call):
        return f"{ast.fn}({to_string(ast.arg)})"
    if isinstance(ast, BinOp):
        p = _PREC[ast.op]
        left = to_string(ast.left)
        right = to_string(ast.right)
        if ast.op == "^":
            # right-associative: parenthesize left at equal precedence
            if _prec(ast.left) <= p:
                left = f"({left})"
            if _prec(ast.right) < p:
                right = f"({right})"
        else:
            if _prec(ast.left) < p:
                left = f"({left})"
            if _prec(ast.right) <= p:
                right = f"({right})"
        return f"{left}{ast.op}{right}"
    raise TypeError(f"not an AST node: {ast!r}")


# --- evaluation -----------------------------------------------------------

def evaluate(ast: ExprAst, point: Sequence):
    """Evaluate an AST at a point (entries may be floats or numpy arrays).

    Domain errors (log of a non-positive number, division by zero, ...)
    follow IEEE semantics and poison the result with NaN/inf; grid-level
    callers detect those and report "non-finite field value at node".
    """
    with np.errstate(all="ignore"):
        return _eval(ast, point)


def _eval(ast: ExprAst, point):
    if isinstance(ast, Const):
        return ast.value
    if isinstance(ast, Var):
        return point[ast.index - 1]
    if isinstance(ast, Neg):
        return -_eval(ast.arg, point)  # numpy negation is fine for arrays
    if isinstance(ast, Call):
        return _NUMPY_FN[ast.fn](_eval(ast.arg, point))
    if isinstance(ast, BinOp):
        a = _eval(ast.left, point)
        b = _eval(ast.right, point)
        if ast.op == "+":
            return np.add(a, b)
        if ast.op == "-":
            return np.subtract(a, b)
        if ast.op == "*":
            return np.multiply(a, b)
        if ast.op == "/":
            return np.divide(a, b)
        return np.power(a, b)
    raise TypeError(f"not an AST node: {ast!r}")


def compile_ast(ast: ExprAst) -> Callable[[Sequence], object]:
    """Compile an AST into a closure over a coordinate sequence.

    The returned callable takes ``xs`` where ``xs[d]`` is the value (scalar
    or array) of variable ``x{d+1}``; it is the hot-path form of evaluate.
    """
    if isinstance(ast, Const):
        v = ast.value
        return lambda xs: v
    if isinstance(ast, Var):
        i = ast.index - 1
        return lambda xs: xs[i]
    if isinstance(ast, Neg):
        f = compile_ast(ast.arg)
        return lambda xs: -f(xs)
    if isinstance(ast, Call):
        g = _NUMPY_FN[ast.fn]
        f = compile_ast(ast.arg)
        return lambda xs: g(f(xs))
    if isinstance(ast, BinOp):
        fl = compile_ast(ast.left)
        fr = compile_ast(ast.right)
        op = ast.op
        if op == "+":
            return lambda xs: fl(xs) + fr(xs)
        if op == "-":
            return lambda xs: fl(xs) - fr(xs)
        if op == "*":
            return lambda xs: fl(xs) * fr(xs)
        if op == "/":
            return lambda xs: np.divide(fl(xs), fr(xs))
        return lambda xs: np.power(fl(xs), fr(xs))
    raise TypeError(f"not an AST node: {ast!r}")


# --- symbolic differentiation ---------------------------------------------
# Smart constructors fold constants so derivative trees stay small; parse
# never folds, keeping parse/to_string round trips structural.

def _is_const(ast, value=None) -> bool:
    return isinstance(ast, Const) and (value is None or ast.value == value)


def _add(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return BinOp("+", a, b)


def _sub(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    return BinOp("-", a, b)


def _mul(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return BinOp("*", a, b)


def _div(a, b):
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return Const(a.value / b.value)
    if _is_const(b, 1.0):
        return a
    return BinOp("/", a, b)


def _pow(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(float(np.power(a.value, b.value)))
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return Const(1.0)
    return BinOp("^", a, b)


def _neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def differentiate(ast: ExprAst, var: int) -> ExprAst:
    """Exact symbolic partial derivative with respect to x``var`` (1-based).

    The result is constant-folded but not otherwise simplified; correctness
    is defined by evaluation.  abs differentiates to sign (sign(0) = 0),
    and sign itself differentiates to 0.
    """
    if isinstance(ast, Const):
        return Const(0.0)
    if isinstance(ast, Var):
        return Const(1.0) if ast.index == var else Const(0.0)
    if isinstance(ast, Neg):
        return _neg(differentiate(ast.arg, var))
    if isinstance(ast, BinOp):
        a, b = ast.left, ast.right
        da = differentiate(a, var)
        db = differentiate(b, var)
        if ast.op == "+":
            return _add(da, db)
        if ast.op == "-":
            return _sub(da, db)
        if ast.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if ast.op == "/":
            return _div(_sub(_mul(da, b), _mul(a, db)), _mul(b, b))
        # power: constant exponents use the power rule; general exponents go
        # through exp(b*log a), valid for positive bases only
        if isinstance(b, Const):
            c = b.value
            return _mul(_mul(Const(c), _pow(a, Const(c - 1.0))), da)
        return _mul(
            _pow(a, b),
            _add(_mul(db, Call("log", a)), _div(_mul(b, da), a)),
        )
    if isinstance(ast, Call):
        a = ast.arg
        da = differentiate(a, var)
        fn = ast.fn
        if fn == "sin":
            return _mul(Call("cos", a), da)
        if fn == "cos":
            return _mul(_neg(Call("sin", a)), da)
        if fn == "exp":
            return _mul(Call("exp", a), da)
        if fn == "log":
            return _div(da, a)
        if fn == "sqrt":
            return _div(da, _mul(Const(2.0), Call("sqrt", a)))
        if fn == "tanh":
            return _mul(_sub(Const(1.0), _pow(Call("tanh", a), Const(2.0))), da)
        if fn == "abs":
            return _mul(Call("sign", a), da)
        if fn == "sign":
            return Const(0.0)
    raise TypeError(f"not an AST node: {ast!r}")


def divergence(components: Sequence[ExprAst]) -> ExprAst:
    """Sum of d(components[d])/dx_{d+1}: the divergence of a vector field."""
    out: ExprAst = Const(0.0)
    for d, comp in enumerate(components):
        out = _add(out, differentiate(comp, d + 1))
    return out


def max_var_index(ast: ExprAst) -> int:
    if isinstance(ast, Var):
        return ast.index
    if isinstance(ast, Neg):
        return max_var_index(ast.arg)
    if isinstance(ast, Call):
        return max_var_index(ast.arg)
    if isinstance(ast, BinOp):
        return max(max_var_index(ast.left), max_var_index(ast.right))
    return 0


# --- model specification ----------------------------------------------------

@dataclass(frozen=True)
class ModelSpec:
    """Signal-observation model: drift f (dim components) and observation h.

    dx = f(x) dt + dv,  dy = h(x) dt + dw with unit diffusion in both
    equations and mutually independent noises; x has ``dim`` components and
    y has ``obs_dim``.
    """

    dim: int
    obs_dim: int
    drift: tuple
    observation: tuple

    def __post_init__(self):
        if self.dim < 1 or self.obs_dim < 1:
            raise ValueError("dimensions must be positive")
        if len(self.drift) != self.dim:
            raise ValueError(f"expected {self.dim} drift components, got {len(self.drift)}")
        if len(self.observation) != self.obs_dim:
            raise ValueError(
                f"expected {self.obs_dim} observation components, got {len(self.observation)}"
            )
        for ast in (*self.drift, *self.observation):
            idx = max_var_index(ast)
            if idx > self.dim:
                raise ValueError(
                    f"expression references x{idx} but model dimension is {self.dim}"
                )

    @classmethod
    def from_texts(cls, drift_texts: Sequence[str], obs_texts: Sequence[str]) -> "ModelSpec":
        dim = len(drift_texts)
        drift = tuple(parse(t, dim) for t in drift_texts)
        observation = tuple(parse(t, dim) for t in obs_texts)
        return cls(dim=dim, obs_dim=len(obs_texts), drift=drift, observation=observation)

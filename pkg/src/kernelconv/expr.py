"""Expression language for field, graph and point-track formulas.

Grammar (whitespace between tokens is ignored)::

    expr    := term (("+" | "-") term)*
    term    := power (("*" | "/") power)*
    power   := unary ("^" power)?
    unary   := "-" unary | primary
    primary := NUMBER | VAR | FUNC "(" expr ("," expr)? ")" | "(" expr ")"
    NUMBER  := digits ["." digits] [("e" | "E") ["+" | "-"] digits]
             | "." digits [exponent]
    VAR     := "x" | "y" | "r" | "s" | "j"
    FUNC    := "abs" | "sqrt" | "log" | "exp" | "sin" | "cos" | "min" | "max"

Unary minus binds tighter than ``^`` (so ``-x^2`` is ``(-x)^2``), ``^`` is
right-associative, and binary ``a - b`` is stored as ``a + (-b)``.

Values are extended reals where only ``-inf`` is admitted.  Any operation
producing NaN or ``+inf`` is an :class:`EvalError`, as is division by zero.
``log(0)`` is ``-inf`` and ``exp(-inf)`` is ``0``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import EvalError, ParseError

VARIABLES = frozenset({"x", "y", "r", "s", "j"})
FUNCTIONS = {
    "abs": 1, "sqrt": 1, "log": 1, "exp": 1, "sin": 1, "cos": 1,
    "min": 2, "max": 2,
}
_OP_NAMES = {"+": "Add", "*": "Mul", "/": "Div", "^": "Pow"}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Expr = Union[Num, Var, Neg, BinOp, Call]


# -- tokenizer -----------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "ident", "op", "end"
    text: str
    offset: int


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> list:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        start = i
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            while i < n and text[i].isdigit():
                i += 1
            if i < n and text[i] == ".":
                i += 1
                if not (i < n and text[i].isdigit()):
                    raise ParseError(_byte_offset(text, i), "digit expected after '.'")
                while i < n and text[i].isdigit():
                    i += 1
            if i < n and text[i] in "eE":
                k = i + 1
                if k < n and text[k] in "+-":
                    k += 1
                if not (k < n and text[k].isdigit()):
                    raise ParseError(_byte_offset(text, i), "malformed exponent")
                i = k
                while i < n and text[i].isdigit():
                    i += 1
            tokens.append(_Token("num", text[start:i], _byte_offset(text, start)))
        elif c.isascii() and (c.isalpha() or c == "_"):
            while i < n and text[i].isascii() and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(_Token("ident", text[start:i], _byte_offset(text, start)))
        elif c in "+-*/^(),":
            tokens.append(_Token("op", c, _byte_offset(text, start)))
            i += 1
        else:
            raise ParseError(_byte_offset(text, start), f"unexpected character {c!r}")
    tokens.append(_Token("end", "", _byte_offset(text, n)))
    return tokens


# -- parser --------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def accept(self, op: str) -> bool:
        tok = self.peek()
        if tok.kind == "op" and tok.text == op:
            self.pos += 1
            return True
        return False

    def expect(self, op: str) -> None:
        tok = self.peek()
        if not self.accept(op):
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(tok.offset, f"expected {op!r}, found {found}")

    def parse(self) -> Expr:
        if self.peek().kind == "end":
            raise ParseError(0, "empty expression")
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            if tok.text == ")":
                raise ParseError(tok.offset, "unbalanced ')'")
            raise ParseError(tok.offset, f"unexpected token {tok.text!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            if self.accept("+"):
                node = BinOp("+", node, self.term())
            elif self.accept("-"):
                node = BinOp("+", node, Neg(self.term()))
            else:
                return node

    def term(self) -> Expr:
        node = self.power()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.take()
                node = BinOp(tok.text, node, self.power())
            else:
                return node

    def power(self) -> Expr:
        base = self.unary()
        if self.accept("^"):
            return BinOp("^", base, self.power())
        return base

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.primary()

    def primary(self) -> Expr:
        tok = self.take()
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "ident":
            if tok.text in FUNCTIONS:
                return self.call(tok)
            if tok.text in VARIABLES:
                nxt = self.peek()
                if nxt.kind == "op" and nxt.text == "(":
                    raise ParseError(nxt.offset, f"{tok.text!r} is not a function")
                return Var(tok.text)
            raise ParseError(tok.offset, f"unknown identifier {tok.text!r}")
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(tok.offset, f"expected operand, found {found}")

    def call(self, name_tok: _Token) -> Expr:
        self.expect("(")
        args = [self.expr()]
        while self.accept(","):
            args.append(self.expr())
        self.expect(")")
        arity = FUNCTIONS[name_tok.text]
        if len(args) != arity:
            raise ParseError(
                name_tok.offset,
                f"{name_tok.text} takes {arity} argument(s), got {len(args)}",
            )
        return Call(name_tok.text, tuple(args))


@functools.lru_cache(maxsize=512)
def parse(text: str) -> Expr:
    """Parse ``text`` into an immutable AST; raises :class:`ParseError`."""
    return _Parser(text).parse()


def free_vars(e: Expr) -> frozenset:
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, Var):
        return frozenset({e.name})
    if isinstance(e, Neg):
        return free_vars(e.operand)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    return frozenset().union(*(free_vars(a) for a in e.args))


# -- printing ------------------------------------------------------------------

def _format_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_text(e: Expr) -> str:
    """Canonical, fully parenthesized text; ``parse(to_text(e)) == e``."""
    if isinstance(e, Num):
        return _format_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_text(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    return f"{e.func}({', '.join(to_text(a) for a in e.args)})"


def dump(e: Expr) -> str:
    """Constructor-style rendering, e.g. ``Add(Pow(x,2),Neg(1))``."""
    if isinstance(e, Num):
        return _format_number(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"Neg({dump(e.operand)})"
    if isinstance(e, BinOp):
        return f"{_OP_NAMES[e.op]}({dump(e.left)},{dump(e.right)})"
    return f"{e.func}({','.join(dump(a) for a in e.args)})"


# -- evaluation ----------------------------------------------------------------

_UNARY = {
    "abs": np.abs, "sqrt": np.sqrt, "log": np.log, "exp": np.exp,
    "sin": np.sin, "cos": np.cos,
}


def _check(value: np.ndarray, what: str) -> np.ndarray:
    bad = np.isnan(value) | np.isposinf(value)
    if bad.any():
        index = int(np.flatnonzero(bad)[0])
        raise EvalError(f"{what} is undefined or +inf", index=index)
    return value


def _eval(e: Expr, env: Mapping[str, np.ndarray]) -> np.ndarray:
    if isinstance(e, Num):
        return np.float64(e.value)
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise EvalError(f"unbound variable {e.name!r}") from None
    if isinstance(e, Neg):
        return _check(np.negative(_eval(e.operand, env)), "negation")
    if isinstance(e, BinOp):
        a = _eval(e.left, env)
        b = _eval(e.right, env)
        if e.op == "+":
            return _check(np.add(a, b), "sum")
        if e.op == "*":
            return _check(np.multiply(a, b), "product")
        if e.op == "/":
            zero = np.asarray(b) == 0
            if zero.any():
                index = int(np.flatnonzero(np.broadcast_to(zero, np.broadcast(a, b).shape))[0])
                raise EvalError("division by zero", index=index)
            return _check(np.divide(a, b), "quotient")
        return _check(np.power(a, b), "power")
    args = [_eval(a, env) for a in e.args]
    if e.func == "min":
        return np.minimum(*args)
    if e.func == "max":
        return np.maximum(*args)
    return _check(_UNARY[e.func](args[0]), f"{e.func}()")


def evaluate_array(e: Expr, env: Mapping[str, object]) -> np.ndarray:
    """Vectorized evaluation; env values broadcast against each other.

    On failure the raised :class:`EvalError` carries the flat index of the
    first offending element in the broadcast shape.
    """
    arrays = {}
    for name, value in env.items():
        arr = np.asarray(value, dtype=np.float64)
        if np.isnan(arr).any() or np.isposinf(arr).any():
            raise EvalError(f"variable {name!r} is NaN or +inf")
        arrays[name] = arr
    shape = np.broadcast_shapes(*(a.shape for a in arrays.values())) if arrays else ()
    with np.errstate(all="ignore"):
        out = _eval(e, arrays)
    return np.broadcast_to(np.asarray(out, dtype=np.float64), shape)


def evaluate(e: Expr, env: Mapping[str, float]) -> float:
    """Evaluate ``e`` at a single point. Returns a float, possibly ``-inf``."""
    return float(evaluate_array(e, env))

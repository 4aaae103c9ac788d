"""Tiny expression language for complex formulas in the variables x and y.

Grammar, loosest to tightest binding:

    sum    := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' ['-'] INTEGER)?
    atom   := NUMBER | 'i' | 'x' | 'y' | FN '(' sum ')' | '(' sum ')'

with FN one of conj, exp, log.  Exponents are integer literals with
|n| <= 16 and there is no implicit multiplication.  The parser records a
source span on every node; spans never participate in equality, so
structural comparison of trees ignores where they were parsed from.

Printing is precedence aware and inverse to parsing: ``parse(to_source(e))``
reproduces ``e`` node for node whenever the constants in ``e`` are
nonnegative reals or the imaginary unit, which is the normal form the
builder helpers at the bottom of this module produce.

Evaluation happens entirely in jet arithmetic, so every mixed Wirtinger
derivative of a formula up to the jet order comes out of a single pass.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Mapping, NamedTuple, NoReturn

from .errors import ExponentOutOfRange, ExprSyntaxError, FoliaError, NonIntegerExponent
from .wirtinger import (
    DEFAULT_ORDER,
    Point,
    WirtingerJet,
    constant_jet,
    jet_add,
    jet_conj,
    jet_div,
    jet_exp,
    jet_log,
    jet_mul,
    jet_neg,
    jet_pow,
    jet_seed,
    jet_sub,
)

MAX_EXPONENT = 16
FUNCTIONS = ("conj", "exp", "log")


@dataclass(frozen=True)
class Span:
    """Half-open range of source offsets [start, end)."""

    start: int
    end: int


class Expr:
    """Base class for expression nodes."""

    __match_args__ = ()


@dataclass(frozen=True)
class Var(Expr):
    name: str
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const(Expr):
    value: complex
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr
    span: Span | None = field(default=None, compare=False, repr=False)


# tokenizer -----------------------------------------------------------------

class _Token(NamedTuple):
    kind: str
    text: str
    start: int
    end: int


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[()+\-*/^])")

_ATOM_EXPECTED = frozenset(
    {"number", "'i'", "'x'", "'y'", "'conj'", "'exp'", "'log'", "'('"})
_NAME_EXPECTED = frozenset(
    {"'i'", "'x'", "'y'", "'conj'", "'exp'", "'log'"})


def _tokenize(text: str) -> list[_Token]:
    out: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(
                f"unexpected character {text[pos]!r} at offset {pos}",
                span=Span(pos, pos + 1), expected=_ATOM_EXPECTED)
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        out.append(_Token(m.lastgroup, m.group(), m.start(), m.end()))
    out.append(_Token("end", "", len(text), len(text)))
    return out


def _describe(tok: _Token) -> str:
    if tok.kind == "end":
        return "end of input"
    if tok.kind == "number":
        return f"number {tok.text!r}"
    if tok.kind == "name":
        return f"name {tok.text!r}"
    return f"{tok.text!r}"


# parser --------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[_Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, tok: _Token, expected: frozenset[str]) -> NoReturn:
        raise ExprSyntaxError(
            f"unexpected {_describe(tok)} at offset {tok.start}",
            span=Span(tok.start, tok.end), expected=expected)

    def expect_op(self, ch: str) -> _Token:
        tok = self.peek()
        if tok.kind == "op" and tok.text == ch:
            return self.advance()
        self.fail(tok, frozenset({f"'{ch}'"}))

    def at_op(self, chars: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in chars

    def sum(self) -> Expr:
        node = self.term()
        while self.at_op("+-"):
            op = self.advance().text
            right = self.term()
            node = BinOp(op, node, right, span=_joined_span(node, right))
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.at_op("*/"):
            op = self.advance().text
            right = self.unary()
            node = BinOp(op, node, right, span=_joined_span(node, right))
        return node

    def unary(self) -> Expr:
        if self.at_op("-"):
            minus = self.advance()
            operand = self.unary()
            end = operand.span.end if operand.span else minus.end
            return Neg(operand, span=Span(minus.start, end))
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if not self.at_op("^"):
            return base
        self.advance()
        sign_tok = None
        if self.at_op("-"):
            sign_tok = self.advance()
        tok = self.peek()
        if tok.kind != "number" or not tok.text.isdigit():
            raise NonIntegerExponent(
                f"exponent must be an integer literal, got {_describe(tok)}",
                span=Span(tok.start, tok.end),
                expected=frozenset({"integer literal"}))
        num_tok = self.advance()
        n = int(num_tok.text)
        if sign_tok is not None:
            n = -n
        if abs(n) > MAX_EXPONENT:
            start = sign_tok.start if sign_tok is not None else num_tok.start
            raise ExponentOutOfRange(
                f"exponent {n} outside |n| <= {MAX_EXPONENT}",
                span=Span(start, num_tok.end))
        start = base.span.start if base.span else num_tok.start
        return Pow(base, n, span=Span(start, num_tok.end))

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Const(complex(float(tok.text)), span=Span(tok.start, tok.end))
        if tok.kind == "name":
            if tok.text in ("x", "y"):
                self.advance()
                return Var(tok.text, span=Span(tok.start, tok.end))
            if tok.text == "i":
                self.advance()
                return Const(1j, span=Span(tok.start, tok.end))
            if tok.text in FUNCTIONS:
                fn_tok = self.advance()
                self.expect_op("(")
                arg = self.sum()
                rp = self.expect_op(")")
                return Call(fn_tok.text, arg, span=Span(fn_tok.start, rp.end))
            self.fail(tok, _NAME_EXPECTED)
        if tok.kind == "op" and tok.text == "(":
            lp = self.advance()
            inner = self.sum()
            rp = self.expect_op(")")
            return replace(inner, span=Span(lp.start, rp.end))
        self.fail(tok, _ATOM_EXPECTED)


def _joined_span(left: Expr, right: Expr) -> Span | None:
    if left.span is None or right.span is None:
        return None
    return Span(left.span.start, right.span.end)


def parse(text: str) -> Expr:
    """Parse a formula into an expression tree with source spans attached."""
    p = _Parser(_tokenize(text))
    node = p.sum()
    tok = p.peek()
    if tok.kind != "end":
        p.fail(tok, frozenset({"'+'", "'-'", "'*'", "'/'", "end of input"}))
    return node


# printer -------------------------------------------------------------------

_PREC_SUM = 1
_PREC_TERM = 2
_PREC_UNARY = 3
_PREC_POW = 4
_PREC_ATOM = 5


def to_source(e: Expr) -> str:
    """Render a tree back to source, inserting parentheses only where needed."""
    return _print(e, 0)


def _print(e: Expr, ctx: int) -> str:
    text, prec = _render(e)
    if prec < ctx:
        return "(" + text + ")"
    return text


def _render(e: Expr) -> tuple[str, int]:
    if isinstance(e, Var):
        return e.name, _PREC_ATOM
    if isinstance(e, Const):
        return _render_const(e.value)
    if isinstance(e, Neg):
        return "-" + _print(e.operand, _PREC_UNARY), _PREC_UNARY
    if isinstance(e, BinOp):
        prec = _PREC_SUM if e.op in "+-" else _PREC_TERM
        text = _print(e.left, prec) + e.op + _print(e.right, prec + 1)
        return text, prec
    if isinstance(e, Pow):
        return _print(e.base, _PREC_ATOM) + "^" + str(e.exponent), _PREC_POW
    if isinstance(e, Call):
        return e.fn + "(" + _print(e.arg, _PREC_SUM) + ")", _PREC_ATOM
    raise TypeError(f"not an expression node: {e!r}")


def _render_const(v: complex) -> tuple[str, int]:
    if v.imag == 0.0 and v.real >= 0.0:
        return _format_real(abs(v.real)), _PREC_ATOM
    if v.real == 0.0 and v.imag == 1.0:
        return "i", _PREC_ATOM
    # Fall back to the builder normal form (negations and i-multiples).
    return _render(const_expr(v))


def _format_real(r: float) -> str:
    if not math.isfinite(r):
        raise ValueError(f"cannot print non-finite constant {r!r}")
    if r == int(r) and abs(r) < 1e16:
        return str(int(r))
    return repr(r)


# evaluation ----------------------------------------------------------------

_BINARY_JET = {"+": jet_add, "-": jet_sub, "*": jet_mul, "/": jet_div}
_CALL_JET = {"conj": jet_conj, "exp": jet_exp, "log": jet_log}


def eval_jet(e: Expr, at: Point, order: int = DEFAULT_ORDER) -> WirtingerJet:
    """Evaluate a formula at a point, carrying all derivatives up to ``order``.

    Domain errors raised mid-evaluation get the offending node's source span
    and the evaluation point attached before propagating.
    """
    env = {"x": jet_seed(at, "x", order), "y": jet_seed(at, "y", order)}
    try:
        return eval_jet_env(e, env)
    except FoliaError as exc:
        if getattr(exc, "point", "missing") is None:
            exc.point = at
        raise


def eval_jet_env(e: Expr, env: Mapping[str, WirtingerJet]) -> WirtingerJet:
    """Evaluate with the variables bound to caller-supplied jets.

    Binding variables to non-seed jets composes functions in one forward
    pass: evaluating f with x bound to the jet of g(x, y) yields the jet of
    f(g(x, y), ...) without any symbolic substitution.
    """
    if not env:
        raise ValueError("env must bind at least one variable")
    order = next(iter(env.values())).order
    return _eval(e, env, order)


def _eval(e: Expr, env: Mapping[str, WirtingerJet], order: int) -> WirtingerJet:
    if isinstance(e, Var):
        if e.name not in env:
            raise ValueError(f"variable {e.name!r} not bound")
        return env[e.name]
    if isinstance(e, Const):
        return constant_jet(e.value, order)
    try:
        if isinstance(e, Neg):
            return jet_neg(_eval(e.operand, env, order))
        if isinstance(e, BinOp):
            left = _eval(e.left, env, order)
            right = _eval(e.right, env, order)
            return _BINARY_JET[e.op](left, right)
        if isinstance(e, Pow):
            return jet_pow(_eval(e.base, env, order), e.exponent)
        if isinstance(e, Call):
            return _CALL_JET[e.fn](_eval(e.arg, env, order))
    except FoliaError as exc:
        if getattr(exc, "span", "missing") is None:
            exc.span = e.span
        raise
    raise TypeError(f"not an expression node: {e!r}")


# structural queries --------------------------------------------------------

def _children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, Neg):
        return (e.operand,)
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, Call):
        return (e.arg,)
    return ()


def expr_uses(e: Expr, name: str) -> bool:
    """Whether the variable ``name`` occurs anywhere in the tree."""
    if isinstance(e, Var):
        return e.name == name
    return any(expr_uses(c, name) for c in _children(e))


def y_holomorphy_violation(e: Expr) -> Span | None:
    """Span of the first conj(...) whose argument involves y, else None.

    conj is the only antiholomorphic primitive in the grammar, so a formula
    with no conj over a y-dependent subtree evaluates to jets whose dybar
    entries are exactly absent.  Synthetic trees without spans report the
    zero span.
    """
    if isinstance(e, Call) and e.fn == "conj" and expr_uses(e.arg, "y"):
        return e.span if e.span is not None else Span(0, 0)
    for child in _children(e):
        hit = y_holomorphy_violation(child)
        if hit is not None:
            return hit
    return None


def assert_y_holomorphic(e: Expr) -> Span | None:
    """Gate for model components that must be holomorphic in y.

    Returns None when the formula passes and the span of the offending
    conjugation when it does not; the violation is a value, not an
    exception, so callers can report it in context.
    """
    return y_holomorphy_violation(e)


# programmatic builders -----------------------------------------------------

def const_expr(value: complex) -> Expr:
    """Normal-form tree for an arbitrary complex constant.

    Only nonnegative reals and the literal i appear as Const leaves; signs
    become Neg nodes and imaginary parts become products with i, so the
    result always prints and reparses to itself.
    """
    value = complex(value)
    re_, im = value.real, value.imag
    if im == 0.0:
        return _signed_real(re_)
    unit = Const(1j)
    mag = abs(im)
    imag_mag = unit if mag == 1.0 else BinOp("*", Const(complex(mag)), unit)
    if re_ == 0.0:
        return imag_mag if im > 0 else Neg(imag_mag)
    if im > 0:
        return BinOp("+", _signed_real(re_), imag_mag)
    return BinOp("-", _signed_real(re_), imag_mag)


def _signed_real(r: float) -> Expr:
    if r >= 0:
        return Const(complex(abs(r)))
    return Neg(Const(complex(-r)))


def add(a: Expr, b: Expr) -> Expr:
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    return BinOp("/", a, b)


def powi(base: Expr, n: int) -> Expr:
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"exponent must be an int, got {type(n).__name__}")
    if abs(n) > MAX_EXPONENT:
        raise ExponentOutOfRange(f"exponent {n} outside |n| <= {MAX_EXPONENT}")
    return Pow(base, n)


def neg(a: Expr) -> Expr:
    return Neg(a)


def conj_of(a: Expr) -> Expr:
    return Call("conj", a)


def exp_of(a: Expr) -> Expr:
    return Call("exp", a)


def log_of(a: Expr) -> Expr:
    return Call("log", a)

"""
A small expression language for integrands g(x1..xm, t1..tm) and outer
functions h(y1..ym).

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("-" | "+") unary | power ;
    power   = atom [ "^" unary ] ;              (* right associative *)
    atom    = number | name | call | "(" expr ")" ;
    call    = func "(" expr { "," expr } ")" ;
    func    = "sin" | "cos" | "exp" | "log" | "sqrt" | "abs" | "pow" ;
    name    = ("x" | "t" | "y") digit { digit } ;
    number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
            | "." digits [ exponent ] ;

So ``-x1^2`` is ``-(x1^2)`` and ``2^-1`` is ``2^(-1)``.  Evaluation works on
floats and on numpy arrays alike; variables broadcast against each other.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class DSLError(ValueError):
    pass


class ParseError(DSLError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class EvalError(DSLError):
    def __init__(self, message, node=None):
        where = f" in '{to_text(node)}'" if node is not None else ""
        super().__init__(message + where)
        self.node = node


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    kind: str  # "x", "t" or "y"
    index: int

    @property
    def name(self):
        return f"{self.kind}{self.index}"


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Expr = Num | Var | Neg | BinOp | Call

FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "abs": 1,
    "pow": 2,
}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)
_VAR = re.compile(r"([xty])([1-9]\d*)$")


class _Token(NamedTuple):
    kind: str
    text: str
    offset: int


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def _at(self, *ops):
        return self.tok.kind == "op" and self.tok.text in ops

    def _expect(self, op):
        if not self._at(op):
            self._fail(f"'{op}'")
        self.i += 1

    def _fail(self, expected):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"expected {expected}, found {found}", t.offset)

    def parse(self):
        e = self.expr()
        if self.tok.kind != "end":
            self._fail("operator or end of input")
        return e

    def expr(self):
        node = self.term()
        while self._at("+", "-"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self._at("*", "/"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self._at("-"):
            self.i += 1
            return Neg(self.unary())
        if self._at("+"):
            self.i += 1
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self._at("^"):
            self.i += 1
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        t = self.tok
        if t.kind == "number":
            self.i += 1
            return Num(float(t.text))
        if t.kind == "name":
            self.i += 1
            if t.text in FUNCTIONS:
                return self._call(t)
            m = _VAR.match(t.text)
            if m is None:
                raise ParseError(f"unknown name {t.text!r}", t.offset)
            return Var(m.group(1), int(m.group(2)))
        if self._at("("):
            self.i += 1
            e = self.expr()
            self._expect(")")
            return e
        self._fail("number, variable, function or '('")

    def _call(self, t):
        self._expect("(")
        args = [self.expr()]
        while self._at(","):
            self.i += 1
            args.append(self.expr())
        self._expect(")")
        if len(args) != FUNCTIONS[t.text]:
            raise ParseError(
                f"{t.text} takes {FUNCTIONS[t.text]} argument(s), got {len(args)}", t.offset
            )
        return Call(t.text, tuple(args))


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree; raises :class:`ParseError`."""
    return _Parser(text).parse()


# Canonical printing.  Precedences: + - 1, * / 2, unary 3, ^ 4, atoms 5.

def _prec(e):
    if isinstance(e, BinOp):
        return {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}[e.op]
    if isinstance(e, Neg):
        return 3
    return 5


def _fmt_num(v):
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def to_text(e) -> str:
    """Canonical text for ``e``; parsing it gives back an equal tree."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({', '.join(to_text(a) for a in e.args)})"
    if isinstance(e, Neg):
        inner = to_text(e.operand)
        return f"-({inner})" if _prec(e.operand) < 3 else f"-{inner}"
    op, lp, rp = e.op, _prec(e.left), _prec(e.right)
    if op == "^":
        left = to_text(e.left) if lp > 4 else f"({to_text(e.left)})"
        right = to_text(e.right) if rp >= 3 else f"({to_text(e.right)})"
        return f"{left}^{right}"
    me = _prec(e)
    left = to_text(e.left) if lp >= me else f"({to_text(e.left)})"
    right = to_text(e.right) if rp > me else f"({to_text(e.right)})"
    return f"{left} {op} {right}"


def variables(e) -> set[Var]:
    if isinstance(e, Var):
        return {e}
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Call):
        return set().union(*(variables(a) for a in e.args))
    return set()


class Arity(NamedTuple):
    m: int
    uses_t: bool
    role: str  # "g" for integrands, "h" for outer functions


def arity_check(e) -> Arity:
    """Arity of ``e`` (highest variable index) and whether it reads t-variables."""
    vs = variables(e)
    kinds = {v.kind for v in vs}
    if "y" in kinds and kinds - {"y"}:
        raise DSLError("an expression cannot mix y-variables with x/t-variables")
    m = max((v.index for v in vs), default=0)
    role = "h" if kinds == {"y"} else "g"
    return Arity(m, "t" in kinds, role)


def _domain_check(bad, msg, node):
    if np.any(bad):
        raise EvalError(msg, node)


def evaluate(e, env):
    """Evaluate ``e`` with variables bound by ``env`` (names such as 'x1' to floats or arrays)."""
    with np.errstate(all="ignore"):
        return _eval(e, env)


def _eval(e, env):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise EvalError(f"unbound variable {e.name}") from None
    if isinstance(e, Neg):
        return -_eval(e.operand, env)
    if isinstance(e, Call):
        args = [_eval(a, env) for a in e.args]
        return _call(e, args)
    a = _eval(e.left, env)
    b = _eval(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        _domain_check(np.asarray(b) == 0, "division by zero", e)
        return np.divide(a, b)
    # "^": negative bases only take integer exponents
    return _power(a, b, e)


def _power(a, b, node):
    a_arr, b_arr = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    _domain_check((a_arr < 0) & (b_arr != np.round(b_arr)), "negative base with non-integer exponent", node)
    _domain_check((a_arr == 0) & (b_arr < 0), "zero raised to a negative power", node)
    res = np.power(a_arr, b_arr)
    return float(res) if res.ndim == 0 else res


def _call(node, args):
    f = node.func
    x = args[0]
    if f == "sin":
        res = np.sin(x)
    elif f == "cos":
        res = np.cos(x)
    elif f == "exp":
        res = np.exp(x)
    elif f == "abs":
        res = np.abs(x)
    elif f == "log":
        _domain_check(np.asarray(x) <= 0, "log of a nonpositive value", node)
        res = np.log(x)
    elif f == "sqrt":
        _domain_check(np.asarray(x) < 0, "sqrt of a negative value", node)
        res = np.sqrt(x)
    else:
        return _power(x, args[1], node)
    return float(res) if np.ndim(res) == 0 else res


def compile_expr(e):
    """Return a callable ``f(**env)`` evaluating ``e``."""
    def f(**env):
        return evaluate(e, env)

    return f


@dataclass(frozen=True)
class FunctionalSpec:
    """An integral functional: the integrand and the intervals I_1..I_m it is integrated over."""

    integrand: Expr
    m: int
    intervals: tuple[tuple[float, float], ...]
    uses_t: bool

    @property
    def full_intervals(self) -> bool:
        return all(iv == (0.0, 1.0) for iv in self.intervals)

    def interval_measure(self) -> float:
        out = 1.0
        for a, b in self.intervals:
            out *= b - a
        return out

    def __str__(self):
        return to_text(self.integrand)


def functional(g, intervals=None) -> FunctionalSpec:
    """Build a :class:`FunctionalSpec` from text or a parsed tree.

    ``intervals`` defaults to [0, 1] for every index; a single pair is reused
    for all indices.
    """
    expr = parse(g) if isinstance(g, str) else g
    ar = arity_check(expr)
    if ar.role == "h":
        raise DSLError("integrands use x- and t-variables, not y-variables")
    m = max(ar.m, 1)
    if intervals is None:
        ivs = ((0.0, 1.0),) * m
    else:
        ivs = [tuple(map(float, iv)) for iv in intervals]
        if len(ivs) == 1 and m > 1:
            ivs = ivs * m
        if len(ivs) != m:
            raise DSLError(f"integrand has arity {m} but {len(ivs)} intervals were given")
        ivs = tuple(ivs)
    for a, b in ivs:
        if not (0.0 <= a <= b <= 1.0):
            raise DSLError(f"interval [{a}, {b}] is not a subinterval of [0, 1]")
    return FunctionalSpec(expr, m, ivs, ar.uses_t)


def parse_intervals(text: str):
    """Parse 'a1,b1;a2,b2' into a list of pairs."""
    out = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        bits = part.split(",")
        if len(bits) != 2:
            raise DSLError(f"bad interval {part!r}; expected 'a,b'")
        out.append((float(bits[0]), float(bits[1])))
    return out

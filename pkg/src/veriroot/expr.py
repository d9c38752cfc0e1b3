"""Expression trees for real functions of one variable ``x``.

The grammar is deliberately polynomial/rational::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' INTEGER)?
    atom   := NUMBER | 'x' | '(' expr ')'

``NUMBER`` is a decimal literal (``2``, ``0.125``, ``.5``, ``1e-3``). A literal
that is not a binary64 number is enclosed by its two neighbouring doubles, so
every evaluator encloses the function the user actually wrote. A minus sign
written directly in front of a literal is folded into the constant.

Evaluators
----------
``eval_interval``  natural interval extension over a box
``eval_point``     the same extension at a degenerate interval ``[t, t]``
``eval_float``     plain round-to-nearest evaluation
``eval_slope``     slope extension around a center ``c`` (see :class:`SlopePair`)
``centered_form``  ``f(c) + s(x)*(x - c)`` intersected with the natural extension
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from . import interval as ia
from .interval import Interval

__all__ = [
    "Add",
    "Const",
    "Div",
    "Expr",
    "ExprSyntaxError",
    "Mul",
    "Neg",
    "Pow",
    "SlopePair",
    "Sub",
    "Var",
    "centered_form",
    "derivative",
    "eval_float",
    "eval_interval",
    "eval_point",
    "eval_slope",
    "parse",
]


class ExprSyntaxError(SyntaxError):
    """Malformed expression text; ``position`` is the 0-based offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at offset {position}")
        self.msg = message
        self.position = position
        self.offset = position
        self.text = text


# --------------------------------------------------------------------------
# nodes


class Expr:
    """Immutable expression node. Compiled evaluators are cached on first use."""

    __slots__ = ("_kernels",)
    _prec = 100

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if not isinstance(other, Expr):
            return NotImplemented
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def __repr__(self):
        return f"{type(self).__name__}{self._key()!r}"

    def __str__(self):
        return self.to_text()

    def to_text(self) -> str:
        raise NotImplementedError

    def children(self) -> tuple:
        return ()

    def kernels(self):
        try:
            return self._kernels
        except AttributeError:
            k = _compile(self)
            self._kernels = k
            return k

    # building conveniences
    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, n):
        return Pow(self, n)


def _terminating(value: Fraction) -> bool:
    d = value.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


class Const(Expr):
    """A real constant with a finite decimal expansion.

    ``value`` is exact; ``enclosure`` is the tightest double interval around it.
    """

    __slots__ = ("value", "enclosure")

    def __init__(self, value):
        if isinstance(value, float):
            exact = Fraction(value)
        elif isinstance(value, (int, Fraction)):
            exact = Fraction(value)
        elif isinstance(value, str):
            exact = Fraction(Decimal(value))
        else:
            raise TypeError(f"cannot make a constant from {type(value).__name__}")
        if not _terminating(exact):
            raise ValueError(f"{value!r} has no finite decimal expansion")
        self.value = exact
        self.enclosure = _enclose(exact)

    def _key(self):
        return (self.value,)

    def to_text(self):
        text = _decimal_text(self.value)
        return f"({text})" if self.value < 0 else text


def _enclose(exact: Fraction) -> Interval:
    f = float(exact)
    back = Fraction(f)
    if back == exact:
        return Interval(f, f)
    if back < exact:
        return Interval(f, ia.next_up(f))
    return Interval(ia.next_down(f), f)


def _decimal_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    digits = 0
    d = value.denominator
    while d % 10 == 0 or d % 2 == 0 or d % 5 == 0:
        digits += 1
        d = value.denominator
        scaled = value * 10**digits
        if scaled.denominator == 1:
            break
    n = value * 10**digits
    sign = "-" if n < 0 else ""
    n = abs(n.numerator)
    whole, frac = divmod(n, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


class Var(Expr):
    __slots__ = ()

    def _key(self):
        return ()

    def to_text(self):
        return "x"


class _Binary(Expr):
    __slots__ = ("a", "b")
    _op = "?"

    def __init__(self, a: Expr, b: Expr):
        self.a = a
        self.b = b

    def _key(self):
        return (self.a, self.b)

    def children(self):
        return (self.a, self.b)

    def to_text(self):
        return f"({self.a.to_text()} {self._op} {self.b.to_text()})"


class Add(_Binary):
    __slots__ = ()
    _op = "+"


class Sub(_Binary):
    __slots__ = ()
    _op = "-"


class Mul(_Binary):
    __slots__ = ()
    _op = "*"


class Div(_Binary):
    __slots__ = ()
    _op = "/"


class Neg(Expr):
    __slots__ = ("a",)

    def __init__(self, a: Expr):
        self.a = a

    def _key(self):
        return (self.a,)

    def children(self):
        return (self.a,)

    def to_text(self):
        return f"-({self.a.to_text()})"


class Pow(Expr):
    __slots__ = ("a", "n")

    def __init__(self, a: Expr, n: int):
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        self.a = a
        self.n = n

    def _key(self):
        return (self.a, self.n)

    def children(self):
        return (self.a,)

    def to_text(self):
        return f"({self.a.to_text()})^{self.n}"


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return parse(value)
    return Const(value)


X = Var()

# --------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<var>x)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
        if kind == "var" and pos < n and (text[pos].isalnum() or text[pos] == "_"):
            raise ExprSyntaxError("unknown name; the only variable is 'x'", start, text)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ExprSyntaxError(message, tok[2], self.text)

    def parse(self) -> Expr:
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            nxt = self.peek()
            if nxt[0] == "num" and self.tokens[self.i + 1][1] != "^":
                self.take()
                return Const("-" + nxt[1])
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "num" or not tok[1].isdigit():
                self.fail("expected a nonnegative integer exponent")
            self.take()
            base = Pow(base, int(tok[1]))
            if self.peek()[1] == "^":
                self.fail("chained '^' needs parentheses")
        return base

    def atom(self):
        tok = self.take()
        kind, value = tok[0], tok[1]
        if kind == "num":
            return Const(value)
        if kind == "var":
            return X
        if value == "(":
            node = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return node
        if kind == "end":
            self.fail("unexpected end of input", tok)
        self.fail(f"unexpected {value!r}", tok)


def parse(text: str) -> Expr:
    """Parse expression text; raises :class:`ExprSyntaxError` with an offset."""
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# symbolic derivative

_ZERO = Const(0)
_ONE = Const(1)


def _is_const(e, v):
    return isinstance(e, Const) and e.value == v


def _add(a, b):
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return Add(a, b)


def _sub(a, b):
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return Neg(b)
    return Sub(a, b)


def _mul(a, b):
    if _is_const(a, 0) or _is_const(b, 0):
        return _ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return Mul(a, b)


def _neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    return Neg(a)


def derivative(f: Expr) -> Expr:
    """Symbolic ``df/dx``, with trivial 0/1 folding only."""
    if isinstance(f, Const):
        return _ZERO
    if isinstance(f, Var):
        return _ONE
    if isinstance(f, Add):
        return _add(derivative(f.a), derivative(f.b))
    if isinstance(f, Sub):
        return _sub(derivative(f.a), derivative(f.b))
    if isinstance(f, Neg):
        return _neg(derivative(f.a))
    if isinstance(f, Mul):
        return _add(_mul(derivative(f.a), f.b), _mul(f.a, derivative(f.b)))
    if isinstance(f, Div):
        da, db = derivative(f.a), derivative(f.b)
        if _is_const(db, 0):
            return Div(da, f.b) if not _is_const(da, 0) else _ZERO
        return Div(_sub(_mul(da, f.b), _mul(f.a, db)), Pow(f.b, 2))
    if isinstance(f, Pow):
        if f.n == 0:
            return _ZERO
        inner = f.a if f.n == 2 else Pow(f.a, f.n - 1)
        if f.n == 1:
            return derivative(f.a)
        return _mul(_mul(Const(f.n), inner), derivative(f.a))
    raise TypeError(f"unknown node {f!r}")


# --------------------------------------------------------------------------
# compiled evaluators


@dataclass(frozen=True)
class SlopePair:
    """Enclosures of ``f(c)`` and of the slope ``(f(t) - f(c)) / (t - c)`` over a box."""

    value_at_center: Interval
    slope: Interval


class _Kernels:
    __slots__ = ("box", "num", "slope")

    def __init__(self, box, num, slope):
        self.box = box
        self.num = num
        self.slope = slope


_iadd, _isub, _imul, _idiv = ia.add, ia.sub, ia.mul, ia.div
_ineg, _ipow = ia.neg, ia.pow_int
_IZERO = Interval(0.0)
_IONE = Interval(1.0)


def _compile(e: Expr) -> _Kernels:
    # box(x) -> Interval; num(t) -> float; slope(x, c) -> (f(x), f(c), s(x))
    if isinstance(e, Const):
        k = e.enclosure
        v = float(e.value)
        return _Kernels(
            lambda x: k,
            lambda t: v,
            lambda x, c: (k, k, _IZERO),
        )
    if isinstance(e, Var):
        return _Kernels(
            lambda x: x,
            lambda t: t,
            lambda x, c: (x, c, _IONE),
        )
    if isinstance(e, Neg):
        a = e.a.kernels()
        ab, an, asl = a.box, a.num, a.slope

        def slope_neg(x, c):
            fx, fc, s = asl(x, c)
            return _ineg(fx), _ineg(fc), _ineg(s)

        return _Kernels(lambda x: _ineg(ab(x)), lambda t: -an(t), slope_neg)
    if isinstance(e, Pow):
        a = e.a.kernels()
        ab, an, asl = a.box, a.num, a.slope
        n = e.n

        def slope_pow(x, c):
            ux, uc, su = asl(x, c)
            if n == 0:
                return _IONE, _IONE, _IZERO
            # slope of u^k by the product rule, with the sharp power for u^k(x)
            pc = uc
            s = su
            for k in range(1, n):
                # s(u^(k+1)) = u^k(x) * s(u) + s(u^k) * u(c)
                s = _iadd(_imul(_ipow(ux, k), su), _imul(s, uc))
                pc = _imul(pc, uc)
            return _ipow(ux, n), _ipow(uc, n), s

        return _Kernels(lambda x: _ipow(ab(x), n), lambda t: an(t) ** n, slope_pow)

    a = e.a.kernels()
    b = e.b.kernels()
    ab, an, asl = a.box, a.num, a.slope
    bb, bn, bsl = b.box, b.num, b.slope
    if isinstance(e, Add):

        def slope_add(x, c):
            ux, uc, su = asl(x, c)
            vx, vc, sv = bsl(x, c)
            return _iadd(ux, vx), _iadd(uc, vc), _iadd(su, sv)

        return _Kernels(lambda x: _iadd(ab(x), bb(x)), lambda t: an(t) + bn(t), slope_add)
    if isinstance(e, Sub):

        def slope_sub(x, c):
            ux, uc, su = asl(x, c)
            vx, vc, sv = bsl(x, c)
            return _isub(ux, vx), _isub(uc, vc), _isub(su, sv)

        return _Kernels(lambda x: _isub(ab(x), bb(x)), lambda t: an(t) - bn(t), slope_sub)
    if isinstance(e, Mul):

        def slope_mul(x, c):
            ux, uc, su = asl(x, c)
            vx, vc, sv = bsl(x, c)
            return _imul(ux, vx), _imul(uc, vc), _iadd(_imul(ux, sv), _imul(su, vc))

        return _Kernels(lambda x: _imul(ab(x), bb(x)), lambda t: an(t) * bn(t), slope_mul)
    if isinstance(e, Div):

        def slope_div(x, c):
            ux, uc, su = asl(x, c)
            vx, vc, sv = bsl(x, c)
            qc = _idiv(uc, vc)
            return _idiv(ux, vx), qc, _idiv(_isub(su, _imul(qc, sv)), vx)

        def num_div(t):
            d = bn(t)
            return an(t) / d if d != 0.0 else float("nan")

        return _Kernels(lambda x: _idiv(ab(x), bb(x)), num_div, slope_div)
    raise TypeError(f"unknown node {e!r}")


def eval_interval(f: Expr, x: Interval) -> Interval:
    """Natural interval extension of ``f`` over ``x``."""
    if x.is_empty:
        return ia.EMPTY
    return f.kernels().box(x)


def eval_point(f: Expr, t: float) -> Interval:
    """Interval extension of ``f`` at the degenerate interval ``[t, t]``."""
    return f.kernels().box(Interval(t))


def eval_float(f: Expr, t: float) -> float:
    """Round-to-nearest value of ``f(t)``; NaN where a division by zero occurs."""
    try:
        return f.kernels().num(t)
    except (OverflowError, ZeroDivisionError):
        return float("nan")


def eval_slope_full(f: Expr, c: float, x: Interval):
    """``(f(x), f(c), slope)`` enclosures from a single pass over the tree."""
    return f.kernels().slope(x, Interval(c))


def eval_slope(f: Expr, c: float, x: Interval) -> SlopePair:
    if not x.contains(c):
        raise ia.ContractError("slope center must lie in the box")
    _, fc, s = eval_slope_full(f, c, x)
    return SlopePair(fc, s)


def centered_from(fx: Interval, fc: Interval, s: Interval, c: float, x: Interval) -> Interval:
    """Centered enclosure from precomputed slope data, intersected with ``fx``."""
    cf = _iadd(fc, _imul(s, _isub(x, Interval(c))))
    return ia.intersect(cf, fx)


def centered_form(f: Expr, c: float, x: Interval) -> Interval:
    """Range enclosure ``f(c) + s(x)*(x - c)``, never wider than the natural one."""
    if not x.contains(c):
        raise ia.ContractError("center must lie in the box")
    fx, fc, s = eval_slope_full(f, c, x)
    return centered_from(fx, fc, s, c, x)


def count_nodes(f: Expr) -> int:
    return 1 + sum(count_nodes(ch) for ch in f.children())

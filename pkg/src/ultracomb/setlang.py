"""A small expression language for integer sets and integer/real functions.

Set expressions (bound ``N`` given separately, complement is relative to
``[0, N)``)::

    set      = union ;
    union    = inter { ( "|" | "\\" ) inter } ;
    inter    = unary { "&" unary } ;
    unary    = "~" unary | atom ;
    atom     = "(" set ")" | "all" | "none" | residue | list ;
    residue  = "mod" INT ":" INT { "," INT } ;
    list     = item { "," item } ;
    item     = INT [ ( ".." | "-" ) INT ] ;

Function expressions over ``n, m, i, j, k, j1..j9`` (integers) and ``x``
(real)::

    expr     = "if" expr "then" expr "else" expr | disj ;
    disj     = conj { "or" conj } ;
    conj     = neg { "and" neg } ;
    neg      = "not" neg | comp ;
    comp     = arith [ ( "<" | "<=" | ">" | ">=" | "==" | "!=" ) arith ] ;
    arith    = term { ( "+" | "-" ) term } ;
    term     = factor { ( "*" | "/" | "div" | "mod" ) factor } ;
    factor   = "-" factor | atom ;
    atom     = NUMBER | NAME | FUNC "(" expr ")" | "(" expr ")" ;
    FUNC     = "exp" | "abs" | "sin" | "cos" | "sqrt" | "log" | "real" | "floor" ;

Integer and real sorts never mix: ``real(e)`` and ``floor(e)`` convert.  The
one exception is a numeric literal, which takes the sort its context needs,
so ``0 - x*x`` is real.  ``/`` is real division, ``div``/``mod`` are integer
floor division and remainder (modulus must be positive).  Integers stay
within ``2**62`` in magnitude; leaving that range is an error, never a wrap.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import SetLangError
from .intset import IntSet

# -- tokens ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<real>\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\.\.|<=|>=|==|!=|[()\[\],:|&\\~<>+\-*/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # int, real, name, op, end
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        mt = _TOKEN_RE.match(text, pos)
        if mt is None:
            raise SetLangError(f"unexpected character {text[pos]!r}", text, pos)
        kind = mt.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, mt.group(), pos))
        pos = mt.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        return SetLangError(message, self.text, tok.pos)

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("op", "name") and t.text in texts

    def take(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.take()

    def expect_int(self) -> tuple[int, Token]:
        t = self.tok
        if t.kind != "int":
            found = t.text or "end of input"
            raise self.error(f"expected an integer, found {found!r}")
        self.take()
        return int(t.text), t

    def finish(self):
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")


# -- set expressions ---------------------------------------------------------


@dataclass(frozen=True)
class Items:
    # closed ranges (lo, hi); a single element has lo == hi
    ranges: tuple
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Residue:
    modulus: int
    residues: tuple
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class AllOf:
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class NoneOf:
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Complement:
    arg: "SetNode"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SetBinary:
    op: str  # "|", "&", "\\"
    left: "SetNode"
    right: "SetNode"
    pos: int = field(default=0, compare=False)


SetNode = Union[Items, Residue, AllOf, NoneOf, Complement, SetBinary]

_SET_PREC = {"|": 1, "\\": 1, "&": 2}


@dataclass(frozen=True)
class SetExpr:
    node: SetNode
    bound: int

    def __str__(self) -> str:
        return print_set(self.node)


class _SetParser(_Parser):
    def __init__(self, text: str, bound: int):
        super().__init__(text)
        self.bound = bound

    def union(self):
        left = self.inter()
        while self.at("|", "\\"):
            t = self.take()
            left = SetBinary(t.text, left, self.inter(), t.pos)
        return left

    def inter(self):
        left = self.unary()
        while self.at("&"):
            t = self.take()
            left = SetBinary("&", left, self.unary(), t.pos)
        return left

    def unary(self):
        if self.at("~"):
            t = self.take()
            return Complement(self.unary(), t.pos)
        return self.atom()

    def atom(self):
        t = self.tok
        if self.at("("):
            self.take()
            inner = self.union()
            self.expect(")")
            return inner
        if self.at("all"):
            self.take()
            return AllOf(t.pos)
        if self.at("none"):
            self.take()
            return NoneOf(t.pos)
        if self.at("mod"):
            return self.residue()
        if t.kind == "int":
            return self.items()
        found = t.text or "end of input"
        raise self.error(f"expected a set, found {found!r}")

    def residue(self):
        start = self.take()
        p, ptok = self.expect_int()
        if p == 0:
            raise self.error("zero modulus", ptok)
        self.expect(":")
        rs = []
        while True:
            r, rtok = self.expect_int()
            if r >= p:
                raise self.error(f"residue {r} is not below the modulus {p}", rtok)
            rs.append(r)
            if not self.at(","):
                break
            self.take()
        return Residue(p, tuple(rs), start.pos)

    def items(self):
        start = self.tok
        ranges = []
        while True:
            lo, lotok = self.expect_int()
            hi, hitok = lo, lotok
            if self.at("..", "-"):
                self.take()
                hi, hitok = self.expect_int()
                if hi < lo:
                    raise self.error(f"empty range {lo}..{hi}", lotok)
            if hi >= self.bound:
                raise self.error(f"{hi} is outside [0, {self.bound})", hitok)
            ranges.append((lo, hi))
            if not self.at(","):
                break
            self.take()
        return Items(tuple(ranges), start.pos)


def parse_set(text: str, bound: int) -> SetExpr:
    """Parse a set expression over ``[0, bound)``."""
    if int(bound) < 1:
        raise SetLangError("bound must be at least 1")
    p = _SetParser(text, int(bound))
    node = p.union()
    p.finish()
    return SetExpr(node, int(bound))


def print_set(node: SetNode, parent: int = 0, right: bool = False) -> str:
    """Canonical text; ranges print as ``a..b``."""
    if isinstance(node, Items):
        return ",".join(str(lo) if lo == hi else f"{lo}..{hi}" for lo, hi in node.ranges)
    if isinstance(node, Residue):
        text = f"mod {node.modulus}: " + ",".join(map(str, node.residues))
        # a residue list would swallow a following list item
        return f"({text})" if parent else text
    if isinstance(node, AllOf):
        return "all"
    if isinstance(node, NoneOf):
        return "none"
    if isinstance(node, Complement):
        return "~" + print_set(node.arg, 3)
    if isinstance(node, SetBinary):
        prec = _SET_PREC[node.op]
        text = f"{print_set(node.left, prec)} {node.op} {print_set(node.right, prec, True)}"
        if prec < parent or (prec == parent and right):
            return f"({text})"
        return text
    raise TypeError(f"not a set node: {node!r}")


def _eval_set_node(node: SetNode, n: int) -> np.ndarray:
    if isinstance(node, Items):
        out = np.zeros(n, dtype=bool)
        for lo, hi in node.ranges:
            out[lo : hi + 1] = True
        return out
    if isinstance(node, Residue):
        keep = np.zeros(node.modulus, dtype=bool)
        keep[list(node.residues)] = True
        return keep[np.arange(n) % node.modulus]
    if isinstance(node, AllOf):
        return np.ones(n, dtype=bool)
    if isinstance(node, NoneOf):
        return np.zeros(n, dtype=bool)
    if isinstance(node, Complement):
        return ~_eval_set_node(node.arg, n)
    if isinstance(node, SetBinary):
        a, b = _eval_set_node(node.left, n), _eval_set_node(node.right, n)
        if node.op == "|":
            return a | b
        if node.op == "&":
            return a & b
        return a & ~b
    raise TypeError(f"not a set node: {node!r}")


def eval_set(expr: SetExpr) -> IntSet:
    return IntSet(expr.bound, _eval_set_node(expr.node, expr.bound))


def set_from_text(text: str, bound: int) -> IntSet:
    return eval_set(parse_set(text, bound))


# -- function expressions ----------------------------------------------------

INT, REAL, BOOL = "int", "real", "bool"

INT_VARS = frozenset({"n", "m", "i", "j", "k"} | {f"j{d}" for d in range(1, 10)})
REAL_VARS = frozenset({"x"})
FUNCTIONS = ("exp", "abs", "sin", "cos", "sqrt", "log", "real", "floor")
# integers live in [-INT_LIMIT, INT_LIMIT]; both evaluators raise beyond it
INT_LIMIT = 1 << 62
KEYWORDS = frozenset({"if", "then", "else", "and", "or", "not", "div", "mod"}) | frozenset(FUNCTIONS)


@dataclass(frozen=True)
class Num:
    value: Union[int, float]
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    func: str
    arg: "FuncNode"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "-", "not"
    arg: "FuncNode"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "FuncNode"
    right: "FuncNode"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Cond:
    test: "FuncNode"
    then: "FuncNode"
    orelse: "FuncNode"
    pos: int = field(default=0, compare=False)


FuncNode = Union[Num, Var, Call, Unary, Binary, Cond]

_ARITH = ("+", "-", "*", "/", "div", "mod")
_COMPARE = ("<", "<=", ">", ">=", "==", "!=")
# binding strength for printing: higher binds tighter
_FUNC_PREC = {"or": 1, "and": 2, "not": 3, **{c: 4 for c in _COMPARE}, "+": 5, "-": 5, "*": 6, "/": 6, "div": 6, "mod": 6}


class _FuncParser(_Parser):
    def expr(self):
        if self.at("if"):
            t = self.take()
            test = self.expr()
            self.expect("then")
            then = self.expr()
            self.expect("else")
            return Cond(test, then, self.expr(), t.pos)
        return self.disj()

    def disj(self):
        left = self.conj()
        while self.at("or"):
            t = self.take()
            left = Binary("or", left, self.conj(), t.pos)
        return left

    def conj(self):
        left = self.neg()
        while self.at("and"):
            t = self.take()
            left = Binary("and", left, self.neg(), t.pos)
        return left

    def neg(self):
        if self.at("not"):
            t = self.take()
            return Unary("not", self.neg(), t.pos)
        return self.comp()

    def comp(self):
        left = self.arith()
        if self.at(*_COMPARE):
            t = self.take()
            left = Binary(t.text, left, self.arith(), t.pos)
            if self.at(*_COMPARE):
                raise self.error("comparisons do not chain; use 'and'")
        return left

    def arith(self):
        left = self.term()
        while self.at("+", "-"):
            t = self.take()
            left = Binary(t.text, left, self.term(), t.pos)
        return left

    def term(self):
        left = self.factor()
        while self.at("*", "/", "div", "mod"):
            t = self.take()
            left = Binary(t.text, left, self.factor(), t.pos)
        return left

    def factor(self):
        if self.at("-"):
            t = self.take()
            return Unary("-", self.factor(), t.pos)
        return self.atom()

    def atom(self):
        t = self.tok
        if t.kind == "int":
            if int(t.text) > INT_LIMIT:
                raise self.error(f"integer literal exceeds {INT_LIMIT}")
            self.take()
            return Num(int(t.text), t.pos)
        if t.kind == "real":
            self.take()
            return Num(float(t.text), t.pos)
        if self.at("("):
            self.take()
            inner = self.expr()
            self.expect(")")
            return inner
        if t.kind == "name":
            if t.text in FUNCTIONS:
                self.take()
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(t.text, arg, t.pos)
            if t.text in KEYWORDS:
                raise self.error(f"unexpected keyword {t.text!r}")
            if t.text not in INT_VARS and t.text not in REAL_VARS:
                raise self.error(f"unknown variable {t.text!r}")
            self.take()
            return Var(t.text, t.pos)
        found = t.text or "end of input"
        raise self.error(f"expected an expression, found {found!r}")


def _is_literal(node: FuncNode) -> bool:
    return isinstance(node, Num) or (isinstance(node, Unary) and node.op == "-" and _is_literal(node.arg))


def _num_sort(node: FuncNode) -> str:
    if isinstance(node, Num):
        return INT if isinstance(node.value, int) else REAL
    return _num_sort(node.arg)


class _Sorter:
    """Sort inference; literals adopt the sort required by their context."""

    def __init__(self, text: str):
        self.text = text
        self.coerced: set = set()

    def error(self, message, node):
        return SetLangError(message, self.text, node.pos)

    def unify(self, a: FuncNode, sa: str, b: FuncNode, sb: str, what: str) -> str:
        if sa == sb:
            return sa
        if {sa, sb} == {INT, REAL}:
            # an integer literal next to a real becomes real
            if sa == INT and _is_literal(a):
                self.coerced.add(id(a))
                return REAL
            if sb == INT and _is_literal(b):
                self.coerced.add(id(b))
                return REAL
        raise self.error(f"{what} mixes {sa} and {sb}; convert with real() or floor()", b)

    def sort(self, node: FuncNode) -> str:
        if isinstance(node, Num):
            return INT if isinstance(node.value, int) else REAL
        if isinstance(node, Var):
            return INT if node.name in INT_VARS else REAL
        if isinstance(node, Call):
            s = self.sort(node.arg)
            if node.func == "real":
                if s != INT:
                    raise self.error("real() takes an integer", node)
                return REAL
            if node.func == "floor":
                if s == INT and _is_literal(node.arg):
                    self.coerced.add(id(node.arg))
                    return INT
                if s != REAL:
                    raise self.error("floor() takes a real", node)
                return INT
            if node.func == "abs":
                if s == BOOL:
                    raise self.error("abs() takes a number", node)
                return s
            if s == INT and _is_literal(node.arg):
                self.coerced.add(id(node.arg))
                s = REAL
            if s != REAL:
                raise self.error(f"{node.func}() takes a real; convert with real()", node)
            return REAL
        if isinstance(node, Unary):
            s = self.sort(node.arg)
            if node.op == "not":
                if s != BOOL:
                    raise self.error("'not' takes a condition", node)
                return BOOL
            if s == BOOL:
                raise self.error("cannot negate a condition", node)
            return s
        if isinstance(node, Binary):
            sa, sb = self.sort(node.left), self.sort(node.right)
            if node.op in ("and", "or"):
                if sa != BOOL or sb != BOOL:
                    raise self.error(f"'{node.op}' takes conditions", node)
                return BOOL
            if BOOL in (sa, sb):
                raise self.error(f"'{node.op}' takes numbers", node)
            if node.op in _COMPARE:
                self.unify(node.left, sa, node.right, sb, f"comparison '{node.op}'")
                return BOOL
            if node.op in ("div", "mod"):
                if sa != INT or sb != INT:
                    raise self.error(f"'{node.op}' takes integers", node)
                return INT
            s = self.unify(node.left, sa, node.right, sb, f"'{node.op}'")
            if node.op == "/" and s != REAL:
                if _is_literal(node.left) and _is_literal(node.right):
                    self.coerced.update((id(node.left), id(node.right)))
                    return REAL
                raise self.error("'/' is real division; use 'div' for integers", node)
            return s
        if isinstance(node, Cond):
            if self.sort(node.test) != BOOL:
                raise self.error("'if' needs a condition", node.test)
            st, se = self.sort(node.then), self.sort(node.orelse)
            return self.unify(node.then, st, node.orelse, se, "'if' branches")
        raise TypeError(f"not a function node: {node!r}")


def _coerce_literals(node: FuncNode, coerced: set, to_real: bool = False) -> FuncNode:
    """Rewrite literals marked by the sorter as reals."""
    to_real = to_real or id(node) in coerced
    if isinstance(node, Num):
        return Num(float(node.value), node.pos) if to_real else node
    if isinstance(node, Var):
        return node
    if isinstance(node, Call):
        return Call(node.func, _coerce_literals(node.arg, coerced), node.pos)
    if isinstance(node, Unary):
        inner_real = to_real and node.op == "-"
        return Unary(node.op, _coerce_literals(node.arg, coerced, inner_real), node.pos)
    if isinstance(node, Binary):
        return Binary(node.op, _coerce_literals(node.left, coerced), _coerce_literals(node.right, coerced), node.pos)
    return Cond(
        _coerce_literals(node.test, coerced),
        _coerce_literals(node.then, coerced),
        _coerce_literals(node.orelse, coerced),
        node.pos,
    )


def _free_vars(node: FuncNode, out: set) -> set:
    if isinstance(node, Var):
        out.add(node.name)
    for child in ("arg", "left", "right", "test", "then", "orelse"):
        sub = getattr(node, child, None)
        if sub is not None:
            _free_vars(sub, out)
    return out


@dataclass(frozen=True)
class FuncExpr:
    text: str
    node: FuncNode  # after literal coercion
    sort: str
    variables: frozenset

    def __str__(self) -> str:
        return print_func(self.node)

    def compile(self) -> Callable:
        """Vectorized evaluator: keyword arrays (or scalars) in, array out."""
        return _Compiled(self)

    def __call__(self, **env):
        return self.compile()(**env)


def parse_func(text: str, allowed: Optional[set] = None, sort: Optional[str] = None) -> FuncExpr:
    """Parse and sort-check a function expression.

    ``allowed`` restricts the free variables; ``sort`` demands the result
    sort (an integer literal result is accepted where a real is wanted).
    """
    p = _FuncParser(text)
    node = p.expr()
    p.finish()
    sorter = _Sorter(text)
    s = sorter.sort(node)
    if sort is not None and s != sort:
        if sort == REAL and s == INT and _is_literal(node):
            sorter.coerced.add(id(node))
            s = REAL
        else:
            raise SetLangError(f"expected a {sort} expression, got {s}", text, node.pos)
    node = _coerce_literals(node, sorter.coerced)
    names = frozenset(_free_vars(node, set()))
    if allowed is not None:
        extra = sorted(names - set(allowed))
        if extra:
            raise SetLangError(f"variable {extra[0]!r} is not available here (allowed: {', '.join(sorted(allowed))})", text)
    return FuncExpr(text, node, s, names)


def print_func(node: FuncNode, parent: int = 0, right: bool = False) -> str:
    if isinstance(node, Num):
        return repr(node.value) if isinstance(node.value, float) else str(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({print_func(node.arg)})"
    if isinstance(node, Unary):
        if node.op == "not":
            text = "not " + print_func(node.arg, _FUNC_PREC["not"])
            return f"({text})" if parent > _FUNC_PREC["not"] else text
        return "-" + print_func(node.arg, 7)
    if isinstance(node, Binary):
        prec = _FUNC_PREC[node.op]
        if node.op in _COMPARE:
            # comparisons do not chain, so both sides must bind tighter
            left, right = print_func(node.left, prec + 1), print_func(node.right, prec + 1)
        else:
            left, right = print_func(node.left, prec), print_func(node.right, prec, True)
        text = f"{left} {node.op} {right}"
        if prec < parent or (prec == parent and right):
            return f"({text})"
        return text
    if isinstance(node, Cond):
        text = f"if {print_func(node.test)} then {print_func(node.then)} else {print_func(node.orelse)}"
        return f"({text})" if parent else text
    raise TypeError(f"not a function node: {node!r}")


# -- compiled evaluator (vectorized closures) ---------------------------------

_UNARY_REAL = {"exp": np.exp, "sin": np.sin, "cos": np.cos}


class _Compiled:
    def __init__(self, expr: FuncExpr):
        self.expr = expr
        self.fn = self._build(expr.node)

    def _fail(self, message, node):
        return SetLangError(message, self.expr.text, node.pos)

    def _build(self, node):
        if isinstance(node, Num):
            v = node.value
            dtype = np.int64 if isinstance(v, int) else float
            return lambda env, size: np.full(size, v, dtype=dtype)
        if isinstance(node, Var):
            name = node.name

            def var(env, size):
                if name not in env:
                    raise self._fail(f"no value for variable {name!r}", node)
                return env[name]

            return var
        if isinstance(node, Call):
            return self._call(node)
        if isinstance(node, Unary):
            f = self._build(node.arg)
            if node.op == "not":
                return lambda env, size: ~f(env, size)
            return lambda env, size: -f(env, size)
        if isinstance(node, Binary):
            return self._binary(node)
        return self._cond(node)

    def _call(self, node):
        f = self._build(node.arg)
        name = node.func
        if name in _UNARY_REAL:
            g = _UNARY_REAL[name]
            return lambda env, size: g(f(env, size))
        if name == "abs":
            return lambda env, size: np.abs(f(env, size))
        if name == "real":
            return lambda env, size: f(env, size).astype(float)
        if name == "floor":

            def floor(env, size):
                a = f(env, size)
                if not np.all(np.isfinite(a)):
                    raise self._fail("floor of a non-finite number", node)
                if np.any(np.abs(np.floor(a)) > INT_LIMIT):
                    raise self._fail("integer overflow", node)
                return np.floor(a).astype(np.int64)

            return floor
        if name == "sqrt":

            def sqrt(env, size):
                a = f(env, size)
                if np.any(a < 0):
                    raise self._fail("sqrt of a negative number", node)
                return np.sqrt(a)

            return sqrt

        def log(env, size):
            a = f(env, size)
            if np.any(a <= 0):
                raise self._fail("log of a non-positive number", node)
            return np.log(a)

        return log

    def _binary(self, node):
        a, b = self._build(node.left), self._build(node.right)
        op = node.op
        if op in ("and", "or"):
            short = op == "or"

            def logic(env, size):
                left = a(env, size)
                out = left.copy()
                # evaluate the right side only where it decides the result
                rest = np.flatnonzero(left != short)
                if rest.size:
                    out[rest] = b(_restrict(env, rest), rest.size)
                return out

            return logic
        simple = {
            "+": np.add,
            "-": np.subtract,
            "*": np.multiply,
            "<": np.less,
            "<=": np.less_equal,
            ">": np.greater,
            ">=": np.greater_equal,
            "==": np.equal,
            "!=": np.not_equal,
        }
        if op in simple:
            g = simple[op]
            if op not in ("+", "-", "*"):
                return lambda env, size: g(a(env, size), b(env, size))

            def arith(env, size):
                x, y = a(env, size), b(env, size)
                if x.dtype.kind != "i":
                    return g(x, y)
                # the float estimate rules out int64 wrap before the exact check
                if np.any(np.abs(g(x.astype(float), y.astype(float))) > 1.5 * INT_LIMIT):
                    raise self._fail("integer overflow", node)
                out = g(x, y)
                if np.any(np.abs(out) > INT_LIMIT):
                    raise self._fail("integer overflow", node)
                return out

            return arith
        if op == "/":

            def divide(env, size):
                x, y = a(env, size), b(env, size)
                if np.any(y == 0):
                    raise self._fail("division by zero", node)
                return x / y

            return divide

        def intdiv(env, size):
            x, y = a(env, size), b(env, size)
            if np.any(y <= 0):
                bad = "zero" if np.any(y == 0) else "negative"
                raise self._fail(f"{op} by a {bad} number", node)
            return np.floor_divide(x, y) if op == "div" else np.mod(x, y)

        return intdiv

    def _cond(self, node):
        t, u, e = self._build(node.test), self._build(node.then), self._build(node.orelse)
        real = self.expr.sort == REAL

        def cond(env, size):
            c = t(env, size)
            yes, no = np.flatnonzero(c), np.flatnonzero(~c)
            parts = []
            if yes.size:
                parts.append((yes, u(_restrict(env, yes), yes.size)))
            if no.size:
                parts.append((no, e(_restrict(env, no), no.size)))
            dtype = np.result_type(*(p[1].dtype for p in parts)) if parts else (float if real else np.int64)
            out = np.empty(size, dtype=dtype)
            for idx, vals in parts:
                out[idx] = vals
            return out

        return cond

    def __call__(self, **env):
        arrays = {}
        for name, v in env.items():
            if name in INT_VARS:
                arr = np.asarray(v)
                if arr.dtype.kind not in "iu":
                    if not np.all(np.equal(np.mod(arr, 1), 0)):
                        raise SetLangError(f"variable {name!r} needs integer values")
                arrays[name] = arr.astype(np.int64)
            elif name in REAL_VARS:
                arrays[name] = np.asarray(v, dtype=float)
            else:
                raise SetLangError(f"unknown variable {name!r}")
        shape = np.broadcast_shapes(*(a.shape for a in arrays.values())) if arrays else ()
        flat = {k: np.broadcast_to(a, shape).reshape(-1) for k, a in arrays.items()}
        size = int(np.prod(shape)) if shape else 1
        if not shape:
            flat = {k: a.reshape(1) for k, a in flat.items()}
        with np.errstate(over="ignore", invalid="ignore"):
            out = self.fn(flat, size)
        out = out.reshape(shape) if shape else out.reshape(())
        return out[()] if not shape else out


def _restrict(env: dict, idx: np.ndarray) -> dict:
    return {k: v[idx] for k, v in env.items()}


# -- reference evaluator (scalar tree walk) ----------------------------------


def reference_eval(expr: FuncExpr, **env):
    """Plain recursive evaluation with Python scalars and the math module."""
    return _walk(expr, expr.node, env)


def _walk(expr: FuncExpr, node: FuncNode, env: dict):
    def fail(message):
        return SetLangError(message, expr.text, node.pos)

    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name not in env:
            raise fail(f"no value for variable {node.name!r}")
        v = env[node.name]
        return int(v) if node.name in INT_VARS else float(v)
    if isinstance(node, Call):
        a = _walk(expr, node.arg, env)
        f = node.func
        if f == "exp":
            try:
                return math.exp(a)
            except OverflowError:
                return math.inf
        if f in ("sin", "cos"):
            # numpy gives nan for infinite arguments where math raises
            return getattr(math, f)(a) if math.isfinite(a) else math.nan
        if f == "abs":
            return abs(a)
        if f == "real":
            return float(a)
        if f == "floor":
            if not math.isfinite(a):
                raise fail("floor of a non-finite number")
            return _int_checked(math.floor(a), fail)
        if f == "sqrt":
            if a < 0:
                raise fail("sqrt of a negative number")
            return math.sqrt(a)
        if a <= 0:
            raise fail("log of a non-positive number")
        return math.log(a)
    if isinstance(node, Unary):
        a = _walk(expr, node.arg, env)
        return (not a) if node.op == "not" else -a
    if isinstance(node, Binary):
        op = node.op
        a = _walk(expr, node.left, env)
        if op == "and":
            return bool(a) and bool(_walk(expr, node.right, env))
        if op == "or":
            return bool(a) or bool(_walk(expr, node.right, env))
        b = _walk(expr, node.right, env)
        if op in ("+", "-", "*"):
            r = a + b if op == "+" else a - b if op == "-" else a * b
            return _int_checked(r, fail) if isinstance(r, int) and not isinstance(r, bool) else r
        if op == "/":
            if b == 0:
                raise fail("division by zero")
            return a / b
        if op in ("div", "mod"):
            if b <= 0:
                raise fail(f"{op} by a {'zero' if b == 0 else 'negative'} number")
            return a // b if op == "div" else a % b
        return {
            "<": a < b,
            "<=": a <= b,
            ">": a > b,
            ">=": a >= b,
            "==": a == b,
            "!=": a != b,
        }[op]
    test = _walk(expr, node.test, env)
    return _walk(expr, node.then if test else node.orelse, env)


def _int_checked(r: int, fail) -> int:
    if abs(r) > INT_LIMIT:
        raise fail("integer overflow")
    return r


def eval_func(text_or_expr: Union[str, FuncExpr], **env):
    """Parse if needed and evaluate once with the compiled evaluator."""
    expr = parse_func(text_or_expr) if isinstance(text_or_expr, str) else text_or_expr
    v = expr.compile()(**env)
    if expr.sort == INT:
        return int(v)
    if expr.sort == BOOL:
        return bool(v)
    return float(v)


# -- adapters used by the command line ---------------------------------------


def coloring_from_expr(text: str, k: int, colors: int) -> Callable:
    """``c(j1..jk)`` from an integer expression in ``j1..jk`` (``i, j`` when
    ``k == 2``); values must land in ``[0, colors)``."""
    allowed = {f"j{d}" for d in range(1, k + 1)} | ({"i", "j"} if k == 2 else set())
    expr = parse_func(text, allowed=allowed, sort=INT)
    fn = expr.compile()

    def coloring(*js):
        env = {f"j{d + 1}": v for d, v in enumerate(js)}
        if k == 2:
            env.update(i=js[0], j=js[1])
        env = {name: v for name, v in env.items() if name in expr.variables}
        out = fn(**env) if env else np.full(np.broadcast(*js).shape, fn(), dtype=np.int64)
        out = np.broadcast_to(out, np.broadcast(*js).shape)
        if np.any((out < 0) | (out >= colors)):
            raise SetLangError(f"coloring value outside [0, {colors})", text)
        return out

    return coloring


def sequence_from_expr(text: str, length: int) -> np.ndarray:
    """``a_1..a_length`` from an expression in ``n``."""
    expr = parse_func(text, allowed={"n"})
    if expr.sort == BOOL:
        raise SetLangError("a sequence needs numeric values", text)
    n = np.arange(1, length + 1)
    out = expr.compile()(n=n) if "n" in expr.variables else np.full(length, expr.compile()())
    return np.broadcast_to(np.asarray(out, dtype=float), (length,)).copy()


def double_sequence_from_expr(text: str) -> Callable[[int, int], float]:
    """``a(n, m)`` from an expression in ``n`` and ``m``."""
    expr = parse_func(text, allowed={"n", "m"})
    if expr.sort == BOOL:
        raise SetLangError("a double sequence needs numeric values", text)
    fn = expr.compile()

    def ds(n, m):
        env = {k: v for k, v in (("n", n), ("m", m)) if k in expr.variables}
        return float(fn(**env))

    return ds


def integrand_from_expr(text: str) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized ``f(x)`` from a real expression in ``x``."""
    expr = parse_func(text, allowed={"x"}, sort=REAL)
    fn = expr.compile()

    def f(x):
        x = np.asarray(x, dtype=float)
        out = fn(x=x) if "x" in expr.variables else fn()
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape)

    return f

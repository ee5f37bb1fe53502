"""Immutable, hash-consed expression trees with canonicalizing constructors.

Every node is interned: two structurally equal expressions are the same
Python object, so equality is identity and repeated subexpressions form a
DAG.  The smart constructors :func:`add`, :func:`mul`, :func:`pow_` and
:func:`func` always return canonical nodes (flattened, constants folded,
like terms collected, operands sorted by a fixed total order).

Division does not exist as a node: ``a / b`` is ``a * b^(-1)``.
"""
from __future__ import annotations

import hashlib
import math
import threading
import weakref
from fractions import Fraction
from numbers import Rational

CONST, SYM, FUNC, POW, MUL, ADD = range(6)
KIND_NAMES = ("const", "sym", "func", "pow", "mul", "add")

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sinh", "cosh")
_ODD = {"sin", "tan", "sinh"}
_EVEN = {"cos", "cosh"}


class DomainError(ArithmeticError):
    """An expression has no real value (log of a non-positive number, 0^-1, ...)."""


class UnboundSymbolError(KeyError):
    pass


_lock = threading.Lock()
_table: "weakref.WeakValueDictionary[tuple, Expr]" = weakref.WeakValueDictionary()


class Expr:
    __slots__ = ("kind", "value", "args", "digest", "key", "_free", "_dcache",
                 "__weakref__")

    def __new__(cls, *a, **k):  # pragma: no cover - construction goes through _make
        raise TypeError("use the constructor functions (sym, const, add, ...)")

    # -- structural protocol -------------------------------------------------
    def __hash__(self):
        return self.digest

    def __eq__(self, other):
        return self is other

    def __ne__(self, other):
        return self is not other

    def __setattr__(self, k, v):
        raise AttributeError("Expr is immutable")

    def __reduce__(self):
        from .printer import to_string
        from .parser import parse
        return (parse, (to_string(self),))

    @property
    def free_symbols(self) -> frozenset:
        fs = self._free
        if fs is None:
            if self.kind == SYM:
                fs = frozenset((self.value,))
            elif self.kind == CONST:
                fs = frozenset()
            else:
                fs = frozenset().union(*(a.free_symbols for a in self.args))
            object.__setattr__(self, "_free", fs)
        return fs

    @property
    def is_zero_literal(self) -> bool:
        return self is ZERO

    def is_const(self) -> bool:
        return self.kind == CONST

    def __repr__(self):
        from .printer import to_string
        return f"Expr({to_string(self)!r})"

    def __str__(self):
        from .printer import to_string
        return to_string(self)

    # -- arithmetic sugar ----------------------------------------------------
    def __add__(self, o):
        return add(self, as_expr(o))

    def __radd__(self, o):
        return add(as_expr(o), self)

    def __sub__(self, o):
        return add(self, neg(as_expr(o)))

    def __rsub__(self, o):
        return add(as_expr(o), neg(self))

    def __mul__(self, o):
        return mul(self, as_expr(o))

    def __rmul__(self, o):
        return mul(as_expr(o), self)

    def __truediv__(self, o):
        return mul(self, pow_(as_expr(o), -1))

    def __rtruediv__(self, o):
        return mul(as_expr(o), pow_(self, -1))

    def __neg__(self):
        return neg(self)

    def __pow__(self, e):
        if isinstance(e, Expr):
            if e.kind != CONST:
                raise TypeError("symbolic exponents are not supported")
            e = e.value
        return pow_(self, e)


def _digest(kind, value, args) -> int:
    h = hashlib.blake2b(digest_size=8)
    h.update(bytes((kind,)))
    h.update(repr(value).encode())
    for a in args:
        h.update(a.digest.to_bytes(8, "little", signed=True))
    return int.from_bytes(h.digest(), "little", signed=True)


def _make(kind, value, args=()) -> Expr:
    k = (kind, value, args)
    node = _table.get(k)
    if node is not None:
        return node
    with _lock:
        node = _table.get(k)
        if node is not None:
            return node
        node = object.__new__(Expr)
        object.__setattr__(node, "kind", kind)
        object.__setattr__(node, "value", value)
        object.__setattr__(node, "args", args)
        object.__setattr__(node, "digest", _digest(kind, value, args))
        object.__setattr__(node, "key", _sort_key(kind, value, args, node.digest))
        object.__setattr__(node, "_free", None)
        object.__setattr__(node, "_dcache", {})
        _table[k] = node
    return node


def _sort_key(kind, value, args, digest):
    # Atoms order by value/name, powers sit next to their base, compound
    # nodes order by digest.  Distinct nodes never share a key.
    if kind == CONST:
        return (0, value)
    if kind == SYM:
        return (1, value)
    if kind == FUNC:
        return (2, value, args[0].digest)
    if kind == POW:
        return args[0].key + (value,)
    return (kind, digest)


# -- atoms --------------------------------------------------------------------

def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"non-finite constant {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational constant")


def const(x) -> Expr:
    return _make(CONST, _frac(x))


def sym(name: str) -> Expr:
    if not isinstance(name, str) or not name:
        raise TypeError("symbol name must be a non-empty string")
    return _make(SYM, name)


def symbols(names: str):
    return tuple(sym(n) for n in names.replace(",", " ").split())


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return const(x)


ZERO = const(0)
ONE = const(1)
MINUS_ONE = const(-1)
HALF = Fraction(1, 2)


# -- canonicalizing constructors ---------------------------------------------

def _split_coeff(t: Expr):
    if t.kind == MUL and t.args[0].kind == CONST:
        rest = t.args[1:]
        return t.args[0].value, (rest[0] if len(rest) == 1 else _make(MUL, None, rest))
    return Fraction(1), t


def _scaled(c: Fraction, rest: Expr) -> Expr:
    if c == 1:
        return rest
    if rest.kind == MUL:
        return _make(MUL, None, (const(c),) + rest.args)
    return _make(MUL, None, (const(c), rest))


def add(*terms) -> Expr:
    """Canonical n-ary sum."""
    total = Fraction(0)
    coeffs: dict[Expr, Fraction] = {}
    stack = [as_expr(t) for t in terms]
    while stack:
        t = stack.pop()
        if t.kind == ADD:
            stack.extend(t.args)
        elif t.kind == CONST:
            total += t.value
        else:
            c, rest = _split_coeff(t)
            coeffs[rest] = coeffs.get(rest, 0) + c
    out = [_scaled(c, rest) for rest, c in coeffs.items() if c != 0]
    if total != 0:
        out.append(const(total))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    out.sort(key=_term_key)
    return _make(ADD, None, tuple(out))


def _term_key(t: Expr):
    return _split_coeff(t)[1].key if t.kind != CONST else t.key


def mul(*factors) -> Expr:
    """Canonical n-ary product; equal bases are merged by adding exponents."""
    coeff = Fraction(1)
    powers: dict[Expr, Fraction] = {}
    stack = [as_expr(f) for f in factors]
    while stack:
        f = stack.pop()
        k = f.kind
        if k == MUL:
            stack.extend(f.args)
        elif k == CONST:
            if f.value == 0:
                return ZERO
            coeff *= f.value
        elif k == POW:
            b = f.args[0]
            powers[b] = powers.get(b, 0) + f.value
        else:
            powers[f] = powers.get(f, 0) + 1
    out = []
    reflatten = False
    for base, e in powers.items():
        if e == 0:
            continue
        p = pow_(base, e) if e != 1 else base
        if p.kind == CONST:
            coeff *= p.value
        elif p.kind == MUL:
            # e.g. (x*y)^(1/2) squared; its factors may merge with others
            reflatten = True
            out.append(p)
        else:
            out.append(p)
    if reflatten:
        return mul(const(coeff), *out)
    if coeff == 0:
        return ZERO
    if not out:
        return const(coeff)
    out.sort(key=lambda x: x.key)
    if coeff == 1 and len(out) == 1:
        return out[0]
    if len(out) == 1 and out[0].kind == ADD:
        # a number times a sum is distributed so that c*(x - y) and
        # c*x - c*y share one canonical form
        return add(*(mul(const(coeff), t) for t in out[0].args))
    if coeff != 1:
        out.insert(0, const(coeff))
    return _make(MUL, None, tuple(out))


def _exact_root(q: Fraction, n: int):
    if q < 0:
        return None

    def iroot(k):
        r = round(k ** (1.0 / n))
        for c in (r - 1, r, r + 1):
            if c >= 0 and c ** n == k:
                return c
        return None

    a, b = iroot(q.numerator), iroot(q.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def pow_(base, e) -> Expr:
    """Canonical power with a rational exponent."""
    base = as_expr(base)
    e = _frac(e)
    if e == 0:
        return ONE
    if e == 1:
        return base
    k = base.kind
    if k == CONST:
        b = base.value
        if b == 0:
            if e < 0:
                raise DomainError("0 raised to a negative power")
            return ZERO
        if b == 1:
            return ONE
        if e.denominator == 1:
            return const(b ** int(e))
        root = _exact_root(b, e.denominator)
        if root is not None:
            return const(root ** e.numerator)
        return _make(POW, e, (base,))
    if k == POW and e.denominator == 1:
        return pow_(base.args[0], base.value * e)
    if k == MUL and e.denominator == 1:
        return mul(*(pow_(f, e) for f in base.args))
    return _make(POW, e, (base,))


def neg(x) -> Expr:
    return mul(MINUS_ONE, x)


def sub(a, b) -> Expr:
    return add(a, neg(b))


def div(a, b) -> Expr:
    return mul(a, pow_(b, -1))


def sqrt(x) -> Expr:
    return pow_(x, HALF)


def func(name: str, arg) -> Expr:
    """Canonical elementary function application."""
    if name == "sqrt":
        return sqrt(arg)
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    arg = as_expr(arg)
    if arg.kind == CONST:
        v = arg.value
        if v == 0:
            if name == "log":
                raise DomainError("log(0)")
            return ONE if name in ("cos", "cosh", "exp") else ZERO
        if name == "log" and v < 0:
            raise DomainError(f"log of negative constant {v}")
        if name == "log" and v == 1:
            return ZERO
        if v < 0 and (name in _ODD or name in _EVEN):
            inner = _make(FUNC, name, (const(-v),))
            return neg(inner) if name in _ODD else inner
        return _make(FUNC, name, (arg,))
    if name in _ODD or name in _EVEN:
        c, rest = _split_coeff(arg)
        if c < 0:
            inner = _make(FUNC, name, (_scaled(-c, rest),))
            return neg(inner) if name in _ODD else inner
    if name == "exp":
        # exp(c*log(x)) -> x^c, valid wherever log(x) is defined
        c, rest = _split_coeff(arg)
        if rest.kind == FUNC and rest.value == "log":
            return pow_(rest.args[0], c)
    if name == "log" and arg.kind == FUNC and arg.value == "exp":
        return arg.args[0]
    return _make(FUNC, name, (arg,))


def sin(x):
    return func("sin", x)


def cos(x):
    return func("cos", x)


def tan(x):
    return func("tan", x)


def exp(x):
    return func("exp", x)


def log(x):
    return func("log", x)


def sinh(x):
    return func("sinh", x)


def cosh(x):
    return func("cosh", x)


# -- traversal helpers --------------------------------------------------------

def topological(roots) -> list[Expr]:
    """Post-order list of the distinct nodes reachable from ``roots``."""
    seen: set[int] = set()
    order: list[Expr] = []
    for root in roots:
        if id(root) in seen:
            continue
        stack = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for a in node.args:
                if id(a) not in seen:
                    stack.append((a, False))
    return order


def dag_size(*roots) -> int:
    return len(topological(roots))


def substitute(e: Expr, mapping: dict) -> Expr:
    """Replace symbols (by name or Expr) with expressions."""
    m = {}
    for k, v in mapping.items():
        name = k.value if isinstance(k, Expr) else k
        m[name] = as_expr(v)
    memo: dict[int, Expr] = {}
    for node in topological([e]):
        if node.kind == SYM:
            out = m.get(node.value, node)
        elif node.kind == CONST:
            out = node
        else:
            out = rebuild(node, [memo[id(a)] for a in node.args])
        memo[id(node)] = out
    return memo[id(e)]


def rebuild(node: Expr, args) -> Expr:
    k = node.kind
    if k == ADD:
        return add(*args)
    if k == MUL:
        return mul(*args)
    if k == POW:
        return pow_(args[0], node.value)
    if k == FUNC:
        return func(node.value, args[0])
    return node

"""Symbolic differentiation and simplification."""
from __future__ import annotations

from itertools import product

from . import expr as E
from .expr import ADD, CONST, FUNC, MUL, POW, SYM, Expr

# expansion is skipped once a product would produce more terms than this
EXPAND_LIMIT = 256


def differentiate(e: Expr, v) -> Expr:
    """Partial derivative of ``e`` with respect to symbol ``v``.

    Results are memoized on the (interned) nodes, so differentiating a large
    DAG costs time linear in its number of distinct nodes.
    """
    name = v.value if isinstance(v, Expr) else v
    if name not in e.free_symbols:
        return E.ZERO
    # iterative post-order so deep trees do not hit the recursion limit
    for node in E.topological([e]):
        cache = node._dcache
        if name in cache:
            continue
        if name not in node.free_symbols:
            cache[name] = E.ZERO
            continue
        cache[name] = _d_node(node, name)
    return e._dcache[name]


def _d(node: Expr, name: str) -> Expr:
    return node._dcache[name] if name in node.free_symbols else E.ZERO


def _d_node(node: Expr, name: str) -> Expr:
    k = node.kind
    if k == SYM:
        return E.ONE
    if k == ADD:
        return E.add(*(_d(a, name) for a in node.args))
    if k == MUL:
        args = node.args
        terms = []
        for i, a in enumerate(args):
            da = _d(a, name)
            if da is E.ZERO:
                continue
            terms.append(E.mul(da, *args[:i], *args[i + 1:]))
        return E.add(*terms)
    if k == POW:
        b = node.args[0]
        n = node.value
        return E.mul(E.const(n), E.pow_(b, n - 1), _d(b, name))
    # FUNC
    x = node.args[0]
    dx = _d(x, name)
    f = node.value
    if f == "sin":
        outer = E.cos(x)
    elif f == "cos":
        outer = E.neg(E.sin(x))
    elif f == "tan":
        outer = E.pow_(E.cos(x), -2)
    elif f == "exp":
        outer = node
    elif f == "log":
        outer = E.pow_(x, -1)
    elif f == "sinh":
        outer = E.cosh(x)
    elif f == "cosh":
        outer = E.sinh(x)
    else:  # pragma: no cover
        raise ValueError(f)
    return E.mul(outer, dx)


def gradient(e: Expr, coords) -> tuple:
    return tuple(differentiate(e, c) for c in coords)


# -- simplification -----------------------------------------------------------

def _terms(e: Expr):
    return e.args if e.kind == ADD else (e,)


def _expand_node(node: Expr, args) -> Expr:
    k = node.kind
    if k == MUL:
        groups = [_terms(a) for a in args]
        count = 1
        for g in groups:
            count *= len(g)
        if count == 1 or count > EXPAND_LIMIT:
            return E.mul(*args)
        return E.add(*(E.mul(*combo) for combo in product(*groups)))
    if k == POW:
        b = args[0]
        n = node.value
        if b.kind == ADD and n.denominator == 1 and 1 < n and len(b.args) ** int(n) <= EXPAND_LIMIT:
            out = b
            for _ in range(int(n) - 1):
                out = _distribute(out, b)
            return out
        return E.pow_(b, n)
    return E.rebuild(node, args)


def _distribute(a: Expr, b: Expr) -> Expr:
    return E.add(*(E.mul(x, y) for x in _terms(a) for y in _terms(b)))


def expand(e: Expr) -> Expr:
    """Distribute products over sums (bounded by ``EXPAND_LIMIT`` terms)."""
    memo: dict[int, Expr] = {}
    for node in E.topological([e]):
        if node.kind in (CONST, SYM):
            memo[id(node)] = node
        else:
            memo[id(node)] = _expand_node(node, [memo[id(a)] for a in node.args])
    return memo[id(e)]


def _trig_square(f: Expr):
    """Return (fname, arg) when ``f`` is sin(x)^2 or cos(x)^2."""
    if f.kind == POW and f.value == 2:
        b = f.args[0]
        if b.kind == FUNC and b.value in ("sin", "cos"):
            return b.value, b.args[0]
    return None


def _pythagoras(e: Expr) -> Expr:
    """Rewrite c*X*sin(a)^2 + c*X*cos(a)^2 -> c*X inside a sum."""
    if e.kind != ADD:
        return e
    terms = list(e.args)
    changed = True
    while changed:
        changed = False
        index = {}
        for i, t in enumerate(terms):
            factors = t.args if t.kind == MUL else (t,)
            for j, f in enumerate(factors):
                tsq = _trig_square(f)
                if tsq is None:
                    continue
                rest = E.mul(*factors[:j], *factors[j + 1:])
                index.setdefault((tsq[1], rest), {})[tsq[0]] = i
        for (arg, rest), hit in index.items():
            if "sin" in hit and "cos" in hit and hit["sin"] != hit["cos"]:
                i, j = hit["sin"], hit["cos"]
                keep = [t for k, t in enumerate(terms) if k not in (i, j)]
                terms = list(_terms(E.add(*keep, rest)))
                changed = True
                break
    return E.add(*terms)


def _simplify_once(e: Expr) -> Expr:
    memo: dict[int, Expr] = {}
    for node in E.topological([e]):
        if node.kind in (CONST, SYM):
            out = node
        else:
            out = _expand_node(node, [memo[id(a)] for a in node.args])
            out = _pythagoras(out)
        memo[id(node)] = out
    return memo[id(e)]


def simplify(e: Expr, max_passes: int = 8) -> Expr:
    """Canonical simplification: bounded expansion, like-term collection and
    sin^2 + cos^2 -> 1, iterated to a fixed point (hence idempotent)."""
    for _ in range(max_passes):
        nxt = _simplify_once(e)
        if nxt is e:
            return e
        e = nxt
    return e

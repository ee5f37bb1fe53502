"""Compile expression DAGs to register programs and evaluate them in batch.

The compiled C kernel (``axired._vm``) is used when it was built; otherwise
the numpy implementation in ``axired._vm_py`` takes over.  Set
``AXIRED_BACKEND=python`` to force the fallback.  ``AXIRED_THREADS`` caps the
number of worker threads used for large batches (the C kernel releases the
GIL).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Mapping, Sequence

import numpy as np

from .. import _vm_py
from . import expr as E
from .expr import ADD, CONST, MUL, POW, SYM, DomainError, Expr, UnboundSymbolError

try:
    from .. import _vm as _vm_c
except ImportError:  # pragma: no cover - depends on the build
    _vm_c = None

_FUNC_OPS = {
    "sin": _vm_py.OP_SIN, "cos": _vm_py.OP_COS, "tan": _vm_py.OP_TAN,
    "exp": _vm_py.OP_EXP, "log": _vm_py.OP_LOG, "sinh": _vm_py.OP_SINH,
    "cosh": _vm_py.OP_COSH,
}


def available_backends() -> list[str]:
    return (["c"] if _vm_c is not None else []) + ["python"]


def default_backend() -> str:
    forced = os.environ.get("AXIRED_BACKEND", "").strip().lower()
    if forced in ("python", "numpy", "py"):
        return "python"
    return "c" if _vm_c is not None else "python"


def _threads() -> int:
    try:
        n = int(os.environ.get("AXIRED_THREADS", "0"))
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, n)


class Program:
    """A batch of expressions compiled over an ordered list of input symbols.

    Shared subexpressions are evaluated once per point.
    """

    def __init__(self, exprs: Sequence[Expr], variables: Sequence[str] | None = None):
        exprs = [E.as_expr(e) for e in exprs]
        free = set().union(*(e.free_symbols for e in exprs)) if exprs else set()
        if variables is None:
            variables = sorted(free)
        variables = list(variables)
        missing = free - set(variables)
        if missing:
            raise UnboundSymbolError(f"unbound symbols: {sorted(missing)}")
        self.variables = variables
        self.exprs = exprs
        slot = {v: i for i, v in enumerate(variables)}

        nodes = E.topological(exprs)
        index = {}
        op, start, count, param, args = [], [], [], [], []
        for node in nodes:
            k = node.kind
            i = len(op)
            index[id(node)] = i
            p = 0.0
            s, c = len(args), 0
            if k == CONST:
                code, p = _vm_py.OP_CONST, float(node.value)
            elif k == SYM:
                code, s = _vm_py.OP_VAR, slot[node.value]
            elif k in (ADD, MUL):
                code = _vm_py.OP_ADD if k == ADD else _vm_py.OP_MUL
                args.extend(index[id(a)] for a in node.args)
                c = len(node.args)
            elif k == POW:
                x = node.value
                args.append(index[id(node.args[0])])
                c = 1
                if x.denominator == 1:
                    code, p = _vm_py.OP_POWI, float(x)
                elif x == E.HALF:
                    code = _vm_py.OP_SQRT
                elif x == -E.HALF:
                    code = _vm_py.OP_RSQRT
                else:
                    code, p = _vm_py.OP_POWR, float(x)
            else:
                code = _FUNC_OPS[node.value]
                args.append(index[id(node.args[0])])
                c = 1
            op.append(code)
            start.append(s)
            count.append(c)
            param.append(p)
        self._nodes = nodes
        self.op = np.asarray(op, dtype=np.int32)
        self.start = np.asarray(start, dtype=np.int32)
        self.count = np.asarray(count, dtype=np.int32)
        self.args = np.asarray(args if args else [0], dtype=np.int32)
        self.param = np.asarray(param, dtype=np.float64)
        self.outputs = np.asarray([index[id(e)] for e in exprs], dtype=np.int32)

    @property
    def size(self) -> int:
        return len(self.op)

    def _inputs(self, values) -> tuple[np.ndarray, tuple]:
        if isinstance(values, Mapping):
            cols = []
            for v in self.variables:
                if v not in values:
                    raise UnboundSymbolError(f"no value bound for symbol {v!r}")
                cols.append(np.asarray(values[v], dtype=np.float64))
            shape = np.broadcast_shapes(*(c.shape for c in cols)) if cols else ()
            arr = np.empty((len(cols), int(np.prod(shape, dtype=np.int64))))
            for i, c in enumerate(cols):
                arr[i] = np.broadcast_to(c, shape).ravel()
            return arr, shape
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        return np.ascontiguousarray(arr), (arr.shape[1],)

    def __call__(self, values, backend: str | None = None) -> np.ndarray:
        """Evaluate all outputs.

        ``values`` maps each variable to a scalar or array (broadcast
        together), or is an array of shape ``(nvars, npts)``.  Returns an
        array of shape ``(nout,) + point_shape``.
        """
        inputs, shape = self._inputs(values)
        npts = inputs.shape[1]
        out = np.empty((len(self.outputs), npts))
        if self.size == 0 or npts == 0:
            return out.reshape((len(self.outputs),) + tuple(shape))
        backend = backend or default_backend()
        if backend == "c":
            if _vm_c is None:
                raise RuntimeError("compiled backend is not available")
            status, bad = self._run_c(inputs, out)
        else:
            status, bad = _vm_py.run(self.op, self.start, self.count, self.args,
                                     self.param, self.outputs, inputs, out)
        if status != _vm_py.OK:
            self._raise(status, bad)
        return out.reshape((len(self.outputs),) + tuple(shape))

    def _run_c(self, inputs, out):
        npts = inputs.shape[1]
        nthreads = min(_threads(), max(1, npts // 2048))
        if nthreads == 1:
            return _vm_c.run(self.op, self.start, self.count, self.args, self.param,
                             self.outputs, inputs, out)
        bounds = np.linspace(0, npts, nthreads + 1).astype(int)
        chunks = []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            chunks.append((np.ascontiguousarray(inputs[:, lo:hi]),
                           np.empty((out.shape[0], hi - lo)), lo, hi))
        with ThreadPoolExecutor(nthreads) as pool:
            results = list(pool.map(
                lambda ch: _vm_c.run(self.op, self.start, self.count, self.args,
                                     self.param, self.outputs, ch[0], ch[1]), chunks))
        for (_, o, lo, hi), (status, bad) in zip(chunks, results):
            if status:
                return status, bad
            out[:, lo:hi] = o
        return 0, -1

    def _raise(self, status, bad):
        from .printer import to_string
        node = self._nodes[bad] if 0 <= bad < len(self._nodes) else None
        what = "?"
        if node is not None:
            text = to_string(node) if E.dag_size(node) < 60 else f"<{E.KIND_NAMES[node.kind]} node>"
            what = text
        if status == _vm_py.ERR_DOMAIN:
            raise DomainError(f"domain error evaluating {what}")
        raise DomainError(f"non-finite value from {what}")


def compile_exprs(exprs, variables=None) -> Program:
    return Program(list(exprs), variables)


def evaluate(e: Expr, binding: Mapping[str, float]) -> float:
    """Evaluate ``e`` at a single point; every free symbol must be bound."""
    e = E.as_expr(e)
    if e.kind == CONST:
        return float(e.value)
    missing = e.free_symbols - set(binding)
    if missing:
        raise UnboundSymbolError(f"unbound symbols: {sorted(missing)}")
    prog = Program([e], sorted(e.free_symbols))
    val = prog({k: float(binding[k]) for k in prog.variables})
    v = float(val[0])
    if not math.isfinite(v):  # pragma: no cover - caught by the kernels
        raise DomainError("non-finite result")
    return v


def scalar_function(exprs, variables):
    """Compile expressions into a plain Python function of scalar arguments.

    Returns ``fn(*values) -> tuple`` built from straight-line ``math`` calls,
    which is much cheaper than a VM launch when called once per ODE stage.
    Domain violations raise :class:`DomainError`.
    """
    exprs = [E.as_expr(e) for e in exprs]
    variables = list(variables)
    free = set().union(*(e.free_symbols for e in exprs)) if exprs else set()
    if free - set(variables):
        raise UnboundSymbolError(f"unbound symbols: {sorted(free - set(variables))}")
    arg = {v: f"a{i}" for i, v in enumerate(variables)}
    names: dict[int, str] = {}
    body = []
    for node in E.topological(exprs):
        k = node.kind
        if k == CONST:
            src = repr(float(node.value))
        elif k == SYM:
            src = arg[node.value]
        else:
            a = [names[id(x)] for x in node.args]
            if k == ADD:
                src = " + ".join(a)
            elif k == MUL:
                src = " * ".join(a)
            elif k == POW:
                x = node.value
                if x.denominator == 1:
                    src = f"{a[0]} ** {int(x)}"
                elif x == E.HALF:
                    src = f"_sqrt({a[0]})"
                else:
                    src = f"_rpow({a[0]}, {float(x)!r})"
            else:
                src = f"_{node.value}({a[0]})"
        name = f"t{len(names)}"
        names[id(node)] = name
        body.append(f"    {name} = {src}")
    outs = ", ".join(names[id(e)] for e in exprs)
    src = f"def _fn({', '.join(arg[v] for v in variables)}):\n" + "\n".join(body) + \
        f"\n    return ({outs},)\n"

    def rpow(b, x):
        if b < 0:
            raise ValueError("negative base")
        return b ** x

    env = {f"_{f}": getattr(math, f) for f in E.FUNCTIONS}
    env["_sqrt"] = math.sqrt
    env["_rpow"] = rpow
    exec(compile(src, "<axired.scalar_function>", "exec"), env)
    raw = env["_fn"]

    def fn(*values):
        try:
            return raw(*values)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(str(exc)) from None

    fn.source = src
    return fn

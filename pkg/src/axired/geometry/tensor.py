"""Symbolic metrics and tensor fields on a chart."""
from __future__ import annotations

import itertools

import numpy as np

from .. import symexpr as S
from ..symexpr import Expr
from .chart import Chart

RIEMANNIAN = "riemannian"
LORENTZIAN = "lorentzian"


class SingularMetricError(ArithmeticError):
    pass


class SignatureError(ValueError):
    pass


def expr_array(shape, fill=S.ZERO) -> np.ndarray:
    a = np.empty(shape, dtype=object)
    a.fill(fill)
    return a


class TensorField:
    """Components of a tensor in coordinates.

    ``valence`` has one letter per index, ``'u'`` (up) or ``'d'`` (down);
    e.g. the Christoffel symbols are ``'udd'``.
    """

    def __init__(self, valence: str, components, chart: Chart, symmetry: str | None = None):
        comps = np.asarray(components, dtype=object)
        n = chart.dim
        if comps.shape != (n,) * len(valence):
            raise ValueError(f"shape {comps.shape} does not match valence {valence!r} in {n}d")
        if any(ch not in "ud" for ch in valence):
            raise ValueError(f"bad valence {valence!r}")
        self.valence = valence
        self.components = comps
        self.chart = chart
        self.symmetry = symmetry

    @property
    def rank(self) -> int:
        return len(self.valence)

    def __getitem__(self, idx):
        return self.components[idx]

    def items(self):
        for idx in itertools.product(range(self.chart.dim), repeat=self.rank):
            yield idx, self.components[idx]

    def nonzero(self):
        return [(i, c) for i, c in self.items() if c is not S.ZERO]

    def distinct(self) -> list[Expr]:
        seen, out = set(), []
        for _, c in self.items():
            if id(c) not in seen:
                seen.add(id(c))
                out.append(c)
        return out

    def map(self, fn) -> "TensorField":
        out = expr_array(self.components.shape)
        memo = {}
        for idx, c in self.items():
            if id(c) not in memo:
                memo[id(c)] = fn(c)
            out[idx] = memo[id(c)]
        return TensorField(self.valence, out, self.chart, self.symmetry)

    def evaluate(self, points: dict) -> np.ndarray:
        """Numerical components at sample points: shape ``(n,)*rank + (npts,)``."""
        flat = list(self.components.ravel())
        prog = S.Program(flat)
        vals = prog({v: points[v] for v in prog.variables})
        return vals.reshape(self.components.shape + vals.shape[1:])

    def __sub__(self, other: "TensorField") -> "TensorField":
        if self.valence != other.valence:
            raise ValueError("valence mismatch")
        out = expr_array(self.components.shape)
        for idx, c in self.items():
            out[idx] = S.sub(c, other.components[idx])
        return TensorField(self.valence, out, self.chart)


class MetricSpec:
    """A symmetric matrix of expressions with a signature tag.

    The same ``Expr`` object sits in the ``(i, j)`` and ``(j, i)`` slots, so
    symmetry holds structurally.  Derived quantities are cached on the
    instance; metrics are treated as immutable.
    """

    def __init__(self, components, chart: Chart, signature: str = LORENTZIAN,
                 time_index: int | None = 0):
        comps = np.asarray(components, dtype=object)
        n = chart.dim
        if comps.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} component matrix")
        if n not in (2, 3, 4):
            raise ValueError("metric dimension must be 2, 3 or 4")
        comps = comps.copy()
        for i in range(n):
            for j in range(n):
                comps[i, j] = S.as_expr(comps[i, j])
        for i in range(n):
            for j in range(i + 1, n):
                if comps[i, j] is not comps[j, i]:
                    raise ValueError(f"component matrix is not symmetric at ({i}, {j})")
        if signature not in (RIEMANNIAN, LORENTZIAN):
            raise ValueError(f"unknown signature {signature!r}")
        if signature == RIEMANNIAN:
            time_index = None
        elif time_index is None or not 0 <= time_index < n:
            raise ValueError("a Lorentzian metric needs a valid time index")
        known = set(chart.coords) | set(chart.params)
        free = set().union(*(c.free_symbols for c in comps.ravel()))
        if free - known:
            raise ValueError(f"symbols {sorted(free - known)} are neither coordinates nor parameters")
        self.components = comps
        self.chart = chart
        self.signature = signature
        self.time_index = time_index
        self._cache: dict = {}

    @classmethod
    def from_lower(cls, entries: dict, chart: Chart, **kw) -> "MetricSpec":
        """Build from ``{(i, j): expr}`` with each pair given once."""
        n = chart.dim
        comps = expr_array((n, n))
        for (i, j), v in entries.items():
            v = S.parse(v) if isinstance(v, str) else S.as_expr(v)
            comps[i, j] = v
            comps[j, i] = v
        return cls(comps, chart, **kw)

    @classmethod
    def diagonal(cls, diag, chart: Chart, **kw) -> "MetricSpec":
        return cls.from_lower({(i, i): d for i, d in enumerate(diag)}, chart, **kw)

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def coords(self) -> tuple:
        return self.chart.coords

    def __getitem__(self, idx) -> Expr:
        return self.components[idx]

    def as_tensor(self) -> TensorField:
        return TensorField("dd", self.components, self.chart, symmetry="sym")

    def scaled(self, factor) -> "MetricSpec":
        factor = S.as_expr(factor)
        n = self.dim
        out = expr_array((n, n))
        for i in range(n):
            for j in range(i, n):
                out[i, j] = out[j, i] = S.mul(factor, self.components[i, j])
        return MetricSpec(out, self.chart, self.signature, self.time_index)

    def determinant(self) -> Expr:
        if "det" not in self._cache:
            self._cache["det"] = determinant(self.components)
        return self._cache["det"]

    def volume_element(self) -> Expr:
        """sqrt(|det g|)."""
        d = self.determinant()
        return S.sqrt(S.neg(d) if self.signature == LORENTZIAN else d)

    def spatial(self) -> "MetricSpec":
        """Induced metric on the constant-time slice (spatial block)."""
        if self.signature != LORENTZIAN:
            raise SignatureError("metric has no time coordinate")
        keep = [i for i in range(self.dim) if i != self.time_index]
        comps = self.components[np.ix_(keep, keep)]
        return MetricSpec(comps, self.chart.restrict([self.coords[i] for i in keep]),
                          RIEMANNIAN)

    def check(self, n: int = 20, seed: int = 42) -> None:
        """Verify determinant sign and signature on the sampling box."""
        pts = self.chart.sample(n, seed)
        det = S.Program([self.determinant()])
        dv = det({v: pts[v] for v in det.variables})[0]
        if self.signature == LORENTZIAN and not np.all(dv < 0):
            raise SignatureError("Lorentzian metric must have det < 0 on the sampling box")
        if self.signature == RIEMANNIAN and not np.all(dv > 0):
            raise SignatureError("Riemannian metric must have det > 0 on the sampling box")
        vals = self.as_tensor().evaluate(pts)
        expected = self.dim - 1 if self.signature == LORENTZIAN else self.dim
        for k in range(vals.shape[-1]):
            eig = np.linalg.eigvalsh(vals[..., k])
            if np.sum(eig > 0) != expected:
                raise SignatureError(f"wrong signature at sample {k}: eigenvalues {eig}")


def determinant(m) -> Expr:
    """Laplace expansion along the first row, skipping literal zeros."""
    m = np.asarray(m, dtype=object)
    n = m.shape[0]
    if n == 1:
        return m[0, 0]
    if n == 2:
        return S.sub(S.mul(m[0, 0], m[1, 1]), S.mul(m[0, 1], m[1, 0]))
    terms = []
    for j in range(n):
        a = m[0, j]
        if a is S.ZERO:
            continue
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        sub = determinant(minor)
        if sub is S.ZERO:
            continue
        terms.append(S.mul(a, sub) if j % 2 == 0 else S.neg(S.mul(a, sub)))
    return S.add(*terms)


def blocks(m) -> list[list[int]]:
    """Index groups of a block-diagonal matrix (connected by nonzero entries)."""
    n = m.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if m[i, j] is not S.ZERO:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())

"""Coordinate charts with sampling boxes that stay clear of singular loci."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

DEFAULT_INTERVAL = (0.0, 1.0)


class EmptyRegionError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """Ordered coordinates, parameter defaults and a sampling box.

    ``box`` maps coordinate names to ``(lower, upper)``; ``margins`` shrinks
    each interval from both ends (e.g. ``theta: 0.3`` keeps samples off the
    axis).  Coordinates without a box are sampled on ``[0, 1]``.
    """

    coords: tuple
    params: dict = field(default_factory=dict)
    box: dict = field(default_factory=dict)
    margins: dict = field(default_factory=dict)
    orientation: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"coordinate names must be distinct: {self.coords}")
        if set(self.coords) & set(self.params):
            raise ValueError("a name cannot be both a coordinate and a parameter")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        for c in self.coords:
            lo, hi = self.interval(c)
            if not lo < hi:
                raise EmptyRegionError(f"sampling interval for {c!r} is empty: [{lo}, {hi}]")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def interval(self, coord: str) -> tuple[float, float]:
        lo, hi = self.box.get(coord, DEFAULT_INTERVAL)
        eps = self.margins.get(coord, 0.0)
        return float(lo) + eps, float(hi) - eps

    def contains(self, point) -> bool:
        for c, x in zip(self.coords, point):
            lo, hi = self.interval(c)
            if not lo <= x <= hi:
                return False
        return True

    def with_params(self, **values) -> "Chart":
        params = dict(self.params)
        for k, v in values.items():
            if k not in params:
                raise KeyError(f"unknown parameter {k!r}")
            params[k] = float(v)
        return Chart(self.coords, params, dict(self.box), dict(self.margins), self.orientation)

    def restrict(self, coords) -> "Chart":
        """Chart on a subset of the coordinates (same box, params, margins)."""
        coords = tuple(coords)
        return Chart(coords, dict(self.params),
                     {c: b for c, b in self.box.items() if c in coords},
                     {c: m for c, m in self.margins.items() if c in coords},
                     self.orientation)

    def sample(self, n: int = 20, seed: int = 42) -> dict:
        """Scrambled Halton points in the box, plus parameter defaults."""
        if n <= 0:
            raise EmptyRegionError("need at least one sample point")
        d = len(self.coords)
        u = qmc.Halton(d=d, scramble=True, seed=seed).random(n) if d else np.zeros((n, 0))
        pts = {}
        for j, c in enumerate(self.coords):
            lo, hi = self.interval(c)
            pts[c] = lo + (hi - lo) * u[:, j]
        for k, v in self.params.items():
            pts[k] = np.full(n, float(v))
        return pts

    def grid(self, counts: dict) -> dict:
        """Tensor-product grid over the box; unspecified coordinates use
        the interval midpoint."""
        axes = []
        for c in self.coords:
            lo, hi = self.interval(c)
            k = counts.get(c, 1)
            axes.append(np.linspace(lo, hi, k) if k > 1 else np.array([(lo + hi) / 2]))
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = {c: m.ravel() for c, m in zip(self.coords, mesh)}
        n = mesh[0].size if mesh else 1
        for k, v in self.params.items():
            pts[k] = np.full(n, float(v))
        return pts

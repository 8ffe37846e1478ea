"""Spatial grids, grid functions and expectation matrices of hat functions.

The grid is uniform on ``[-R, R]`` (spacing ``h``) and, by default,
continues geometrically out to ``far_edge`` with cells growing by
``far_growth`` per node and never wider than ``far_rel * |x|``.  Values
are interpolated linearly and held constant beyond the last node.  With
``extension="clamp"`` the grid stops at ``R`` and the boundary values are
held constant outside.
"""
from dataclasses import dataclass

import numpy as _np

from .errors import ValidationError


@dataclass(frozen=True)
class GridSpec:
    half_width: float = 8.0
    points: int = 1025
    extension: str = "geometric"
    far_edge: float = 1e7
    far_growth: float = 1.15
    far_rel: float = 0.05

    def __post_init__(self):
        if not (self.half_width > 0):
            raise ValidationError("half_width must be positive")
        if int(self.points) != self.points or self.points < 3 or self.points % 2 == 0:
            raise ValidationError("points must be an odd integer >= 3")
        if self.extension not in ("geometric", "clamp"):
            raise ValidationError("extension must be 'geometric' or 'clamp'")
        if self.extension == "geometric":
            if not (self.far_edge > self.half_width and self.far_growth > 1 and 0 < self.far_rel):
                raise ValidationError("need far_edge > half_width, far_growth > 1, far_rel > 0")

    @classmethod
    def from_spacing(cls, half_width, h, **kw):
        n = int(round(2 * half_width / h))
        if abs(n * h - 2 * half_width) > 1e-9 * half_width:
            raise ValidationError("spacing must divide the grid width")
        return cls(half_width, n + 1, **kw)

    @property
    def spacing(self):
        return 2.0 * self.half_width / (self.points - 1)

    def nodes(self):
        """Sorted node array, exactly symmetric, containing 0."""
        m = (self.points - 1) // 2
        core = self.spacing * _np.arange(m + 1)
        core[-1] = self.half_width
        right = [core]
        if self.extension == "geometric":
            far = []
            x, H = self.half_width, self.spacing
            while x < self.far_edge:
                H = min(H * self.far_growth, self.far_rel * x)
                x = x + H
                far.append(x)
            right.append(_np.asarray(far))
        pos = _np.concatenate(right)
        return _np.concatenate([-pos[:0:-1], pos])

    @property
    def origin(self):
        return (self.nodes().size - 1) // 2

    def to_dict(self):
        return {"half_width": self.half_width, "points": self.points, "extension": self.extension,
                "far_edge": self.far_edge, "far_growth": self.far_growth, "far_rel": self.far_rel}

    @classmethod
    def from_dict(cls, d):
        kw = {}
        for key, conv in (("half_width", float), ("points", int), ("extension", str),
                          ("far_edge", float), ("far_growth", float), ("far_rel", float)):
            if key in d:
                kw[key] = conv(d[key])
        if "spacing" in d and "points" not in d:
            hw = kw.get("half_width", 8.0)
            kw["points"] = int(round(2 * hw / float(d["spacing"]))) + 1
        return cls(**kw)


@dataclass
class GridFunction:
    spec: GridSpec
    values: _np.ndarray
    nodes: _np.ndarray = None

    def __post_init__(self):
        if self.nodes is None:
            self.nodes = self.spec.nodes()
        self.values = _np.asarray(self.values, dtype=float)
        if self.values.shape != self.nodes.shape:
            raise ValidationError("one value per node required")
        if not _np.all(_np.isfinite(self.values)):
            raise ValidationError("grid values must be finite")

    @classmethod
    def sample(cls, spec, phi):
        x = spec.nodes()
        return cls(spec, phi(x), x)

    def __call__(self, x):
        return _np.interp(x, self.nodes, self.values)

    @property
    def at_origin(self):
        return float(self.values[(self.nodes.size - 1) // 2])

    def sup_norm(self):
        return float(_np.max(_np.abs(self.values)))

    def symmetry_gap(self):
        return float(_np.max(_np.abs(self.values - self.values[::-1])))


def hat_matrix(nodes, law, scale, trunc=None, rows=None, chunk_cells=2_000_000):
    """``W[i, j] = E[hat_j(x_i + scale * W)]`` with constant extension past the ends.

    ``law`` supplies ``moments3`` for the continuous part, ``tail_prob`` and
    ``atom_mass``.  Rows sum to one up to rounding.
    """
    x = _np.asarray(nodes, dtype=float)
    rows = _np.arange(x.size) if rows is None else _np.asarray(rows)
    cost = getattr(law, "moment_cost", 1)
    step = max(1, int(chunk_cells // (x.size * cost)))
    return _np.vstack([_hat_rows(x, law, scale, trunc, rows[i:i + step])
                       for i in range(0, rows.size, step)])


def _hat_rows(x, law, scale, trunc, rows):
    xi = x[rows]
    P = x.size
    W = _np.zeros((xi.size, P))
    width = _np.diff(x)
    lo = x[None, :-1] - xi[:, None]
    hi = x[None, 1:] - xi[:, None]
    rise = _np.zeros(lo.shape)   # int (y - lo) dG over the piece
    fall = _np.zeros(lo.shape)   # int (hi - y) dG over the piece
    # positive half-line part [max(lo,0), max(hi,0)]
    p = _np.maximum(lo, 0.0)
    q = _np.maximum(hi, 0.0)
    live = q > p
    if _np.any(live):
        h0, h1, h2 = law.moments3(p[live], q[live], scale, trunc)
        rise[live] += h1 + (p[live] - lo[live]) * h0
        fall[live] += h2 + (hi[live] - q[live]) * h0
    # negative part: y = -v with v in [max(-hi,0), max(-lo,0)]
    p = _np.maximum(-hi, 0.0)
    q = _np.maximum(-lo, 0.0)
    live = q > p
    if _np.any(live):
        h0, h1, h2 = law.moments3(p[live], q[live], scale, trunc)
        # y - lo = (q - v) + (-lo - q);  hi - y = (v - p) + (hi + p)
        rise[live] += h2 + (-lo[live] - q[live]) * h0
        fall[live] += h1 + (hi[live] + p[live]) * h0
    W[:, 1:] += rise / width
    W[:, :-1] += fall / width
    # mass beyond the ends goes to the end nodes
    W[:, 0] += law.tail_prob(xi - x[0], scale, trunc)
    W[:, -1] += law.tail_prob(x[-1] - xi, scale, trunc)
    atom = law.atom_mass(trunc)
    if atom:
        W[_np.arange(xi.size), rows] += atom
    return W

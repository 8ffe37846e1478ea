"""Symmetric alpha-stable Levy measures and the jump uncertainty band.

A Levy measure of this family is written in polar form
``F(dlam) = mu(dz) r**(-1 - alpha) dr`` with ``mu`` a symmetric finite
measure on the unit sphere.  The uncertainty band collects every such
measure whose spherical mass ``mu(S)`` lies in ``[mass_lo, mass_hi]``.
"""
from dataclasses import dataclass, field

import numpy as _np

from .errors import DomainError, ValidationError

_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class StableIndex:
    """Stability index alpha in (0, 1]."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 < a <= 1.0) or not _np.isfinite(a):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)


def _as_index(index):
    return index if isinstance(index, StableIndex) else StableIndex(index)


def _directions(dirs):
    arr = _np.atleast_2d(_np.asarray(dirs, dtype=float))
    if arr.shape[0] == 1 and arr.shape[1] > 1 and _np.ndim(dirs) == 1:
        # a flat list of scalars means d = 1
        arr = arr.T
    return arr


def _mirror_index(dirs):
    """Index of -z for every direction z, or None if the grid is not mirror-closed."""
    idx = []
    for z in dirs:
        hit = _np.flatnonzero(_np.all(_np.abs(dirs + z) <= 1e-12, axis=1))
        if hit.size == 0:
            return None
        idx.append(int(hit[0]))
    return _np.asarray(idx)


@dataclass(frozen=True)
class SphericalMeasure:
    """Discrete symmetric finite measure on the unit sphere."""

    directions: _np.ndarray
    weights: _np.ndarray

    def __post_init__(self):
        dirs = _directions(self.directions)
        w = _np.asarray(self.weights, dtype=float).ravel()
        if dirs.shape[0] != w.size or w.size == 0:
            raise ValidationError("need one nonnegative weight per direction")
        if _np.any(_np.abs(_np.linalg.norm(dirs, axis=1) - 1.0) > _UNIT_TOL):
            raise ValidationError("directions must be unit vectors")
        if _np.any(w < 0):
            raise ValidationError("weights must be nonnegative")
        mirror = _mirror_index(dirs)
        if mirror is None or _np.any(_np.abs(w[mirror] - w) > 1e-12 * max(1.0, w.max())):
            raise ValidationError("spherical measure must be mirror-closed and symmetric")
        if w.sum() <= 0:
            raise ValidationError("total mass must be positive")
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "weights", w)

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def integrate(self, values):
        """Integral of a function given by its values on the atoms."""
        return float(_np.dot(self.weights, _np.asarray(values, dtype=float)))


@dataclass(frozen=True)
class UncertaintySet:
    """Band of alpha-stable Levy measures with spherical mass in [mass_lo, mass_hi].

    The band is closed so that suprema are attained.
    """

    index: StableIndex
    mass_lo: float
    mass_hi: float
    direction_grid: _np.ndarray = field(default_factory=lambda: _np.array([[1.0], [-1.0]]))

    def __post_init__(self):
        object.__setattr__(self, "index", _as_index(self.index))
        lo, hi = float(self.mass_lo), float(self.mass_hi)
        if not (0 < lo <= hi) or not _np.isfinite(hi):
            raise ValidationError(f"need 0 < mass_lo <= mass_hi, got [{lo}, {hi}]")
        dirs = _directions(self.direction_grid)
        if dirs.shape[0] == 0:
            raise ValidationError("empty direction grid")
        if _np.any(_np.abs(_np.linalg.norm(dirs, axis=1) - 1.0) > _UNIT_TOL):
            raise ValidationError("direction grid must contain unit vectors")
        if _mirror_index(dirs) is None:
            raise ValidationError("direction grid must be mirror-closed")
        if dirs.shape[1] == 1 and sorted(dirs[:, 0].tolist()) != [-1.0, 1.0]:
            raise ValidationError("in one dimension the direction grid is exactly {+1, -1}")
        object.__setattr__(self, "mass_lo", lo)
        object.__setattr__(self, "mass_hi", hi)
        object.__setattr__(self, "direction_grid", dirs)

    @property
    def alpha(self):
        return self.index.alpha

    @property
    def dim(self):
        return self.direction_grid.shape[1]

    @property
    def is_singleton(self):
        return self.mass_lo == self.mass_hi

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "mass_lo": self.mass_lo,
            "mass_hi": self.mass_hi,
            "directions": [list(map(float, z)) for z in self.direction_grid],
        }

    @classmethod
    def from_dict(cls, d):
        dirs = d.get("directions", [[1.0], [-1.0]])
        return cls(StableIndex(float(d["alpha"])), float(d["mass_lo"]), float(d["mass_hi"]),
                   _np.asarray(dirs, dtype=float))


def tail_mass(index, total_mass, r):
    """Mass ``F({|lam| > r}) = total_mass * r**-alpha / alpha``."""
    alpha = _as_index(index).alpha
    r = _np.asarray(r, dtype=float)
    if _np.any(r <= 0):
        raise DomainError("radius must be positive")
    if total_mass < 0:
        raise DomainError("total mass must be nonnegative")
    out = total_mass * r ** (-alpha) / alpha
    return float(out) if out.ndim == 0 else out


def k_alpha(uset):
    """Sup over the band of the integral of min(|lam|, 1) (alpha < 1) or min(|lam|^2, 1) (alpha = 1)."""
    a = uset.alpha
    if a < 1.0:
        return uset.mass_hi * (1.0 / (1.0 - a) + 1.0 / a)
    return 2.0 * uset.mass_hi


def sup_spherical(sym_values, uset):
    """Support function of the band evaluated on symmetrized ray values.

    ``sym_values`` holds ``gbar(z) = (g(z) + g(-z)) / 2`` on the direction
    grid of ``uset`` (a mapping direction -> value or an array in grid order).
    Returns ``(value, argmass, argdir)``.  Direction ties go to the lowest
    grid index, and a zero maximum reports ``mass_hi``.
    """
    if isinstance(sym_values, dict):
        keys = [tuple(_np.atleast_1d(_np.asarray(k, dtype=float))) for k in sym_values]
        lookup = dict(zip(keys, sym_values.values()))
        vals = _np.array([lookup[tuple(z)] for z in uset.direction_grid], dtype=float)
    else:
        vals = _np.asarray(sym_values, dtype=float).ravel()
    if vals.size == 0:
        raise DomainError("empty direction grid")
    if vals.size != uset.direction_grid.shape[0]:
        raise DomainError("one value per grid direction required")
    j = int(_np.argmax(vals))
    gmax = float(vals[j])
    mass = uset.mass_lo if gmax < 0 else uset.mass_hi
    return mass * gmax, mass, uset.direction_grid[j].copy()

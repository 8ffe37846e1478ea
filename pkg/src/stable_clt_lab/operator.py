"""Nonlocal generator of alpha-stable Levy measures and its sup over the band."""
from dataclasses import dataclass

import numpy as _np

from .errors import ValidationError
from .measure import StableIndex, UncertaintySet, k_alpha, sup_spherical, _as_index
from .quadrature import _decade, radial_integral


@dataclass(frozen=True)
class QuadratureSpec:
    """Radial quadrature controls.

    ``epsilon``: radius below which jumps are handled through the second
    difference.  ``outer_cut``: radius after which decades are only added
    while the result still moves by more than ``tol``.
    """

    epsilon: float = 1e-4
    outer_cut: float = 1e3
    nodes_per_decade: int = 64
    tol: float = 1e-8
    max_radius: float = 1e12

    def __post_init__(self):
        if not (0 < self.epsilon < self.outer_cut):
            raise ValidationError("need 0 < epsilon < outer_cut")
        if int(self.nodes_per_decade) != self.nodes_per_decade or self.nodes_per_decade < 4:
            raise ValidationError("nodes_per_decade must be an integer >= 4")
        if self.tol <= 0:
            raise ValidationError("tol must be positive")

    def to_dict(self):
        return {"epsilon": self.epsilon, "outer_cut": self.outer_cut,
                "nodes_per_decade": self.nodes_per_decade, "tol": self.tol}

    @classmethod
    def from_dict(cls, d):
        kw = {}
        for key, conv in (("epsilon", float), ("outer_cut", float), ("nodes_per_decade", int),
                          ("tol", float), ("max_radius", float)):
            if key in d:
                kw[key] = conv(d[key])
        return cls(**kw)


def _point(x):
    return _np.asarray(x, dtype=float)


def _grad_step(x):
    return max(1e-6, 1e-7 * (1.0 + float(_np.linalg.norm(x))))


def gradient(phi, x):
    """Central-difference gradient (analytic when phi carries derivatives, 1-D)."""
    x = _point(x)
    if x.ndim == 0:
        if phi.derivative is not None:
            return float(phi.deriv(x, 1))
        h = _grad_step(x)
        return float((phi(x + h) - phi(x - h)) / (2 * h))
    h = _grad_step(x)
    g = _np.empty(x.size)
    for i in range(x.size):
        e = _np.zeros(x.size)
        e[i] = h
        g[i] = (phi(x + e) - phi(x - e)) / (2 * h)
    return g


def delta_alpha(phi, x, lam, index):
    """Increment ``phi(x+lam) - phi(x)``, compensated by the gradient when alpha = 1 and |lam| <= 1."""
    alpha = _as_index(index).alpha
    x = _point(x)
    lam = _np.asarray(lam, dtype=float)
    out = float(phi(x + lam) - phi(x))
    if alpha == 1.0 and _np.linalg.norm(lam) <= 1.0:
        out -= float(_np.dot(_np.atleast_1d(gradient(phi, x)), _np.atleast_1d(lam)))
    return out


def _small_jump(phi, x, z, alpha, eps):
    """Symmetrized contribution of r <= eps from the second difference at spacing eps."""
    d2 = float(phi(x + eps * z) + phi(x - eps * z) - 2.0 * phi(x)) / (2.0 * eps * eps)
    return d2 * eps ** (2.0 - alpha) / (2.0 - alpha)


def _ray_points(x, z, r):
    if x.ndim == 0:
        return x + r * float(z)
    return x[None, :] + r[:, None] * _np.asarray(z, dtype=float)[None, :]


def generator_ray(phi, x, z, index, quad=QuadratureSpec(), info=False):
    """``g(z) = int_0^inf delta_{rz} phi(x) r**(-1-alpha) dr`` per unit spherical weight."""
    alpha = _as_index(index).alpha
    x = _point(x)
    z = _np.asarray(z, dtype=float)
    if z.ndim == 1 and z.size == 1 and x.ndim == 0:
        z = float(z[0])
    fx = float(phi(x))
    eps = quad.epsilon
    small = _small_jump(phi, x, z, alpha, eps)
    comp = 0.0
    if alpha == 1.0:
        comp = float(_np.dot(_np.atleast_1d(gradient(phi, x)), _np.atleast_1d(z)))

    def inner(r):
        return phi(_ray_points(x, z, r)) - fx - comp * r

    def outer(r):
        return phi(_ray_points(x, z, r)) - fx

    kw = dict(per_decade=quad.nodes_per_decade, tol=quad.tol, max_radius=quad.max_radius,
              bound=2.0 * phi.bound)
    if alpha == 1.0 and eps < 1.0:
        # compensator lives on (eps, 1]: integrate it without a tail, then the rest
        part = 0.0
        lo = eps
        while lo < 1.0:
            hi = min(lo * 10.0, 1.0)
            val, _ = _decade(inner, alpha, lo, hi, max(1, quad.nodes_per_decade // 8),
                             quad.tol / 20.0, 1 << 17)
            part += val[0]
            lo = hi
        rest, meta = radial_integral(outer, alpha, 1.0, max(quad.outer_cut, 10.0), **kw)
        value = small + part + rest
    else:
        value, meta = radial_integral(outer, alpha, eps, quad.outer_cut, **kw)
        value += small
    if info:
        return value, meta
    return value


def generator_sym(phi, x, z, index, quad=QuadratureSpec(), info=False):
    """Symmetrized ray value ``(g(z) + g(-z)) / 2`` from the symmetric-pair integrand."""
    alpha = _as_index(index).alpha
    x = _point(x)
    z = _np.asarray(z, dtype=float)
    if z.ndim == 1 and z.size == 1 and x.ndim == 0:
        z = float(z[0])
    fx = float(phi(x))
    small = _small_jump(phi, x, z, alpha, quad.epsilon)

    def pair(r):
        return 0.5 * (phi(_ray_points(x, z, r)) + phi(_ray_points(x, -z, r))) - fx

    value, meta = radial_integral(pair, alpha, quad.epsilon, quad.outer_cut,
                                  per_decade=quad.nodes_per_decade, tol=quad.tol,
                                  max_radius=quad.max_radius, bound=2.0 * phi.bound)
    value += small
    if info:
        return value, meta
    return value


def sym_values(phi, x, uset, quad=QuadratureSpec()):
    """Symmetrized ray values on the direction grid of ``uset``."""
    dirs = uset.direction_grid
    vals = _np.empty(dirs.shape[0])
    done = {}
    for i, z in enumerate(dirs):
        neg = tuple(-z)
        if neg in done:
            vals[i] = vals[done[neg]]
            continue
        zz = z if uset.dim > 1 else z[0]
        vals[i] = generator_sym(phi, x, zz, uset.index, quad)
        done[tuple(z)] = i
    return vals


def sup_generator(phi, x, uset, quad=QuadratureSpec(), full=False):
    """``sup over the band of int delta_lam phi(x) F(dlam)``."""
    res = sup_spherical(sym_values(phi, x, uset, quad), uset)
    return res if full else res[0]


def holder_constant(uset, delta, norms):
    """Constant of the Holder estimate for the band generator.

    ``norms`` maps derivative order to a sup-norm (estimate) of phi.
    """
    k = k_alpha(uset)
    d = float(delta)
    if uset.alpha < 1.0:
        return k * (4 * norms[1] ** d * norms[0] ** (1 - d) + 2 * norms[2] ** d * norms[1] ** (1 - d))
    return k * (4 * norms[1] ** d * norms[0] ** (1 - d) + 2 * norms[3] ** d * norms[2] ** (1 - d))

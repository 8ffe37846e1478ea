"""Classical symmetric alpha-stable law used as the singleton reference.

``psi(xi) = -c_psi |xi|**alpha`` with ``c_psi = 2 k J_alpha`` and
``J_alpha = int_0^inf (1 - cos u) u**(-1-alpha) du`` (by quadrature).
"""
from functools import lru_cache
import math

import numpy as _np
from scipy import interpolate as _interp, special as _special

from .errors import DomainError, NumericError
from .functions import kinks
from .measure import _as_index
from .quadrature import quiet_quad, radial_integral


def j_alpha(alpha):
    """``int_0^inf (1 - cos u) u**(-1-alpha) du``."""
    a = float(alpha)
    if not (0 < a <= 1):
        raise DomainError("alpha must lie in (0, 1]")
    head, _ = quiet_quad(lambda u: 2.0 * math.sin(0.5 * u) ** 2 * u ** (-1.0 - a), 0.0, 1.0,
                              epsabs=0, epsrel=1e-13, limit=200)
    # tail: int_1^inf u^(-1-a) du - int_1^inf cos(u) u^(-1-a) du
    osc, _ = quiet_quad(lambda u: u ** (-1.0 - a), 1.0, _np.inf, weight="cos", wvar=1.0,
                         epsabs=1e-15, limlst=200)
    return head + 1.0 / a - osc


class StableLaw:
    """Symmetric stable law with Levy density ``k |x|**(-1-alpha)``."""

    def __init__(self, k, index, inner_width=1e3):
        if not (k > 0):
            raise DomainError("k must be positive")
        self.k = float(k)
        self.index = _as_index(index)
        self.alpha = self.index.alpha
        self.c_psi = 2.0 * self.k * j_alpha(self.alpha)
        self.inner_width = float(inner_width)

    @classmethod
    def from_c_psi(cls, c_psi, index, **kw):
        a = _as_index(index).alpha
        return cls(c_psi / (2.0 * j_alpha(a)), a, **kw)

    def char_exponent(self, xi):
        xi = _np.abs(_np.asarray(xi, dtype=float))
        return -self.c_psi * xi ** self.alpha

    def char_function(self, xi):
        return _np.exp(self.char_exponent(xi))

    def scaled(self, t):
        """Law of ``t**(1/alpha) zeta`` (exponent multiplied by t)."""
        return StableLaw(self.k * t, self.alpha, self.inner_width)

    # -- density ---------------------------------------------------------
    def _density_point(self, x):
        c, a = self.c_psi, self.alpha
        f = lambda xi: math.exp(-c * xi ** a)
        x = abs(float(x))
        # spectral cut where exp(-c xi^a) < 1e-17
        top = (40.0 / c) ** (1.0 / a)
        if x == 0.0:
            v, _ = quiet_quad(f, 0.0, top, epsabs=0, epsrel=1e-13, limit=400)
            return v / math.pi
        split = min(1.0, top)
        v1, _ = quiet_quad(f, 0.0, split, weight="cos", wvar=x, epsabs=1e-16, epsrel=1e-12, limit=400)
        v2, _ = quiet_quad(f, split, top, weight="cos", wvar=x, epsabs=1e-16, epsrel=1e-12, limit=400)
        return (v1 + v2) / math.pi

    def density(self, x_grid):
        """``p(x) = (1/pi) int_0^inf cos(x xi) exp(-c_psi xi**alpha) d xi``."""
        x = _np.asarray(x_grid, dtype=float)
        return _np.vectorize(self._density_point, otypes=[float])(x)

    def tail_mass(self, L):
        """``P(|zeta| > L) = (2/pi) int sin(L xi) (1 - exp(-c xi**a)) / xi d xi``.

        Past ``X`` with ``c X**a = 40`` the integrand is ``sin(L xi)/xi`` to double
        precision and that piece is closed with the sine integral.
        """
        if not L > 0:
            raise DomainError("L must be positive")
        c, a = self.c_psi, self.alpha
        g = lambda xi: -math.expm1(-c * xi ** a) / xi
        X = (40.0 / c) ** (1.0 / a)
        lo = min(1e-3, 1.0 / L, 0.5 * X)
        head, _ = quiet_quad(lambda xi: math.sin(L * xi) * g(xi), 0.0, lo, epsabs=1e-16,
                             epsrel=1e-13, limit=400)
        edges = _np.geomspace(lo, X, 8 * int(math.log10(X / lo) + 1) + 1)
        body = 0.0
        for p, q in zip(edges[:-1], edges[1:]):
            body += quiet_quad(g, p, q, weight="sin", wvar=L, epsabs=1e-17, epsrel=1e-13, limit=2000)[0]
        far = 0.5 * math.pi - _special.sici(L * X)[0]
        return 2.0 / math.pi * (head + body + far)

    @property
    def spread(self):
        """``sigma`` with ``zeta = sigma * zeta_1`` and ``zeta_1`` of unit ``c_psi``."""
        return self.c_psi ** (1.0 / self.alpha)

    def density_interp(self, x):
        s = self.spread
        return _unit_density(self.alpha, self.inner_width, _np.asarray(x, dtype=float) / s) / s

    def normalization_gap(self):
        return _unit_normalization_gap(self.alpha, self.inner_width)

    def expect(self, phi, breaks=None, check=True):
        """``E[phi(zeta)]``: exact for cosines, else density quadrature plus tail.

        The quadrature runs in the unit-scale variable, so the panels and the
        cached density spline do not depend on ``k``.
        """
        if phi.name.startswith("const("):
            return float(phi.params[0])
        if phi.fourier is not None:
            return float(self.char_function(phi.fourier))
        if check and self.normalization_gap() > 1e-4:
            raise NumericError("density resolution insufficient; refine the frequency grid")
        s = self.spread
        if breaks is None:
            breaks = kinks(phi)
        a, L = self.alpha, self.inner_width
        x, w = _panels(L, tuple(b / s for b in breaks))
        p = _unit_density(a, L, x)
        inner = float(_np.dot(w, (phi(s * x) + phi(-s * x)) * p))
        # beyond L: Levy-type density with mass matched to the exact tail
        mass = _unit_law(a, L).tail_mass(L)
        amp = mass * a * L ** a / 2.0
        h = lambda r: phi(s * r) + phi(-s * r)
        far_breaks = _np.array([b / s for b in breaks if b / s > L])
        tail, _ = radial_integral(h, a, L, 10.0 * L, per_decade=64, tol=1e-12, bound=2.0 * phi.bound,
                                  breaks=far_breaks)
        return inner + amp * tail


@lru_cache(maxsize=None)
def _unit_law(alpha, L):
    return StableLaw.from_c_psi(1.0, alpha, inner_width=L)


@lru_cache(maxsize=None)
def _unit_spline(alpha, L):
    """Unit-scale density on ``[0, L]``: cubic near 0, log-log beyond 2."""
    law = _unit_law(alpha, L)
    xa = _np.linspace(0.0, 2.0, 161)
    xb = _np.geomspace(2.0, L * 1.001, 480)
    pa, pb = law.density(xa), law.density(xb)
    if _np.any(pb <= 0):
        raise NumericError("density inversion lost positivity; widen the frequency cut")
    near = _interp.CubicSpline(xa, pa, bc_type=((1, 0.0), "not-a-knot"))
    far = _interp.CubicSpline(_np.log(xb), _np.log(pb))
    return near, far


def _unit_density(alpha, L, x):
    near, far = _unit_spline(alpha, L)
    x = _np.abs(x)
    with _np.errstate(divide="ignore"):
        return _np.where(x <= 2.0, near(_np.minimum(x, 2.0)), _np.exp(far(_np.log(_np.maximum(x, 2.0)))))


def _panels(L, breaks=()):
    edges = _np.concatenate([[0.0], _np.geomspace(1e-9, 1.0, 46), _np.arange(1.25, L, 0.25), [L],
                             [b for b in breaks if 0 < b < L]])
    edges = _np.unique(edges)
    gx, gw = _np.polynomial.legendre.leggauss(8)
    a, b = edges[:-1], edges[1:]
    x = (0.5 * (b - a)[:, None] * gx[None, :] + 0.5 * (a + b)[:, None]).ravel()
    w = (0.5 * (b - a)[:, None] * gw[None, :]).ravel()
    return x, w


@lru_cache(maxsize=None)
def _unit_normalization_gap(alpha, L):
    x, w = _panels(L)
    inner = 2.0 * float(_np.dot(w, _unit_density(alpha, L, x)))
    return abs(inner + _unit_law(alpha, L).tail_mass(L) - 1.0)


def expect_stable(law, phi):
    return law.expect(phi)


def char_exponent(law, xi):
    return law.char_exponent(xi)


def density(law, x_grid):
    return law.density(x_grid)

"""Log-spaced radial quadrature for power-law kernels.

Integrals ``int_a^inf h(r) r**(-1 - alpha) dr`` are computed decade by
decade in the variable ``t = log r`` with Gauss-Legendre panels.  Each
decade is refined by panel doubling until two resolutions agree, which
resolves oscillatory integrands at large radius.  Beyond the last decade
the remaining kernel mass is multiplied by the kernel-weighted mean of
``h`` over that decade; this is exact for integrands constant at infinity
and negligible for oscillating ones.
"""
import warnings

import numpy as _np
from scipy import integrate as _integrate

from .errors import NumericError

GL_ORDER = 8
_GL_X, _GL_W = _np.polynomial.legendre.leggauss(GL_ORDER)


def quiet_quad(*args, **kw):
    """``scipy.integrate.quad`` without IntegrationWarning; callers own the accuracy check."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        return _integrate.quad(*args, **kw)


def gl_log_nodes(a, b, panels):
    """Nodes and weights for ``int_a^b f(r) dr`` on ``panels`` log-uniform panels."""
    edges = _np.linspace(_np.log(a), _np.log(b), panels + 1)
    half = 0.5 * _np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    r = _np.exp(t)
    return r, w * r


def gl_nodes(a, b, panels):
    """Nodes and weights for ``int_a^b f(x) dx`` on uniform panels."""
    edges = _np.linspace(a, b, panels + 1)
    half = 0.5 * _np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    return x, w


def _taper(tau):
    """C-infinity step from 1 (tau <= 0) to 0 (tau >= 1)."""
    tau = _np.clip(tau, 0.0, 1.0)
    with _np.errstate(divide="ignore"):
        a = _np.where(tau < 1.0, _np.exp(-1.0 / _np.maximum(1.0 - tau, 1e-300)), 0.0)
        b = _np.where(tau > 0.0, _np.exp(-1.0 / _np.maximum(tau, 1e-300)), 0.0)
    return a / (a + b)


def _decade(h, alpha, a, b, panels, tol, max_panels):
    """Adaptive panel doubling on one decade.

    Returns sums ``(int h k, int h k w, int h k q, int k w, int k q)`` where
    ``k`` is the kernel, ``w`` a smooth taper from 1 to 0 across the decade
    and ``q = w (1 - w)`` a smooth bump, plus the panel count used.
    """
    def run(p):
        r, w = gl_log_nodes(a, b, p)
        kw = w * r ** (-1.0 - alpha)
        tau = (_np.log(r) - _np.log(a)) / (_np.log(b) - _np.log(a))
        tw = _taper(tau)
        q = tw * (1.0 - tw)
        hv = h(r) * kw
        return _np.array([hv.sum(), _np.dot(hv, tw), _np.dot(hv, q), _np.dot(kw, tw), _np.dot(kw, q)])

    prev = run(panels)
    p = panels
    while True:
        p2 = 2 * p
        cur = run(p2)
        if _np.all(_np.abs(cur[:3] - prev[:3]) <= _np.maximum(tol, 1e-14 * _np.abs(cur[:3]))):
            return cur, p2
        if p2 >= max_panels:
            raise NumericError("radial quadrature did not converge on a decade",
                               interval=(a, b), last=cur[0], previous=prev[0], panels=p2)
        prev, p = cur, p2


def kernel_mass(alpha, a, b=_np.inf):
    """``int_a^b r**(-1 - alpha) dr``."""
    if _np.isinf(b):
        return a ** (-alpha) / alpha
    return (a ** (-alpha) - b ** (-alpha)) / alpha


def radial_integral(h, alpha, a, cut, per_decade=64, tol=1e-10, max_radius=1e12,
                    max_panels=1 << 17, bound=None, breaks=()):
    """``int_a^inf h(r) r**(-1 - alpha) dr`` for bounded ``h``.

    Full decades run up to ``cut``.  After that, each new decade ``[X, 10X]``
    yields the estimate (sum of earlier decades) + (tapered integral over the
    decade) + (bump-weighted mean of ``h``) * (kernel mass the taper drops).
    The smooth taper makes the truncation error of oscillating integrands
    decay faster than any power of the number of oscillations, and the
    estimate is exact when ``h`` is constant at infinity.  Decades are added
    until two consecutive estimates differ by less than ``tol``.  Interval
    edges also include ``breaks`` (kinks of ``h``).  Returns ``(value, info)``.
    """
    panels = max(1, per_decade // GL_ORDER)
    done = 0.0
    lo = a
    estimates = []
    breaks = sorted(b for b in breaks if b > a)
    cut = max([cut] + breaks)
    max_radius = max(max_radius, 1e3 * cut)
    while True:
        hi = lo * 10.0
        nxt = [b for b in breaks if lo < b < hi]
        if nxt:
            hi = nxt[0]
        sums, _ = _decade(h, alpha, lo, hi, panels, tol / 20.0, max_panels)
        plain, tapered, bumped, kw_taper, kw_bump = sums
        mean = bumped / kw_bump
        dropped = kernel_mass(alpha, lo, hi) - kw_taper + kernel_mass(alpha, hi)
        estimates.append(done + tapered + mean * dropped)
        done += plain
        lo = hi
        if lo >= cut and len(estimates) >= 2 and abs(estimates[-1] - estimates[-2]) < tol:
            break
        if lo >= max_radius:
            raise NumericError("radial tail did not settle", radius=lo,
                               increments=_np.diff(estimates[-4:]).tolist())
    info = {
        "radius": lo,
        "decades": len(estimates),
        "last_increment": abs(estimates[-1] - estimates[-2]),
        "tail_halfwidth": None if bound is None else 2.0 * bound * kernel_mass(alpha, cut),
    }
    return estimates[-1], info

"""Perturbed-Pareto laws with tail coefficient k and index alpha.

For ``x > 0`` the survival function is ``S(x) = (k/alpha + beta(x)) x**-alpha``
and the law is symmetric.  ``ParetoCutoffLaw`` is the exact Pareto law with
cutoff ``c_k = (2k/alpha)**(1/alpha)``; ``CustomLaw`` takes a tabulated
perturbation.  Expectations of hat functions of ``s * W`` (the building
block of the dynamic-programming matrices) are exposed through
``moments3``.
"""
import math

import numpy as _np

from .errors import DomainError, NumericError, ValidationError
from .functions import kinks
from .measure import StableIndex, _as_index
from .quadrature import gl_nodes, quiet_quad, radial_integral

_PROBE = _np.concatenate([_np.geomspace(1e-6, 1e8, 2000), [1e12]])


def _phi_int(b, L):
    """``int_0^L exp(b u) du``."""
    if b == 0.0:
        return L
    return _np.expm1(b * L) / b


def _g1(alpha, L):
    """``int_1^rho (t - 1) t**(-alpha-1) dt`` with ``L = log rho``; series for small L."""
    L = _np.asarray(L, dtype=float)
    out = _phi_int(1.0 - alpha, L) - _phi_int(-alpha, L)
    small = L < 0.1
    if _np.any(small):
        Ls = L[small]
        acc = _np.zeros_like(Ls)
        term = Ls.copy()  # L^n / n!
        for n in range(2, 16):
            term = term * Ls / n
            acc += ((1.0 - alpha) ** (n - 1) - (-alpha) ** (n - 1)) * term
        out = _np.where(small, 0.0, out)
        out[small] = acc
    return out


def _g_sum(alpha, L):
    """``int_1^rho (rho - 1) t**(-alpha-1) dt`` = g1 + g2."""
    return _np.expm1(L) * _phi_int(-alpha, L)


class HeavyTailLaw:
    """Symmetric law with power tail; generic routines use only the survival function."""

    profile = "generic"
    moment_cost = 200

    def __init__(self, k, index):
        if not (k > 0) or not math.isfinite(k):
            raise DomainError(f"k must be positive, got {k!r}")
        self.k = float(k)
        self.index = _as_index(index)
        self.alpha = self.index.alpha
        self.cutoff = (2.0 * self.k / self.alpha) ** (1.0 / self.alpha)

    # -- distribution -------------------------------------------------
    def beta(self, x):
        raise NotImplementedError

    def _sf_formula(self, x):
        with _np.errstate(divide="ignore", invalid="ignore"):
            return (self.k / self.alpha + self.beta(x)) * x ** (-self.alpha)

    def sf(self, x):
        """``P(W > x)`` for ``x >= 0`` (the atom at 0 excluded)."""
        x = _np.asarray(x, dtype=float)
        s = _np.minimum(self._sf_formula(_np.where(x > 0, x, 1e-12)), 0.5)
        return float(s) if s.ndim == 0 else s

    def sf0(self):
        """``P(W > 0)``."""
        return float(self.sf(1e-12))

    @property
    def atom(self):
        return 1.0 - 2.0 * self.sf0()

    def cdf(self, x):
        """Right-continuous distribution function."""
        x = _np.asarray(x, dtype=float)
        ax = _np.abs(x)
        pos = 1.0 - self.sf(ax)
        # for x < 0: P(W <= x) = P(W >= |x|) = S(|x|-) = S(|x|) by continuity off 0
        neg = self.sf(ax)
        out = _np.where(x >= 0, pos, neg)
        out = _np.where(_np.isposinf(x), 1.0, _np.where(_np.isneginf(x), 0.0, out))
        return float(out) if out.ndim == 0 else out

    def pdf(self, x):
        raise NotImplementedError

    def ppf(self, u):
        """Quantile function by bisection on the survival function."""
        u = _np.asarray(u, dtype=float)
        tail = _np.where(u > 0.5, 1.0 - u, u)
        target = tail  # S(x) = tail
        lo = _np.zeros_like(tail)
        hi = _np.full_like(tail, self.cutoff)
        while True:
            grow = self.sf(hi) > target
            if not _np.any(grow):
                break
            hi = _np.where(grow, hi * 4.0, hi)
            if _np.max(hi) > 1e300:
                break
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            right = self.sf(mid) > target
            lo = _np.where(right, mid, lo)
            hi = _np.where(right, hi, mid)
        x = hi
        x = _np.where(target >= self.sf0(), 0.0, x)
        out = _np.where(u > 0.5, x, -x)
        return float(out) if out.ndim == 0 else out

    def sample(self, rng, size=None):
        return self.ppf(rng.random(size))

    # -- validation ---------------------------------------------------
    def validate(self):
        """Check the distribution function on a probe grid; raises ValidationError."""
        s = self.sf(_PROBE)
        if _np.any(s < -1e-15) or _np.any(s > 0.5 + 1e-15):
            raise ValidationError("survival function leaves [0, 1/2]")
        bad = _np.flatnonzero(_np.diff(s) > 1e-13)
        if bad.size:
            raise ValidationError(f"distribution function decreases near x = {_PROBE[bad[0]]:.6g}")
        if s[-1] > 1e-2:
            raise ValidationError("distribution function does not tend to 1")
        return True

    # -- hat-function moments ---------------------------------------
    def moments3(self, p, q, scale, trunc=None):
        """Moments of the continuous part of ``Y = scale * W`` on ``[p, q]``, ``0 <= p <= q``.

        Returns ``(H0, H1, H2)``: mass, ``int (y - p) dG`` and ``int (q - y) dG``.
        Generic version integrates the survival function by parts.
        """
        p = _np.asarray(p, dtype=float)
        q = _np.asarray(q, dtype=float)
        sY = self._sf_scaled(scale, trunc)
        brk = scale * self._breaks(_np.inf if trunc is None else trunc)
        if trunc is not None:
            brk = _np.append(brk, scale * trunc)
        # split every piece at the kinks of the survival function
        edges = _np.concatenate([p[..., None], _np.clip(_np.broadcast_to(brk, p.shape + brk.shape),
                                                        p[..., None], q[..., None]), q[..., None]],
                                axis=-1)
        edges.sort(axis=-1)
        x, w = gl_nodes(0.0, 1.0, 1)
        a, b = edges[..., :-1], edges[..., 1:]
        # geometric sub-panels resolve the power-law decay of S on long pieces
        m = 8
        frac = _np.arange(m + 1) / m
        with _np.errstate(divide="ignore", invalid="ignore"):
            geo = a[..., None] * (b / a)[..., None] ** frac
        lin = a[..., None] + (b - a)[..., None] * frac
        sub = _np.where((a > 0)[..., None], geo, lin)
        sa, sb = sub[..., :-1], sub[..., 1:]
        pts = sa[..., None] + (sb - sa)[..., None] * x
        integral = _np.sum((sb - sa) * _np.sum(sY(pts) * w, axis=-1), axis=(-2, -1))
        width = q - p
        sp, sq = sY(p), sY(q)
        h0 = _np.maximum(sp - sq, 0.0)
        h1 = _np.maximum(integral - width * sq, 0.0)
        h2 = _np.maximum(width * sp - integral, 0.0)
        return h0, h1, h2

    def _sf_scaled(self, scale, trunc):
        cut = None if trunc is None else float(self.sf(trunc))

        def sY(y):
            y = _np.asarray(y, dtype=float)
            out = self.sf(y / scale)
            if cut is not None:
                out = _np.where(y < scale * trunc, out - cut, 0.0)
            return out
        return sY

    def tail_prob(self, t, scale, trunc=None):
        """``P(Y > t)`` for the continuous part of ``Y = scale * W``, ``t >= 0``."""
        return self._sf_scaled(scale, trunc)(t)

    def atom_mass(self, trunc=None):
        extra = 0.0 if trunc is None else 2.0 * float(self.sf(trunc))
        return self.atom + extra

    # -- expectations -------------------------------------------------
    def expect(self, f, tol=1e-8, per_decade=64, info=False):
        """``E[f(W)]`` for bounded f by log-spaced quadrature against the density."""
        lo = self._support_start()
        rho = self._radial_density

        def h(r):
            return (f(r) + f(-r)) * rho(r)

        brk = _np.concatenate([self._breaks(_np.inf), kinks(f)])
        val, meta = radial_integral(h, self.alpha, lo, max(10.0 * lo, 1e3), per_decade=per_decade,
                                    tol=tol, breaks=brk)
        val += self.atom * float(f(0.0))
        meta["tail_bound"] = f.bound * 2.0 * float(self.sf(meta["radius"]))
        return (val, meta) if info else val

    def _support_start(self):
        """Smallest x with S(x) < 1/2 (within bisection accuracy)."""
        lo, hi = 0.0, self.cutoff
        while self.sf(hi) >= 0.5:
            hi *= 2.0
        if self.sf(1e-12) < 0.5:
            return 1e-12
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.sf(mid) >= 0.5:
                lo = mid
            else:
                hi = mid
        return lo if lo > 0 else 1e-12

    def _radial_density(self, r):
        """Density times ``r**(1+alpha)``."""
        return self.pdf(r) * r ** (1.0 + self.alpha)

    # -- truncated moments -------------------------------------------
    def _check_trunc(self, N):
        if not (N >= self.cutoff * (1 - 1e-14)):
            raise DomainError(f"truncation level {N} below the cutoff {self.cutoff}")

    def truncated_second_moment(self, N, method="auto"):
        """``E|W 1{|W| <= N}|**2``."""
        self._check_trunc(N)
        # E = -2 N^2 S(N) + 4 int_0^N x S(x) dx  (S of the continuous part)
        pts = _np.unique(_np.concatenate([[0.0], self._breaks(N), [N]]))
        acc = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            v, _ = quiet_quad(lambda x: x * float(self.sf(x)), a, b, epsabs=0, epsrel=1e-13,
                                   limit=200)
            acc += v
        return float(-2.0 * N * N * self.sf(N) + 4.0 * acc)

    def excess_delta_moment(self, N, delta, method="auto"):
        """``E|W - W 1{|W| <= N}|**delta`` for ``0 < delta < alpha``."""
        self._check_trunc(N)
        if not (0 < delta < self.alpha):
            raise DomainError("need 0 < delta < alpha")
        # 2 N^d S(N) + 2 d int_N^inf x^(d-1) S(x) dx with S = (k/a) x^-a + R; the power part
        # is exact and the remainder R = beta x^-a decays, integrated in t = log x
        a, k = self.alpha, self.k
        core = (k / a) * N ** (delta - a) / (a - delta)
        rem = lambda t: math.exp(t * delta) * (float(self.sf(math.exp(t))) - (k / a) * math.exp(-a * t))
        t0 = math.log(N)
        brk = [math.log(b) for b in self._breaks(_np.inf) if b > N]
        t1 = max([t0 + 1.0] + [b + 1.0 for b in brk])
        v1, _ = quiet_quad(rem, t0, t1, points=brk or None, epsabs=0, epsrel=1e-13, limit=400)
        v2, _ = quiet_quad(rem, t1, max(t1, 690.0), epsabs=1e-15 * (1.0 + core), epsrel=1e-13, limit=400)
        return float(2.0 * N ** delta * self.sf(N) + 2.0 * delta * (core + v1 + v2))

    def _breaks(self, N):
        return _np.array([])

    # -- decay quantities ----------------------------------------------
    def decay_quantities(self, n, delta):
        """The three perturbation quantities at scale ``n**(1/alpha)``."""
        a = self.alpha
        y = float(n) ** (1.0 / a)
        b = lambda x: abs(float(self.beta(_np.asarray(x))))
        q1 = b(y)
        q2, _ = quiet_quad(lambda x: b(y * x) * x ** (-(1 + a - delta)), 1.0, _np.inf, limit=400)
        if a == 1.0 and b(1e-300) > 0:
            q3 = _np.inf
        else:
            brk = [p / y for p in self._breaks(_np.inf) if 0 < p / y < 1]
            q3, _ = quiet_quad(lambda x: b(y * x) * x ** (-a), 0.0, 1.0, points=brk or None,
                                    limit=400)
        return q1, q2, q3


class ParetoCutoffLaw(HeavyTailLaw):
    """Exact Pareto law: density ``k |x|**(-alpha-1)`` on ``|x| >= c_k``."""

    profile = "pareto_cutoff"

    def beta(self, x):
        x = _np.asarray(x, dtype=float)
        a = self.alpha
        out = _np.where(x < self.cutoff, _np.abs(x) ** a / 2.0 - self.k / a, 0.0)
        return float(out) if out.ndim == 0 else out

    def sf(self, x):
        x = _np.asarray(x, dtype=float)
        c = self.cutoff
        with _np.errstate(divide="ignore"):
            s = 0.5 * (_np.maximum(x, c) / c) ** (-self.alpha)
        return float(s) if s.ndim == 0 else s

    def sf0(self):
        return 0.5

    @property
    def atom(self):
        return 0.0

    def pdf(self, x):
        x = _np.abs(_np.asarray(x, dtype=float))
        with _np.errstate(divide="ignore"):
            out = _np.where(x >= self.cutoff, self.k * x ** (-self.alpha - 1.0), 0.0)
        return float(out) if out.ndim == 0 else out

    def ppf(self, u):
        u = _np.asarray(u, dtype=float)
        a, c = self.alpha, self.cutoff
        with _np.errstate(divide="ignore"):
            up = c * (2.0 * (1.0 - u)) ** (-1.0 / a)
            dn = -c * (2.0 * u) ** (-1.0 / a)
        out = _np.where(u > 0.5, up, _np.where(u < 0.5, dn, 0.0))
        return float(out) if out.ndim == 0 else out

    def _support_start(self):
        return self.cutoff

    def _radial_density(self, r):
        return _np.full(_np.shape(r), self.k)

    def moments3(self, p, q, scale, trunc=None):
        """Closed-form moments on ``[p, q]`` of ``Y = scale * W`` (density ``K y**(-a-1)`` on ``[scale c, scale N]``)."""
        a = self.alpha
        p = _np.asarray(p, dtype=float)
        q = _np.asarray(q, dtype=float)
        K = self.k * scale ** a
        lo = scale * self.cutoff
        hi = _np.inf if trunc is None else scale * trunc
        pp = _np.maximum(p, lo)
        qq = _np.minimum(q, hi)
        live = qq > pp
        pp = _np.where(live, pp, 1.0)
        qq = _np.where(live, qq, 2.0)
        L = _np.log(qq / pp)
        h0 = K * pp ** (-a) * (-_np.expm1(-a * L)) / a
        base = K * pp ** (1.0 - a)
        g1 = _g1(a, L)
        g2 = _np.maximum(_g_sum(a, L) - g1, 0.0)
        h1 = base * g1 + (pp - p) * h0
        h2 = base * g2 + (q - qq) * h0
        zero = _np.zeros_like(h0)
        return _np.where(live, h0, zero), _np.where(live, h1, zero), _np.where(live, h2, zero)

    def tail_prob(self, t, scale, trunc=None):
        a = self.alpha
        t = _np.asarray(t, dtype=float)
        K = self.k * scale ** a
        lo = scale * self.cutoff
        s = K * _np.maximum(t, lo) ** (-a) / a
        if trunc is not None:
            hi = scale * trunc
            s = _np.where(t < hi, s - K * hi ** (-a) / a, 0.0)
        return s

    def atom_mass(self, trunc=None):
        return 0.0 if trunc is None else 2.0 * float(self.sf(trunc))

    def truncated_second_moment(self, N, method="auto"):
        if method == "quadrature":
            return super().truncated_second_moment(N)
        self._check_trunc(N)
        a, c = self.alpha, self.cutoff
        N = max(N, c)
        return a * c ** a / (2.0 - a) * (N ** (2.0 - a) - c ** (2.0 - a))

    def excess_delta_moment(self, N, delta, method="auto"):
        if method == "quadrature":
            return super().excess_delta_moment(N, delta)
        self._check_trunc(N)
        if not (0 < delta < self.alpha):
            raise DomainError("need 0 < delta < alpha")
        a, c = self.alpha, self.cutoff
        return a * c ** a / (a - delta) * max(N, c) ** (delta - a)

    def capped_moment(self, delta, cap):
        """``E[min(|W|**delta, cap)]`` in closed form."""
        a, c, k = self.alpha, self.cutoff, self.k
        if not (0 < delta < a):
            raise DomainError("need 0 < delta < alpha")
        N = cap ** (1.0 / delta)
        if N <= c:
            return float(cap)
        return 2.0 * k / (a - delta) * (c ** (delta - a) - (delta / a) * N ** (delta - a))

    def _breaks(self, N):
        return _np.array([self.cutoff])

    def decay_quantities(self, n, delta):
        a, c = self.alpha, self.cutoff
        y = float(n) ** (1.0 / a)
        if y >= c:
            q3 = _np.inf if a == 1.0 else c * a / (2.0 * (1.0 - a)) * y ** (a - 1.0)
            return 0.0, 0.0, q3
        return super().decay_quantities(n, delta)


class CustomLaw(HeavyTailLaw):
    """Law with a tabulated perturbation.

    ``beta`` interpolates the knots linearly and decays like
    ``(x_last / x)**gamma`` past the last knot.  It is capped by
    ``x**alpha / 2 - k / alpha`` so that ``S(x) <= 1/2`` (the Pareto core
    near the origin).
    """

    profile = "custom"

    def __init__(self, k, index, knots, values, gamma=1.0, C=1.0, validate=True):
        super().__init__(k, index)
        self.knots = _np.asarray(knots, dtype=float)
        self.values = _np.asarray(values, dtype=float)
        if self.knots.ndim != 1 or self.knots.size != self.values.size or self.knots.size < 2:
            raise ValidationError("need matching knot and value arrays of length >= 2")
        if _np.any(_np.diff(self.knots) <= 0) or self.knots[0] < 0:
            raise ValidationError("knots must be nonnegative and increasing")
        self.gamma = float(gamma)
        self.C = float(C)
        if self.gamma < 0 or self.C <= 0:
            raise ValidationError("need gamma >= 0 and C > 0")
        if self.values[-1] != 0 and self.gamma == 0:
            raise ValidationError("beta must tend to 0: use gamma > 0 or a zero last knot")
        if validate:
            self.validate()

    def raw_beta(self, x):
        x = _np.asarray(x, dtype=float)
        xl, bl = self.knots[-1], self.values[-1]
        inner = _np.interp(x, self.knots, self.values)
        with _np.errstate(divide="ignore"):
            outer = bl * (xl / _np.maximum(x, xl)) ** self.gamma
        return _np.where(x <= xl, inner, outer)

    def raw_beta_slope(self, x):
        x = _np.asarray(x, dtype=float)
        xs, vs = self.knots, self.values
        idx = _np.clip(_np.searchsorted(xs, x, side="right") - 1, 0, xs.size - 2)
        slope = (vs[idx + 1] - vs[idx]) / (xs[idx + 1] - xs[idx])
        slope = _np.where(x < xs[0], 0.0, slope)
        xl, bl = xs[-1], vs[-1]
        with _np.errstate(divide="ignore", invalid="ignore"):
            outer = -self.gamma * bl * xl ** self.gamma * x ** (-self.gamma - 1.0)
        return _np.where(x <= xl, slope, outer)

    def beta(self, x):
        x = _np.asarray(x, dtype=float)
        a = self.alpha
        core = _np.abs(x) ** a / 2.0 - self.k / a
        out = _np.minimum(self.raw_beta(_np.abs(x)), core)
        return float(out) if out.ndim == 0 else out

    def _sf_formula(self, x):
        # min((k/a + raw) x^-a, 1/2) equals the capped form without cancellation
        with _np.errstate(divide="ignore", invalid="ignore"):
            return _np.minimum((self.k / self.alpha + self.raw_beta(x)) * x ** (-self.alpha), 0.5)

    def pdf(self, x):
        x = _np.abs(_np.asarray(x, dtype=float))
        a = self.alpha
        core = x ** a / 2.0 - self.k / a
        raw = self.raw_beta(x)
        capped = raw >= core
        with _np.errstate(divide="ignore", invalid="ignore"):
            dens = a * (self.k / a + raw) * x ** (-a - 1.0) - self.raw_beta_slope(x) * x ** (-a)
        out = _np.where(capped | (x <= 0), 0.0, dens)
        return float(out) if out.ndim == 0 else out

    def _breaks(self, N):
        if not hasattr(self, "_start"):
            self._start = self._support_start()
        pts = _np.append(self.knots, self._start)
        return _np.unique(pts[(pts > 0) & (pts < N)])

    def decay_violations(self, probe=None):
        """Probe points where ``|beta(x)| > C / |x|**gamma``."""
        x = _PROBE if probe is None else _np.asarray(probe, dtype=float)
        b = _np.abs(self.raw_beta(x))
        lim = self.C / x ** self.gamma
        return x[b > lim * (1 + 1e-12)]


def make_pareto_cutoff(k, index):
    """Pareto law with cutoff ``c_k = (2k/alpha)**(1/alpha)``."""
    return ParetoCutoffLaw(k, index)


def make_custom(k, index, knots, values, gamma=1.0, C=1.0):
    return CustomLaw(k, index, knots, values, gamma, C)


def make_law(k, index, profile="pareto_cutoff", **custom):
    if profile == "pareto_cutoff":
        return make_pareto_cutoff(k, index)
    if profile == "custom":
        return make_custom(k, index, **custom)
    raise ValidationError(f"unknown profile {profile!r}")


def cdf(law, x):
    return law.cdf(x)


def sample(law, rng, size=None):
    return law.sample(rng, size)


def expect(law, f, tol=1e-8):
    return law.expect(f, tol)


def truncated_second_moment(law, N):
    return law.truncated_second_moment(N)


def excess_delta_moment(law, N, delta):
    return law.excess_delta_moment(N, delta)

"""Dynamic-programming approximation of the robust stable limit.

One step maps a grid function ``u`` to
``z -> sup_k E_k[u(z + n**(-1/alpha) W)]`` where ``u`` is interpolated
linearly.  Expectations of the interpolant are exact: each law supplies
closed-form (or survival-function) moments of hat functions, assembled
into one matrix per ``k`` and cached.
"""
from dataclasses import dataclass, field
import time

import numpy as _np

from .errors import DomainError, NumericError, ValidationError
from .functions import SampledFunction, capped_pow
from .grid import GridFunction, GridSpec, hat_matrix
from .measure import sup_spherical
from .operator import QuadratureSpec, sym_values
from .quadrature import gl_log_nodes, radial_integral
from .sublinear import LawFamily, _GOLD, family_i1, family_i2, maximize_k

_ROW_TOL = 1e-10


@dataclass
class DpResult:
    n: int
    value_at_origin: float
    profile: GridFunction
    runtime: float
    diagnostics: dict = field(default_factory=dict)
    layers: _np.ndarray = None   # layers[m] = u_n(m / n, nodes) when requested


class DpEngine:
    """Caches hat matrices per (k, scale, truncation) for one grid.

    The grid and every law are symmetric, so ``W[P-1-i] = W[i][::-1]``: only
    rows up to the origin are stored, and a node right of the origin is
    evaluated with its mirror row against the reflected data.  Symmetric data
    then stay bitwise symmetric under any number of steps.
    """

    def __init__(self, family, grid, tol=1e-6):
        self.family = family
        self.grid = grid
        self.nodes = grid.nodes()
        self.mid = (self.nodes.size - 1) // 2
        self.tol = tol
        self._mats = {}
        self.refined = 0
        self.max_row_error = 0.0

    def matrix(self, k, scale, trunc=None):
        """Rows ``0 .. mid`` of the hat matrix."""
        key = (float(k), float(scale), trunc)
        W = self._mats.get(key)
        if W is None:
            W = hat_matrix(self.nodes, self.family.law(k), scale, trunc, rows=_np.arange(self.mid + 1))
            err = _np.abs(W.sum(axis=1) - 1.0)
            bad = int(_np.argmax(err))
            if err[bad] > _ROW_TOL:
                raise NumericError("hat weights lost normalization", node=bad, k=k,
                                   error=float(err[bad]))
            self.max_row_error = max(self.max_row_error, float(err[bad]))
            self._mats[key] = W
        return W

    def _apply(self, W, values):
        A = W @ _np.column_stack([values, values[::-1]])
        return _np.concatenate([A[:, 0], A[-2::-1, 1]])

    def step(self, values, n, trunc=None):
        scale = float(n) ** (-1.0 / self.family.alpha)
        ks = self.family.grid()
        V = _np.stack([self._apply(self.matrix(k, scale, trunc), values) for k in ks])
        j = _np.argmax(V, axis=0)
        out = V[j, _np.arange(values.size)]
        if ks.size > 1:
            out = self._refine(values, V, j, out, ks, scale, trunc)
        return out

    def _refine(self, values, V, j, out, ks, scale, trunc):
        """Golden section in k for nodes whose grid maximum is interior and not flat."""
        interior = (j > 0) & (j < ks.size - 1)
        idx = _np.flatnonzero(interior)
        if idx.size:
            nb = _np.stack([V[j[idx] - 1, idx], V[j[idx] + 1, idx]])
            spread = out[idx] - nb.min(axis=0)
            idx = idx[spread > 1e-15 * (1.0 + _np.abs(out[idx]))]
        if idx.size == 0:
            return out
        self.refined += idx.size
        a = ks[j[idx] - 1].astype(float)
        b = ks[j[idx] + 1].astype(float)

        last = values.size - 1
        right = idx > self.mid
        rows_all = _np.where(right, last - idx, idx)
        data_all = _np.where(right[:, None], values[::-1][None, :], values[None, :])

        def ev(kv):
            # one row per node, each with its own k; right half via mirror rows.
            # Row-wise reductions keep the result independent of the row's position.
            res = _np.empty(idx.size)
            for val in _np.unique(kv):
                sel = kv == val
                W = hat_matrix(self.nodes, self.family.law(val), scale, trunc, rows=rows_all[sel])
                res[sel] = _np.sum(W * data_all[sel], axis=1)
            return res

        c = b - _GOLD * (b - a)
        d = a + _GOLD * (b - a)
        fc, fd = ev(c), ev(d)
        while _np.max(b - a) > self.tol:
            left = fc >= fd
            b = _np.where(left, d, b)
            a = _np.where(left, a, c)
            nc = _np.where(left, b - _GOLD * (b - a), d)
            nd = _np.where(left, c, a + _GOLD * (b - a))
            fnew = ev(_np.where(left, nc, nd))
            fc, fd = _np.where(left, fnew, fd), _np.where(left, fc, fnew)
            c, d = nc, nd
        best = _np.maximum(fc, fd)
        out = out.copy()
        out[idx] = _np.maximum(out[idx], best)
        return out


def _initial(phi, grid):
    return GridFunction.sample(grid, phi)


def dp_step(u, family, n, tol=1e-6, engine=None, trunc=None):
    """One application of the scheme to the grid function ``u``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    eng = engine or DpEngine(family, u.spec, tol)
    return GridFunction(u.spec, eng.step(u.values, n, trunc), u.nodes)


def _run(phi, family, n, grid, tol, trunc, keep_layers, engine=None):
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    t0 = time.perf_counter()
    eng = engine or DpEngine(family, grid, tol)
    u = _initial(phi, grid)
    vals = u.values
    layers = [vals] if keep_layers else None
    for _ in range(int(n)):
        vals = eng.step(vals, int(n), trunc)
        if keep_layers:
            layers.append(vals)
    prof = GridFunction(grid, vals, u.nodes)
    diag = {"refined_nodes": eng.refined, "max_row_error": eng.max_row_error,
            "nodes": u.nodes.size, "k_grid": family.grid().size}
    return DpResult(int(n), prof.at_origin, prof, time.perf_counter() - t0, diag,
                    _np.asarray(layers) if keep_layers else None)


def run_clt(phi, family, n, grid=GridSpec(), tol=1e-6, keep_layers=False, engine=None):
    """``u_n(1, .)`` of the scheme started from ``phi``."""
    return _run(phi, family, n, grid, tol, None, keep_layers, engine)


def run_truncated(phi, family, n, N, grid=GridSpec(), tol=1e-6, keep_layers=False):
    """Scheme driven by ``W 1{|W| <= N}`` (excess mass sits at 0)."""
    cmax = family.law(family.k_hi).cutoff
    if not (N >= cmax * (1 - 1e-14)):
        raise DomainError(f"truncation level {N} below the largest cutoff {cmax}")
    return _run(phi, family, n, grid, tol, float(N), keep_layers)


def moment_statistic(family, n_list, delta, cap, grid=GridSpec(), tol=1e-6, cap_factors=(1, 2, 4)):
    """Capped delta-moments of the normalized sums, ``{cap: [(n, value), ...]}``."""
    if not (0 < delta < family.alpha):
        raise DomainError("need 0 < delta < alpha")
    if cap <= 0:
        raise DomainError("cap must be positive")
    out = {}
    for f in cap_factors:
        m = cap * f
        phi = capped_pow(delta, m)
        out[m] = [(int(n), run_clt(phi, family, n, grid, tol).value_at_origin) for n in n_list]
    return out


def regularity_bound(family, n, delta):
    """``I_n = I_1^(delta/2) + I_2`` at ``N = n**(1/alpha)``."""
    N = float(n) ** (1.0 / family.alpha)
    return family_i1(family, N) ** (delta / 2.0) + family_i2(family, N, delta)


def regularity_check(family, n, delta, cap, grid=GridSpec(), tol=1e-6):
    """Largest ratio of ``|u_n(t,x) - u_n(s,x)|`` to its bound over all grid times and nodes."""
    res = run_clt(capped_pow(delta, cap), family, n, grid, tol, keep_layers=True)
    U = res.layers
    In = regularity_bound(family, n, delta)
    t = _np.arange(n + 1) / n
    worst = 0.0
    for i in range(n + 1):
        diff = _np.max(_np.abs(U[i + 1:] - U[i]), axis=1) if i < n else _np.zeros(0)
        bound = In * (_np.abs(t[i + 1:] - t[i]) ** (delta / 2.0) + float(n) ** (-delta / 2.0))
        if diff.size:
            worst = max(worst, float(_np.max(diff / bound)))
    return {"n": n, "I_n": In, "worst_ratio": worst, "holds": worst <= 1.0}


def truncation_check(family, n, N, delta, cap, grid=GridSpec(), tol=1e-6):
    """Largest ratio of ``|u_n - u_{n,N}|`` to ``I_2 N^(delta-alpha) n^((alpha-delta)/alpha) (k/n)``."""
    a = family.alpha
    phi = capped_pow(delta, cap)
    full = run_clt(phi, family, n, grid, tol, keep_layers=True).layers
    trunc = run_truncated(phi, family, n, N, grid, tol, keep_layers=True).layers
    i2 = family_i2(family, N, delta)
    steps = _np.arange(1, n + 1)
    bound = i2 * N ** (delta - a) * float(n) ** ((a - delta) / a) * steps / n
    gaps = _np.max(_np.abs(full[1:] - trunc[1:]), axis=1)
    worst = float(_np.max(gaps / bound))
    return {"n": n, "N": N, "I_2": i2, "worst_ratio": worst, "holds": worst <= 1.0,
            "max_gap": float(gaps.max())}


# -- consistency residual --------------------------------------------------

def _second_difference_integral(phi, x, upper, alpha, switch=1e-3):
    """``int_0^upper (phi(x+r) + phi(x-r) - 2 phi(x)) r**(-1-alpha) dr``.

    Below ``switch`` the even Taylor series (exact derivatives) is used; the
    second difference itself is not resolvable in floating point there.
    """
    a = alpha
    r0 = min(upper, switch)
    total = 0.0
    if phi.derivative is not None:
        coef = {2: 1.0, 4: 1.0 / 12.0, 6: 1.0 / 360.0, 8: 1.0 / 20160.0}
        for m, cf in coef.items():
            total += cf * float(phi.deriv(x, m)) * r0 ** (m - a) / (m - a)
    else:
        r, w = gl_log_nodes(max(r0 * 1e-6, 1e-300), r0, 8)
        d = phi(x + r) + phi(x - r) - 2.0 * phi(x)
        total += float(_np.dot(w, d * r ** (-1.0 - a)))
    if upper > r0:
        r, w = gl_log_nodes(r0, upper, max(8, int(8 * _np.log10(upper / r0)) + 8))
        d = phi(x + r) + phi(x - r) - 2.0 * phi(x)
        total += float(_np.dot(w, d * r ** (-1.0 - a)))
    return total


def _perturbation(law, phi, x, b, quad):
    """``int D(r) r**(-1-alpha) rho(r/b) dr`` with ``rho = alpha beta - beta' w``."""
    a = law.alpha
    if law.profile == "pareto_cutoff":
        # rho = -k on (0, c), 0 beyond
        return -law.k * _second_difference_integral(phi, x, b * law.cutoff, a)
    fx = float(phi(x))
    eps = 1e-6 * b * law._support_start()

    def rho(w):
        bw = law.beta(w)
        core = w ** a / 2.0 - law.k / a
        slope = _np.where(law.raw_beta(w) >= core, a / 2.0 * w ** (a - 1.0), law.raw_beta_slope(w))
        return a * bw - slope * w

    def h(r):
        return (phi(x + r) + phi(x - r) - 2.0 * fx) * rho(r / b)

    small = _second_difference_integral(phi, x, eps, a) * float(rho(_np.array(eps / b)))
    val, _ = radial_integral(h, a, eps, max(quad.outer_cut, 10 * eps), per_decade=quad.nodes_per_decade,
                             tol=quad.tol * 1e-4, breaks=b * law._breaks(_np.inf))
    return small + val


def consistency_residual(phi, family, s_list, x_grid, uset=None, quad=QuadratureSpec(), tol=1e-9):
    """``[(s, l(s))]`` with ``l(s) = sup_x |E^[phi(x + s^(1/alpha) W) - phi(x)]/s - G(x)|``.

    ``G(x)`` is the band generator (band matched to the family).  For each
    ``k`` the normalized one-step increment is evaluated as
    ``2k gbar(x) + P_k(x)``: the change of variables ``y = s^(1/alpha) w``
    turns the law of ``s^(1/alpha) W`` into ``s`` times the stable kernel
    plus a perturbation term ``P_k`` carried by ``beta``.  Subtracting two
    separately computed O(s) quadratures could not resolve residuals of
    order ``s^(2/alpha - 1)``.
    """
    s_list = [float(s) for s in s_list]
    if any(s <= 0 for s in s_list) or any(b >= a for a, b in zip(s_list, s_list[1:])):
        raise DomainError("s_list must be positive and strictly decreasing")
    uset = uset or family.uncertainty_set()
    if abs(uset.mass_lo - 2 * family.k_lo) > 1e-14 or abs(uset.mass_hi - 2 * family.k_hi) > 1e-14:
        raise ValidationError("uncertainty band must equal [2 k_lo, 2 k_hi]")
    a = family.alpha
    xs = _np.atleast_1d(_np.asarray(x_grid, dtype=float))
    gbar = {float(x): float(sym_values(phi, x, uset, quad)[0]) for x in xs}
    gen = {x: sup_spherical([g, g], uset)[0] for x, g in gbar.items()}
    out = []
    for s in s_list:
        b = s ** (1.0 / a)
        worst = 0.0
        for x in xs:
            x = float(x)
            fun = lambda k: 2.0 * k * gbar[x] + _perturbation(family.law(k), phi, x, b, quad)
            val, _ = maximize_k(fun, family, tol=1e-8)
            worst = max(worst, abs(val - gen[x]))
        out.append((s, worst))
    return out


def consistency_residual_direct(phi, family, s, x_grid, uset=None, quad=QuadratureSpec(),
                                qtol=1e-13):
    """Same residual by direct quadrature of the one-step increment (moderate s only)."""
    uset = uset or family.uncertainty_set()
    a = family.alpha
    b = float(s) ** (1.0 / a)
    worst = 0.0
    for x in _np.atleast_1d(x_grid):
        x = float(x)
        fx = float(phi(x))
        inc = SampledFunction(lambda w, x=x, fx=fx: phi(x + b * w) - fx, 2 * phi.bound)
        val, _ = maximize_k(lambda k: family.law(k).expect(inc, tol=qtol) / s, family, tol=1e-8)
        g = sup_spherical(sym_values(phi, x, uset, quad), uset)[0]
        worst = max(worst, abs(val - g))
    return worst


def one_step_gap(phi, family, s, x, n_list, grid=GridSpec(), quad=QuadratureSpec(), tol=1e-6):
    """``|u_n(s, x) - phi(x) - s G(x)|`` for each n with ``s n`` integral."""
    uset = family.uncertainty_set()
    g = sup_spherical(sym_values(phi, x, uset, quad), uset)[0]
    rows = []
    for n in n_list:
        m = int(round(s * n))
        if abs(m - s * n) > 1e-9:
            raise DomainError("s * n must be an integer")
        eng = DpEngine(family, grid, tol)
        vals = GridFunction.sample(grid, phi).values
        for _ in range(m):
            vals = eng.step(vals, n)
        u = float(_np.interp(x, grid.nodes(), vals))
        rows.append((int(n), abs(u - float(phi(x)) - s * g)))
    return rows

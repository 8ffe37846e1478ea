"""Explicit monotone solver for the robust stable PIDE.

The nonlocal operator is applied to the piecewise-linear interpolant of
the current layer.  Jumps with ``|y| >= eps`` are integrated exactly
against hat functions (one dense matrix, built once); jumps below
``eps`` contribute ``m2(eps) u'' / 2`` with the three-point second
difference on the (possibly non-uniform) grid.
"""
from dataclasses import dataclass, field
import math
import time

import numpy as _np

from .errors import DomainError, NumericError, ValidationError
from .functions import SampledFunction
from .grid import GridFunction, GridSpec, hat_matrix
from .laws import ParetoCutoffLaw
from .measure import UncertaintySet, sup_spherical
from .operator import QuadratureSpec, sym_values


def cfl_bound(uset, epsilon):
    """Largest dt with ``dt * 2 * mass_hi * eps**(-alpha) / alpha <= 1``."""
    a = uset.alpha
    return a * epsilon ** a / (2.0 * uset.mass_hi)


@dataclass
class SolverSpec:
    grid: GridSpec = field(default_factory=GridSpec)
    dt: object = "auto"
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    T: float = 1.0
    safety: float = 0.9

    def __post_init__(self):
        if not (0.0 < self.T <= 1.0):
            raise ValidationError("T must lie in (0, 1]")
        if not (0.0 < self.safety <= 1.0):
            raise ValidationError("safety factor must lie in (0, 1]")
        if self.dt != "auto":
            self.dt = float(self.dt)
            if not self.dt > 0:
                raise ValidationError("dt must be positive")

    def resolve_dt(self, uset, horizon=None, grain=64):
        """Step for ``uset`` dividing ``horizon / grain`` (default T); checks the CFL bound.

        The grain keeps the geometric snapshots ``T 2**-j`` on the time grid.
        """
        horizon = self.T if horizon is None else horizon
        lim = cfl_bound(uset, self.quad.epsilon)
        lim_diff = self._diffusion_limit(uset)
        if self.dt == "auto":
            target = self.safety * min(lim, lim_diff)
            unit = horizon / grain
            return unit / math.ceil(unit / target - 1e-12)
        dt = self.dt
        if dt > lim * (1 + 1e-12) or dt > lim_diff * (1 + 1e-12):
            raise ValidationError(f"dt={dt:g} violates the CFL bound {min(lim, lim_diff):g}")
        m = horizon / dt
        if abs(m - round(m)) > 1e-12 * max(1.0, m):
            raise ValidationError(f"dt={dt:g} does not divide {horizon:g}")
        return dt

    def _diffusion_limit(self, uset):
        # explicit diffusion with coefficient mass * m2 / 2 on the finest spacing
        a, eps = uset.alpha, self.quad.epsilon
        h = self.grid.spacing
        coef = uset.mass_hi * eps ** (2.0 - a) / (2.0 - a) / 2.0
        jump = 2.0 * uset.mass_hi * eps ** (-a) / a
        return 1.0 / (jump + 2.0 * coef / h ** 2)

    def to_dict(self):
        return {"grid": self.grid.to_dict(), "dt": self.dt, "quad": self.quad.to_dict(),
                "T": self.T, "safety": self.safety}

    @classmethod
    def from_dict(cls, d):
        return cls(GridSpec.from_dict(d["grid"]), d.get("dt", "auto"),
                   QuadratureSpec.from_dict(d["quad"]), float(d.get("T", 1.0)),
                   float(d.get("safety", 0.9)))


@dataclass
class PideSolution:
    times: list
    layers: list
    dt: float
    runtime: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    def layer_at(self, t):
        i = int(_np.argmin(_np.abs(_np.asarray(self.times) - t)))
        if abs(self.times[i] - t) > 1e-12:
            raise DomainError(f"no snapshot at t={t}")
        return self.layers[i]

    def value_at(self, t, x):
        """Linear interpolation in x, and in t between neighbouring snapshots."""
        ts = _np.asarray(self.times)
        if not (ts[0] - 1e-12 <= t <= ts[-1] + 1e-12):
            raise DomainError("t outside the stored range")
        j = int(_np.clip(_np.searchsorted(ts, t), 1, ts.size - 1))
        t0, t1 = ts[j - 1], ts[j]
        v0, v1 = self.layers[j - 1](x), self.layers[j](x)
        w = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
        return (1 - w) * v0 + w * v1

    @property
    def final(self):
        return self.layers[-1]


class GeneratorMatrix:
    """Unit-mass generator on a fixed grid: ``G u + diffusion(u)``."""

    def __init__(self, grid, alpha, epsilon):
        self.grid = grid
        self.nodes = grid.nodes()
        a = float(alpha)
        self.alpha = a
        self.epsilon = float(epsilon)
        # (1/2)|y|^(-1-a) on |y| >= eps is rate * (Pareto law with cutoff eps)
        rate = self.epsilon ** (-a) / a
        law = ParetoCutoffLaw(a * self.epsilon ** a / 2.0, a)
        M = hat_matrix(self.nodes, law, 1.0)
        err = _np.abs(M.sum(axis=1) - 1.0)
        if err.max() > 1e-10:
            bad = int(_np.argmax(err))
            raise NumericError("jump weights lost normalization", node=bad, error=float(err[bad]))
        d = _np.diag(M).copy()
        M *= rate
        M[_np.diag_indices_from(M)] = rate * (d - 1.0)
        self.G = M
        self.m2 = self.epsilon ** (2.0 - a) / (2.0 - a)
        x = self.nodes
        hl = _np.diff(x)[:-1]
        hr = _np.diff(x)[1:]
        self._cl = 2.0 / (hl * (hl + hr))
        self._cr = 2.0 / (hr * (hl + hr))

    def apply(self, u):
        g = self.G @ u
        d2 = _np.zeros_like(u)
        d2[1:-1] = self._cr * (u[2:] - u[1:-1]) - self._cl * (u[1:-1] - u[:-2])
        return g + 0.5 * self.m2 * d2


def _check_uset(uset):
    if not isinstance(uset, UncertaintySet):
        raise ValidationError("an UncertaintySet is required")
    if uset.dim != 1:
        raise ValidationError("the grid solver is one-dimensional")


def _march(u0, gen, uset, dt, stops):
    """Euler steps; returns layers at the step counts in ``stops``."""
    lo, hi = uset.mass_lo, uset.mass_hi
    u = u0.copy()
    out = {0: u0.copy()} if 0 in stops else {}
    last = max(stops)
    for m in range(1, last + 1):
        g = gen.apply(u)
        u = u + dt * _np.where(g >= 0.0, hi, lo) * g
        if m in stops:
            if not _np.all(_np.isfinite(u)):
                raise NumericError("non-finite layer", step=m, time=m * dt)
            out[m] = u.copy()
    return out


def pide_solve(phi, uset, spec=SolverSpec(), snapshots=None, generator=None):
    """Layers at ``T 2**-j`` (j = 0..6), at ``snapshots`` and at 0."""
    _check_uset(uset)
    t0 = time.perf_counter()
    T = spec.T
    dt = spec.resolve_dt(uset)
    gen = generator or GeneratorMatrix(spec.grid, uset.alpha, spec.quad.epsilon)
    want = {0.0, T} | {T * 2.0 ** -j for j in range(1, 7)} | set(snapshots or ())
    steps = {}
    for t in want:
        if not (0.0 <= t <= T + 1e-12):
            raise DomainError(f"snapshot {t} outside [0, T]")
        m = round(t / dt)
        if abs(m * dt - t) > 1e-9 * max(1.0, t):
            raise DomainError(f"snapshot {t} is not a multiple of dt={dt:g}")
        steps[m] = t
    nodes = spec.grid.nodes()
    u0 = _np.asarray(phi(nodes), dtype=float)
    layers = _march(u0, gen, uset, dt, set(steps))
    ms = sorted(layers)
    sol = PideSolution([steps[m] for m in ms],
                       [GridFunction(spec.grid, layers[m], nodes) for m in ms], dt)
    sol.runtime = time.perf_counter() - t0
    sol.diagnostics = {"dt": dt, "steps": max(ms), "cfl_bound": cfl_bound(uset, spec.quad.epsilon),
                       "nodes": nodes.size, "epsilon": spec.quad.epsilon}
    return sol


def small_time_slope(phi, uset, spec=SolverSpec(), s_list=(1e-1, 1e-2, 1e-3), min_steps=4):
    """``[(s, u(s, 0)/s)]`` and the reference ``sup_generator(phi, 0)``."""
    if abs(float(phi(0.0))) > 0:
        raise DomainError("phi(0) must vanish")
    _check_uset(uset)
    gen = GeneratorMatrix(spec.grid, uset.alpha, spec.quad.epsilon)
    ref = sup_spherical(sym_values(phi, 0.0, uset, spec.quad), uset)[0]
    rows = []
    for s in s_list:
        dt = spec.resolve_dt(uset, s, 1) if spec.dt == "auto" else spec.dt
        m = max(min_steps, math.ceil(s / dt - 1e-12))
        sub = SolverSpec(spec.grid, s / m, spec.quad, 1.0, spec.safety)
        sub.resolve_dt(uset, s)
        u = _march(_np.asarray(phi(gen.nodes), float), gen, uset, s / m, {m})[m]
        rows.append((float(s), float(u[(u.size - 1) // 2]) / s))
    return rows, ref


def scaling_check(phi, uset, spec=SolverSpec(), t_list=(0.25, 0.5)):
    """``[(t, |u(t,0; phi) - u(1,0; phi(t**(1/alpha) .))|)]``."""
    _check_uset(uset)
    if any(not (0 < t <= 1) for t in t_list):
        raise DomainError("times must lie in (0, 1]")
    gen = GeneratorMatrix(spec.grid, uset.alpha, spec.quad.epsilon)
    one = SolverSpec(spec.grid, spec.dt, spec.quad, 1.0, spec.safety)
    base = pide_solve(phi, uset, one, snapshots=t_list, generator=gen)
    a = uset.alpha
    out = []
    for t in t_list:
        if t == 1.0:
            out.append((1.0, 0.0))
            continue
        scaled = phi.scaled(t ** (1.0 / a))
        other = pide_solve(scaled, uset, one, generator=gen)
        gap = abs(base.layer_at(t).at_origin - other.final.at_origin)
        out.append((float(t), float(gap)))
    return out


def dpp_check(phi, uset, spec=SolverSpec(), t=0.25, s=0.25, restart_refine=2):
    """Restart at ``t`` from the stored layer and march ``s`` further.

    The restart uses ``dt / restart_refine``; the gap to the direct run is
    compared with twice the one-step truncation error, estimated from the
    second time difference of the direct run.
    """
    _check_uset(uset)
    gen = GeneratorMatrix(spec.grid, uset.alpha, spec.quad.epsilon)
    horizon = SolverSpec(spec.grid, spec.dt, spec.quad, t + s, spec.safety)
    dt = horizon.resolve_dt(uset)
    mt, ms = round(t / dt), round((t + s) / dt)
    u0 = _np.asarray(phi(gen.nodes), float)
    direct = _march(u0, gen, uset, dt, {mt, ms, ms - 1, ms - 2})
    r = int(restart_refine)
    rest = _march(direct[mt], gen, uset, dt / r, {(ms - mt) * r})[(ms - mt) * r]
    gap = float(_np.max(_np.abs(rest - direct[ms])))
    curv = float(_np.max(_np.abs(direct[ms] - 2 * direct[ms - 1] + direct[ms - 2])))
    one_step = 0.5 * curv
    # accumulated over the restarted stretch the local errors add up
    budget = 2.0 * one_step * (ms - mt)
    return {"gap": gap, "one_step_error": one_step, "budget": budget, "holds": gap <= budget,
            "dt": dt}


def refinement_study(phi, uset, spec=SolverSpec(), levels=3):
    """Values at (T, 0) while halving dt, h and eps together."""
    rows = []
    g, q = spec.grid, spec.quad
    dt = spec.resolve_dt(uset)
    for lev in range(levels):
        f = 2 ** lev
        grid = GridSpec.from_spacing(g.half_width, g.spacing / f, extension=g.extension,
                                     far_edge=g.far_edge, far_growth=g.far_growth, far_rel=g.far_rel)
        quad = QuadratureSpec(q.epsilon / f, q.outer_cut, q.nodes_per_decade, q.tol, q.max_radius)
        sp = SolverSpec(grid, dt / f, quad, spec.T, spec.safety)
        sol = pide_solve(phi, uset, sp)
        rows.append({"level": lev, "dt": sol.dt, "h": grid.spacing, "epsilon": quad.epsilon,
                     "value": sol.final.at_origin, "runtime": sol.runtime})
    inc = [abs(b["value"] - a["value"]) for a, b in zip(rows, rows[1:])]
    return rows, inc

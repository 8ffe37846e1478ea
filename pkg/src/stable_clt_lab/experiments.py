"""Batch experiments behind the command line: each returns (summary, tables, exit code)."""
import numpy as _np

from .dp import consistency_residual, moment_statistic, run_clt
from .errors import ValidationError
from .functions import from_name
from .mc import McConfig, simulate
from .oracle import StableLaw
from .grid import GridSpec
from .pide import SolverSpec, pide_solve, refinement_study
from .sublinear import axiom_check

PASS, VALIDATION, NUMERIC, GAP = 0, 1, 2, 3


def _wider(grid):
    """Same spacing and far field, twice the half width (boundary sensitivity run)."""
    return GridSpec.from_spacing(2 * grid.half_width, grid.spacing, extension=grid.extension,
                                 far_edge=max(grid.far_edge, 4 * grid.half_width),
                                 far_growth=grid.far_growth, far_rel=grid.far_rel)


def _singleton_oracle(cfg):
    fam = cfg.family()
    if not fam.is_singleton:
        return None
    return StableLaw(fam.k_lo, fam.alpha).expect(cfg.phi())


def cmd_clt_dp(cfg):
    fam, phi, grid = cfg.family(), cfg.phi(), cfg.grid()
    tol = float(cfg.get("dp", "tol"))
    oracle = _singleton_oracle(cfg)
    rows, profile = [], None
    for n in cfg.int_list("dp"):
        r = run_clt(phi, fam, n, grid, tol)
        err = "" if oracle is None else r.value_at_origin - oracle
        rows.append((n, r.value_at_origin, r.runtime, err))
        profile = r.profile
    tables = {"dp.csv": (("n", "value_at_origin", "runtime", "error_vs_oracle"), rows)}
    if cfg.get("dp", "profile_csv") == "yes":
        tables["dp_profile.csv"] = (("node", "value"), list(zip(profile.nodes, profile.values)))
    wide = run_clt(phi, fam, rows[-1][0], _wider(grid), tol).value_at_origin
    sens = {"n": rows[-1][0], "value_2R": wide, "change": abs(wide - rows[-1][1])}
    return {"values": {n: v for n, v, _, _ in rows}, "oracle": oracle, "sensitivity_2R": sens}, tables, PASS


def cmd_pide(cfg):
    uset, spec, phi = cfg.uncertainty_set(), cfg.solver_spec(), cfg.phi()
    levels = int(cfg.get("pide", "levels"))
    rows, inc = refinement_study(phi, uset, spec, levels)
    sol = pide_solve(phi, uset, spec)
    wide_spec = SolverSpec(_wider(spec.grid), spec.dt, spec.quad, spec.T, spec.safety)
    wide = pide_solve(phi, uset, wide_spec).final.at_origin
    layer_rows = [(t, x, u) for t, lay in zip(sol.times, sol.layers)
                  for x, u in zip(lay.nodes, lay.values) if abs(x) <= spec.grid.half_width]
    summary = {"value_at_T_origin": sol.final.at_origin, "dt": sol.dt,
               "cfl_bound": sol.diagnostics["cfl_bound"], "refinement": rows, "increments": inc,
               "oracle": _singleton_oracle(cfg),
               "sensitivity_2R": {"value_2R": wide, "change": abs(wide - sol.final.at_origin)}}
    tables = {"pide.csv": (("t", "x", "u"), layer_rows),
              "pide_refinement.csv": (("level", "dt", "h", "epsilon", "value", "runtime"),
                                      [tuple(r.values()) for r in rows])}
    return summary, tables, PASS


def cmd_mc(cfg, threads=1):
    fam = cfg.family()
    if not fam.is_singleton:
        raise ValidationError("Monte Carlo needs a singleton band (k_lo = k_hi)")
    law, phi = fam.law(fam.k_lo), cfg.phi()
    paths, seed = int(cfg.get("mc", "paths")), cfg.seed
    oracle = StableLaw(law.k, law.alpha).expect(phi)
    rows = []
    for n in cfg.int_list("mc"):
        m, e = simulate(McConfig(law, n, paths, seed, phi), threads)
        rows.append((n, m, e, abs(m - oracle)))
    return ({"rows": rows, "oracle": oracle},
            {"mc.csv": (("n", "mean", "stderr", "abs_error"), rows)}, PASS)


def cmd_oracle(cfg):
    fam = cfg.family()
    if not fam.is_singleton:
        raise ValidationError("the stable oracle needs a singleton band")
    law = StableLaw(fam.k_lo, fam.alpha)
    xm, pts = float(cfg.get("oracle", "x_max")), int(cfg.get("oracle", "points"))
    x = _np.linspace(-xm, xm, pts)
    p = law.density(x)
    names = ["cos", "cos_minus_one", "sin", "gauss_bump", "tanh_clip", "capped_pow(0.25, 4)",
             "const(1)", cfg.get("phi", "name")]
    exps = [(nm, law.expect(from_name(nm))) for nm in dict.fromkeys(names)]
    summary = {"c_psi": law.c_psi, "normalization_gap": law.normalization_gap(),
               "expectations": dict(exps)}
    return summary, {"density.csv": (("x", "p"), list(zip(x, p))),
                     "expectations.csv": (("phi", "expectation"), exps)}, PASS


def verify(cfg):
    """Moment statistic, consistency residual, decay quantities and sublinear axioms."""
    fam, grid, quad = cfg.family(), cfg.grid(), cfg.quad()
    vp = cfg.verify_params()
    report, tables = {}, {}
    warn = []

    ms = moment_statistic(fam, vp["n_list"], vp["delta"], vp["cap"], grid, float(cfg.get("dp", "tol")))
    stab = {}
    for cap, seq in ms.items():
        vals = dict(seq)
        ref = vals.get(256, seq[-1][1])
        stab[cap] = abs(max(vals.values()) - ref) / abs(ref)
    report["moment_statistic"] = {"pass": all(v <= 0.05 for v in stab.values()),
                                  "relative_spread": stab, "curves": ms}
    tables["moment_statistic.csv"] = (("cap", "n", "value"),
                                      [(c, n, v) for c, seq in ms.items() for n, v in seq])

    lo, hi, m = vp["x_grid"]
    phi = cfg.phi()
    if phi.derivative is None:
        raise ValidationError(f"consistency residual needs a smooth test function, not {phi.name}")
    res = consistency_residual(phi, fam, vp["s_list"], _np.linspace(lo, hi, m), quad=quad)
    dec = all(b < a for (_, a), (_, b) in zip(res, res[1:]))
    report["consistency_residual"] = {"pass": dec, "curve": res}
    tables["consistency_residual.csv"] = (("s", "residual"), res)

    drows, ok = [], True
    for k in fam.grid():
        law = fam.law(k)
        prev = None
        for n in vp["n_list"]:
            q = law.decay_quantities(n, vp["delta"])
            drows.append((k, n) + tuple(q))
            if prev is not None and any(b > a * (1 + 1e-9) for a, b in zip(prev, q)):
                ok = False
            if law.profile == "pareto_cutoff" and float(n) ** (1 / fam.alpha) >= law.cutoff:
                ok = ok and q[0] == 0.0 and q[1] == 0.0
            prev = q
        if law.profile == "custom":
            bad = law.decay_violations()
            if bad.size:
                warn.append(f"beta exceeds C/|x|^gamma at x = {bad[:5].tolist()}")
    report["decay_quantities"] = {"pass": ok, "rows": drows}
    tables["decay_quantities.csv"] = (("k", "n", "beta_at_scale", "outer_integral", "inner_integral"), drows)

    ax = axiom_check(fam, vp["trials"], vp["axiom_tol"], seed=cfg.seed)
    report["axioms"] = {"pass": all(v["pass"] for v in ax.values()), "detail": ax}
    report["warnings"] = warn
    code = PASS if all(report[c]["pass"] for c in
                       ("moment_statistic", "consistency_residual", "decay_quantities", "axioms")) else GAP
    return report, tables, code


def compare(cfg, threads=1):
    """DP per n, PIDE per refinement level, oracle and MC (singleton only), pairwise gaps."""
    fam, phi = cfg.family(), cfg.phi()
    uset = cfg.uncertainty_set()
    if abs(uset.mass_lo - 2 * fam.k_lo) > 0 or uset.alpha != fam.alpha:
        raise ValidationError("band and alpha must match across sections")
    tol = float(cfg.get("compare", "tolerance"))
    dp_rows = [(n, run_clt(phi, fam, n, cfg.grid(), float(cfg.get("dp", "tol"))).value_at_origin)
               for n in cfg.int_list("dp")]
    pide_rows, _ = refinement_study(phi, uset, cfg.solver_spec(), int(cfg.get("pide", "levels")))
    values = {"dp": dp_rows[-1][1], "pide": pide_rows[-1]["value"]}
    slack = {"dp": 0.0, "pide": 0.0}
    mc_row = None
    if fam.is_singleton:
        values["oracle"] = _singleton_oracle(cfg)
        slack["oracle"] = 0.0
        law = fam.law(fam.k_lo)
        n_mc = cfg.int_list("mc")[-1]
        m, e = simulate(McConfig(law, n_mc, int(cfg.get("mc", "paths")), cfg.seed, phi), threads)
        values["mc"] = m
        slack["mc"] = 3.0 * e
        mc_row = (n_mc, m, e)
    names = list(values)
    gaps = []
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            g = abs(values[a] - values[b])
            gaps.append((a, b, g, tol + slack[a] + slack[b], g <= tol + slack[a] + slack[b]))
    ok = all(r[-1] for r in gaps)
    summary = {"dp": dp_rows, "pide": pide_rows, "values": values, "mc": mc_row, "gaps": gaps,
               "pass": ok}
    tables = {"compare.csv": (("method", "value"), list(values.items())),
              "compare_gaps.csv": (("a", "b", "gap", "allowed", "pass"), gaps)}
    return summary, tables, PASS if ok else GAP

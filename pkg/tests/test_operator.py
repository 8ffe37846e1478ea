import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as _integrate

from stable_clt_lab.errors import ValidationError
from stable_clt_lab.functions import (bump_sum, constant, cosine, gauss_bump, sine, sup_norms,
                                      tanh_clip)
from stable_clt_lab.measure import UncertaintySet
from stable_clt_lab.operator import (QuadratureSpec, delta_alpha, generator_ray, generator_sym,
                                     holder_constant, sup_generator, sym_values)

X0 = 0.37


class integrate:
    """scipy quad with its roundoff warnings silenced (reference values only)."""

    @staticmethod
    def quad(*args, **kw):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", _integrate.IntegrationWarning)
            return _integrate.quad(*args, **kw)


def _oracle_pair(phi, x, alpha, far=400.0):
    """Adaptive quadrature of the symmetric pair with eps = 1e-8 (independent of the library)."""
    fx = float(phi(x))
    pair = lambda r: 0.5 * (phi(x + r) + phi(x - r)) - fx
    f = lambda r: pair(r) * r ** (-1 - alpha)
    eps = 1e-8
    small = 0.5 * float(phi.deriv(x, 2)) * eps ** (2 - alpha) / (2 - alpha)
    inner, _ = integrate.quad(f, eps, 1.0, points=(1e-6, 1e-4, 1e-2), epsabs=1e-11, epsrel=1e-11,
                              limit=1000)
    if phi.fourier is not None or phi.name in ("sin",):
        # pair = phi(x) (cos r - 1): oscillatory tail in closed form
        osc, _ = integrate.quad(lambda r: r ** (-1 - alpha), 1, np.inf, weight="cos", wvar=1.0,
                                epsabs=1e-14)
        outer = fx * (osc - 1 / alpha)
    else:
        mid, _ = integrate.quad(f, 1.0, far, epsabs=1e-13, epsrel=1e-12, limit=4000)
        outer = mid - fx * far ** (-alpha) / alpha
    return small + inner + outer


SMOOTH = [cosine(), sine(), gauss_bump(0.3, 1.0, 1.0), tanh_clip(2.0),
          bump_sum([-1, 0.5, 2], [0.7, 1.2, 0.4], [1.0, -0.6, 0.8])]


@pytest.mark.parametrize("alpha", [0.5, 0.8])
@pytest.mark.parametrize("phi", SMOOTH, ids=lambda p: p.name)
def test_generator_matches_adaptive_oracle(phi, alpha):
    got = 0.5 * (generator_ray(phi, X0, 1.0, alpha) + generator_ray(phi, X0, -1.0, alpha))
    assert got == pytest.approx(_oracle_pair(phi, X0, alpha), abs=1e-6)


def test_cosine_at_origin_frozen():
    # (g(+1) + g(-1)) / 2 = -int_0^inf (1 - cos r) r^(-3/2) dr = -sqrt(2 pi)
    g = generator_sym(cosine(), 0.0, 1.0, 0.5)
    assert g == pytest.approx(-math.sqrt(2 * math.pi), abs=1e-8)


def test_symmetrization_identity():
    phi = SMOOTH[4]
    for x in (-0.6, 0.0, 1.1):
        ray = 0.5 * (generator_ray(phi, x, 1.0, 0.6) + generator_ray(phi, x, -1.0, 0.6))
        assert ray == pytest.approx(generator_sym(phi, x, 1.0, 0.6), abs=1e-8)


def test_alpha_one_compensated_ray():
    phi = gauss_bump(0.2, 0.9, 1.0)
    got = 0.5 * (generator_ray(phi, X0, 1.0, 1.0) + generator_ray(phi, X0, -1.0, 1.0))
    assert got == pytest.approx(_oracle_pair(phi, X0, 1.0), abs=1e-6)
    # one ray of sin at 0: int_0^1 (sin r - r) r^-2 dr + int_1^inf sin r r^-2 dr = 1 - euler gamma
    head, _ = integrate.quad(lambda r: (math.sin(r) - r) / r ** 2, 0, 1, epsabs=1e-14)
    tail, _ = integrate.quad(lambda r: r ** -2.0, 1, np.inf, weight="sin", wvar=1.0, epsabs=1e-14)
    ray = generator_ray(sine(), 0.0, 1.0, 1.0)
    assert ray == pytest.approx(head + tail, abs=1e-7)
    assert ray == pytest.approx(1 - np.euler_gamma, abs=1e-7)


def test_constants_and_odd_functions():
    assert generator_ray(constant(3.0), 0.2, 1.0, 0.5) == 0.0
    assert generator_sym(sine(), 0.0, 1.0, 0.5) == pytest.approx(0.0, abs=1e-14)


def test_delta_alpha_cases():
    lin = cosine(1e-9) * 0 + constant(0.0)
    ident = sine(1.0)
    assert delta_alpha(constant(2.0), 0.3, 0.7, 0.5) == 0.0
    assert delta_alpha(ident, 0.0, 2.0, 0.5) == pytest.approx(math.sin(2.0))
    # alpha = 1: compensation of the linear part for |lam| <= 1
    assert delta_alpha(ident, 0.0, 0.5, 1.0) == pytest.approx(math.sin(0.5) - 0.5, abs=1e-12)
    assert delta_alpha(ident, 0.0, 2.0, 1.0) == pytest.approx(math.sin(2.0))
    assert delta_alpha(lin, 0.0, 0.5, 1.0) == 0.0


def test_sup_generator_band_rule():
    u = UncertaintySet(0.5, 0.25, 0.5)
    g = generator_sym(cosine(), 0.0, 1.0, 0.5)
    val, mass, _ = sup_generator(cosine(), 0.0, u, full=True)
    assert g < 0 and mass == 0.25
    assert val == pytest.approx(0.25 * g, rel=1e-12)
    single = UncertaintySet(0.5, 0.7, 0.7)
    assert sup_generator(cosine(), 0.0, single) == pytest.approx(0.7 * g, rel=1e-12)


def test_sup_generator_sublinear():
    u = UncertaintySet(0.5, 0.25, 0.5)
    f, g = gauss_bump(0.5, 1.0, 1.0), gauss_bump(-1.0, 0.6, -0.7)
    for x in (-0.5, 0.2, 1.3):
        assert sup_generator(f + g, x, u) <= sup_generator(f, x, u) + sup_generator(g, x, u) + 1e-9
        assert sup_generator(f * 3.0, x, u) == pytest.approx(3 * sup_generator(f, x, u), rel=1e-9)


def test_epsilon_refinement_changes_shrink():
    phi = SMOOTH[2]
    vals = [generator_sym(phi, X0, 1.0, 0.5, QuadratureSpec(epsilon=e)) for e in (1e-1, 5e-2, 2.5e-2, 1.25e-2)]
    diffs = np.abs(np.diff(vals))
    assert np.all(diffs[1:] < diffs[:-1])
    curv = sup_norms(phi, orders=(4,))[4]
    assert diffs[0] <= curv * 0.1 ** (4 - 0.5)


def test_quadrature_spec_validation():
    with pytest.raises(ValidationError):
        QuadratureSpec(epsilon=0.0)
    with pytest.raises(ValidationError):
        QuadratureSpec(nodes_per_decade=3)
    q = QuadratureSpec(epsilon=1e-3)
    assert QuadratureSpec.from_dict(q.to_dict()) == q


def _holder_trials(n_pairs, seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pairs):
        m = int(rng.integers(1, 4))
        phi = bump_sum(rng.uniform(-3, 3, m), rng.uniform(0.4, 2.0, m), rng.uniform(-1.5, 1.5, m))
        alpha = float(rng.choice([0.4, 0.7, 1.0]))
        u = UncertaintySet(alpha, 0.3, 0.9)
        delta = float(rng.uniform(0.1, 1.0))
        x = float(rng.uniform(-3, 3))
        y = x + float(rng.choice([-1, 1]) * 10 ** rng.uniform(-3, 0.5))
        norms = sup_norms(phi, orders=(0, 1, 2, 3), lo=-20, hi=20, points=40001)
        bound = holder_constant(u, delta, norms) * abs(x - y) ** delta
        gap = abs(sup_generator(phi, x, u) - sup_generator(phi, y, u))
        worst = max(worst, gap / (1.1 * bound))
    return worst


def test_holder_bound_random_pairs():
    assert _holder_trials(100, 2024) <= 1.0

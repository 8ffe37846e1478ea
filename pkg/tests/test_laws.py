import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from stable_clt_lab.errors import DomainError, ValidationError
from stable_clt_lab.functions import capped_pow, cosine, gauss_bump
from stable_clt_lab.laws import (CustomLaw, HeavyTailLaw, ParetoCutoffLaw, excess_delta_moment,
                                 make_law, truncated_second_moment)

PARETO = ParetoCutoffLaw(0.25, 0.5)   # cutoff 1


def test_cutoff_and_cdf_values():
    assert PARETO.cutoff == 1.0
    assert ParetoCutoffLaw(1.0, 0.5).cutoff == pytest.approx(16.0)
    assert PARETO.cdf(1.0) == pytest.approx(0.5)
    assert PARETO.cdf(4.0) == pytest.approx(0.75)
    assert PARETO.cdf(-4.0) == pytest.approx(0.25)
    assert PARETO.pdf(0.5) == 0.0 and PARETO.pdf(4.0) == pytest.approx(0.25 * 4 ** -1.5)


@given(st.floats(0.05, 0.95), st.floats(0.01, 3.0))
def test_pdf_integrates_to_one(a, k):
    law = ParetoCutoffLaw(k, a)
    c = law.cutoff
    # u = x^-a maps the slowly decaying tail to a finite interval
    f = lambda u: 2 * law.pdf(u ** (-1 / a)) * u ** (-(1 + a) / a) / a
    tot, _ = integrate.quad(f, 0, c ** -a, epsabs=0, epsrel=1e-10, limit=400)
    assert tot == pytest.approx(1.0, rel=1e-8)


@given(st.floats(1e-6, 1 - 1e-6))
def test_ppf_inverts_cdf(u):
    x = PARETO.ppf(u)
    assert PARETO.cdf(x) == pytest.approx(u, abs=1e-12)


def test_truncated_moments_frozen_values():
    # E|W^16|^2 = a c^a (N^(2-a) - c^(2-a)) / (2-a) = 0.5 (64 - 1) / 1.5
    assert truncated_second_moment(PARETO, 16.0) == pytest.approx(21.0, rel=1e-14)
    assert excess_delta_moment(PARETO, 16.0, 0.25) == pytest.approx(1.0, rel=1e-14)
    assert truncated_second_moment(PARETO, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert PARETO.capped_moment(0.25, 4.0) == pytest.approx(1.75, rel=1e-14)
    with pytest.raises(DomainError):
        truncated_second_moment(PARETO, 0.5)
    with pytest.raises(DomainError):
        excess_delta_moment(PARETO, 16.0, 0.6)


def _direct_moments(law, N, delta):
    c = law.cutoff
    pdf = lambda x: law.k * x ** (-1 - law.alpha)
    m2, _ = integrate.quad(lambda x: 2 * x * x * pdf(x), c, N, epsabs=0, epsrel=1e-12)
    g = law.alpha - delta
    # u = x^-(a - delta) maps [N, inf) to (0, N^-(a - delta)]
    f = lambda u: 2 * u ** (-delta / g) * pdf(u ** (-1 / g)) * u ** (-(1 + g) / g) / g
    ex, _ = integrate.quad(f, 0, N ** -g, epsabs=0, epsrel=1e-12, limit=400)
    return m2, ex


def test_closed_forms_match_independent_quadrature():
    rng = np.random.default_rng(7)
    for _ in range(10):
        a = float(rng.uniform(0.2, 0.95))
        law = ParetoCutoffLaw(float(rng.uniform(0.05, 2.0)), a)
        N = law.cutoff * float(10 ** rng.uniform(0, 3))
        d = float(rng.uniform(0.05, 0.95)) * a
        m2, ex = _direct_moments(law, N, d)
        assert law.truncated_second_moment(N) == pytest.approx(m2, rel=1e-8)
        assert law.excess_delta_moment(N, d) == pytest.approx(ex, rel=1e-8)
        # generic survival-function route
        assert law.truncated_second_moment(N, method="quadrature") == pytest.approx(m2, rel=1e-8)
        assert law.excess_delta_moment(N, d, method="quadrature") == pytest.approx(ex, rel=1e-8)


@given(st.floats(0.1, 0.9), st.floats(1.0, 50.0))
def test_capped_moment_matches_expect(d_frac, cap):
    d = 0.5 * d_frac
    got = PARETO.expect(capped_pow(d, cap), tol=1e-12)
    assert got == pytest.approx(PARETO.capped_moment(d, cap), rel=1e-8)


def test_first_moment_grows_like_power():
    # E min(|W|, m) = 2 sqrt(m) - 1 for the c = 1, alpha = 1/2 law
    vals = [PARETO.expect(capped_pow(1.0, m), tol=1e-12) for m in (1e2, 1e3, 1e4)]
    assert vals == pytest.approx([2 * math.sqrt(m) - 1 for m in (1e2, 1e3, 1e4)], rel=1e-8)
    slopes = np.diff(np.log(vals)) / np.log(10)
    assert np.all(np.abs(slopes - 0.5) < 0.05)
    cauchy = ParetoCutoffLaw(0.5, 1.0)
    v1 = [cauchy.expect(capped_pow(1.0, m), tol=1e-12) for m in (1e2, 1e3, 1e4)]
    # alpha = 1: increments in log m are constant (2k ln 10)
    assert np.diff(v1) == pytest.approx([math.log(10)] * 2, rel=1e-6)


def test_sampling_matches_cdf():
    rng = np.random.default_rng(99)
    x = PARETO.sample(rng, 10 ** 6)
    assert stats.kstest(x, PARETO.cdf).pvalue > 0.01


def test_decay_quantities_pareto():
    a, d = 0.5, 0.25
    for n in (1, 4, 64, 1024):
        q1, q2, q3 = PARETO.decay_quantities(n, d)
        assert q1 == 0.0 and q2 == 0.0
        y = n ** (1 / a)
        assert q3 == pytest.approx(a / (2 * (1 - a)) * y ** (a - 1), rel=1e-14)
        # generic quadrature of the same integral
        g = HeavyTailLaw.decay_quantities(PARETO, n, d)
        assert g[2] == pytest.approx(q3, rel=1e-8)
    big = ParetoCutoffLaw(1.0, 0.5)   # cutoff 16 > n^(1/alpha) = 4 at n = 2
    q = big.decay_quantities(2, d)
    assert q[0] > 0 and q[1] > 0
    assert ParetoCutoffLaw(0.5, 1.0).decay_quantities(4, 0.5)[2] == math.inf


def test_custom_zero_perturbation_is_pareto():
    law = CustomLaw(0.25, 0.5, [0.0, 2.0, 5.0], [0.0, 0.0, 0.0], gamma=1.0)
    x = np.geomspace(1e-3, 1e4, 200)
    assert np.max(np.abs(law.sf(x) - PARETO.sf(x))) < 1e-15
    p, q = np.array([0.0, 0.5, 3.0]), np.array([0.5, 3.0, 9.0])
    for got, ref in zip(law.moments3(p, q, 0.3), PARETO.moments3(p, q, 0.3)):
        assert got == pytest.approx(ref, abs=1e-12)


def _bumped():
    return CustomLaw(0.25, 0.5, [0.0, 1.0, 2.0, 4.0], [0.0, 0.05, -0.05, 0.02], gamma=1.0, C=1.0)


def test_custom_law_is_a_distribution():
    law = _bumped()
    tot, _ = integrate.quad(lambda x: 2 * law.pdf(x), 0, 100, points=[1, 2, 4, law._support_start()],
                            limit=400, epsabs=1e-13)
    tail = 2 * law.sf(100.0)
    assert tot + tail + law.atom == pytest.approx(1.0, abs=1e-9)
    assert law.expect(gauss_bump(0, 1, 0) + 1.0) == pytest.approx(1.0, abs=1e-9)
    assert law.expect(cosine()) == pytest.approx(
        2 * integrate.quad(lambda x: math.cos(x) * law.pdf(x), law._support_start(), 200, limit=800,
                           points=[1, 2, 4])[0]
        + 2 * integrate.quad(lambda x: law.pdf(x), 200, np.inf, weight="cos", wvar=1.0)[0]
        + law.atom, abs=1e-7)


def test_custom_truncated_moments_by_quadrature():
    law = _bumped()
    N = 16.0
    s = law._support_start()
    m2, _ = integrate.quad(lambda x: 2 * x * x * law.pdf(x), s, N, points=[1, 2, 4], limit=400)
    assert law.truncated_second_moment(N) == pytest.approx(m2, rel=1e-8)


def test_custom_validation_and_probe():
    with pytest.raises(ValidationError):
        CustomLaw(0.25, 0.5, [0.0, 1.0], [0.0, 5.0], gamma=0.0)
    with pytest.raises(ValidationError):
        CustomLaw(0.25, 0.5, [0.0, 4.0, 5.0], [0.0, 0.0, 3.0])   # S increases on [4, 5]
    law = CustomLaw(0.25, 0.5, [0.0, 1.0, 3.0], [0.0, 0.3, 0.3], gamma=1.0, C=0.1)
    bad = law.decay_violations()
    assert bad.size and bad.min() >= 0.3


def test_make_law_dispatch():
    assert isinstance(make_law(0.3, 0.5), ParetoCutoffLaw)
    with pytest.raises(ValidationError):
        make_law(0.3, 0.5, profile="nope")
    with pytest.raises(DomainError):
        ParetoCutoffLaw(0.0, 0.5)

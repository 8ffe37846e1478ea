import math

import numpy as np
import pytest

from stable_clt_lab.errors import ValidationError
from stable_clt_lab.functions import constant, cosine, sine
from stable_clt_lab.laws import ParetoCutoffLaw
from stable_clt_lab.mc import McConfig, ks_stability, normalized_sums, path_uniforms, simulate, sweep

LAW = ParetoCutoffLaw(0.25, 0.5)


def test_config_validation():
    for bad in (dict(n=0, paths=100), dict(n=4, paths=10), dict(n=4, paths=100, seed=-1),
                dict(n=4, paths=100, seed=2**64)):
        with pytest.raises(ValidationError):
            McConfig(LAW, phi=cosine(), **bad)


def test_uniforms_open_interval_and_keyed():
    u = path_uniforms(7, 3, 10000)
    assert u.min() > 0 and u.max() < 1
    assert np.array_equal(u, path_uniforms(7, 3, 10000))
    assert not np.array_equal(u, path_uniforms(7, 4, 10000))
    assert abs(u.mean() - 0.5) < 0.01


def test_thread_count_does_not_change_output():
    a = normalized_sums(LAW, 16, 300, 11, threads=1, chunk=7)
    b = normalized_sums(LAW, 16, 300, 11, threads=4, chunk=64)
    assert np.array_equal(a, b)
    # path p of a later block equals path p of one long run
    c = normalized_sums(LAW, 16, 100, 11, first_path=200)
    assert np.array_equal(c, a[200:])


def test_constant_and_odd():
    m, e = simulate(McConfig(LAW, 8, 1000, 5, constant(2.0)))
    assert m == 2.0 and e == 0.0
    m, e = simulate(McConfig(LAW, 8, 4000, 5, sine()))
    assert abs(m) <= 4 * e


def test_single_summand_matches_exact_expectation():
    m, e = simulate(McConfig(LAW, 1, 20000, 9, cosine()))
    assert abs(m - LAW.expect(cosine())) <= 4 * e


def test_sweep_rows():
    rows, oracle = sweep(McConfig(LAW, 1, 2000, 3, cosine()), [64, 256])
    assert oracle == pytest.approx(math.exp(-1.2533141373155001))
    assert [r[0] for r in rows] == [64, 256]
    assert all(r[3] <= 4 * r[2] + 1e-2 for r in rows)
    with pytest.raises(ValidationError):
        sweep(McConfig(LAW, 1, 200, 3, cosine()), [8, 4])


def test_ks_stability():
    rep = ks_stability(LAW, 256, 512, 2000, 1)
    assert rep["pvalue"] > 0.001

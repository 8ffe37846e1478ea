import numpy as np
import pytest
from hypothesis import given, strategies as st

from stable_clt_lab.errors import ValidationError
from stable_clt_lab.functions import capped_pow, constant, cosine, gauss_bump
from stable_clt_lab.sublinear import LawFamily, axiom_check, family_i1, family_i2, maximize_k, sup_expect


def test_family_validation_and_band():
    with pytest.raises(ValidationError):
        LawFamily(0.5, 0.25, 0.5)
    with pytest.raises(ValidationError):
        LawFamily(0.25, 0.5, 0.5, k_grid=2)
    u = LawFamily(0.25, 0.5, 0.5).uncertainty_set()
    assert (u.mass_lo, u.mass_hi) == (0.5, 1.0)


def test_constants_and_singleton(singleton, band):
    assert sup_expect(band, constant(7.0))[0] == pytest.approx(7.0, abs=1e-12)
    law = singleton.law(0.25)
    assert sup_expect(singleton, cosine())[0] == pytest.approx(law.expect(cosine(), tol=1e-10), abs=1e-12)


def test_capped_moment_attained_at_upper_endpoint(band):
    val, arg = sup_expect(band, capped_pow(0.25, 4.0))
    assert arg == 0.5
    assert val == pytest.approx(band.law(0.5).capped_moment(0.25, 4.0), rel=1e-9)


def test_cosine_matches_brute_force(band):
    val, arg = sup_expect(band, cosine())
    ks = np.linspace(0.25, 0.5, 401)
    vals = [band.law(k).expect(cosine()) for k in ks]
    assert val == pytest.approx(max(vals), abs=1e-9)
    assert arg == pytest.approx(ks[int(np.argmax(vals))], abs=1e-3)


def test_interior_maximum_found():
    fam = LawFamily(0.1, 2.0, 0.5, k_grid=5)
    val, arg = maximize_k(lambda k: -(k - 0.73) ** 2, fam, tol=1e-9)
    assert arg == pytest.approx(0.73, abs=1e-6) and val == pytest.approx(0.0, abs=1e-12)


def test_band_monotonicity_and_dominance(band):
    f = gauss_bump(2.0, 1.0, 1.0)
    inner = LawFamily(0.3, 0.4, 0.5)
    big, _ = sup_expect(band, f)
    assert big >= sup_expect(inner, f)[0] - 1e-12
    for k in np.linspace(0.25, 0.5, 6):
        assert big >= band.law(k).expect(f) - 1e-9


def test_axioms_quick(band):
    rep = axiom_check(band, trials=10, tol=1e-6, seed=3)
    assert all(v["pass"] for v in rep.values()), rep


def _brute(fun, lo, hi):
    return max(fun(k) for k in np.linspace(lo, hi, 2001))


@given(st.floats(2.0, 200.0))
def test_truncated_moment_suprema(N):
    fam = LawFamily(0.1, 0.25, 0.5)
    i1 = _brute(lambda k: fam.law(k).truncated_second_moment(N) / N ** 1.5, 0.1, 0.25)
    i2 = _brute(lambda k: fam.law(k).excess_delta_moment(N, 0.25) / N ** -0.25, 0.1, 0.25)
    assert family_i1(fam, N) == pytest.approx(i1, rel=1e-6)
    assert family_i2(fam, N, 0.25) == pytest.approx(i2, rel=1e-6)

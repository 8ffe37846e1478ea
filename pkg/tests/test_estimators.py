import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from stable_clt_lab.estimators import RobustCltDP, RobustPide


def test_dp_estimator_fit_predict():
    est = RobustCltDP(n=16, half_width=4.0, spacing=0.125)
    with pytest.raises(NotFittedError):
        est.predict([0.0])
    est.fit()
    y = est.predict(np.array([[0.0], [0.5], [-0.5]]))
    assert y.shape == (3,)
    assert y[0] == est.value_at_origin_
    assert y[1] == pytest.approx(y[2], abs=1e-14)
    assert est.score([0.0], [est.value_at_origin_]) == 0.0


def test_pide_estimator_and_params():
    est = RobustPide(k_hi=0.5, epsilon=1e-2, half_width=4.0, spacing=0.125)
    other = clone(est).set_params(k_hi=0.25)
    assert est.get_params()["k_hi"] == 0.5 and other.get_params()["k_hi"] == 0.25
    rob = est.fit().value_at_origin_
    single = other.fit().value_at_origin_
    assert rob >= single

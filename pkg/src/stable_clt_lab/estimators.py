"""scikit-learn style wrappers: hyperparameters in ``__init__``, ``fit`` runs the solver,
``predict(x)`` returns ``u(T, x)`` by interpolation of the final layer."""
import numpy as _np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .dp import run_clt
from .functions import SampledFunction, from_name
from .grid import GridSpec
from .measure import UncertaintySet
from .operator import QuadratureSpec
from .pide import SolverSpec, pide_solve
from .sublinear import LawFamily


def _phi(phi):
    return phi if isinstance(phi, SampledFunction) else from_name(phi)


class _SolverEstimator(BaseEstimator):
    def predict(self, X):
        if not hasattr(self, "profile_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        x = _np.asarray(X, dtype=float).reshape(-1)
        return self.profile_(x)

    def score(self, X, y):
        """Negative max abs deviation from reference values ``y``."""
        return -float(_np.max(_np.abs(self.predict(X) - _np.asarray(y, dtype=float).ravel())))


class RobustCltDP(_SolverEstimator):
    """Dynamic-programming scheme with ``n`` steps over the band ``[k_lo, k_hi]``."""

    def __init__(self, phi="cos", alpha=0.5, k_lo=0.25, k_hi=0.25, n=1024, half_width=8.0,
                 spacing=1.0 / 64, k_grid=3, tol=1e-6):
        self.phi = phi
        self.alpha = alpha
        self.k_lo = k_lo
        self.k_hi = k_hi
        self.n = n
        self.half_width = half_width
        self.spacing = spacing
        self.k_grid = k_grid
        self.tol = tol

    def fit(self, X=None, y=None):
        fam = LawFamily(self.k_lo, self.k_hi, self.alpha, k_grid=self.k_grid)
        res = run_clt(_phi(self.phi), fam, self.n, GridSpec.from_spacing(self.half_width, self.spacing),
                      self.tol)
        self.profile_ = res.profile
        self.value_at_origin_ = res.value_at_origin
        self.runtime_ = res.runtime
        return self


class RobustPide(_SolverEstimator):
    """Explicit monotone PIDE solver; masses are ``2 k`` for ``k`` in the band."""

    def __init__(self, phi="cos", alpha=0.5, k_lo=0.25, k_hi=0.25, T=1.0, dt="auto", epsilon=1e-4,
                 half_width=8.0, spacing=1.0 / 64):
        self.phi = phi
        self.alpha = alpha
        self.k_lo = k_lo
        self.k_hi = k_hi
        self.T = T
        self.dt = dt
        self.epsilon = epsilon
        self.half_width = half_width
        self.spacing = spacing

    def fit(self, X=None, y=None):
        uset = UncertaintySet(self.alpha, 2.0 * self.k_lo, 2.0 * self.k_hi)
        spec = SolverSpec(GridSpec.from_spacing(self.half_width, self.spacing), self.dt,
                          QuadratureSpec(epsilon=self.epsilon), self.T)
        sol = pide_solve(_phi(self.phi), uset, spec)
        self.solution_ = sol
        self.profile_ = sol.final
        self.value_at_origin_ = sol.final.at_origin
        return self

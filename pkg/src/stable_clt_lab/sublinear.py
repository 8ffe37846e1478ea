"""Sublinear expectation as a supremum over the one-parameter law family."""
from dataclasses import dataclass, field
import math

import numpy as _np

from .errors import ValidationError
from .functions import SampledFunction, bump_sum, constant
from .laws import make_law
from .measure import StableIndex, UncertaintySet, _as_index

_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class LawFamily:
    """Laws ``W_k`` for ``k`` in the closed band ``[k_lo, k_hi]``.

    ``k`` is the per-direction weight, so the spherical mass band is
    ``[2 k_lo, 2 k_hi]``.
    """

    k_lo: float
    k_hi: float
    index: StableIndex
    profile: str = "pareto_cutoff"
    k_grid: int = 3
    custom: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "index", _as_index(self.index))
        if not (0 < self.k_lo <= self.k_hi) or not math.isfinite(self.k_hi):
            raise ValidationError(f"need 0 < k_lo <= k_hi, got [{self.k_lo}, {self.k_hi}]")
        if int(self.k_grid) != self.k_grid or self.k_grid < 3:
            raise ValidationError("k_grid must be an integer >= 3")
        if self.profile not in ("pareto_cutoff", "custom"):
            raise ValidationError(f"unknown profile {self.profile!r}")

    @property
    def alpha(self):
        return self.index.alpha

    @property
    def is_singleton(self):
        return self.k_lo == self.k_hi

    def law(self, k):
        return make_law(k, self.index, self.profile, **self.custom)

    def grid(self):
        if self.is_singleton:
            return _np.array([self.k_lo])
        return _np.linspace(self.k_lo, self.k_hi, int(self.k_grid))

    def uncertainty_set(self):
        return UncertaintySet(self.index, 2.0 * self.k_lo, 2.0 * self.k_hi)

    def to_dict(self):
        d = {"k_lo": self.k_lo, "k_hi": self.k_hi, "alpha": self.alpha, "profile": self.profile,
             "k_grid": int(self.k_grid)}
        d.update(self.custom)
        return d


def maximize_k(fun, family, tol=1e-6):
    """Max of ``fun(k)`` over the band: coarse grid then golden section.

    The golden-section result is only accepted when it beats the grid
    maximum, so multi-modal cases fall back to the grid.  Ties go to the
    smaller k.  Returns ``(value, arg_k)``.
    """
    ks = family.grid()
    vals = _np.array([fun(k) for k in ks])
    j = int(_np.argmax(vals))
    best, arg = float(vals[j]), float(ks[j])
    if ks.size == 1:
        return best, arg
    a = ks[max(j - 1, 0)]
    b = ks[min(j + 1, ks.size - 1)]
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = fun(d)
    for k, v in ((c, fc), (d, fd)):
        if v > best:
            best, arg = float(v), float(k)
    return best, min(max(arg, family.k_lo), family.k_hi)


def sup_expect(family, f, tol=1e-6, qtol=1e-10):
    """``sup over k of E_k[f]``; returns ``(value, arg_k)``."""
    cache = {}

    def fun(k):
        if k not in cache:
            cache[k] = family.law(k).expect(f, tol=qtol)
        return cache[k]

    return maximize_k(fun, family, tol)


def _random_function(rng):
    m = int(rng.integers(1, 4))
    return bump_sum(rng.uniform(-6, 6, m), rng.uniform(0.3, 3.0, m), rng.uniform(-2, 2, m)) \
        + constant(rng.uniform(-1, 1))


def axiom_check(family, trials=100, tol=1e-6, seed=0):
    """Randomized check of monotonicity, constants, subadditivity and homogeneity.

    Returns a dict axiom -> {"pass": bool, "worst": margin}; a margin is
    the largest violation observed (<= tol means pass).
    """
    rng = _np.random.default_rng(seed)
    worst = {"monotonicity": -_np.inf, "constants": 0.0, "subadditivity": -_np.inf,
             "homogeneity": 0.0}
    E = lambda h: sup_expect(family, h, tol=1e-6)[0]
    for _ in range(int(trials)):
        f, g = _random_function(rng), _random_function(rng)
        c = float(rng.uniform(-10, 10))
        lam = float(rng.uniform(0.1, 5.0))
        ef, eg = E(f), E(g)
        # monotonicity on h = f + |bump| >= f
        bump = bump_sum([rng.uniform(-5, 5)], [rng.uniform(0.5, 2)], [abs(rng.uniform(0.1, 1))])
        worst["monotonicity"] = max(worst["monotonicity"], ef - E(f + bump))
        worst["constants"] = max(worst["constants"], abs(E(constant(c)) - c))
        worst["subadditivity"] = max(worst["subadditivity"], E(f + g) - ef - eg)
        worst["homogeneity"] = max(worst["homogeneity"], abs(E(lam * f) - lam * ef) / lam)
    return {k: {"pass": bool(v <= tol), "worst": float(v)} for k, v in worst.items()}


def family_i1(family, N):
    """``sup_k E|W^N|**2 / N**(2-alpha)``."""
    a = family.alpha
    return maximize_k(lambda k: family.law(k).truncated_second_moment(N) / N ** (2.0 - a),
                      family)[0]


def family_i2(family, N, delta):
    """``sup_k E|W - W^N|**delta / N**(delta-alpha)``."""
    a = family.alpha
    return maximize_k(lambda k: family.law(k).excess_delta_moment(N, delta) / N ** (delta - a),
                      family)[0]

"""Bounded test functions and the named registry used by runs and the CLI."""
from dataclasses import dataclass
import re

import numpy as _np
from numpy.polynomial import hermite_e as _herm

from .errors import ValidationError


@dataclass(frozen=True)
class SampledFunction:
    """A bounded function handle with a sup-norm bound.

    ``derivative(x, order)`` is optional; when present it returns exact
    derivatives and lets callers avoid finite differences at tiny scales.
    ``fourier`` is set for ``cos(freq * x)`` so oracles can use the
    characteristic function.
    """

    eval: callable
    bound: float
    lip: float = _np.inf
    derivative: callable = None
    name: str = "phi"
    even: bool = False
    odd: bool = False
    fourier: float = None
    params: tuple = ()

    def __call__(self, x):
        return self.eval(_np.asarray(x, dtype=float))

    def deriv(self, x, order):
        if self.derivative is None:
            raise ValidationError(f"{self.name} has no analytic derivatives")
        return self.derivative(_np.asarray(x, dtype=float), order)

    def scaled(self, factor):
        """The function ``x -> phi(factor * x)``."""
        f = float(factor)
        der = None
        if self.derivative is not None:
            der = lambda x, k: f ** k * self.derivative(f * x, k)
        return SampledFunction(lambda x: self.eval(f * x), self.bound, abs(f) * self.lip, der,
                               f"{self.name}@{f:g}", self.even, self.odd,
                               None if self.fourier is None else self.fourier * f, self.params)

    def __mul__(self, c):
        c = float(c)
        der = None if self.derivative is None else (lambda x, k: c * self.derivative(x, k))
        return SampledFunction(lambda x: c * self.eval(x), abs(c) * self.bound, abs(c) * self.lip,
                               der, f"{c:g}*{self.name}", self.even, self.odd, None, self.params)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, SampledFunction):
            other = constant(other)
        der = None
        if self.derivative is not None and other.derivative is not None:
            der = lambda x, k: self.derivative(x, k) + other.derivative(x, k)
        return SampledFunction(lambda x: self.eval(x) + other.eval(x), self.bound + other.bound,
                               self.lip + other.lip, der, f"{self.name}+{other.name}",
                               self.even and other.even, self.odd and other.odd)


def constant(c):
    c = float(c)
    return SampledFunction(lambda x: _np.full(_np.shape(x), c), abs(c), 0.0,
                           lambda x, k: _np.zeros(_np.shape(x)), f"const({c:g})", even=True,
                           params=(c,))


def cosine(freq=1.0):
    w = float(freq)

    def der(x, k):
        return w ** k * _np.cos(w * x + k * _np.pi / 2)

    return SampledFunction(lambda x: _np.cos(w * x), 1.0, abs(w), der,
                           "cos" if w == 1.0 else f"cos({w:g})", even=True, fourier=w, params=(w,))


def cos_minus_one(freq=1.0):
    w = float(freq)

    def der(x, k):
        out = w ** k * _np.cos(w * x + k * _np.pi / 2)
        return out - 1.0 if k == 0 else out

    return SampledFunction(lambda x: _np.cos(w * x) - 1.0, 2.0, abs(w), der, "cos_minus_one",
                           even=True, params=(w,))


def sine(freq=1.0):
    w = float(freq)
    der = lambda x, k: w ** k * _np.sin(w * x + k * _np.pi / 2)
    return SampledFunction(lambda x: _np.sin(w * x), 1.0, abs(w), der, "sin", odd=True, params=(w,))


def _gauss_der(x, k, center, width, height):
    u = (x - center) / width
    coef = _np.zeros(k + 1)
    coef[k] = 1.0
    return height * (-1) ** k * _herm.hermeval(u, coef) * _np.exp(-0.5 * u * u) / width ** k


def gauss_bump(center=0.0, width=1.0, height=1.0):
    c, w, h = float(center), float(width), float(height)
    if w <= 0:
        raise ValidationError("bump width must be positive")
    return SampledFunction(lambda x: h * _np.exp(-0.5 * ((x - c) / w) ** 2), abs(h),
                           abs(h) / w * _np.exp(-0.5), lambda x, k: _gauss_der(x, k, c, w, h),
                           "gauss_bump", even=(c == 0.0), params=(c, w, h))


def bump_sum(centers, widths, heights):
    """Sum of Gaussian bumps; smooth with all derivatives bounded."""
    cs, ws, hs = (_np.asarray(v, dtype=float).ravel() for v in (centers, widths, heights))

    def ev(x):
        x = _np.asarray(x, dtype=float)
        return sum(h * _np.exp(-0.5 * ((x - c) / w) ** 2) for c, w, h in zip(cs, ws, hs))

    def der(x, k):
        return sum(_gauss_der(x, k, c, w, h) for c, w, h in zip(cs, ws, hs))

    return SampledFunction(ev, float(_np.abs(hs).sum()), float(_np.sum(_np.abs(hs) / ws)), der,
                           "bump_sum", params=tuple(_np.concatenate([cs, ws, hs])))


def tanh_clip(scale=1.0):
    """``tanh(x / scale)``: smooth, bounded by 1, constant at +-infinity."""
    s = float(scale)

    def der(x, k):
        t = _np.tanh(x / s)
        # d/dx of polynomials in t: dt/dx = (1 - t^2)/s
        p = _np.polynomial.Polynomial([0.0, 1.0])
        for _ in range(k):
            p = p.deriv() * _np.polynomial.Polynomial([1.0, 0.0, -1.0]) / s
        return p(t)

    return SampledFunction(lambda x: _np.tanh(x / s), 1.0, 1.0 / s, der, "tanh_clip", odd=True,
                           params=(s,))


def capped_pow(delta, cap):
    """``min(|x|**delta, cap)``; delta-Holder with constant 1."""
    d, m = float(delta), float(cap)
    if not (0 < d <= 1) or m <= 0:
        raise ValidationError("capped_pow needs 0 < delta <= 1 and cap > 0")
    return SampledFunction(lambda x: _np.minimum(_np.abs(x) ** d, m), m, _np.inf, None,
                           f"capped_pow({d:g},{m:g})", even=True, params=(d, m))


def kinks(phi):
    """Known nonsmooth radii of ``phi`` (used as quadrature breakpoints)."""
    if phi.name.startswith("capped_pow") and phi.params:
        d, m = phi.params
        return (m ** (1.0 / d),)
    return ()


REGISTRY = {
    "cos": cosine,
    "cos_minus_one": cos_minus_one,
    "sin": sine,
    "gauss_bump": gauss_bump,
    "tanh_clip": tanh_clip,
    "capped_pow": capped_pow,
    "const": constant,
}

_SPEC = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def from_name(spec):
    """Build a registry function from text such as ``capped_pow(0.25, 4)``."""
    m = _SPEC.match(str(spec))
    if not m or m.group(1) not in REGISTRY:
        raise ValidationError(f"unknown test function {spec!r}; known: {sorted(REGISTRY)}")
    args = []
    if m.group(2):
        try:
            args = [float(a) for a in m.group(2).split(",") if a.strip()]
        except ValueError as exc:
            raise ValidationError(f"bad arguments in {spec!r}") from exc
    try:
        return REGISTRY[m.group(1)](*args)
    except TypeError as exc:
        raise ValidationError(f"bad arguments in {spec!r}: {exc}") from exc


def sup_norms(phi, orders=(0, 1, 2, 3), lo=-50.0, hi=50.0, points=200001):
    """Sup-norm estimates of phi and its derivatives by dense sampling."""
    x = _np.linspace(lo, hi, points)
    out = {}
    for k in orders:
        vals = phi(x) if k == 0 else phi.deriv(x, k)
        out[k] = float(_np.max(_np.abs(vals)))
    return out

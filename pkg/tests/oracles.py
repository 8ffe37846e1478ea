"""Independent reference computations shared by the tests."""
import numpy as np
from scipy import integrate


def interpolant_expectation(x, u, law, center, scale):
    """``E[I u(center + scale W)]`` for the piecewise linear interpolant ``I u`` on nodes ``x``.

    Each cell is integrated separately in the log-distance variable, which keeps the
    density spike at the left edge of long far-field cells resolved.
    """
    total = 0.0
    for sign in (1.0, -1.0):
        far = x[-1] if sign > 0 else x[0]
        lo = center + sign * scale * law.cutoff
        pts = np.unique(np.r_[lo, x[(x - lo) * sign > 0]])
        g = lambda t: np.interp(center + sign * scale * np.exp(t), x, u) * law.pdf(np.exp(t)) * np.exp(t)
        for y0, y1 in zip(pts[:-1], pts[1:]):
            t0, t1 = sorted(np.log(np.abs([y0 - center, y1 - center]) / scale))
            total += integrate.quad(g, t0, t1, epsabs=1e-15, epsrel=1e-12)[0]
        total += np.interp(far, x, u) * law.sf(max(abs(far - center) / scale, law.cutoff))
    return total

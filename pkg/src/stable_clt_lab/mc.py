"""Monte Carlo for the classical (singleton) stable limit.

Every path owns a Philox stream keyed by ``(seed, path index)``, so the
output does not depend on how paths are split across threads.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as _np
from scipy import stats as _stats

from .errors import ValidationError
from .laws import HeavyTailLaw
from .oracle import StableLaw

_SCALE53 = 2.0 ** -53


@dataclass
class McConfig:
    law: HeavyTailLaw
    n: int
    paths: int
    seed: int = 0
    phi: object = None
    chunk: int = 64

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError("n must be a positive integer")
        if int(self.paths) != self.paths or self.paths < 100:
            raise ValidationError("need at least 100 paths")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ValidationError("seed must be an unsigned 64-bit integer")
        self.n, self.paths, self.seed = int(self.n), int(self.paths), int(self.seed)


def path_uniforms(seed, path, n):
    """``n`` uniforms in (0, 1) from the stream keyed by ``(seed, path)``."""
    bg = _np.random.Philox(key=_np.array([seed, path], dtype=_np.uint64))
    bits = bg.random_raw(n)
    return ((bits >> _np.uint64(11)).astype(_np.float64) + 0.5) * _SCALE53


def normalized_sums(law, n, paths, seed, threads=1, first_path=0, chunk=64):
    """``n**(-1/alpha) S_n`` for paths ``first_path .. first_path + paths - 1``."""
    out = _np.empty(paths)
    norm = float(n) ** (-1.0 / law.alpha)

    def work(lo):
        hi = min(lo + chunk, paths)
        for p in range(lo, hi):
            w = law.ppf(path_uniforms(seed, first_path + p, n))
            out[p] = norm * _np.sum(w)

    starts = range(0, paths, chunk)
    if threads <= 1:
        for lo in starts:
            work(lo)
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(work, starts))
    return out


def simulate(cfg, threads=1):
    """Sample mean and standard error of ``phi(n**(-1/alpha) S_n)``."""
    z = normalized_sums(cfg.law, cfg.n, cfg.paths, cfg.seed, threads, chunk=cfg.chunk)
    vals = _np.asarray(cfg.phi(z), dtype=float)
    mean = float(_np.sum(vals) / vals.size)
    err = float(_np.std(vals, ddof=1) / math.sqrt(vals.size))
    return mean, err


def sweep(cfg, n_list, threads=1, oracle=None):
    """Rows ``(n, mean, stderr, |mean - oracle|)``; oracle from the stable law by default."""
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValidationError("n_list must be increasing")
    if oracle is None:
        oracle = StableLaw(cfg.law.k, cfg.law.alpha).expect(cfg.phi)
    rows = []
    for n in n_list:
        c = McConfig(cfg.law, n, cfg.paths, cfg.seed, cfg.phi, cfg.chunk)
        m, e = simulate(c, threads)
        rows.append((int(n), m, e, abs(m - oracle)))
    return rows, oracle


def ks_stability(law, n_a, n_b, paths, seed, threads=1):
    """Two-sample KS between normalized sums at ``n_a`` and ``n_b`` (disjoint streams)."""
    a = normalized_sums(law, n_a, paths, seed, threads)
    b = normalized_sums(law, n_b, paths, seed, threads, first_path=paths)
    res = _stats.ks_2samp(a, b)
    return {"statistic": float(res.statistic), "pvalue": float(res.pvalue)}

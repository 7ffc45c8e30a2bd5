"""Discrete and Gaussian loss models with exact quantile and shortfall math.

Losses are signed: positive numbers are losses, negative numbers are gains.
`StepQuantile` stores the left-quantile function of a finitely supported loss
as a right-closed step function on (0, 1]; tail integrals come from cached
suffix sums, so expected shortfall at a breakpoint is a plain sum of
width-times-value products with no cancellation.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import BadWeights, EmptySample, OutOfRangeLevel, UnboundedQuantile

_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


def _check_level(p) -> float:
    p = float(p)
    if math.isnan(p) or p < 0.0 or p > 1.0:
        raise OutOfRangeLevel(f"probability level must lie in [0, 1], got {p!r}")
    return p


def _norm_pdf(z):
    return np.exp(-0.5 * np.square(z)) / _SQRT_TWO_PI


@dataclass(frozen=True)
class StepQuantile:
    """Left-quantile function of a finitely supported loss.

    ``values[k]`` is the quantile on ``(breakpoints[k-1], breakpoints[k]]``
    (with an implicit 0 at the left end); the last breakpoint is always
    exactly 1.  Values are nondecreasing, and runs of equal values are merged
    at construction, so two StepQuantiles compare equal exactly when they
    describe the same distribution.
    """

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        v = tuple(float(x) for x in self.values)
        if len(bp) == 0 or len(bp) != len(v):
            raise ValueError("breakpoints and values must be equal-length and nonempty")
        if not all(math.isfinite(x) for x in v):
            raise ValueError("quantile values must be finite")
        if not all(math.isfinite(b) for b in bp):
            raise ValueError("breakpoints must be finite")
        if bp[0] <= 0.0 or any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing in (0, 1]")
        if abs(bp[-1] - 1.0) > 1e-12:
            raise ValueError("last breakpoint must equal 1")
        bp = bp[:-1] + (1.0,)
        if any(v2 < v1 for v1, v2 in zip(v, v[1:])):
            raise ValueError("quantile values must be nondecreasing")
        keep_bp: list = []
        keep_v: list = []
        for k in range(len(v)):
            if keep_v and v[k] == keep_v[-1]:
                keep_bp[-1] = bp[k]
            else:
                keep_bp.append(bp[k])
                keep_v.append(v[k])
        object.__setattr__(self, "breakpoints", tuple(keep_bp))
        object.__setattr__(self, "values", tuple(keep_v))
        arr_b = np.asarray(self.breakpoints)
        arr_v = np.asarray(self.values)
        widths = np.diff(np.concatenate(([0.0], arr_b)))
        suffix = np.zeros(arr_v.size + 1)
        suffix[:-1] = np.cumsum((widths * arr_v)[::-1])[::-1]
        object.__setattr__(self, "_suffix", suffix)

    def var(self, p) -> float:
        """Left quantile at level ``p``; at p = 0 the smallest value."""
        p = _check_level(p)
        if p == 0.0:
            return self.values[0]
        return self.values[bisect_left(self.breakpoints, p)]

    def tail_integral(self, p) -> float:
        """Integral of the quantile function over [p, 1]."""
        p = _check_level(p)
        if p == 1.0:
            return 0.0
        k = bisect_left(self.breakpoints, p)
        return float((self.breakpoints[k] - p) * self.values[k] + self._suffix[k + 1])

    def es(self, p) -> float:
        """Expected shortfall: mean of the worst (1-p) tail; at p = 1 the
        largest value."""
        p = _check_level(p)
        if p == 1.0:
            return self.values[-1]
        return self.tail_integral(p) / (1.0 - p)

    @property
    def mean(self) -> float:
        return float(self._suffix[0])

    def atoms(self) -> list:
        """(probability, value) pairs in increasing value order."""
        out = []
        prev = 0.0
        for b, x in zip(self.breakpoints, self.values):
            out.append((b - prev, x))
            prev = b
        return out

    def shift(self, m) -> "StepQuantile":
        m = float(m)
        if not math.isfinite(m):
            raise ValueError("shift must be finite")
        return StepQuantile(self.breakpoints, tuple(x + m for x in self.values))

    def scale(self, lam) -> "StepQuantile":
        lam = float(lam)
        if not (math.isfinite(lam) and lam >= 0.0):
            raise ValueError("scale factor must be finite and nonnegative")
        return StepQuantile(self.breakpoints, tuple(lam * x for x in self.values))


@dataclass(frozen=True)
class GaussianLoss:
    """Normally distributed loss with mean ``mu`` and deviation ``sigma``.

    ``sigma = 0`` degenerates to the constant loss ``mu`` (finite endpoint
    quantiles included).  For ``sigma > 0`` the quantile at p in {0, 1} does
    not exist and asking for it raises :class:`UnboundedQuantile`.
    """

    mu: float
    sigma: float

    def __post_init__(self):
        mu = float(self.mu)
        sigma = float(self.sigma)
        if not (math.isfinite(mu) and math.isfinite(sigma)):
            raise ValueError("mu and sigma must be finite")
        if sigma < 0.0:
            raise ValueError("sigma must be nonnegative")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    def var(self, p) -> float:
        p = _check_level(p)
        if self.sigma == 0.0:
            return self.mu
        if p == 0.0 or p == 1.0:
            raise UnboundedQuantile(f"Gaussian quantile at p = {p:g} is infinite")
        return self.mu + self.sigma * float(ndtri(p))

    def es(self, p) -> float:
        p = _check_level(p)
        if self.sigma == 0.0:
            return self.mu
        if p == 0.0:
            return self.mu
        if p == 1.0:
            return math.inf
        z = float(ndtri(p))
        return self.mu + self.sigma * math.exp(-0.5 * z * z) / (_SQRT_TWO_PI * (1.0 - p))

    def discretize(self, atoms: int = 10_000) -> StepQuantile:
        """Finite model whose atom k is the Gaussian's conditional mean on the
        bucket ((k-1)/atoms, k/atoms], so the discrete shortfall agrees with
        the exact one at every bucket boundary."""
        n = int(atoms)
        if n < 1:
            raise ValueError("atoms must be a positive integer")
        if self.sigma == 0.0:
            return StepQuantile((1.0,), (self.mu,))
        phis = np.zeros(n + 1)
        if n > 1:
            phis[1:n] = _norm_pdf(ndtri(np.arange(1, n) / n))
        vals = self.mu + self.sigma * n * (phis[:-1] - phis[1:])
        return StepQuantile(tuple(np.arange(1, n + 1) / n), tuple(vals))


@dataclass(frozen=True)
class ESCurve:
    """Callable view ``p -> ES_p`` over a fixed loss model."""

    dist: object

    def __call__(self, p) -> float:
        return self.dist.es(p)


def empirical_from_samples(samples, weights=None) -> StepQuantile:
    """Empirical loss model from raw samples.

    Weights default to uniform; given weights must be finite, nonnegative,
    and sum to 1 within 1e-12 (then they are renormalized exactly).
    Zero-weight samples are dropped.
    """
    vals = np.asarray(list(samples), dtype=float)
    if vals.ndim != 1 or vals.size == 0:
        raise EmptySample("need at least one sample")
    if not np.all(np.isfinite(vals)):
        raise ValueError("samples must be finite")
    if weights is None:
        w = np.full(vals.size, 1.0 / vals.size)
    else:
        w = np.asarray(list(weights), dtype=float)
        if w.shape != vals.shape:
            raise BadWeights("weights must match samples in length")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise BadWeights("weights must be finite and nonnegative")
        total = float(w.sum())
        if abs(total - 1.0) > 1e-12:
            raise BadWeights(f"weights must sum to 1, got {total!r}")
        w = w / total
        pos = w > 0.0
        vals, w = vals[pos], w[pos]
    order = np.argsort(vals, kind="stable")
    vals, w = vals[order], w[order]
    bp = np.cumsum(w)
    bp[-1] = 1.0
    # cumulative rounding must not push interior cut points past 1
    np.minimum(bp, 1.0, out=bp)
    keep = np.concatenate(([True], np.diff(bp) > 0.0))
    return StepQuantile(tuple(bp[keep]), tuple(vals[keep]))


def var(dist, p) -> float:
    """Left quantile of any loss model (or benchmark handle) at level p."""
    return dist.var(p)


def es(dist, p) -> float:
    """Expected shortfall of any loss model at level p."""
    return dist.es(p)


def gaussian_es(mu, sigma, p) -> float:
    return GaussianLoss(mu, sigma).es(p)


def es_curve(dist) -> ESCurve:
    return ESCurve(dist)


def comonotone_mix(x: StepQuantile, y: StepQuantile, lam) -> StepQuantile:
    """Quantile function of ``lam*X + (1-lam)*Y`` under comonotone coupling."""
    lam = float(lam)
    if not (0.0 <= lam <= 1.0):
        raise ValueError("lam must lie in [0, 1]")
    grid = sorted(set(x.breakpoints) | set(y.breakpoints))
    vals = tuple(lam * x.var(b) + (1.0 - lam) * y.var(b) for b in grid)
    return StepQuantile(tuple(grid), vals)

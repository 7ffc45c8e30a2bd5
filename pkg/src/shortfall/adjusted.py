"""Adjusted expected shortfall: sup over p of ES_p(X) - g(p).

On each interval between adjacent breakpoints of X's shortfall curve and of
g, the objective is (H(p) - h(p)) / (1 - p) with an affine numerator, and
((a + b*p)/(1-p))' keeps one sign, so the supremum is attained on the merged
breakpoint grid; candidates where g is infinite drop out (the value there is
-inf by convention).  This module also hosts the structure built on top:
acceptability, tail property, homogeneity, dual certificates, risk sharing,
and the arbitrage/comparability decompositions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    ArgmaxAtOne,
    BadAllocation,
    OutOfRangeLevel,
    ProfileNotFlatBelowP,
    ProfileNotNormalized,
)
from .profiles import (
    BenchmarkESProfile,
    HyperbolicProfile,
    PiecewiseConstantProfile,
    SumProfile,
    TruncatedProfile,
    h_function,
    sum_profiles,
)
from .quantiles import GaussianLoss, StepQuantile, _check_level, empirical_from_samples

DEFAULT_ATOMS = 10_000


@dataclass(frozen=True)
class AdjustedESResult:
    value: float
    argmax_p: float
    finite: bool
    discretized: bool = False


def adjusted_es(X, g, *, atoms=None) -> AdjustedESResult:
    """Adjusted shortfall of a loss against a profile, with the smallest
    maximizing level.  Gaussian losses are bucketed first (tail-conditional
    means) and the result is flagged ``discretized``."""
    discretized = False
    if isinstance(X, GaussianLoss):
        X = X.discretize(atoms if atoms is not None else DEFAULT_ATOMS)
        discretized = True
    candidates = {0.0}
    candidates.update(X.breakpoints)
    candidates.update(h_function(g).grid)
    best = -math.inf
    best_p = 0.0
    for p in sorted(candidates):
        gp = g(p)
        if gp == math.inf:
            continue
        obj = X.es(p) - gp
        if obj > best:
            best = obj
            best_p = p
    return AdjustedESResult(best, best_p, math.isfinite(best), discretized)


def is_acceptable(X, g, *, tol=1e-12, atoms=None) -> bool:
    """True when ES_p(X) <= g(p) at every level, i.e. the adjusted shortfall
    is nonpositive (within ``tol``)."""
    return adjusted_es(X, g, atoms=atoms).value <= tol


def _constant_below(g, p) -> bool:
    if isinstance(g, PiecewiseConstantProfile):
        return g.thresholds[0] >= p  # levels are distinct after merging
    if isinstance(g, BenchmarkESProfile):
        # the shortfall curve is flat on (0, p) only for a constant benchmark
        return len(g.benchmark.values) == 1
    if isinstance(g, HyperbolicProfile):
        return False
    if isinstance(g, SumProfile):
        return all(_constant_below(part, p) for part in g.parts)
    if isinstance(g, TruncatedProfile):
        return p <= g.cutoff and _constant_below(g.base, p)
    raise TypeError(f"not a profile: {g!r}")


def has_p_tail_property(g, p) -> bool:
    """Whether the adjustment only reads the distribution beyond level p,
    which holds exactly when g is constant on (0, p)."""
    p = _check_level(p)
    if not (0.0 < p < 1.0):
        raise OutOfRangeLevel("tail level must lie strictly inside (0, 1)")
    return _constant_below(g, p)


@dataclass(frozen=True)
class HomogeneityResult:
    homogeneous: bool
    p_star: Optional[float] = None

    def __bool__(self) -> bool:
        return self.homogeneous


def _zero_region_end(g):
    """sup of the initial interval where g vanishes, or None when g(0) != 0.

    Walks the pieces of h = (1-p)g(p); an affine piece vanishes iff both its
    endpoint values are 0.  Endpoint values are representation floats, so the
    comparison is exact.
    """
    h = h_function(g)
    if h.starts[0] != 0.0:
        return None
    p0 = 0.0
    for j in range(len(h.starts)):
        if h.starts[j] == 0.0 and h.ends[j] == 0.0:
            p0 = h.grid[j + 1]
        else:
            break
    return p0


def homogeneity_analysis(g) -> HomogeneityResult:
    """Positive homogeneity of the adjusted shortfall.

    It holds exactly when g vanishes on its whole finite region, in which
    case the functional collapses to ES at that region's right end p*.
    """
    p0 = _zero_region_end(g)
    if p0 is not None and p0 == h_function(g).finite_end:
        return HomogeneityResult(True, p0)
    return HomogeneityResult(False, None)


@dataclass(frozen=True)
class DualCertificate:
    density: tuple
    level: float
    dual_value: float


def dual_certificate(X, g, *, atoms=None) -> DualCertificate:
    """Maximizing change of measure at the optimal level p*.

    The density is 1/(1 - p*) on the worst (1 - p*) tail of X, splitting the
    straddling atom fractionally; its expectation of X minus g(p*) matches
    the primal value.  Only defined when the supremum is attained below 1.
    """
    result = adjusted_es(X, g, atoms=atoms)
    if isinstance(X, GaussianLoss):
        X = X.discretize(atoms if atoms is not None else DEFAULT_ATOMS)
    p_star = result.argmax_p
    if p_star >= 1.0:
        raise ArgmaxAtOne("supremum attained only at p = 1; density would be unbounded")
    inv = 1.0 / (1.0 - p_star)
    dens: list = []
    expectation = 0.0
    prev = 0.0
    for cut, value in zip(X.breakpoints, X.values):
        if prev >= p_star:
            d = inv
        elif cut <= p_star:
            d = 0.0
        else:
            d = (cut - p_star) / (cut - prev) * inv
        dens.append(d)
        expectation += (cut - prev) * d * value
        prev = cut
    return DualCertificate(tuple(dens), p_star, expectation - g(p_star))


# -- risk sharing --------------------------------------------------------------


@dataclass(frozen=True)
class Allocation:
    """A split of one position over a shared scenario partition: cell j spans
    (grid[j-1], grid[j]] of the uniform variable and part i takes the value
    parts[i][j] there."""

    grid: tuple
    parts: tuple

    def __post_init__(self):
        grid = tuple(float(t) for t in self.grid)
        parts = tuple(tuple(float(v) for v in part) for part in self.parts)
        if not grid or grid[0] <= 0.0 or grid[-1] != 1.0:
            raise BadAllocation("allocation grid must increase through (0, 1] and end at 1")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise BadAllocation("allocation grid must be strictly increasing")
        if not parts or any(len(p) != len(grid) for p in parts):
            raise BadAllocation("each part must assign one value per grid cell")
        for part in parts:
            if not all(math.isfinite(v) for v in part):
                raise BadAllocation("part values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "parts", parts)


@dataclass(frozen=True)
class InfConvolutionResult:
    lower_bound: float
    best_found: float


def equal_split(X: StepQuantile, n: int) -> Allocation:
    share = tuple(v / n for v in X.values)
    return Allocation(X.breakpoints, (share,) * n)


def residual_split(X: StepQuantile, benchmarks) -> Allocation:
    """All but the last part take their benchmark's quantile; the last part
    absorbs the remainder cell by cell (comonotone when that remainder is
    nondecreasing)."""
    pts = set(X.breakpoints)
    for z in benchmarks:
        pts.update(z.breakpoints)
    grid = tuple(sorted(pts))
    parts = [tuple(z.var(t) for t in grid) for z in benchmarks[:-1]]
    residual: list = []
    for j, t in enumerate(grid):
        r = X.var(t)
        for part in parts:
            r -= part[j]
        residual.append(r)
    parts.append(tuple(residual))
    return Allocation(grid, tuple(parts))


def random_split(X: StepQuantile, n: int, rng) -> Allocation:
    grid = X.breakpoints
    parts = [list(rng.normal(0.0, 1.0, len(grid))) for _ in range(n - 1)]
    residual: list = []
    for j, v in enumerate(X.values):
        r = v
        for part in parts:
            r -= part[j]
        residual.append(r)
    parts.append(residual)
    return Allocation(grid, tuple(tuple(p) for p in parts))


def default_allocations(X, gs):
    """Equal split, the comonotone benchmark split when every profile is a
    benchmark curve, and a few seeded random splits."""
    n = len(gs)
    yield equal_split(X, n)
    if n > 1 and all(isinstance(g, BenchmarkESProfile) for g in gs):
        yield residual_split(X, tuple(g.benchmark for g in gs))
    rng = np.random.default_rng(0)
    for _ in range(3):
        yield random_split(X, n, rng)


def _validate_allocation(X, alloc: Allocation, n_parts: int):
    if len(alloc.parts) != n_parts:
        raise BadAllocation(f"expected {n_parts} parts, got {len(alloc.parts)}")
    cells = set(alloc.grid)
    missing = [b for b in X.breakpoints if b not in cells]
    if missing:
        raise BadAllocation("allocation grid must refine the position's breakpoints")
    for j, t in enumerate(alloc.grid):
        target = X.var(t)
        got = sum(part[j] for part in alloc.parts)
        if abs(got - target) > 1e-12:
            raise BadAllocation(
                f"parts sum to {got!r} on the cell ending at {t!r}, expected {target!r}"
            )


def _part_distribution(alloc: Allocation, i: int) -> StepQuantile:
    widths: list = []
    prev = 0.0
    for t in alloc.grid:
        widths.append(t - prev)
        prev = t
    return empirical_from_samples(alloc.parts[i], weights=widths)


def inf_convolution_value(X, gs, sampler=None) -> InfConvolutionResult:
    """Risk-sharing search: the summed-profile lower bound together with the
    best total risk among sampled allocations of X."""
    gs = tuple(gs)
    if not gs:
        raise ValueError("need at least one profile")
    lower = adjusted_es(X, sum_profiles(gs)).value
    best = math.inf
    for alloc in (sampler or default_allocations)(X, gs):
        _validate_allocation(X, alloc, len(gs))
        total = 0.0
        for i, g in enumerate(gs):
            total += adjusted_es(_part_distribution(alloc, i), g).value
        best = min(best, total)
    return InfConvolutionResult(lower, best)


# -- decompositions -------------------------------------------------------------


def regulatory_arbitrage(X, g) -> tuple:
    """Capital saved by splitting a position among clones of the profile.

    Splitting n ways against n*g drives the requirement down to ES at the top
    of g's zero region; the gap to the single-entity requirement is the
    arbitrage.  Requires a normalized profile (g(0) = 0).
    """
    p0 = _zero_region_end(g)
    if p0 is None:
        raise ProfileNotNormalized("profile must satisfy g(0) = 0")
    limit = X.es(p0)
    gap = adjusted_es(X, g).value - limit
    return gap, limit


def comparability_decomposition(X, g, p) -> tuple:
    """Reference shortfall at p plus the surcharge the profile adds for the
    tail beyond p; defined when g vanishes on [0, p]."""
    p = _check_level(p)
    p0 = _zero_region_end(g)
    if p0 is None or p > p0:
        raise ProfileNotFlatBelowP(f"profile must vanish on [0, {p!r}]")
    base = X.es(p)
    exceedance = adjusted_es(X, g).value - base
    return base, exceedance

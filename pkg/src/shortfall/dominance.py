"""Second-order stochastic dominance and the risk measure it induces.

Dominance of X over Z (smaller losses in the concave order) is equivalent to
the shortfall curve of X lying below that of Z at every level; the induced
risk is the smallest cash withdrawal m with X - m still dominating Z, which
equals the adjusted shortfall of X against Z's curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .adjusted import adjusted_es
from .profiles import BenchmarkESProfile
from .quantiles import StepQuantile


@dataclass(frozen=True)
class RampUtility:
    """Concave ramp u(y) = min(y - kink, 0): linear below the kink, flat 0
    above it.  Ramps span the risk-averse preferences relevant here."""

    kink: float

    def __call__(self, y) -> float:
        return min(y - self.kink, 0.0)

    def expected_of_negated(self, dist: StepQuantile, shift=0.0) -> float:
        """E[u(shift - Z)] for a finitely supported loss Z."""
        total = 0.0
        for w, v in dist.atoms():
            total += w * min(shift - v - self.kink, 0.0)
        return total


def ssd_dominates(x: StepQuantile, z: StepQuantile, *, tol=1e-12) -> bool:
    """Every risk-averse agent weakly prefers losing X to losing Z.

    The difference of shortfall curves has an affine numerator over (1-p)
    between merged breakpoints, hence is monotone there, so checking the
    merged grid (plus both endpoints) is exact.
    """
    levels = sorted({0.0, 1.0, *x.breakpoints, *z.breakpoints})
    return all(x.es(p) <= z.es(p) + tol for p in levels)


def ssd_based_risk(x: StepQuantile, z: StepQuantile) -> float:
    """Smallest m with X - m still dominating Z; the adjusted shortfall of X
    against the benchmark curve of Z."""
    return adjusted_es(x, BenchmarkESProfile(z)).value


@dataclass(frozen=True)
class MinimumCheckResult:
    ok: bool
    witness: Optional[StepQuantile] = None

    def __bool__(self) -> bool:
        return self.ok


def acceptance_minimum_check(z: StepQuantile, samples, *, tol=1e-12) -> MinimumCheckResult:
    """Z must be a dominance-minimum of its own acceptance set: Z itself is
    acceptable, and every sampled acceptable X dominates Z.  Non-acceptable
    samples are vacuous; a failure comes back with the witness."""
    if ssd_based_risk(z, z) > tol:
        return MinimumCheckResult(False, z)
    for x in samples:
        if ssd_based_risk(x, z) <= tol and not ssd_dominates(x, z, tol=tol):
            return MinimumCheckResult(False, x)
    return MinimumCheckResult(True, None)


@dataclass(frozen=True)
class UtilityRequirement:
    value: float
    vacuous: bool = False

    def __float__(self) -> float:
        return self.value


def utility_requirement(
    x: StepQuantile, z: StepQuantile, u: RampUtility, *, tol=1e-10
) -> UtilityRequirement:
    """Smallest m with E[u(m - X)] >= E[u(-Z)], found by bisection.

    E[u(m - X)] is continuous and nondecreasing in m.  The right bracket edge
    (the dominance-based risk plus 1) is always feasible; if the left edge is
    feasible too, the ramp never binds on the support and the requirement is
    unbounded below - reported as the edge with the ``vacuous`` flag.
    """
    target = u.expected_of_negated(z)
    lo = min(x.values) - max(z.values) - 1.0
    hi = ssd_based_risk(x, z) + 1.0
    if u.expected_of_negated(x, shift=lo) >= target:
        return UtilityRequirement(lo, True)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if u.expected_of_negated(x, shift=mid) >= target:
            hi = mid
        else:
            lo = mid
    return UtilityRequirement(hi, False)

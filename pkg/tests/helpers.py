"""Shared numerical oracles and random instance builders for the test suite.

Everything here recomputes quantities from raw parameter arrays through its
own code path: quantile lookups via vectorized searchsorted, tail integrals
via suffix sums, the normal quantile by bisecting an erfc-based CDF, and
normal tail means by adaptive quadrature.  Builders return both the package
object and the raw arrays (or an independent evaluator) it was built from,
so tests can cross-check the two representations.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from shortfall import (
    BenchmarkESProfile,
    HyperbolicProfile,
    PiecewiseConstantProfile,
    StepQuantile,
    SumProfile,
    sum_profiles,
    truncate_profile,
)

INF = float("inf")


# ---------------------------------------------------------------------------
# step-distribution oracles (raw arrays in, numbers out)
# ---------------------------------------------------------------------------


def widths_of(bp):
    """Probability mass of each piece, from the breakpoint array."""
    bp = np.asarray(bp, dtype=float)
    return np.diff(np.concatenate(([0.0], bp)))


def oracle_var(bp, vals, ps):
    """Left quantile of a step distribution."""
    bp = np.asarray(bp, dtype=float)
    vals = np.asarray(vals, dtype=float)
    ps = np.asarray(ps, dtype=float)
    idx = np.minimum(np.searchsorted(bp, ps, side="left"), vals.size - 1)
    return vals[idx]


def oracle_tail(bp, vals, ps):
    """Integral of the step quantile over [p, 1], by suffix sums."""
    bp = np.asarray(bp, dtype=float)
    vals = np.asarray(vals, dtype=float)
    ps = np.asarray(ps, dtype=float)
    cuts = np.concatenate(([0.0], bp))
    pieces = np.diff(cuts) * vals
    suffix = np.concatenate((np.cumsum(pieces[::-1])[::-1], [0.0]))
    k = np.minimum(np.searchsorted(bp, ps, side="left"), vals.size - 1)
    return suffix[k] - (ps - cuts[k]) * vals[k]


def oracle_es(bp, vals, ps):
    """Tail mean of a step distribution; the p = 1 endpoint is the top value."""
    ps = np.atleast_1d(np.asarray(ps, dtype=float))
    out = np.empty(ps.shape)
    top = ps >= 1.0
    out[top] = float(np.asarray(vals, dtype=float)[-1])
    rest = ~top
    out[rest] = oracle_tail(bp, vals, ps[rest]) / (1.0 - ps[rest])
    return out


def oracle_es_scalar(bp, vals, p):
    return float(oracle_es(bp, vals, [p])[0])


def oracle_es_sum(bp, vals, p, n=100_000):
    """Tail mean by direct summation over a dense grid refined at the jumps.

    Right-endpoint heights are exact for a left-continuous step function once
    every jump is itself a grid point, so the only error left is fp rounding.
    """
    bp = np.asarray(bp, dtype=float)
    grid = np.union1d(np.linspace(p, 1.0, n), bp[(bp > p) & (bp < 1.0)])
    heights = oracle_var(bp, vals, grid[1:])
    return float(np.dot(heights, np.diff(grid)) / (1.0 - p))


def ramp_expectation(bp, vals, kink, shift=0.0):
    """E[min(shift - V - kink, 0)] of the negated loss, from raw arrays."""
    vals = np.asarray(vals, dtype=float)
    return float(np.dot(widths_of(bp), np.minimum(shift - vals - kink, 0.0)))


# ---------------------------------------------------------------------------
# Gaussian oracles
# ---------------------------------------------------------------------------


def normal_cdf(z):
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def normal_quantile(p, tol=1e-13):
    """Standard normal quantile by plain bisection of the erfc-based CDF."""
    lo, hi = -40.0, 40.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gaussian_es_quad(mu, sigma, p):
    """Conditional tail mean of a normal loss, by adaptive quadrature."""
    if sigma == 0.0:
        return mu
    z = normal_quantile(p)
    dens = lambda t: t * math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)
    # the 1/(1-p) factor amplifies quadrature error, so integrate tightly
    tail, _ = quad(dens, z, np.inf, epsabs=1e-13, epsrel=1e-12)
    return mu + sigma * tail / (1.0 - p)


# ---------------------------------------------------------------------------
# random loss models
# ---------------------------------------------------------------------------


def random_step(rng, max_atoms=8, lo=-2.0, hi=2.0):
    """Random step distribution; returns (model, breakpoints, values)."""
    n = int(rng.integers(1, max_atoms + 1))
    vals = np.sort(rng.uniform(lo, hi, n))
    w = rng.uniform(0.1, 1.0, n)
    bp = np.cumsum(w) / float(np.sum(w))
    bp[-1] = 1.0
    x = StepQuantile(tuple(bp), tuple(vals))
    return x, np.asarray(x.breakpoints), np.asarray(x.values)


def random_step_dyadic(rng, max_atoms=6, lo=-2.0, hi=2.0, denom=64):
    """Step distribution with breakpoints on a power-of-two lattice."""
    n = int(rng.integers(1, max_atoms + 1))
    if n > 1:
        cuts = np.sort(rng.choice(np.arange(1, denom), size=n - 1, replace=False)) / denom
    else:
        cuts = np.empty(0)
    bp = np.concatenate((cuts, [1.0]))
    vals = np.sort(rng.uniform(lo, hi, n))
    x = StepQuantile(tuple(bp), tuple(vals))
    return x, np.asarray(x.breakpoints), np.asarray(x.values)


def random_step_spaced(rng, max_atoms=6, denom=64):
    """Dyadic breakpoints, values on a coarse 1/8 lattice, and a guaranteed
    jump near the top of the unit interval (so tail means stay strictly
    increasing below it and every plateau product is exact in binary)."""
    n = int(rng.integers(2, max_atoms + 1))
    top_cut = denom - 2
    if n > 2:
        others = np.sort(rng.choice(np.arange(1, top_cut), size=n - 2, replace=False))
    else:
        others = np.empty(0, dtype=int)
    bp = np.concatenate((others / denom, [top_cut / denom, 1.0]))
    vals = np.sort(rng.choice(np.arange(-16, 17), size=n, replace=False)) * 0.125
    x = StepQuantile(tuple(bp), tuple(vals))
    return x, np.asarray(x.breakpoints), np.asarray(x.values)


# ---------------------------------------------------------------------------
# random risk profiles, each paired with an independent evaluator and the
# list of levels where its behavior changes
# ---------------------------------------------------------------------------


def _pw_eval(levels, thresholds):
    lv = np.asarray(levels, dtype=float)
    th = np.asarray(thresholds, dtype=float)

    def evaluate(ps):
        ps = np.atleast_1d(np.asarray(ps, dtype=float))
        k = np.searchsorted(th, ps, side="left")
        return np.where(k < lv.size, lv[np.minimum(k, lv.size - 1)], INF)

    return evaluate


def _bench_eval(zbp, zvals):
    zbp = np.asarray(zbp, dtype=float)
    zvals = np.asarray(zvals, dtype=float)

    def evaluate(ps):
        return oracle_es(zbp, zvals, ps)

    return evaluate


def _hyper_eval(scale):
    def evaluate(ps):
        ps = np.atleast_1d(np.asarray(ps, dtype=float))
        out = np.full(ps.shape, INF)
        inside = ps < 1.0
        out[inside] = scale / (1.0 - ps[inside])
        return out

    return evaluate


def _trunc_eval(base, cutoff):
    def evaluate(ps):
        ps = np.atleast_1d(np.asarray(ps, dtype=float))
        out = np.asarray(base(ps), dtype=float).copy()
        out[ps > cutoff] = INF
        return out

    return evaluate


def _sum_eval(parts):
    def evaluate(ps):
        ps = np.atleast_1d(np.asarray(ps, dtype=float))
        total = np.zeros(ps.shape)
        for part in parts:
            total = total + np.asarray(part(ps), dtype=float)
        return total

    return evaluate


def _random_pw(rng, through_one=None):
    m = int(rng.integers(1, 5))
    th = np.unique(rng.uniform(0.05, 0.98, m))
    if through_one is None:
        through_one = rng.random() < 0.4
    if through_one:
        th = np.concatenate((th[:-1], [1.0]))
    base = 0.0 if rng.random() < 0.5 else float(rng.uniform(0.0, 0.4))
    # strictly positive increments: the constructor then keeps every piece
    lv = base + np.concatenate(([0.0], np.cumsum(rng.uniform(0.05, 0.5, th.size - 1))))
    g = PiecewiseConstantProfile(tuple(lv), tuple(th))
    return g, _pw_eval(lv, th), list(th)


def _random_bench(rng, max_atoms=5):
    z, zbp, zvals = random_step(rng, max_atoms=max_atoms)
    return BenchmarkESProfile(z), _bench_eval(zbp, zvals), [0.0, *zbp.tolist()]


def _random_hyper(rng):
    s = float(rng.uniform(0.2, 2.0))
    return HyperbolicProfile(s), _hyper_eval(s), [0.0, 1.0]


def random_profile(rng, kinds=("pw", "bench", "hyper", "trunc", "sum")):
    """Random risk profile + independent evaluator + its jump levels."""
    kind = kinds[int(rng.integers(0, len(kinds)))]
    if kind == "pw":
        return _random_pw(rng)
    if kind == "bench":
        return _random_bench(rng)
    if kind == "hyper":
        return _random_hyper(rng)
    if kind == "trunc":
        base, base_eval, brk = random_profile(rng, kinds=("pw", "bench", "hyper"))
        cutoff = float(rng.uniform(0.1, 0.95))
        return truncate_profile(base, cutoff), _trunc_eval(base_eval, cutoff), sorted({*brk, cutoff})
    parts = [random_profile(rng, kinds=("pw", "bench", "hyper")) for _ in range(2)]
    g = sum_profiles([p[0] for p in parts])
    return g, _sum_eval([p[1] for p in parts]), sorted({b for p in parts for b in p[2]})


def random_es_profile(rng):
    """Random shortfall-class profile plus probe levels for round trips."""
    pick = int(rng.integers(0, 4))
    if pick == 0:
        z, zbp, _ = random_step(rng, max_atoms=5)
        g = BenchmarkESProfile(z)
        probes = [0.0, *zbp.tolist()]
    elif pick == 1:
        # single-part wrapper: forces synthesis from the slope data instead
        # of handing the stored benchmark straight back
        z, zbp, _ = random_step(rng, max_atoms=5)
        g = SumProfile((BenchmarkESProfile(z),))
        probes = [0.0, *zbp.tolist()]
    elif pick == 2:
        z1, b1, _ = random_step(rng, max_atoms=4)
        z2, b2, _ = random_step(rng, max_atoms=4)
        g = sum_profiles([BenchmarkESProfile(z1), BenchmarkESProfile(z2)])
        probes = sorted({0.0, *b1.tolist(), *b2.tolist()})
    else:
        c = float(rng.uniform(-1.0, 1.0))
        g = PiecewiseConstantProfile((c,), (1.0,))
        probes = [0.0, 1.0]
    probes = sorted({*probes, *rng.uniform(0.0, 1.0, 5).tolist()})
    return g, probes


def random_var_profile(rng):
    """Random quantile-class profile (finite everywhere on the unit interval)."""
    pick = int(rng.integers(0, 4))
    if pick == 0:
        g, _, _ = _random_pw(rng, through_one=True)
        return g
    if pick == 1:
        return HyperbolicProfile(float(rng.uniform(0.2, 2.0)))
    if pick == 2:
        return BenchmarkESProfile(random_step(rng, max_atoms=5)[0])
    z, _, _ = random_step(rng, max_atoms=4)
    return sum_profiles([BenchmarkESProfile(z), HyperbolicProfile(float(rng.uniform(0.2, 1.0)))])


# ---------------------------------------------------------------------------
# special-purpose builders
# ---------------------------------------------------------------------------


def random_feasible_density(rng, widths):
    """Nonnegative density with unit expectation and ceiling 1/(1 - p):
    fills a random selection of pieces at the ceiling, with one fractional
    straddler so the expectation lands on 1 exactly (up to rounding)."""
    widths = np.asarray(widths, dtype=float)
    p = float(rng.uniform(0.0, 0.95))
    cap = 1.0 / (1.0 - p)
    d = np.zeros(widths.size)
    need = 1.0 - p
    for i in rng.permutation(widths.size):
        if need <= 0.0:
            break
        take = min(float(widths[i]), need)
        d[i] = cap * take / float(widths[i])
        need -= take
    return d, p


def contract_once(rng, bp, vals):
    """Merge a block of adjacent atoms into its probability-weighted mean."""
    widths = widths_of(bp)
    n = vals.size
    i = int(rng.integers(0, n - 1))
    j = int(rng.integers(i + 2, n + 1))
    w = float(widths[i:j].sum())
    m = float(np.dot(widths[i:j], vals[i:j]) / w)
    new_bp = np.concatenate((bp[:i], [bp[j - 1]], bp[j:]))
    new_vals = np.concatenate((vals[:i], [m], vals[j:]))
    return new_bp, new_vals


def dominating_pair(rng, max_atoms=8):
    """(x, z) where x is a mean contraction of z pushed down by cash, so x
    carries no more risk than z at any tail level."""
    z, zbp, zvals = random_step(rng, max_atoms=max_atoms)
    bp, vals = zbp.copy(), zvals.copy()
    for _ in range(int(rng.integers(1, 4))):
        if vals.size < 2:
            break
        bp, vals = contract_once(rng, bp, vals)
    shift = float(rng.uniform(0.0, 0.5))
    x = StepQuantile(tuple(bp), tuple(vals - shift))
    return x, z


def comonotone_benchmark_instance(rng, n_parts):
    """Loss made of comonotone benchmark layers plus a strictly increasing
    residual layer; returns (x, layer models, top of the residual)."""
    zs = [random_step(rng, max_atoms=4)[0] for _ in range(n_parts)]
    grid = sorted({b for z in zs for b in z.breakpoints})
    residual = np.cumsum(rng.uniform(0.01, 0.5, len(grid)))
    totals = [sum(z.var(t) for z in zs) + float(residual[k]) for k, t in enumerate(grid)]
    x = StepQuantile(tuple(grid), tuple(totals))
    return x, zs, float(residual[-1])

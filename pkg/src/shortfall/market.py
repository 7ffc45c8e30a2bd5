"""Finite-state complete market and the closed-form portfolio solvers.

The optimal payoff for every problem here is a cash-shifted version of one
benchmark position Z: the payoff comonotone with the pricing density whose
distribution under the physical weights realizes the profile's benchmark.
States are split internally so benchmark atoms align with state boundaries;
a deterministic grid oracle is included to validate the solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadInput,
    GridTooLarge,
    IncompatibleAtoms,
    NotESClass,
    TargetUnreachable,
)
from .profiles import ProfileClass, benchmark_from_es_profile, classify, h_function
from .quantiles import StepQuantile, empirical_from_samples


@dataclass(frozen=True)
class MarketModel:
    """States with physical weight p > 0 and risk-neutral weight q >= 0; the
    pricing density is q/p statewise."""

    states: tuple

    def __post_init__(self):
        states = tuple((float(p), float(q)) for p, q in self.states)
        if not states:
            raise BadInput("states: need at least one state")
        for i, (p, q) in enumerate(states):
            if not (math.isfinite(p) and p > 0.0):
                raise BadInput(f"states[{i}].p: must be a positive probability")
            if not (math.isfinite(q) and q >= 0.0):
                raise BadInput(f"states[{i}].q: must be a nonnegative probability")
        if abs(sum(p for p, _ in states) - 1.0) > 1e-12:
            raise BadInput("states: physical probabilities must sum to 1")
        if abs(sum(q for _, q in states) - 1.0) > 1e-12:
            raise BadInput("states: risk-neutral probabilities must sum to 1")
        object.__setattr__(self, "states", states)

    @property
    def p(self) -> tuple:
        return tuple(p for p, _ in self.states)

    @property
    def q(self) -> tuple:
        return tuple(q for _, q in self.states)

    def density(self) -> tuple:
        return tuple(q / p for p, q in self.states)

    @classmethod
    def from_dict(cls, spec) -> "MarketModel":
        if not isinstance(spec, dict) or set(spec) != {"states"}:
            raise BadInput("market: must be an object with a 'states' array")
        raw = spec["states"]
        if not isinstance(raw, list) or not raw:
            raise BadInput("states: must be a nonempty array")
        pairs: list = []
        for i, st in enumerate(raw):
            if not isinstance(st, dict) or set(st) != {"p", "q"}:
                raise BadInput(f"states[{i}]: must be an object with fields 'p' and 'q'")
            for name in ("p", "q"):
                v = st[name]
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise BadInput(f"states[{i}].{name}: must be a number")
            pairs.append((st["p"], st["q"]))
        return cls(tuple(pairs))


@dataclass(frozen=True)
class Position:
    """State-indexed loss vector bound to the market it is written on."""

    payoff: tuple
    market: MarketModel

    def __post_init__(self):
        payoff = tuple(float(v) for v in self.payoff)
        if len(payoff) != len(self.market.states):
            raise BadInput("payoff: must assign one value per market state")
        if not all(math.isfinite(v) for v in payoff):
            raise BadInput("payoff: values must be finite")
        object.__setattr__(self, "payoff", payoff)

    def distribution(self) -> StepQuantile:
        return empirical_from_samples(self.payoff, weights=self.market.p)

    def pricing_expectation(self) -> float:
        return float(sum(q * v for q, v in zip(self.market.q, self.payoff)))

    def physical_expectation(self) -> float:
        return float(sum(p * v for p, v in zip(self.market.p, self.payoff)))


@dataclass(frozen=True)
class UtilityFn:
    """Concave nondecreasing piecewise-affine utility anchored at u(0) = 0;
    ``slopes`` has one more entry than ``kinks`` (leftmost piece first)."""

    kinks: tuple
    slopes: tuple

    def __post_init__(self):
        kinks = tuple(float(k) for k in self.kinks)
        slopes = tuple(float(s) for s in self.slopes)
        if len(slopes) != len(kinks) + 1:
            raise ValueError("need exactly one more slope than kinks")
        if not all(math.isfinite(k) for k in kinks) or any(
            b <= a for a, b in zip(kinks, kinks[1:])
        ):
            raise ValueError("kinks must be finite and strictly increasing")
        if not all(math.isfinite(s) and s >= 0.0 for s in slopes):
            raise ValueError("slopes must be finite and nonnegative")
        if any(b > a for a, b in zip(slopes, slopes[1:])):
            raise ValueError("slopes must be nonincreasing (concavity)")
        if all(s == 0.0 for s in slopes):
            raise ValueError("utility must be nonconstant")
        object.__setattr__(self, "kinks", kinks)
        object.__setattr__(self, "slopes", slopes)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = self.slopes[-1] * y
        for i, k in enumerate(self.kinks):
            gap = self.slopes[i] - self.slopes[i + 1]
            out = out + gap * (np.minimum(y - k, 0.0) - min(-k, 0.0))
        return out if out.ndim else float(out)

    def expectation(self, values, weights) -> float:
        return float(np.dot(np.asarray(weights, dtype=float), self(values)))

    def upper_limit(self) -> float:
        """sup of u: the plateau value when the rightmost slope is 0."""
        if self.slopes[-1] > 0.0:
            return math.inf
        return float(self(self.kinks[-1]))


@dataclass(frozen=True)
class SpectralFunctional:
    """Weighted mix of expected shortfalls at levels below 1: monotone, cash
    additive, and consistent with second-order dominance."""

    levels: tuple
    weights: tuple

    def __post_init__(self):
        levels = tuple(float(x) for x in self.levels)
        weights = tuple(float(w) for w in self.weights)
        if not levels or len(levels) != len(weights):
            raise ValueError("levels and weights must be equal-length and nonempty")
        if not all(0.0 <= p < 1.0 for p in levels):
            raise ValueError("levels must lie in [0, 1)")
        if not all(math.isfinite(w) and w >= 0.0 for w in weights):
            raise ValueError("weights must be nonnegative")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "weights", weights)

    def evaluate(self, dist) -> float:
        return float(sum(w * dist.es(p) for p, w in zip(self.levels, self.weights)))


def _num_array(obj, path, *, nonempty=False):
    if not isinstance(obj, list) or (nonempty and not obj):
        kind = "a nonempty" if nonempty else "an"
        raise BadInput(f"{path}: must be {kind} array of numbers")
    out: list = []
    for i, v in enumerate(obj):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise BadInput(f"{path}[{i}]: must be a number")
        out.append(float(v))
    return out


def utility_from_dict(spec) -> UtilityFn:
    if not isinstance(spec, dict) or set(spec) != {"kinks", "slopes"}:
        raise BadInput("utility: must be an object with 'kinks' and 'slopes'")
    kinks = _num_array(spec["kinks"], "utility.kinks")
    slopes = _num_array(spec["slopes"], "utility.slopes", nonempty=True)
    try:
        return UtilityFn(tuple(kinks), tuple(slopes))
    except ValueError as exc:
        raise BadInput(f"utility: {exc}") from exc


def spectral_from_dict(spec) -> SpectralFunctional:
    if not isinstance(spec, dict) or set(spec) != {"levels", "weights"}:
        raise BadInput("spectral: must be an object with 'levels' and 'weights'")
    levels = _num_array(spec["levels"], "spectral.levels", nonempty=True)
    weights = _num_array(spec["weights"], "spectral.weights", nonempty=True)
    try:
        return SpectralFunctional(tuple(levels), tuple(weights))
    except ValueError as exc:
        raise BadInput(f"spectral: {exc}") from exc


# -- comonotone construction ----------------------------------------------------


def _assign_comonotone(market: MarketModel, quantile: StepQuantile):
    """Lay a quantile function over the states comonotonically with the
    pricing density, splitting states so the distribution under the physical
    weights is matched exactly.

    Returns (refined (p, q) pairs, payoff per refined state, origin indices).
    Per-state totals are kept exact by writing each state's last fragment as
    the state total minus the other fragments.
    """
    dens = market.density()
    order = sorted(range(len(dens)), key=lambda i: (dens[i], i))
    cum_points: list = []
    total = 0.0
    for idx in order:
        total += market.states[idx][0]
        cum_points.append(total)
    cum_points[-1] = 1.0
    if any(b <= a for a, b in zip(cum_points, cum_points[1:])) or any(
        c >= 1.0 for c in cum_points[:-1]
    ):
        raise IncompatibleAtoms("internal: state probabilities too degenerate to split")
    grid = sorted(set(cum_points) | {b for b in quantile.breakpoints if b < 1.0} | {1.0})

    refined: list = []
    payoff: list = []
    origins: list = []
    prev = 0.0
    k = 0
    for pos, idx in enumerate(order):
        p_state, q_state = market.states[idx]
        top = cum_points[pos]
        sub: list = []
        while True:
            t = grid[k]
            sub.append(t)
            k += 1
            if t == top:
                break
        widths: list = []
        for t in sub[:-1]:
            widths.append(t - prev)
            prev = t
        widths.append(p_state - sum(widths))
        prev = top
        if widths[-1] <= 0.0:
            raise IncompatibleAtoms("internal: state splitting produced an empty cell")
        qs = [q_state * (w / p_state) for w in widths[:-1]]
        qs.append(max(0.0, q_state - sum(qs)))
        for w, qq, t in zip(widths, qs, sub):
            refined.append((w, qq))
            payoff.append(quantile.var(t))
            origins.append(idx)
    return tuple(refined), tuple(payoff), tuple(origins)


def construct_optimal_Z(market: MarketModel, g) -> Position:
    """Benchmark payoff comonotone with the pricing density whose shortfall
    curve under the physical weights reproduces g; its adjusted shortfall
    against g is zero, and no cheaper payoff achieves that."""
    if classify(g) is not ProfileClass.ES:
        raise NotESClass("optimal construction needs a shortfall-curve profile")
    bench = benchmark_from_es_profile(g)
    refined, payoff, _ = _assign_comonotone(market, bench)
    return Position(payoff, MarketModel(refined))


def comonotone_rearrangement(market: MarketModel, payoff) -> Position:
    """Same distribution under the physical weights, reordered (splitting
    states as needed) to move with the pricing density."""
    dist = empirical_from_samples(payoff, weights=market.p)
    refined, values, _ = _assign_comonotone(market, dist)
    return Position(values, MarketModel(refined))


# -- solvers ---------------------------------------------------------------------


def solve_problem_a(market: MarketModel, g, w, x):
    """Minimize the adjusted shortfall under the budget E_Q[w - X] <= x; the
    budget binds and the optimum is the benchmark shifted by the slack."""
    z_pos = construct_optimal_Z(market, g)
    shift = w - x - z_pos.pricing_expectation()
    return Position(tuple(v + shift for v in z_pos.payoff), z_pos.market), shift


def solve_problem_b(market: MarketModel, g, w, x):
    """Minimize the hedging cost E_Q[w - X] with the adjusted shortfall
    capped at x; returns the position and its cost."""
    z_pos = construct_optimal_Z(market, g)
    price = w - x - z_pos.pricing_expectation()
    return Position(tuple(v + x for v in z_pos.payoff), z_pos.market), price


def solve_problem_c(market: MarketModel, g, w, x, u: UtilityFn):
    """Smallest benchmark shift z with E[u(w - Z - z)] <= x, by bisection.

    The expectation is continuous and nonincreasing in z, so the feasible
    shifts form a right half-line; when the utility plateaus at or below x
    every shift qualifies and no smallest one exists.
    """
    z_pos = construct_optimal_Z(market, g)
    weights = z_pos.market.p
    values = np.asarray(z_pos.payoff)

    def f(shift):
        return u.expectation(w - values - shift, weights)

    if u.upper_limit() <= x:
        raise TargetUnreachable("utility target is met by every shift; no minimal risk exists")
    center = w - z_pos.physical_expectation()
    lo = center - 1.0
    for _ in range(200):
        if f(lo) > x:
            break
        lo = center - 2.0 * (center - lo)
    hi = center + 1.0
    for _ in range(200):
        if f(hi) <= x:
            break
        hi = center + 2.0 * (hi - center)
    for _ in range(200):
        if hi - lo <= 1e-12:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) <= x:
            hi = mid
        else:
            lo = mid
    return Position(tuple(v + hi for v in z_pos.payoff), z_pos.market), hi


def solve_problem_d(market: MarketModel, g, w, x, u: UtilityFn):
    """Worst expected utility among positions whose adjusted shortfall is at
    most x; attained at the shifted benchmark."""
    z_pos = construct_optimal_Z(market, g)
    payoff = tuple(v + x for v in z_pos.payoff)
    worst = u.expectation([w - v for v in payoff], z_pos.market.p)
    return Position(payoff, z_pos.market), worst


def solve_problem_e(market: MarketModel, g, x, rho_prime: SpectralFunctional):
    """Largest spectral risk reading among positions whose adjusted shortfall
    is at most x: the shifted benchmark, worth x plus the spectral average of
    the profile."""
    z_pos = construct_optimal_Z(market, g)
    payoff = tuple(v + x for v in z_pos.payoff)
    worst = x + float(sum(wt * g(p) for p, wt in zip(rho_prime.levels, rho_prime.weights)))
    return Position(payoff, z_pos.market), worst


# -- grid oracle -----------------------------------------------------------------


def _rowwise_es(sorted_vals, sorted_cums, level):
    """ES at one level for many finite distributions at once; rows are
    pre-sorted values with matching cumulative weights."""
    if level >= 1.0:
        return sorted_vals[:, -1].copy()
    prev = np.concatenate(
        [np.zeros((sorted_cums.shape[0], 1)), sorted_cums[:, :-1]], axis=1
    )
    overlap = np.minimum(sorted_cums, 1.0) - np.maximum(prev, level)
    np.clip(overlap, 0.0, None, out=overlap)
    return (overlap * sorted_vals).sum(axis=1) / (1.0 - level)


def _es_candidate_levels(market: MarketModel, g) -> list:
    """Levels that can carry the supremum for any payoff on this market: all
    subset sums of the state weights plus the profile's breakpoints."""
    sums = {0.0}
    for p_i, _ in market.states:
        sums |= {min(s + p_i, 1.0) for s in sums}
    levels = sums | set(h_function(g).grid)
    return [l for l in sorted(levels) if g(l) < math.inf]


def _sorted_rows(matrix, p):
    order = np.argsort(matrix, axis=1, kind="stable")
    vals = np.take_along_axis(matrix, order, axis=1)
    cums = np.cumsum(p[order], axis=1)
    return vals, cums


def _functional(market: MarketModel, spec):
    """Vectorized evaluator over payoff matrices for an oracle tag:
    ("adjusted_es", g), ("price", w), ("utility", u, w), ("spectral", s), or
    a plain per-payoff callable."""
    p = np.asarray(market.p)
    q = np.asarray(market.q)
    if callable(spec):
        return lambda m: np.apply_along_axis(spec, 1, m)
    tag = spec[0]
    if tag == "price":
        w = float(spec[1])
        return lambda m: w - m @ q
    if tag == "utility":
        u, w = spec[1], float(spec[2])
        return lambda m: np.asarray(u(w - m)) @ p
    if tag == "adjusted_es":
        g = spec[1]
        levels = _es_candidate_levels(market, g)
        penalties = [g(l) for l in levels]

        def eval_adjusted(m):
            vals, cums = _sorted_rows(m, p)
            best = np.full(m.shape[0], -np.inf)
            for level, pen in zip(levels, penalties):
                np.maximum(best, _rowwise_es(vals, cums, level) - pen, out=best)
            return best

        return eval_adjusted
    if tag == "spectral":
        s = spec[1]

        def eval_spectral(m):
            vals, cums = _sorted_rows(m, p)
            out = np.zeros(m.shape[0])
            for level, wt in zip(s.levels, s.weights):
                out += wt * _rowwise_es(vals, cums, level)
            return out

        return eval_spectral
    raise ValueError(f"unknown functional tag {spec!r}")


def brute_force_oracle(
    market: MarketModel,
    objective,
    constraint,
    *,
    step,
    radius,
    center=None,
    maximize=False,
):
    """Exhaustive deterministic search over a payoff grid.

    ``objective`` is a functional tag (see ``_functional``); ``constraint``
    is (functional tag, "<=" or ">=", bound), applied with 1e-9 slack.  Ties
    break toward the lexicographically first grid point, and the evaluation
    budget is capped at 1e8 points.
    """
    n = len(market.states)
    k = int(round(radius / step))
    axis = np.arange(-k, k + 1) * float(step)
    if center is None:
        centers = np.zeros(n)
    elif np.ndim(center) == 0:
        centers = np.full(n, float(center))
    else:
        centers = np.asarray(center, dtype=float)
    npts = len(axis) ** n
    if npts > 10**8:
        raise GridTooLarge(f"{npts} grid evaluations exceed the 1e8 budget")
    obj_f = _functional(market, objective)
    cons_spec, sense, bound = constraint
    cons_f = _functional(market, cons_spec)
    sign = -1.0 if maximize else 1.0

    coords = [centers[i] + axis for i in range(n)]
    if n > 1:
        rest = np.stack(
            [g.ravel() for g in np.meshgrid(*coords[1:], indexing="ij")], axis=1
        )
    else:
        rest = np.zeros((1, 0))
    chunk = max(1, 2_000_000 // len(rest))
    best_val = math.inf
    best_payoff = None
    first = coords[0]
    for i0 in range(0, len(first), chunk):
        block = first[i0 : i0 + chunk]
        m = np.concatenate(
            [
                np.repeat(block, len(rest))[:, None],
                np.tile(rest, (len(block), 1)),
            ],
            axis=1,
        )
        vals = sign * obj_f(m)
        cvals = cons_f(m)
        if sense == "<=":
            feas = cvals <= bound + 1e-9
        else:
            feas = cvals >= bound - 1e-9
        if not np.any(feas):
            continue
        vals = np.where(feas, vals, np.inf)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val = float(vals[j])
            best_payoff = tuple(float(v) for v in m[j])
    if best_payoff is None:
        raise ValueError("no feasible grid point")
    return Position(best_payoff, market), sign * best_val

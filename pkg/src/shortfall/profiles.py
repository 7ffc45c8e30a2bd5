"""Risk-profile variants g on [0,1] and their algebra.

A profile is a nondecreasing extended-real function on [0,1] with a finite
value at 0, kept in closed form: step levels, the shortfall curve of a
benchmark loss, or a hyperbolic ramp, optionally truncated to +inf above a
cutoff and combined by sums and positive scaling.  The transform
h(p) = (1-p)*g(p) is piecewise affine for every variant, which makes
classification and benchmark synthesis exact; evaluation at a stored
breakpoint never interpolates.
"""

from __future__ import annotations

import enum
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from .errors import InvalidProfile, NotESClass, NotVaRClass, OutOfRangeLevel
from .quantiles import StepQuantile, _check_level

INF = math.inf

_JUMP_TOL = 1e-12
_SLOPE_TOL = 1e-12


@dataclass(frozen=True)
class HFunction:
    """Piecewise-affine h(p) = (1-p)*g(p) on the finite region of g.

    ``grid`` runs from 0 to the end of the finite region; piece j is the
    interval (grid[j], grid[j+1]) with right limit ``starts[j]`` at its left
    end and left limit ``ends[j]`` at its right end.  Profiles are
    left-continuous, so the value AT an interior grid point is the ``ends``
    of the piece closing there.  Above the finite region (when it stops short
    of 1) h is +inf; h(1) = 0 under the 0*inf convention.
    """

    grid: tuple
    starts: tuple
    ends: tuple

    @property
    def finite_end(self) -> float:
        return self.grid[-1]

    def _interp(self, j, p) -> float:
        t0, t1 = self.grid[j], self.grid[j + 1]
        return self.starts[j] + (self.ends[j] - self.starts[j]) * (p - t0) / (t1 - t0)

    def value(self, p) -> float:
        p = _check_level(p)
        if p == 1.0:
            return 0.0
        if p == 0.0:
            return self.starts[0]
        if p > self.grid[-1]:
            return INF
        j = bisect_left(self.grid, p)
        if self.grid[j] == p:
            return self.ends[j - 1]
        return self._interp(j - 1, p)

    def right_limit(self, p) -> float:
        """h(p+); callers stay strictly below the finite end."""
        j = bisect_right(self.grid, p) - 1
        if j >= len(self.starts):
            return INF
        if self.grid[j] == p:
            return self.starts[j]
        return self._interp(j, p)

    def left_limit(self, p) -> float:
        if p > self.grid[-1]:
            return INF
        j = bisect_left(self.grid, p)
        if self.grid[j] == p:
            return self.ends[j - 1] if j > 0 else self.starts[0]
        return self._interp(j - 1, p)

    def limit_at_one(self) -> float:
        """Left limit of h at 1; +inf when the profile blows up earlier."""
        return self.ends[-1] if self.grid[-1] == 1.0 else INF

    def slopes(self) -> tuple:
        return tuple(
            (self.ends[j] - self.starts[j]) / (self.grid[j + 1] - self.grid[j])
            for j in range(len(self.starts))
        )

    def interior_jumps(self) -> tuple:
        return tuple(self.starts[j] - self.ends[j - 1] for j in range(1, len(self.starts)))


class ProfileClass(enum.Enum):
    GENERAL = "general"
    VAR = "VaR"
    ES = "ES"


@dataclass(frozen=True)
class PiecewiseConstantProfile:
    """Step profile: levels[k] on (thresholds[k-1], thresholds[k]], and +inf
    above the last threshold when it stops short of 1.  Runs of equal levels
    are merged at construction."""

    levels: tuple
    thresholds: tuple

    def __post_init__(self):
        lv = tuple(float(x) for x in self.levels)
        th = tuple(float(t) for t in self.thresholds)
        if len(lv) == 0 or len(lv) != len(th):
            raise ValueError("levels and thresholds must be equal-length and nonempty")
        if not all(math.isfinite(x) for x in lv):
            raise ValueError("levels must be finite")
        if any(b < a for a, b in zip(lv, lv[1:])):
            raise ValueError("levels must be nondecreasing")
        if not all(math.isfinite(t) for t in th):
            raise ValueError("thresholds must be finite")
        if th[0] <= 0.0 or any(b <= a for a, b in zip(th, th[1:])) or th[-1] > 1.0:
            raise ValueError("thresholds must be strictly increasing in (0, 1]")
        keep_l: list = []
        keep_t: list = []
        for k in range(len(lv)):
            if keep_l and lv[k] == keep_l[-1]:
                keep_t[-1] = th[k]
            else:
                keep_l.append(lv[k])
                keep_t.append(th[k])
        object.__setattr__(self, "levels", tuple(keep_l))
        object.__setattr__(self, "thresholds", tuple(keep_t))

    def __call__(self, p) -> float:
        p = _check_level(p)
        if p == 0.0:
            return self.levels[0]
        k = bisect_left(self.thresholds, p)
        if k == len(self.levels):
            return INF
        return self.levels[k]

    def _h(self) -> HFunction:
        grid = (0.0,) + self.thresholds
        starts = tuple((1.0 - grid[j]) * self.levels[j] for j in range(len(self.levels)))
        ends = tuple((1.0 - grid[j + 1]) * self.levels[j] for j in range(len(self.levels)))
        return HFunction(grid, starts, ends)


@dataclass(frozen=True)
class BenchmarkESProfile:
    """Profile equal to the expected-shortfall curve of a benchmark loss;
    finite on all of [0, 1]."""

    benchmark: StepQuantile

    def __call__(self, p) -> float:
        return self.benchmark.es(p)

    def _h(self) -> HFunction:
        z = self.benchmark
        grid = (0.0,) + z.breakpoints
        vals = tuple(z.tail_integral(t) for t in grid)
        return HFunction(grid, vals[:-1], vals[1:])


@dataclass(frozen=True)
class HyperbolicProfile:
    """g(p) = scale / (1 - p) with g(1) = +inf."""

    scale: float

    def __post_init__(self):
        s = float(self.scale)
        if not (math.isfinite(s) and s > 0.0):
            raise ValueError("scale must be a positive real")
        object.__setattr__(self, "scale", s)

    def __call__(self, p) -> float:
        p = _check_level(p)
        if p == 1.0:
            return INF
        return self.scale / (1.0 - p)

    def _h(self) -> HFunction:
        return HFunction((0.0, 1.0), (self.scale,), (self.scale,))


@dataclass(frozen=True)
class SumProfile:
    """Pointwise sum of profiles, +inf absorbing."""

    parts: tuple

    def __post_init__(self):
        if len(self.parts) == 0:
            raise ValueError("sum needs at least one part")

    def __call__(self, p) -> float:
        p = _check_level(p)
        return sum(part(p) for part in self.parts)

    def _h(self) -> HFunction:
        hs = [part._h() for part in self.parts]
        fe = min(h.finite_end for h in hs)
        pts = {0.0, fe}
        for h in hs:
            pts.update(t for t in h.grid if t < fe)
        grid = tuple(sorted(pts))
        starts = tuple(
            sum(h.right_limit(grid[j]) for h in hs) for j in range(len(grid) - 1)
        )
        ends = tuple(
            sum(h.left_limit(grid[j + 1]) for h in hs) for j in range(len(grid) - 1)
        )
        return HFunction(grid, starts, ends)


@dataclass(frozen=True)
class TruncatedProfile:
    """Base profile forced to +inf strictly above ``cutoff``."""

    base: object
    cutoff: float

    def __post_init__(self):
        c = float(self.cutoff)
        if not (0.0 < c < 1.0):
            raise OutOfRangeLevel("truncation level must lie strictly inside (0, 1)")
        object.__setattr__(self, "cutoff", c)

    def __call__(self, p) -> float:
        p = _check_level(p)
        if p > self.cutoff:
            return INF
        return self.base(p)

    def _h(self) -> HFunction:
        bh = self.base._h()
        c = self.cutoff
        if c >= bh.finite_end:
            return bh
        j = bisect_left(bh.grid, c)
        if bh.grid[j] == c:
            return HFunction(bh.grid[: j + 1], bh.starts[:j], bh.ends[:j])
        return HFunction(
            bh.grid[:j] + (c,),
            bh.starts[:j],
            bh.ends[: j - 1] + (bh.left_limit(c),),
        )


def h_function(g) -> HFunction:
    """The transform p -> (1-p)*g(p) in exact piecewise-affine form."""
    return g._h()


def classify(g) -> ProfileClass:
    """Place a profile in the representability hierarchy.

    Finite on [0,1) is required for a quantile representation (VaR); on top
    of that, a concave h with left limit 0 at 1 is exactly representability
    as a shortfall curve (ES).  Left/right continuity holds structurally for
    every variant, so only these conditions are checked.
    """
    if isinstance(g, BenchmarkESProfile):
        return ProfileClass.ES
    h = g._h()
    if h.finite_end < 1.0:
        return ProfileClass.GENERAL
    slopes = h.slopes()
    scale = max(1.0, max(abs(s) for s in slopes))
    concave = all(abs(j) <= _JUMP_TOL for j in h.interior_jumps()) and all(
        b <= a + _SLOPE_TOL * scale for a, b in zip(slopes, slopes[1:])
    )
    if concave and abs(h.limit_at_one()) <= _JUMP_TOL:
        return ProfileClass.ES
    return ProfileClass.VAR


def benchmark_from_es_profile(g) -> StepQuantile:
    """Benchmark loss whose shortfall curve reproduces g.

    The quantile value on each piece is minus the slope of h there; a profile
    already given by a benchmark returns that benchmark unchanged.
    """
    if isinstance(g, BenchmarkESProfile):
        return g.benchmark
    if classify(g) is not ProfileClass.ES:
        raise NotESClass("profile is not the shortfall curve of any benchmark")
    h = g._h()
    vals: list = []
    for s in h.slopes():
        v = -s
        if vals and v < vals[-1]:
            v = vals[-1]  # slope differences can wobble below the exact order
        vals.append(v)
    return StepQuantile(h.grid[1:], tuple(vals))


@dataclass(frozen=True)
class VaRBenchmark:
    """Evaluation-only quantile handle for Z = g(U): var(p) = g(p)."""

    profile: object

    def var(self, p) -> float:
        return self.profile(p)


def var_benchmark_from_profile(g):
    """Quantile representation of g(U).

    A step profile that stays finite through 1 is its own step quantile;
    curved or unbounded profiles come back as an evaluation handle.
    """
    cls = classify(g)
    if cls is ProfileClass.GENERAL:
        raise NotVaRClass("profile is infinite below 1; no quantile realizes it")
    if isinstance(g, PiecewiseConstantProfile) and g.thresholds[-1] == 1.0:
        return StepQuantile(g.thresholds, g.levels)
    return VaRBenchmark(g)


def sum_profiles(gs):
    parts: list = []
    for g in gs:
        if isinstance(g, SumProfile):
            parts.extend(g.parts)
        else:
            parts.append(g)
    if not parts:
        raise ValueError("need at least one profile")
    if len(parts) == 1:
        return parts[0]
    return SumProfile(tuple(parts))


def scale_profile(g, n):
    """Pointwise n*g for n > 0, pushed into the representation so breakpoint
    evaluation stays exact."""
    n = float(n)
    if not (math.isfinite(n) and n > 0.0):
        raise ValueError("profile scale factor must be positive")
    if isinstance(g, PiecewiseConstantProfile):
        return PiecewiseConstantProfile(tuple(n * x for x in g.levels), g.thresholds)
    if isinstance(g, BenchmarkESProfile):
        return BenchmarkESProfile(g.benchmark.scale(n))
    if isinstance(g, HyperbolicProfile):
        return HyperbolicProfile(n * g.scale)
    if isinstance(g, SumProfile):
        return SumProfile(tuple(scale_profile(part, n) for part in g.parts))
    if isinstance(g, TruncatedProfile):
        return TruncatedProfile(scale_profile(g.base, n), g.cutoff)
    raise TypeError(f"not a profile: {g!r}")


def truncate_profile(g, cutoff) -> TruncatedProfile:
    cutoff = float(cutoff)
    if not (0.0 < cutoff < 1.0):
        raise OutOfRangeLevel("truncation level must lie strictly inside (0, 1)")
    if isinstance(g, TruncatedProfile):
        return TruncatedProfile(g.base, min(g.cutoff, cutoff))
    return TruncatedProfile(g, cutoff)


# -- JSON loading -------------------------------------------------------------

_ALLOWED_FIELDS = {
    "piecewise_constant": {"pieces", "infinite_above"},
    "benchmark_es": {"quantile"},
    "hyperbolic": {"scale"},
}


def _require_number(obj, path):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise InvalidProfile(f"{path}: must be a number")
    x = float(obj)
    if not math.isfinite(x):
        raise InvalidProfile(f"{path}: must be finite")
    return x


def _piecewise_from_dict(spec):
    pieces = spec.get("pieces")
    if not isinstance(pieces, list) or not pieces:
        raise InvalidProfile("pieces: must be a nonempty array")
    levels: list = []
    thresholds: list = []
    prev_up = 0.0
    prev_lv = -INF
    for i, piece in enumerate(pieces):
        if not isinstance(piece, dict) or set(piece) != {"upto", "level"}:
            raise InvalidProfile(
                f"pieces[{i}]: must be an object with fields 'upto' and 'level'"
            )
        up = _require_number(piece["upto"], f"pieces[{i}].upto")
        lv = _require_number(piece["level"], f"pieces[{i}].level")
        if not (0.0 < up <= 1.0):
            raise InvalidProfile(f"pieces[{i}].upto: must lie in (0, 1]")
        if up <= prev_up:
            raise InvalidProfile(f"pieces[{i}].upto: must exceed the previous boundary")
        if lv < prev_lv:
            raise InvalidProfile(f"pieces[{i}].level: levels must be nondecreasing")
        prev_up, prev_lv = up, lv
        thresholds.append(up)
        levels.append(lv)
    if "infinite_above" in spec:
        ia = _require_number(spec["infinite_above"], "infinite_above")
        if abs(ia - thresholds[-1]) > 1e-12:
            raise InvalidProfile("infinite_above: must equal the last piece boundary")
    return PiecewiseConstantProfile(tuple(levels), tuple(thresholds))


def _benchmark_from_dict(spec):
    q = spec.get("quantile")
    if not isinstance(q, dict) or set(q) != {"breakpoints", "values"}:
        raise InvalidProfile("quantile: must be an object with 'breakpoints' and 'values'")
    bp = q["breakpoints"]
    vals = q["values"]
    if not isinstance(bp, list) or not bp:
        raise InvalidProfile("quantile.breakpoints: must be a nonempty array")
    if not isinstance(vals, list) or len(vals) != len(bp):
        raise InvalidProfile("quantile.values: must match breakpoints in length")
    bp = [_require_number(b, f"quantile.breakpoints[{i}]") for i, b in enumerate(bp)]
    vals = [_require_number(v, f"quantile.values[{i}]") for i, v in enumerate(vals)]
    try:
        z = StepQuantile(tuple(bp), tuple(vals))
    except ValueError as exc:
        raise InvalidProfile(f"quantile: {exc}") from exc
    return BenchmarkESProfile(z)


def _hyperbolic_from_dict(spec):
    if "scale" not in spec:
        raise InvalidProfile("scale: field is required")
    s = _require_number(spec["scale"], "scale")
    if s <= 0.0:
        raise InvalidProfile("scale: must be a positive number")
    return HyperbolicProfile(s)


def profile_from_dict(spec):
    """Build a profile from its JSON description.

    Validation failures name the offending field, e.g. "pieces[2].upto: must
    exceed the previous boundary".
    """
    if not isinstance(spec, dict):
        raise InvalidProfile("profile: must be a JSON object")
    kind = spec.get("kind")
    if kind is None:
        raise InvalidProfile("kind: field is required")
    builders = {
        "piecewise_constant": _piecewise_from_dict,
        "benchmark_es": _benchmark_from_dict,
        "hyperbolic": _hyperbolic_from_dict,
    }
    if kind not in builders:
        raise InvalidProfile(f"kind: unknown profile kind {kind!r}")
    allowed = {"kind", "truncate_at"} | _ALLOWED_FIELDS[kind]
    for key in spec:
        if key not in allowed:
            raise InvalidProfile(f"{key}: unknown field for kind {kind!r}")
    g = builders[kind](spec)
    if "truncate_at" in spec:
        cut = _require_number(spec["truncate_at"], "truncate_at")
        if not (0.0 < cut < 1.0):
            raise InvalidProfile("truncate_at: must lie strictly between 0 and 1")
        g = truncate_profile(g, cut)
    return g

"""Loss models: construction, quantiles, tail means, and their invariants.

Reference numbers come from the independent oracles in helpers.py (suffix
sums, dense-grid summation, bisected normal quantiles, quadrature tail
means), never from the package's own arithmetic.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import helpers
from shortfall import (
    BadWeights,
    EmptySample,
    GaussianLoss,
    OutOfRangeLevel,
    StepQuantile,
    UnboundedQuantile,
    comonotone_mix,
    empirical_from_samples,
    es,
    es_curve,
    gaussian_es,
    var,
)

# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def test_equal_weight_samples():
    x = empirical_from_samples([1, 2, 3, 4])
    assert x.breakpoints == (0.25, 0.5, 0.75, 1.0)
    assert x.values == (1.0, 2.0, 3.0, 4.0)


def test_point_mass():
    x = empirical_from_samples([5])
    assert x.breakpoints == (1.0,)
    assert x.values == (5.0,)


def test_weighted_samples_sort_by_value():
    x = empirical_from_samples([3, 1], weights=[0.25, 0.75])
    assert x.breakpoints == (0.75, 1.0)
    assert x.values == (1.0, 3.0)


def test_duplicate_samples_merge():
    x = empirical_from_samples([2.0, 1.0, 2.0])
    assert x.values == (1.0, 2.0)
    assert x.breakpoints == (1 / 3, 1.0)


def test_zero_weight_samples_drop():
    x = empirical_from_samples([7.0, 1.0], weights=[0.0, 1.0])
    assert x.values == (1.0,)
    assert x.breakpoints == (1.0,)


def test_empty_sample_rejected():
    with pytest.raises(EmptySample):
        empirical_from_samples([])


def test_bad_weights_rejected():
    with pytest.raises(BadWeights):
        empirical_from_samples([1, 2], weights=[0.5])
    with pytest.raises(BadWeights):
        empirical_from_samples([1, 2], weights=[-0.5, 1.5])
    with pytest.raises(BadWeights):
        empirical_from_samples([1, 2], weights=[0.3, 0.3])


def test_non_finite_samples_rejected():
    with pytest.raises(ValueError):
        empirical_from_samples([1.0, math.nan])
    with pytest.raises(ValueError):
        empirical_from_samples([1.0, math.inf])


def test_constructor_validation():
    with pytest.raises(ValueError):
        StepQuantile((0.5,), (1.0, 2.0))  # length mismatch
    with pytest.raises(ValueError):
        StepQuantile((0.5, 0.9), (1.0, 2.0))  # does not reach 1
    with pytest.raises(ValueError):
        StepQuantile((0.5, 1.0), (2.0, 1.0))  # decreasing values
    with pytest.raises(ValueError):
        StepQuantile((1.0,), (math.inf,))


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=9))
def test_atoms_round_trip(ints):
    x = empirical_from_samples([float(v) for v in ints])
    atoms = x.atoms()
    y = empirical_from_samples([v for _, v in atoms], weights=[w for w, _ in atoms])
    assert len(y.atoms()) == len(atoms)
    for (wa, va), (wb, vb) in zip(atoms, y.atoms()):
        assert vb == va
        assert wb == pytest.approx(wa, abs=1e-12)


# ---------------------------------------------------------------------------
# left quantiles
# ---------------------------------------------------------------------------


def test_var_four_samples():
    x = empirical_from_samples([1, 2, 3, 4])
    assert var(x, 0.5) == 2.0
    assert var(x, 0.25) == 1.0  # boundary belongs to the piece ending there
    assert var(x, 0.2500001) == 2.0
    assert var(x, 0.0) == 1.0
    assert var(x, 1.0) == 4.0


def test_var_matches_oracle_on_random_models():
    rng = np.random.default_rng(101)
    for _ in range(50):
        x, bp, vals = helpers.random_step(rng)
        ps = np.concatenate((rng.uniform(0, 1, 20), bp, [0.0, 1.0]))
        want = helpers.oracle_var(bp, vals, ps)
        for p, w in zip(ps, want):
            assert var(x, float(p)) == w


def test_level_out_of_range():
    x = empirical_from_samples([1.0])
    for bad in (-0.1, 1.1, math.nan):
        with pytest.raises(OutOfRangeLevel):
            var(x, bad)
    with pytest.raises(OutOfRangeLevel):
        es(x, 2.0)


def test_gaussian_var():
    g = GaussianLoss(0.0, 1.0)
    assert var(g, 0.5) == pytest.approx(0.0, abs=1e-12)
    for p in (0.1, 0.5, 0.9, 0.99):
        assert var(g, p) == pytest.approx(helpers.normal_quantile(p), abs=1e-11)
    with pytest.raises(UnboundedQuantile):
        var(g, 0.0)
    with pytest.raises(UnboundedQuantile):
        var(g, 1.0)


def test_degenerate_gaussian_is_a_constant():
    flat = GaussianLoss(3.0, 0.0)
    assert var(flat, 0.0) == 3.0
    assert var(flat, 1.0) == 3.0
    assert es(flat, 0.5) == 3.0


# ---------------------------------------------------------------------------
# tail means
# ---------------------------------------------------------------------------


def test_es_four_samples():
    x = empirical_from_samples([1, 2, 3, 4])
    assert es(x, 0.0) == 2.5
    assert es(x, 0.5) == 3.5
    assert es(x, 0.25) == 3.0
    assert es(x, 1.0) == 4.0


def test_es_at_zero_is_the_mean():
    rng = np.random.default_rng(102)
    for _ in range(20):
        x, bp, vals = helpers.random_step(rng)
        assert es(x, 0.0) == x.mean
        assert x.mean == pytest.approx(float(np.dot(helpers.widths_of(bp), vals)), abs=1e-12)


def test_es_matches_dense_grid_summation():
    rng = np.random.default_rng(103)
    for _ in range(40):
        x, bp, vals = helpers.random_step(rng)
        for p in (0.0, 0.3, 0.77):
            assert abs(es(x, p) - helpers.oracle_es_sum(bp, vals, p)) <= 1e-6


@given(
    st.lists(st.floats(-50, 50), min_size=1, max_size=12),
    st.floats(0, 1),
    st.floats(0, 1),
)
def test_es_monotone_in_level(samples, a, b):
    x = empirical_from_samples(samples)
    p, q = min(a, b), max(a, b)
    assert es(x, p) <= es(x, q) + 1e-9


@given(
    st.lists(st.floats(-10, 10), min_size=1, max_size=10),
    st.floats(-5, 5),
    st.floats(0.01, 4),
    st.floats(0, 0.999),
)
def test_cash_and_scale_equivariance(samples, m, lam, p):
    x = empirical_from_samples(samples)
    assert es(x.shift(m), p) == pytest.approx(es(x, p) + m, abs=1e-9)
    assert es(x.scale(lam), p) == pytest.approx(lam * es(x, p), rel=1e-12, abs=1e-12)


# ---------------------------------------------------------------------------
# Gaussian tail means
# ---------------------------------------------------------------------------


def test_gaussian_es_reference_values():
    assert abs(gaussian_es(1.0, 0.125, 0.99) - 1.33) < 0.01
    assert abs(gaussian_es(0.0, 0.5, 0.9975) - 1.55) < 0.01
    assert gaussian_es(2.5, 0.0, 0.9) == 2.5


def test_gaussian_es_against_quadrature():
    for mu, sigma in ((0.0, 1.0), (1.0, 0.125), (-0.5, 2.0)):
        for p in (0.5, 0.9, 0.95, 0.99, 0.9975):
            want = helpers.gaussian_es_quad(mu, sigma, p)
            assert abs(gaussian_es(mu, sigma, p) - want) <= 1e-8


def test_gaussian_es_endpoints():
    g = GaussianLoss(0.3, 1.7)
    assert es(g, 0.0) == 0.3
    assert es(g, 1.0) == math.inf
    for p in (0.0, 0.25, 0.9):
        assert gaussian_es(0.3, 1.7, p) == es(g, p)


def test_gaussian_discretization():
    d = GaussianLoss(0.0, 1.0).discretize(10_000)
    assert d.mean == pytest.approx(0.0, abs=1e-10)
    # bucket boundaries carry the exact tail means by construction
    for p in (0.5, 0.9, 0.99):
        assert es(d, p) == pytest.approx(gaussian_es(0.0, 1.0, p), abs=1e-9)
    assert var(d, 0.5) < var(d, 0.9)


# ---------------------------------------------------------------------------
# curves and mixtures
# ---------------------------------------------------------------------------


def test_es_curve_values():
    curve = es_curve(empirical_from_samples([1, 2, 3, 4]))
    assert [curve(p) for p in (0.0, 0.25, 0.5, 0.75)] == [2.5, 3.0, 3.5, 4.0]


def test_es_curve_of_point_mass_is_constant():
    curve = es_curve(empirical_from_samples([5]))
    assert {curve(p) for p in (0.0, 0.4, 1.0)} == {5.0}


def test_comonotone_mix_adds_quantiles():
    rng = np.random.default_rng(104)
    x, _, _ = helpers.random_step(rng)
    y, _, _ = helpers.random_step(rng)
    m = comonotone_mix(x, y, 0.25)
    for p in (0.0, 0.1, 0.5, 0.82, 1.0):
        assert m.var(p) == pytest.approx(0.25 * x.var(p) + 0.75 * y.var(p), abs=1e-12)

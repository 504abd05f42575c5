import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats as sps

from manetmob.experiments import PUBLISHED_TABLE2
from manetmob.stats import (
    DecayModel,
    ParetoFit,
    ParetoRegime,
    PoissonRegime,
    Statistic,
    TruncatedGaussianSpec,
    decay_fit,
    interarrival_sample,
    ks_statistic,
    pareto_pdf,
    pareto_shape_from_k,
    sample_truncated_gaussian,
    select_arrival_regime,
)

TABLE2_K = [row[3] for row in PUBLISHED_TABLE2]
WALKING = TruncatedGaussianSpec(1.34, 0.5, 0.1, 1.0)


def brute_ks(a, b):
    """Evaluate both ECDFs at every observed point and take the largest gap."""
    def ecdf(sample, x):
        return sum(1 for s in sample if s <= x) / len(sample)

    return max(abs(ecdf(a, x) - ecdf(b, x)) for x in list(a) + list(b))


# --- truncated Gaussian --------------------------------------------------------

def test_truncated_gaussian_bounds():
    draws = sample_truncated_gaussian(WALKING, np.random.default_rng(0), size=100_000)
    assert draws.shape == (100_000,)
    assert draws.min() >= 0.1 and draws.max() <= 1.0


def test_truncated_gaussian_scalar_draw():
    v = sample_truncated_gaussian(WALKING, np.random.default_rng(0))
    assert isinstance(v, float) and 0.1 <= v <= 1.0


def test_truncated_gaussian_wide_bounds_mean():
    spec = TruncatedGaussianSpec(1.34, 0.5, -1e10, 1e10)
    draws = sample_truncated_gaussian(spec, np.random.default_rng(1), size=100_000)
    assert abs(draws.mean() - 1.34) <= 0.01


def test_truncated_gaussian_density_increases_toward_upper_bound():
    draws = sample_truncated_gaussian(WALKING, np.random.default_rng(2), size=100_000)
    counts, _ = np.histogram(draws, bins=9, range=(0.1, 1.0))
    assert np.all(np.diff(counts) > 0)


def test_truncated_gaussian_matches_scipy_truncnorm():
    a, b = (0.1 - 1.34) / 0.5, (1.0 - 1.34) / 0.5
    draws = sample_truncated_gaussian(WALKING, np.random.default_rng(3), size=20_000)
    res = sps.kstest(draws, sps.truncnorm(a, b, loc=1.34, scale=0.5).cdf)
    assert res.pvalue > 0.001


def test_truncated_gaussian_seed_invariance():
    d1 = sample_truncated_gaussian(WALKING, np.random.default_rng(10), size=100_000)
    d2 = sample_truncated_gaussian(WALKING, np.random.default_rng(11), size=100_000)
    assert ks_statistic(d1, d2) < 0.02


def test_truncated_gaussian_degenerate_rejected():
    with pytest.raises(ValueError):
        sample_truncated_gaussian(TruncatedGaussianSpec(0.0, 0.1, 50.0, 51.0), np.random.default_rng(0))
    with pytest.raises(ValueError):
        TruncatedGaussianSpec(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        TruncatedGaussianSpec(1.0, 0.5, 1.0, 1.0)


def test_acceptance_probability_matches_scipy():
    expected = sps.norm.cdf(1.0, 1.34, 0.5) - sps.norm.cdf(0.1, 1.34, 0.5)
    assert WALKING.acceptance_probability() == pytest.approx(expected, rel=1e-12)


# --- arrival regimes -------------------------------------------------------------

POIS, PAR = PoissonRegime(2.0), ParetoRegime(2.0, 1.0)


def test_regime_selection():
    assert select_arrival_regime(0.5, 1.0, POIS, PAR) is POIS
    assert select_arrival_regime(2.0, 1.0, POIS, PAR) is PAR
    assert select_arrival_regime(1.0, 1.0, POIS, PAR) is POIS
    with pytest.raises(ValueError):
        select_arrival_regime(0.5, 0.0, POIS, PAR)
    with pytest.raises(ValueError):
        select_arrival_regime(-0.5, 1.0, POIS, PAR)


def test_regime_parameters_positive():
    with pytest.raises(ValueError):
        PoissonRegime(0.0)
    with pytest.raises(ValueError):
        ParetoRegime(-1.0)


def test_exponential_interarrival_mean():
    draws = interarrival_sample(POIS, np.random.default_rng(0), size=100_000)
    assert abs(draws.mean() - 0.5) <= 0.01
    assert np.all(draws > 0)


def test_pareto_interarrival_support_and_mean():
    draws = interarrival_sample(PAR, np.random.default_rng(1), size=100_000)
    assert draws.min() >= 1.0
    # shape 2 has infinite variance, so the sample mean converges slowly; seed fixed
    assert abs(draws.mean() - 2.0) <= 0.05


def test_pareto_interarrival_against_scipy():
    draws = interarrival_sample(ParetoRegime(3.0, 2.0), np.random.default_rng(2), size=20_000)
    assert sps.kstest(draws, sps.pareto(3.0, scale=2.0).cdf).pvalue > 0.001


# --- KS statistic ----------------------------------------------------------------

def test_ks_examples():
    assert ks_statistic([1, 2, 3], [1, 2, 3]) == 0.0
    assert ks_statistic([0, 0], [1, 1]) == 1.0
    assert ks_statistic([1, 2, 3], [2, 3, 4]) == pytest.approx(1 / 3, abs=1e-15)
    assert brute_ks([1, 2, 3], [2, 3, 4]) == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        ks_statistic([], [1])


samples = st.lists(st.integers(-20, 20).map(float), min_size=1, max_size=30)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")  # scipy p-value path only
@given(samples, samples)
def test_ks_properties(a, b):
    d = ks_statistic(a, b)
    assert 0.0 <= d <= 1.0
    assert d == ks_statistic(b, a)
    assert d == pytest.approx(brute_ks(a, b), abs=1e-12)
    assert d == pytest.approx(sps.ks_2samp(a, b, method="asymp").statistic, abs=1e-12)
    assert (d == 0) == (sorted(a * len(b)) == sorted(b * len(a)))


# --- Pareto shape factors ----------------------------------------------------------

def test_shape_from_table2_k():
    assert math.fsum(TABLE2_K) == pytest.approx(0.0441, abs=1e-15)
    assert pareto_shape_from_k(TABLE2_K, Statistic.MEAN) == pytest.approx(0.735, abs=1e-12)
    assert pareto_shape_from_k(TABLE2_K, Statistic.MEDIAN) == pytest.approx(0.5265, abs=1e-12)
    assert pareto_shape_from_k([0.01], Statistic.MEAN, 1.0) == 0.01


def test_shape_fit_record():
    fit = ParetoFit.from_k(TABLE2_K)
    assert fit.scaling == 100.0
    assert fit.alpha_mean == pytest.approx(0.735)
    assert abs(fit.alpha_median - 0.527) < 0.003


def test_shape_errors():
    with pytest.raises(ValueError):
        pareto_shape_from_k([])
    with pytest.raises(ValueError):
        pareto_shape_from_k([0.1], scaling=0.0)


@given(st.lists(st.floats(1e-4, 1.0), min_size=1, max_size=12), st.floats(1.0, 1000.0),
       st.sampled_from(list(Statistic)))
def test_shape_homogeneity(ks, s, statistic):
    unscaled = pareto_shape_from_k(ks, statistic, 1.0)
    assert pareto_shape_from_k([k / s for k in ks], statistic, s) == pytest.approx(unscaled, rel=1e-9)


# --- single-parameter pdf ----------------------------------------------------------

def test_pdf_values():
    mpmath.mp.dps = 50
    oracle = float(mpmath.mpf(0.735) ** mpmath.mpf(0.735))
    assert abs(pareto_pdf(0.0, 0.735) - oracle) < 1e-12
    assert pareto_pdf(0.0, 0.735) == pytest.approx(0.797483, abs=1e-6)
    assert pareto_pdf(1.0, 1.0) == 0.5
    assert pareto_pdf(1e12, 0.527) < 1e-5
    with pytest.raises(ValueError):
        pareto_pdf(-1.0, 0.5)
    with pytest.raises(ValueError):
        pareto_pdf(1.0, 0.0)


def test_pdf_vectorized():
    xs = np.linspace(0, 10, 100)
    out = pareto_pdf(xs, 0.527)
    assert out.shape == (100,) and np.all(np.diff(out) < 0)


@given(st.floats(0, 1e6), st.floats(1e-3, 1e3), st.floats(0.01, 10))
def test_pdf_decreasing(x, dx, alpha):
    assert pareto_pdf(x + dx, alpha) < pareto_pdf(x, alpha)
    assert pareto_pdf(0.0, alpha) == pytest.approx(alpha**alpha)


# --- decay fits ---------------------------------------------------------------------

NS = [50, 100, 150, 200, 250, 300]


def test_hyperbolic_exact_points():
    fit = decay_fit([(n, 0.9 / n) for n in NS], DecayModel.HYPERBOLIC)
    assert fit.coefficients["c"] == pytest.approx(0.9, rel=1e-12)
    assert fit.residual_norm < 1e-15


def test_exponential_exact_points():
    fit = decay_fit([(n, 2 * math.exp(-0.01 * n)) for n in NS], DecayModel.EXPONENTIAL)
    assert fit.coefficients["a"] == pytest.approx(2.0, rel=1e-10)
    assert fit.coefficients["b"] == pytest.approx(0.01, rel=1e-10)
    assert fit.residual_norm < 1e-12


def test_table2_prefers_hyperbolic():
    points = [(row[0], row[3]) for row in PUBLISHED_TABLE2]
    hyp = decay_fit(points, DecayModel.HYPERBOLIC)
    exp = decay_fit(points, DecayModel.EXPONENTIAL)
    assert abs(hyp.coefficients["c"] - 0.9) <= 0.01
    assert hyp.residual_norm < 1e-4
    assert hyp.residual_norm < exp.residual_norm


def test_hyperbolic_matches_scipy_curve_fit():
    from scipy.optimize import curve_fit

    points = [(row[0], row[3]) for row in PUBLISHED_TABLE2]
    n = np.array([p[0] for p in points], float)
    k = np.array([p[1] for p in points])
    (c_ref,), _ = curve_fit(lambda x, c: c / x, n, k, p0=[1.0])
    assert decay_fit(points, DecayModel.HYPERBOLIC).coefficients["c"] == pytest.approx(c_ref, rel=1e-6)


def test_decay_fit_errors():
    with pytest.raises(ValueError):
        decay_fit([(1, 1), (2, 2)], DecayModel.HYPERBOLIC)
    with pytest.raises(ValueError):
        decay_fit([(1, 1), (2, 0), (3, 1)], DecayModel.EXPONENTIAL)

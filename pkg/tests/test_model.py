import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divctl import (
    CostParams,
    Erlang,
    Exponential,
    HyperExponential,
    ModelParams,
    Tolerance,
    generator_coefficients,
    integrate,
    validate,
)

ALL_LAWS = [
    Exponential(mu=1.0),
    Exponential(mu=2.5),
    HyperExponential(weights=(0.4, 0.6), rates=(2.0, 0.8)),
    HyperExponential(weights=(0.2, 0.3, 0.5), rates=(5.0, 1.0, 0.5)),
    Erlang(shape=3, rate=2.0),
    Erlang(shape=1, rate=0.7),
]


def _model(jump, p=0.5, lam=1.0, **kw):
    return ModelParams(p=p, sigma_p=kw.pop("sigma_p", 0.0), lam=lam, jump=jump, **kw)


def test_validate_clean_example():
    diags = validate(_model(Exponential(1.0), p=0.5), CostParams(delta=0.05, alpha=0.9, beta=1.2))
    assert diags == []


def test_validate_net_profit_warning():
    diags = validate(_model(Exponential(1.0), p=1.5), CostParams(delta=0.05))
    assert [d.level for d in diags] == ["WARNING"]
    assert "net-profit" in diags[0].message


def test_validate_alpha_out_of_range():
    diags = validate(_model(Exponential(1.0)), CostParams(delta=0.05, alpha=0.0))
    assert any(d.level == "ERROR" and d.field == "costs.alpha" for d in diags)


def test_validate_flags_bad_scalars():
    m = ModelParams(p=-1.0, sigma_p=-0.1, lam=0.0, jump=Exponential(1.0), rho=2.0)
    diags = validate(m, CostParams(delta=-0.1, alpha=1.0, beta=0.5))
    fields = {d.field for d in diags if d.level == "ERROR"}
    assert {"model.p", "model.sigma_p", "model.lambda", "model.rho",
            "costs.delta", "costs.beta"} <= fields


def test_generator_coefficients_basic():
    drift, diff = generator_coefficients(_model(Exponential(1.0), sigma_p=0.2), 3.0)
    assert drift == pytest.approx(-0.5)
    assert diff == pytest.approx(0.02)


def test_generator_drift_root():
    m = ModelParams(p=0.5, sigma_p=0.0, lam=1.0, jump=Exponential(1.0), r=0.04)
    drift, _ = generator_coefficients(m, 12.5)
    assert drift == pytest.approx(0.0, abs=1e-14)


def test_generator_perfect_anticorrelation_cancels():
    m = ModelParams(p=0.5, sigma_p=0.2, lam=1.0, jump=Exponential(1.0),
                    sigma_r=0.1, rho=-1.0)
    _, diff = generator_coefficients(m, 2.0)
    assert diff == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-1.0, max_value=1.0),
       st.floats(min_value=0.0, max_value=2.0),
       st.floats(min_value=0.0, max_value=1.0),
       st.floats(min_value=0.0, max_value=30.0))
def test_generator_diffusion_nonnegative(rho, sigma_p, sigma_r, y):
    m = ModelParams(p=0.5, sigma_p=sigma_p, lam=1.0, jump=Exponential(1.0),
                    sigma_r=sigma_r, rho=rho)
    _, diff = generator_coefficients(m, y)
    assert diff >= -1e-12


@pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: type(l).__name__ + repr(l)[:24])
def test_jump_mean_matches_quadrature(law):
    tol = Tolerance(abs_tol=1e-12, rel_tol=1e-12, max_iter=400)
    rate = min(getattr(law, "rates", [getattr(law, "mu", getattr(law, "rate", 1.0))]))
    num = integrate(lambda x: x * float(law.density(x)), 0.0, math.inf,
                    tol, tail_rate=0.5 * rate)
    assert num == pytest.approx(law.mean(), abs=1e-8)


@pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: type(l).__name__ + repr(l)[:24])
@pytest.mark.parametrize("theta", [0.1, 1.0, 10.0])
def test_laplace_transform_matches_quadrature(law, theta):
    tol = Tolerance(abs_tol=1e-12, rel_tol=1e-12, max_iter=400)
    rate = min(getattr(law, "rates", [getattr(law, "mu", getattr(law, "rate", 1.0))]))
    num = integrate(lambda x: math.exp(-theta * x) * float(law.density(x)),
                    0.0, math.inf, tol, tail_rate=0.5 * rate)
    assert num == pytest.approx(law.laplace_transform(theta), abs=1e-8)


@pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: type(l).__name__ + repr(l)[:24])
def test_laplace_transform_shape(law):
    assert law.laplace_transform(0.0) == pytest.approx(1.0, abs=1e-14)
    grid = np.linspace(0.0, 8.0, 200)
    vals = np.array([law.laplace_transform(t) for t in grid])
    assert np.all(np.diff(vals) < 0.0)          # decreasing
    assert np.all(np.diff(vals, 2) > -1e-12)    # convex


@pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: type(l).__name__ + repr(l)[:24])
def test_positive_support(law):
    assert float(law.density(-0.5)) == 0.0
    assert float(law.survival(0.0)) == pytest.approx(1.0)


@pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: type(l).__name__ + repr(l)[:24])
def test_sampler_mean(law):
    rng = np.random.default_rng(12345)
    n = 1_000_000
    xs = law.sample(rng, n)
    assert np.all(xs > 0.0)
    se = xs.std(ddof=1) / math.sqrt(n)
    assert abs(xs.mean() - law.mean()) <= 5.0 * se


@pytest.mark.parametrize("law", ALL_LAWS, ids=lambda l: type(l).__name__ + repr(l)[:24])
def test_partial_mean_above_matches_quadrature(law):
    tol = Tolerance(abs_tol=1e-12, rel_tol=1e-12, max_iter=400)
    rate = min(getattr(law, "rates", [getattr(law, "mu", getattr(law, "rate", 1.0))]))
    for w in (0.0, 0.5, 2.0):
        num = integrate(lambda x: x * float(law.density(x)), w, math.inf,
                        tol, tail_rate=0.5 * rate)
        assert num == pytest.approx(law.partial_mean_above(w), abs=1e-8)


def test_hyperexp_weights_must_sum_to_one():
    with pytest.raises(ValueError):
        HyperExponential(weights=(0.5, 0.2), rates=(1.0, 2.0))


def test_hyperexp_rates_positive():
    with pytest.raises(ValueError):
        HyperExponential(weights=(0.5, 0.5), rates=(1.0, -2.0))


def test_erlang_shape_positive_integer():
    with pytest.raises(ValueError):
        Erlang(shape=0, rate=1.0)


def test_exponential_rate_positive():
    with pytest.raises(ValueError):
        Exponential(mu=0.0)


def test_net_gain_rate(levy_model):
    assert levy_model.net_gain_rate() == pytest.approx(0.5)
    assert levy_model.is_levy_regime()

import numpy as np
import pytest

from divctl import CostParams, Exponential, HyperExponential, ModelParams


@pytest.fixture
def levy_model():
    """Diffusion-perturbed, exponential-gain surplus without invested returns."""
    return ModelParams(p=0.5, sigma_p=0.2, lam=1.0, jump=Exponential(1.0))


@pytest.fixture
def costs():
    return CostParams(delta=0.05, alpha=1.0, beta=1.2)


@pytest.fixture
def drift_return_model():
    """Deterministic return drift, no diffusion, exponential gains."""
    return ModelParams(p=0.5, sigma_p=0.0, lam=1.0, jump=Exponential(1.0), r=0.04)


@pytest.fixture
def hyperexp_model():
    return ModelParams(p=0.4, sigma_p=0.3, lam=1.2,
                       jump=HyperExponential(weights=(0.4, 0.6), rates=(2.0, 0.8)))

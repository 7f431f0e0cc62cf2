"""Shared fixtures: small worked examples and random regression problems."""

import numpy as np
import pytest

from gofboot import Dataset, ModelSpec


@pytest.fixture
def three_point():
    """The hand-solved example: x = (0, 1, 2), y = (0, 1, 3).

    Exact solution: beta = (-1/6, 3/2), sigma2_hat = 1/18.
    """
    data = Dataset({"x": np.array([0.0, 1.0, 2.0]), "y": np.array([0.0, 1.0, 3.0])})
    return data, ModelSpec(response="y", covariates=("x",))


@pytest.fixture
def sign_flip():
    """Intercept-only fit of y = (1, -1, 1, -1): every residual equals sigma_hat."""
    data = Dataset({"y": np.array([1.0, -1.0, 1.0, -1.0])})
    return data, ModelSpec(response="y", covariates=())


def random_regression(seed, n=None, r=None):
    """A random well-conditioned regression problem.

    Draws n in [10, 50] and r in [1, 4] (r counts all mean parameters,
    intercept included) unless pinned, then Gaussian covariates, uniform
    coefficients, and N(0, sigma2) errors.
    """
    rng = np.random.default_rng(seed)
    if n is None:
        n = int(rng.integers(10, 51))
    if r is None:
        r = int(rng.integers(1, 5))
    names = [f"x{j}" for j in range(1, r)]
    columns = {name: rng.standard_normal(n) * rng.uniform(0.5, 3.0) for name in names}
    beta = rng.uniform(-3.0, 3.0, size=r)
    sigma = rng.uniform(0.3, 2.5)
    X = np.column_stack([np.ones(n)] + [columns[name] for name in names])
    y = X @ beta + sigma * rng.standard_normal(n)
    columns["y"] = y
    data = Dataset(columns)
    return data, ModelSpec(response="y", covariates=tuple(names))


def scenario1_dataset(seed, n):
    """One draw of the correctly specified simulation design."""
    rng = np.random.default_rng(seed)
    x1 = 5.0 * rng.random(n)
    x2 = 5.0 * rng.random(n)
    y = 2.0 + 2.0 * x1 + 2.0 * x2 + 2.0 * rng.standard_normal(n)
    data = Dataset({"y": y, "x1": x1, "x2": x2})
    return data, ModelSpec(response="y", covariates=("x1", "x2"))

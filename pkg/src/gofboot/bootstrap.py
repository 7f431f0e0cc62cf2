"""Nonparametric bootstrap test of fit for the normal linear model.

The test compares the robust variance estimate of -2 loglik against its
value under correct specification, 2n. Whole rows are resampled with
replacement, the model is refit on each resample, and the robust variance
is recomputed; the null is rejected when the percentile interval of the
bootstrap values does not contain 2n.

Every bootstrap iteration draws from its own RNG stream, derived from the
master seed by jumping a counter-based Philox generator by the iteration
index. Results are therefore bit-identical for any degree of parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import RedrawLimitError
from .regression import (
    DEGENERATE_TOLERANCE,
    Dataset,
    ModelSpec,
    build_design,
    fit_mle,
    least_squares,
)
from .variance import _sandwich_core, sandwich, theoretical_var_gof

__all__ = [
    "BootstrapConfig",
    "GofTestResult",
    "iteration_stream",
    "resample",
    "percentile_interval",
    "run_test",
]


@dataclass(frozen=True)
class BootstrapConfig:
    """Bootstrap test settings.

    Parameters
    ----------
    n_boot : int
        Number of bootstrap iterations, at least 2. Emitted as ``B`` in
        CLI output.
    alpha : float
        Test level in (0, 1).
    seed : int
        Master seed, an unsigned 64-bit integer.
    max_redraws : int
        Per-iteration limit on redraws after rank-deficient or degenerate
        resamples.
    """

    n_boot: int = 1000
    alpha: float = 0.05
    seed: int = 0
    max_redraws: int = 100

    def __post_init__(self):
        if self.n_boot < 2:
            raise ValueError(f"n_boot must be at least 2, got {self.n_boot}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.max_redraws < 0:
            raise ValueError(f"max_redraws must be nonnegative, got {self.max_redraws}")


@dataclass(frozen=True)
class GofTestResult:
    """Outcome of the bootstrap goodness-of-fit test.

    Attributes
    ----------
    var_gof_observed : float
        Robust variance estimate of -2 loglik on the original data.
    boot_values : np.ndarray
        The n_boot bootstrap variance estimates, in iteration order.
    interval_low, interval_high : float
        Percentile interval endpoints; both are elements of ``boot_values``.
    reference : float
        2n, the variance under correct specification.
    reject : bool
        True when ``reference`` lies outside the interval.
    redraw_count : int
        Total resamples discarded as rank deficient or degenerate.
    """

    var_gof_observed: float
    boot_values: np.ndarray
    interval_low: float
    interval_high: float
    reference: float
    reject: bool
    redraw_count: int


def iteration_stream(seed: int, iteration: int) -> np.random.Generator:
    """RNG stream for one bootstrap iteration.

    Stream ``iteration`` is a Philox generator keyed by ``seed`` and jumped
    ``iteration`` times, so streams are independent and reproducible in any
    execution order.
    """
    return np.random.Generator(np.random.Philox(key=seed).jumped(iteration))


def resample(data: Dataset, rng: np.random.Generator) -> Dataset:
    """Case resample: draw n whole rows with replacement."""
    indices = rng.integers(0, data.n, size=data.n)
    return data.take_rows(indices)


def percentile_interval(
    boot_values: np.ndarray, alpha: float
) -> tuple[float, float]:
    """Percentile interval from order statistics ceil(B q) of the values.

    The endpoints are the ceil(B alpha / 2)-th and ceil(B (1 - alpha / 2))-th
    smallest values, 1-indexed, so both endpoints are elements of the input.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    values = np.sort(np.asarray(boot_values, dtype=np.float64))
    b = values.size
    if b < 1:
        raise ValueError("need at least one bootstrap value")
    low = values[_order_index(b, 0.5 * alpha) - 1]
    high = values[_order_index(b, 1.0 - 0.5 * alpha) - 1]
    return float(low), float(high)


def run_test(
    data: Dataset, spec: ModelSpec, cfg: BootstrapConfig, threads: int = 1
) -> GofTestResult:
    """Run the bootstrap goodness-of-fit test.

    Fits the model, bootstraps the robust variance of -2 loglik, and
    rejects when 2n falls outside the percentile interval. Iterations may
    run across ``threads`` worker processes; the result is bit-identical
    for any value because iteration b always uses ``iteration_stream(seed, b)``
    and redraws continue on that same stream.

    Raises
    ------
    RedrawLimitError
        If any iteration exceeds ``cfg.max_redraws`` discarded resamples.
    """
    model = fit_mle(data, spec)
    X, y = build_design(data, spec)
    var_observed = sandwich(model, data).var_gof

    b_total = cfg.n_boot
    boot_values = np.empty(b_total)
    redraw_count = 0
    if threads <= 1:
        _, boot_values, redraw_count = _chunk_worker(
            (X, y, cfg.seed, 0, b_total, cfg.max_redraws)
        )
    else:
        workers = min(threads, b_total)
        bounds = np.linspace(0, b_total, workers + 1).astype(int)
        payloads = [
            (X, y, cfg.seed, int(a), int(b), cfg.max_redraws)
            for a, b in zip(bounds[:-1], bounds[1:])
            if a < b
        ]
        with ProcessPoolExecutor(max_workers=len(payloads)) as pool:
            for start, values, redraws in pool.map(_chunk_worker, payloads):
                boot_values[start : start + values.size] = values
                redraw_count += redraws

    interval_low, interval_high = percentile_interval(boot_values, cfg.alpha)
    reference = theoretical_var_gof(data.n)
    reject = not interval_low <= reference <= interval_high
    return GofTestResult(
        var_gof_observed=var_observed,
        boot_values=boot_values,
        interval_low=interval_low,
        interval_high=interval_high,
        reference=reference,
        reject=reject,
        redraw_count=redraw_count,
    )


def _order_index(count: int, q: float) -> int:
    # 1-indexed ceil(count * q), with a guard against FP noise pushing an
    # exact integer product over the next ceiling.
    k = math.ceil(count * q - 1e-9)
    return min(max(k, 1), count)


def _resample_var_gof(
    X: np.ndarray, y: np.ndarray, rng: np.random.Generator, max_redraws: int
) -> tuple[float, int]:
    n, r = X.shape
    redraws = 0
    while True:
        idx = rng.integers(0, n, size=n)
        Xb = X[idx]
        yb = y[idx]
        beta, residuals, rank = least_squares(Xb, yb)
        if rank == r:
            sigma2 = float(residuals @ residuals) / n
            if sigma2 > DEGENERATE_TOLERANCE * float(np.var(yb)):
                return _sandwich_core(Xb, residuals, sigma2).var_gof, redraws
        redraws += 1
        if redraws > max_redraws:
            raise RedrawLimitError(
                f"iteration discarded {redraws} resamples, limit {max_redraws}"
            )


def _chunk_worker(payload) -> tuple[int, np.ndarray, int]:
    X, y, seed, start, stop, max_redraws = payload
    base = np.random.Philox(key=seed)
    values = np.empty(stop - start)
    redraws_total = 0
    for b in range(start, stop):
        rng = np.random.Generator(base.jumped(b))
        value, redraws = _resample_var_gof(X, y, rng, max_redraws)
        values[b - start] = value
        redraws_total += redraws
    return start, values, redraws_total

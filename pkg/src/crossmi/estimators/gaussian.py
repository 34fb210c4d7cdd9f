"""Analytical (linear-Gaussian) cross MI.

Fitting a normal distribution to the reference turns the pointwise MI of a
test sample into a closed form in the prior residual ``y - mu_y`` and the
regression residual ``y - (beta * x + gamma)``, each normalised by its
expected variance.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ..dataset import Backend, PairedSeries, TripleSeries
from ._types import GaussianModel, LocalInfoSeries

DEGENERATE_RHO = 1.0 - 1e-12


class DegenerateFitError(ValueError):
    """The reference has zero variance or (near-)perfect correlation."""


def gaussian_fit(reference: PairedSeries) -> GaussianModel:
    """Fit a bivariate normal / linear regression to reference samples.

    Moments use the unbiased ``N - 1`` denominator.
    """
    n = reference.n
    if n < 3:
        raise DegenerateFitError(f"need at least 3 samples to fit, got {n}")
    x, y = reference.x, reference.y
    mu_x, mu_y = float(np.mean(x)), float(np.mean(y))
    dx, dy = x - mu_x, y - mu_y
    var_x = float(dx @ dx) / (n - 1)
    var_y = float(dy @ dy) / (n - 1)
    if var_x <= 0 or var_y <= 0:
        raise DegenerateFitError("reference x or y has zero variance")
    cov = float(dx @ dy) / (n - 1)
    sigma_x, sigma_y = math.sqrt(var_x), math.sqrt(var_y)
    rho = cov / (sigma_x * sigma_y)
    if abs(rho) >= DEGENERATE_RHO:
        raise DegenerateFitError(
            f"|rho| = {abs(rho):.15f} is degenerate; add noise to the reference")
    beta = cov / var_x
    return GaussianModel(
        beta=beta,
        gamma=mu_y - beta * mu_x,
        mu_x=mu_x,
        mu_y=mu_y,
        sigma_x=sigma_x,
        sigma_y=sigma_y,
        rho=rho,
        sigma_y_given_x=sigma_y * math.sqrt(1.0 - rho * rho),
        n_fit=n,
    )


def _correction(model: GaussianModel, x, y):
    """Half the difference of squared relative prior and posterior residuals."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    prior = (y - model.mu_y) ** 2 / model.sigma_y ** 2
    posterior = (y - model.conditional_mean(x)) ** 2 / model.sigma_y_given_x ** 2
    return 0.5 * (prior - posterior)


def gaussian_local_mi(model: GaussianModel, x, y):
    """Pointwise MI of ``(x, y)`` under the Gaussian reference ``model``.

    Vectorised over ``x`` and ``y``; returns a float for scalar input.
    """
    out = model.mutual_information + _correction(model, x, y)
    if np.ndim(out) == 0:
        return float(out)
    return out


def gaussian_cross_mi(model: GaussianModel, test: PairedSeries) -> LocalInfoSeries:
    """Cross MI of ``test`` under ``model``, with its decomposition.

    ``first_term_nats`` is the reference MI, ``mean_correction_nats`` the mean
    residual correction, and ``sum_squared_residuals`` the regression residual
    sum of squares over the test samples.
    """
    correction = _correction(model, test.x, test.y)
    residuals = test.y - model.conditional_mean(test.x)
    return LocalInfoSeries(
        locals=model.mutual_information + correction,
        backend=Backend.GAUSSIAN,
        n_reference=model.n_fit,
        first_term_nats=model.mutual_information,
        mean_correction_nats=float(np.mean(correction)),
        sum_squared_residuals=float(residuals @ residuals),
    )


def gaussian_mi(data: PairedSeries) -> LocalInfoSeries:
    """MI of ``data`` under a Gaussian fitted to the same samples."""
    return gaussian_cross_mi(gaussian_fit(data), data)


def gaussian_heatmap(model: GaussianModel, x_range, y_range, resolution: int):
    """Local cross MI on an evenly spaced ``resolution x resolution`` grid.

    Returns ``(xs, ys, grid)`` with ``grid[i, j]`` evaluated at
    ``(xs[j], ys[i])``, i.e. one row per ``y`` value.
    """
    if int(resolution) != resolution or resolution < 2:
        raise ValueError("resolution must be an integer >= 2")
    (x_lo, x_hi), (y_lo, y_hi) = x_range, y_range
    if not (x_lo < x_hi and y_lo < y_hi):
        raise ValueError("ranges must be non-empty intervals with low < high")
    xs = np.linspace(x_lo, x_hi, int(resolution))
    ys = np.linspace(y_lo, y_hi, int(resolution))
    gx, gy = np.meshgrid(xs, ys)
    return xs, ys, gaussian_local_mi(model, gx, gy)


def heatmap_columns(xs, ys, grid) -> dict:
    """Row-major ``x, y, local_mi_nats`` columns for CSV export."""
    gx, gy = np.meshgrid(xs, ys)
    return {"x": gx.ravel(), "y": gy.ravel(), "local_mi_nats": grid.ravel()}


# -- multivariate form -------------------------------------------------------


def _blocks(values):
    arr = np.asarray(values, dtype=float)
    return arr[:, None] if arr.ndim == 1 else arr


def _gaussian_logpdf(points, mean, cov):
    factor = cho_factor(cov, lower=True)
    centred = points - mean
    maha = np.einsum("ij,ij->i", centred, cho_solve(factor, centred.T).T)
    logdet = 2.0 * np.sum(np.log(np.diag(factor[0])))
    return -0.5 * (maha + logdet + points.shape[1] * math.log(2.0 * math.pi))


def gaussian_cross_cmi_arrays(test_x, test_y, ref_x, ref_y,
                              test_z=None, ref_z=None) -> LocalInfoSeries:
    """Pointwise (conditional) cross MI under a multivariate normal reference.

    One mean vector and covariance matrix are fitted to the joint reference
    samples; every marginal density is a sub-block of that single fit, so
    pointwise chain rules hold to rounding error. Each variable may be 1-D or
    ``(n, d)``.
    """
    tb = [_blocks(test_x), _blocks(test_y)]
    rb = [_blocks(ref_x), _blocks(ref_y)]
    if test_z is not None:
        tb.append(_blocks(test_z))
        rb.append(_blocks(ref_z))
    test = np.hstack(tb)
    ref = np.hstack(rb)
    n_ref = ref.shape[0]
    if n_ref <= ref.shape[1]:
        raise DegenerateFitError("too few reference samples for the covariance")
    mean = ref.mean(axis=0)
    cov = np.atleast_2d(np.cov(ref, rowvar=False, ddof=1))
    if np.linalg.matrix_rank(cov) < cov.shape[0]:
        raise DegenerateFitError("reference covariance is singular")

    edges = np.cumsum([0] + [b.shape[1] for b in tb])
    cols = [np.arange(edges[i], edges[i + 1]) for i in range(len(tb))]

    def logq(*which):
        idx = np.concatenate([cols[i] for i in which])
        return _gaussian_logpdf(test[:, idx], mean[idx], cov[np.ix_(idx, idx)])

    if test_z is None:
        local = logq(0, 1) - logq(0) - logq(1)
    else:
        local = logq(0, 1, 2) + logq(2) - logq(0, 2) - logq(1, 2)
    return LocalInfoSeries(local, Backend.GAUSSIAN, n_reference=n_ref)


def gaussian_cross_cmi(test: TripleSeries, reference: TripleSeries) -> LocalInfoSeries:
    """Cross conditional MI ``I(x; y | z)`` under a trivariate normal reference."""
    return gaussian_cross_cmi_arrays(test.x, test.y, reference.x, reference.y,
                                     test.z, reference.z)

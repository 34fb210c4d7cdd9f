from __future__ import annotations

import dataclasses
import math
from typing import Optional

import numpy as np

from ..dataset import Backend


@dataclasses.dataclass(frozen=True, eq=False)
class LocalInfoSeries:
    """Pointwise information values (nats) and their mean.

    The Gaussian backend additionally fills the decomposition of the mean
    into the reference MI term and the averaged residual correction.
    """

    locals: np.ndarray
    backend: Backend
    n_reference: int
    k: Optional[int] = None
    first_term_nats: Optional[float] = None
    mean_correction_nats: Optional[float] = None
    sum_squared_residuals: Optional[float] = None

    kind = "LocalInfoSeries"

    def __post_init__(self):
        values = np.array(self.locals, dtype=float, ndmin=1)
        values.setflags(write=False)
        object.__setattr__(self, "locals", values)
        object.__setattr__(self, "backend", Backend(self.backend))

    @property
    def mean(self) -> float:
        return float(np.mean(self.locals))

    @property
    def n_test(self) -> int:
        return self.locals.size

    def to_dict(self) -> dict:
        out = {
            "mean_nats": self.mean,
            "locals": self.locals,
            "backend": self.backend.value,
            "k": self.k,
            "n_test": self.n_test,
            "n_reference": self.n_reference,
        }
        if self.backend is Backend.GAUSSIAN:
            out["first_term_nats"] = self.first_term_nats
            out["mean_correction_nats"] = self.mean_correction_nats
            out["sum_squared_residuals"] = self.sum_squared_residuals
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "LocalInfoSeries":
        return cls(
            locals=np.asarray(doc["locals"], dtype=float),
            backend=doc["backend"],
            n_reference=doc["n_reference"],
            k=doc.get("k"),
            first_term_nats=doc.get("first_term_nats"),
            mean_correction_nats=doc.get("mean_correction_nats"),
            sum_squared_residuals=doc.get("sum_squared_residuals"),
        )


@dataclasses.dataclass(frozen=True)
class GaussianModel:
    """Bivariate normal reference, parameterised as a linear regression of
    ``y`` on ``x``: ``y = beta * x + gamma + noise`` with noise standard
    deviation ``sigma_y_given_x``."""

    beta: float
    gamma: float
    mu_x: float
    mu_y: float
    sigma_x: float
    sigma_y: float
    rho: float
    sigma_y_given_x: float
    n_fit: int = 0

    kind = "GaussianModel"

    def __post_init__(self):
        if not (self.sigma_x > 0 and self.sigma_y > 0):
            raise ValueError("standard deviations must be positive")
        if not abs(self.rho) < 1:
            raise ValueError(f"correlation must lie in (-1, 1), got {self.rho}")
        if not self.sigma_y_given_x > 0:
            raise ValueError("conditional standard deviation must be positive")

    @classmethod
    def from_moments(cls, mu_x: float, mu_y: float, sigma_x: float,
                     sigma_y: float, rho: float, n_fit: int = 0) -> "GaussianModel":
        beta = rho * sigma_y / sigma_x
        return cls(beta=beta, gamma=mu_y - beta * mu_x, mu_x=mu_x, mu_y=mu_y,
                   sigma_x=sigma_x, sigma_y=sigma_y, rho=rho,
                   sigma_y_given_x=sigma_y * math.sqrt(1.0 - rho * rho),
                   n_fit=n_fit)

    @property
    def mutual_information(self) -> float:
        """Reference MI, ``-0.5 * log(1 - rho**2)``."""
        return -0.5 * math.log1p(-self.rho * self.rho)

    def conditional_mean(self, x):
        return self.beta * np.asarray(x, dtype=float) + self.gamma

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

"""MI, local MI and cross MI with KSG and Gaussian backends."""

from ..dataset import Backend, EstimatorConfig, PairedSeries
from ._types import GaussianModel, LocalInfoSeries
from .digamma import digamma
from .dynamics import (active_information_storage,
                       cross_active_information_storage,
                       cross_transfer_entropy, embed_history, transfer_entropy)
from .gaussian import (DegenerateFitError, gaussian_cross_cmi,
                       gaussian_cross_cmi_arrays, gaussian_cross_mi,
                       gaussian_fit, gaussian_heatmap, gaussian_local_mi,
                       gaussian_mi, heatmap_columns)
from .ksg import (DuplicatePointsError, cross_ksg_cmi, cross_ksg_cmi_arrays,
                  cross_ksg_mi, cross_ksg_mi_arrays, ksg_cmi, ksg_mi)


def estimate_mi(data: PairedSeries, cfg: EstimatorConfig = EstimatorConfig()) -> LocalInfoSeries:
    """MI of ``data`` with the backend named in ``cfg``."""
    if cfg.backend is Backend.GAUSSIAN:
        return gaussian_mi(data)
    return ksg_mi(data, cfg)


def estimate_cross_mi(test: PairedSeries, reference: PairedSeries,
                      cfg: EstimatorConfig = EstimatorConfig(),
                      exclude_self: bool = False) -> LocalInfoSeries:
    """Cross MI of ``test`` under ``reference`` with the backend in ``cfg``.

    ``exclude_self`` only affects the KSG backend; the Gaussian fit never
    looks at neighbourhoods.
    """
    if cfg.backend is Backend.GAUSSIAN:
        return gaussian_cross_mi(gaussian_fit(reference), test)
    return cross_ksg_mi(test, reference, cfg, exclude_self)


__all__ = [
    "GaussianModel", "LocalInfoSeries", "DegenerateFitError",
    "DuplicatePointsError", "digamma", "ksg_mi", "cross_ksg_mi",
    "cross_ksg_mi_arrays", "ksg_cmi", "cross_ksg_cmi", "cross_ksg_cmi_arrays",
    "gaussian_fit", "gaussian_local_mi", "gaussian_cross_mi", "gaussian_mi",
    "gaussian_heatmap", "heatmap_columns", "gaussian_cross_cmi",
    "gaussian_cross_cmi_arrays", "cross_transfer_entropy", "transfer_entropy",
    "cross_active_information_storage", "active_information_storage",
    "embed_history", "estimate_mi", "estimate_cross_mi",
]

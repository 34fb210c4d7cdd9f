"""Mutual information, local MI and cross MI for paired time series.

Cross MI evaluates the pointwise MI of *test* samples under a *reference*
distribution estimated from separate data, either model-free (KSG nearest
neighbours) or with a bivariate Gaussian fit. Block-shuffle permutation tests
and seeded simulation generators are included.
"""

__version__ = "0.1.0"

from .dataset import (Backend, ConditionedDataset, DatasetError,
                      EstimatorConfig, PairedSeries, TripleSeries,
                      read_paired_csv, read_results_json, write_paired_csv,
                      write_results_json)
from .estimators import (GaussianModel, LocalInfoSeries, cross_ksg_cmi,
                         cross_ksg_mi, estimate_cross_mi, estimate_mi,
                         gaussian_cross_cmi, gaussian_cross_mi, gaussian_fit,
                         gaussian_heatmap, gaussian_local_mi, gaussian_mi,
                         ksg_cmi, ksg_mi)
from .significance import (BlockSpec, PermutationTestResult, ShuffleTarget,
                           TestKind, block_shuffle, estimate_block_length,
                           support_diagnostic, test_cross_mi_nonzero,
                           test_mi_difference, test_mi_nonzero)

__all__ = [
    "Backend", "ConditionedDataset", "DatasetError", "EstimatorConfig",
    "PairedSeries", "TripleSeries", "read_paired_csv", "read_results_json",
    "write_paired_csv", "write_results_json", "GaussianModel",
    "LocalInfoSeries", "cross_ksg_cmi", "cross_ksg_mi", "estimate_cross_mi",
    "estimate_mi", "gaussian_cross_cmi", "gaussian_cross_mi", "gaussian_fit",
    "gaussian_heatmap", "gaussian_local_mi", "gaussian_mi", "ksg_cmi", "ksg_mi",
    "BlockSpec", "PermutationTestResult", "ShuffleTarget", "TestKind",
    "block_shuffle", "estimate_block_length", "support_diagnostic",
    "test_cross_mi_nonzero", "test_mi_difference", "test_mi_nonzero",
]

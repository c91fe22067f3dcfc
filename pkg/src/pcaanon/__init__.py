"""Utility-aware database anonymization by principal component removal.

The package removes principal components from a numeric table starting
with the LARGEST, projects the reduced data back onto the original
attribute axes, and gates each removal on quantitative utility metrics
(difference-matrix norms, correlation, Gaussian KL divergence) plus
image-quality indices of the table rendered as a greyscale raster.
"""

from .dataset import (
    ColumnStats,
    Dataset,
    StandardizedDataset,
    column_stats,
    destandardize,
    load_csv,
    standardize,
    write_csv,
)
from .imaging import (
    GrayImage,
    SigmoidFit,
    dataset_to_image,
    eigen_decay,
    fit_sigmoid,
    image_pca_remove,
    load_image,
    mse,
    psnr,
    shuffle_rows,
    ssim,
    write_image,
)
from .metrics import (
    DifferenceMatrix,
    MetricRule,
    UtilityPolicy,
    UtilityReport,
    correlation,
    difference_matrix,
    evaluate,
    flatten_row_major,
    gaussian_kl,
    gaussian_kl_from_moments,
    norm_frobenius,
    norm_l1_adapted,
    norm_sum,
)
from .pca import (
    AnonymizationResult,
    EigenSystem,
    StoppedReason,
    anonymize,
    covariance,
    eig_sym,
    remove_top_components,
)

__version__ = "0.1.0"

__all__ = [
    "AnonymizationResult",
    "ColumnStats",
    "Dataset",
    "DifferenceMatrix",
    "EigenSystem",
    "GrayImage",
    "MetricRule",
    "SigmoidFit",
    "StandardizedDataset",
    "StoppedReason",
    "UtilityPolicy",
    "UtilityReport",
    "anonymize",
    "column_stats",
    "correlation",
    "covariance",
    "dataset_to_image",
    "destandardize",
    "difference_matrix",
    "eig_sym",
    "eigen_decay",
    "evaluate",
    "fit_sigmoid",
    "flatten_row_major",
    "gaussian_kl",
    "gaussian_kl_from_moments",
    "image_pca_remove",
    "load_csv",
    "load_image",
    "mse",
    "norm_frobenius",
    "norm_l1_adapted",
    "norm_sum",
    "psnr",
    "remove_top_components",
    "shuffle_rows",
    "ssim",
    "standardize",
    "write_csv",
    "write_image",
]

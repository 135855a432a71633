"""Kernel outlyingness detection.

Robust projection-based outlier scores computed in a kernel-induced feature
space, aggregated over several families of projection directions, with an
automatic flagging cutoff and out-of-sample scoring.
"""

from .datasets import DATASETS, load_csv, make_dataset, write_csv
from .directions import (
    FAMILIES,
    DirectionSet,
    basis_vectors,
    one_point_vectors,
    random_vectors,
    two_point_vectors,
)
from .errors import (
    CsvParseError,
    DegenerateDataError,
    InvalidInputError,
    KodError,
    ModelFormatError,
)
from .features import FeatureModel, decompose, embed
from .kernels import (
    KernelSpec,
    Standardizer,
    center_cross_kernel,
    center_kernel,
    cross_kernel_matrix,
    kernel_matrix,
    median_heuristic_sigma,
    standardize,
)
from .metrics import mcc, precision_at_n
from .model import (
    Z99,
    KodConfig,
    KodModel,
    ScoreReport,
    combined_outlyingness,
    denominator_floor,
    fit,
    flagging_cutoff,
    type_outlyingness,
)
from .robust import huber_location, l1_median, mad, median, qn_scale

__version__ = "0.1.0"

__all__ = [
    "DATASETS",
    "FAMILIES",
    "CsvParseError",
    "DegenerateDataError",
    "DirectionSet",
    "FeatureModel",
    "InvalidInputError",
    "KernelSpec",
    "KodConfig",
    "KodError",
    "KodModel",
    "ModelFormatError",
    "ScoreReport",
    "Standardizer",
    "Z99",
    "basis_vectors",
    "center_cross_kernel",
    "center_kernel",
    "combined_outlyingness",
    "cross_kernel_matrix",
    "decompose",
    "denominator_floor",
    "embed",
    "fit",
    "flagging_cutoff",
    "huber_location",
    "kernel_matrix",
    "l1_median",
    "load_csv",
    "mad",
    "make_dataset",
    "mcc",
    "median",
    "median_heuristic_sigma",
    "one_point_vectors",
    "precision_at_n",
    "qn_scale",
    "random_vectors",
    "standardize",
    "two_point_vectors",
    "type_outlyingness",
    "write_csv",
]

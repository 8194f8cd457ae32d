"""Multilevel thresholding by fitting a Gaussian mixture to the gray-level
histogram with DE, PSO or ABC, plus an exhaustive Otsu baseline."""

from .histogram import GrayImage, Histogram, compute_histogram, load_gray_image
from .metrics import BinaryMask, class_mask, hausdorff_distance
from .mixture import (
    MixtureCandidate,
    MixtureObjective,
    ObjectiveConfig,
    SearchBounds,
    clamp_to_bounds,
    default_bounds,
    effective_bounds,
    hellinger_distance,
    hellinger_objective,
    mixture_pdf,
)
from .optim import ABCParams, DEParams, OptimizerConfig, PSOParams, RunResult, run
from .thresholding import (
    LabelMap,
    ThresholdSet,
    apply_thresholds,
    derive_thresholds,
    otsu_two_thresholds,
    sort_classes,
    threshold_between,
)

__version__ = "0.1.0"

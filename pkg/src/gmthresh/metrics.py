"""Segmentation quality: class masks and the symmetric Hausdorff distance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import distance_transform_edt

from .errors import EmptyMaskError
from .histogram import GrayImage, load_gray_image
from .thresholding import LabelMap


@dataclass(frozen=True)
class BinaryMask:
    foreground: np.ndarray  # (height, width) bool

    def __post_init__(self):
        fg = np.array(self.foreground, dtype=bool)
        if fg.ndim != 2:
            raise ValueError("mask must be 2-D")
        fg.setflags(write=False)
        object.__setattr__(self, "foreground", fg)

    @property
    def width(self) -> int:
        return self.foreground.shape[1]

    @property
    def height(self) -> int:
        return self.foreground.shape[0]

    @property
    def size(self) -> int:
        return int(self.foreground.sum())

    def coordinates(self) -> np.ndarray:
        """(n, 2) array of (row, col) foreground positions."""
        return np.argwhere(self.foreground)


def class_mask(labels: LabelMap, class_index: int) -> BinaryMask:
    if not 0 <= class_index < labels.classes:
        raise ValueError(f"class_index {class_index} outside [0, {labels.classes})")
    return BinaryMask(labels.labels == class_index)


def mask_from_image(image: GrayImage) -> BinaryMask:
    return BinaryMask(image.pixels != 0)


def load_mask(path) -> BinaryMask:
    """Ground-truth mask from PGM/PNG; nonzero pixels are foreground."""
    return mask_from_image(load_gray_image(path))


def directed_hausdorff(a: BinaryMask, b: BinaryMask) -> float:
    """sup over a of the Euclidean distance to the nearest pixel of b."""
    if a.foreground.shape != b.foreground.shape:
        raise ValueError("masks must share a shape")
    if not a.size or not b.size:
        raise EmptyMaskError("Hausdorff distance is undefined for an empty mask")
    dist_to_b = distance_transform_edt(~b.foreground)
    return float(dist_to_b[a.foreground].max())


def hausdorff_distance(a: BinaryMask, b: BinaryMask) -> float:
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))

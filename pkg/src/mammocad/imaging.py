"""Grayscale image handling: PNG I/O, ROI cropping, histogram equalization.

All images are single-channel with 8- or 16-bit unsigned levels. Pixel
coordinates are (row, col) with the origin at the top-left corner.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import PipelineError

VALID_BIT_DEPTHS = (8, 16)


@dataclass
class GrayImage:
    """A single-channel image plus the physical pixel size.

    levels      2D integer array, values in [0, 2**bit_depth).
    bit_depth   8 or 16.
    spacing_mm  edge length of one pixel in millimetres.
    """

    levels: np.ndarray
    bit_depth: int = 8
    spacing_mm: float = 1.0

    def __post_init__(self):
        self.levels = np.asarray(self.levels)
        if self.levels.ndim != 2 or self.levels.size == 0:
            raise ValueError("levels must be a non-empty 2D array")
        if self.bit_depth not in VALID_BIT_DEPTHS:
            raise ValueError(f"bit_depth must be one of {VALID_BIT_DEPTHS}")
        if not np.issubdtype(self.levels.dtype, np.integer):
            raise ValueError("levels must be integer-valued")
        if self.levels.min() < 0 or self.levels.max() >= 2 ** self.bit_depth:
            raise ValueError("levels out of range for bit depth")
        if not (self.spacing_mm > 0):
            raise ValueError("spacing_mm must be positive")

    @property
    def height(self) -> int:
        return self.levels.shape[0]

    @property
    def width(self) -> int:
        return self.levels.shape[1]

    @property
    def max_level(self) -> int:
        return 2 ** self.bit_depth - 1


BIRADS_LABELS = ("B-2", "B-3", "B-4", "B-5")
VIEWS = ("CC", "MLO")


@dataclass
class RoiRecord:
    """A square region of interest cropped around a mass, plus case metadata."""

    roi_id: str
    image: GrayImage
    patient_age: float
    birads_label: str
    view: str = "CC"

    def __post_init__(self):
        if self.image.height != self.image.width:
            raise ValueError("ROI image must be square")
        if not (0 <= self.patient_age <= 130):
            raise ValueError("patient_age out of range")
        if self.birads_label not in BIRADS_LABELS:
            raise ValueError(f"birads_label must be one of {BIRADS_LABELS}")
        if self.view not in VIEWS:
            raise ValueError(f"view must be one of {VIEWS}")


def load_png(path: str | Path, spacing_mm: float = 1.0) -> GrayImage:
    """Read a single-channel 8- or 16-bit PNG."""
    try:
        img = Image.open(path)
        img.load()
    except (OSError, ValueError) as exc:
        raise PipelineError("io", f"cannot read image {path}: {exc}") from exc
    if img.mode == "L":
        return GrayImage(np.asarray(img, dtype=np.uint8), 8, spacing_mm)
    if img.mode in ("I;16", "I;16B", "I"):
        arr = np.asarray(img.convert("I"), dtype=np.int64)
        if arr.min() < 0 or arr.max() > 65535:
            raise PipelineError("io", f"{path}: 16-bit levels out of range")
        return GrayImage(arr.astype(np.uint16), 16, spacing_mm)
    raise PipelineError("io", f"{path}: unsupported PNG mode {img.mode}")


def save_png(image: GrayImage, path: str | Path) -> None:
    """Write a GrayImage as an 8- or 16-bit single-channel PNG."""
    path = Path(path)
    if image.bit_depth == 8:
        pil = Image.fromarray(image.levels.astype(np.uint8), mode="L")
    else:
        pil = Image.fromarray(image.levels.astype(np.uint16))
    tmp = path.with_name(path.name + ".tmp")
    try:
        pil.save(tmp, format="PNG")
        tmp.replace(path)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise PipelineError("io", f"cannot write image {path}: {exc}") from exc


def crop_roi(full: GrayImage, center: tuple[int, int], radius: int) -> GrayImage:
    """Cut a square window of side 2*radius + 1 centred on ``center`` (row, col).

    The window is shifted to stay inside the image when the centre lies near a
    border. Raises "roi-exceeds-image" when the window cannot fit at all.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    side = 2 * radius + 1
    if side > full.height or side > full.width:
        raise PipelineError(
            "roi-exceeds-image",
            f"window side {side} exceeds image {full.height}x{full.width}",
        )
    row, col = center
    if not (0 <= row < full.height and 0 <= col < full.width):
        raise PipelineError("roi-exceeds-image", f"center {center} outside image")
    r0 = min(max(row - radius, 0), full.height - side)
    c0 = min(max(col - radius, 0), full.width - side)
    window = full.levels[r0 : r0 + side, c0 : c0 + side].copy()
    return GrayImage(window, full.bit_depth, full.spacing_mm)


def equalize_histogram(image: GrayImage) -> GrayImage:
    """Spread intensities with the classic CDF remap.

    v -> round((cdf(v) - cdf_min) / (1 - cdf_min) * (2**bit_depth - 1)),
    where cdf is the normalised cumulative histogram and cdf_min its smallest
    nonzero value. A constant image is returned unchanged.
    """
    nlevels = 2 ** image.bit_depth
    hist = np.bincount(image.levels.ravel(), minlength=nlevels)
    cdf = np.cumsum(hist) / image.levels.size
    cdf_min = cdf[np.nonzero(hist)[0][0]]
    if cdf_min >= 1.0:
        return GrayImage(image.levels.copy(), image.bit_depth, image.spacing_mm)
    lut = np.rint((cdf - cdf_min) / (1.0 - cdf_min) * (nlevels - 1))
    out = lut.astype(image.levels.dtype)[image.levels]
    return GrayImage(out, image.bit_depth, image.spacing_mm)

"""Retry ladder of image enhancements applied when a field fails its regexes.

Order is fixed by priority; each retry applies exactly one enhancement to the
original crop (they are alternatives, not a stack) and costs a 0.9 factor on
the reported confidence.
"""

from __future__ import annotations

import numpy as np
from PIL import Image, ImageEnhance, ImageFilter

from ..imaging import RasterImage


def brightness(image: RasterImage) -> RasterImage:
    """Lift overall lightness by 15%."""
    im = ImageEnhance.Brightness(image.to_pil()).enhance(1.15)
    return RasterImage.from_array(np.asarray(im))


def sharpness(image: RasterImage) -> RasterImage:
    """Sharpen edges, kernel strength 1.5."""
    im = ImageEnhance.Sharpness(image.to_pil()).enhance(1.5)
    return RasterImage.from_array(np.asarray(im))


def contrast_stretch(image: RasterImage) -> RasterImage:
    """Linearly rescale intensities to the full 0..255 range."""
    arr = image.to_array().astype(np.float64)
    lo, hi = arr.min(), arr.max()
    if hi <= lo:
        return image
    out = (arr - lo) * (255.0 / (hi - lo))
    return RasterImage.from_array(out.round().astype(np.uint8))


def otsu_binarize(image: RasterImage) -> RasterImage:
    """Split pixels into black/white foreground and background (Otsu)."""
    gray = np.asarray(image.to_pil().convert("L"))
    hist = np.bincount(gray.ravel(), minlength=256).astype(np.float64)
    total = gray.size
    best_t, best_var = 127, -1.0
    w0 = 0.0
    sum0 = 0.0
    sum_all = float(np.dot(np.arange(256), hist))
    for t in range(256):
        w0 += hist[t]
        if w0 == 0:
            continue
        w1 = total - w0
        if w1 == 0:
            break
        sum0 += t * hist[t]
        mu0 = sum0 / w0
        mu1 = (sum_all - sum0) / w1
        var = w0 * w1 * (mu0 - mu1) ** 2
        if var > best_var:
            best_var, best_t = var, t
    binary = np.where(gray > best_t, 255, 0).astype(np.uint8)
    return RasterImage.from_array(binary)


def median_denoise(image: RasterImage) -> RasterImage:
    """3x3 median filter."""
    im = image.to_pil().filter(ImageFilter.MedianFilter(3))
    return RasterImage.from_array(np.asarray(im))


# Priority order of the ladder.
ENHANCEMENTS = (
    ("brightness", brightness),
    ("sharpness", sharpness),
    ("contrast", contrast_stretch),
    ("binarization", otsu_binarize),
    ("noise-removal", median_denoise),
)

CONFIDENCE_DECAY = 0.9

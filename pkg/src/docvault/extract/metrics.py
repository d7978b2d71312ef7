"""Image similarity metrics used for template matching and alignment scoring.

SSIM here is the uniform-window variant: dense 8x8 sliding windows (stride 1)
over the BT.601 grayscale image, per-window population moments, constants
C1 = (0.01*255)^2 and C2 = (0.03*255)^2, averaged over all window positions.
Images smaller than the window fall back to a single whole-image window.

RASE (relative average spectral error):

    RASE(a, b) = (100 / mean(a)) * sqrt(mean_over_bands(RMSE_band^2))

where mean(a) is taken over all pixels and bands of the reference image a.
Zero means identical; the metric is undefined for an all-zero reference.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInput, UndefinedMetric
from ..imaging import RasterImage, luma

SSIM_WINDOW = 8
SSIM_C1 = (0.01 * 255.0) ** 2
SSIM_C2 = (0.03 * 255.0) ** 2


def _window_means(img: np.ndarray, win_h: int, win_w: int) -> np.ndarray:
    """Means of all win_h x win_w sliding windows via an integral image."""
    integral = np.zeros((img.shape[0] + 1, img.shape[1] + 1), dtype=np.float64)
    integral[1:, 1:] = np.cumsum(np.cumsum(img, axis=0), axis=1)
    sums = (
        integral[win_h:, win_w:]
        - integral[:-win_h, win_w:]
        - integral[win_h:, :-win_w]
        + integral[:-win_h, :-win_w]
    )
    return sums / (win_h * win_w)


def ssim(a: RasterImage, b: RasterImage) -> float:
    """Structural similarity in [-1, 1]; 1.0 for identical images."""
    if (a.width, a.height) != (b.width, b.height):
        raise InvalidInput("ssim requires images of equal dimensions")
    x = luma(a)
    y = luma(b)
    win_h = min(SSIM_WINDOW, x.shape[0])
    win_w = min(SSIM_WINDOW, x.shape[1])
    mu_x = _window_means(x, win_h, win_w)
    mu_y = _window_means(y, win_h, win_w)
    e_xx = _window_means(x * x, win_h, win_w)
    e_yy = _window_means(y * y, win_h, win_w)
    e_xy = _window_means(x * y, win_h, win_w)
    var_x = e_xx - mu_x * mu_x
    var_y = e_yy - mu_y * mu_y
    cov = e_xy - mu_x * mu_y
    numerator = (2 * mu_x * mu_y + SSIM_C1) * (2 * cov + SSIM_C2)
    denominator = (mu_x**2 + mu_y**2 + SSIM_C1) * (var_x + var_y + SSIM_C2)
    return float(np.mean(numerator / denominator))


def rase(a: RasterImage, b: RasterImage) -> float:
    """Relative average spectral error; 0.0 for identical images."""
    if (a.width, a.height) != (b.width, b.height):
        raise InvalidInput("rase requires images of equal dimensions")
    ref = a.to_array().astype(np.float64)
    other = b.to_array().astype(np.float64)
    mean_ref = float(ref.mean())
    if mean_ref == 0.0:
        raise UndefinedMetric("rase is undefined for an all-zero reference image")
    mse_per_band = ((ref - other) ** 2).mean(axis=(0, 1))
    return float(100.0 / mean_ref * np.sqrt(mse_per_band.mean()))

"""Document alignment: find the page quadrilateral and warp it upright.

An edge-detection threshold is swept over a fixed interval; at each step the
contours are extracted, four-corner candidates kept, and the largest-area
quadrilateral warped.  With a reference image the candidate warps are scored
by RASE against it (lower is better) and the best one returned; without a
reference the largest candidate wins.  When no usable quadrilateral exists at
any threshold the input comes back unchanged with the ``ALIGN_FAILED``
sentinel score.

Contour search runs on a downscaled copy for speed; the warp itself is
computed at full resolution.
"""

from __future__ import annotations

import math

import cv2
import numpy as np

from ..imaging import RasterImage
from .metrics import rase

ALIGN_FAILED = math.inf
THRESHOLDS = tuple(range(50, 251, 25))
DETECTION_WIDTH = 600
MIN_AREA_FRACTION = 0.25
# A detected quad this close to the whole frame means the document already
# fills the image (scan-style input); warping to it would only crop border
# pixels, so the input is treated as aligned.
FULL_FRAME_FRACTION = 0.95
SCORE_WIDTH = 200


def _order_corners(pts: np.ndarray) -> np.ndarray:
    """Order 4 points as top-left, top-right, bottom-right, bottom-left."""
    rect = np.zeros((4, 2), dtype=np.float32)
    s = pts.sum(axis=1)
    d = np.diff(pts, axis=1).ravel()
    rect[0] = pts[np.argmin(s)]
    rect[2] = pts[np.argmax(s)]
    rect[1] = pts[np.argmin(d)]
    rect[3] = pts[np.argmax(d)]
    return rect


def _candidate_quads(gray: np.ndarray, thresholds) -> list[np.ndarray]:
    blurred = cv2.GaussianBlur(gray, (5, 5), 0)
    min_area = MIN_AREA_FRACTION * gray.shape[0] * gray.shape[1]
    kernel = np.ones((3, 3), np.uint8)
    quads = []
    for t in thresholds:
        edges = cv2.Canny(blurred, t, 2 * t)
        edges = cv2.morphologyEx(edges, cv2.MORPH_CLOSE, kernel)
        contours, _ = cv2.findContours(edges, cv2.RETR_LIST, cv2.CHAIN_APPROX_SIMPLE)
        best = None
        best_area = min_area
        for c in contours:
            area = cv2.contourArea(c)
            if area < best_area:
                continue
            peri = cv2.arcLength(c, True)
            approx = cv2.approxPolyDP(c, 0.02 * peri, True)
            if len(approx) == 4 and cv2.isContourConvex(approx):
                best = approx.reshape(4, 2).astype(np.float32)
                best_area = area
        if best is not None:
            quads.append(best)
    return quads


def _warp(src: np.ndarray, quad: np.ndarray, dims: tuple[int, int] | None) -> np.ndarray:
    rect = _order_corners(quad)
    if dims is None:
        (tl, tr, br, bl) = rect
        width = int(max(np.linalg.norm(br - bl), np.linalg.norm(tr - tl)))
        height = int(max(np.linalg.norm(br - tr), np.linalg.norm(bl - tl)))
        dims = (max(2, width), max(2, height))
    dst = np.array(
        [[0, 0], [dims[0] - 1, 0], [dims[0] - 1, dims[1] - 1], [0, dims[1] - 1]],
        dtype=np.float32,
    )
    m = cv2.getPerspectiveTransform(rect, dst)
    return cv2.warpPerspective(src, m, dims)


def align(
    image: RasterImage,
    reference: RasterImage | None = None,
    thresholds=THRESHOLDS,
) -> tuple[RasterImage, float]:
    """Return (aligned image, score); score is RASE against ``reference``
    when given, 0.0 for a reference-free success, ``ALIGN_FAILED`` when the
    input is returned unchanged."""
    src = image.to_array()
    scale = min(1.0, DETECTION_WIDTH / image.width)
    if scale < 1.0:
        det = cv2.resize(src, (DETECTION_WIDTH, max(2, round(image.height * scale))))
    else:
        det = src
    gray = cv2.cvtColor(det, cv2.COLOR_RGB2GRAY)
    quads = _candidate_quads(gray, thresholds)
    if not quads:
        return image, ALIGN_FAILED

    det_area = gray.shape[0] * gray.shape[1]
    dims = (reference.width, reference.height) if reference is not None else None

    # Document already fills the frame: skip the warp entirely.
    largest = max(cv2.contourArea(q.reshape(4, 1, 2).astype(np.int32)) for q in quads)
    if largest >= FULL_FRAME_FRACTION * det_area:
        if reference is None:
            return image, 0.0
        return image, _score(image, reference)

    best_img: RasterImage | None = None
    best_score = math.inf
    if reference is not None:
        # The un-warped input always competes; a noisy, badly-clipped quad
        # must beat it on score to be preferred.
        best_img = image
        best_score = _score(image, reference)
    for quad in quads:
        warped = _warp(src, quad / scale, dims)
        candidate = RasterImage.from_array(warped)
        if reference is None:
            score = -cv2.contourArea(quad.reshape(4, 1, 2).astype(np.int32))
        else:
            score = _score(candidate, reference)
        if score < best_score:
            best_score = score
            best_img = candidate
    assert best_img is not None
    return best_img, (0.0 if reference is None else best_score)


def _score(candidate: RasterImage, reference: RasterImage) -> float:
    ref = reference.scaled_to_width(SCORE_WIDTH)
    cand = candidate.resized(ref.width, ref.height)
    return rase(ref, cand)

"""Pluggable face detection for automatic zone proposals.

The default binding is a deterministic fixture detector: it looks the image
up by content digest in a JSON sidecar file and echoes the recorded
rectangles, which keeps every downstream test reproducible without a vision
dependency.  ``EyePairFaceDetector`` is a small real detector (dark-blob eye
pairing) that can be plugged in where actual image analysis is wanted.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Protocol

import numpy as np

from ..imaging import RasterImage, Rect, luma


class FaceDetector(Protocol):
    def detect(self, image: RasterImage) -> list[Rect]: ...


class FixtureFaceDetector:
    """Returns rectangles recorded per image digest in a sidecar JSON file.

    Sidecar format: {"<sha256 hex of image.data>": [{"start_x": ...}, ...]}.
    Unknown images yield an empty list.
    """

    def __init__(self, sidecar_path: str | Path | None = None):
        self._entries: dict[str, list[dict]] = {}
        if sidecar_path is not None:
            p = Path(sidecar_path)
            if p.exists():
                self._entries = json.loads(p.read_text())

    def detect(self, image: RasterImage) -> list[Rect]:
        digest = hashlib.sha256(image.data).hexdigest()
        return [Rect.from_dict(d) for d in self._entries.get(digest, [])]


class NullFaceDetector:
    def detect(self, image: RasterImage) -> list[Rect]:
        return []


class EyePairFaceDetector:
    """Frontal-face heuristic: find two similar dark blobs side by side.

    Thresholds the grayscale image, extracts dark connected components,
    pairs blobs of similar size lying roughly on a horizontal line, and
    infers the face box from the eye distance.  Deterministic; meant for
    synthetic fixtures and as an example of a non-mock binding, not as a
    production-grade detector.
    """

    def __init__(self, dark_threshold: int = 80, max_blob_frac: float = 0.02):
        self.dark_threshold = dark_threshold
        self.max_blob_frac = max_blob_frac

    def detect(self, image: RasterImage) -> list[Rect]:
        gray = luma(image)
        mask = gray < self.dark_threshold
        blobs = _connected_components(mask)
        area_cap = self.max_blob_frac * image.width * image.height
        eyes = [b for b in blobs if 6 <= b["area"] <= area_cap]
        faces: list[Rect] = []
        used = set()
        eyes.sort(key=lambda b: b["area"], reverse=True)
        for i in range(len(eyes)):
            if i in used:
                continue
            for j in range(i + 1, len(eyes)):
                if j in used:
                    continue
                a, b = eyes[i], eyes[j]
                ratio = a["area"] / b["area"]
                if ratio > 2.5:
                    continue
                dy = abs(a["cy"] - b["cy"])
                dx = abs(a["cx"] - b["cx"])
                size = max(a["w"], a["h"], b["w"], b["h"])
                if dx < 1.5 * size or dx > 8 * size or dy > 0.5 * dx:
                    continue
                cx = (a["cx"] + b["cx"]) / 2
                cy = (a["cy"] + b["cy"]) / 2
                half_w = 1.1 * dx
                top = cy - 0.9 * dx
                bottom = cy + 1.3 * dx
                rect = Rect(
                    max(0, int(cx - half_w)),
                    max(0, int(top)),
                    min(image.width, int(cx + half_w)),
                    min(image.height, int(bottom)),
                )
                faces.append(rect)
                used.update((i, j))
                break
        return faces


def _connected_components(mask: np.ndarray) -> list[dict]:
    """4-connected components of a boolean mask via iterative flood fill."""
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    blobs = []
    next_label = 0
    ys, xs = np.nonzero(mask)
    for y0, x0 in zip(ys.tolist(), xs.tolist()):
        if labels[y0, x0]:
            continue
        next_label += 1
        stack = [(y0, x0)]
        labels[y0, x0] = next_label
        min_x = max_x = x0
        min_y = max_y = y0
        area = 0
        sum_x = sum_y = 0
        while stack:
            y, x = stack.pop()
            area += 1
            sum_x += x
            sum_y += y
            min_x, max_x = min(min_x, x), max(max_x, x)
            min_y, max_y = min(min_y, y), max(max_y, y)
            for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not labels[ny, nx]:
                    labels[ny, nx] = next_label
                    stack.append((ny, nx))
        blobs.append(
            {
                "area": area,
                "cx": sum_x / area,
                "cy": sum_y / area,
                "w": max_x - min_x + 1,
                "h": max_y - min_y + 1,
            }
        )
    return blobs


def detect_faces(image: RasterImage, detector: FaceDetector | None = None) -> list[Rect]:
    """Run the configured detector; the default mock detects nothing."""
    return (detector or NullFaceDetector()).detect(image)


def iou(a: Rect, b: Rect) -> float:
    """Intersection over union of two rectangles."""
    ix = max(0, min(a.end_x, b.end_x) - max(a.start_x, b.start_x))
    iy = max(0, min(a.end_y, b.end_y) - max(a.start_y, b.start_y))
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union if union else 0.0

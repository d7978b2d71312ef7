"""Template classification by combined SSIM/RASE score.

Both sides are downscaled to width 200 (the speed/accuracy operating point),
the upload's candidate field regions are whited out to mirror the processed
reference, and the combined score

    score = SSIM - 0.5 * (RASE / 100)

is maximized over the registry.  Identical images score 1.0; unrelated
layouts land near 0.  Matches below 0.35 are rejected.
"""

from __future__ import annotations

import numpy as np

from ..imaging import RasterImage
from .metrics import rase, ssim
from .model import Template

MATCH_WIDTH = 200
MATCH_THRESHOLD = 0.35
RASE_WEIGHT = 0.5


def _whiten_fields(image: RasterImage, template: Template, sx: float, sy: float) -> RasterImage:
    arr = image.to_array().copy()
    page = template.pages[0]
    for f in page.fields:
        r = f.rect
        arr[
            int(r.start_y * sy) : max(int(r.start_y * sy) + 1, int(r.end_y * sy)),
            int(r.start_x * sx) : max(int(r.start_x * sx) + 1, int(r.end_x * sx)),
        ] = 255
    return RasterImage.from_array(arr)


def match_score(image: RasterImage, template: Template) -> float:
    """Combined similarity of an upload against one template's first page.

    Field regions are whited out on both sides at match scale so that the
    upload's variable field content (and the reference's antialiased blanks)
    cannot influence the score; identical inputs score exactly 1.0.
    """
    page = template.pages[0]
    ref = page.processed_image.scaled_to_width(MATCH_WIDTH)
    upload = image.resized(ref.width, ref.height)
    sx = ref.width / page.processed_image.width
    sy = ref.height / page.processed_image.height
    upload = _whiten_fields(upload, template, sx, sy)
    ref = _whiten_fields(ref, template, sx, sy)
    return ssim(ref, upload) - RASE_WEIGHT * (rase(ref, upload) / 100.0)


def match_template(
    image: RasterImage,
    templates,
    threshold: float = MATCH_THRESHOLD,
) -> tuple[Template, float] | None:
    """Best-scoring template above the threshold, or None."""
    best: Template | None = None
    best_score = -np.inf
    for template in templates:
        score = match_score(image, template)
        if score > best_score:
            best, best_score = template, score
    if best is None or best_score < threshold:
        return None
    return best, float(best_score)

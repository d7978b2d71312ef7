"""Template registry and the end-to-end field extraction pipeline.

Extraction runs align -> match -> per-field crop -> OCR -> category regexes.
A field whose text fails every regex is retried through the enhancement
ladder (brightness, sharpness, contrast, binarization, noise removal); each
retry multiplies the reported confidence by 0.9.  Fields that still fail are
omitted from the result, never emitted empty.
"""

from __future__ import annotations

import logging
import threading
from typing import Iterable, Sequence

import cv2
import numpy as np

from ..errors import InvalidTemplate
from ..imaging import RasterImage, Rect
from .alignment import ALIGN_FAILED, align
from .categories import DEFAULT_CATEGORIES
from .enhance import CONFIDENCE_DECAY, ENHANCEMENTS
from .matching import match_template
from .model import (
    ExtractedField,
    ExtractedPage,
    ExtractionResult,
    FieldCategory,
    FieldSpec,
    Template,
    TemplatePage,
    new_id,
)
from .ocr import OcrEngine

logger = logging.getLogger(__name__)

ADAPTIVE_BLOCK = 11
ADAPTIVE_C = 2
WHITE = (255, 255, 255)


def preprocess(crop: RasterImage) -> RasterImage:
    """Grayscale + adaptive threshold (block 11, constant 2).

    A 3x3 blur ahead of the threshold keeps sensor noise on flat background
    from speckling through the small constant offset.
    """
    gray = cv2.cvtColor(crop.to_array(), cv2.COLOR_RGB2GRAY)
    gray = cv2.GaussianBlur(gray, (3, 3), 0)
    binary = cv2.adaptiveThreshold(
        gray,
        255,
        cv2.ADAPTIVE_THRESH_MEAN_C,
        cv2.THRESH_BINARY,
        ADAPTIVE_BLOCK,
        ADAPTIVE_C,
    )
    return RasterImage.from_array(binary)


class TemplateRegistry:
    """Registered templates; registration is serialized, reads are free."""

    def __init__(self, categories: dict[str, FieldCategory] | None = None):
        self.categories = dict(categories or DEFAULT_CATEGORIES)
        self._templates: dict[str, Template] = {}
        self._lock = threading.Lock()

    def register_template(
        self,
        name: str,
        pages: Sequence[tuple[RasterImage, Sequence[FieldSpec]]],
        detector=None,
    ) -> Template:
        """Store a template whose pages have faces and fields whited out.

        Only the processed copy is retained; the uploaded originals are not.
        """
        processed_pages = []
        for idx, (image, fields) in enumerate(pages):
            for f in fields:
                if not image.bounds.contains(f.rect):
                    raise InvalidTemplate(
                        f"field {f.name!r} rectangle exceeds page bounds"
                    )
                if f.category not in self.categories:
                    raise InvalidTemplate(f"unknown category {f.category!r}")
            arr = image.to_array().copy()
            rects = [f.rect for f in fields]
            if detector is not None:
                rects.extend(detector.detect(image))
            for r in rects:
                arr[r.start_y : r.end_y, r.start_x : r.end_x] = WHITE
            processed_pages.append(
                TemplatePage(
                    id=new_id(),
                    name=f"{name}-page-{idx}",
                    processed_image=RasterImage.from_array(arr),
                    fields=tuple(fields),
                )
            )
        template = Template(id=new_id(), name=name, pages=tuple(processed_pages))
        with self._lock:
            self._templates[template.id] = template
        return template

    def __iter__(self):
        return iter(list(self._templates.values()))

    def __len__(self):
        return len(self._templates)

    def get(self, template_id: str) -> Template | None:
        return self._templates.get(template_id)


def _read_field(
    work: RasterImage,
    spec: FieldSpec,
    category: FieldCategory,
    ocr: OcrEngine,
) -> ExtractedField | None:
    crop_arr = work.to_array()[
        spec.rect.start_y : spec.rect.end_y, spec.rect.start_x : spec.rect.end_x
    ]
    crop = RasterImage.from_array(np.ascontiguousarray(crop_arr))

    attempts: list[tuple[int, RasterImage]] = [(0, crop)]
    attempts += [(i + 1, fn(crop)) for i, (_, fn) in enumerate(ENHANCEMENTS)]
    for retries, candidate in attempts:
        reading = ocr.read(preprocess(candidate))
        if not reading.text:
            continue
        text = category.extract(reading.text)
        if text is None:
            continue
        confidence = min(1.0, max(0.0, reading.confidence * CONFIDENCE_DECAY**retries))
        return ExtractedField(
            name=spec.name,
            text=text,
            sensitive=spec.sensitive,
            confidence_score=confidence,
            coordinates=spec.rect,
        )
    return None


def extract(
    image: RasterImage,
    registry: TemplateRegistry | Iterable[Template],
    ocr: OcrEngine,
) -> ExtractionResult:
    """Classify and extract one uploaded image.

    A single image maps to the matched template's first page.  No match
    yields document_type "Unclassified" with zero pages.
    """
    templates = list(registry)
    categories = (
        registry.categories if isinstance(registry, TemplateRegistry) else DEFAULT_CATEGORIES
    )
    aligned, _ = align(image)
    # A warp only helps when the page was skewed; classify on whichever of
    # warped/raw scores better so a spurious quad cannot derail matching.
    candidates = [aligned] if aligned is image else [aligned, image]
    matched = max(
        (match_template(c, templates) for c in candidates),
        key=lambda m: -1.0 if m is None else m[1],
    )
    if matched is None:
        return ExtractionResult.unclassified()
    template, _ = matched
    page = template.pages[0]

    refined, score = align(image, reference=page.processed_image)
    base = aligned if score == ALIGN_FAILED else refined
    work = base.resized(page.processed_image.width, page.processed_image.height)

    fields = []
    for spec in page.fields:
        category = categories[spec.category]
        got = _read_field(work, spec, category, ocr)
        if got is not None:
            fields.append(got)
        else:
            logger.debug("field %s unreadable; omitted", spec.name)
    return ExtractionResult(
        document_type=template.name,
        pages=(ExtractedPage(id=page.id, fields=tuple(fields)),),
    )

"""Template registration, document alignment/matching and field extraction."""

from .accuracy import AccuracyReport, cer, field_accuracy, levenshtein
from .alignment import ALIGN_FAILED, align
from .categories import DEFAULT_CATEGORIES
from .corpus import DocumentLayout, build_layouts, generate_corpus, make_cnp
from .matching import match_score, match_template
from .metrics import rase, ssim
from .model import (
    ExtractedField,
    ExtractedPage,
    ExtractionResult,
    FieldCategory,
    FieldSpec,
    Template,
    TemplatePage,
    UNCLASSIFIED,
)
from .ocr import GlyphOcr, OcrEngine, OcrReading, PytesseractOcr
from .pipeline import TemplateRegistry, extract, preprocess

__all__ = [
    "ALIGN_FAILED",
    "AccuracyReport",
    "DEFAULT_CATEGORIES",
    "DocumentLayout",
    "ExtractedField",
    "ExtractedPage",
    "ExtractionResult",
    "FieldCategory",
    "FieldSpec",
    "GlyphOcr",
    "OcrEngine",
    "OcrReading",
    "PytesseractOcr",
    "Template",
    "TemplatePage",
    "TemplateRegistry",
    "UNCLASSIFIED",
    "align",
    "build_layouts",
    "cer",
    "extract",
    "field_accuracy",
    "generate_corpus",
    "levenshtein",
    "make_cnp",
    "match_score",
    "match_template",
    "preprocess",
    "rase",
    "ssim",
]

"""Domain types for template registration and extraction results."""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass, field

from ..errors import InvalidInput, InvalidTemplate
from ..imaging import RasterImage, Rect


@dataclass(frozen=True)
class FieldCategory:
    """Named family of fields with the regexes used to pull their text."""

    id: str
    name: str
    regexes: tuple[str, ...]

    def __post_init__(self):
        if not self.regexes:
            raise InvalidInput(f"category {self.id} needs at least one regex")
        for rx in self.regexes:
            re.compile(rx)

    def extract(self, text: str) -> str | None:
        """First regex match wins; None when nothing matches."""
        for rx in self.regexes:
            m = re.search(rx, text)
            if m:
                return m.group(0)
        return None


@dataclass(frozen=True)
class FieldSpec:
    """A labeled rectangle on a template page."""

    name: str
    rect: Rect
    sensitive: bool
    category: str


@dataclass(frozen=True)
class TemplatePage:
    """One page of a registered template; the reference image is the
    processed copy (faces and declared fields whited out)."""

    id: str
    name: str
    processed_image: RasterImage
    fields: tuple[FieldSpec, ...]


@dataclass(frozen=True)
class Template:
    id: str
    name: str
    pages: tuple[TemplatePage, ...]

    def __post_init__(self):
        if not self.pages:
            raise InvalidTemplate("a template needs at least one page")
        ids = [p.id for p in self.pages]
        if len(ids) != len(set(ids)):
            raise InvalidTemplate("page ids must be unique")


def new_id() -> str:
    return str(uuid.uuid4())


@dataclass(frozen=True)
class ExtractedField:
    name: str
    text: str
    sensitive: bool
    confidence_score: float
    coordinates: Rect

    def __post_init__(self):
        if not 0.0 <= self.confidence_score <= 1.0:
            raise InvalidInput("confidence_score must be within [0, 1]")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "text": self.text,
            "sensitive": self.sensitive,
            "confidence_score": self.confidence_score,
            "coordinates": self.coordinates.to_dict(),
        }


@dataclass(frozen=True)
class ExtractedPage:
    id: str
    fields: tuple[ExtractedField, ...]

    def to_dict(self) -> dict:
        return {"id": self.id, "fields": [f.to_dict() for f in self.fields]}


UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class ExtractionResult:
    """Wire-shaped result: document type plus per-page field lists.

    Fields that could not be read are absent, never empty placeholders.
    """

    document_type: str
    pages: tuple[ExtractedPage, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "document_type": self.document_type,
            "pages": [p.to_dict() for p in self.pages],
        }

    def field_map(self) -> dict[str, str]:
        """Flat name -> text view over all pages (later pages win on clash)."""
        out: dict[str, str] = {}
        for page in self.pages:
            for f in page.fields:
                out[f.name] = f.text
        return out

    def sensitive_fields(self) -> list[ExtractedField]:
        return [f for p in self.pages for f in p.fields if f.sensitive]

    @classmethod
    def unclassified(cls) -> "ExtractionResult":
        return cls(document_type=UNCLASSIFIED, pages=())

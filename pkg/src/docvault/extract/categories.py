"""Default field category registry.

Categories map regexes to fields; registration rejects fields whose category
is not present in the registry in use.
"""

from __future__ import annotations

from .model import FieldCategory

DEFAULT_CATEGORIES: dict[str, FieldCategory] = {
    c.id: c
    for c in (
        FieldCategory("cnp", "personal numeric code", (r"\d{13}",)),
        FieldCategory("series", "document series", (r"[A-Z]{2}",)),
        FieldCategory("number", "document number", (r"\d{6}",)),
        FieldCategory("date", "calendar date", (r"\d{2}\.\d{2}\.\d{4}",)),
        FieldCategory(
            "date-range",
            "validity range",
            (r"\d{2}\.\d{2}\.\d{4}-\d{2}\.\d{2}\.\d{4}",),
        ),
        FieldCategory("name", "person name", (r"[A-Z]+(?:-[A-Z]+)*",)),
        FieldCategory("address", "free-text address", (r"\S.*\S|\S",)),
    )
}

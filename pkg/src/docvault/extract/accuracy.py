"""Extraction quality scoring: exact-match accuracy and character error rate."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidInput
from .model import ExtractionResult


def levenshtein(a: str, b: str) -> int:
    """Edit distance (insert/delete/substitute, unit costs)."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (ca != cb),
                )
            )
        previous = current
    return previous[-1]


def cer(extracted: str, reference: str) -> float:
    """Character error rate: edit distance over reference length."""
    if not reference:
        raise InvalidInput("reference text must be non-empty")
    return levenshtein(extracted, reference) / len(reference)


@dataclass(frozen=True)
class AccuracyReport:
    accuracy: float
    cer: float
    correct: int
    total: int


def field_accuracy(
    results: ExtractionResult | dict[str, str],
    ground_truth: dict[str, str],
) -> AccuracyReport:
    """Exact-match fraction over the expected fields, plus corpus CER.

    An omitted field counts as wrong and contributes its full reference
    length to the CER numerator.
    """
    if not ground_truth:
        raise InvalidInput("ground truth must cover at least one field")
    got = results.field_map() if isinstance(results, ExtractionResult) else dict(results)
    correct = 0
    edits = 0
    ref_chars = 0
    for name, truth in ground_truth.items():
        ref_chars += len(truth)
        value = got.get(name)
        if value == truth:
            correct += 1
        elif value is None:
            edits += len(truth)
        else:
            edits += levenshtein(value, truth)
    total = len(ground_truth)
    return AccuracyReport(
        accuracy=correct / total,
        cer=edits / ref_chars if ref_chars else 0.0,
        correct=correct,
        total=total,
    )

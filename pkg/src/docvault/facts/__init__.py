"""Signed, minimal, expirable facts derived from extracted document fields."""

from .cnp import checksum_digit, decode_cnp, validate_cnp
from .model import Fact, canonical_json, fact_hash, signature_valid
from .registry import FactRegistry, FactStatus, RevocationEntry
from .rules import (
    DEFAULT_RULES,
    FactDraft,
    FactRule,
    adulthood_date,
    derive_facts,
    is_over_18,
    name_matches_rule,
    parse_field_date,
)

__all__ = [
    "DEFAULT_RULES",
    "Fact",
    "FactDraft",
    "FactRegistry",
    "FactRule",
    "FactStatus",
    "RevocationEntry",
    "adulthood_date",
    "canonical_json",
    "checksum_digit",
    "decode_cnp",
    "derive_facts",
    "fact_hash",
    "is_over_18",
    "name_matches_rule",
    "parse_field_date",
    "signature_valid",
    "validate_cnp",
]

"""Rule evaluation: turn extracted fields into minimal fact drafts.

Five predicates are supported: over_18, document_valid, is_student,
name_matches and domicile_ro.  A rule whose premise does not hold emits
nothing; a malformed field value skips that rule with a diagnostic while the
others proceed.  Drafts never carry the raw field values they were derived
from.

Age boundary: inclusive on the birthday (turning 18 today counts), computed
calendar-aware in UTC; Feb-29 birthdays mature on Mar-1 in non-leap years.
"""

from __future__ import annotations

import calendar
import logging
import re
from dataclasses import dataclass, field
from datetime import date, datetime, time, timezone
from typing import Callable, Mapping, Sequence

from ..errors import InvalidInput
from .cnp import decode_cnp

logger = logging.getLogger(__name__)

ADULT_YEARS = 18

_DATE_RX = re.compile(r"(\d{2})[./](\d{2})[./](\d{4})")


@dataclass(frozen=True)
class FactDraft:
    predicate: str
    subject: str = ""
    source_document: str = ""
    expires_at: datetime | None = None


def parse_field_date(value: str) -> date:
    """Accept dd.mm.yyyy and dd/mm/yyyy."""
    m = _DATE_RX.fullmatch(value.strip())
    if not m:
        raise InvalidInput(f"not a recognizable date: {value!r}")
    day, month, year = (int(g) for g in m.groups())
    try:
        return date(year, month, day)
    except ValueError as exc:
        raise InvalidInput(f"invalid calendar date {value!r}: {exc}") from exc


def adulthood_date(birth: date) -> date:
    """The day the person turns 18 (Feb-29 -> Mar-1 in non-leap years)."""
    year = birth.year + ADULT_YEARS
    if birth.month == 2 and birth.day == 29 and not calendar.isleap(year):
        return date(year, 3, 1)
    return date(year, birth.month, birth.day)


def is_over_18(birth: date, now: datetime) -> bool:
    return now.date() >= adulthood_date(birth)


def _birthdate_from_fields(fields: Mapping[str, str]) -> date:
    if "birthdate" in fields:
        return parse_field_date(fields["birthdate"])
    if "cnp" in fields:
        return decode_cnp(fields["cnp"])
    raise InvalidInput("no birthdate or CNP field present")


@dataclass(frozen=True)
class FactRule:
    predicate: str
    applies: Callable[[Mapping[str, str], datetime], bool]
    expiry: Callable[[Mapping[str, str], datetime], datetime | None] = (
        lambda fields, now: None
    )


def _end_of_day_utc(d: date) -> datetime:
    return datetime.combine(d, time(23, 59, 59), tzinfo=timezone.utc)


def _validity_range(fields: Mapping[str, str]) -> tuple[date, date]:
    raw = fields.get("valability") or fields.get("validity")
    if not raw:
        raise InvalidInput("no validity range field present")
    parts = raw.split("-")
    if len(parts) != 2:
        raise InvalidInput(f"not a date range: {raw!r}")
    return parse_field_date(parts[0]), parse_field_date(parts[1])


def _rule_over_18(fields, now):
    return is_over_18(_birthdate_from_fields(fields), now)


def _rule_document_valid(fields, now):
    start, end = _validity_range(fields)
    return start <= now.date() <= end


def _expiry_document_valid(fields, now):
    _, end = _validity_range(fields)
    return _end_of_day_utc(end)


def _rule_is_student(fields, now):
    status = fields.get("status")
    if status is None:
        raise InvalidInput("no status field present")
    return status.strip().lower() == "student"


def _rule_domicile_ro(fields, now):
    country = fields.get("country")
    if country is not None and country.strip().lower() in ("romania", "ro"):
        return True
    address = fields.get("address")
    if address is None and country is None:
        raise InvalidInput("no address or country field present")
    return bool(address) and "romania" in address.lower()


def name_matches_rule(reference: str) -> FactRule:
    """Identity linkage: the extracted name equals the reference name."""

    def _norm(s: str) -> str:
        return re.sub(r"[\s-]+", " ", s).strip().lower()

    def applies(fields, now):
        name = fields.get("name")
        if name is None:
            raise InvalidInput("no name field present")
        return _norm(name) == _norm(reference)

    return FactRule(predicate="name_matches", applies=applies)


DEFAULT_RULES: tuple[FactRule, ...] = (
    FactRule("over_18", _rule_over_18),
    FactRule("document_valid", _rule_document_valid, _expiry_document_valid),
    FactRule("is_student", _rule_is_student),
    FactRule("domicile_ro", _rule_domicile_ro),
)


def derive_facts(
    fields: Mapping[str, str] | Sequence[tuple[str, str]],
    rules: Sequence[FactRule] = DEFAULT_RULES,
    now: datetime | None = None,
    *,
    subject: str = "",
    source_document: str = "",
    problems: list[str] | None = None,
) -> list[FactDraft]:
    """Evaluate every rule; emit drafts for the ones whose premise holds.

    ``problems`` (when given) collects one diagnostic per skipped rule.
    """
    if now is None:
        now = datetime.now(timezone.utc)
    field_map = dict(fields)
    drafts: list[FactDraft] = []
    for rule in rules:
        try:
            if not rule.applies(field_map, now):
                continue
            drafts.append(
                FactDraft(
                    predicate=rule.predicate,
                    subject=subject,
                    source_document=source_document,
                    expires_at=rule.expiry(field_map, now),
                )
            )
        except InvalidInput as exc:
            message = f"rule {rule.predicate} skipped: {exc}"
            logger.debug(message)
            if problems is not None:
                problems.append(message)
    return drafts

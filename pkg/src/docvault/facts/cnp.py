"""Romanian personal numeric code (CNP) decoding and validation.

Layout: S YY MM DD JJ NNN C: a century/sex digit, birth date, county,
sequence number and a weighted checksum.  Century mapping: 1/2 -> 1900s,
3/4 -> 1800s, 5/6 -> 2000s.  The checksum digit is the dot product of the
first 12 digits with the weight vector 2-7-9-1-4-6-3-5-8-2-7-9 modulo 11,
with a result of 10 mapped to 1.
"""

from __future__ import annotations

from datetime import date

from ..errors import InvalidInput

CHECKSUM_WEIGHTS = (2, 7, 9, 1, 4, 6, 3, 5, 8, 2, 7, 9)

_CENTURY = {"1": 1900, "2": 1900, "3": 1800, "4": 1800, "5": 2000, "6": 2000}


def checksum_digit(first_twelve: str) -> int:
    """Checksum over the first 12 digits."""
    if len(first_twelve) != 12 or not first_twelve.isdigit():
        raise InvalidInput("checksum input must be exactly 12 digits")
    total = sum(int(d) * w for d, w in zip(first_twelve, CHECKSUM_WEIGHTS))
    rem = total % 11
    return 1 if rem == 10 else rem


def validate_cnp(cnp: str) -> bool:
    """True when the code is 13 digits with a correct checksum and date."""
    try:
        decode_cnp(cnp)
        return True
    except InvalidInput:
        return False


def decode_cnp(cnp: str) -> date:
    """Return the birth date embedded in a valid CNP; raise on malformed."""
    if len(cnp) != 13 or not cnp.isdigit():
        raise InvalidInput("CNP must be exactly 13 digits")
    century = _CENTURY.get(cnp[0])
    if century is None:
        raise InvalidInput(f"unsupported CNP century digit {cnp[0]!r}")
    if checksum_digit(cnp[:12]) != int(cnp[12]):
        raise InvalidInput("CNP checksum mismatch")
    year = century + int(cnp[1:3])
    month = int(cnp[3:5])
    day = int(cnp[5:7])
    try:
        return date(year, month, day)
    except ValueError as exc:
        raise InvalidInput(f"CNP embeds an invalid date: {exc}") from exc

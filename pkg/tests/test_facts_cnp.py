"""CNP decoding against a brute-force checksum oracle."""

import numpy as np
import pytest

from docvault.errors import InvalidInput
from docvault.facts import checksum_digit, decode_cnp, validate_cnp
from docvault.extract import make_cnp

WEIGHTS = (2, 7, 9, 1, 4, 6, 3, 5, 8, 2, 7, 9)


def oracle_checksum(first12: str) -> int:
    """Brute force over the 13th digit: the unique digit that makes the
    weighted congruence hold (with the 10 -> 1 rule)."""
    total = sum(int(d) * w for d, w in zip(first12, WEIGHTS))
    rem = total % 11
    expected = 1 if rem == 10 else rem
    matches = [c for c in range(10) if c == expected]
    assert len(matches) == 1
    return matches[0]


class TestChecksum:
    def test_against_oracle_on_random_codes(self):
        rng = np.random.default_rng(99)
        for _ in range(500):
            first12 = "".join(str(d) for d in rng.integers(0, 10, size=12))
            assert checksum_digit(first12) == oracle_checksum(first12)

    def test_paper_style_code_decodes(self):
        # century digit 1 -> 1900s; YYMMDD 970523 -> 1997-05-23
        first12 = "197052340001"
        cnp = first12 + str(checksum_digit(first12))
        birth = decode_cnp(cnp)
        assert (birth.year, birth.month, birth.day) == (1997, 5, 23)

    def test_wrong_checksum_rejected(self):
        first12 = "197052340001"
        good = checksum_digit(first12)
        bad = (good + 1) % 10
        assert not validate_cnp(first12 + str(bad))

    @pytest.mark.parametrize(
        "digit,century", [("1", 1900), ("2", 1900), ("3", 1800), ("4", 1800), ("5", 2000), ("6", 2000)]
    )
    def test_century_mapping(self, digit, century):
        first12 = f"{digit}01052340001"
        cnp = first12 + str(checksum_digit(first12))
        assert decode_cnp(cnp).year == century + 1

    def test_malformed_codes(self):
        with pytest.raises(InvalidInput):
            decode_cnp("12345")
        with pytest.raises(InvalidInput):
            decode_cnp("abcdefghijklm")
        with pytest.raises(InvalidInput):
            decode_cnp("9970523400013")  # unsupported century digit
        # embedded invalid date (month 13)
        first12 = "197130140001"
        with pytest.raises(InvalidInput):
            decode_cnp(first12 + str(checksum_digit(first12)))

    def test_generated_codes_are_always_valid(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            assert validate_cnp(make_cnp(rng))

"""
Text processing utilities for spectrum_ledger.

Exact conversion between decimal FT strings and wei, and tokenizing of
scenario lines. No floating point is used anywhere in the amount path.
"""

import re
import shlex
from typing import List

from ..errors import MalformedAmountError
from ..models import MAX_UINT256, TOKEN_DECIMALS, UNIT

_AMOUNT = re.compile(r"^([0-9]+)(?:\.([0-9]+))?$")


class TextUtils:
    """Utility class for amount and scenario-line text handling."""

    @staticmethod
    def parse_amount(text: str) -> int:
        """
        Parse a decimal FT amount into wei.

        Args:
            text: ``"1"``, ``"0.1"``, ``"7.9"``; at most 18 fraction digits

        Returns:
            Exact amount in wei

        Raises:
            MalformedAmountError: empty input, stray characters, too many
                fraction digits, or a value beyond 2^256 - 1
        """
        if not isinstance(text, str) or not text:
            raise MalformedAmountError(str(text), "empty amount")

        match = _AMOUNT.match(text)
        if not match:
            raise MalformedAmountError(text, "expected digits with an optional .fraction")

        whole, fraction = match.group(1), match.group(2) or ""
        if len(fraction) > TOKEN_DECIMALS:
            raise MalformedAmountError(text, f"more than {TOKEN_DECIMALS} fraction digits")

        wei = int(whole) * UNIT + int(fraction.ljust(TOKEN_DECIMALS, "0") or "0")
        if wei > MAX_UINT256:
            raise MalformedAmountError(text, "exceeds the 256-bit token range")
        return wei

    @staticmethod
    def render_decimal(wei: int) -> str:
        """Render wei as a decimal FT string with no trailing fraction zeros."""
        if wei < 0:
            raise ValueError(f"negative amount: {wei}")
        whole, fraction = divmod(wei, UNIT)
        if not fraction:
            return str(whole)
        return f"{whole}.{str(fraction).rjust(TOKEN_DECIMALS, '0').rstrip('0')}"

    @staticmethod
    def tokenize_line(line: str) -> List[str]:
        """
        Split one scenario line into words.

        ``#`` starts a comment; double quotes group words containing spaces.
        """
        lexer = shlex.shlex(line, posix=True)
        lexer.whitespace_split = True
        lexer.commenters = "#"
        return list(lexer)

"""
Locale-independent conversion of floats to and from text, used by every text file nftcast
writes (histories, reports, forecasts, decompositions) so values survive a write/read cycle
unchanged.
"""

from typing import Optional

PLUS_INFINITY = float("inf")
PLUS_INFINITY_STR = "+INF"

MINUS_INFINITY = float("-inf")
MINUS_INFINITY_STR = "-INF"

NAN = float("nan")
NAN_STR = "NAN"


def FormatFloat(value: float, pattern: Optional[str] = None) -> str:
    """
    Formats the value given, by default with the shortest representation that reads back to the
    exact same float.

    :param value:
        The value to be formatted.

    :param pattern:
        Optional `%` pattern (e.g. "%.6g") for display-only output, where exact round-trip is
        not needed.

    :returns:
        The formatted value. Negative zero is written as zero.
    """
    value = float(value)
    if value == PLUS_INFINITY:
        return PLUS_INFINITY_STR
    elif value == MINUS_INFINITY:
        return MINUS_INFINITY_STR
    elif value != value:  # Not a Number
        return NAN_STR

    # This removes the minus sign from the string representation of the float
    if value == 0.0:
        value = 0.0

    if pattern is None:
        return repr(value)
    return pattern % value


def FloatFromString(str_value: str) -> float:
    """
    Converts text written by `FormatFloat` (or any Python float literal) back to a float.

    :raises ValueError:
        If given string is not a valid float literal.
    """
    str_value = str_value.strip()
    if str_value == PLUS_INFINITY_STR:
        return PLUS_INFINITY
    elif str_value == MINUS_INFINITY_STR:
        return MINUS_INFINITY
    elif str_value == NAN_STR:
        return NAN
    return float(str_value)


__all__ = [
    "FloatFromString",
    "FormatFloat",
    "MINUS_INFINITY",
    "MINUS_INFINITY_STR",
    "NAN",
    "NAN_STR",
    "PLUS_INFINITY",
    "PLUS_INFINITY_STR",
]

"""Helper functions."""

from __future__ import annotations


def is_int(value: str | int) -> bool:
    """Check if a string can be converted to an integer."""
    if isinstance(value, bool):
        return False
    try:
        int(value)
    except (TypeError, ValueError):
        return False
    return True


def parse_int_list(text: str) -> list[int]:
    """Parse a comma separated list of exact decimal integers.

    Args:
        text: the list, e.g. ``"0,64638,1"``.

    Returns:
        The integers in the given order.
    """
    parts = [part.strip() for part in str(text).split(",")]
    if not parts or any(not is_int(part) for part in parts):
        raise ValueError(f"Bad format for '{text}'. Use comma separated integers like '0,64638,1'.")
    return [int(part) for part in parts]


def parse_matrix(text: str) -> list[list[list[int]]]:
    """Parse a square matrix of coefficient lists.

    Rows are separated by ``;``, entries by whitespace and the coefficients
    of one entry by commas: ``"0 1,1;2 0"`` is ``[[0, 1+S], [2, 0]]``.

    Args:
        text: the matrix description.

    Returns:
        A list of rows, each a list of coefficient lists.
    """
    rows = [row.split() for row in str(text).split(";") if row.strip()]
    if not rows:
        raise ValueError(f"Bad format for '{text}'. Use rows like '0 1,1;2 0'.")
    matrix = [[parse_int_list(entry) for entry in row] for row in rows]
    if any(len(row) != len(matrix) for row in matrix):
        raise ValueError(f"Matrix '{text}' must be square, found {len(matrix)} rows.")
    return matrix


def format_monomial(coefficient: int, powers: list[tuple[str, int]]) -> str:
    """Format ``coefficient * X^i * Y^j`` with unit factors and exponents dropped.

    Args:
        coefficient: a non-zero integer coefficient.
        powers: the variables and their exponents.
    """
    factors = [var if exp == 1 else f"{var}^{exp}" for var, exp in powers if exp > 0]
    if not factors:
        return str(coefficient)
    if coefficient == 1:
        return "*".join(factors)
    return "*".join([str(coefficient), *factors])


def join_terms(terms: list[str]) -> str:
    """Join formatted terms with ``+``; an empty list is ``0``."""
    return " + ".join(terms) if terms else "0"


def format_modulus(p: int, prec: int) -> str:
    """Modulus annotation used by every textual form, e.g. ``(mod 3^11)``."""
    return f"(mod {p}^{prec})"

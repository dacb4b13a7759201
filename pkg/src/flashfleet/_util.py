"""Small shared helpers: exact rational parsing and hashing."""

from __future__ import annotations

import hashlib
from fractions import Fraction

__all__ = ["as_fraction", "sha256_hex"]


def as_fraction(value) -> Fraction:
    """Convert a config value to an exact Fraction.

    Decimal strings are the recommended form ("0.1" becomes 1/10
    exactly). Floats go through their shortest repr, so 0.1 also maps
    to 1/10 rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a fraction")


def sha256_hex(chunks) -> str:
    """Hex digest over an iterable of bytes chunks."""
    h = hashlib.sha256()
    for chunk in chunks:
        h.update(chunk)
    return h.hexdigest()

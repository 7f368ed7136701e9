"""Exact rational kernel: combinatorial coefficients and rational (de)serialization.

All scalar arithmetic in this package runs on `fractions.Fraction`, which
already provides canonical reduced form (positive denominator, gcd one) and
structural equality.  This module adds the three coefficient families the
nested-sum machinery needs and the canonical text form used in reports.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

RationalLike = Union[Fraction, int]

__all__ = [
    "binomial",
    "multinomial",
    "gen_binomial",
    "format_rational",
    "parse_rational",
]


def binomial(n: int, k: int) -> int:
    """C(n, k) for naturals, with C(n, k) = 0 when k > n.

    The k > n convention matches the alternating-sum formulas where upper
    limits may exceed the top argument.
    """
    if n < 0 or k < 0:
        raise ValueError(f"binomial requires naturals, got ({n}, {k})")
    return math.comb(n, k) if k <= n else 0


def multinomial(n: int, parts: Iterable[int]) -> int:
    """n! / prod(parts_j!) where parts must sum to n.

    A mismatched sum signals a malformed chain decomposition upstream, so it
    is rejected rather than silently reinterpreted.
    """
    parts = list(parts)
    if n < 0 or any(part < 0 for part in parts):
        raise ValueError(f"multinomial requires naturals, got ({n}, {parts})")
    if sum(parts) != n:
        raise ValueError(f"multinomial parts {parts} do not sum to {n}")
    out = 1
    remaining = n
    for part in parts:
        out *= math.comb(remaining, part)
        remaining -= part
    return out


def gen_binomial(top: RationalLike, k: int) -> Fraction:
    """Generalized binomial C(top, k) = prod_{i<k}(top - i) / k! for rational top.

    Evaluated as the falling-factorial product, so it is exact for every
    rational top (no Gamma functions).  k = 0 gives 1 (empty product).
    """
    if k < 0:
        raise ValueError(f"gen_binomial requires natural k, got {k}")
    return _gen_binomial_cached(Fraction(top), k)


@lru_cache(maxsize=None)
def _gen_binomial_cached(top: Fraction, k: int) -> Fraction:
    # Tops repeat heavily inside nested-sum denominators; cache on the
    # canonical Fraction so int and Fraction callers share entries.
    if k == 0:
        return Fraction(1)
    return _gen_binomial_cached(top, k - 1) * (top - (k - 1)) / k


_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/[1-9]\d*)?$")


def format_rational(value: RationalLike) -> str:
    """Canonical text form: sign on the numerator, "/q" omitted when q = 1."""
    return str(Fraction(value))


def parse_rational(text: str) -> Fraction:
    """Parse the canonical form, e.g. "-3/7", "5", "0".

    Rejects anything outside the integer-over-positive-integer grammar
    (decimals, whitespace inside the token, signed denominators).
    """
    token = text.strip()
    if not _RATIONAL_RE.match(token):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(token)

"""Exact weight domains: rationals and the lexicographic perturbation group."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

Rational = Fraction


@total_ordering
@dataclass(frozen=True)
class LexWeight:
    """
    Element (base, rho) of the ordered group of pairs of rationals.

    Only addition, negation and comparison are defined. `rho` is the
    coefficient of the formal infinitesimal.
    """

    base: Fraction
    rho: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "base", Fraction(self.base))
        object.__setattr__(self, "rho", Fraction(self.rho))

    @classmethod
    def zero(cls) -> "LexWeight":
        return cls(Fraction(0), Fraction(0))

    def __add__(self, other: "LexWeight") -> "LexWeight":
        if not isinstance(other, LexWeight):
            return NotImplemented
        return LexWeight(self.base + other.base, self.rho + other.rho)

    def __neg__(self) -> "LexWeight":
        return LexWeight(-self.base, -self.rho)

    def __sub__(self, other: "LexWeight") -> "LexWeight":
        if not isinstance(other, LexWeight):
            return NotImplemented
        return LexWeight(self.base - other.base, self.rho - other.rho)

    def __lt__(self, other: "LexWeight") -> bool:
        if not isinstance(other, LexWeight):
            return NotImplemented
        return (self.base, self.rho) < (other.base, other.rho)

    def magnitude(self) -> "LexWeight":
        """Componentwise absolute value; dominates both self and -self."""
        return LexWeight(abs(self.base), abs(self.rho))

    def __repr__(self) -> str:
        return f"LexWeight({self.base}, {self.rho})"


WeightValue = Union[Fraction, LexWeight]


def zero_like(weight: WeightValue) -> WeightValue:
    """Additive identity of the domain `weight` belongs to."""
    return weight - weight


def magnitude(weight: WeightValue) -> WeightValue:
    if isinstance(weight, LexWeight):
        return weight.magnitude()
    return abs(weight)


def is_rational(weight: WeightValue) -> bool:
    return isinstance(weight, Fraction)


_RATIONAL = re.compile(r"[+-]?[0-9]+(/[0-9]+)?")


def parse_fraction(text: str) -> Fraction:
    """Parse "num/den" or "num" as typed on the command line. Decimals are rejected."""
    text = text.strip()
    if not _RATIONAL.fullmatch(text):
        raise ValueError(f"expected num or num/den, got {text!r}")
    return Fraction(text)

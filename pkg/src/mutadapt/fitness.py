"""Objective functions on bitstrings and the rate-blind extended fitness.

All fitness values are exact integers; evaluation is pure and deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import ConfigError, DimensionError, Genome, Individual

__all__ = [
    "FitnessKind",
    "FitnessFunction",
    "leading_ones",
    "one_max",
    "peaked_fitness",
    "extended_fitness",
    "default_peak_height",
    "leading_ones_batch",
    "one_max_batch",
    "peaked_batch",
]


class FitnessKind(Enum):
    LEADING_ONES = "leading-ones"
    ONE_MAX = "one-max"
    PEAKED = "peaked"


def leading_ones(x: Genome) -> int:
    """Length of the prefix of consecutive one-bits."""
    zeros = np.flatnonzero(x.bits == 0)
    return int(zeros[0]) if zeros.size else x.n


def one_max(x: Genome) -> int:
    """Number of one-bits."""
    return int(np.count_nonzero(x.bits))


def _check_peak_height(m: int, n: int) -> None:
    if not 1 <= m < n:
        raise ConfigError(f"peak height must satisfy 1 <= m < n, got m={m}, n={n}")


def peaked_fitness(x: Genome, m: int) -> int:
    """LeadingOnes everywhere except the all-zeros point, which scores m.

    The all-zeros point is a local optimum (the peak); the unique global
    optimum is still the all-ones string with value n.
    """
    _check_peak_height(m, x.n)
    if not x.bits.any():
        return int(m)
    return leading_ones(x)


def default_peak_height(n: int, chi_high: float) -> int:
    """Largest peak height that stays strictly below the escape threshold level.

    floor(ln(171/85) * (n-1) / chi_high): for any m up to this value,
    (1 - chi_high/n)^m >= 85/171, so the threshold level derived from the
    high rate always clears the peak.
    """
    if chi_high <= 0:
        raise ConfigError(f"chi_high must be positive, got {chi_high}")
    m = math.floor(math.log(171 / 85) * (n - 1) / chi_high)
    _check_peak_height(m, n)
    return m


def leading_ones_batch(bits: np.ndarray) -> np.ndarray:
    """Leading-ones value per row of a (lam, n) bit matrix."""
    is_zero = bits == 0
    has_zero = is_zero.any(axis=1)
    first_zero = np.argmax(is_zero, axis=1)
    return np.where(has_zero, first_zero, bits.shape[1]).astype(np.int64)


def one_max_batch(bits: np.ndarray) -> np.ndarray:
    return bits.sum(axis=1, dtype=np.int64)


def peaked_batch(bits: np.ndarray, m: int) -> np.ndarray:
    lo = leading_ones_batch(bits)
    return np.where(bits.any(axis=1), lo, np.int64(m))


@dataclass(frozen=True)
class FitnessFunction:
    """A named objective over length-n bitstrings."""

    kind: FitnessKind
    n: int
    m: int | None = None

    def __post_init__(self):
        if self.n <= 0:
            raise ConfigError(f"n must be positive, got {self.n}")
        if self.kind is FitnessKind.PEAKED:
            if self.m is None:
                raise ConfigError("peaked fitness needs a peak height m")
            _check_peak_height(self.m, self.n)
        elif self.m is not None:
            raise ConfigError(f"{self.kind.value} takes no peak height")

    def evaluate(self, x: Genome) -> int:
        if x.n != self.n:
            raise DimensionError(f"genome length {x.n} does not match fitness n={self.n}")
        if self.kind is FitnessKind.LEADING_ONES:
            return leading_ones(x)
        if self.kind is FitnessKind.ONE_MAX:
            return one_max(x)
        return peaked_fitness(x, self.m)

    def evaluate_batch(self, bits: np.ndarray) -> np.ndarray:
        if bits.ndim != 2 or bits.shape[1] != self.n:
            raise DimensionError(f"expected a (lam, {self.n}) bit matrix, got shape {bits.shape}")
        if self.kind is FitnessKind.LEADING_ONES:
            return leading_ones_batch(bits)
        if self.kind is FitnessKind.ONE_MAX:
            return one_max_batch(bits)
        return peaked_batch(bits, self.m)

    @property
    def optimum_value(self) -> int:
        """Fitness of the unique global optimum, the all-ones string."""
        return self.n


def extended_fitness(ind: Individual, f: FitnessFunction) -> int:
    """Fitness of a (genome, rate) pair: the rate component is ignored."""
    return f.evaluate(ind.genome)

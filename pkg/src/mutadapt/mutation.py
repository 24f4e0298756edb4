"""Bitwise mutation and the three rate-control strategies.

Bit flips are realized as one independent Bernoulli(chi/n) draw per position,
in position order. That realization is part of the replay contract: changing
it would change bit-identical reproducibility of seeded runs.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import ConfigError, Genome, Individual, RandomStream, RateSet

__all__ = [
    "StrategyKind",
    "MutationStrategy",
    "bitwise_mutate",
    "apply_strategy",
    "draw_offspring_rates",
    "mutate_rows",
]


class StrategyKind(Enum):
    FIXED = "fixed"
    UNIFORM_MIX = "mix"
    SELF_ADAPTIVE = "adapt"


@dataclass(frozen=True)
class MutationStrategy:
    """Rate control: one fixed rate, uniform mixing, or self-adaptation.

    Self-adaptation keeps the parent's rate with probability 1 - p and
    otherwise re-draws it uniformly from the remaining rates; the genome is
    always mutated with the post-switch rate. p = 0 is accepted as the
    degenerate no-switching limit, and a single-rate set degenerates to a
    fixed rate because the switching set is empty.
    """

    kind: StrategyKind
    rates: RateSet
    rate_index: int | None = None
    p: float | None = None

    def __post_init__(self):
        if self.kind is StrategyKind.FIXED:
            if self.rate_index is None or not 0 <= self.rate_index < len(self.rates):
                raise ConfigError(f"fixed strategy needs a rate index in [0, {len(self.rates)}), got {self.rate_index}")
            if self.p is not None:
                raise ConfigError("p only applies to self-adaptation")
        elif self.kind is StrategyKind.UNIFORM_MIX:
            if self.rate_index is not None or self.p is not None:
                raise ConfigError("uniform mixing takes no rate index and no p")
        else:
            if self.p is None or not 0 <= self.p <= 0.5:
                raise ConfigError(f"self-adaptation needs 0 <= p <= 1/2, got {self.p}")
            if self.rate_index is not None:
                raise ConfigError("self-adaptation takes no fixed rate index")

    @classmethod
    def fixed(cls, rates: RateSet, rate_index: int) -> "MutationStrategy":
        return cls(StrategyKind.FIXED, rates, rate_index=rate_index)

    @classmethod
    def uniform_mix(cls, rates: RateSet) -> "MutationStrategy":
        return cls(StrategyKind.UNIFORM_MIX, rates)

    @classmethod
    def self_adaptive(cls, rates: RateSet, p: float) -> "MutationStrategy":
        return cls(StrategyKind.SELF_ADAPTIVE, rates, p=p)


def bitwise_mutate(x: Genome, chi: float, rng: RandomStream) -> Genome:
    """Flip every bit independently with probability chi/n."""
    if not 0 < chi <= x.n:
        raise ConfigError(f"chi must be in (0, n], got {chi} for n={x.n}")
    flips = (rng.gen.random(x.n) < chi / x.n).astype(np.uint8)
    return Genome(x.bits ^ flips)


def apply_strategy(parent: Individual, strategy: MutationStrategy, rng: RandomStream) -> Individual:
    """One offspring draw: pick the offspring's rate, then mutate with it.

    Draw order is fixed for replay: rate-control draws first, then bit flips.
    """
    rates = strategy.rates
    if strategy.kind is StrategyKind.FIXED:
        idx = strategy.rate_index
    elif strategy.kind is StrategyKind.UNIFORM_MIX:
        idx = int(rng.gen.integers(len(rates)))
    else:
        idx = parent.rate_index
        if idx is None or not 0 <= idx < len(rates):
            raise ConfigError(f"self-adaptive parent needs a valid rate index, got {idx}")
        if len(rates) > 1 and rng.gen.random() < strategy.p:
            idx = (idx + 1 + int(rng.gen.integers(len(rates) - 1))) % len(rates)
    child = bitwise_mutate(parent.genome, rates.chi(idx), rng)
    return Individual(child, idx)


def draw_offspring_rates(parent_rates: np.ndarray, strategy: MutationStrategy,
                         gen: np.random.Generator) -> np.ndarray:
    """Vectorized offspring rate indices for a whole generation.

    Self-adaptation draws the switch uniforms and switch targets for every
    slot, so the number of draws per generation does not depend on outcomes.
    """
    lam = parent_rates.size
    m = len(strategy.rates)
    if strategy.kind is StrategyKind.FIXED:
        return np.full(lam, strategy.rate_index, dtype=np.int64)
    if strategy.kind is StrategyKind.UNIFORM_MIX:
        return gen.integers(0, m, size=lam, dtype=np.int64)
    if m == 1:
        return parent_rates.astype(np.int64, copy=True)
    u = gen.random(lam)
    hops = gen.integers(0, m - 1, size=lam, dtype=np.int64)
    switched = (parent_rates + 1 + hops) % m
    return np.where(u < strategy.p, switched, parent_rates).astype(np.int64)


def mutate_rows(bits: np.ndarray, chi_per_row: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """Mutate each row of a bit matrix with its own rate, one Bernoulli per bit."""
    n = bits.shape[1]
    flips = gen.random(bits.shape) < (np.asarray(chi_per_row, dtype=np.float64) / n)[:, None]
    return bits ^ flips.astype(np.uint8)

"""Parent selection (k-tournament and comma selection) with exact offspring accounting.

Fitness ties break uniformly at random everywhere: tournaments pick uniformly
among the sampled maxima, rank tables shuffle before a stable sort. This
avoids positional bias that would skew offspring distributions.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import ConfigError, Population, RandomStream
from .fitness import FitnessFunction

__all__ = [
    "SelectionKind",
    "SelectionMechanism",
    "SelectionLedger",
    "LedgerError",
    "rank_population",
    "rank_indices",
    "select_parent",
    "draw_parents",
    "reproductive_rates",
]


class SelectionKind(Enum):
    TOURNAMENT = "tournament"
    MU_COMMA = "mu-comma"


@dataclass(frozen=True)
class SelectionMechanism:
    kind: SelectionKind
    k: int | None = None
    mu: int | None = None

    def __post_init__(self):
        if self.kind is SelectionKind.TOURNAMENT:
            if self.k is None or self.k < 2:
                raise ConfigError(f"tournament size must be at least 2, got {self.k}")
            if self.mu is not None:
                raise ConfigError("tournaments take no mu")
        else:
            if self.mu is None or self.mu < 1:
                raise ConfigError(f"comma selection needs mu >= 1, got {self.mu}")
            if self.k is not None:
                raise ConfigError("comma selection takes no tournament size")

    @classmethod
    def tournament(cls, k: int = 2) -> "SelectionMechanism":
        return cls(SelectionKind.TOURNAMENT, k=k)

    @classmethod
    def mu_comma(cls, mu: int) -> "SelectionMechanism":
        return cls(SelectionKind.MU_COMMA, mu=mu)


class LedgerError(RuntimeError):
    """Ledger read before all selections of the generation were recorded."""


@dataclass
class SelectionLedger:
    """Tally of how many offspring each parent index produced this generation."""

    lam: int
    counts: np.ndarray | None = None
    recorded: int = 0

    def __post_init__(self):
        if self.lam <= 0:
            raise ConfigError(f"lambda must be positive, got {self.lam}")
        if self.counts is None:
            self.counts = np.zeros(self.lam, dtype=np.int64)

    def record(self, parent_index: int) -> None:
        self.counts[parent_index] += 1
        self.recorded += 1

    @classmethod
    def from_parent_indices(cls, parent_indices: np.ndarray, lam: int) -> "SelectionLedger":
        idx = np.asarray(parent_indices)
        counts = np.bincount(idx, minlength=lam).astype(np.int64)
        return cls(lam, counts=counts, recorded=int(idx.size))


def reproductive_rates(ledger: SelectionLedger) -> np.ndarray:
    """Offspring counts per parent; defined only once all lam selections are in."""
    if ledger.recorded != ledger.lam:
        raise LedgerError(f"generation incomplete: {ledger.recorded} of {ledger.lam} selections recorded")
    return ledger.counts.copy()


def rank_indices(fit: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """Indices ordered by fitness descending, equal values in uniform random order."""
    perm = gen.permutation(fit.size)
    order = np.argsort(-fit[perm], kind="stable")
    return perm[order]


def rank_population(p: Population, f: FitnessFunction, rng: RandomStream) -> np.ndarray:
    """Member indices best-first under the rate-blind fitness."""
    fit = np.asarray([f.evaluate(m.genome) for m in p.members])
    return rank_indices(fit, rng.gen)


def select_parent(p: Population, mech: SelectionMechanism, f: FitnessFunction,
                  rng: RandomStream) -> int:
    """One parent index: fittest of k uniform picks, or uniform over the top-mu ranks."""
    fit = np.asarray([f.evaluate(m.genome) for m in p.members])
    if mech.kind is SelectionKind.TOURNAMENT:
        idx = rng.gen.integers(0, fit.size, size=mech.k)
        # jitter in [0,1) cannot reorder distinct integer fitnesses, so it
        # breaks ties uniformly among the sampled maxima
        jitter = rng.gen.random(mech.k)
        return int(idx[np.argmax(fit[idx] + jitter)])
    if mech.mu > fit.size:
        raise ConfigError(f"mu={mech.mu} exceeds population size {fit.size}")
    ranked = rank_indices(fit, rng.gen)
    return int(ranked[rng.gen.integers(mech.mu)])


def draw_parents(fit: np.ndarray, mech: SelectionMechanism, gen: np.random.Generator,
                 slots: int | None = None) -> np.ndarray:
    """Vectorized parent indices for `slots` offspring (default: one per member).

    Per-generation draw order, fixed for replay: tournament contestants then
    tie-break jitter, or rank shuffle then slot picks.
    """
    lam = int(fit.size)
    slots = lam if slots is None else slots
    if mech.kind is SelectionKind.TOURNAMENT:
        idx = gen.integers(0, lam, size=(slots, mech.k))
        jitter = gen.random((slots, mech.k))
        win = np.argmax(fit[idx] + jitter, axis=1)
        return idx[np.arange(slots), win]
    if mech.mu > lam:
        raise ConfigError(f"mu={mech.mu} exceeds population size {lam}")
    ranked = rank_indices(fit, gen)
    return ranked[gen.integers(0, mech.mu, size=slots)]

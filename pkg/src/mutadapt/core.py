"""Shared domain types: genomes, mutation-rate sets, populations, RNG streams.

Randomness is counter-keyed: every stream is derived from a master seed plus
a short lineage tuple such as (trial, generation, offspring_slot). Identical
coordinates replay identical draws and distinct coordinates give
statistically independent streams, so trials can run in any order or on any
number of workers without changing results.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "ConfigError",
    "DimensionError",
    "Genome",
    "RateSet",
    "Individual",
    "Population",
    "RandomStream",
    "hamming",
    "population_count_in",
    "spawn_stream",
    "generation_stream",
]


class ConfigError(ValueError):
    """Invalid configuration value."""


class DimensionError(ValueError):
    """Operands with incompatible sizes."""


def _bit_array(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8).copy()
    if arr.ndim != 1:
        raise DimensionError(f"genome bits must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ConfigError("genome length must be positive")
    if np.any(arr > 1):
        raise ConfigError("genome bits must be 0 or 1")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Genome:
    """Fixed-length bitstring; length and contents never change after construction."""

    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", _bit_array(self.bits))

    @classmethod
    def from_string(cls, s: str) -> "Genome":
        """Parse a string like "1010"."""
        return cls(np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def zeros(cls, n: int) -> "Genome":
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def ones(cls, n: int) -> "Genome":
        return cls(np.ones(n, dtype=np.uint8))

    @property
    def n(self) -> int:
        return int(self.bits.size)

    def __len__(self) -> int:
        return self.n

    def bit(self, i: int) -> int:
        """Value at position i, 0-indexed."""
        return int(self.bits[i])

    def __eq__(self, other):
        return isinstance(other, Genome) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.bits.size, self.bits.tobytes()))

    def __repr__(self):
        s = "".join(map(str, self.bits.tolist()))
        if len(s) > 48:
            s = s[:45] + "..."
        return f"Genome({s})"


@dataclass(frozen=True)
class RateSet:
    """Ordered mutation parameters chi; the per-bit flip probability is chi/n.

    Rates are referenced by index everywhere downstream so populations can be
    partitioned by rate without floating-point equality on chi. Index 0 is
    the low rate and the last index the high rate.
    """

    chis: tuple[float, ...]
    n: int

    def __post_init__(self):
        chis = tuple(float(c) for c in self.chis)
        object.__setattr__(self, "chis", chis)
        if self.n <= 0:
            raise ConfigError(f"genome length must be positive, got {self.n}")
        if not chis:
            raise ConfigError("rate set must be nonempty")
        if any(c <= 0 or c > self.n for c in chis):
            raise ConfigError(f"every chi must satisfy 0 < chi <= n={self.n}, got {chis}")
        if any(b <= a for a, b in zip(chis, chis[1:])):
            raise ConfigError(f"rates must be strictly increasing, got {chis}")

    def __len__(self) -> int:
        return len(self.chis)

    def chi(self, index: int) -> float:
        return self.chis[index]

    @property
    def chi_low(self) -> float:
        return self.chis[0]

    @property
    def chi_high(self) -> float:
        return self.chis[-1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.chis, dtype=np.float64)


@dataclass(frozen=True)
class Individual:
    """A search point together with the index of the rate it carries.

    rate_index is None for settings where individuals carry no rate.
    """

    genome: Genome
    rate_index: int | None = None


@dataclass(frozen=True, eq=False)
class Population:
    """A vector of individuals; replaced wholesale each generation."""

    members: tuple[Individual, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ConfigError("population must be nonempty")
        n = members[0].genome.n
        if any(m.genome.n != n for m in members):
            raise DimensionError("all genomes in a population must have the same length")
        object.__setattr__(self, "members", members)

    @property
    def lam(self) -> int:
        """Population size (the lambda of the sampling loop)."""
        return len(self.members)

    @property
    def n(self) -> int:
        return self.members[0].genome.n

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray | None]:
        """Member bits as a (lam, n) matrix plus rate indices (None if any member lacks one)."""
        bits = np.stack([m.genome.bits for m in self.members])
        if any(m.rate_index is None for m in self.members):
            return bits, None
        rates = np.asarray([m.rate_index for m in self.members], dtype=np.int64)
        return bits, rates

    @classmethod
    def from_arrays(cls, bits: np.ndarray, rate_indices=None) -> "Population":
        rows = np.asarray(bits)
        if rows.ndim != 2:
            raise DimensionError(f"expected a (lam, n) bit matrix, got shape {rows.shape}")
        members = tuple(
            Individual(Genome(rows[i]), None if rate_indices is None else int(rate_indices[i]))
            for i in range(rows.shape[0])
        )
        return cls(members)


def hamming(a: Genome, b: Genome) -> int:
    """Number of positions where a and b differ."""
    if a.n != b.n:
        raise DimensionError(f"genome lengths differ: {a.n} vs {b.n}")
    return int(np.count_nonzero(a.bits != b.bits))


def population_count_in(p: Population, predicate: Callable[[Individual], bool]) -> int:
    """How many members satisfy the predicate."""
    return sum(1 for m in p.members if predicate(m))


@dataclass(frozen=True, eq=False)
class RandomStream:
    """A deterministic stream keyed by (master_seed, lineage).

    Draws go through .gen, a numpy Generator backed by the counter-based
    Philox engine. Streams with the same key replay identical draws; streams
    with distinct lineages are statistically independent.
    """

    master_seed: int
    lineage: tuple[int, ...]
    gen: np.random.Generator


def _derive_stream(master_seed: int, lineage: tuple[int, ...]) -> RandomStream:
    if any(c < 0 for c in lineage):
        raise ConfigError(f"lineage coordinates must be non-negative, got {lineage}")
    ss = np.random.SeedSequence(int(master_seed), spawn_key=lineage)
    return RandomStream(int(master_seed), lineage, np.random.Generator(np.random.Philox(ss)))


def spawn_stream(master_seed: int, trial: int, generation: int, slot: int) -> RandomStream:
    """Stream for one offspring slot of one generation of one trial."""
    return _derive_stream(master_seed, (int(trial), int(generation), int(slot)))


def generation_stream(master_seed: int, trial: int, generation: int) -> RandomStream:
    """Stream driving a whole generation; slots are drawn as vector lanes.

    The lineage (trial, generation) is distinct from every three-coordinate
    (trial, generation, slot) lineage, so batch draws never collide with
    per-slot streams.
    """
    return _derive_stream(master_seed, (int(trial), int(generation)))

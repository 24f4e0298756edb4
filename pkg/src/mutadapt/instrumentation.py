"""Per-generation observables: level occupancies, rate fractions, ranked fitness.

A Recorder watches a run at the generation barrier and never feeds back into
the dynamics: it draws randomness (rank tie-breaks) only from the tail of the
generation stream, after the dynamics have consumed their draws, so a run
produces identical results with or without instrumentation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .core import ConfigError, Individual, Population, RandomStream
from .fitness import FitnessFunction, leading_ones_batch
from .selection import SelectionLedger, rank_indices, reproductive_rates

__all__ = [
    "PartitionScheme",
    "LevelPartitionSpec",
    "GenerationRecord",
    "Recorder",
    "classify_level",
    "classify_levels",
    "record_generation",
    "trajectory_aggregate",
    "trajectory_rows",
    "write_records_csv",
    "write_trajectory_csv",
    "RECORDS_CSV_HEADER",
    "TRAJECTORY_CSV_HEADER",
]


class PartitionScheme(Enum):
    LEADING_ONES_LEVELS = "leading-ones"
    PEAK_LEVELS = "peak"


@dataclass(frozen=True)
class LevelPartitionSpec:
    """Rate-aware level partition with threshold level ell.

    Both schemes need a two-rate set (low = index 0, high = index 1) and map
    each individual to exactly one level in {-1, 0, ..., n}:

    - leading-ones scheme: carrying the high rate at a leading-ones value of
      ell or more is the special cell -1; below ell both rates share the
      plain leading-ones levels; from ell upward only low-rate individuals
      occupy their leading-ones level.
    - peak scheme: the all-zeros peak (either rate) is the special cell -1;
      high-rate individuals at leading-ones >= ell-1 collapse into cell
      ell-1; everything else sits at its leading-ones level (low rate only
      from ell upward). Requires the peak height m < ell.
    """

    scheme: PartitionScheme
    ell: int
    n: int
    m: int | None = None

    def __post_init__(self):
        if not 1 <= self.ell <= self.n:
            raise ConfigError(f"ell must satisfy 1 <= ell <= n, got ell={self.ell}, n={self.n}")
        if self.scheme is PartitionScheme.PEAK_LEVELS:
            if self.m is None:
                raise ConfigError("peak scheme needs the peak height m")
            if not 1 <= self.m < self.ell:
                raise ConfigError(f"peak scheme needs m < ell, got m={self.m}, ell={self.ell}")
        elif self.m is not None:
            raise ConfigError("leading-ones scheme takes no peak height")


def classify_levels(lo: np.ndarray, rates: np.ndarray, spec: LevelPartitionSpec,
                    peak_mask: np.ndarray | None = None) -> np.ndarray:
    """Level index per member from leading-ones values and rate indices."""
    levels = lo.astype(np.int64).copy()
    high = np.asarray(rates) == 1
    if spec.scheme is PartitionScheme.LEADING_ONES_LEVELS:
        levels[high & (lo >= spec.ell)] = -1
        return levels
    if peak_mask is None:
        raise ConfigError("peak scheme needs the peak mask")
    levels[high & (lo >= spec.ell - 1)] = spec.ell - 1
    levels[peak_mask] = -1
    return levels


def classify_level(ind: Individual, spec: LevelPartitionSpec) -> int:
    """Level of a single individual; its rate index must be 0 (low) or 1 (high)."""
    if ind.rate_index not in (0, 1):
        raise ConfigError(f"level partitions need a two-rate individual, got rate index {ind.rate_index}")
    bits = ind.genome.bits[None, :]
    lo = leading_ones_batch(bits)
    rates = np.asarray([ind.rate_index])
    peak = ~bits.any(axis=1)
    return int(classify_levels(lo, rates, spec, peak)[0])


@dataclass(frozen=True)
class GenerationRecord:
    """One log row per generation.

    ranked_fitness_q is the leading-ones value of the ceil(lam/10)-th best
    member by fitness (ties uniform); frac_low the fraction carrying rate
    index 0; the two counts are occupancies of the special partition cells
    (None when no partition applies); max_reproductive_rate is the largest
    per-parent offspring count of the transition that produced the
    population (None for generation 0).
    """

    t: int
    best_fitness: int
    ranked_fitness_q: int
    frac_low: float
    count_A_minus1: int | None
    count_B: int | None
    max_reproductive_rate: int | None


class Recorder:
    """Accumulates one GenerationRecord per generation barrier."""

    def __init__(self, partition: LevelPartitionSpec | None = None):
        self.partition = partition
        self.records: list[GenerationRecord] = []

    def observe(self, t: int, bits: np.ndarray, rates: np.ndarray, fit: np.ndarray,
                parent_counts: np.ndarray | None, gen: np.random.Generator) -> GenerationRecord:
        lam = int(fit.size)
        lo = leading_ones_batch(bits)
        q = math.ceil(lam / 10)
        ranked = rank_indices(fit, gen)
        count_a = count_b = None
        if self.partition is not None:
            spec = self.partition
            peak_mask = None
            if spec.scheme is PartitionScheme.PEAK_LEVELS:
                peak_mask = ~bits.any(axis=1)
                count_b = int(((np.asarray(rates) == 1) & (lo >= spec.ell)).sum())
            levels = classify_levels(lo, rates, spec, peak_mask)
            count_a = int((levels == -1).sum())
        rec = GenerationRecord(
            t=int(t),
            best_fitness=int(fit.max()),
            ranked_fitness_q=int(lo[ranked[q - 1]]),
            frac_low=float(np.mean(np.asarray(rates) == 0)),
            count_A_minus1=count_a,
            count_B=count_b,
            max_reproductive_rate=None if parent_counts is None else int(parent_counts.max()),
        )
        self.records.append(rec)
        return rec


def record_generation(p: Population, ledger: SelectionLedger | None,
                      spec: LevelPartitionSpec | None, f: FitnessFunction,
                      rng: RandomStream) -> GenerationRecord:
    """Record one completed generation of a materialized population.

    The ledger, when given, must hold all lam selections of the transition
    that produced p. rng only breaks rank ties.
    """
    bits, rates = p.to_arrays()
    if rates is None:
        raise ConfigError("population carries no rate indices to record")
    fit = f.evaluate_batch(bits)
    counts = None if ledger is None else reproductive_rates(ledger)
    t = len(())  # placeholder index; callers embed records in their own sequence
    return Recorder(spec).observe(t, bits, rates, fit, counts, rng.gen)


def trajectory_aggregate(runs: Iterable[Iterable[GenerationRecord]]) -> dict[int, list[float]]:
    """Pool frac_low by ranked-fitness bin over all (run, generation) pairs.

    Bins that never occur are absent from the result, not zero.
    """
    bins: dict[int, list[float]] = {}
    for records in runs:
        for r in records:
            bins.setdefault(int(r.ranked_fitness_q), []).append(float(r.frac_low))
    return bins


def trajectory_rows(bins: dict[int, list[float]]) -> list[tuple]:
    """Per-bin (j, min, q1, median, q3, max, count), sorted by j."""
    rows = []
    for j in sorted(bins):
        vals = np.asarray(bins[j], dtype=np.float64)
        q1, med, q3 = np.percentile(vals, [25, 50, 75])
        rows.append((int(j), float(vals.min()), float(q1), float(med), float(q3),
                     float(vals.max()), int(vals.size)))
    return rows


RECORDS_CSV_HEADER = "t,best,ranked_q,frac_low,count_Aminus1,count_B,max_rr"
TRAJECTORY_CSV_HEADER = "j,min,q1,median,q3,max,count"


def _cell(v) -> str:
    return "" if v is None else str(v)


def write_records_csv(path, records: Iterable[GenerationRecord]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(RECORDS_CSV_HEADER + "\n")
        for r in records:
            fh.write(",".join([
                str(r.t), str(r.best_fitness), str(r.ranked_fitness_q), str(r.frac_low),
                _cell(r.count_A_minus1), _cell(r.count_B), _cell(r.max_reproductive_rate),
            ]) + "\n")


def write_trajectory_csv(path, rows: Iterable[tuple]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(TRAJECTORY_CSV_HEADER + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")

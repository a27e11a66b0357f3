"""Bit-exact models of exact and lower-part-OR (LOA) binary adders.

Operands are unsigned bit patterns of a declared width.  The LOA computes
the low ``approx_low_bits`` of the sum with a bitwise OR, the remaining
high bits with an exact sub-adder, and bridges the two halves with an
AND-generated carry-in.  With ``approx_low_bits == 0`` the LOA degenerates
to the exact adder.  The mean relative error distance (MRED) of a given
adder is measured either exhaustively over all operand pairs or by
seeded Monte-Carlo sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError, ResourceGuardError

# Exhaustive sweeps enumerate 2^(2*width) pairs; 12 bits ~ 16.8M pairs.
EXHAUSTIVE_WIDTH_LIMIT = 12

_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class AdderSpec:
    """A two-operand adder: operand width and number of OR-approximated low bits."""

    width: int
    approx_low_bits: int = 0

    def __post_init__(self):
        if self.width < 1:
            raise InputDomainError(f"adder width must be >= 1, got {self.width}")
        if not 0 <= self.approx_low_bits <= self.width:
            raise InputDomainError(
                f"approx_low_bits must lie in [0, {self.width}], got {self.approx_low_bits}"
            )

    @property
    def is_exact(self) -> bool:
        return self.approx_low_bits == 0

    @property
    def approx_ratio(self) -> float:
        """Fraction of the operand width handled by OR gates."""
        return self.approx_low_bits / self.width


@dataclass(frozen=True)
class AddResult:
    """Sum carried in ``width`` bits (one more than the operand width)."""

    value: int
    width: int


@dataclass(frozen=True)
class Exhaustive:
    """Enumerate every operand pair of the adder's width."""


@dataclass(frozen=True)
class MonteCarlo:
    """Sample operand pairs uniformly with a deterministic seeded generator."""

    sample_count: int
    seed: int = 0

    def __post_init__(self):
        if self.sample_count < 1:
            raise InputDomainError(
                f"sample_count must be >= 1, got {self.sample_count}"
            )


ErrorSampling = Exhaustive | MonteCarlo


def _check_operand(name: str, value: int, width: int) -> None:
    if not 0 <= value < (1 << width):
        raise InputDomainError(
            f"{name}={value} is outside the {width}-bit unsigned range"
        )


def add_exact(x: int, y: int, spec: AdderSpec) -> AddResult:
    """Exact unsigned addition; the result never wraps."""
    _check_operand("x", x, spec.width)
    _check_operand("y", y, spec.width)
    return AddResult(x + y, spec.width + 1)


def _loa_value(x, y, width: int, low: int):
    """LOA sum formula; works elementwise on ints and integer ndarrays."""
    if low == 0:
        return x + y
    or_part = (x | y) & ((1 << low) - 1)
    carry_in = (x >> (low - 1)) & (y >> (low - 1)) & 1
    upper = (x >> low) + (y >> low) + carry_in
    return (upper << low) | or_part


def add_loa(x: int, y: int, spec: AdderSpec) -> AddResult:
    """Lower-part-OR addition.

    The low ``approx_low_bits`` of the result are the bitwise OR of the
    operands' low parts; the high part is an exact sum of the operands'
    high parts plus a carry-in formed by ANDing the operands' bits just
    below the split.  The result always fits in ``width + 1`` bits.
    """
    _check_operand("x", x, spec.width)
    _check_operand("y", y, spec.width)
    return AddResult(_loa_value(x, y, spec.width, spec.approx_low_bits), spec.width + 1)


def _relative_error_sum(xs: np.ndarray, ys: np.ndarray, width: int, low: int) -> float:
    exact = xs + ys
    approx = _loa_value(xs, ys, width, low)
    rel = np.zeros(np.broadcast(xs, ys).shape, dtype=np.float64)
    np.divide(np.abs(approx - exact), exact, out=rel, where=exact > 0)
    return float(rel.sum())


def mred(spec: AdderSpec, sampling: ErrorSampling) -> float:
    """Mean relative error distance of the LOA against the exact sum.

    Averages ``|approx - exact| / exact`` over the sampled operand pairs.
    The all-zero pair (the only one with a zero exact sum) contributes 0,
    so the denominator is always the full pair count.  Exhaustive sampling
    is capped at ``EXHAUSTIVE_WIDTH_LIMIT`` bits; Monte-Carlo draws both
    operands from ``numpy.random.default_rng(seed)`` and is bit-identical
    across runs for a fixed seed.
    """
    width, low = spec.width, spec.approx_low_bits
    if isinstance(sampling, Exhaustive):
        if width > EXHAUSTIVE_WIDTH_LIMIT:
            raise ResourceGuardError(
                f"exhaustive MRED is capped at {EXHAUSTIVE_WIDTH_LIMIT} bits "
                f"(got {width}); use MonteCarlo sampling instead"
            )
        n = 1 << width
        ys = np.arange(n, dtype=np.int64)
        rows_per_chunk = max(1, _CHUNK_ELEMENTS // n)
        total = 0.0
        # fixed chunk order keeps the float accumulation deterministic
        for start in range(0, n, rows_per_chunk):
            xs = np.arange(start, min(start + rows_per_chunk, n), dtype=np.int64)
            total += _relative_error_sum(xs[:, None], ys[None, :], width, low)
        return total / (n * n)
    if isinstance(sampling, MonteCarlo):
        rng = np.random.default_rng(sampling.seed)
        xs = rng.integers(0, 1 << width, size=sampling.sample_count, dtype=np.int64)
        ys = rng.integers(0, 1 << width, size=sampling.sample_count, dtype=np.int64)
        return _relative_error_sum(xs, ys, width, low) / sampling.sample_count
    raise InputDomainError(f"unknown sampling scheme: {sampling!r}")

"""Cycle-accurate behavioral model of a serialized multi-operand adder.

A cluster of ``cluster_size`` operands arriving at the base clock is
loaded into a parallel-to-serial shift register and drained, one operand
per fast cycle, into an accumulator running at
``fast_freq = cluster_size * base_freq``.  One frame therefore takes
exactly ``cluster_size`` fast cycles: one cluster sum per base cycle.
Clock domains are tracked arithmetically (cycle counts and frequencies);
no synchronizer logic is simulated.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputDomainError, SequencingError

# Peak rate of a hard DSP block on recent devices; used as the feasibility
# ceiling for the fast clock domain.
DSP_CLOCK_CEILING_HZ = 200e6

# Pixel rate of a 720p video stream, the default base clock.
DEFAULT_BASE_FREQ_HZ = 27.6e6


@dataclass(frozen=True)
class SerialMoaConfig:
    """Serializer/accumulator replacement for a cluster of adders.

    ``serializer_count`` defaults to 2: the second register double-buffers
    the input so the next frame loads while the current one drains.
    The accumulator carries ``ceil(log2(cluster_size))`` growth bits plus
    one guard bit, making overflow impossible by construction.
    """

    cluster_size: int
    operand_width: int
    base_freq_hz: float = DEFAULT_BASE_FREQ_HZ
    serializer_count: int = 2

    def __post_init__(self):
        if self.cluster_size < 1:
            raise InputDomainError(f"cluster_size must be >= 1, got {self.cluster_size}")
        if self.operand_width < 1:
            raise InputDomainError(
                f"operand_width must be >= 1, got {self.operand_width}"
            )
        if not self.base_freq_hz > 0:
            raise InputDomainError(f"base_freq_hz must be > 0, got {self.base_freq_hz}")
        if self.serializer_count < 1:
            raise InputDomainError(
                f"serializer_count must be >= 1, got {self.serializer_count}"
            )

    @property
    def fast_freq_hz(self) -> float:
        return self.cluster_size * self.base_freq_hz

    @property
    def accumulator_width(self) -> int:
        return self.operand_width + (self.cluster_size - 1).bit_length() + 1

    def is_feasible(self, ceiling_hz: float = DSP_CLOCK_CEILING_HZ) -> bool:
        """Whether the fast clock fits under the device ceiling."""
        return self.fast_freq_hz <= ceiling_hz


def max_feasible_cluster(
    base_freq_hz: float, ceiling_hz: float = DSP_CLOCK_CEILING_HZ
) -> int:
    """Largest cluster whose fast clock stays at or below ``ceiling_hz``."""
    if not base_freq_hz > 0:
        raise InputDomainError(f"base_freq_hz must be > 0, got {base_freq_hz}")
    return int(ceiling_hz // base_freq_hz)


@dataclass
class SerialMoaState:
    """One in-flight frame: loaded operands, running sum, fast-cycle position."""

    shift_register: list[int]
    accumulator: int = 0
    fast_cycle_index: int = 0

    @property
    def frame_done(self) -> bool:
        return self.fast_cycle_index >= len(self.shift_register)


@dataclass(frozen=True)
class FrameResult:
    total: int
    fast_cycles_used: int
    fast_freq_hz: float


def load_parallel(config: SerialMoaConfig, operands: list[int]) -> SerialMoaState:
    """Latch one cluster of operands; the accumulator starts cleared."""
    if len(operands) != config.cluster_size:
        raise InputDomainError(
            f"expected {config.cluster_size} operands, got {len(operands)}"
        )
    limit = 1 << config.operand_width
    for i, v in enumerate(operands):
        if not 0 <= v < limit:
            raise InputDomainError(
                f"operand {i} = {v} is outside the {config.operand_width}-bit "
                "unsigned range"
            )
    return SerialMoaState(shift_register=list(operands))


def step_fast_cycle(state: SerialMoaState) -> SerialMoaState:
    """Advance one fast cycle: shift the next operand into the accumulator."""
    if state.frame_done:
        raise SequencingError(
            f"frame already complete after {state.fast_cycle_index} fast cycles"
        )
    state.accumulator += state.shift_register[state.fast_cycle_index]
    state.fast_cycle_index += 1
    return state


def run_frame(config: SerialMoaConfig, operands: list[int]) -> FrameResult:
    """Load and fully drain one frame, returning the exact cluster sum."""
    state = load_parallel(config, operands)
    while not state.frame_done:
        step_fast_cycle(state)
    return FrameResult(state.accumulator, state.fast_cycle_index, config.fast_freq_hz)

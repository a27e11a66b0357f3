"""Parametric ALM-level resource model for adder structures.

Coefficients are calibration parameters in ALMs per bit.  The default
model prices an OR-approximated bit the same as a full-adder bit, because
the logic cell that would hold the OR gate already embeds a hard-wired
full adder; under that default, approximating low bits saves nothing.
Absolute counts are not calibrated against any device; the model is meant
for orderings and trends, so costs stay real-valued.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .adders import AdderSpec
from .errors import InputDomainError
from .serial import SerialMoaConfig
from .tree import ApproxPolicy, ExactAll, MoaTree, level_specs


@dataclass(frozen=True)
class CostModel:
    alm_per_fulladd_bit: float = 1.0
    alm_per_or_bit: float = 1.0
    alm_per_serializer_bit: float = 1.0
    alm_per_register_bit: float = 0.5

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not value >= 0:
                raise InputDomainError(f"{f.name} must be >= 0, got {value}")


DEFAULT_COST_MODEL = CostModel()

COST_MODEL_KEYS = tuple(f.name for f in fields(CostModel))


@dataclass(frozen=True)
class CostReport:
    breakdown: dict[str, float]

    @property
    def alm_total(self) -> float:
        return sum(self.breakdown.values())


def cost_binary_adder(spec: AdderSpec, model: CostModel = DEFAULT_COST_MODEL) -> CostReport:
    """ALM cost of one two-operand adder: exact bits plus OR-approximated bits."""
    exact_bits = spec.width - spec.approx_low_bits
    return CostReport(
        {
            "full_adder_bits": exact_bits * model.alm_per_fulladd_bit,
            "or_bits": spec.approx_low_bits * model.alm_per_or_bit,
        }
    )


def cost_tree(tree: MoaTree, model: CostModel = DEFAULT_COST_MODEL) -> CostReport:
    """Sum of per-node adder costs over a materialized tree."""
    full_adder = 0.0
    or_bits = 0.0
    for node in tree.nodes:
        part = cost_binary_adder(node.spec, model).breakdown
        full_adder += part["full_adder_bits"]
        or_bits += part["or_bits"]
    return CostReport({"full_adder_bits": full_adder, "or_bits": or_bits})


def cost_tree_shape(
    n: int,
    operand_width: int,
    policy: ApproxPolicy = ExactAll(),
    model: CostModel = DEFAULT_COST_MODEL,
) -> CostReport:
    """Tree cost from the operand count alone, without building nodes.

    Agrees exactly with ``cost_tree(build_tree(n, operand_width, policy))``.
    """
    full_adder = 0.0
    or_bits = 0.0
    for count, spec in level_specs(n, operand_width, policy):
        part = cost_binary_adder(spec, model).breakdown
        full_adder += count * part["full_adder_bits"]
        or_bits += count * part["or_bits"]
    return CostReport({"full_adder_bits": full_adder, "or_bits": or_bits})


def cost_serial_moa(
    config: SerialMoaConfig, model: CostModel = DEFAULT_COST_MODEL
) -> CostReport:
    """ALM cost of the serializer(s) plus accumulator replacing a cluster.

    The serializer term is linear in the cluster size: every parallel
    operand needs ``operand_width`` register+load-mux bits per serializer.
    """
    serializer = (
        config.serializer_count
        * config.cluster_size
        * config.operand_width
        * model.alm_per_serializer_bit
    )
    accumulator = config.accumulator_width * model.alm_per_fulladd_bit
    return CostReport({"serializer": serializer, "accumulator": accumulator})


def parse_cost_model(text: str, source: str = "<string>") -> CostModel:
    """Parse a ``key = value`` cost-model file.

    One coefficient per line; ``#`` starts a comment; blank lines are
    ignored.  The only accepted keys are the four ``CostModel`` field
    names; omitted keys keep their defaults.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputDomainError(
                f"{source}:{lineno}: expected 'key = value', got {raw!r}"
            )
        key, _, value_text = line.partition("=")
        key = key.strip()
        if key not in COST_MODEL_KEYS:
            raise InputDomainError(
                f"{source}:{lineno}: unknown coefficient {key!r} "
                f"(expected one of {', '.join(COST_MODEL_KEYS)})"
            )
        if key in values:
            raise InputDomainError(f"{source}:{lineno}: duplicate coefficient {key!r}")
        try:
            values[key] = float(value_text.strip())
        except ValueError:
            raise InputDomainError(
                f"{source}:{lineno}: {value_text.strip()!r} is not a number"
            ) from None
    return CostModel(**values)


def load_cost_model(path: str | Path) -> CostModel:
    path = Path(path)
    return parse_cost_model(path.read_text(), source=str(path))

"""Binary adder trees realizing a multi-operand adder (MOA).

A tree over ``n`` operands always contains exactly ``n - 1`` two-operand
adders.  Construction pairs adjacent values level by level; an odd entry
is promoted unchanged to the next level.  A level-``d`` adder (leaves sit
at level 0) consumes ``operand_width + d - 1``-bit inputs and emits an
``operand_width + d``-bit sum, so width growth inside the tree is lossless.
"""

from __future__ import annotations

from dataclasses import dataclass

from .adders import AdderSpec, add_loa
from .errors import InputDomainError

# A node input is ("operand", operand_index) or ("adder", node_index).
Port = tuple[str, int]


def ceil_log2(n: int) -> int:
    if n < 1:
        raise InputDomainError(f"ceil_log2 requires n >= 1, got {n}")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class ExactAll:
    """Every node adds exactly."""


@dataclass(frozen=True)
class UniformRatio:
    """Each node approximates ``floor(ratio * node_width)`` low bits."""

    ratio: float

    def __post_init__(self):
        if not 0.0 <= self.ratio <= 1.0:
            raise InputDomainError(f"ratio must lie in [0, 1], got {self.ratio}")


@dataclass(frozen=True)
class PerLevel:
    """Explicit OR-approximated bit count per tree level (level 1 first)."""

    low_bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "low_bits", tuple(self.low_bits))


ApproxPolicy = ExactAll | UniformRatio | PerLevel


def approx_bits_for(policy: ApproxPolicy, level: int, width: int) -> int:
    """OR-approximated low-bit count for an adder of ``width`` bits at ``level``."""
    if isinstance(policy, ExactAll):
        return 0
    if isinstance(policy, UniformRatio):
        # epsilon absorbs binary representation fuzz in ratio * width
        return int(policy.ratio * width + 1e-9)
    if isinstance(policy, PerLevel):
        if level > len(policy.low_bits):
            raise InputDomainError(
                f"policy lists {len(policy.low_bits)} levels but the tree has "
                f"a level-{level} adder"
            )
        return policy.low_bits[level - 1]
    raise InputDomainError(f"unknown approximation policy: {policy!r}")


@dataclass(frozen=True)
class TreeNode:
    left: Port
    right: Port
    level: int
    spec: AdderSpec


@dataclass(frozen=True)
class MoaTree:
    n_operands: int
    operand_width: int
    nodes: tuple[TreeNode, ...]
    root: Port

    @property
    def adder_count(self) -> int:
        return len(self.nodes)

    @property
    def depth(self) -> int:
        return ceil_log2(self.n_operands)

    def output_width(self) -> int:
        return self.operand_width + self.depth


@dataclass(frozen=True)
class TreeStats:
    adder_count: int
    depth: int
    per_level_widths: tuple[int, ...]


def level_adder_counts(n: int) -> tuple[int, ...]:
    """Adders created at each level when pairwise-reducing ``n`` values."""
    if n < 1:
        raise InputDomainError(f"operand count must be >= 1, got {n}")
    counts = []
    remaining = n
    while remaining > 1:
        counts.append(remaining // 2)
        remaining = remaining // 2 + remaining % 2
    return tuple(counts)


def level_specs(
    n: int, operand_width: int, policy: ApproxPolicy = ExactAll()
) -> tuple[tuple[int, AdderSpec], ...]:
    """Per-level (adder count, AdderSpec) without materializing nodes.

    All three policies assign the same low-bit count to every adder of a
    level, so this is enough to cost a tree of any size.
    """
    if operand_width < 1:
        raise InputDomainError(f"operand width must be >= 1, got {operand_width}")
    out = []
    for level, count in enumerate(level_adder_counts(n), start=1):
        width = operand_width + level - 1
        out.append((count, AdderSpec(width, approx_bits_for(policy, level, width))))
    return tuple(out)


def build_tree(
    n: int, operand_width: int, policy: ApproxPolicy = ExactAll()
) -> MoaTree:
    """Build a balanced-as-possible adder tree over ``n`` operands."""
    if n < 1:
        raise InputDomainError(f"operand count must be >= 1, got {n}")
    if operand_width < 1:
        raise InputDomainError(f"operand width must be >= 1, got {operand_width}")
    entries: list[Port] = [("operand", i) for i in range(n)]
    nodes: list[TreeNode] = []
    level = 0
    while len(entries) > 1:
        level += 1
        width = operand_width + level - 1
        spec = AdderSpec(width, approx_bits_for(policy, level, width))
        paired: list[Port] = []
        for i in range(0, len(entries) - 1, 2):
            nodes.append(TreeNode(entries[i], entries[i + 1], level, spec))
            paired.append(("adder", len(nodes) - 1))
        if len(entries) % 2:
            paired.append(entries[-1])
        entries = paired
    return MoaTree(n, operand_width, tuple(nodes), entries[0])


def eval_tree(tree: MoaTree, operands: list[int]) -> int:
    """Evaluate the tree on unsigned operands, node by node.

    Exact nodes reproduce the arithmetic sum; approximate nodes apply the
    LOA rule at their declared width.  The result fits in
    ``operand_width + depth`` bits.
    """
    if len(operands) != tree.n_operands:
        raise InputDomainError(
            f"expected {tree.n_operands} operands, got {len(operands)}"
        )
    limit = 1 << tree.operand_width
    for i, v in enumerate(operands):
        if not 0 <= v < limit:
            raise InputDomainError(
                f"operand {i} = {v} is outside the {tree.operand_width}-bit "
                "unsigned range"
            )
    sums: list[int] = []

    def value_of(port: Port) -> int:
        kind, idx = port
        return operands[idx] if kind == "operand" else sums[idx]

    for node in tree.nodes:
        sums.append(add_loa(value_of(node.left), value_of(node.right), node.spec).value)
    return value_of(tree.root)


def tree_stats(tree: MoaTree) -> TreeStats:
    """Adder count, depth and per-level adder widths of a tree."""
    depth = tree.depth
    widths = tuple(tree.operand_width + d - 1 for d in range(1, depth + 1))
    return TreeStats(tree.adder_count, depth, widths)

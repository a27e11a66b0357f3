"""CNN convolution-layer descriptors and their direct hardware mapping.

A convolution layer with ``N`` filters of size ``C x J x K`` maps to ``N``
constant-multiplier banks feeding ``N`` multi-operand adders.  Zero
weights vanish entirely: they contribute no shift-add network and no
adder-tree operand, so each filter's adder takes only its nonzero-weight
products.  The reference dot product here is the golden oracle every
mapped evaluation is checked against.

Weights travel in a plain-text file: first line ``N C J K``, then
``N*C*J*K`` whitespace-separated signed integers in row-major
``(n, c, j, k)`` order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cost import CostModel, DEFAULT_COST_MODEL, cost_serial_moa, cost_tree_shape
from .errors import InputDomainError, WeightFileError
from .scm import ScmNetwork, csd_recode, eval_scm
from .serial import DEFAULT_BASE_FREQ_HZ, SerialMoaConfig
from .tree import ApproxPolicy, ExactAll, MoaTree, build_tree, ceil_log2


@dataclass(frozen=True)
class LayerShape:
    n_filters: int
    channels: int
    kernel_h: int
    kernel_w: int
    out_h: int = 1
    out_w: int = 1

    def __post_init__(self):
        for name in ("n_filters", "channels", "kernel_h", "kernel_w", "out_h", "out_w"):
            if getattr(self, name) < 1:
                raise InputDomainError(
                    f"{name} must be >= 1, got {getattr(self, name)}"
                )

    @property
    def dot_length(self) -> int:
        """Operands per dot product: channels * kernel_h * kernel_w."""
        return self.channels * self.kernel_h * self.kernel_w


@dataclass(frozen=True, eq=False)
class WeightTensor:
    """Integer filter weights, shape (n_filters, channels, kernel_h, kernel_w)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 4:
            raise InputDomainError(f"weights must be 4-D, got {arr.ndim}-D")
        if not np.issubdtype(arr.dtype, np.integer):
            raise InputDomainError("weights must be integers")
        object.__setattr__(self, "values", arr.astype(np.int64))

    @property
    def n_filters(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.values.shape

    def filter_values(self, index: int) -> np.ndarray:
        return self.values[index]


@dataclass(frozen=True, eq=False)
class FeaturePatch:
    """One input window, shape (channels, kernel_h, kernel_w), signed integers."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 3:
            raise InputDomainError(f"patch must be 3-D, got {arr.ndim}-D")
        if not np.issubdtype(arr.dtype, np.integer):
            raise InputDomainError("patch values must be integers")
        object.__setattr__(self, "values", arr.astype(np.int64))


def dot_product_ref(patch: FeaturePatch, filter_weights) -> int:
    """Exact triple-sum dot product; the golden oracle for mapped layers."""
    weights = np.asarray(filter_weights)
    if weights.shape != patch.values.shape:
        raise InputDomainError(
            f"weight shape {weights.shape} does not match patch shape "
            f"{patch.values.shape}"
        )
    channels, kernel_h, kernel_w = patch.values.shape
    total = 0
    for c in range(channels):
        for j in range(kernel_h):
            for k in range(kernel_w):
                total += int(patch.values[c, j, k]) * int(weights[c, j, k])
    return total


@dataclass(frozen=True)
class OperandStats:
    cjk: int
    n_opd_mean: float
    per_filter_nonzero: tuple[int, ...]


def operand_stats(weights: WeightTensor) -> OperandStats:
    """Dot-product length and mean nonzero-weight count across filters."""
    per_filter = tuple(
        int(np.count_nonzero(weights.values[n])) for n in range(weights.n_filters)
    )
    cjk = int(np.prod(weights.shape[1:]))
    return OperandStats(cjk, sum(per_filter) / len(per_filter), per_filter)


def signed_width(value: int) -> int:
    """Bits needed to hold ``value`` in two's complement."""
    if value >= 0:
        return value.bit_length() + 1
    return (-value - 1).bit_length() + 1


@dataclass(frozen=True)
class TreeArch:
    """Fully parallel adder tree per filter."""


@dataclass(frozen=True)
class SerialArch:
    """Clusters of ``cluster_size`` operands serialized into accumulators."""

    cluster_size: int
    base_freq_hz: float = DEFAULT_BASE_FREQ_HZ

    def __post_init__(self):
        if self.cluster_size < 1:
            raise InputDomainError(
                f"cluster_size must be >= 1, got {self.cluster_size}"
            )


MoaArch = TreeArch | SerialArch


@dataclass(frozen=True)
class FilterReport:
    index: int
    operand_count: int
    adder_count: int
    depth: int
    scm_networks: tuple[ScmNetwork, ...]
    scm_alm: float
    moa_alm: float

    @property
    def moa_fraction(self) -> float:
        total = self.scm_alm + self.moa_alm
        return self.moa_alm / total if total > 0 else 0.0


@dataclass(frozen=True)
class LayerReport:
    shape: LayerShape
    policy: ApproxPolicy
    arch: MoaArch
    input_width: int
    weight_width: int
    operand_width: int
    filters: tuple[FilterReport, ...]

    @property
    def cjk(self) -> int:
        return self.shape.dot_length

    @property
    def n_opd_mean(self) -> float:
        return sum(f.operand_count for f in self.filters) / len(self.filters)

    @property
    def total_adder_count(self) -> int:
        return sum(f.adder_count for f in self.filters)

    @property
    def scm_alm(self) -> float:
        return sum(f.scm_alm for f in self.filters)

    @property
    def moa_alm(self) -> float:
        return sum(f.moa_alm for f in self.filters)

    @property
    def total_alm(self) -> float:
        return self.scm_alm + self.moa_alm

    @property
    def moa_fraction(self) -> float:
        total = self.total_alm
        return self.moa_alm / total if total > 0 else 0.0


def _resolve_widths(
    weights: WeightTensor, input_width: int, weight_width: int | None
) -> tuple[int, int]:
    if input_width < 1:
        raise InputDomainError(f"input_width must be >= 1, got {input_width}")
    needed = max(
        signed_width(int(weights.values.max())),
        signed_width(int(weights.values.min())),
    )
    if weight_width is None:
        weight_width = needed
    elif weight_width < needed:
        raise InputDomainError(
            f"weight_width {weight_width} is too narrow: weights need {needed} bits"
        )
    return input_width + weight_width, weight_width


def _check_layer_shapes(shape: LayerShape, weights: WeightTensor) -> None:
    expected = (shape.n_filters, shape.channels, shape.kernel_h, shape.kernel_w)
    if weights.shape != expected:
        raise InputDomainError(
            f"weight shape {weights.shape} does not match layer shape {expected}"
        )


def map_layer(
    shape: LayerShape,
    weights: WeightTensor,
    policy: ApproxPolicy = ExactAll(),
    arch: MoaArch = TreeArch(),
    model: CostModel = DEFAULT_COST_MODEL,
    input_width: int = 8,
    weight_width: int | None = None,
) -> LayerReport:
    """Map every filter to its constant multipliers plus multi-operand adder.

    Per filter the report carries the shift-add network of each nonzero
    weight, the operand count of the adder (nonzero weights only), the
    resulting two-operand adder count, and the ALM split between the
    multiplier bank and the adder.  Each shift-add internal adder is
    priced as a full adder at the product width.
    """
    _check_layer_shapes(shape, weights)
    operand_width, weight_width = _resolve_widths(weights, input_width, weight_width)
    networks: dict[int, ScmNetwork] = {}
    filters = []
    for n in range(shape.n_filters):
        nets = []
        for value in weights.filter_values(n).ravel().tolist():
            if value == 0:
                continue
            net = networks.get(value)
            if net is None:
                net = csd_recode(value)
                networks[value] = net
            nets.append(net)
        nonzero = len(nets)
        scm_adders = sum(net.adder_count for net in nets)
        scm_alm = scm_adders * operand_width * model.alm_per_fulladd_bit
        moa_alm = 0.0
        if nonzero >= 2:
            if isinstance(arch, TreeArch):
                moa_alm = cost_tree_shape(nonzero, operand_width, policy, model).alm_total
            else:
                config = SerialMoaConfig(
                    arch.cluster_size, operand_width, arch.base_freq_hz
                )
                clusters = -(-nonzero // arch.cluster_size)
                moa_alm = clusters * cost_serial_moa(config, model).alm_total
                moa_alm += cost_tree_shape(
                    clusters, config.accumulator_width, policy, model
                ).alm_total
        filters.append(
            FilterReport(
                index=n,
                operand_count=nonzero,
                adder_count=max(0, nonzero - 1),
                depth=ceil_log2(nonzero) if nonzero else 0,
                scm_networks=tuple(nets),
                scm_alm=scm_alm,
                moa_alm=moa_alm,
            )
        )
    return LayerReport(
        shape=shape,
        policy=policy,
        arch=arch,
        input_width=input_width,
        weight_width=weight_width,
        operand_width=operand_width,
        filters=tuple(filters),
    )


def eval_tree_signed(tree: MoaTree, values: list[int]) -> int:
    """Evaluate a tree over signed values on raw two's-complement patterns.

    Each node encodes its inputs at one bit above its declared width
    (which sign-extends narrower children), applies its add rule on the
    patterns, and reinterprets the result as signed.  Exact nodes thus
    reproduce plain signed addition; approximate nodes apply the OR/AND
    structure to the low pattern bits.
    """
    if len(values) != tree.n_operands:
        raise InputDomainError(
            f"expected {tree.n_operands} operands, got {len(values)}"
        )
    half = 1 << (tree.operand_width - 1)
    for i, v in enumerate(values):
        if not -half <= v < half:
            raise InputDomainError(
                f"operand {i} = {v} is outside the signed {tree.operand_width}-bit "
                "range"
            )
    sums: list[int] = []

    def value_of(port):
        kind, idx = port
        return values[idx] if kind == "operand" else sums[idx]

    for node in tree.nodes:
        width, low = node.spec.width, node.spec.approx_low_bits
        out_bits = width + 1
        mask = (1 << out_bits) - 1
        x = value_of(node.left) & mask
        y = value_of(node.right) & mask
        if low == 0:
            pattern = (x + y) & mask
        else:
            or_part = (x | y) & ((1 << low) - 1)
            carry_in = (x >> (low - 1)) & (y >> (low - 1)) & 1
            upper = ((x >> low) + (y >> low) + carry_in) & (mask >> low)
            pattern = (upper << low) | or_part
        sums.append(pattern - (1 << out_bits) if pattern >> width else pattern)
    return value_of(tree.root)


def evaluate_filter(
    weights: WeightTensor,
    filter_index: int,
    patch: FeaturePatch,
    policy: ApproxPolicy = ExactAll(),
    arch: MoaArch = TreeArch(),
    input_width: int = 8,
    weight_width: int | None = None,
) -> int:
    """Run one mapped filter: shift-add products, then the multi-operand add.

    With an exact policy this equals ``dot_product_ref`` on the same
    inputs.  Widths are derived exactly as in ``map_layer``.
    """
    if not 0 <= filter_index < weights.n_filters:
        raise InputDomainError(
            f"filter_index {filter_index} out of range [0, {weights.n_filters})"
        )
    if patch.values.shape != weights.shape[1:]:
        raise InputDomainError(
            f"patch shape {patch.values.shape} does not match filter shape "
            f"{weights.shape[1:]}"
        )
    half = 1 << (input_width - 1)
    for x in patch.values.ravel().tolist():
        if not -half <= x < half:
            raise InputDomainError(
                f"patch value {x} is outside the signed {input_width}-bit range"
            )
    operand_width, _ = _resolve_widths(weights, input_width, weight_width)
    networks: dict[int, ScmNetwork] = {}
    products = []
    flat_weights = weights.filter_values(filter_index).ravel().tolist()
    flat_patch = patch.values.ravel().tolist()
    for w, x in zip(flat_weights, flat_patch):
        if w == 0:
            continue
        net = networks.get(w)
        if net is None:
            net = csd_recode(w)
            networks[w] = net
        products.append(eval_scm(net, x))
    if not products:
        return 0
    if isinstance(arch, TreeArch):
        if len(products) == 1:
            return products[0]
        return eval_tree_signed(build_tree(len(products), operand_width, policy), products)
    config = SerialMoaConfig(arch.cluster_size, operand_width, arch.base_freq_hz)
    partials = [
        sum(products[i : i + arch.cluster_size])
        for i in range(0, len(products), arch.cluster_size)
    ]
    if len(partials) == 1:
        return partials[0]
    combine = build_tree(len(partials), config.accumulator_width, policy)
    return eval_tree_signed(combine, partials)


def parse_weight_text(text: str) -> WeightTensor:
    """Parse the weight file format; errors carry the offending line number."""
    lines = text.splitlines()
    if not lines or not lines[0].split():
        raise WeightFileError("missing 'N C J K' header", 1)
    header = lines[0].split()
    if len(header) != 4:
        raise WeightFileError(
            f"header must be 'N C J K' (4 integers), got {len(header)} fields", 1
        )
    try:
        dims = [int(tok) for tok in header]
    except ValueError:
        raise WeightFileError(f"header must be 4 integers, got {lines[0]!r}", 1) from None
    if any(d < 1 for d in dims):
        raise WeightFileError(f"dimensions must be positive, got {dims}", 1)
    expected = dims[0] * dims[1] * dims[2] * dims[3]
    values: list[int] = []
    for lineno, line in enumerate(lines[1:], start=2):
        for token in line.split():
            if len(values) >= expected:
                raise WeightFileError(
                    f"expected {expected} weights but found extra value {token!r}",
                    lineno,
                )
            try:
                values.append(int(token))
            except ValueError:
                raise WeightFileError(
                    f"{token!r} is not an integer", lineno
                ) from None
    if len(values) != expected:
        raise WeightFileError(
            f"expected {expected} weights, found only {len(values)}",
            max(1, len(lines)),
        )
    return WeightTensor(np.array(values, dtype=np.int64).reshape(dims))


def load_weight_file(path: str | Path) -> WeightTensor:
    return parse_weight_text(Path(path).read_text())


def save_weight_file(path: str | Path, weights: WeightTensor) -> None:
    """Write the plain-text weight format, one filter per line."""
    n, c, j, k = weights.shape
    lines = [f"{n} {c} {j} {k}"]
    for index in range(n):
        lines.append(" ".join(str(v) for v in weights.filter_values(index).ravel().tolist()))
    Path(path).write_text("\n".join(lines) + "\n")

"""Bit-exact simulation and ALM-level cost modeling of multi-operand adders.

The package covers the full path from a CNN layer's integer weights to
hardware-shaped arithmetic: canonical signed-digit constant multipliers,
exact and lower-part-OR approximate two-operand adders, balanced adder
trees, serialized accumulator clusters, and a per-bit ALM cost model
with CSV-emitting sweeps on the command line (``moa-lab``).
"""

from .adders import (
    EXHAUSTIVE_WIDTH_LIMIT,
    AdderSpec,
    AddResult,
    ErrorSampling,
    Exhaustive,
    MonteCarlo,
    add_exact,
    add_loa,
    mred,
)
from .cost import (
    COST_MODEL_KEYS,
    DEFAULT_COST_MODEL,
    CostModel,
    CostReport,
    cost_binary_adder,
    cost_serial_moa,
    cost_tree,
    cost_tree_shape,
    load_cost_model,
    parse_cost_model,
)
from .errors import (
    InputDomainError,
    ResourceGuardError,
    SequencingError,
    WeightFileError,
)
from .layer import (
    FeaturePatch,
    FilterReport,
    LayerReport,
    LayerShape,
    OperandStats,
    SerialArch,
    TreeArch,
    WeightTensor,
    dot_product_ref,
    eval_tree_signed,
    evaluate_filter,
    load_weight_file,
    map_layer,
    operand_stats,
    parse_weight_text,
    save_weight_file,
    signed_width,
)
from .scm import MAX_CONSTANT_BITS, ScmNetwork, ScmTerm, csd_recode, eval_scm
from .serial import (
    DEFAULT_BASE_FREQ_HZ,
    DSP_CLOCK_CEILING_HZ,
    FrameResult,
    SerialMoaConfig,
    SerialMoaState,
    load_parallel,
    max_feasible_cluster,
    run_frame,
    step_fast_cycle,
)
from .tree import (
    ApproxPolicy,
    ExactAll,
    MoaTree,
    PerLevel,
    TreeNode,
    TreeStats,
    UniformRatio,
    approx_bits_for,
    build_tree,
    ceil_log2,
    eval_tree,
    level_adder_counts,
    level_specs,
    tree_stats,
)

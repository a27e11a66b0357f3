"""Layer mapping: dot-product oracle, operand stats, costs, and evaluation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moa_lab import (
    ExactAll,
    FeaturePatch,
    InputDomainError,
    LayerShape,
    SerialArch,
    TreeArch,
    UniformRatio,
    WeightFileError,
    WeightTensor,
    build_tree,
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


def tensor(values) -> WeightTensor:
    return WeightTensor(np.array(values, dtype=np.int64))


def patch_of(values) -> FeaturePatch:
    return FeaturePatch(np.array(values, dtype=np.int64))


SMALL_WEIGHTS = tensor([[[[3, -5], [0, 7]]], [[[0, 0], [0, 0]]]])
SMALL_SHAPE = LayerShape(2, 1, 2, 2)


def test_dot_product_known_value():
    patch = patch_of([[[1, 2], [3, 4]], [[5, 6], [7, 8]]])
    weights = np.array([[[8, 7], [6, 5]], [[4, 3], [2, 1]]])
    # 8 + 14 + 18 + 20 + 20 + 18 + 14 + 8
    assert dot_product_ref(patch, weights) == 120


def test_dot_product_rejects_shape_mismatch():
    patch = patch_of([[[1, 2]]])
    with pytest.raises(InputDomainError):
        dot_product_ref(patch, np.array([[[1, 2, 3]]]))


def test_operand_stats_counts_nonzero_weights_per_filter():
    stats = operand_stats(SMALL_WEIGHTS)
    assert stats.cjk == 4
    assert stats.per_filter_nonzero == (3, 0)
    assert stats.n_opd_mean == 1.5


def test_signed_width_boundaries():
    assert signed_width(0) == 1
    assert signed_width(1) == 2
    assert signed_width(-1) == 1
    assert signed_width(127) == 8
    assert signed_width(-128) == 8
    assert signed_width(128) == 9


def test_map_layer_small_known_report():
    report = map_layer(SMALL_SHAPE, SMALL_WEIGHTS)
    assert report.weight_width == 4           # -5 and 7 both need 4 bits
    assert report.operand_width == 12
    dense, empty = report.filters
    assert (dense.operand_count, dense.adder_count, dense.depth) == (3, 2, 2)
    # three 1-adder recodings at 12 bits, then a 12-bit + 13-bit tree
    assert dense.scm_alm == 36.0
    assert dense.moa_alm == 25.0
    assert dense.moa_fraction == pytest.approx(25 / 61)
    assert (empty.operand_count, empty.adder_count, empty.depth) == (0, 0, 0)
    assert empty.scm_alm == empty.moa_alm == empty.moa_fraction == 0.0


def test_map_layer_totals_aggregate_filters():
    report = map_layer(SMALL_SHAPE, SMALL_WEIGHTS)
    assert report.total_adder_count == 2
    assert report.total_alm == 61.0
    assert report.n_opd_mean == 1.5
    assert report.cjk == 4


def test_zero_weights_add_no_cost():
    padded = tensor([[[[3, 0, -5], [0, 0, 0], [0, 0, 7]]]])
    compact = tensor([[[[3, -5, 7]]]])
    a = map_layer(LayerShape(1, 1, 3, 3), padded)
    b = map_layer(LayerShape(1, 1, 1, 3), compact)
    assert a.filters[0].scm_alm == b.filters[0].scm_alm
    assert a.filters[0].moa_alm == b.filters[0].moa_alm
    assert a.filters[0].operand_count == b.filters[0].operand_count


def test_map_layer_serial_arch_costs_clusters():
    weights = tensor([[[list(range(1, 9))]]])     # 8 nonzero weights
    shape = LayerShape(1, 1, 1, 8)
    report = map_layer(shape, weights, arch=SerialArch(cluster_size=4))
    # operand width 8+5=13, accumulator width 13+2+1=16; two clusters of
    # four (2*4*13 serializer bits + 16 each) plus one 16-bit combine adder
    assert report.filters[0].moa_alm == 2 * (104.0 + 16.0) + 16.0


def test_map_layer_shape_mismatch():
    with pytest.raises(InputDomainError):
        map_layer(LayerShape(1, 1, 2, 2), SMALL_WEIGHTS)


def test_weight_width_override():
    report = map_layer(SMALL_SHAPE, SMALL_WEIGHTS, weight_width=8)
    assert report.operand_width == 16
    with pytest.raises(InputDomainError):
        map_layer(SMALL_SHAPE, SMALL_WEIGHTS, weight_width=3)


def test_moa_fraction_grows_with_dot_length():
    fractions = []
    for length in (8, 64, 512):
        weights = tensor([[[[3] * length]]])
        report = map_layer(LayerShape(1, 1, 1, length), weights)
        fractions.append(report.moa_fraction)
    assert fractions[0] < fractions[1] < fractions[2]


def test_mapped_filter_matches_reference_small():
    patch = patch_of([[[10, -3], [6, 2]]])
    expected = dot_product_ref(patch, SMALL_WEIGHTS.filter_values(0))
    assert evaluate_filter(SMALL_WEIGHTS, 0, patch) == expected == 59
    assert evaluate_filter(SMALL_WEIGHTS, 1, patch) == 0


@settings(max_examples=60)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=1, max_value=3),
    st.data(),
)
def test_mapped_filter_matches_reference(channels, kh, kw, data):
    count = channels * kh * kw
    values = st.integers(min_value=-128, max_value=127)
    weights = tensor(
        [
            np.array(data.draw(st.lists(values, min_size=count, max_size=count)))
            .reshape(channels, kh, kw)
            .tolist()
        ]
    )
    patch = patch_of(
        np.array(data.draw(st.lists(values, min_size=count, max_size=count)))
        .reshape(channels, kh, kw)
        .tolist()
    )
    expected = dot_product_ref(patch, weights.filter_values(0))
    assert evaluate_filter(weights, 0, patch) == expected
    assert (
        evaluate_filter(weights, 0, patch, arch=SerialArch(cluster_size=3))
        == expected
    )


def test_patch_values_must_fit_input_width():
    patch = patch_of([[[300, 0], [0, 0]]])
    with pytest.raises(InputDomainError):
        evaluate_filter(SMALL_WEIGHTS, 0, patch, input_width=8)


def test_filter_index_validated():
    patch = patch_of([[[0, 0], [0, 0]]])
    with pytest.raises(InputDomainError):
        evaluate_filter(SMALL_WEIGHTS, 2, patch)


@given(
    st.lists(st.integers(min_value=-128, max_value=127), min_size=1, max_size=24)
)
def test_signed_tree_evaluation_sums_exactly(values):
    tree = build_tree(len(values), 8, ExactAll())
    assert eval_tree_signed(tree, values) == sum(values)


def test_signed_tree_rejects_out_of_range_operands():
    tree = build_tree(2, 8)
    with pytest.raises(InputDomainError):
        eval_tree_signed(tree, [128, 0])
    with pytest.raises(InputDomainError):
        eval_tree_signed(tree, [-129, 0])


def test_signed_tree_with_approximation_stays_near_the_sum():
    values = [-100, 87, -3, 54, 21, -77, 8, 40]
    tree = build_tree(len(values), 8, UniformRatio(0.25))
    got = eval_tree_signed(tree, values)
    # 2-bit OR per node; errors accumulate but stay small
    assert abs(got - sum(values)) < 32


def test_weight_tensor_validation():
    with pytest.raises(InputDomainError):
        WeightTensor(np.zeros((2, 2), dtype=np.int64))
    with pytest.raises(InputDomainError):
        WeightTensor(np.zeros((1, 1, 2, 2), dtype=np.float64))


def test_layer_shape_validation():
    with pytest.raises(InputDomainError):
        LayerShape(0, 1, 1, 1)
    assert LayerShape(2, 3, 5, 7).dot_length == 105


def test_weight_file_round_trip(tmp_path):
    path = tmp_path / "weights.txt"
    save_weight_file(path, SMALL_WEIGHTS)
    loaded = load_weight_file(path)
    assert np.array_equal(loaded.values, SMALL_WEIGHTS.values)


def test_weight_text_format_is_stable(tmp_path):
    path = tmp_path / "weights.txt"
    save_weight_file(path, SMALL_WEIGHTS)
    assert path.read_text() == "2 1 2 2\n3 -5 0 7\n0 0 0 0\n"


def test_parse_weight_text_values_may_wrap_lines():
    loaded = parse_weight_text("1 1 2 2\n1 2\n3\n4\n")
    assert loaded.values.tolist() == [[[[1, 2], [3, 4]]]]


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 1),
        ("1 1 2\n1 2\n", 1),
        ("1 1 2 x\n1 2\n", 1),
        ("0 1 1 1\n\n", 1),
        ("1 1 1 2\n1 oops\n", 2),
        ("1 1 1 2\n1\n", 2),
        ("1 1 1 2\n1 2\n3\n", 3),
    ],
)
def test_parse_weight_text_reports_the_offending_line(text, line):
    with pytest.raises(WeightFileError) as err:
        parse_weight_text(text)
    assert err.value.line_number == line
    assert f"line {line}:" in str(err.value)

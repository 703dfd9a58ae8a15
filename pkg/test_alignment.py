"""
test_alignment.py
骨架对齐测试：合法性校验、对齐矩阵、回溯、最优对齐枚举、d_B / d_B∞ 及其与穷举的等价性。
"""
import pytest

from conftest import make_dataset, random_backbone, random_plateau_free
from core.exceptions import InputError
from core.schema import MAX, MIN, Alignment, Backbone, Dataset, TimeGrid
from alignment.backbone import (NO_MISALIGNMENT, NO_NULL, PRESERVES_ORDER, RESTRICTION_TO_MATCHING,
                                alignment_cost, extract_backbone, validate_alignment)
from alignment.matrix import (alignment_matrix, alignment_report, backbone_distance,
                              backbone_infinity_distance, backtrack, enumerate_optimal)
from etl.graph_engine import build_dag
from evaluation.oracles import (enumerate_alignments, oracle_backbone_distance,
                                oracle_backbone_infinity_distance, oracle_optimal_alignments)
from ingestion.processors import sup_distance
from persistence.diagram import diagram_delta
from persistence.extrema import find_extrema

WEIGHT_GRID = [0.25, 0.5, 0.75, 1.0]

# 噪声极值两侧各插入两次的对齐
SINE_ALIGNMENT_2 = Alignment(((0, 0), (None, 1), (None, 2), (1, 3), (2, 4), (3, None), (4, None), (5, 5)))


def single_backbone(heights) -> Backbone:
    return extract_backbone(build_dag(make_dataset({"f": heights})), "f")


# --- 骨架抽取 ---
def test_extract_backbone_sine(sin_cos_dataset):
    bb = extract_backbone(build_dag(sin_cos_dataset), "sine")
    assert [n.label for n in bb.nodes] == [MIN, MAX, MIN, MAX]
    assert [n.weight for n in bb.nodes] == pytest.approx([0.5, 1.0, 1.0, 0.5], abs=5e-3)


def test_extract_backbone_monotone():
    bb = single_backbone([0, 1, 2])
    assert bb == Backbone.of([(MIN, 1.0), (MAX, 1.0)], "f")


def test_extract_backbone_unknown_series():
    with pytest.raises(InputError):
        extract_backbone(build_dag(make_dataset({"f": [0, 1, 2]})), "g")


# --- 对齐合法性 ---
def test_validate_alignment_with_insertions(sine_backbones):
    x, y = sine_backbones
    assert validate_alignment(SINE_ALIGNMENT_2, x, y) == []


def test_validate_detects_repeated_node(sine_backbones):
    x, y = sine_backbones
    pairs = ((0, 0), (0, None)) + SINE_ALIGNMENT_2.pairs[1:]
    rules = {v.rule for v in validate_alignment(Alignment(pairs), x, y)}
    assert RESTRICTION_TO_MATCHING in rules


def test_validate_detects_label_mismatch():
    x = Backbone.of([(MIN, 1.0)])
    y = Backbone.of([(MAX, 1.0)])
    violations = validate_alignment(Alignment(((0, 0),)), x, y)
    assert [v.rule for v in violations] == [NO_MISALIGNMENT]


def test_validate_detects_null_pair_and_order():
    x = Backbone.of([(MIN, 1.0), (MAX, 1.0)])
    y = Backbone.of([(MIN, 1.0), (MAX, 1.0)])
    rules = {v.rule for v in validate_alignment(Alignment(((None, None), (1, 1), (0, 0))), x, y)}
    assert {NO_NULL, PRESERVES_ORDER} <= rules


def test_validate_detects_missing_node():
    x = Backbone.of([(MIN, 1.0), (MAX, 1.0)])
    y = Backbone.of([(MIN, 1.0)])
    violations = validate_alignment(Alignment(((0, 0),)), x, y)
    assert [v.rule for v in violations] == [RESTRICTION_TO_MATCHING]


# --- 对齐矩阵 ---
def test_matrix_single_match():
    m = alignment_matrix(Backbone.of([(MIN, 1)]), Backbone.of([(MIN, 2)]))
    assert m.values.tolist() == [[0.0, 2.0], [1.0, 1.0]]


def test_matrix_mismatch_forces_double_insertion():
    m = alignment_matrix(Backbone.of([(MIN, 1)]), Backbone.of([(MAX, 2)]))
    assert m.corner == 3.0


def test_matrix_sine_backbones(sine_backbones):
    x, y = sine_backbones
    corner = alignment_matrix(x, y).corner
    assert 0.115 - 1e-9 <= corner <= 0.116 + 1e-9


# --- 回溯 ---
def test_backtrack_identical_is_diagonal(sine_backbones):
    x, _ = sine_backbones
    alignment = backtrack(alignment_matrix(x, x))
    assert alignment.pairs == tuple((k, k) for k in range(len(x)))
    assert alignment_cost(alignment, x, x) == 0.0


def test_backtrack_sine_backbones_inserts_noise(sine_backbones):
    x, y = sine_backbones
    alignment = backtrack(alignment_matrix(x, y))
    assert alignment == SINE_ALIGNMENT_2
    assert alignment_cost(alignment, x, y) == pytest.approx(0.116, abs=1e-3)


def test_backtrack_empty_side():
    y = Backbone.of([(MIN, 0.3), (MAX, 0.2), (MIN, 0.1)])
    alignment = backtrack(alignment_matrix(Backbone(()), y))
    assert alignment.pairs == ((None, 0), (None, 1), (None, 2))


def test_backtrack_rejects_unknown_policy(sine_backbones):
    x, y = sine_backbones
    with pytest.raises(InputError):
        backtrack(alignment_matrix(x, y), "random")


def test_backtracked_alignments_are_valid_and_optimal(rng):
    for _ in range(300):
        x, y = random_backbone(rng), random_backbone(rng)
        matrix = alignment_matrix(x, y)
        alignment = backtrack(matrix)
        assert validate_alignment(alignment, x, y) == []
        assert alignment_cost(alignment, x, y) == pytest.approx(matrix.corner, rel=1e-12, abs=1e-15)


# --- 最优对齐枚举 ---
def test_enumerate_unique_optimum(sine_backbones):
    x, y = sine_backbones
    found, truncated = enumerate_optimal(alignment_matrix(x, y), cap=64)
    assert found == [SINE_ALIGNMENT_2]
    assert not truncated


def test_enumerate_tied_instance_matches_exhaustive():
    x = Backbone.of([(MIN, 1.0)])
    y = Backbone.of([(MIN, 1.0), (MAX, 2.0), (MIN, 1.0)])
    found, truncated = enumerate_optimal(alignment_matrix(x, y), cap=64)
    assert not truncated
    assert set(found) == set(oracle_optimal_alignments(x, y))
    assert len(found) == 2


def test_enumerate_cap_truncates():
    x = Backbone.of([(MIN, 1.0)])
    y = Backbone.of([(MIN, 1.0), (MAX, 2.0), (MIN, 1.0)])
    matrix = alignment_matrix(x, y)
    found, truncated = enumerate_optimal(matrix, cap=1)
    assert truncated
    assert found == [backtrack(matrix)]
    with pytest.raises(InputError):
        enumerate_optimal(matrix, cap=0)


def test_enumerate_matches_exhaustive_on_grid_weights(rng):
    for _ in range(300):
        x, y = random_backbone(rng, grid=WEIGHT_GRID), random_backbone(rng, grid=WEIGHT_GRID)
        matrix = alignment_matrix(x, y)
        found, truncated = enumerate_optimal(matrix, cap=10_000)
        assert not truncated
        assert len(found) == len(set(found))
        assert set(found) == set(oracle_optimal_alignments(x, y))
        assert found[0] == backtrack(matrix)


# --- 距离 ---
def test_backbone_distance_examples(sine_backbones):
    x, y = sine_backbones
    assert backbone_distance(x, x) == 0.0
    assert backbone_distance(x, y) == pytest.approx(0.116, abs=1e-3)
    assert backbone_distance(Backbone.of([(MIN, 0.3)]), Backbone(())) == 0.3


def test_backbone_infinity_distance_examples(sine_backbones):
    x, y = sine_backbones
    assert backbone_infinity_distance(x, x) == 0.0
    assert backbone_infinity_distance(Backbone.of([(MIN, 1)]), Backbone.of([(MIN, 2)])) == 1.0
    assert backbone_infinity_distance(x, y) == pytest.approx(0.042)


def test_dp_matches_exhaustive_oracles(rng):
    for _ in range(500):
        x, y = random_backbone(rng), random_backbone(rng)
        assert backbone_distance(x, y) == pytest.approx(oracle_backbone_distance(x, y), rel=1e-12, abs=1e-15)
        assert backbone_infinity_distance(x, y) == pytest.approx(
            oracle_backbone_infinity_distance(x, y), rel=1e-12, abs=1e-15)


def test_oracle_counts_alignments_of_tiny_backbones():
    x = Backbone.of([(MIN, 1.0)])
    # 配对 / x 先插入 / y 先插入
    assert len(list(enumerate_alignments(x, x))) == 3
    with pytest.raises(InputError):
        list(enumerate_alignments(Backbone.of([(MIN, 1)] * 7), Backbone.of([(MIN, 1)] * 6)))


def test_backbone_distance_metric_axioms(rng):
    for _ in range(1000):
        x, y, z = (random_backbone(rng) for _ in range(3))
        dxy, dyx = backbone_distance(x, y), backbone_distance(y, x)
        assert dxy >= 0
        assert dxy == pytest.approx(dyx, rel=1e-12, abs=1e-15)
        assert backbone_distance(x, x) == 0.0
        if x != y:
            assert dxy > 0
        assert backbone_distance(x, z) <= dxy + backbone_distance(y, z) + 1e-12


def test_alignment_report(sine_backbones):
    x, y = sine_backbones
    report = alignment_report(SINE_ALIGNMENT_2, x, y, tie=False)
    assert report["x"] == "sine-1" and report["y"] == "sine-2"
    assert len(report["pairs"]) == 8
    assert report["pairs"][1] == {"x_index": None, "y_index": 1, "label": MAX, "cost": 0.042}
    assert report["total_cost"] == pytest.approx(0.116, abs=1e-3)
    assert report["tie"] is False


# --- 稳定性 ---
def test_backbone_stability_under_small_perturbations(rng):
    trials = 0
    while trials < 200:
        n = int(rng.integers(4, 16))
        f = random_plateau_free(rng, n, name="f")
        delta = diagram_delta(f)
        eta = float(rng.uniform(0.05, 0.95)) * delta / 2
        f_prime = f.with_heights(f.array() + rng.uniform(-eta, eta, size=n))
        grid = TimeGrid(f.times)
        bf = extract_backbone(build_dag(Dataset(grid, (f,)), max_workers=1), "f")
        bfp = extract_backbone(build_dag(Dataset(grid, (f_prime,)), max_workers=1), "f")
        eps = sup_distance(f, f_prime)
        k = len(find_extrema(f)) + len(find_extrema(f_prime))
        assert backbone_infinity_distance(bf, bfp) <= eps + 1e-12
        assert backbone_distance(bf, bfp) <= k * eps + 1e-12
        trials += 1

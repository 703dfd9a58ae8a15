"""
evaluation/oracles.py
功能：暴力校验器 (仅供测试与审计)。与主实现完全独立地重新计算：
  - 穷举所有合法对齐 -> d_B / d_B∞
  - 逐阈值扫描连通分量 -> 节点寿命
  - 均匀 ε 网格扫描区间相交 -> ε*
  - 穷举全部对齐组合 -> d_ED
"""
import math
from itertools import product
from typing import Dict, Iterator, List, Tuple

from alignment.backbone import alignment_cost, alignment_max_cost, extract_backbone
from core.exceptions import InputError
from core.schema import MIN, AlignedPair, Alignment, Backbone, ExtremalEventDAG, NodeLifeTable, TimeSeries
from distance.supergraph import aligned_edge_term
from intervals.extremal_interval import extremal_interval
from persistence.extrema import find_extrema

MAX_ORACLE_SIZE = 12


def enumerate_alignments(x: Backbone, y: Backbone) -> Iterator[Alignment]:
    """按定义直接生成所有合法对齐 (每步: 配对同标签节点 / x 对 𝟎 / 𝟎 对 y)"""
    if len(x) + len(y) > MAX_ORACLE_SIZE:
        raise InputError(f"穷举对齐要求 len(x)+len(y) <= {MAX_ORACLE_SIZE}")

    def walk(i: int, j: int, prefix: Tuple[AlignedPair, ...]):
        if i == len(x) and j == len(y):
            yield Alignment(prefix)
            return
        if i < len(x) and j < len(y) and x[i].label == y[j].label:
            yield from walk(i + 1, j + 1, prefix + ((i, j),))
        if i < len(x):
            yield from walk(i + 1, j, prefix + ((i, None),))
        if j < len(y):
            yield from walk(i, j + 1, prefix + ((None, j),))

    yield from walk(0, 0, ())


def oracle_backbone_distance(x: Backbone, y: Backbone) -> float:
    return min(alignment_cost(a, x, y) for a in enumerate_alignments(x, y))


def oracle_backbone_infinity_distance(x: Backbone, y: Backbone) -> float:
    return min(alignment_max_cost(a, x, y) for a in enumerate_alignments(x, y))


def oracle_optimal_alignments(x: Backbone, y: Backbone, rel_tol: float = 1e-12) -> List[Alignment]:
    alignments = list(enumerate_alignments(x, y))
    costs = [alignment_cost(a, x, y) for a in alignments]
    best = min(costs)
    return [a for a, c in zip(alignments, costs) if math.isclose(c, best, rel_tol=rel_tol, abs_tol=1e-15)]


def _min_lives_by_threshold(h: Tuple[float, ...], minima: List[int]) -> Dict[int, float]:
    """对每个极小值 m：找最小阈值 c，使 {h <= c} 中含 m 的连通段出现更老的点 (更低，或同高且更靠前)"""
    n = len(h)
    span = (max(h) - min(h)) / 2
    lives = {}
    for m in minima:
        death = None
        for c in sorted(set(v for v in h if v >= h[m])):
            lo = m
            while lo - 1 >= 0 and h[lo - 1] <= c:
                lo -= 1
            hi = m
            while hi + 1 < n and h[hi + 1] <= c:
                hi += 1
            if any((h[k], k) < (h[m], m) for k in range(lo, hi + 1)):
                death = c
                break
        lives[m] = span if death is None else (death - h[m]) / 2
    return lives


def oracle_node_lives(ts: TimeSeries) -> NodeLifeTable:
    extrema = find_extrema(ts)
    lives = _min_lives_by_threshold(ts.heights, [e.index for e in extrema if e.label == MIN])
    lives.update(_min_lives_by_threshold(ts.negated().heights, [e.index for e in extrema if e.label != MIN]))
    return dict(sorted(lives.items()))


def oracle_eps_star(a: TimeSeries, ta: int, b: TimeSeries, tb: int, resolution: float = 1e-3) -> float:
    """在 ε = k·resolution 上扫描，返回首个使两区间相交的 ε (误差不超过 resolution)"""
    if resolution <= 0:
        raise InputError("resolution 必须 > 0")
    ceiling = (max(a.heights) - min(a.heights) + max(b.heights) - min(b.heights)) / 2 + resolution
    steps = int(math.ceil(ceiling / resolution)) + 1
    for k in range(steps + 1):
        eps = k * resolution
        if extremal_interval(a, ta, eps).intersects(extremal_interval(b, tb, eps)):
            return eps
    return math.inf


def oracle_dag_distance(dag_a: ExtremalEventDAG, dag_b: ExtremalEventDAG) -> float:
    """
    在每对骨架的全部最优对齐 (由穷举得到) 的笛卡尔积上取边项最小值。
    仅适用于小规模 (每对 len(x)+len(y) <= 12)。
    """
    names = list(dag_a.series_names)
    node_term = 0.0
    optimal = []
    for name in names:
        x, y = extract_backbone(dag_a, name), extract_backbone(dag_b, name)
        node_term += oracle_backbone_distance(x, y)
        optimal.append(oracle_optimal_alignments(x, y))
    edge_term = min(
        aligned_edge_term(dag_a, dag_b, dict(zip(names, combo)))
        for combo in product(*optimal)
    )
    return node_term + edge_term

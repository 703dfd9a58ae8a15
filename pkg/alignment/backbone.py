"""
alignment/backbone.py
功能：从 DAG 中抽取单条序列的骨架 (backbone)，以及对齐合法性校验与对齐代价。
"""
from dataclasses import dataclass
from typing import List, Tuple

from core.schema import Alignment, Backbone, BackboneNode, ExtremalEventDAG

# 对齐的四条性质
NO_NULL = "no-null-alignments"
PRESERVES_ORDER = "preserves-order"
NO_MISALIGNMENT = "no-misalignments"
RESTRICTION_TO_MATCHING = "restriction-to-matching"


@dataclass(frozen=True)
class Violation:
    rule: str
    positions: Tuple[int, ...]
    detail: str = ""


def extract_backbone(dag: ExtremalEventDAG, series: str) -> Backbone:
    """按时间顺序取 (label, 节点寿命)"""
    vertices = dag.series_vertices(series)
    return Backbone(tuple(BackboneNode(v.label, v.weight) for v in vertices), series)


def _projection_violations(alignment: Alignment, side: int, size: int, name: str) -> List[Violation]:
    out = []
    seen = {}
    previous = None
    for pos, pair in enumerate(alignment.pairs):
        k = pair[side]
        if k is None:
            continue
        if not 0 <= k < size:
            out.append(Violation(RESTRICTION_TO_MATCHING, (pos,), f"{name} 下标 {k} 越界"))
            continue
        if k in seen:
            out.append(Violation(RESTRICTION_TO_MATCHING, (seen[k], pos), f"{name}{k + 1} 出现多次"))
        else:
            seen[k] = pos
        if previous is not None and k <= previous[1]:
            out.append(Violation(PRESERVES_ORDER, (previous[0], pos), f"{name} 投影不递增"))
        previous = (pos, k)
    missing = [k for k in range(size) if k not in seen]
    if missing:
        out.append(Violation(RESTRICTION_TO_MATCHING, tuple(missing), f"{name} 中节点 {[m + 1 for m in missing]} 未出现"))
    return out


def validate_alignment(alignment: Alignment, x: Backbone, y: Backbone) -> List[Violation]:
    """空列表表示合法"""
    violations = []
    for pos, (i, j) in enumerate(alignment.pairs):
        if i is None and j is None:
            violations.append(Violation(NO_NULL, (pos,), "(𝟎, 𝟎)"))
        elif i is not None and j is not None and 0 <= i < len(x) and 0 <= j < len(y):
            if x[i].label != y[j].label:
                violations.append(Violation(NO_MISALIGNMENT, (pos,), f"{x[i].label} 对 {y[j].label}"))
    violations.extend(_projection_violations(alignment, 0, len(x), "x"))
    violations.extend(_projection_violations(alignment, 1, len(y), "y"))
    return violations


def pair_cost(pair, x: Backbone, y: Backbone) -> float:
    i, j = pair
    if i is None:
        return y[j].weight
    if j is None:
        return x[i].weight
    return abs(x[i].weight - y[j].weight)


def alignment_cost(alignment: Alignment, x: Backbone, y: Backbone) -> float:
    return float(sum(pair_cost(p, x, y) for p in alignment.pairs))


def alignment_max_cost(alignment: Alignment, x: Backbone, y: Backbone) -> float:
    return max((pair_cost(p, x, y) for p in alignment.pairs), default=0.0)

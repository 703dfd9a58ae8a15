"""
alignment/matrix.py
功能：骨架对齐的动态规划：对齐矩阵、回溯、最优对齐枚举、骨架距离 d_B 与 d_B∞。

M[i][j] = min( M[i-1][j] + w(x_i),            # x_i 对 𝟎
               M[i][j-1] + w(y_j),            # 𝟎 对 y_j
               M[i-1][j-1] + |w(x_i)-w(y_j)| ) # 仅当标签相同
"""
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from alignment.backbone import alignment_cost, pair_cost
from core.exceptions import InputError, InvariantViolation
from core.schema import AlignedPair, Alignment, AlignmentMatrix, Backbone

DIAGONAL_FIRST = "diagonal-first"
REL_TOL = 1e-12
ABS_TOL = 1e-15


def _diff(x: Backbone, y: Backbone, i: int, j: int) -> Optional[float]:
    """标签不同返回 None (MISMATCH)，不参与 min"""
    if x[i].label != y[j].label:
        return None
    return abs(x[i].weight - y[j].weight)


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=REL_TOL, abs_tol=ABS_TOL)


def alignment_matrix(x: Backbone, y: Backbone) -> AlignmentMatrix:
    m, n = len(x), len(y)
    M = np.zeros((m + 1, n + 1), dtype=float)
    for i in range(1, m + 1):
        M[i, 0] = M[i - 1, 0] + x[i - 1].weight
    for j in range(1, n + 1):
        M[0, j] = M[0, j - 1] + y[j - 1].weight
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            best = min(M[i - 1, j] + x[i - 1].weight, M[i, j - 1] + y[j - 1].weight)
            d = _diff(x, y, i - 1, j - 1)
            if d is not None:
                best = min(best, M[i - 1, j - 1] + d)
            M[i, j] = best
    return AlignmentMatrix(M, x, y)


def _moves(M: np.ndarray, x: Backbone, y: Backbone, i: int, j: int) -> List[Tuple[int, int, AlignedPair]]:
    """(i, j) 处所有达到最优值的回溯方向，按 对角 > 竖直 (x 插入) > 水平 (y 插入) 排序"""
    here = M[i, j]
    out = []
    if i > 0 and j > 0:
        d = _diff(x, y, i - 1, j - 1)
        if d is not None and _close(here, M[i - 1, j - 1] + d):
            out.append((i - 1, j - 1, (i - 1, j - 1)))
    if i > 0 and _close(here, M[i - 1, j] + x[i - 1].weight):
        out.append((i - 1, j, (i - 1, None)))
    if j > 0 and _close(here, M[i, j - 1] + y[j - 1].weight):
        out.append((i, j - 1, (None, j - 1)))
    return out


def backtrack(matrix: AlignmentMatrix, tie_policy: str = DIAGONAL_FIRST) -> Alignment:
    """从右下角回溯一条最优路径 (确定性)"""
    if tie_policy != DIAGONAL_FIRST:
        raise InputError(f"未知平局策略: {tie_policy}")
    M, x, y = matrix.values, matrix.x, matrix.y
    i, j = len(x), len(y)
    pairs: List[AlignedPair] = []
    while i > 0 or j > 0:
        moves = _moves(M, x, y, i, j)
        if not moves:
            raise InvariantViolation(f"回溯在 ({i}, {j}) 处找不到前驱")
        i, j, pair = moves[0]
        pairs.append(pair)
    return Alignment(tuple(reversed(pairs)))


def enumerate_optimal(matrix: AlignmentMatrix, cap: int = 64) -> Tuple[List[Alignment], bool]:
    """深度优先枚举全部最优回溯路径，至多 cap 条；返回 (对齐列表, 是否被截断)"""
    if cap < 1:
        raise InputError("cap 必须 >= 1")
    M, x, y = matrix.values, matrix.x, matrix.y
    found: List[Alignment] = []
    truncated = False

    stack = [(len(x), len(y), ())]
    while stack:
        i, j, suffix = stack.pop()
        if i == 0 and j == 0:
            if len(found) == cap:
                truncated = True
                break
            found.append(Alignment(suffix))
            continue
        moves = _moves(M, x, y, i, j)
        if not moves:
            raise InvariantViolation(f"枚举在 ({i}, {j}) 处找不到前驱")
        # 逆序压栈，保证第一条结果与 backtrack 一致
        for pi, pj, pair in reversed(moves):
            stack.append((pi, pj, (pair,) + suffix))
    return found, truncated


def backbone_distance(x: Backbone, y: Backbone) -> float:
    return alignment_matrix(x, y).corner


def backbone_infinity_distance(x: Backbone, y: Backbone) -> float:
    """min-max 版本的 DP：每步取 max(前驱值, 本步代价)，三方向取 min"""
    m, n = len(x), len(y)
    D = np.zeros((m + 1, n + 1), dtype=float)
    for i in range(1, m + 1):
        D[i, 0] = max(D[i - 1, 0], x[i - 1].weight)
    for j in range(1, n + 1):
        D[0, j] = max(D[0, j - 1], y[j - 1].weight)
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            best = min(max(D[i - 1, j], x[i - 1].weight), max(D[i, j - 1], y[j - 1].weight))
            d = _diff(x, y, i - 1, j - 1)
            if d is not None:
                best = min(best, max(D[i - 1, j - 1], d))
            D[i, j] = best
    return float(D[m, n])


def alignment_report(alignment: Alignment, x: Backbone, y: Backbone, tie: bool = False) -> Dict[str, Any]:
    pairs = []
    for i, j in alignment.pairs:
        pairs.append({
            "x_index": i,
            "y_index": j,
            "label": x[i].label if i is not None else y[j].label,
            "cost": pair_cost((i, j), x, y),
        })
    return {
        "x": x.name,
        "y": y.name,
        "pairs": pairs,
        "total_cost": alignment_cost(alignment, x, y),
        "tie": tie,
    }

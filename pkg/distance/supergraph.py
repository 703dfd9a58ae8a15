"""
distance/supergraph.py
功能：由两张 DAG 及逐序列的骨架对齐构造极值事件超图 (双权重有向图)。
每个对齐位置一个顶点；(u, v) 为边当且仅当其在任一侧的投影是原 DAG 的边，
投影落在 𝟎 的一侧权重为 0。
"""
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from alignment.backbone import extract_backbone, validate_alignment
from core.exceptions import InputError
from core.schema import (Alignment, ExtremalEventDAG, Supergraph, SupergraphEdge,
                         SupergraphVertex, VertexId)
from utils.file_manager import dumps_json

Key = Tuple[int, int]


def check_same_names(dag_a: ExtremalEventDAG, dag_b: ExtremalEventDAG):
    if set(dag_a.series_names) != set(dag_b.series_names):
        only_a = sorted(set(dag_a.series_names) - set(dag_b.series_names))
        only_b = sorted(set(dag_b.series_names) - set(dag_a.series_names))
        raise InputError(f"两个数据集的序列名不一致: 仅 A 有 {only_a}, 仅 B 有 {only_b}")


def _supergraph_vertices(dag_a: ExtremalEventDAG, dag_b: ExtremalEventDAG,
                         alignments: Mapping[str, Alignment]) -> List[SupergraphVertex]:
    vertices = []
    for pair_index, name in enumerate(dag_a.series_names):
        if name not in alignments:
            raise InputError(f"缺少序列 '{name}' 的对齐")
        xs, ys = dag_a.series_vertices(name), dag_b.series_vertices(name)
        alignment = alignments[name]
        violations = validate_alignment(alignment, extract_backbone(dag_a, name), extract_backbone(dag_b, name))
        if violations:
            raise InputError(f"序列 '{name}' 的对齐不合法: {[v.rule for v in violations]}")
        for position, (i, j) in enumerate(alignment.pairs):
            x_ref: Optional[VertexId] = xs[i].vid if i is not None else None
            y_ref: Optional[VertexId] = ys[j].vid if j is not None else None
            vertices.append(SupergraphVertex(
                pair_index, position, x_ref, y_ref,
                xs[i].weight if i is not None else 0.0,
                ys[j].weight if j is not None else 0.0,
            ))
    return vertices


def _edge_weights(dag_a: ExtremalEventDAG, dag_b: ExtremalEventDAG,
                  vertices: List[SupergraphVertex]) -> Dict[Tuple[Key, Key], List[float]]:
    """E_α = 投影到 E 的边 ∪ 投影到 E' 的边"""
    from_a = {v.x_ref: v.key for v in vertices if v.x_ref is not None}
    from_b = {v.y_ref: v.key for v in vertices if v.y_ref is not None}
    weights: Dict[Tuple[Key, Key], List[float]] = {}
    for e in dag_a.edges:
        weights[(from_a[e.src], from_a[e.dst])] = [e.weight, 0.0]
    for e in dag_b.edges:
        weights.setdefault((from_b[e.src], from_b[e.dst]), [0.0, 0.0])[1] = e.weight
    return weights


def build_supergraph(dag_a: ExtremalEventDAG, dag_b: ExtremalEventDAG,
                     alignments: Mapping[str, Alignment]) -> Supergraph:
    check_same_names(dag_a, dag_b)
    vertices = _supergraph_vertices(dag_a, dag_b, alignments)
    weights = _edge_weights(dag_a, dag_b, vertices)
    edges = tuple(
        SupergraphEdge(src, dst, wa, wb)
        for (src, dst), (wa, wb) in sorted(weights.items())
    )
    return Supergraph(tuple(dag_a.series_names), tuple(vertices), edges)


def aligned_edge_term(dag_a: ExtremalEventDAG, dag_b: ExtremalEventDAG,
                      alignments: Mapping[str, Alignment]) -> float:
    """Σ |ω - ω'| over E_α，不构造完整超图对象"""
    vertices = _supergraph_vertices(dag_a, dag_b, alignments)
    return float(sum(abs(wa - wb) for wa, wb in _edge_weights(dag_a, dag_b, vertices).values()))


def cross_edge_counts(sg: Supergraph) -> Dict[Tuple[int, int], int]:
    """无序对 (i, j), i < j 之间的跨对齐边数 (两个方向都计入)"""
    counts: Dict[Tuple[int, int], int] = {}
    for e in sg.edges:
        i, j = e.src[0], e.dst[0]
        if i != j:
            key = (min(i, j), max(i, j))
            counts[key] = counts.get(key, 0) + 1
    return counts


def export_supergraph(sg: Supergraph) -> str:
    data = {
        "series": list(sg.series_names),
        "vertices": [
            {"pair": v.pair_index, "position": v.position,
             "x": list(v.x_ref) if v.x_ref else None, "y": list(v.y_ref) if v.y_ref else None,
             "weights": [v.weight_a, v.weight_b]}
            for v in sg.vertices
        ],
        "edges": [
            {"src": list(e.src), "dst": list(e.dst), "weights": [e.weight_a, e.weight_b]}
            for e in sg.edges
        ],
    }
    return dumps_json(data)


# ==========================================
# 按序列对分块的边项 (d_ED 主路径)
# ==========================================

@dataclass(frozen=True)
class EdgeTable:
    """DAG 边的稠密矩阵：weights[u, v] 为 u -> v 的边权 (无边为 0)，present 标记边是否存在"""
    offsets: Tuple[int, ...]
    sizes: Tuple[int, ...]
    weights: np.ndarray
    present: np.ndarray

    def block(self, s: int, t: int) -> Tuple[np.ndarray, np.ndarray]:
        rows = slice(self.offsets[s], self.offsets[s] + self.sizes[s])
        cols = slice(self.offsets[t], self.offsets[t] + self.sizes[t])
        return self.weights[rows, cols], self.present[rows, cols]


def edge_table(dag: ExtremalEventDAG) -> EdgeTable:
    """顶点按 (序列, 骨架顺序) 连续编号"""
    order: Dict[VertexId, int] = {}
    offsets, sizes = [], []
    for name in dag.series_names:
        vertices = dag.series_vertices(name)
        offsets.append(len(order))
        sizes.append(len(vertices))
        for v in vertices:
            order[v.vid] = len(order)
    n, m = len(order), len(dag.edges)
    weights = np.zeros((n, n), dtype=float)
    present = np.zeros((n, n), dtype=bool)
    if m:
        src = np.fromiter((order[e.src] for e in dag.edges), dtype=np.intp, count=m)
        dst = np.fromiter((order[e.dst] for e in dag.edges), dtype=np.intp, count=m)
        weights[src, dst] = np.fromiter((e.weight for e in dag.edges), dtype=float, count=m)
        present[src, dst] = True
    return EdgeTable(tuple(offsets), tuple(sizes), weights, present)


def _matched(alignment: Alignment) -> Tuple[np.ndarray, np.ndarray]:
    """对角位置 (x_i, y_j) 的两侧下标"""
    pairs = [(i, j) for i, j in alignment.pairs if i is not None and j is not None]
    return (np.array([i for i, _ in pairs], dtype=np.intp),
            np.array([j for _, j in pairs], dtype=np.intp))


class AlignedEdgeTerms:
    """
    Σ_{E_α} |ω - ω'| 按有序序列对 (s, t) 分块：块 (s, t) 只含 s 的极值指向 t 的极值的边，
    只依赖 α_s 与 α_t。两端都在对角位置的边才可能在 E_α 中合并，其余边各自贡献自身权重。
    """

    def __init__(self, dag_a: ExtremalEventDAG, dag_b: ExtremalEventDAG):
        check_same_names(dag_a, dag_b)
        self.names = list(dag_a.series_names)
        self.index_b = {name: k for k, name in enumerate(dag_b.series_names)}
        self.table_a = edge_table(dag_a)
        self.table_b = edge_table(dag_b)
        self._cache: Dict[Tuple[int, int, Alignment, Alignment], Tuple[float, int]] = {}

    def _block(self, s: int, t: int, alpha_s: Alignment, alpha_t: Alignment) -> Tuple[float, int]:
        key = (s, t, alpha_s, alpha_t)
        if key not in self._cache:
            wa, pa = self.table_a.block(s, t)
            wb, pb = self.table_b.block(self.index_b[self.names[s]], self.index_b[self.names[t]])
            (xs, ys), (xt, yt) = _matched(alpha_s), _matched(alpha_t)
            on_a, on_b = np.ix_(xs, xt), np.ix_(ys, yt)
            merged_a = np.zeros(wa.shape, dtype=bool)
            merged_a[on_a] = True
            merged_b = np.zeros(wb.shape, dtype=bool)
            merged_b[on_b] = True
            term = float(np.abs(wa[on_a] - wb[on_b]).sum() + wa[~merged_a].sum() + wb[~merged_b].sum())
            count = int(pa.sum() + pb.sum() - (pa[on_a] & pb[on_b]).sum())
            self._cache[key] = (term, count)
        return self._cache[key]

    def blocks(self, alignments: Mapping[str, Alignment]) -> Dict[Tuple[int, int], Tuple[float, int]]:
        missing = [n for n in self.names if n not in alignments]
        if missing:
            raise InputError(f"缺少序列 {missing} 的对齐")
        k = len(self.names)
        return {
            (s, t): self._block(s, t, alignments[self.names[s]], alignments[self.names[t]])
            for s in range(k) for t in range(k)
        }

    def edge_term(self, alignments: Mapping[str, Alignment]) -> float:
        return float(sum(term for term, _ in self.blocks(alignments).values()))

    def cross_counts(self, alignments: Mapping[str, Alignment]) -> Dict[Tuple[int, int], int]:
        """同 cross_edge_counts，但不构造超图"""
        counts: Dict[Tuple[int, int], int] = {}
        for (s, t), (_, count) in self.blocks(alignments).items():
            if s != t and count:
                key = (min(s, t), max(s, t))
                counts[key] = counts.get(key, 0) + count
        return counts

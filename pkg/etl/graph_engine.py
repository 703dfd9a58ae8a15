"""
=== 核心模块: etl/graph_engine.py ===
功能：由数据集构建带权极值事件 DAG，并提供 ε-DAG 切片。
  - 顶点：每条序列的每个局部极值，权重 = 节点寿命
  - 边：所有时间严格先后的极值对；同序列边权 = 两端节点寿命的较小者，
        跨序列边权 = min(两端节点寿命, ε*)
跨序列的 ε* 计算是纯 CPU 计算，规模较大时按序列对分发到进程池。
"""
import logging
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from core.exceptions import InputError, InvariantViolation
from core.schema import Dataset, DagEdge, DagVertex, ExtremalEventDAG, VertexId
from ingestion.processors import collapse_dataset
from intervals.extremal_interval import IntervalProfile, interval_profile, profile_intersection
from persistence.extrema import find_extrema
from persistence.merge_tree import node_lives
from utils.workers import run_jobs

logger = logging.getLogger(__name__)

COMPARABLE = "comparable"
VERBATIM = "verbatim"
# 跨序列极值对总数低于该值时不启动进程池
MIN_PARALLEL_PAIRS = 20_000


def eps_star_matrix(profiles_a: Sequence[IntervalProfile], profiles_b: Sequence[IntervalProfile]) -> np.ndarray:
    """两条序列所有极值对的 ε*；同一时刻的极值对不连边，占位为 inf"""
    out = np.full((len(profiles_a), len(profiles_b)), np.inf)
    for i, pu in enumerate(profiles_a):
        for j, pv in enumerate(profiles_b):
            if pu.time != pv.time:
                out[i, j] = profile_intersection(pu, pv)
    return out


class ExtremalEventDAGEngine:
    def __init__(self, max_workers: int = 4, min_parallel_pairs: int = MIN_PARALLEL_PAIRS):
        self.max_workers = max(1, max_workers)
        self.min_parallel_pairs = min_parallel_pairs

    # --- Step 1: 顶点 (极值 + 节点寿命) ---
    @staticmethod
    def _series_vertices(series_index: int, ts) -> Tuple[List[DagVertex], List[IntervalProfile]]:
        lives = node_lives(ts)
        vertices, profiles = [], []
        for ordinal, ext in enumerate(find_extrema(ts), start=1):
            weight = lives.get(ext.index)
            if weight is None or weight <= 0:
                raise InvariantViolation(f"序列 '{ts.name}' 下标 {ext.index} 的节点寿命异常: {weight}")
            vertices.append(DagVertex(series_index, ordinal, ext.label, ext.time, weight, ext.height))
            # 跳变列表按极值缓存，跨序列配对时复用
            profiles.append(interval_profile(ts, ext.index))
        return vertices, profiles

    # --- Step 2: 同序列边 ---
    @staticmethod
    def _same_series_edges(vertices: List[DagVertex]) -> List[DagEdge]:
        ids = [v.vid for v in vertices]
        return [
            DagEdge(ids[a], ids[b], min(vertices[a].weight, vertices[b].weight))
            for a, b in combinations(range(len(vertices)), 2)
        ]

    # --- Step 3: 跨序列 ε* (可并行) ---
    def _eps_star_matrices(self, profiles: List[List[IntervalProfile]]) -> Dict[Tuple[int, int], np.ndarray]:
        pairs = list(combinations(range(len(profiles)), 2))
        workload = sum(len(profiles[i]) * len(profiles[j]) for i, j in pairs)
        workers = self.max_workers if workload >= self.min_parallel_pairs else 1
        matrices = run_jobs(eps_star_matrix, [(profiles[i], profiles[j]) for i, j in pairs], workers)
        logger.debug(f"🔧 ε* 计算完成: {len(pairs)} 个序列对, {workload} 个极值对, {workers} 个进程")
        return dict(zip(pairs, matrices))

    # --- Step 4: 跨序列边 ---
    @staticmethod
    def _cross_series_edges(va: List[DagVertex], vb: List[DagVertex], eps_star: np.ndarray) -> List[DagEdge]:
        lives = np.minimum.outer([u.weight for u in va], [v.weight for v in vb])
        weights = np.minimum(lives, eps_star).tolist()
        ids_b = [(v.vid, v.time) for v in vb]
        edges = []
        for u, row in zip(va, weights):
            u_id, u_time = u.vid, u.time
            for (v_id, v_time), weight in zip(ids_b, row):
                if u_time < v_time:
                    edges.append(DagEdge(u_id, v_id, weight))
                elif v_time < u_time:
                    edges.append(DagEdge(v_id, u_id, weight))
        return edges

    def build(self, ds: Dataset, grid_name: Optional[str] = None) -> ExtremalEventDAG:
        collapsed, warnings = collapse_dataset(ds)
        if warnings:
            logger.warning(f"⚠️ 去平台处理了 {len(warnings)} 段平台")

        per_series = [self._series_vertices(k, ts) for k, ts in enumerate(collapsed.series)]
        edges: List[DagEdge] = []
        for vertices, _ in per_series:
            edges.extend(self._same_series_edges(vertices))

        matrices = self._eps_star_matrices([profiles for _, profiles in per_series])
        for (i, j), eps_star in matrices.items():
            edges.extend(self._cross_series_edges(per_series[i][0], per_series[j][0], eps_star))

        # (src, dst) 唯一，元组序即边序
        edges.sort()
        vertices = [v for vs, _ in per_series for v in vs]
        dag = ExtremalEventDAG(tuple(collapsed.names), tuple(vertices), tuple(edges), grid_name)
        logger.info(f"✅ DAG 构建完成: {len(vertices)} 节点, {len(edges)} 边")
        return dag


def build_dag(ds: Dataset, max_workers: int = 4, grid_name: Optional[str] = None) -> ExtremalEventDAG:
    return ExtremalEventDAGEngine(max_workers=max_workers).build(ds, grid_name)


def epsilon_slice(dag: ExtremalEventDAG, eps: float, mode: str = COMPARABLE) -> ExtremalEventDAG:
    """
    comparable (默认): 保留权重 > eps 的顶点与边，即在 ε 尺度下先后关系仍确定的部分；
    verbatim: 保留权重 <= eps 的顶点与边 (两端点都保留的边)。
    """
    if eps < 0:
        raise InputError(f"eps 必须 >= 0: {eps}")
    if mode == COMPARABLE:
        keep = lambda w: w > eps
    elif mode == VERBATIM:
        keep = lambda w: w <= eps
    else:
        raise InputError(f"未知切片模式: {mode}")

    vertices = tuple(v for v in dag.vertices if keep(v.weight))
    kept_ids = {v.vid for v in vertices}
    edges = tuple(
        e for e in dag.edges
        if keep(e.weight) and e.src in kept_ids and e.dst in kept_ids
    )
    return ExtremalEventDAG(dag.series_names, vertices, edges, dag.grid_name)


def to_networkx(dag: ExtremalEventDAG) -> nx.DiGraph:
    graph = nx.DiGraph()
    for v in dag.vertices:
        graph.add_node(v.vid, series=dag.series_names[v.series_index], label=v.label,
                       time=v.time, weight=v.weight)
    for e in dag.edges:
        graph.add_edge(e.src, e.dst, weight=e.weight)
    return graph


def check_dag(dag: ExtremalEventDAG) -> List[str]:
    """结构自检：无环、边严格按时间、边权不超过端点权重、边集完备"""
    problems = []
    vmap: Dict[VertexId, DagVertex] = dag.vertex_map()
    graph = to_networkx(dag)
    if not nx.is_directed_acyclic_graph(graph):
        problems.append("图中存在环")
    for e in dag.edges:
        u, v = vmap[e.src], vmap[e.dst]
        if not u.time < v.time:
            problems.append(f"边 {e.src}->{e.dst} 不满足时间严格先后")
        if e.weight > min(u.weight, v.weight):
            problems.append(f"边 {e.src}->{e.dst} 权重 {e.weight} 超过端点节点寿命")
    expected = sum(1 for u, v in combinations(dag.vertices, 2) if u.time != v.time)
    if expected != len(dag.edges):
        problems.append(f"边数 {len(dag.edges)} 与时间有序对数 {expected} 不符")
    return problems

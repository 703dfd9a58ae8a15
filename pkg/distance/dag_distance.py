"""
distance/dag_distance.py
功能：极值事件 DAG 距离 d_ED 与局部稳定性上界。
  d_ED = Σ_i d_B(x_i, y_i) + min_{最优对齐组合} Σ_{E_α} |ω - ω'|
"""
import logging
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Tuple

from alignment.backbone import extract_backbone
from alignment.matrix import DIAGONAL_FIRST, alignment_matrix, backtrack, enumerate_optimal
from core.config import TIE_POLICIES
from core.exceptions import InputError
from core.schema import Alignment, Dataset, DistanceReport, ExtremalEventDAG
from distance.supergraph import AlignedEdgeTerms, check_same_names
from etl.graph_engine import build_dag
from ingestion.processors import collapse_plateaus, sup_distance
from persistence.diagram import EXTREMELY_CLOSE, closeness_level, diagram_delta
from persistence.extrema import find_extrema
from utils.file_manager import dumps_json

logger = logging.getLogger(__name__)

DEFAULT_PAIR_CAP = 64
DEFAULT_TOTAL_CAP = 1024


@dataclass
class AlignmentChoice:
    """一对骨架的 d_B、候选最优对齐与平局/截断标记"""
    distance: float
    candidates: List[Alignment]
    canonical: Alignment
    truncated: bool

    @property
    def tie(self) -> bool:
        return len(self.candidates) > 1 or self.truncated


@dataclass
class DistanceContext:
    dag_a: ExtremalEventDAG
    dag_b: ExtremalEventDAG
    edge_terms: AlignedEdgeTerms
    choices: Dict[str, AlignmentChoice] = field(default_factory=dict)
    chosen: Dict[str, Alignment] = field(default_factory=dict)
    edge_term: float = 0.0
    truncated: bool = False


class DagDistanceService:
    def __init__(self, pair_cap: int = DEFAULT_PAIR_CAP, total_cap: int = DEFAULT_TOTAL_CAP,
                 max_workers: int = 4, tie_policy: str = DIAGONAL_FIRST):
        if pair_cap < 1 or total_cap < 1:
            raise InputError("cap 必须 >= 1")
        if tie_policy not in TIE_POLICIES:
            raise InputError(f"未知平局策略: {tie_policy}")
        self.pair_cap = pair_cap
        self.total_cap = total_cap
        self.max_workers = max(1, max_workers)
        self.tie_policy = tie_policy

    # --- Step 1: 逐序列骨架对齐 ---
    def _align(self, dag_a: ExtremalEventDAG, dag_b: ExtremalEventDAG, name: str) -> AlignmentChoice:
        matrix = alignment_matrix(extract_backbone(dag_a, name), extract_backbone(dag_b, name))
        candidates, truncated = enumerate_optimal(matrix, self.pair_cap)
        return AlignmentChoice(matrix.corner, candidates, backtrack(matrix, self.tie_policy), truncated)

    # --- Step 2: 在最优对齐组合上最小化边项 ---
    def _minimize_edges(self, ctx: DistanceContext):
        names = list(ctx.dag_a.series_names)
        sizes = [len(ctx.choices[n].candidates) for n in names]
        if any(ctx.choices[n].truncated for n in names) or math.prod(sizes) > self.total_cap:
            ctx.truncated = True
            ctx.chosen = {n: ctx.choices[n].canonical for n in names}
            ctx.edge_term = ctx.edge_terms.edge_term(ctx.chosen)
            logger.warning(f"⚠️ 最优对齐组合数超过上限 ({sizes})，改用确定性回溯对齐")
            return

        combos = [dict(zip(names, combo))
                  for combo in product(*(ctx.choices[n].candidates for n in names))]
        terms = [ctx.edge_terms.edge_term(c) for c in combos]
        # 并列时取枚举顺序中的第一个
        best = min(range(len(combos)), key=lambda k: (terms[k], k))
        ctx.chosen = combos[best]
        ctx.edge_term = terms[best]

    def context(self, dag_a: ExtremalEventDAG, dag_b: ExtremalEventDAG) -> DistanceContext:
        check_same_names(dag_a, dag_b)
        ctx = DistanceContext(dag_a, dag_b, AlignedEdgeTerms(dag_a, dag_b))
        for name in dag_a.series_names:
            ctx.choices[name] = self._align(dag_a, dag_b, name)
        self._minimize_edges(ctx)
        return ctx

    def compare_dags(self, dag_a: ExtremalEventDAG, dag_b: ExtremalEventDAG) -> DistanceReport:
        ctx = self.context(dag_a, dag_b)
        return self._report(ctx)

    @staticmethod
    def _report(ctx: DistanceContext) -> DistanceReport:
        per_pair = {n: c.distance for n, c in ctx.choices.items()}
        node_term = float(sum(per_pair.values()))
        return DistanceReport(
            total=node_term + ctx.edge_term,
            node_term=node_term,
            edge_term=ctx.edge_term,
            backbone_distances=per_pair,
            alignments={n: list(a.pairs) for n, a in ctx.chosen.items()},
            tie_flags={n: c.tie for n, c in ctx.choices.items()},
            truncated=ctx.truncated,
        )

    def compare(self, ds_a: Dataset, ds_b: Dataset, with_bound: bool = True) -> DistanceReport:
        if set(ds_a.names) != set(ds_b.names):
            raise InputError(f"两个数据集的序列名不一致: {sorted(ds_a.names)} vs {sorted(ds_b.names)}")
        dag_a = build_dag(ds_a, max_workers=self.max_workers)
        dag_b = build_dag(ds_b, max_workers=self.max_workers)
        ctx = self.context(dag_a, dag_b)
        report = self._report(ctx)
        if with_bound and _same_grid(ds_a, ds_b):
            report.stability_bound = _bound_from_context(ds_a, ds_b, ctx).bound
        logger.info(f"📐 d_ED = {report.total:.6g} (节点项 {report.node_term:.6g} + 边项 {report.edge_term:.6g})")
        return report


def dag_distance(ds_a: Dataset, ds_b: Dataset, cap: int = DEFAULT_PAIR_CAP,
                 total_cap: int = DEFAULT_TOTAL_CAP, max_workers: int = 4) -> DistanceReport:
    return DagDistanceService(cap, total_cap, max_workers).compare(ds_a, ds_b)


# ==========================================
# 稳定性上界
# ==========================================

@dataclass
class StabilityAssessment:
    bound: Optional[float]
    epsilons: Dict[str, float]
    deltas: Dict[str, float]
    extrema_counts: Dict[str, int]
    cross_edges: Dict[Tuple[str, str], int]
    closeness: Dict[str, str] = field(default_factory=dict)


def _same_grid(ds_a: Dataset, ds_b: Dataset) -> bool:
    return ds_a.grid == ds_b.grid


def _bound_from_context(ds_a: Dataset, ds_b: Dataset, ctx: DistanceContext) -> StabilityAssessment:
    names = list(ctx.dag_a.series_names)
    epsilons, deltas, counts = {}, {}, {}
    for name in names:
        f, f_prime = ds_a.get(name), ds_b.get(name)
        epsilons[name] = sup_distance(f, f_prime)
        deltas[name] = diagram_delta(collapse_plateaus(f)[0])
        counts[name] = len(find_extrema(collapse_plateaus(f_prime)[0]))

    cross = {(names[i], names[j]): c for (i, j), c in ctx.edge_terms.cross_counts(ctx.chosen).items()}
    closeness = {n: closeness_level(epsilons[n], deltas[n]) for n in names}

    # 前提: 每条序列都 extremely close (ε_i < δ_{f_i} / 2)
    if any(closeness[n] != EXTREMELY_CLOSE for n in names):
        logger.info(f"ℹ️ 扰动超出 extremely close 范围，不给出上界: {closeness}")
        return StabilityAssessment(None, epsilons, deltas, counts, cross, closeness)

    bound = sum(counts[n] * epsilons[n] for n in names)
    bound += sum(math.comb(counts[n], 2) * epsilons[n] for n in names)
    bound += sum(c * max(epsilons[a], epsilons[b]) for (a, b), c in cross.items())
    return StabilityAssessment(float(bound), epsilons, deltas, counts, cross, closeness)


def stability_assessment(ds_a: Dataset, ds_b: Dataset, cap: int = DEFAULT_PAIR_CAP,
                         total_cap: int = DEFAULT_TOTAL_CAP) -> StabilityAssessment:
    if not _same_grid(ds_a, ds_b):
        raise InputError("稳定性上界要求两个数据集使用相同的时间网格")
    if set(ds_a.names) != set(ds_b.names):
        raise InputError("两个数据集的序列名不一致")
    service = DagDistanceService(cap, total_cap)
    ctx = service.context(build_dag(ds_a), build_dag(ds_b))
    return _bound_from_context(ds_a, ds_b, ctx)


def stability_bound(ds_a: Dataset, ds_b: Dataset) -> Optional[float]:
    """满足 extremely close 前提时返回上界，否则返回 None"""
    return stability_assessment(ds_a, ds_b).bound


def distance_report_json(report: DistanceReport) -> str:
    return dumps_json(report.to_dict())

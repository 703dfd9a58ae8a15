"""
persistence/diagram.py
功能：0 维持久图 (下水平集 / 上水平集)、CSV 导出，以及稳定性判定所需的常数 δ_f。
"""
import logging
from typing import List

import numpy as np
import pandas as pd

from core.exceptions import InputError
from core.schema import INF, PersistencePoint, TimeSeries
from ingestion.processors import sup_distance
from persistence.merge_tree import merge_tree
from utils.file_manager import float_text

logger = logging.getLogger(__name__)

SUBLEVEL = "sublevel"
SUPERLEVEL = "superlevel"

EXTREMELY_CLOSE = "extremely_close"
VERY_CLOSE = "very_close"
NOT_CLOSE = "not_close"


def persistence_diagram(ts: TimeSeries, which: str = SUBLEVEL) -> List[PersistencePoint]:
    """上水平集版本读取 -ts 的三元组，出生/死亡值也按 -ts 计"""
    if which not in (SUBLEVEL, SUPERLEVEL):
        raise InputError(f"未知持久图类型: {which}")
    source = ts if which == SUBLEVEL else ts.negated()
    h = source.heights
    points = [
        PersistencePoint(birth=h[t.u], death=INF if t.is_essential else h[t.s], minimum_index=t.u)
        for t in merge_tree(source)
    ]
    return sorted(points, key=lambda p: p.minimum_index)


def export_diagram_csv(points: List[PersistencePoint]) -> str:
    frame = pd.DataFrame({
        "birth": [p.birth for p in points],
        "death": ["inf" if p.is_essential else float_text(p.death) for p in points],
        "index": [p.minimum_index for p in points],
    })
    return frame.to_csv(index=False, lineterminator="\n", float_format=float_text)


def _half_min_gap(points: List[PersistencePoint], top: float) -> float:
    """
    δ = 1/2 · min(‖p-q‖∞ , p 到对角线的距离 pers/2)。
    本质点截断为 (birth, top)，与节点寿命的约定一致。
    """
    births = np.array([p.birth for p in points], dtype=float)
    deaths = np.array([top if p.is_essential else p.death for p in points], dtype=float)
    to_diagonal = (deaths - births) / 2
    best = float(to_diagonal.min())
    if len(points) > 1:
        gaps = np.maximum(np.abs(births[:, None] - births[None, :]), np.abs(deaths[:, None] - deaths[None, :]))
        np.fill_diagonal(gaps, np.inf)
        best = min(best, float(gaps.min()))
    return best / 2


def diagram_delta(ts: TimeSeries) -> float:
    """δ_f = min(δ_min, δ_max)"""
    h = ts.array()
    delta_min = _half_min_gap(persistence_diagram(ts, SUBLEVEL), float(h.max()))
    delta_max = _half_min_gap(persistence_diagram(ts, SUPERLEVEL), float(-h.min()))
    return min(delta_min, delta_max)


def closeness_level(eps: float, delta: float) -> str:
    """eps < δ/2 为 extremely close，< δ 为 very close"""
    if eps < delta / 2:
        return EXTREMELY_CLOSE
    if eps < delta:
        return VERY_CLOSE
    return NOT_CLOSE


def classify_closeness(f: TimeSeries, f_prime: TimeSeries) -> str:
    return closeness_level(sup_distance(f, f_prime), diagram_delta(f))

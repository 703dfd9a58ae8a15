"""
ingestion/processors.py
功能：序列预处理原子能力：去平台、幅值归一化、有界扰动、L∞ 距离。
"""
import logging
from typing import List, Tuple

import numpy as np

from core.exceptions import InputError
from core.schema import Dataset, TimeSeries

logger = logging.getLogger(__name__)


def collapse_plateaus(ts: TimeSeries) -> Tuple[TimeSeries, List[str]]:
    """
    每段相等的连续高度只保留第一个样本，网格视图同步裁剪。
    返回 (新序列, 警告列表)；常数序列直接报错。
    """
    heights, times = ts.heights, ts.times
    keep = [0]
    warnings = []
    run_start = 0
    for k in range(1, len(heights)):
        if heights[k] == heights[k - 1]:
            continue
        if k - 1 > run_start:
            warnings.append(
                f"序列 '{ts.name}': 时间 {times[run_start]}..{times[k - 1]} 上高度恒为 "
                f"{heights[run_start]}，已合并为 1 个样本"
            )
        keep.append(k)
        run_start = k
    if len(heights) - 1 > run_start:
        warnings.append(
            f"序列 '{ts.name}': 时间 {times[run_start]}..{times[-1]} 上高度恒为 "
            f"{heights[run_start]}，已合并为 1 个样本"
        )

    if len(keep) < 2:
        raise InputError(f"序列 '{ts.name}' 是常数序列，无法提取极值")
    for msg in warnings:
        logger.warning(f"⚠️ {msg}")
    if len(keep) == len(heights):
        return ts, []
    return TimeSeries(ts.name, tuple(heights[k] for k in keep), tuple(times[k] for k in keep)), warnings


def collapse_dataset(ds: Dataset) -> Tuple[Dataset, List[str]]:
    """对数据集中每条序列去平台"""
    collapsed, warnings = [], []
    for ts in ds.series:
        new_ts, msgs = collapse_plateaus(ts)
        collapsed.append(new_ts)
        warnings.extend(msgs)
    return Dataset(ds.grid, tuple(collapsed), plateaus_collapsed=True), warnings


def normalize_amplitude(ds: Dataset, lo: float, hi: float) -> Dataset:
    """逐条序列做仿射变换，使最小值映到 lo、最大值映到 hi"""
    if not lo < hi:
        raise InputError(f"归一化区间非法: lo={lo}, hi={hi}")
    out = []
    for ts in ds.series:
        h = ts.array()
        h_min, h_max = float(h.min()), float(h.max())
        if h_min == h_max:
            raise InputError(f"序列 '{ts.name}' 是常数序列，无法归一化")
        if h_min == lo and h_max == hi:
            out.append(ts)
            continue
        scaled = (h - h_min) / (h_max - h_min) * (hi - lo) + lo
        # 端点精确落在 lo/hi
        scaled[h == h_min] = lo
        scaled[h == h_max] = hi
        out.append(ts.with_heights(scaled))
    return ds.replace_series(out)


def perturb_dataset(ds: Dataset, eta: float, seed: int) -> Dataset:
    """每个样本加 [-eta, eta] 上的均匀噪声 (PCG64, 可复现)"""
    if eta < 0:
        raise InputError(f"扰动幅度必须 >= 0: {eta}")
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    for ts in ds.series:
        noise = rng.uniform(-eta, eta, size=len(ts))
        out.append(ts.with_heights(ts.array() + noise))
    return ds.replace_series(out)


def sup_distance(a: TimeSeries, b: TimeSeries) -> float:
    """同网格上两条分段线性插值函数的 L∞ 距离 (等于网格点上的最大差)"""
    if a.times != b.times:
        raise InputError(f"序列 '{a.name}' 与 '{b.name}' 的网格不同，无法计算 L∞ 距离")
    return float(np.max(np.abs(a.array() - b.array())))

"""
persistence/extrema.py
功能：提取去平台序列的局部极值 (含两个端点)，标签严格 min/max 交替。
"""
from typing import List

from core.exceptions import InputError
from core.schema import MAX, MIN, Extremum, TimeSeries


def find_extrema(ts: TimeSeries) -> List[Extremum]:
    h = ts.heights
    n = len(h)
    if n < 2:
        raise InputError(f"序列 '{ts.name}' 少于 2 个样本")
    for k in range(1, n):
        if h[k] == h[k - 1]:
            raise InputError(f"序列 '{ts.name}' 在时间 {ts.times[k]} 处存在平台，请先 collapse_plateaus")

    out = [Extremum(0, ts.times[0], h[0], MIN if h[0] < h[1] else MAX)]
    for i in range(1, n - 1):
        if h[i] < h[i - 1] and h[i] < h[i + 1]:
            out.append(Extremum(i, ts.times[i], h[i], MIN))
        elif h[i] > h[i - 1] and h[i] > h[i + 1]:
            out.append(Extremum(i, ts.times[i], h[i], MAX))
    out.append(Extremum(n - 1, ts.times[-1], h[-1], MIN if h[-1] < h[-2] else MAX))
    return out

"""
intervals/extremal_interval.py
功能：离散 ε-极值区间 d_ε(t)、端点跳变值 (jump list)，以及两条序列上两个极值的区间相交阈值 ε*。

约定：
  - 区间在 [a, b] 内相对开；区间端点落在所属序列的网格点上 (或区间到达定义域边界)。
  - ε 恰好等于某个跳变值 J 时，新的网格点尚未被包含；ε* 报告为下确界 J 本身。
"""
import bisect
import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

from core.exceptions import InputError, InvariantViolation
from core.schema import MAX, MIN, DiscreteInterval, TimeSeries

logger = logging.getLogger(__name__)


def extremum_label(ts: TimeSeries, index: int) -> str:
    """返回 index 处极值的标签；不是极值则报错"""
    h, n = ts.heights, len(ts)
    if not 0 <= index < n:
        raise InputError(f"下标 {index} 超出序列 '{ts.name}' 的范围")
    neighbours = [h[j] for j in (index - 1, index + 1) if 0 <= j < n]
    if all(h[index] < x for x in neighbours):
        return MIN
    if all(h[index] > x for x in neighbours):
        return MAX
    raise InputError(f"序列 '{ts.name}' 在下标 {index} 处不是局部极值")


def _inside(label: str, h_t: float, h_j: float, eps: float) -> bool:
    # min: f - ε < f(t) + ε ; max: f + ε > f(t) - ε
    if label == MIN:
        return h_j < h_t + 2 * eps
    return h_j > h_t - 2 * eps


def extremal_interval(ts: TimeSeries, index: int, eps: float) -> DiscreteInterval:
    """
    对分段线性插值求 φ_ε(t) 所在连通分量，再把两端向外扩到最近网格点。
    eps = 0 按 ε→0+ 处理，即 (z_{i-1}, z_{i+1})。
    """
    if eps < 0:
        raise InputError(f"eps 必须 >= 0: {eps}")
    label = extremum_label(ts, index)
    h, z, n = ts.heights, ts.times, len(ts)

    r = index
    while r + 1 < n and _inside(label, h[index], h[r + 1], eps):
        r += 1
    l = index
    while l - 1 >= 0 and _inside(label, h[index], h[l - 1], eps):
        l -= 1
    right = z[r + 1] if r + 1 < n else z[n - 1]
    left = z[l - 1] if l - 1 >= 0 else z[0]
    return DiscreteInterval(left, right)


def _jump_steps(ts: TimeSeries, index: int, step: int) -> Tuple[List[float], List[int]]:
    """
    沿 step (+1 向右 / -1 向左) 扫描：返回 (跳变值列表, 触发跳变的网格下标)。
    第一个跳变来自相邻点，之后只有越过当前"屏障"高度的点才追加跳变。
    """
    h, n = ts.heights, len(ts)
    label = extremum_label(ts, index)
    first = index + step
    if not 0 <= first < n:
        return [], []
    jumps = [abs(h[first] - h[index]) / 2]
    triggers = [first]
    barrier = h[first]
    j = first + step
    while 0 <= j < n:
        if (label == MIN and h[j] >= barrier) or (label == MAX and h[j] <= barrier):
            jumps.append(abs(h[j] - h[index]) / 2)
            triggers.append(j)
            barrier = h[j]
        j += step
    return jumps, triggers


def eps_jumps_right(ts: TimeSeries, index: int) -> List[float]:
    return _jump_steps(ts, index, +1)[0]


def eps_jumps_left(ts: TimeSeries, index: int) -> List[float]:
    return _jump_steps(ts, index, -1)[0]


def eps_jumps(ts: TimeSeries, index: int) -> List[float]:
    return sorted(eps_jumps_left(ts, index) + eps_jumps_right(ts, index))


@dataclass(frozen=True)
class IntervalProfile:
    """
    一个极值的区间端点随 ε 的阶梯函数。
    right_times[k] 是 ε 落在 (right_jumps[k-1], right_jumps[k]] 时的右端点 (k=0 时 ε ≤ right_jumps[0])；
    left 同理，端点随 ε 单调外扩。
    """
    time: float
    domain: Tuple[float, float]
    right_jumps: Tuple[float, ...]
    right_times: Tuple[float, ...]
    left_jumps: Tuple[float, ...]
    left_times: Tuple[float, ...]

    def right_at(self, eps: float) -> float:
        return self.right_times[bisect.bisect_left(self.right_jumps, eps)]

    def left_at(self, eps: float) -> float:
        return self.left_times[bisect.bisect_left(self.left_jumps, eps)]

    def interval_at(self, eps: float) -> DiscreteInterval:
        return DiscreteInterval(self.left_at(eps), self.right_at(eps))

    @property
    def right_thresholds(self) -> Tuple[float, ...]:
        return (0.0,) + self.right_jumps

    @property
    def left_thresholds(self) -> Tuple[float, ...]:
        return (0.0,) + self.left_jumps


def interval_profile(ts: TimeSeries, index: int) -> IntervalProfile:
    z, n = ts.times, len(ts)
    r_jumps, r_triggers = _jump_steps(ts, index, +1)
    l_jumps, l_triggers = _jump_steps(ts, index, -1)
    right_pos = r_triggers + [n - 1]
    left_pos = l_triggers + [0]
    return IntervalProfile(
        time=z[index],
        domain=ts.domain,
        right_jumps=tuple(r_jumps),
        right_times=tuple(z[p] for p in right_pos),
        left_jumps=tuple(l_jumps),
        left_times=tuple(z[p] for p in left_pos),
    )


def profile_intersection(pa: IntervalProfile, pb: IntervalProfile) -> float:
    """
    两个区间相交 ⇔ 较早极值的右端点 > 较晚极值的左端点。
    右端点随 ε 右移、左端点随 ε 左移，双指针找使二者越过的最小阈值。
    """
    if pa.time == pb.time:
        return 0.0
    if pa.time > pb.time:
        pa, pb = pb, pa

    r_eps, r_pos = pa.right_thresholds, pa.right_times
    l_eps, l_pos = pb.left_thresholds, pb.left_times
    n_left = len(l_pos)

    m = 0
    while m < n_left and l_pos[m] >= r_pos[0]:
        m += 1
    best = math.inf
    for k in range(len(r_pos)):
        if r_eps[k] >= best:
            break
        while m > 0 and l_pos[m - 1] < r_pos[k]:
            m -= 1
        if m < n_left:
            best = min(best, max(r_eps[k], l_eps[m]))

    if best == math.inf and pa.domain == pb.domain:
        raise InvariantViolation("同一定义域上两个极值区间始终不相交")
    return best


def eps_intersection(a: TimeSeries, ta: int, b: TimeSeries, tb: int) -> float:
    """ε*: 两个极值的离散 ε-极值区间开始相交的最小 ε (下确界)"""
    return profile_intersection(interval_profile(a, ta), interval_profile(b, tb))

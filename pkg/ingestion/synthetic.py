"""
ingestion/synthetic.py
功能：合成正弦/余弦测试数据 (可加局部噪声凸起或逐点均匀噪声)，用于复现示例图与基线实验。
随机数统一使用 numpy PCG64，固定 seed 时跨平台可复现。
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import List, Sequence

import numpy as np

from core.exceptions import InputError
from core.schema import Dataset, TimeGrid, TimeSeries

logger = logging.getLogger(__name__)

KINDS = ("sine", "cosine")
# 每个噪声凸起修改 2 个样本，需要两侧各有单调的缓冲
_BUMP_WINDOW = 6


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str = "sine"
    amplitude: float = 1.0
    phase: float = 0.0
    noise_amplitude: float = 0.0
    n_points: int = 1001
    n_noise_bumps: int = 0
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"未知波形: {self.kind} (可选 {KINDS})")
        if self.n_points < 8:
            raise InputError(f"n_points 至少为 8，当前 {self.n_points}")
        if self.amplitude <= 0:
            raise InputError("amplitude 必须 > 0")
        if self.noise_amplitude < 0 or self.n_noise_bumps < 0:
            raise InputError("噪声参数不能为负")

    @property
    def series_name(self) -> str:
        return self.name or self.kind


def _pure_signal(spec: SyntheticSpec, z: np.ndarray) -> np.ndarray:
    wave = np.sin if spec.kind == "sine" else np.cos
    return spec.amplitude * wave(z + spec.phase)


def _add_bumps(pure: np.ndarray, spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    """
    在严格单调的片段上做两点反转 (h[k+1] 抬高、h[k+2] 压低，下降段反之)，
    每个凸起恰好新增一对 min/max。
    """
    heights = pure.copy()
    d = np.sign(np.diff(pure))
    n = len(pure)
    # k-1 .. k+4 严格单调且同向
    eligible = [
        k for k in range(1, n - 4)
        if d[k - 1] != 0 and np.all(d[k - 1:k + 4] == d[k - 1])
    ]
    chosen: List[int] = []
    for k in rng.permutation(eligible):
        if all(abs(int(k) - c) >= _BUMP_WINDOW for c in chosen):
            chosen.append(int(k))
        if len(chosen) == spec.n_noise_bumps:
            break
    if len(chosen) < spec.n_noise_bumps:
        logger.warning(f"⚠️ 只能放下 {len(chosen)}/{spec.n_noise_bumps} 个噪声凸起 (n_points 过小)")

    for k in sorted(chosen):
        gap = abs(pure[k + 2] - pure[k + 1])
        delta = gap / 2 + rng.uniform(0.5, 1.0) * spec.noise_amplitude
        direction = d[k - 1]
        heights[k + 1] += direction * delta
        heights[k + 2] -= direction * delta
    return heights


def _add_noise(pure: np.ndarray, spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    """n_noise_bumps > 0 时放置局部凸起，否则逐点加 [-A, A] 均匀噪声"""
    if spec.noise_amplitude == 0:
        return pure.copy()
    if spec.n_noise_bumps == 0:
        return pure + rng.uniform(-spec.noise_amplitude, spec.noise_amplitude, size=len(pure))
    return _add_bumps(pure, spec, rng)


def _generate_series(spec: SyntheticSpec, rng: np.random.Generator) -> TimeSeries:
    z = np.linspace(0.0, 2 * math.pi, spec.n_points)
    heights = _add_noise(_pure_signal(spec, z), spec, rng)
    return TimeSeries(spec.series_name, tuple(float(h) for h in heights), tuple(float(t) for t in z))


def generate_synthetic(spec: SyntheticSpec, seed: int) -> Dataset:
    """单条合成序列组成的数据集，网格为 [0, 2π] 上 n_points 个等距点"""
    return synthesize_collection([spec], seed)


def synthesize_collection(specs: Sequence[SyntheticSpec], seed: int) -> Dataset:
    """多条合成序列 (共享网格)；第 k 条序列的随机流由 (seed, k) 派生"""
    if not specs:
        raise InputError("至少需要一条合成序列")
    sizes = {s.n_points for s in specs}
    if len(sizes) != 1:
        raise InputError(f"同一数据集内 n_points 必须一致: {sorted(sizes)}")
    series = []
    for k, spec in enumerate(specs):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, k])))
        series.append(_generate_series(spec, rng))
    grid = TimeGrid(series[0].times)
    return Dataset(grid, tuple(series))


def phase_locked_specs(n_series: int = 4, amplitude: float = 0.5, noise_amplitude: float = 0.0,
                       n_points: int = 129, n_noise_bumps: int = 0) -> List[SyntheticSpec]:
    """相位错开 k·π/n_series 的一组正弦，用作有时序结构的基线数据"""
    if n_series < 1:
        raise InputError("n_series 必须 >= 1")
    base = SyntheticSpec(kind="sine", amplitude=amplitude, noise_amplitude=noise_amplitude,
                         n_points=n_points, n_noise_bumps=n_noise_bumps)
    return [replace(base, phase=k * math.pi / n_series, name=f"s{k + 1}") for k in range(n_series)]

"""
conftest.py
测试公共夹具：小型手工序列、sin/cos 示例数据集、随机骨架生成器。
"""
import numpy as np
import pytest

from core.schema import MAX, MIN, Backbone, Dataset, TimeGrid, TimeSeries
from ingestion.synthetic import SyntheticSpec, synthesize_collection


def make_series(heights, name="s", times=None) -> TimeSeries:
    heights = tuple(float(h) for h in heights)
    times = tuple(float(t) for t in (times if times is not None else range(len(heights))))
    return TimeSeries(name, heights, times)


def make_dataset(columns: dict, times=None) -> Dataset:
    """{name: heights} -> Dataset (共享网格)"""
    n = len(next(iter(columns.values())))
    times = tuple(float(t) for t in (times if times is not None else range(n)))
    series = tuple(make_series(h, name, times) for name, h in columns.items())
    return Dataset(TimeGrid(times), series)


def random_backbone(rng: np.random.Generator, max_len: int = 5, grid=None) -> Backbone:
    """标签交替的随机骨架；grid 给定时权重从 grid 中抽取 (便于构造精确平局)"""
    length = int(rng.integers(0, max_len + 1))
    first = MIN if rng.random() < 0.5 else MAX
    other = MAX if first == MIN else MIN
    pairs = []
    for k in range(length):
        w = float(rng.choice(grid)) if grid is not None else float(rng.uniform(0.01, 1.0))
        pairs.append((first if k % 2 == 0 else other, w))
    return Backbone.of(pairs)


def random_plateau_free(rng: np.random.Generator, n: int, name: str = "s", times=None) -> TimeSeries:
    """连续分布的高度，几乎必然没有平台"""
    return make_series(rng.normal(size=n), name, times)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240501))


@pytest.fixture(scope="session")
def sin_cos_dataset() -> Dataset:
    """[0, 2π] 上 1001 个等距点的 sin 与 cos，无噪声"""
    specs = [SyntheticSpec(kind="sine", n_points=1001), SyntheticSpec(kind="cosine", n_points=1001)]
    return synthesize_collection(specs, seed=0)


@pytest.fixture
def sine_backbones():
    """两组带噪声正弦的骨架，差别在于小噪声极值的位置"""
    x = Backbone.of([(MIN, 0.25), (MAX, 0.5), (MIN, 0.5), (MAX, 0.016), (MIN, 0.016), (MAX, 0.25)], "sine-1")
    y = Backbone.of([(MIN, 0.25), (MAX, 0.042), (MIN, 0.042), (MAX, 0.5), (MIN, 0.5), (MAX, 0.25)], "sine-2")
    return x, y

"""
evaluation/baseline.py
功能：零假设基线实验。打乱序列名、对每条序列做随机循环平移，破坏时序结构后
重新计算 d_ED，与未扰动的参考距离比较 (z 分数)。
另有两类对照实验：
  - 子数据集与标签错配：subset / swap_names 取出指定序列、交换两条序列的名字后再比较；
  - 随机子集成对基线：每次随机抽 k 条序列，同一子集上分别算参考距离与打乱后距离，
    两组距离做配对 t 检验。
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from core.config import RunConfig
from core.exceptions import InputError
from core.schema import BaselineResult, Dataset, SubsetBaselineResult, TimeSeries
from distance.dag_distance import DagDistanceService
from utils.workers import run_jobs

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.Generator]


def _rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def permute_names(ds: Dataset, seed: Seed) -> Dataset:
    """均匀随机置换序列名，高度数据不动"""
    if len(ds.series) < 2:
        raise InputError("打乱序列名至少需要 2 条序列")
    perm = _rng(seed).permutation(len(ds.series))
    names = ds.names
    return ds.replace_series(ts.renamed(names[int(k)]) for ts, k in zip(ds.series, perm))


def swap_names(ds: Dataset, a: str, b: str) -> Dataset:
    """交换两条序列的名字 (标签错配)"""
    if a == b:
        raise InputError(f"交换的两个序列名相同: '{a}'")
    missing = [n for n in (a, b) if n not in ds.names]
    if missing:
        raise InputError(f"数据集中不存在序列 {missing}")
    mapping = {a: b, b: a}
    return ds.replace_series(ts.renamed(mapping.get(ts.name, ts.name)) for ts in ds.series)


def subset(ds: Dataset, names: Sequence[str]) -> Dataset:
    """按给定顺序取出子数据集"""
    if not names:
        raise InputError("子数据集至少需要一条序列")
    dup = sorted({n for n in names if list(names).count(n) > 1})
    if dup:
        raise InputError(f"子数据集序列名重复: {dup}")
    return ds.replace_series(ds.get(n) for n in names)


def cyclic_shift(ts: TimeSeries, m: int) -> TimeSeries:
    """h_m, ..., h_n, h_1, ..., h_{m-1} (m 从 1 开始)，网格不变"""
    n = len(ts)
    if not 1 <= m <= n:
        raise InputError(f"平移量 m={m} 超出范围 [1, {n}]")
    return ts.with_heights(ts.heights[m - 1:] + ts.heights[:m - 1])


def scramble(ds: Dataset, rng: np.random.Generator, permute: bool = True, shift: bool = True) -> Dataset:
    out = permute_names(ds, rng) if permute else ds
    if shift:
        out = out.replace_series(cyclic_shift(ts, int(rng.integers(1, len(ts) + 1))) for ts in out.series)
    return out


def _service(config: RunConfig) -> DagDistanceService:
    # 单个样本内不再开进程
    return DagDistanceService(config.pair_cap, config.total_cap, max_workers=1, tie_policy=config.tie_policy)


def _sample_rng(config: RunConfig, index: int) -> np.random.Generator:
    # 每个样本独立随机流: seed + 样本序号
    return np.random.Generator(np.random.PCG64(config.seed + index))


def _scrambled_distance(config: RunConfig, ds_ref: Dataset, ds_other: Dataset, index: int) -> float:
    scrambled = scramble(ds_other, _sample_rng(config, index), config.permute, config.shift)
    return _service(config).compare(ds_ref, scrambled, with_bound=False).total


def _subset_pair(config: RunConfig, ds_ref: Dataset, ds_other: Dataset,
                 index: int) -> Tuple[List[str], float, float]:
    """同一随机子集上的 (子集, 参考距离, 打乱后距离)；先打乱整个数据集再取子集"""
    rng = _sample_rng(config, index)
    picked = np.sort(rng.choice(len(ds_ref.series), size=config.subset_size, replace=False))
    names = [ds_ref.names[int(k)] for k in picked]
    scrambled = scramble(ds_other, rng, config.permute, config.shift)
    service = _service(config)
    ref_sub = subset(ds_ref, names)
    reference = service.compare(ref_sub, subset(ds_other, names), with_bound=False).total
    null = service.compare(ref_sub, subset(scrambled, names), with_bound=False).total
    return names, reference, null


def _check_inputs(ds_ref: Dataset, ds_other: Dataset, config: RunConfig):
    if set(ds_ref.names) != set(ds_other.names):
        raise InputError("参考数据集与对比数据集的序列名不一致")
    if not (config.permute or config.shift):
        raise InputError("permute 与 shift 至少启用一个")
    if config.permute and len(ds_other.series) < 2:
        raise InputError("打乱序列名至少需要 2 条序列")


def _finite(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


class BaselineExperiment:
    def __init__(self, config: RunConfig):
        self.config = config
        self.service = _service(config)

    def run(self, ds_ref: Dataset, ds_other: Dataset) -> BaselineResult:
        _check_inputs(ds_ref, ds_other, self.config)

        reference = self.service.compare(ds_ref, ds_other, with_bound=False).total
        logger.info(f"📊 参考距离 = {reference:.6g}，开始 {self.config.samples} 次基线抽样")
        jobs = [(self.config, ds_ref, ds_other, k) for k in range(self.config.samples)]
        samples = run_jobs(_scrambled_distance, jobs, self.config.max_workers)

        ordered = np.sort(np.asarray(samples, dtype=float))
        mean = float(ordered.mean())
        std = float(ordered.std())
        z_score = (mean - reference) / std if std > 0 else None
        logger.info(f"✅ 基线完成: 均值 {mean:.6g}, 标准差 {std:.6g}, z = {z_score}")
        return BaselineResult(
            samples=[float(s) for s in ordered],
            mean=mean,
            median=float(np.median(ordered)),
            std=std,
            reference_distance=reference,
            z_score=z_score,
            config=self.config.to_dict(),
        )


class SubsetBaselineExperiment:
    """随机子集成对基线：每个子集给出一对 (参考距离, 打乱后距离)"""

    def __init__(self, config: RunConfig):
        if config.subset_size is None:
            raise InputError("子集基线需要 subset_size")
        self.config = config

    def run(self, ds_ref: Dataset, ds_other: Dataset) -> SubsetBaselineResult:
        _check_inputs(ds_ref, ds_other, self.config)
        if self.config.subset_size > len(ds_ref.series):
            raise InputError(f"subset_size={self.config.subset_size} 超过序列数 {len(ds_ref.series)}")

        logger.info(f"📊 开始 {self.config.samples} 个随机子集 (每个 {self.config.subset_size} 条序列)")
        jobs = [(self.config, ds_ref, ds_other, k) for k in range(self.config.samples)]
        pairs = run_jobs(_subset_pair, jobs, self.config.max_workers)
        reference = [float(r) for _, r, _ in pairs]
        scrambled = [float(s) for _, _, s in pairs]

        t_statistic = p_value = None
        if len(pairs) >= 2 and np.ptp(np.subtract(scrambled, reference)) > 0:
            test = stats.ttest_rel(scrambled, reference)
            t_statistic, p_value = _finite(test.statistic), _finite(test.pvalue)
        else:
            logger.warning("⚠️ 样本不足或差值恒定，跳过配对 t 检验")
        result = SubsetBaselineResult(
            subsets=[names for names, _, _ in pairs],
            reference=reference,
            scrambled=scrambled,
            reference_mean=float(np.mean(reference)),
            scrambled_mean=float(np.mean(scrambled)),
            t_statistic=t_statistic,
            p_value=p_value,
            config=self.config.to_dict(),
        )
        logger.info(f"✅ 子集基线完成: 参考均值 {result.reference_mean:.6g}, "
                    f"打乱均值 {result.scrambled_mean:.6g}, t = {t_statistic}, p = {p_value}")
        return result


def baseline(ds_ref: Dataset, ds_other: Dataset, config: RunConfig) -> BaselineResult:
    return BaselineExperiment(config).run(ds_ref, ds_other)


def subset_baseline(ds_ref: Dataset, ds_other: Dataset, config: RunConfig) -> SubsetBaselineResult:
    return SubsetBaselineExperiment(config).run(ds_ref, ds_other)

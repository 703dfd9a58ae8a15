"""
core/schema.py
定义极值事件 DAG 系统的核心数据结构。
所有对象构造后不可变 (frozen dataclass + tuple)，可在线程间安全共享。
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from core.exceptions import InputError

MIN = "min"
MAX = "max"
LABELS = (MIN, MAX)


class Sentinel(Enum):
    """持久图中本质点 (essential point) 的死亡值，不参与任何算术"""
    INF = "inf"


INF = Sentinel.INF

# 极值的顶点编号: (序列下标, 序列内序号 1-based)
VertexId = Tuple[int, int]
# 极值在网格上的下标 -> 节点寿命
NodeLifeTable = Dict[int, float]


# ==========================================
# 1. 时间序列 (ingest)
# ==========================================

@dataclass(frozen=True)
class TimeGrid:
    """严格递增的时间网格 z_1 < ... < z_N"""
    points: Tuple[float, ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise InputError(f"时间轴至少需要 2 个点，当前 {len(self.points)} 个")
        for k in range(1, len(self.points)):
            if not self.points[k - 1] < self.points[k]:
                raise InputError(
                    f"时间轴必须严格递增: 第 {k} 行 {self.points[k - 1]} -> {self.points[k]}"
                )

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class TimeSeries:
    """
    单条时间序列。
    times 是该序列自己的网格视图 (去平台后可能是数据集网格的子集)。
    """
    name: str
    heights: Tuple[float, ...]
    times: Tuple[float, ...]

    def __post_init__(self):
        if len(self.heights) != len(self.times):
            raise InputError(
                f"序列 '{self.name}' 长度 {len(self.heights)} 与网格长度 {len(self.times)} 不一致"
            )

    def __len__(self) -> int:
        return len(self.heights)

    @property
    def domain(self) -> Tuple[float, float]:
        return self.times[0], self.times[-1]

    def array(self) -> np.ndarray:
        return np.asarray(self.heights, dtype=float)

    def negated(self) -> "TimeSeries":
        return TimeSeries(self.name, tuple(-h for h in self.heights), self.times)

    def with_heights(self, heights) -> "TimeSeries":
        return TimeSeries(self.name, tuple(float(h) for h in heights), self.times)

    def renamed(self, name: str) -> "TimeSeries":
        return TimeSeries(name, self.heights, self.times)


def _is_subsequence(times: Tuple[float, ...], points: Tuple[float, ...]) -> bool:
    remaining = iter(points)
    return all(t in remaining for t in times)


@dataclass(frozen=True)
class Dataset:
    """
    共享同一时间网格的一组命名序列。
    plateaus_collapsed=False 时每条序列的时间点必须与网格完全一致；
    去平台后的数据集允许序列只取网格的子序列。
    """
    grid: TimeGrid
    series: Tuple[TimeSeries, ...]
    plateaus_collapsed: bool = False

    def __post_init__(self):
        seen = set()
        for ts in self.series:
            if ts.name in seen:
                raise InputError(f"序列名重复: '{ts.name}'")
            seen.add(ts.name)
            if self.plateaus_collapsed:
                if not _is_subsequence(ts.times, self.grid.points):
                    raise InputError(f"序列 '{ts.name}' 的时间点不是数据集网格的子序列")
            elif ts.times != self.grid.points:
                raise InputError(
                    f"序列 '{ts.name}' 有 {len(ts)} 个时间点，与数据集网格 ({len(self.grid)} 个点) 不一致"
                )

    @property
    def names(self) -> List[str]:
        return [ts.name for ts in self.series]

    def get(self, name: str) -> TimeSeries:
        for ts in self.series:
            if ts.name == name:
                return ts
        raise InputError(f"数据集中不存在序列 '{name}'")

    def replace_series(self, series) -> "Dataset":
        return Dataset(self.grid, tuple(series), self.plateaus_collapsed)


# ==========================================
# 2. 持久性 (persistence)
# ==========================================

@dataclass(frozen=True)
class Extremum:
    index: int
    time: float
    height: float
    label: str


@dataclass(frozen=True)
class MergeTriplet:
    """(u, s, v): 以 u 为代表的分支在鞍点 s 处并入以 v 为代表的分支"""
    u: int
    s: int
    v: int

    @property
    def is_essential(self) -> bool:
        return self.u == self.s == self.v


@dataclass(frozen=True)
class PersistencePoint:
    birth: float
    death: Union[float, Sentinel]
    minimum_index: int

    @property
    def is_essential(self) -> bool:
        return self.death is INF


# ==========================================
# 3. ε-极值区间 (intervals)
# ==========================================

@dataclass(frozen=True)
class DiscreteInterval:
    """网格端点区间，在 [a, b] 内相对开"""
    left: float
    right: float

    def intersects(self, other: "DiscreteInterval") -> bool:
        return max(self.left, other.left) < min(self.right, other.right)

    @property
    def length(self) -> float:
        return self.right - self.left


# ==========================================
# 4. 极值事件 DAG (event_dag)
# ==========================================

@dataclass(frozen=True)
class DagVertex:
    series_index: int
    ordinal: int
    label: str
    time: float
    weight: float
    height: float = 0.0

    @property
    def vid(self) -> VertexId:
        return (self.series_index, self.ordinal)


class DagEdge(NamedTuple):
    """src -> dst，时间严格先后"""
    src: VertexId
    dst: VertexId
    weight: float


@dataclass(frozen=True)
class ExtremalEventDAG:
    series_names: Tuple[str, ...]
    vertices: Tuple[DagVertex, ...]
    edges: Tuple[DagEdge, ...]
    grid_name: Optional[str] = None

    def vertex_map(self) -> Dict[VertexId, DagVertex]:
        return {v.vid: v for v in self.vertices}

    def edge_map(self) -> Dict[Tuple[VertexId, VertexId], float]:
        return {(e.src, e.dst): e.weight for e in self.edges}

    def series_index(self, name: str) -> int:
        try:
            return self.series_names.index(name)
        except ValueError:
            raise InputError(f"DAG 中不存在序列 '{name}'")

    def series_vertices(self, name: str) -> List[DagVertex]:
        idx = self.series_index(name)
        return sorted((v for v in self.vertices if v.series_index == idx), key=lambda v: v.ordinal)


# ==========================================
# 5. 骨架与对齐 (alignment)
# ==========================================

@dataclass(frozen=True)
class BackboneNode:
    label: str
    weight: float

    @property
    def is_empty(self) -> bool:
        return self.label == ""


EMPTY_NODE = BackboneNode("", 0.0)


@dataclass(frozen=True)
class Backbone:
    nodes: Tuple[BackboneNode, ...]
    name: str = ""

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, k: int) -> BackboneNode:
        return self.nodes[k]

    @classmethod
    def of(cls, pairs, name: str = "") -> "Backbone":
        """从 [(label, weight), ...] 构造"""
        return cls(tuple(BackboneNode(l, float(w)) for l, w in pairs), name)


# 对齐中的一个位置: (x 下标 或 None=𝟎, y 下标 或 None=𝟎)
AlignedPair = Tuple[Optional[int], Optional[int]]


@dataclass(frozen=True)
class Alignment:
    pairs: Tuple[AlignedPair, ...]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class AlignmentMatrix:
    """(m+1)x(n+1) 对齐矩阵，values[i][j] 为 x[:i] 与 y[:j] 的最小对齐代价"""
    values: np.ndarray
    x: Backbone
    y: Backbone

    @property
    def corner(self) -> float:
        return float(self.values[len(self.x), len(self.y)])


# ==========================================
# 6. 超图与距离 (distance)
# ==========================================

@dataclass(frozen=True)
class SupergraphVertex:
    pair_index: int
    position: int
    x_ref: Optional[VertexId]
    y_ref: Optional[VertexId]
    weight_a: float
    weight_b: float

    @property
    def key(self) -> Tuple[int, int]:
        return (self.pair_index, self.position)


@dataclass(frozen=True)
class SupergraphEdge:
    src: Tuple[int, int]
    dst: Tuple[int, int]
    weight_a: float
    weight_b: float


@dataclass(frozen=True)
class Supergraph:
    series_names: Tuple[str, ...]
    vertices: Tuple[SupergraphVertex, ...]
    edges: Tuple[SupergraphEdge, ...]

    def edge_term(self) -> float:
        return float(sum(abs(e.weight_a - e.weight_b) for e in self.edges))


@dataclass
class DistanceReport:
    total: float
    node_term: float
    edge_term: float
    backbone_distances: Dict[str, float] = field(default_factory=dict)
    alignments: Dict[str, List[AlignedPair]] = field(default_factory=dict)
    tie_flags: Dict[str, bool] = field(default_factory=dict)
    truncated: bool = False
    stability_bound: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "total": self.total,
            "node_term": self.node_term,
            "edge_term": self.edge_term,
            "backbone_distances": dict(self.backbone_distances),
            "alignments": {k: [list(p) for p in v] for k, v in self.alignments.items()},
            "tie_flags": dict(self.tie_flags),
            "truncated": self.truncated,
            "stability_bound": self.stability_bound,
        }


# ==========================================
# 7. 基线实验 (harness)
# ==========================================

@dataclass
class BaselineResult:
    samples: List[float]
    mean: float
    median: float
    std: float
    reference_distance: float
    z_score: Optional[float]
    config: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "samples": list(self.samples),
            "mean": self.mean,
            "median": self.median,
            "std": self.std,
            "reference_distance": self.reference_distance,
            "z_score": self.z_score,
            "config": dict(self.config),
        }


@dataclass
class SubsetBaselineResult:
    """随机子集上的成对比较：同一子集的参考距离与打乱后距离一一对应"""
    subsets: List[List[str]]
    reference: List[float]
    scrambled: List[float]
    reference_mean: float
    scrambled_mean: float
    t_statistic: Optional[float]
    p_value: Optional[float]
    config: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subsets": [list(s) for s in self.subsets],
            "reference": list(self.reference),
            "scrambled": list(self.scrambled),
            "reference_mean": self.reference_mean,
            "scrambled_mean": self.scrambled_mean,
            "t_statistic": self.t_statistic,
            "p_value": self.p_value,
            "config": dict(self.config),
        }

"""
persistence/merge_tree.py
功能：0 维下水平集持久性。按高度升序扫描 + 并查集得到合并三元组 (u, s, v)，
再换算成每个极值的节点寿命 (node life = persistence / 2)。
"""
from collections import Counter
from typing import Dict, List

from core.schema import MergeTriplet, NodeLifeTable, TimeSeries


class UnionFind:
    """
    并查集 (按秩合并 + 路径压缩)。
    额外维护每个集合的"最老"代表极小值 elder：合并时 elder 由调用方按长者规则指定。
    """

    def __init__(self):
        self.parent: Dict[int, int] = {}
        self.rank = Counter()
        self.elder: Dict[int, int] = {}

    def add(self, x: int):
        self.parent[x] = x
        self.elder[x] = x

    def __contains__(self, x: int) -> bool:
        return x in self.parent

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        # 路径压缩
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def representative(self, x: int) -> int:
        return self.elder[self.find(x)]

    def union(self, x: int, y: int, elder: int) -> int:
        px, py = self.find(x), self.find(y)
        if px == py:
            return px
        if self.rank[px] < self.rank[py]:
            px, py = py, px
        self.parent[py] = px
        if self.rank[px] == self.rank[py]:
            self.rank[px] += 1
        self.elder[px] = elder
        return px


def merge_tree(ts: TimeSeries) -> List[MergeTriplet]:
    """
    高度升序扫描 (同高按下标)，一个新样本：
      - 两侧都未出现 -> 新分支诞生 (局部极小)
      - 只一侧出现 -> 并入该分支
      - 两侧都出现 -> 鞍点，较年轻分支死亡 (出生更高者；同高时位置靠后者)
    返回三元组列表：按死亡顺序，本质三元组 (u=s=v) 在最后。
    """
    h = ts.heights
    n = len(h)
    order = sorted(range(n), key=lambda k: (h[k], k))
    uf = UnionFind()
    triplets: List[MergeTriplet] = []

    for i in order:
        neighbours = [j for j in (i - 1, i + 1) if 0 <= j < n and j in uf]
        uf.add(i)
        if not neighbours:
            continue
        if len(neighbours) == 1:
            uf.union(i, neighbours[0], uf.representative(neighbours[0]))
            continue

        a, b = (uf.representative(j) for j in neighbours)
        older, younger = sorted((a, b), key=lambda m: (h[m], m))
        triplets.append(MergeTriplet(u=younger, s=i, v=older))
        uf.union(neighbours[0], neighbours[1], older)
        uf.union(i, neighbours[0], older)

    root = uf.representative(order[0])
    triplets.append(MergeTriplet(u=root, s=root, v=root))
    return triplets


def min_lives(ts: TimeSeries, tree: List[MergeTriplet]) -> NodeLifeTable:
    """极小值的节点寿命；本质极小值取 (max(h) - min(h)) / 2"""
    h = ts.heights
    span = (max(h) - min(h)) / 2
    lives: NodeLifeTable = {}
    for t in tree:
        lives[t.u] = span if t.is_essential else abs(h[t.s] - h[t.u]) / 2
    return lives


def node_lives(ts: TimeSeries) -> NodeLifeTable:
    """对 ts 与 -ts 各做一次，合并得到全部极值的节点寿命"""
    lives = min_lives(ts, merge_tree(ts))
    flipped = ts.negated()
    lives.update(min_lives(flipped, merge_tree(flipped)))
    return dict(sorted(lives.items()))

"""
分层偏序集模块
平面树（结合多面体）、分层树（置换多面体）、双置换多面体 P_m^n 与双结合多面体 K_m^n 的胞腔、维数、覆盖关系与 f 向量

树的顶点用其下方叶子的区间 (a, b)（0 起始、闭区间）表示。T↑ 有 n 片叶子、T↓ 有 m 片叶子；
在公共的层序中，T↓ 的子顶点低于父顶点，T↑ 的子顶点高于父顶点。
"""

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple, Union

from .core.errors import ResourceGuardError, StructuralError
from .utils import get_logger, log_debug, log_info

logger = get_logger("polytopes")

Interval = Tuple[int, int]
VertexRef = Tuple[str, Interval]
Fibers = Tuple[Tuple[VertexRef, ...], ...]

MAX_ARITY_SUM = 7
UP, DOWN = "u", "d"


@dataclass(frozen=True)
class PlanarTree:
    """n 片叶子的平面有根树，内部顶点至少二元；leaves == 1 且无顶点时为奇异树 "|" """

    leaves: int
    vertices: Tuple[Interval, ...] = ()
    orientation: str = "up"

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(tuple(v) for v in self.vertices)))
        if self.leaves < 1:
            raise StructuralError(f"叶子数必须为正: {self.leaves}")
        if self.leaves == 1:
            if self.vertices:
                raise StructuralError("单叶子树不能有顶点")
            return
        if (0, self.leaves - 1) not in self.vertices:
            raise StructuralError("缺少根顶点")
        for a, b in self.vertices:
            if not 0 <= a < b < self.leaves:
                raise StructuralError(f"顶点区间 ({a}, {b}) 非法")
        for (a, b), (c, d) in itertools.combinations(self.vertices, 2):
            nested = (a <= c and d <= b) or (c <= a and b <= d)
            if not nested and not (b < c or d < a):
                raise StructuralError(f"顶点区间 ({a}, {b}) 与 ({c}, {d}) 交叉")

    @property
    def is_singular(self) -> bool:
        return not self.vertices

    def parent(self, v: Interval) -> Optional[Interval]:
        above = [u for u in self.vertices if u != v and u[0] <= v[0] and v[1] <= u[1]]
        return min(above, key=lambda u: u[1] - u[0]) if above else None

    def children(self, v: Interval) -> List[Interval]:
        return sorted(u for u in self.vertices if u != v and self.parent(u) == v)

    def arity(self, v: Interval) -> int:
        covered = sum(c[1] - c[0] + 1 for c in self.children(v))
        return (v[1] - v[0] + 1) - covered + len(self.children(v))

    def is_ancestor(self, u: Interval, v: Interval) -> bool:
        """u 严格位于 v 之上（更靠近根）"""
        return u != v and u[0] <= v[0] and v[1] <= u[1]

    def dimension(self) -> int:
        return sum(self.arity(v) - 2 for v in self.vertices)

    def contract(self, removed: Sequence[Interval]) -> "PlanarTree":
        return PlanarTree(self.leaves, tuple(v for v in self.vertices if v not in set(removed)), self.orientation)

    def bracket(self) -> str:
        """括号串，例如 ((12)3)；奇异树为 |"""
        if self.is_singular:
            return "|"

        def render(v: Interval) -> str:
            parts = []
            position = v[0]
            for child in self.children(v):
                parts.extend(str(i + 1) for i in range(position, child[0]))
                parts.append(render(child))
                position = child[1] + 1
            parts.extend(str(i + 1) for i in range(position, v[1] + 1))
            return "(" + "".join(parts) + ")"

        return render((0, self.leaves - 1))

    def __str__(self) -> str:
        return self.bracket()


def singular_tree(orientation: str = "up") -> PlanarTree:
    return PlanarTree(1, (), orientation)


@lru_cache(maxsize=None)
def _tree_families(a: int, b: int) -> Tuple[FrozenSet[Interval], ...]:
    """区间 [a, b] 上以 (a, b) 为根的所有顶点集合"""
    families = []
    size = b - a + 1
    # 把 [a, b] 切成 ≥ 2 个连续块，长度 ≥ 2 的块递归成子树
    for cuts in range(1, size):
        for positions in itertools.combinations(range(a + 1, b + 1), cuts):
            bounds = (a,) + positions + (b + 1,)
            blocks = [(bounds[i], bounds[i + 1] - 1) for i in range(len(bounds) - 1)]
            options = [
                _tree_families(lo, hi) if hi > lo else (frozenset(),) for lo, hi in blocks
            ]
            for combo in itertools.product(*options):
                families.append(frozenset({(a, b)}).union(*combo))
    return tuple(families)


def enumerate_trees(n: int, orientation: str = "up") -> List[PlanarTree]:
    """n 片叶子、内部顶点至少二元的全部平面树"""
    if n < 2:
        raise StructuralError(f"需要 n ≥ 2: {n}")
    trees = [PlanarTree(n, tuple(f), orientation) for f in _tree_families(0, n - 1)]
    return sorted(trees, key=lambda t: (len(t.vertices), t.vertices))


def _trees_or_singular(leaves: int, orientation: str) -> List[PlanarTree]:
    return [singular_tree(orientation)] if leaves == 1 else enumerate_trees(leaves, orientation)


# ---------------------------------------------------------------------------
# 胞腔
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LeveledTree:
    """平面树加严格保序的满射层函数（按层列出顶点）"""

    tree: PlanarTree
    levels: Tuple[Tuple[Interval, ...], ...]


@dataclass(frozen=True)
class LeveledBiTree:
    """(T↑, T↓, ℓ)：层函数按层列出两棵树的顶点"""

    up: PlanarTree
    down: PlanarTree
    levels: Fibers


@dataclass(frozen=True)
class ZonedBiTree:
    """(T↑, T↓, ζ)：区函数按区列出两棵树的顶点"""

    up: PlanarTree
    down: PlanarTree
    zeta: Fibers

    def barriers(self) -> List[int]:
        return [i for i, fiber in enumerate(self.zeta) if _fiber_type(fiber) == "barrier"]


CellData = Union[PlanarTree, LeveledTree, LeveledBiTree, ZonedBiTree]


@dataclass(frozen=True)
class Cell:
    data: CellData
    dimension: int = field(default=-1, compare=False)

    def __post_init__(self):
        if self.dimension < 0:
            object.__setattr__(self, "dimension", dimension_of(self))

    @property
    def family(self) -> str:
        if isinstance(self.data, ZonedBiTree):
            return "K"
        if isinstance(self.data, (LeveledBiTree, LeveledTree)):
            return "P"
        return "A"

    def encode(self) -> str:
        data = self.data
        if isinstance(data, PlanarTree):
            return data.bracket()
        if isinstance(data, LeveledTree):
            return data.tree.bracket() + ";" + "|".join(
                ",".join(f"{a + 1}-{b + 1}" for a, b in level) for level in data.levels
            )
        fibers = data.zeta if isinstance(data, ZonedBiTree) else data.levels
        body = "|".join(",".join(f"{side}{a + 1}-{b + 1}" for side, (a, b) in fiber) for fiber in fibers)
        return f"{data.up.bracket()};{data.down.bracket()};{body}"

    def __str__(self) -> str:
        return self.encode()


def _tree_of(data, side: str) -> PlanarTree:
    return data.up if side == UP else data.down


def _less(data, v: VertexRef, u: VertexRef) -> bool:
    """公共层序中 v < u（只在同一棵树内可比）"""
    if v[0] != u[0]:
        return False
    tree = _tree_of(data, v[0])
    if v[0] == DOWN:
        return tree.is_ancestor(u[1], v[1])
    return tree.is_ancestor(v[1], u[1])


def _fiber_type(fiber: Sequence[VertexRef]) -> str:
    sides = {side for side, _ in fiber}
    if sides == {UP, DOWN}:
        return "barrier"
    return "up" if sides == {UP} else "down"


def dimension_of(c: Union[Cell, CellData]) -> int:
    """树部分 Σ(arity − 2) 加上层或区的贡献"""
    data = c.data if isinstance(c, Cell) else c
    if isinstance(data, PlanarTree):
        return data.dimension()
    if isinstance(data, LeveledTree):
        return data.tree.dimension() + len(data.tree.vertices) - len(data.levels)
    trees = data.up.dimension() + data.down.dimension()
    if isinstance(data, LeveledBiTree):
        total = len(data.up.vertices) + len(data.down.vertices)
        return trees + total - len(data.levels)
    return trees + sum(len(data.zeta[i]) - 1 for i in data.barriers())


def _vertex_refs(up: PlanarTree, down: PlanarTree) -> List[VertexRef]:
    return [(UP, v) for v in up.vertices] + [(DOWN, v) for v in down.vertices]


def _ordered_partitions(items: Sequence) -> Iterator[Tuple[Tuple, ...]]:
    if not items:
        yield ()
        return
    items = list(items)
    n = len(items)
    # 给每个元素分配块号，要求块号集合是 0..l−1
    for labels in itertools.product(range(n), repeat=n):
        used = sorted(set(labels))
        if used != list(range(len(used))):
            continue
        yield tuple(tuple(x for x, lab in zip(items, labels) if lab == i) for i in range(len(used)))


def _normalize_fibers(fibers: Sequence[Sequence[VertexRef]]) -> Fibers:
    return tuple(tuple(sorted(f)) for f in fibers if f)


def _check_size(m: int, n: int) -> None:
    if m < 1 or n < 1 or m + n < 3:
        raise StructuralError(f"需要 m, n ≥ 1 且 m + n ≥ 3: ({m}, {n})")
    if m + n > MAX_ARITY_SUM:
        raise ResourceGuardError(f"m + n = {m + n} 超过可枚举上限 {MAX_ARITY_SUM}", m + n)


def _strict_levels(data, fibers: Fibers) -> bool:
    level = {v: i for i, fiber in enumerate(fibers) for v in fiber}
    refs = list(level)
    return all(not _less(data, v, u) or level[v] < level[u] for v in refs for u in refs)


def _valid_zones(data, fibers: Fibers) -> bool:
    zone = {v: i for i, fiber in enumerate(fibers) for v in fiber}
    refs = list(zone)
    for v in refs:
        for u in refs:
            if _less(data, v, u) and zone[v] > zone[u]:
                return False
    types = [_fiber_type(f) for f in fibers]
    for fiber, kind in zip(fibers, types):
        if kind == "barrier" and any(_less(data, v, u) for v in fiber for u in fiber):
            return False
    return all(not (a == b != "barrier") for a, b in zip(types, types[1:]))


def enumerate_associahedron(n: int) -> List[Cell]:
    """Tree_n 的面偏序集的胞腔"""
    return [Cell(t) for t in enumerate_trees(n)]


def enumerate_leveled_trees(n: int) -> List[Cell]:
    """LTree_n：平面树加严格保序层函数"""
    cells = []
    for tree in enumerate_trees(n):
        holder = LeveledBiTree(tree, singular_tree("down"), ())
        for fibers in _ordered_partitions([(UP, v) for v in tree.vertices]):
            if _strict_levels(holder, fibers):
                levels = tuple(tuple(sorted(v for _, v in f)) for f in fibers)
                cells.append(Cell(LeveledTree(tree, levels)))
    return cells


def enumerate_bipermutahedron(m: int, n: int) -> List[Cell]:
    """P_m^n 的全部 (T↑, T↓, ℓ)；m 或 n 为 1 时对应一侧用奇异树"""
    _check_size(m, n)
    cells = []
    for up in _trees_or_singular(n, "up"):
        for down in _trees_or_singular(m, "down"):
            holder = LeveledBiTree(up, down, ())
            for fibers in _ordered_partitions(_vertex_refs(up, down)):
                fibers = _normalize_fibers(fibers)
                if _strict_levels(holder, fibers):
                    cells.append(Cell(LeveledBiTree(up, down, fibers)))
    log_debug(f"P_{m}^{n}: {len(cells)} 个胞腔", logger)
    return cells


def enumerate_biassociahedron(m: int, n: int) -> List[Cell]:
    """K_m^n 的全部 (T↑, T↓, ζ)；m 或 n 为 1 时只剩平凡区函数，即结合多面体"""
    _check_size(m, n)
    cells = []
    for up in _trees_or_singular(n, "up"):
        for down in _trees_or_singular(m, "down"):
            holder = ZonedBiTree(up, down, ())
            for fibers in _ordered_partitions(_vertex_refs(up, down)):
                fibers = _normalize_fibers(fibers)
                if _valid_zones(holder, fibers):
                    cells.append(Cell(ZonedBiTree(up, down, fibers)))
    log_debug(f"K_{m}^{n}: {len(cells)} 个胞腔", logger)
    return cells


# ---------------------------------------------------------------------------
# 收缩、投影与偏序
# ---------------------------------------------------------------------------


def contract_levels(cell: Cell, i: int) -> Cell:
    """合并第 i 与 i+1 层，并收缩两层之间的父子边"""
    data = cell.data
    if not isinstance(data, LeveledBiTree):
        raise StructuralError("只有分层双树可以收缩层")
    if not 0 <= i < len(data.levels) - 1:
        raise StructuralError(f"层号 {i} 越界")
    lower, upper = data.levels[i], data.levels[i + 1]
    removed: Set[VertexRef] = set()
    for v in lower:
        for u in upper:
            if not _less(data, v, u):
                continue
            tree = _tree_of(data, v[0])
            child = v if v[0] == DOWN else u
            parent = u if v[0] == DOWN else v
            if tree.parent(child[1]) == parent[1]:
                removed.add(child)
    up = data.up.contract([v for side, v in removed if side == UP])
    down = data.down.contract([v for side, v in removed if side == DOWN])
    merged = tuple(v for v in lower + upper if v not in removed)
    levels = data.levels[:i] + (merged,) + data.levels[i + 2 :]
    return Cell(LeveledBiTree(up, down, _normalize_fibers(levels)))


def project_bipermutahedron(cell: Cell) -> Cell:
    """层到区的自然满射：合并同类型的相邻非 barrier 层"""
    data = cell.data
    if not isinstance(data, LeveledBiTree):
        raise StructuralError("只能投影分层双树")
    zones: List[List[VertexRef]] = []
    kinds: List[str] = []
    for level in data.levels:
        kind = _fiber_type(level)
        if zones and kind != "barrier" and kinds[-1] == kind:
            zones[-1].extend(level)
        else:
            zones.append(list(level))
            kinds.append(kind)
    return Cell(ZonedBiTree(data.up, data.down, _normalize_fibers(zones)))


@dataclass
class StratificationPoset:
    family: str
    m: int
    n: int
    cells: List[Cell]
    below: Dict[int, Set[int]]
    covers: Dict[int, List[int]]

    def index(self, cell: Cell) -> int:
        return self.cells.index(cell)


def _closure(covers: Dict[int, List[int]]) -> Dict[int, Set[int]]:
    below: Dict[int, Set[int]] = {}

    def visit(i: int) -> Set[int]:
        if i not in below:
            result: Set[int] = set()
            for j in covers[i]:
                result.add(j)
                result |= visit(j)
            below[i] = result
        return below[i]

    for i in covers:
        visit(i)
    return below


@lru_cache(maxsize=None)
def build_poset(m: int, n: int, family: str) -> StratificationPoset:
    """family: "P"（双置换多面体）、"K"（双结合多面体）或 "A"（n 叶结合多面体，忽略 m）"""
    family = family.upper()[0]
    if family == "A":
        cells = enumerate_associahedron(n)
        index = {c: i for i, c in enumerate(cells)}
        covers = {
            index[c]: [
                index[d]
                for d in cells
                if set(c.data.vertices) < set(d.data.vertices)
                and len(d.data.vertices) == len(c.data.vertices) + 1
            ]
            for c in cells
        }
        return StratificationPoset("A", 1, n, cells, _closure(covers), covers)

    p_cells = enumerate_bipermutahedron(m, n)
    p_index = {c: i for i, c in enumerate(p_cells)}
    p_covers: Dict[int, List[int]] = {i: [] for i in range(len(p_cells))}
    for c in p_cells:
        for i in range(len(c.data.levels) - 1):
            p_covers[p_index[contract_levels(c, i)]].append(p_index[c])
    p_below = _closure(p_covers)
    if family == "P":
        return StratificationPoset("P", m, n, p_cells, p_below, p_covers)
    if family != "K":
        raise StructuralError(f"未知的多面体族: {family}")

    cells = enumerate_biassociahedron(m, n)
    index = {c: i for i, c in enumerate(cells)}
    image = [index[project_bipermutahedron(c)] for c in p_cells]
    below: Dict[int, Set[int]] = {i: set() for i in range(len(cells))}
    for i, lower in p_below.items():
        for j in lower:
            if image[j] != image[i]:
                below[image[i]].add(image[j])
    covers = {
        i: sorted(j for j in lower if cells[j].dimension == cells[i].dimension - 1)
        for i, lower in below.items()
    }
    log_info(f"K_{m}^{n}: {len(cells)} 个胞腔, {sum(map(len, covers.values()))} 条覆盖关系", logger)
    return StratificationPoset("K", m, n, cells, below, covers)


def _poset_of(cell: Cell) -> StratificationPoset:
    data = cell.data
    if isinstance(data, PlanarTree):
        return build_poset(1, data.leaves, "A")
    if isinstance(data, LeveledTree):
        raise StructuralError("分层树请作为 P_1^n 的胞腔处理")
    family = "K" if isinstance(data, ZonedBiTree) else "P"
    return build_poset(data.down.leaves, data.up.leaves, family)


def covers(c: Cell) -> List[Cell]:
    """c 闭包中的全部余维 1 面"""
    poset = _poset_of(c)
    return [poset.cells[j] for j in poset.covers[poset.index(c)]]


def f_vector(m: int, n: int, family: str) -> List[int]:
    cells = build_poset(m, n, family).cells
    top = max(c.dimension for c in cells)
    counts = [0] * (top + 1)
    for c in cells:
        counts[c.dimension] += 1
    return counts


def diamond_check(m: int, n: int, family: str) -> bool:
    """每对维数相差 2 的 c'' < c 之间恰有两个中间胞腔"""
    poset = build_poset(m, n, family)
    cells = poset.cells
    for i, lower in poset.below.items():
        for j in lower:
            if cells[j].dimension != cells[i].dimension - 2:
                continue
            middle = [k for k in poset.covers[i] if j in poset.below[k]]
            if len(middle) != 2:
                log_debug(f"菱形性质失败: {cells[i]} > {cells[j]}，中间 {len(middle)} 个", logger)
                return False
    return True


def boundary_f2_squares_to_zero(m: int, n: int, family: str) -> bool:
    """由覆盖关系组装的 𝔽₂ 边界算子满足 ∂² = 0"""
    poset = build_poset(m, n, family)
    for i, direct in poset.covers.items():
        parity: Dict[int, int] = {}
        for k in direct:
            for j in poset.covers[k]:
                parity[j] = parity.get(j, 0) ^ 1
        if any(parity.values()):
            return False
    return True


def is_graded(m: int, n: int, family: str) -> bool:
    """每个覆盖步恰好降 1 维"""
    poset = build_poset(m, n, family)
    cells = poset.cells
    closure = _closure(poset.covers)
    return all(
        cells[j].dimension == cells[i].dimension - 1 for i, js in poset.covers.items() for j in js
    ) and closure == poset.below


# ---------------------------------------------------------------------------
# 导出
# ---------------------------------------------------------------------------


def poset_to_json(m: int, n: int, family: str) -> str:
    poset = build_poset(m, n, family)
    data = {
        "family": poset.family,
        "m": poset.m,
        "n": poset.n,
        "cells": [
            {"id": i, "cell": c.encode(), "dimension": c.dimension} for i, c in enumerate(poset.cells)
        ],
        "covers": [[i, j] for i in sorted(poset.covers) for j in poset.covers[i]],
    }
    return json.dumps(data, indent=2, ensure_ascii=False)


def f_vector_csv(rows: Sequence[Tuple[str, int, int, Sequence[int]]]) -> str:
    """rows: (族, m, n, f 向量)"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["family", "m", "n", "f_vector"])
    for family, m, n, counts in rows:
        writer.writerow([family, m, n, " ".join(str(c) for c in counts)])
    return buffer.getvalue()

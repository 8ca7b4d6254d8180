"""
有向图核心模块
带标号顶点与边的有向图：规范形式、定向符号、枚举与文本编码

约定：
- 顶点编号从 0 开始，文本编码 "d{d};k{k};E:t>h,..." 亦然；
- d 为偶数时边是奇元素，符号取边置换的奇偶；d 为奇数时顶点是奇元素，符号取顶点置换的奇偶；
- 规范代表元是所有顶点重标号下排序边表的字典序最小者。
"""

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import networkx as nx

from .core.errors import FlavorMismatchError, ResourceGuardError, StructuralError
from .utils import get_logger, log_debug

logger = get_logger("graphcore")

Edge = Tuple[int, int]


@dataclass(frozen=True)
class DirectedGraph:
    """k 个顶点的有向图，边按位置区分（允许平行边）"""

    vertex_count: int
    edges: Tuple[Edge, ...] = ()
    loops_allowed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(t), int(h)) for t, h in self.edges))
        if self.vertex_count < 1:
            raise StructuralError(f"顶点数必须为正: {self.vertex_count}")
        for t, h in self.edges:
            if not (0 <= t < self.vertex_count and 0 <= h < self.vertex_count):
                raise StructuralError(f"边 {t}>{h} 的端点超出 [0, {self.vertex_count})")
            if t == h and not self.loops_allowed:
                raise StructuralError(f"不允许自环: {t}>{h}")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def out_degrees(self) -> List[int]:
        deg = [0] * self.vertex_count
        for t, _ in self.edges:
            deg[t] += 1
        return deg

    def in_degrees(self) -> List[int]:
        deg = [0] * self.vertex_count
        for _, h in self.edges:
            deg[h] += 1
        return deg

    def valences(self) -> List[int]:
        return [o + i for o, i in zip(self.out_degrees(), self.in_degrees())]

    def to_networkx(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from(self.edges)
        return graph

    def __str__(self) -> str:
        return f"k={self.vertex_count};E:" + ",".join(f"{t}>{h}" for t, h in self.edges)


class ParityConvention(str, Enum):
    """定向的奇偶约定"""

    EDGE_ORDER = "edge-order"
    VERTEX_ORDER = "vertex-order"


@dataclass(frozen=True)
class Orientation:
    parity_convention: ParityConvention
    sign: int = 1

    @classmethod
    def for_dimension(cls, d: int, sign: int = 1) -> "Orientation":
        convention = ParityConvention.EDGE_ORDER if d % 2 == 0 else ParityConvention.VERTEX_ORDER
        return cls(convention, sign)

    def opposite(self) -> "Orientation":
        return Orientation(self.parity_convention, -self.sign)


@dataclass(frozen=True)
class SignedGraphClass:
    """规范形式的图类及其定向符号；sign == 0 表示零类（存在奇自同构）"""

    graph: DirectedGraph
    sign: int
    dimension_flavor: int

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    @property
    def orientation(self) -> Orientation:
        return Orientation.for_dimension(self.dimension_flavor, self.sign)

    @property
    def degree(self) -> int:
        return degree(self.graph, self.dimension_flavor)

    def encode(self) -> str:
        return encode_graph(self.graph, self.dimension_flavor)


def degree(g: DirectedGraph, d: int) -> int:
    """同调次数 |Γ| = d(k−1) + (1−d)l"""
    return d * (g.vertex_count - 1) + (1 - d) * g.edge_count


def is_oriented(g: DirectedGraph) -> bool:
    """无有向圈（wheel）"""
    return nx.is_directed_acyclic_graph(g.to_networkx())


def relabel(g: DirectedGraph, perm: Sequence[int]) -> DirectedGraph:
    """顶点 v 改名为 perm[v]，边的顺序不变"""
    return DirectedGraph(
        g.vertex_count, tuple((perm[t], perm[h]) for t, h in g.edges), g.loops_allowed
    )


def disjoint_union(g1: DirectedGraph, g2: DirectedGraph) -> DirectedGraph:
    shift = g1.vertex_count
    return DirectedGraph(
        g1.vertex_count + g2.vertex_count,
        g1.edges + tuple((t + shift, h + shift) for t, h in g2.edges),
        g1.loops_allowed or g2.loops_allowed,
    )


def permutation_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        v = start
        while not seen[v]:
            seen[v] = True
            v = perm[v]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _check_dimension(d: int) -> None:
    if d < 1:
        raise StructuralError(f"维数 d 必须为正: {d}")


# ---------------------------------------------------------------------------
# 规范标号：有向图取字典序最小的分支定界，无向证书用颜色细化搜索树；两者都做孪生顶点剪枝
# ---------------------------------------------------------------------------

Adjacency = List[List[Tuple[int, int]]]


def _normalize(colors: Sequence) -> List[int]:
    ranks = {c: i for i, c in enumerate(sorted(set(colors)))}
    return [ranks[c] for c in colors]


def _refine(out_adj: Adjacency, in_adj: Adjacency, colors: Sequence) -> List[int]:
    colors = _normalize(colors)
    n_cells = len(set(colors))
    k = len(colors)
    while True:
        signatures = [
            (
                colors[v],
                tuple(sorted((c, colors[w]) for w, c in out_adj[v])),
                tuple(sorted((c, colors[u]) for u, c in in_adj[v])),
            )
            for v in range(k)
        ]
        refined = _normalize(signatures)
        n_refined = len(set(refined))
        if n_refined == n_cells:
            return refined
        colors, n_cells = refined, n_refined


def _twin_matrix(out_adj: Adjacency, in_adj: Adjacency, colors: Sequence) -> List[List[bool]]:
    """twins[u][v]：对换 (u v) 是图的自同构"""
    k = len(colors)
    out_counts = [Counter(out_adj[v]) for v in range(k)]
    in_counts = [Counter(in_adj[v]) for v in range(k)]
    twins = [[False] * k for _ in range(k)]

    def strip(counter: Counter, u: int, v: int) -> Counter:
        return Counter({(w, c): n for (w, c), n in counter.items() if w not in (u, v)})

    def between(counter: Counter, target: int) -> Counter:
        return Counter({c: n for (w, c), n in counter.items() if w == target})

    for u in range(k):
        for v in range(u + 1, k):
            if colors[u] != colors[v]:
                continue
            if strip(out_counts[u], u, v) != strip(out_counts[v], u, v):
                continue
            if strip(in_counts[u], u, v) != strip(in_counts[v], u, v):
                continue
            if between(out_counts[u], v) != between(out_counts[v], u):
                continue
            if between(out_counts[u], u) != between(out_counts[v], v):
                continue
            twins[u][v] = twins[v][u] = True
    return twins


def _leaf_labelings(
    out_adj: Adjacency,
    in_adj: Adjacency,
    colors: Sequence,
    twins: List[List[bool]],
) -> Iterator[List[int]]:
    """搜索树的叶子：每片叶子是一个重标号 old -> new"""
    k = len(colors)
    stack = [_refine(out_adj, in_adj, colors)]
    while stack:
        current = stack.pop()
        counts = Counter(current)
        if len(counts) == k:
            yield current
            continue
        target = min(c for c, n in counts.items() if n > 1)
        branched: List[int] = []
        for v in range(k):
            if current[v] != target or any(twins[v][u] for u in branched):
                continue
            branched.append(v)
            individualized = [
                c + 1 if (c >= target and w != v) else c for w, c in enumerate(current)
            ]
            stack.append(_refine(out_adj, in_adj, individualized))


def _minimal_labelings(k: int, out_heads: List[List[int]], twins: List[List[bool]]) -> List[List[int]]:
    """
    分支定界求所有使排序边表字典序最小的重标号 old -> new

    按新标号 0, 1, 2, ... 依次选顶点；已选顶点的出边行中未定的头统一记为当前深度 j，
    逐行拼接（行尾记 k）即得排序边表的下界。孪生兄弟只展开一个。
    """
    label = [-1] * k
    assigned: List[int] = []
    best: Optional[Tuple[int, ...]] = None
    found: List[List[int]] = []

    def bound() -> Tuple[int, ...]:
        j = len(assigned)
        flat: List[int] = []
        for v in assigned:
            flat.extend(sorted(label[h] if label[h] >= 0 else j for h in out_heads[v]))
            flat.append(k)
        return tuple(flat)

    def search() -> None:
        nonlocal best
        j = len(assigned)
        if j == k:
            key = bound()
            if best is None or key < best:
                best = key
                found[:] = [label[:]]
            elif key == best:
                found.append(label[:])
            return
        children: List[Tuple[Tuple[int, ...], int]] = []
        for v in range(k):
            if label[v] >= 0 or any(twins[v][u] for _, u in children):
                continue
            label[v] = j
            assigned.append(v)
            children.append((bound(), v))
            assigned.pop()
            label[v] = -1
        for lower, v in sorted(children):
            if best is not None and lower > best[: len(lower)]:
                break
            label[v] = j
            assigned.append(v)
            search()
            assigned.pop()
            label[v] = -1

    search()
    return found


def _directed_adjacency(k: int, arcs: Iterable[Tuple[int, int, int]]) -> Tuple[Adjacency, Adjacency]:
    out_adj: Adjacency = [[] for _ in range(k)]
    in_adj: Adjacency = [[] for _ in range(k)]
    for t, h, c in arcs:
        out_adj[t].append((h, c))
        in_adj[h].append((t, c))
    return out_adj, in_adj


def _edge_permutation(edges: Sequence[Edge], image: Sequence[Edge]) -> Optional[List[int]]:
    """image[i] 在 edges 中的位置；仅在边互不相同时良定义"""
    position = {e: i for i, e in enumerate(edges)}
    try:
        return [position[e] for e in image]
    except KeyError:
        return None


def canonicalize(g: DirectedGraph, d: int) -> SignedGraphClass:
    """返回规范代表元与符号：g = sign · 规范图；存在奇自同构时 sign = 0"""
    _check_dimension(d)
    k = g.vertex_count
    edges = g.edges
    even = d % 2 == 0
    zero = even and len(set(edges)) < len(edges)

    out_adj, in_adj = _directed_adjacency(k, ((t, h, 0) for t, h in edges))
    colors = [0] * k
    twins = _twin_matrix(out_adj, in_adj, colors)

    if not zero and any(any(row) for row in twins):
        if not even:
            zero = True
        else:
            for u in range(k):
                for v in range(u + 1, k):
                    if not twins[u][v]:
                        continue
                    swap = list(range(k))
                    swap[u], swap[v] = v, u
                    image = [(swap[t], swap[h]) for t, h in edges]
                    perm = _edge_permutation(edges, image)
                    if perm is not None and permutation_sign(perm) < 0:
                        zero = True
                        break
                if zero:
                    break

    out_heads = [[h for h, _ in out_adj[v]] for v in range(k)]
    best_key: Tuple[Edge, ...] = ()
    signs = set()
    for labeling in _minimal_labelings(k, out_heads, twins):
        relabeled = [(labeling[t], labeling[h]) for t, h in edges]
        order = sorted(range(len(relabeled)), key=relabeled.__getitem__)
        best_key = tuple(relabeled[i] for i in order)
        signs.add(permutation_sign(order) if even else permutation_sign(labeling))

    if len(signs) > 1:
        zero = True
    canonical = DirectedGraph(k, best_key, g.loops_allowed)
    return SignedGraphClass(canonical, 0 if zero else signs.pop(), d)


def undirected_certificate(k: int, edges: Sequence[Tuple[int, int, int]]) -> Tuple:
    """带颜色无向多重图的规范证书，edges 为 (u, v, color)"""
    arcs = []
    for u, v, c in edges:
        arcs.append((u, v, c))
        if u != v:
            arcs.append((v, u, c))
    out_adj, in_adj = _directed_adjacency(k, arcs)
    colors = [0] * k
    twins = _twin_matrix(out_adj, in_adj, colors)
    best = None
    for leaf in _leaf_labelings(out_adj, in_adj, colors, twins):
        key = tuple(
            sorted((min(leaf[u], leaf[v]), max(leaf[u], leaf[v]), c) for u, v, c in edges)
        )
        if best is None or key < best:
            best = key
    return best if best is not None else ()


# ---------------------------------------------------------------------------
# 过滤器
# ---------------------------------------------------------------------------


class GraphFilter(str, Enum):
    CONNECTED = "connected"
    ORIENTED = "oriented"
    MIN_VALENCE_2 = "min-valence-2"
    IN_AND_OUT = "all-vertices-have-in-and-out"
    NO_PASSING_BIVALENT = "no-(1,1)-bivalent"
    NO_TRIANGLE = "no-triangle"
    NO_ADJACENT_BIVALENT = "no-adjacent-bivalent"
    MAX_VALENCE_3 = "max-valence-3"


def has_triangle(g: DirectedGraph) -> bool:
    """是否含 3 顶点完全子图（不计方向）"""
    neighbours = [set() for _ in range(g.vertex_count)]
    for t, h in g.edges:
        if t != h:
            neighbours[t].add(h)
            neighbours[h].add(t)
    for u in range(g.vertex_count):
        for v in neighbours[u]:
            if v > u and any(w > v for w in neighbours[u] & neighbours[v]):
                return True
    return False


def is_connected(g: DirectedGraph) -> bool:
    return g.vertex_count == 1 or nx.is_weakly_connected(g.to_networkx())


@dataclass(frozen=True)
class FilterSet:
    """图过滤器集合"""

    names: FrozenSet[GraphFilter] = frozenset()

    @classmethod
    def of(cls, *names: Union[str, GraphFilter]) -> "FilterSet":
        return cls(frozenset(GraphFilter(n) for n in names))

    def __contains__(self, item: Union[str, GraphFilter]) -> bool:
        return GraphFilter(item) in self.names

    def union(self, other: "FilterSet") -> "FilterSet":
        return FilterSet(self.names | other.names)

    def passes(self, g: DirectedGraph) -> bool:
        outs, ins = g.out_degrees(), g.in_degrees()
        valence = [o + i for o, i in zip(outs, ins)]
        names = self.names

        if GraphFilter.MIN_VALENCE_2 in names and min(valence) < 2:
            return False
        if GraphFilter.MAX_VALENCE_3 in names and max(valence) > 3:
            return False
        if GraphFilter.IN_AND_OUT in names and (min(outs) == 0 or min(ins) == 0):
            return False
        if GraphFilter.NO_PASSING_BIVALENT in names and any(
            o == 1 and i == 1 for o, i in zip(outs, ins)
        ):
            return False
        if GraphFilter.NO_ADJACENT_BIVALENT in names and any(
            valence[t] == 2 and valence[h] == 2 for t, h in g.edges
        ):
            return False
        if GraphFilter.NO_TRIANGLE in names and has_triangle(g):
            return False
        if GraphFilter.CONNECTED in names and not is_connected(g):
            return False
        if GraphFilter.ORIENTED in names and not is_oriented(g):
            return False
        return True

    def __str__(self) -> str:
        return ",".join(sorted(n.value for n in self.names)) or "none"


# ---------------------------------------------------------------------------
# 文本编码与图向量
# ---------------------------------------------------------------------------


def encode_graph(g: DirectedGraph, d: int) -> str:
    edges = ",".join(f"{t}>{h}" for t, h in sorted(g.edges))
    return f"d{d};k{g.vertex_count};E:{edges}"


def decode_graph(text: str) -> Tuple[DirectedGraph, int]:
    try:
        d_part, k_part, e_part = text.strip().split(";")
        d = int(d_part[1:])
        k = int(k_part[1:])
        body = e_part.split(":", 1)[1]
        edges = [tuple(map(int, item.split(">"))) for item in body.split(",") if item]
    except (ValueError, IndexError) as e:
        raise StructuralError(f"无法解析图编码 {text!r}: {e}") from e
    return DirectedGraph(k, tuple(edges), any(t == h for t, h in edges)), d


def format_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


class GraphVector:
    """SignedGraphClass 的有限有理线性组合；键为规范图，不存零系数和零类"""

    __slots__ = ("d", "_terms")

    def __init__(self, d: int, terms: Optional[Dict[DirectedGraph, Fraction]] = None):
        _check_dimension(d)
        self.d = d
        self._terms: Dict[DirectedGraph, Fraction] = {}
        for g, c in (terms or {}).items():
            self._accumulate_class(g, Fraction(c))

    # -- 构造 ------------------------------------------------------------
    @classmethod
    def from_graph(cls, g: DirectedGraph, d: int, coeff=1) -> "GraphVector":
        vec = cls(d)
        vec._accumulate_labeled(g, Fraction(coeff))
        return vec

    @classmethod
    def from_labeled(cls, d: int, terms: Iterable[Tuple[DirectedGraph, object]]) -> "GraphVector":
        vec = cls(d)
        for g, c in terms:
            vec._accumulate_labeled(g, Fraction(c))
        return vec

    @classmethod
    def from_class(cls, c: SignedGraphClass, coeff=1) -> "GraphVector":
        vec = cls(c.dimension_flavor)
        if not c.is_zero:
            vec._accumulate_class(c.graph, Fraction(coeff) * c.sign)
        return vec

    def _accumulate_class(self, canonical: DirectedGraph, coeff: Fraction) -> None:
        if not coeff:
            return
        value = self._terms.get(canonical, Fraction(0)) + coeff
        if value:
            self._terms[canonical] = value
        else:
            self._terms.pop(canonical, None)

    def _accumulate_labeled(self, g: DirectedGraph, coeff: Fraction) -> None:
        if not coeff:
            return
        c = canonicalize(g, self.d)
        if not c.is_zero:
            self._accumulate_class(c.graph, coeff * c.sign)

    # -- 访问 ------------------------------------------------------------
    def items(self) -> List[Tuple[DirectedGraph, Fraction]]:
        return sorted(self._terms.items(), key=lambda item: (item[0].vertex_count, item[0].edges))

    def classes(self) -> List[SignedGraphClass]:
        return [SignedGraphClass(g, 1, self.d) for g, _ in self.items()]

    def coefficient(self, g: DirectedGraph) -> Fraction:
        """g 可以是任意标号的图，返回其在本向量中的系数"""
        c = canonicalize(g, self.d)
        if c.is_zero:
            return Fraction(0)
        return self._terms.get(c.graph, Fraction(0)) * c.sign

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self.items())

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def vertex_counts(self) -> List[int]:
        return sorted({g.vertex_count for g in self._terms})

    def restrict(self, predicate: Callable[[DirectedGraph], bool]) -> "GraphVector":
        return GraphVector(self.d, {g: c for g, c in self._terms.items() if predicate(g)})

    def truncate(self, vertex_cutoff: int) -> "GraphVector":
        return self.restrict(lambda g: g.vertex_count <= vertex_cutoff)

    # -- 线性运算 --------------------------------------------------------
    def _check_other(self, other: "GraphVector") -> None:
        if self.d != other.d and self._terms and other._terms:
            raise FlavorMismatchError(f"维数不一致: d={self.d} 与 d={other.d}")

    def __add__(self, other: "GraphVector") -> "GraphVector":
        self._check_other(other)
        result = GraphVector(self.d if self._terms else other.d, self._terms)
        for g, c in other._terms.items():
            result._accumulate_class(g, c)
        return result

    def __neg__(self) -> "GraphVector":
        return GraphVector(self.d, {g: -c for g, c in self._terms.items()})

    def __sub__(self, other: "GraphVector") -> "GraphVector":
        return self + (-other)

    def __mul__(self, scalar) -> "GraphVector":
        scalar = Fraction(scalar)
        return GraphVector(self.d, {g: c * scalar for g, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self._terms
        if not isinstance(other, GraphVector):
            return NotImplemented
        if not self._terms and not other._terms:
            return True
        return self.d == other.d and self._terms == other._terms

    def __hash__(self):
        return hash((self.d, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return f"GraphVector(d={self.d}, 0)"
        body = " + ".join(f"({format_fraction(c)})[{g}]" for g, c in self.items())
        return f"GraphVector(d={self.d}, {body})"


def vector_to_json(v: GraphVector) -> str:
    records = [
        {"graph": encode_graph(g, v.d), "coeff": format_fraction(c)} for g, c in v.items()
    ]
    return json.dumps(records, indent=2, ensure_ascii=False)


def vector_from_json(text: str, d: Optional[int] = None) -> GraphVector:
    records = json.loads(text)
    vec: Optional[GraphVector] = GraphVector(d) if d is not None else None
    for record in records:
        g, gd = decode_graph(record["graph"])
        if vec is None:
            vec = GraphVector(gd)
        elif gd != vec.d:
            raise FlavorMismatchError(f"记录维数 {gd} 与向量维数 {vec.d} 不一致")
        vec._accumulate_labeled(g, Fraction(record["coeff"]))
    return vec if vec is not None else GraphVector(2)


# ---------------------------------------------------------------------------
# 枚举
# ---------------------------------------------------------------------------


def search_space_estimate(k: int, l: int, filters: FilterSet) -> int:
    """未剪枝的搜索空间规模（资源保护使用）"""
    if _uses_connectors(filters):
        total = 0
        for n_b, c in _connector_splits(k, l):
            e = l - n_b
            total += comb(c * (c + 1) // 2 + e - 1, e) if e else 1
        return total
    pairs = k * (k - 1) // 2
    return comb(pairs + l - 1, l) if l else 1


def _uses_connectors(filters: FilterSet) -> bool:
    return GraphFilter.MIN_VALENCE_2 in filters and GraphFilter.NO_ADJACENT_BIVALENT in filters


def _connector_splits(k: int, l: int) -> List[Tuple[int, int]]:
    """(二价顶点数, 核心顶点数)"""
    splits = []
    for n_b in range(max(0, 3 * k - 2 * l), l // 2 + 1):
        c = k - n_b
        if c >= 1:
            splits.append((n_b, c))
    return splits


ColoredEdge = Tuple[int, int, int]
PLAIN, CONNECTOR = 0, 1


def _multigraph_classes(
    k: int,
    budget: Dict[int, int],
    loop_colors: FrozenSet[int],
    degree_floor: int,
    degree_cap: Optional[int],
    triangle_free: bool,
    connected: bool,
) -> List[Tuple[ColoredEdge, ...]]:
    """逐边增长的带颜色无向多重图，每层按规范证书去重；剪枝条件对删边遗传"""
    total = sum(budget.values())
    colors_in_order = sorted(budget)
    level: Dict[Tuple, Tuple[ColoredEdge, ...]] = {(): ()}

    for placed in range(total):
        remaining_after = total - placed - 1
        next_level: Dict[Tuple, Tuple[ColoredEdge, ...]] = {}
        for edges in level.values():
            used = Counter(c for _, _, c in edges)
            # 先放完低编号颜色再放下一种颜色
            color = next(c for c in colors_in_order if used[c] < budget[c])
            for u in range(k):
                for v in range(u, k):
                    if u == v and color not in loop_colors:
                        continue
                    candidate = edges + ((u, v, color),)
                    if not _admissible(
                        k, candidate, remaining_after, degree_floor, degree_cap,
                        triangle_free, connected,
                    ):
                        continue
                    key = undirected_certificate(k, candidate)
                    if key not in next_level:
                        next_level[key] = key
        level = next_level
        log_debug(f"多重图增长: {placed + 1}/{total} 条边, {len(level)} 个同构类", logger)
        if not level:
            break
    return list(level.values())


def _admissible(
    k: int,
    edges: Sequence[ColoredEdge],
    remaining: int,
    degree_floor: int,
    degree_cap: Optional[int],
    triangle_free: bool,
    connected: bool,
) -> bool:
    deg = [0] * k
    for u, v, _ in edges:
        deg[u] += 1
        deg[v] += 1
    if degree_cap is not None and max(deg) > degree_cap:
        return False
    if degree_floor and sum(max(0, degree_floor - x) for x in deg) > 2 * remaining:
        return False
    if triangle_free:
        plain = [set() for _ in range(k)]
        linked = [set() for _ in range(k)]
        for u, v, c in edges:
            if u == v:
                continue
            (plain if c == PLAIN else linked)[u].add(v)
            (plain if c == PLAIN else linked)[v].add(u)
        for u in range(k):
            if plain[u] & linked[u]:
                return False
            for v in plain[u]:
                if v > u and plain[u] & plain[v]:
                    return False
    if connected:
        parent = list(range(k))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, _ in edges:
            parent[find(u)] = find(v)
        components = len({find(x) for x in range(k)})
        if components - 1 > remaining:
            return False
    return True


def _plain_choices(
    multiplicity: int, d: int, oriented: bool
) -> List[int]:
    """μ 条平行无向边中朝 u→v 的条数"""
    choices = []
    for a in range(multiplicity + 1):
        if oriented and a not in (0, multiplicity):
            continue
        if d % 2 == 0 and (a > 1 or multiplicity - a > 1):
            continue
        choices.append(a)
    return choices


def _orientations(
    k: int,
    core: Sequence[ColoredEdge],
    d: int,
    filters: FilterSet,
) -> Iterator[DirectedGraph]:
    """核心多重图的所有定向；连接边展开为新的二价顶点"""
    oriented = GraphFilter.ORIENTED in filters
    no_passing = GraphFilter.NO_PASSING_BIVALENT in filters
    plain_groups = Counter((u, v) for u, v, c in core if c == PLAIN)
    connector_groups = Counter((u, v) for u, v, c in core if c == CONNECTOR)

    plain_options = []
    for (u, v), mu in sorted(plain_groups.items()):
        options = []
        for a in _plain_choices(mu, d, oriented):
            options.append(((u, v),) * a + ((v, u),) * (mu - a))
        plain_options.append(options)

    connector_options = []
    for (u, v), mu in sorted(connector_groups.items()):
        kinds = ["sink", "source"]
        if not no_passing:
            kinds += ["forward"] if u == v else ["forward", "backward"]
        connector_options.append([((u, v), combo) for combo in itertools.combinations_with_replacement(kinds, mu)])

    for plain_choice in itertools.product(*plain_options):
        base = [e for group in plain_choice for e in group]
        for connector_choice in itertools.product(*connector_options):
            edges = list(base)
            next_vertex = k
            for (u, v), combo in connector_choice:
                for kind in combo:
                    b = next_vertex
                    next_vertex += 1
                    if kind == "sink":
                        edges += [(u, b), (v, b)]
                    elif kind == "source":
                        edges += [(b, u), (b, v)]
                    elif kind == "forward":
                        edges += [(u, b), (b, v)]
                    else:
                        edges += [(v, b), (b, u)]
            yield DirectedGraph(next_vertex, tuple(edges))


def enumerate_graphs(
    k: int,
    l: int,
    filters: Optional[FilterSet] = None,
    d: int = 2,
    labeled: bool = False,
    max_search_space: Optional[int] = None,
) -> List[SignedGraphClass]:
    """k 顶点 l 条边、通过过滤器的全部非零规范类（各一次）

    labeled=True 时返回所有带标号的图（不做同构约化）。
    """
    if k < 1 or l < 0:
        raise StructuralError(f"需要 k ≥ 1, l ≥ 0: k={k}, l={l}")
    _check_dimension(d)
    filters = filters or FilterSet()

    if labeled:
        return _enumerate_labeled(k, l, filters, d, max_search_space)

    estimate = search_space_estimate(k, l, filters)
    if max_search_space is not None and estimate > max_search_space:
        raise ResourceGuardError(
            f"搜索空间 {estimate} 超过上限 {max_search_space} (k={k}, l={l}, 过滤器={filters})",
            estimate,
        )

    found: Dict[DirectedGraph, SignedGraphClass] = {}

    def collect(g: DirectedGraph) -> None:
        if not filters.passes(g):
            return
        c = canonicalize(g, d)
        if not c.is_zero and c.graph not in found:
            found[c.graph] = SignedGraphClass(c.graph, 1, d)

    cap = 3 if GraphFilter.MAX_VALENCE_3 in filters else None
    triangle_free = GraphFilter.NO_TRIANGLE in filters
    connected = GraphFilter.CONNECTED in filters

    if _uses_connectors(filters):
        for n_b, c in _connector_splits(k, l):
            budget = {PLAIN: l - 2 * n_b, CONNECTOR: n_b}
            cores = _multigraph_classes(
                c, budget, frozenset({CONNECTOR}), 3, cap, triangle_free, connected
            )
            log_debug(f"二价顶点 {n_b} 个: {len(cores)} 个核心多重图", logger)
            for core in cores:
                for g in _orientations(c, core, d, filters):
                    collect(g)
    else:
        floor = 2 if GraphFilter.MIN_VALENCE_2 in filters else 0
        for core in _multigraph_classes(
            k, {PLAIN: l}, frozenset(), floor, cap, triangle_free, connected
        ):
            for g in _orientations(k, core, d, filters):
                collect(g)

    return sorted(found.values(), key=lambda c: c.graph.edges)


def _enumerate_labeled(
    k: int, l: int, filters: FilterSet, d: int, max_search_space: Optional[int]
) -> List[SignedGraphClass]:
    arcs = [(t, h) for t in range(k) for h in range(k) if t != h]
    estimate = comb(len(arcs) + l - 1, l) if l else 1
    if max_search_space is not None and estimate > max_search_space:
        raise ResourceGuardError(f"带标号搜索空间 {estimate} 超过上限 {max_search_space}", estimate)
    pick = itertools.combinations if d % 2 == 0 else itertools.combinations_with_replacement
    result = []
    for edges in pick(arcs, l):
        g = DirectedGraph(k, edges)
        if filters.passes(g):
            result.append(SignedGraphClass(g, 1, d))
    return result

"""
图复形模块
算子 DGra_d 的插入复合、Lie 括号、微分、子复形投影、上同调维数与 Maurer-Cartan 元素的归纳求解
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from .core.errors import FlavorMismatchError, ObstructionError, StructuralError, VerificationError
from .graphcore import (
    DirectedGraph,
    FilterSet,
    GraphFilter,
    GraphVector,
    SignedGraphClass,
    canonicalize,
    degree,
    enumerate_graphs,
)
from .linalg import SparseSystem, dense_rank, to_dense
from .utils import get_logger, log_debug, log_info

logger = get_logger("gcomplex")

LabeledTerm = Tuple[int, DirectedGraph]


class Subcomplex(str, Enum):
    FULL = "full"
    CONNECTED_BIVALENT = "connected-bivalent"
    ORIENTED = "oriented"
    ORIENTED_CONNECTED = "oriented-connected"


_ALIASES = {
    "dfgc": Subcomplex.FULL,
    "full": Subcomplex.FULL,
    "dgc": Subcomplex.CONNECTED_BIVALENT,
    "connected-bivalent": Subcomplex.CONNECTED_BIVALENT,
    "fgc-or": Subcomplex.ORIENTED,
    "fgc_or": Subcomplex.ORIENTED,
    "oriented": Subcomplex.ORIENTED,
    "gc-or": Subcomplex.ORIENTED_CONNECTED,
    "gc_or": Subcomplex.ORIENTED_CONNECTED,
    "oriented-connected": Subcomplex.ORIENTED_CONNECTED,
}


@dataclass(frozen=True)
class FlavorSpec:
    """维数 d 与子复形类型"""

    d: int
    subcomplex: Subcomplex = Subcomplex.FULL

    def __post_init__(self):
        if self.d < 2:
            raise StructuralError(f"图复形要求 d ≥ 2: {self.d}")

    @classmethod
    def parse(cls, text: str) -> "FlavorSpec":
        """解析 "GC_or_2"、"dfGC_3"、"oriented-connected:2" 一类写法"""
        raw = text.strip()
        if ":" in raw:
            name, d = raw.rsplit(":", 1)
        else:
            name, _, d = raw.rpartition("_")
        key = name.lower().replace("^", "_")
        if key not in _ALIASES:
            raise StructuralError(f"未知的子复形: {text}")
        return cls(int(d), _ALIASES[key])

    @property
    def filters(self) -> FilterSet:
        if self.subcomplex is Subcomplex.CONNECTED_BIVALENT:
            return FilterSet.of(GraphFilter.CONNECTED, GraphFilter.MIN_VALENCE_2)
        if self.subcomplex is Subcomplex.ORIENTED:
            return FilterSet.of(GraphFilter.ORIENTED)
        if self.subcomplex is Subcomplex.ORIENTED_CONNECTED:
            return FilterSet.of(
                GraphFilter.ORIENTED,
                GraphFilter.CONNECTED,
                GraphFilter.MIN_VALENCE_2,
                GraphFilter.NO_PASSING_BIVALENT,
            )
        return FilterSet()

    def __str__(self) -> str:
        return f"{self.subcomplex.value}:{self.d}"


@dataclass(frozen=True)
class CohomologyDims:
    cocycle_dim: int
    coboundary_dim: int
    h_dim: int


# ---------------------------------------------------------------------------
# 插入与括号
# ---------------------------------------------------------------------------


def insert_labeled(g1: DirectedGraph, i: int, g2: DirectedGraph, d: int) -> List[LabeledTerm]:
    """把 g2 代入 g1 的第 i 个顶点，悬挂半边遍历重新连接到 g2 的所有顶点

    g2 的顶点占据位置 i..i+k₂−1；边表为 g1 的边接 g2 的边。
    """
    k1, k2 = g1.vertex_count, g2.vertex_count
    if not 0 <= i < k1:
        raise StructuralError(f"插入位置 {i} 超出 [0, {k1})")

    def shift(v: int) -> int:
        return v if v < i else v + k2 - 1

    sign = 1 if d % 2 == 0 else (-1) ** (i * (k2 - 1))
    inner = tuple((t + i, h + i) for t, h in g2.edges)

    # 每个悬挂半边: (边序号, 0=尾 / 1=头)
    dangling = [(n, end) for n, e in enumerate(g1.edges) for end in (0, 1) if e[end] == i]
    loops = g1.loops_allowed or g2.loops_allowed
    terms: List[LabeledTerm] = []

    def attach(position: int, current: List[List[int]]) -> None:
        if position == len(dangling):
            edges = tuple((a, b) for a, b in current) + inner
            if loops or all(a != b for a, b in edges):
                terms.append((sign, DirectedGraph(k1 + k2 - 1, edges, loops)))
            return
        n, end = dangling[position]
        for target in range(i, i + k2):
            current[n][end] = target
            attach(position + 1, current)

    base = [[shift(t), shift(h)] for t, h in g1.edges]
    attach(0, base)
    return terms


def _check_flavor(a: GraphVector, b: GraphVector) -> None:
    if a.d != b.d and a and b:
        raise FlavorMismatchError(f"维数不一致: d={a.d} 与 d={b.d}")


def _accumulate(
    target: Dict[DirectedGraph, Fraction],
    terms: List[LabeledTerm],
    coeff: Fraction,
    d: int,
    keep: Optional[Callable[[DirectedGraph], bool]],
) -> None:
    for sign, g in terms:
        if keep is not None and not keep(g):
            continue
        c = canonicalize(g, d)
        if c.is_zero:
            continue
        value = target.get(c.graph, Fraction(0)) + coeff * sign * c.sign
        if value:
            target[c.graph] = value
        else:
            target.pop(c.graph, None)


def _pre_lie_into(
    target: Dict[DirectedGraph, Fraction],
    a: GraphVector,
    b: GraphVector,
    scale: Fraction,
    d: int,
    keep: Optional[Callable[[DirectedGraph], bool]],
    sign_rule: Optional[Callable[[DirectedGraph, DirectedGraph], int]],
    vertex_cutoff: Optional[int],
) -> None:
    for ga, ca in a.items():
        for gb, cb in b.items():
            if vertex_cutoff is not None and ga.vertex_count + gb.vertex_count - 1 > vertex_cutoff:
                continue
            factor = scale * ca * cb * (sign_rule(ga, gb) if sign_rule else 1)
            for i in range(ga.vertex_count):
                _accumulate(target, insert_labeled(ga, i, gb, d), factor, d, keep)


def insert(g1: SignedGraphClass, i: int, g2: SignedGraphClass) -> GraphVector:
    """单次插入 g1 ∘_i g2，结果逐项规范化"""
    if g1.dimension_flavor != g2.dimension_flavor:
        raise FlavorMismatchError(
            f"维数不一致: d={g1.dimension_flavor} 与 d={g2.dimension_flavor}"
        )
    d = g1.dimension_flavor
    terms: Dict[DirectedGraph, Fraction] = {}
    _accumulate(terms, insert_labeled(g1.graph, i, g2.graph, d), Fraction(g1.sign * g2.sign), d, None)
    return GraphVector(d, terms)


def pre_lie(a: GraphVector, b: GraphVector) -> GraphVector:
    """a • b = Σ_i a ∘_i b"""
    _check_flavor(a, b)
    d = a.d if a else b.d
    terms: Dict[DirectedGraph, Fraction] = {}
    _pre_lie_into(terms, a, b, Fraction(1), d, None, None, None)
    return GraphVector(d, terms)


def bracket(
    a: GraphVector,
    b: GraphVector,
    flavor: Optional[FlavorSpec] = None,
    vertex_cutoff: Optional[int] = None,
) -> GraphVector:
    """分次交换子 [a, b] = a•b − (−1)^{|a||b|} b•a

    给定 flavor 时，不满足其过滤器的项在规范化之前丢弃；
    给定 vertex_cutoff 时，跳过顶点数超过上限的配对。
    """
    _check_flavor(a, b)
    d = a.d if a else b.d
    if flavor is not None and flavor.d != d and (a or b):
        raise FlavorMismatchError(f"子复形 {flavor} 与向量维数 d={d} 不一致")
    keep = flavor.filters.passes if flavor is not None and flavor.filters.names else None
    terms: Dict[DirectedGraph, Fraction] = {}
    _pre_lie_into(terms, a, b, Fraction(1), d, keep, None, vertex_cutoff)

    def koszul(gb: DirectedGraph, ga: DirectedGraph) -> int:
        return -((-1) ** ((degree(ga, d) * degree(gb, d)) % 2))

    _pre_lie_into(terms, b, a, Fraction(1), d, keep, koszul, vertex_cutoff)
    return GraphVector(d, terms)


def m_element(d: int) -> GraphVector:
    """m = (1→2) + (−1)^d (2→1)，作为类即 2·[0→1]"""
    return GraphVector.from_labeled(
        d, [(DirectedGraph(2, ((0, 1),)), 1), (DirectedGraph(2, ((1, 0),)), (-1) ** d)]
    )


def differential(v: GraphVector, flavor: Optional[FlavorSpec] = None) -> GraphVector:
    """δv = [m, v]"""
    if not v:
        return GraphVector(v.d)
    return bracket(m_element(v.d), v, flavor)


def project(v: GraphVector, f: FlavorSpec) -> GraphVector:
    """丢弃不满足子复形过滤器的类"""
    if v and v.d != f.d:
        raise FlavorMismatchError(f"向量维数 d={v.d} 与子复形 {f} 不一致")
    return v.restrict(f.filters.passes)


# ---------------------------------------------------------------------------
# 线性代数：基、微分矩阵、上同调
# ---------------------------------------------------------------------------


def basis(f: FlavorSpec, k: int, l: int, max_search_space: Optional[int] = None) -> List[SignedGraphClass]:
    if k < 1 or l < 0:
        return []
    return enumerate_graphs(k, l, f.filters, f.d, max_search_space=max_search_space)


def differential_system(
    f: FlavorSpec, k: int, l: int, max_search_space: Optional[int] = None
) -> SparseSystem:
    """δ: C(k,l) → C(k+1,l+1) 的稀疏矩阵（列为源基，行为像中出现的类）"""
    source = basis(f, k, l, max_search_space)
    images = []
    for index, c in enumerate(source):
        images.append(dict(differential(GraphVector.from_class(c), f).items()))
        if index and index % 200 == 0:
            log_debug(f"组装 δ 列: {index}/{len(source)}", logger)
    return SparseSystem.from_columns([c.graph for c in source], images)


def cohomology_dim(
    f: FlavorSpec,
    k: int,
    l: int,
    max_search_space: Optional[int] = None,
    check_dense: bool = False,
) -> CohomologyDims:
    """在 (k, l) 处的闭链维数、恰当链维数与上同调维数"""
    outgoing = differential_system(f, k, l, max_search_space)
    n = len(outgoing.columns)
    if n == 0:
        return CohomologyDims(0, 0, 0)
    incoming = differential_system(f, k - 1, l - 1, max_search_space) if k > 1 and l > 0 else SparseSystem()

    rank_out = outgoing.rank()
    rank_in = incoming.rank()
    if check_dense:
        dense_out = dense_rank(to_dense(outgoing))
        dense_in = dense_rank(to_dense(incoming))
        if (dense_out, dense_in) != (rank_out, rank_in):
            raise VerificationError(
                f"稀疏秩 ({rank_out}, {rank_in}) 与稠密秩 ({dense_out}, {dense_in}) 不一致",
                {"sparse": (rank_out, rank_in), "dense": (dense_out, dense_in)},
            )
    cocycle = n - rank_out
    log_info(f"{f} (k={k}, l={l}): 闭链 {cocycle}, 恰当 {rank_in}", logger)
    return CohomologyDims(cocycle, rank_in, cocycle - rank_in)


def cocycle_representatives(
    f: FlavorSpec, k: int, l: int, max_search_space: Optional[int] = None
) -> List[GraphVector]:
    """上同调代表元：核向量中不落在 δ 像张成空间里的那些（贪心挑选）"""
    outgoing = differential_system(f, k, l, max_search_space)
    kernel = outgoing.kernel_basis()
    if not kernel:
        return []
    incoming = differential_system(f, k - 1, l - 1, max_search_space) if k > 1 and l > 0 else SparseSystem()
    chosen: List[Dict] = []
    image_columns = [
        {incoming.rows[i]: v for (i, j), v in incoming.entries.items() if j == col}
        for col in range(len(incoming.columns))
    ]
    current = SparseSystem.from_columns(range(len(image_columns)), image_columns).rank()
    for vector in kernel:
        trial = image_columns + chosen + [vector]
        rank = SparseSystem.from_columns(range(len(trial)), trial).rank()
        if rank > current:
            chosen.append(vector)
            current = rank
    return [GraphVector(f.d, vector) for vector in chosen]


def is_exact(v: GraphVector, f: FlavorSpec, max_search_space: Optional[int] = None) -> bool:
    """v（齐次：单一 (k, l)）是否为 δ 的像"""
    if not v:
        return True
    sectors = {(g.vertex_count, g.edge_count) for g, _ in v.items()}
    if len(sectors) != 1:
        raise StructuralError("is_exact 需要单一 (k, l) 扇区的向量")
    k, l = sectors.pop()
    system = differential_system(f, k - 1, l - 1, max_search_space)
    try:
        system.solve(dict(v.items()))
    except ObstructionError:
        return False
    return True


def export_differential(f: FlavorSpec, k: int, l: int, max_search_space: Optional[int] = None) -> str:
    return differential_system(f, k, l, max_search_space).to_matrix_market()


# ---------------------------------------------------------------------------
# Maurer-Cartan 元素
# ---------------------------------------------------------------------------

_UPSILON4_GRAPHS = (
    DirectedGraph(4, ((0, 3), (3, 1), (3, 2), (0, 1), (0, 2))),
    DirectedGraph(4, ((2, 3), (1, 3), (1, 2), (0, 1), (0, 2))),
    DirectedGraph(4, ((1, 3), (2, 3), (3, 0), (1, 0), (2, 0))),
)


def upsilon4(lam=1) -> GraphVector:
    """Υ₄ = λ(G₁ + 2G₂ + G₃)，各项相对符号由未投影的 δΥ₄ = 0 确定"""
    d = 2
    g1, g2, g3 = _UPSILON4_GRAPHS
    residual = None
    for s2 in (1, -1):
        for s3 in (1, -1):
            candidate = GraphVector.from_labeled(d, [(g1, 1), (g2, 2 * s2), (g3, s3)])
            boundary = differential(candidate)
            if boundary.is_zero:
                return candidate * lam
            if residual is None or len(boundary) < len(residual):
                residual = boundary
    raise ObstructionError("找不到使 δΥ₄ = 0 的符号组合", residual)


def mc_defect(upsilon: GraphVector, vertex_cutoff: int) -> GraphVector:
    """½[υ, υ]，只保留顶点数 ≤ vertex_cutoff 的类"""
    if not upsilon:
        return GraphVector(upsilon.d)
    return (bracket(upsilon, upsilon, vertex_cutoff=vertex_cutoff) * Fraction(1, 2)).truncate(
        vertex_cutoff
    )


def mc_sector_edges(d: int, k: int) -> Optional[int]:
    """次数 1 的 k 顶点图的边数 l = (d(k−1) − 1)/(d − 1)，非整数时返回 None"""
    numerator = d * (k - 1) - 1
    if numerator < 0 or numerator % (d - 1):
        return None
    return numerator // (d - 1)


def mc_extend(
    upsilon: GraphVector,
    next_order: int,
    flavor: Optional[FlavorSpec] = None,
    max_search_space: Optional[int] = None,
) -> GraphVector:
    """求 next_order 顶点上的 x，使 δx = −½[υ, υ] 在 next_order+1 顶点处成立

    默认在 GC^or_d 中求解；障碍不恰当时抛出 ObstructionError（payload 为残差向量）。
    """
    d = upsilon.d
    if not upsilon:
        return GraphVector(d)
    flavor = flavor or FlavorSpec(d, Subcomplex.ORIENTED_CONNECTED)
    l = mc_sector_edges(d, next_order)
    if l is None:
        log_info(f"d={d} 时 {next_order} 顶点无次数 1 的扇区", logger)
        return GraphVector(d)

    target = next_order + 1
    obstruction = bracket(upsilon, upsilon, flavor, vertex_cutoff=target)
    obstruction = obstruction.restrict(lambda g: g.vertex_count == target) * Fraction(-1, 2)
    if obstruction.is_zero:
        log_info(f"{target} 顶点处障碍为零", logger)
        return GraphVector(d)

    system = differential_system(flavor, next_order, l, max_search_space)
    log_info(
        f"求解 Υ_{next_order}: {len(system.columns)} 个未知量, {len(system.rows)} 个方程", logger
    )
    try:
        solution = system.solve(dict(obstruction.items()))
    except ObstructionError as e:
        raise ObstructionError(str(e), GraphVector(d, e.residual)) from e
    return GraphVector(d, solution)

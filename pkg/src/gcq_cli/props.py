"""
Prop 模块
Lieb 与 Lieb∞ 的生成 corolla 及其微分、多重微分函子 D 中的图（白色输入/输出顶点加黑色内部顶点）、
水平与垂直复合、图诱导的导子 f(Γ)，以及可量子化 Lie 双代数的图集合

定向约定：黑顶点记号（次数 3）和黑顶点上的半边（次数 −1）都是奇元素，白顶点及白端为偶。
每个图带一个标准词：依黑顶点顺序写出 V_v、v 的出半边（内部边尾、再输出边）、v 的入半边（输入边头、再内部边头），
图项的符号是其词到标准词的置换符号。
"""

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .core.errors import FlavorMismatchError, ResourceGuardError, StructuralError
from .graphcore import (
    DirectedGraph,
    FilterSet,
    GraphFilter,
    GraphVector,
    SignedGraphClass,
    enumerate_graphs,
    format_fraction,
    permutation_sign,
)
from .utils import get_logger, log_debug, log_info

logger = get_logger("props")

Symbol = Tuple[str, int]
_CANONICAL_SEARCH_LIMIT = 2_000_000


@dataclass(frozen=True)
class Corolla:
    """Lieb∞ 的生成元 (m, n)：m 个输出、n 个输入"""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.m + self.n < 3:
            raise StructuralError(f"非法 corolla ({self.m}, {self.n})：需要 m, n ≥ 1 且 m + n ≥ 3")


@dataclass(frozen=True)
class PropGraph:
    """n 个带标号白色输入顶点、m 个带标号白色输出顶点、black 个无标号黑顶点的图

    e_in: (输入白顶点, 黑顶点)；e_int: (黑, 黑)；e_out: (黑顶点, 输出白顶点)。
    """

    m: int
    n: int
    black: int
    e_in: Tuple[Tuple[int, int], ...] = ()
    e_int: Tuple[Tuple[int, int], ...] = ()
    e_out: Tuple[Tuple[int, int], ...] = ()
    wheels_allowed: bool = False

    def __post_init__(self):
        for name in ("e_in", "e_int", "e_out"):
            object.__setattr__(self, name, tuple((int(a), int(b)) for a, b in getattr(self, name)))
        if min(self.m, self.n, self.black) < 0:
            raise StructuralError("顶点数不能为负")
        for j, v in self.e_in:
            if not (0 <= j < self.n and 0 <= v < self.black):
                raise StructuralError(f"输入边 {j}>{v} 越界")
        for v, i in self.e_out:
            if not (0 <= v < self.black and 0 <= i < self.m):
                raise StructuralError(f"输出边 {v}>{i} 越界")
        for u, v in self.e_int:
            if not (0 <= u < self.black and 0 <= v < self.black):
                raise StructuralError(f"内部边 {u}>{v} 越界")
            if u == v:
                raise StructuralError(f"不允许自环: {u}>{v}")
        if not self.wheels_allowed and _has_wheel(self.black, self.e_int):
            raise StructuralError("非 wheeled 图不允许有向圈")

    @property
    def signature(self) -> Tuple[int, int]:
        return self.m, self.n

    def vertex_halves(self, v: int) -> Tuple[List[Symbol], List[Symbol]]:
        """黑顶点 v 的出半边与入半边（标准顺序）"""
        outs = [("io", e) for e, (a, _) in enumerate(self.e_int) if a == v]
        outs += [("out", e) for e, (a, _) in enumerate(self.e_out) if a == v]
        ins = [("in", e) for e, (_, b) in enumerate(self.e_in) if b == v]
        ins += [("ii", e) for e, (_, b) in enumerate(self.e_int) if b == v]
        return outs, ins

    def standard_word(self) -> List[Symbol]:
        word: List[Symbol] = []
        for v in range(self.black):
            outs, ins = self.vertex_halves(v)
            word.append(("V", v))
            word.extend(outs)
            word.extend(ins)
        return word

    def encode(self) -> str:
        return prop_encode(self)

    def __str__(self) -> str:
        return prop_encode(self)


def _has_wheel(k: int, e_int: Sequence[Tuple[int, int]]) -> bool:
    if not e_int:
        return False
    graph = nx.DiGraph()
    graph.add_nodes_from(range(k))
    graph.add_edges_from(e_int)
    return not nx.is_directed_acyclic_graph(graph)


def d_degree(g: PropGraph) -> int:
    """|Γ| = 3|V_int| − 2|E_int| − |E_in| − |E_out|"""
    return 3 * g.black - 2 * len(g.e_int) - len(g.e_in) - len(g.e_out)


def corolla(m: int, n: int) -> PropGraph:
    """单个黑顶点、m 条输出腿、n 条输入腿"""
    Corolla(m, n)
    return _corolla_graph(m, n)


def _corolla_graph(m: int, n: int) -> PropGraph:
    return PropGraph(
        m,
        n,
        1,
        e_in=tuple((j, 0) for j in range(n)),
        e_out=tuple((0, i) for i in range(m)),
    )


def _word_sign(word: Sequence[Symbol], target: Sequence[Symbol]) -> int:
    position = {s: i for i, s in enumerate(target)}
    if len(position) != len(word):
        raise StructuralError("词与标准词的记号不一致")
    return permutation_sign([position[s] for s in word])


# ---------------------------------------------------------------------------
# 规范形式
# ---------------------------------------------------------------------------


def _refine_blacks(g: PropGraph) -> List[int]:
    ins = [sorted(j for j, b in g.e_in if b == v) for v in range(g.black)]
    outs = [sorted(i for a, i in g.e_out if a == v) for v in range(g.black)]
    colors = [
        (tuple(ins[v]), tuple(outs[v]), sum(1 for a, _ in g.e_int if a == v), sum(1 for _, b in g.e_int if b == v))
        for v in range(g.black)
    ]
    colors = _normalize(colors)
    while True:
        signature = [
            (
                colors[v],
                tuple(sorted(colors[b] for a, b in g.e_int if a == v)),
                tuple(sorted(colors[a] for a, b in g.e_int if b == v)),
            )
            for v in range(g.black)
        ]
        refined = _normalize(signature)
        if len(set(refined)) == len(set(colors)):
            return refined
        colors = refined


def _normalize(values: Sequence) -> List[int]:
    order = {value: i for i, value in enumerate(sorted(set(values)))}
    return [order[v] for v in values]


def _relabel(g: PropGraph, new: Sequence[int]) -> Tuple[PropGraph, Dict[Symbol, Symbol]]:
    """黑顶点 v 改名为 new[v]，各类边排序；返回新图与记号映射"""
    mapping: Dict[Symbol, Symbol] = {("V", v): ("V", new[v]) for v in range(g.black)}

    def sort_edges(edges, rename, tags):
        renamed = [rename(e) for e in edges]
        order = sorted(range(len(renamed)), key=renamed.__getitem__)
        for new_index, old_index in enumerate(order):
            for tag in tags:
                mapping[(tag, old_index)] = (tag, new_index)
        return tuple(renamed[i] for i in order)

    e_in = sort_edges(g.e_in, lambda e: (e[0], new[e[1]]), ("in",))
    e_int = sort_edges(g.e_int, lambda e: (new[e[0]], new[e[1]]), ("io", "ii"))
    e_out = sort_edges(g.e_out, lambda e: (new[e[0]], e[1]), ("out",))
    return PropGraph(g.m, g.n, g.black, e_in, e_int, e_out, g.wheels_allowed), mapping


def canonicalize_prop(g: PropGraph) -> Tuple[PropGraph, int]:
    """返回 (规范图, 符号)：g（带标准词）= 符号 · 规范图；存在奇自同构时符号为 0"""
    if len(set(g.e_in)) < len(g.e_in) or len(set(g.e_out)) < len(g.e_out):
        relabeled, _ = _relabel(g, list(range(g.black)))
        return relabeled, 0

    colors = _refine_blacks(g)
    groups: Dict[int, List[int]] = {}
    for v, c in enumerate(colors):
        groups.setdefault(c, []).append(v)
    ordered = [groups[c] for c in sorted(groups)]
    size = math.prod(math.factorial(len(members)) for members in ordered)
    if size > _CANONICAL_SEARCH_LIMIT:
        raise ResourceGuardError(f"黑顶点规范化搜索 {size} 超过上限", size)

    word = g.standard_word()
    best: Optional[Tuple] = None
    best_graph: Optional[PropGraph] = None
    signs = set()
    for choice in itertools.product(*(itertools.permutations(members) for members in ordered)):
        new = [0] * g.black
        position = 0
        for members in choice:
            for v in members:
                new[v] = position
                position += 1
        relabeled, mapping = _relabel(g, new)
        key = (relabeled.e_in, relabeled.e_int, relabeled.e_out)
        if best is not None and key > best:
            continue
        sign = _word_sign([mapping[s] for s in word], relabeled.standard_word())
        if best is None or key < best:
            best, best_graph, signs = key, relabeled, {sign}
        else:
            signs.add(sign)
    if best_graph is None:
        return g, 1
    return best_graph, (0 if len(signs) > 1 else signs.pop())


# ---------------------------------------------------------------------------
# 向量
# ---------------------------------------------------------------------------


class PropVector:
    """规范 PropGraph 的有理线性组合，(m, n) 签名一致"""

    __slots__ = ("_terms", "signature")

    def __init__(self, terms: Optional[Dict[PropGraph, Fraction]] = None, signature=None):
        self._terms: Dict[PropGraph, Fraction] = {}
        self.signature: Optional[Tuple[int, int]] = signature
        for g, c in (terms or {}).items():
            self.add_labeled(g, c)

    @classmethod
    def from_graph(cls, g: PropGraph, coeff=1) -> "PropVector":
        vec = cls(signature=g.signature)
        vec.add_labeled(g, coeff)
        return vec

    def add_labeled(self, g: PropGraph, coeff, word: Optional[Sequence[Symbol]] = None) -> None:
        """加入 coeff · (g, word)；word 缺省为标准词"""
        coeff = Fraction(coeff)
        if not coeff:
            return
        if self.signature is None:
            self.signature = g.signature
        elif self.signature != g.signature:
            raise StructuralError(f"签名不一致: {self.signature} 与 {g.signature}")
        if word is not None:
            coeff *= _word_sign(word, g.standard_word())
        canonical, sign = canonicalize_prop(g)
        if not sign:
            return
        value = self._terms.get(canonical, Fraction(0)) + coeff * sign
        if value:
            self._terms[canonical] = value
        else:
            self._terms.pop(canonical, None)

    def items(self) -> List[Tuple[PropGraph, Fraction]]:
        return sorted(self._terms.items(), key=lambda item: prop_encode(item[0]))

    def coefficient(self, g: PropGraph) -> Fraction:
        canonical, sign = canonicalize_prop(g)
        return self._terms.get(canonical, Fraction(0)) * sign

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self.items())

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: "PropVector") -> "PropVector":
        result = PropVector(signature=self.signature or other.signature)
        for source in (self, other):
            for g, c in source._terms.items():
                result._accumulate(g, c)
        return result

    def _accumulate(self, canonical: PropGraph, coeff: Fraction) -> None:
        if self.signature is not None and canonical.signature != self.signature:
            raise StructuralError(f"签名不一致: {self.signature} 与 {canonical.signature}")
        self.signature = canonical.signature
        value = self._terms.get(canonical, Fraction(0)) + coeff
        if value:
            self._terms[canonical] = value
        else:
            self._terms.pop(canonical, None)

    def __neg__(self) -> "PropVector":
        return self * -1

    def __sub__(self, other: "PropVector") -> "PropVector":
        return self + (-other)

    def __mul__(self, scalar) -> "PropVector":
        scalar = Fraction(scalar)
        result = PropVector(signature=self.signature)
        for g, c in self._terms.items():
            result._accumulate(g, c * scalar)
        return result

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self._terms
        if not isinstance(other, PropVector):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "PropVector(0)"
        return "PropVector(" + " + ".join(f"({format_fraction(c)})[{g}]" for g, c in self.items()) + ")"


DecoratedTreeVector = PropVector


# ---------------------------------------------------------------------------
# 复合
# ---------------------------------------------------------------------------


def horizontal_compose(g1: PropGraph, g2: PropGraph) -> PropGraph:
    """不交并，g2 的白顶点标号与黑顶点整体平移；标准词为两者标准词的拼接"""
    k1, m1, n1 = g1.black, g1.m, g1.n
    return PropGraph(
        g1.m + g2.m,
        g1.n + g2.n,
        g1.black + g2.black,
        g1.e_in + tuple((j + n1, v + k1) for j, v in g2.e_in),
        g1.e_int + tuple((u + k1, v + k1) for u, v in g2.e_int),
        g1.e_out + tuple((v + k1, i + m1) for v, i in g2.e_out),
        g1.wheels_allowed or g2.wheels_allowed,
    )


def _partial_injections(sources: Sequence[int], targets: Sequence[int]) -> Iterator[Dict[int, int]]:
    def extend(index: int, used: frozenset, current: Dict[int, int]):
        if index == len(sources):
            yield dict(current)
            return
        yield from extend(index + 1, used, current)
        for t in targets:
            if t not in used:
                current[sources[index]] = t
                yield from extend(index + 1, used | {t}, current)
                del current[sources[index]]

    yield from extend(0, frozenset(), {})


def vertical_compose(top: PropGraph, bottom: PropGraph) -> PropVector:
    """top ∘ bottom：top 的 (m, n) 接在 bottom 的 (n, l) 之上

    同一标号下 top 的悬挂输入腿与 bottom 的悬挂输出腿做部分单射配对，配对者成为内部边；
    其余 top 输入腿接到 bottom 的任一输入白顶点，其余 bottom 输出腿接到 top 的任一输出白顶点。
    """
    if top.n != bottom.m:
        raise StructuralError(f"签名无法复合: ({top.m},{top.n}) ∘ ({bottom.m},{bottom.n})")
    kt = top.black
    wheels = top.wheels_allowed or bottom.wheels_allowed
    result = PropVector(signature=(top.m, bottom.n))

    per_label = []
    for j in range(top.n):
        a = [e for e, (w, _) in enumerate(top.e_in) if w == j]
        b = [e for e, (_, w) in enumerate(bottom.e_out) if w == j]
        per_label.append(list(_partial_injections(a, b)))

    top_word, bottom_word = top.standard_word(), bottom.standard_word()
    for matchings in itertools.product(*per_label):
        matched = {a: b for matching in matchings for a, b in matching.items()}
        matched_b = set(matched.values())
        free_a = [e for e in range(len(top.e_in)) if e not in matched]
        free_b = [e for e in range(len(bottom.e_out)) if e not in matched_b]
        if (free_a and bottom.n == 0) or (free_b and top.m == 0):
            continue
        for in_targets in itertools.product(range(bottom.n), repeat=len(free_a)):
            for out_targets in itertools.product(range(top.m), repeat=len(free_b)):
                e_in = [(j, v + kt) for j, v in bottom.e_in]
                e_int = list(top.e_int) + [(u + kt, v + kt) for u, v in bottom.e_int]
                e_out = list(top.e_out)
                top_map: Dict[Symbol, Symbol] = {("V", v): ("V", v) for v in range(kt)}
                bottom_map: Dict[Symbol, Symbol] = {("V", v): ("V", v + kt) for v in range(bottom.black)}
                for e in range(len(top.e_int)):
                    top_map[("io", e)] = ("io", e)
                    top_map[("ii", e)] = ("ii", e)
                for e in range(len(bottom.e_int)):
                    bottom_map[("io", e)] = ("io", e + len(top.e_int))
                    bottom_map[("ii", e)] = ("ii", e + len(top.e_int))
                for e in range(len(top.e_out)):
                    top_map[("out", e)] = ("out", e)
                for e in range(len(bottom.e_in)):
                    bottom_map[("in", e)] = ("in", e)
                for a, target in zip(free_a, in_targets):
                    top_map[("in", a)] = ("in", len(e_in))
                    e_in.append((target, top.e_in[a][1]))
                for b, target in zip(free_b, out_targets):
                    bottom_map[("out", b)] = ("out", len(e_out))
                    e_out.append((bottom.e_out[b][0] + kt, target))
                for a, b in sorted(matched.items()):
                    index = len(e_int)
                    top_map[("in", a)] = ("ii", index)
                    bottom_map[("out", b)] = ("io", index)
                    e_int.append((bottom.e_out[b][0] + kt, top.e_in[a][1]))
                g = PropGraph(top.m, bottom.n, kt + bottom.black, tuple(e_in), tuple(e_int), tuple(e_out), wheels)
                word = [top_map[s] for s in top_word] + [bottom_map[s] for s in bottom_word]
                result.add_labeled(g, 1, word)
    return result


def compose_vectors(top: PropVector, bottom: PropVector) -> PropVector:
    """双线性扩张的垂直复合"""
    result = PropVector(
        signature=(top.signature[0], bottom.signature[1]) if top.signature and bottom.signature else None
    )
    for gt, ct in top.items():
        for gb, cb in bottom.items():
            result = result + vertical_compose(gt, gb) * (ct * cb)
    return result


# ---------------------------------------------------------------------------
# 图导子与 Lieb∞ 微分
# ---------------------------------------------------------------------------

GraphInput = Union[DirectedGraph, SignedGraphClass, GraphVector]


def _graph_terms(gamma: GraphInput) -> List[Tuple[DirectedGraph, Fraction]]:
    flavor = getattr(gamma, "d", getattr(gamma, "dimension_flavor", 3))
    if flavor % 2 == 0:
        raise FlavorMismatchError(f"图导子需要奇数维的图（顶点为奇元素），得到 d={flavor}")
    if isinstance(gamma, GraphVector):
        return [(g, c) for g, c in gamma.items()]
    if isinstance(gamma, SignedGraphClass):
        return [] if gamma.is_zero else [(gamma.graph, Fraction(gamma.sign))]
    return [(gamma, Fraction(1))]


def _substitute(
    gamma: DirectedGraph, g: PropGraph, coeff: Fraction, result: PropVector
) -> None:
    """对 g 的每个黑顶点 w，把 Γ 代入 w 并把 w 的半边分配到 Γ 的顶点上"""
    k_gamma = gamma.vertex_count
    if any(t == h for t, h in gamma.edges):
        return
    if not g.wheels_allowed and _has_wheel(k_gamma, gamma.edges):
        return
    word = g.standard_word()
    block_sign = 1 if (k_gamma - 1) % 2 == 0 else -1

    for w in range(g.black):
        position = word.index(("V", w))
        sign = block_sign**position
        outs, ins = g.vertex_halves(w)
        halves = outs + ins
        # Γ 的顶点 0 沿用 w 的编号，其余追加在末尾
        names = [w] + [g.black + i for i in range(k_gamma - 1)]
        base_int = len(g.e_int)
        new_int_edges = [(names[t], names[h]) for t, h in gamma.edges]
        block: List[Symbol] = [("V", name) for name in names]
        for e in range(len(gamma.edges)):
            block += [("io", base_int + e), ("ii", base_int + e)]
        new_word = word[:position] + block + word[position + 1 :]

        for assignment in itertools.product(range(k_gamma), repeat=len(halves)):
            outs_count = [0] * k_gamma
            ins_count = [0] * k_gamma
            for t, h in gamma.edges:
                outs_count[t] += 1
                ins_count[h] += 1
            for half, target in zip(halves, assignment):
                if half[0] in ("io", "out"):
                    outs_count[target] += 1
                else:
                    ins_count[target] += 1
            if any(
                o == 0 or i == 0 or o + i < 3 for o, i in zip(outs_count, ins_count)
            ):
                continue

            target_of = dict(zip(halves, assignment))
            e_in = [
                (j, names[target_of[("in", e)]]) if v == w else (j, v)
                for e, (j, v) in enumerate(g.e_in)
            ]
            e_int = []
            for e, (u, v) in enumerate(g.e_int):
                if u == w:
                    u = names[target_of[("io", e)]]
                if v == w:
                    v = names[target_of[("ii", e)]]
                e_int.append((u, v))
            e_int += new_int_edges
            e_out = [
                (names[target_of[("out", e)]], i) if v == w else (v, i)
                for e, (v, i) in enumerate(g.e_out)
            ]
            if not g.wheels_allowed and _has_wheel(g.black + k_gamma - 1, e_int):
                continue
            new_graph = PropGraph(
                g.m, g.n, g.black + k_gamma - 1, tuple(e_in), tuple(e_int), tuple(e_out), g.wheels_allowed
            )
            result.add_labeled(new_graph, coeff * sign, new_word)


def graph_derivation(gamma: GraphInput, v: PropVector) -> PropVector:
    """有向图 Γ（d = 3）诱导的导子 f(Γ)：逐个黑顶点代入 Γ，半边在 Γ 的顶点间重新分配

    结果中含价 < 3、无输入或无输出顶点的项丢弃；非 wheeled 时含有向圈的项丢弃。
    """
    result = PropVector(signature=v.signature)
    for graph, gc in _graph_terms(gamma):
        for g, c in v.items():
            _substitute(graph, g, gc * c, result)
    return result


_SPLIT = DirectedGraph(2, ((0, 1),))


def d_lieb_diff(v: PropVector) -> PropVector:
    """D Lieb∞ 中的微分：逐个黑顶点分裂为由一条内部边相连的两个合法顶点"""
    return graph_derivation(_SPLIT, v)


def lieb_infty_diff(c: Union[Corolla, PropGraph]) -> DecoratedTreeVector:
    """生成 corolla 上的微分：所有两顶点分裂，带 shuffle 符号"""
    if isinstance(c, Corolla):
        graph = _corolla_graph(c.m, c.n)
    else:
        Corolla(c.m, c.n)
        graph = c
    return d_lieb_diff(PropVector.from_graph(graph))


def attach_legs(gamma: GraphInput, m: int, n: int) -> DecoratedTreeVector:
    """f(Γ) 的 (m, n) 分量：m 条输出腿与 n 条输入腿以所有方式接到 Γ 的顶点上"""
    if m < 0 or n < 0:
        raise StructuralError(f"腿数不能为负: ({m}, {n})")
    if m + n == 0:
        return PropVector(signature=(m, n))
    return graph_derivation(gamma, PropVector.from_graph(_corolla_graph(m, n)))


# ---------------------------------------------------------------------------
# 小图枚举与可量子化图集合
# ---------------------------------------------------------------------------


def enumerate_prop_graphs(k: int, m: int, n: int, max_internal: int = 2) -> List[PropGraph]:
    """k ≤ 2 个黑顶点的小 PropGraph：每对白-黑顶点至多一条边，内部边只取 0→1 方向"""
    if k > 2:
        raise ResourceGuardError(f"小图枚举只支持 ≤ 2 个黑顶点: {k}")
    in_slots = [(j, v) for j in range(n) for v in range(k)]
    out_slots = [(v, i) for v in range(k) for i in range(m)]
    graphs = []
    seen = set()
    internal_options = [()] if k < 2 else [tuple([(0, 1)] * r) for r in range(max_internal + 1)]
    for in_mask in itertools.product((False, True), repeat=len(in_slots)):
        e_in = tuple(s for s, keep in zip(in_slots, in_mask) if keep)
        for out_mask in itertools.product((False, True), repeat=len(out_slots)):
            e_out = tuple(s for s, keep in zip(out_slots, out_mask) if keep)
            for e_int in internal_options:
                g = PropGraph(m, n, k, e_in, e_int, e_out)
                canonical, _ = canonicalize_prop(g)
                if canonical not in seen:
                    seen.add(canonical)
                    graphs.append(g)
    return graphs


QUANTIZABLE_FILTERS = FilterSet.of(
    GraphFilter.ORIENTED,
    GraphFilter.CONNECTED,
    GraphFilter.MIN_VALENCE_2,
    GraphFilter.NO_PASSING_BIVALENT,
    GraphFilter.NO_TRIANGLE,
    GraphFilter.NO_ADJACENT_BIVALENT,
)


def enumerate_quantizable_sets(
    p: int, max_valence: Optional[int] = None, max_search_space: Optional[int] = None
) -> List[SignedGraphClass]:
    """Ĝ^or_{4p+2, 6p+1}（d = 3），可选再限制最大价 ≤ 3

    p = 2 时总是完整枚举；p ≥ 3 时按 max_search_space 做资源保护。
    """
    if p < 1:
        raise StructuralError(f"p 必须 ≥ 1: {p}")
    filters = QUANTIZABLE_FILTERS
    if max_valence is not None:
        if max_valence != 3:
            raise StructuralError(f"只支持最大价 3: {max_valence}")
        filters = filters.union(FilterSet.of(GraphFilter.MAX_VALENCE_3))
    k, l = 4 * p + 2, 6 * p + 1
    bound = None if p <= 2 else (max_search_space or 2_000_000)
    graphs = enumerate_graphs(k, l, filters, d=3, max_search_space=bound)
    log_info(f"Ĝ^or_{{{k},{l}}}: {len(graphs)} 个图", logger)
    return graphs


# ---------------------------------------------------------------------------
# 文本编码
# ---------------------------------------------------------------------------


def prop_encode(g: PropGraph) -> str:
    def edges(items):
        return ",".join(f"{a}>{b}" for a, b in items)

    text = f"m{g.m};n{g.n};k{g.black};Ein:{edges(g.e_in)};Eint:{edges(g.e_int)};Eout:{edges(g.e_out)}"
    return text + (";W" if g.wheels_allowed else "")


def prop_decode(text: str) -> PropGraph:
    try:
        parts = text.strip().split(";")
        wheels = parts[-1] == "W"
        if wheels:
            parts = parts[:-1]
        m, n, k = int(parts[0][1:]), int(parts[1][1:]), int(parts[2][1:])

        def edges(part: str, tag: str):
            label, body = part.split(":", 1)
            if label != tag:
                raise ValueError(f"期望 {tag}，得到 {label}")
            return tuple(tuple(map(int, item.split(">"))) for item in body.split(",") if item)

        return PropGraph(
            m, n, k, edges(parts[3], "Ein"), edges(parts[4], "Eint"), edges(parts[5], "Eout"), wheels
        )
    except (ValueError, IndexError) as e:
        raise StructuralError(f"无法解析 PropGraph 编码 {text!r}: {e}") from e


def prop_vector_to_json(v: PropVector) -> str:
    records = [{"graph": prop_encode(g), "coeff": format_fraction(c)} for g, c in v.items()]
    return json.dumps(records, indent=2, ensure_ascii=False)


def prop_vector_from_json(text: str) -> PropVector:
    vec = PropVector()
    for record in json.loads(text):
        vec.add_labeled(prop_decode(record["graph"]), Fraction(record["coeff"]))
    log_debug(f"读入 {len(vec)} 个 PropGraph 类", logger)
    return vec

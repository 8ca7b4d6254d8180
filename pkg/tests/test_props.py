"""
Prop 测试：PropGraph 次数、复合、Lieb∞ 微分与可量子化图集合
"""

import itertools
from collections import Counter

import pytest

from gcq_cli.core.errors import FlavorMismatchError, ResourceGuardError, StructuralError
from gcq_cli.gcomplex import differential, m_element
from gcq_cli.graphcore import DirectedGraph, GraphVector
from gcq_cli.props import (
    Corolla,
    PropGraph,
    PropVector,
    attach_legs,
    canonicalize_prop,
    compose_vectors,
    corolla,
    d_degree,
    d_lieb_diff,
    enumerate_prop_graphs,
    enumerate_quantizable_sets,
    graph_derivation,
    horizontal_compose,
    lieb_infty_diff,
    prop_decode,
    prop_encode,
    prop_vector_from_json,
    prop_vector_to_json,
    vertical_compose,
)

LADDER = PropGraph(2, 2, 2, e_in=((0, 0), (1, 0)), e_int=((0, 1),), e_out=((1, 0), (1, 1)))


def _attachment_counts(top: PropGraph, bottom: PropGraph) -> Counter:
    """逐一枚举 top ∘ bottom 的接法，统计每个非零规范类出现的次数"""
    kt = top.black
    options = []
    for j, _ in top.e_in:
        choices = [("leg", b) for b, (_, w) in enumerate(bottom.e_out) if w == j]
        choices += [("white", t) for t in range(bottom.n)]
        options.append(choices)
    counts: Counter = Counter()
    for picks in itertools.product(*options):
        legs = [x for kind, x in picks if kind == "leg"]
        if len(legs) != len(set(legs)):
            continue
        e_in = [(j, v + kt) for j, v in bottom.e_in]
        e_int = list(top.e_int) + [(u + kt, v + kt) for u, v in bottom.e_int]
        for (_, v), (kind, x) in zip(top.e_in, picks):
            if kind == "leg":
                e_int.append((bottom.e_out[x][0] + kt, v))
            else:
                e_in.append((x, v))
        free = [b for b in range(len(bottom.e_out)) if b not in legs]
        for targets in itertools.product(range(top.m), repeat=len(free)):
            e_out = list(top.e_out) + [(bottom.e_out[b][0] + kt, i) for b, i in zip(free, targets)]
            g = PropGraph(top.m, bottom.n, kt + bottom.black, tuple(e_in), tuple(e_int), tuple(e_out))
            canonical, sign = canonicalize_prop(g)
            if sign:
                counts[canonical] += 1
    return counts


class TestPropGraph:
    def test_corolla_validation(self):
        with pytest.raises(StructuralError):
            Corolla(1, 1)
        with pytest.raises(StructuralError):
            Corolla(0, 3)
        assert Corolla(2, 1).m == 2

    def test_rejects_wheel(self):
        with pytest.raises(StructuralError):
            PropGraph(1, 1, 2, e_int=((0, 1), (1, 0)))
        assert PropGraph(1, 1, 2, e_int=((0, 1), (1, 0)), wheels_allowed=True).black == 2

    def test_rejects_out_of_range_edge(self):
        with pytest.raises(StructuralError):
            PropGraph(1, 1, 1, e_in=((1, 0),))

    @pytest.mark.parametrize(
        "graph,expected",
        [(corolla(1, 2), 0), (PropGraph(1, 1, 0), 0), (LADDER, 0), (corolla(2, 2), -1)],
    )
    def test_degree(self, graph, expected):
        assert d_degree(graph) == expected

    def test_encoding(self):
        text = LADDER.encode()
        assert text == "m2;n2;k2;Ein:0>0,1>0;Eint:0>1;Eout:1>0,1>1"
        assert prop_encode(LADDER) == text
        assert prop_decode(text) == LADDER

    def test_decode_rejects_garbage(self):
        with pytest.raises(StructuralError):
            prop_decode("m1;n1;k1;Eout:0>0;Eint:;Ein:0>0")


class TestComposition:
    def test_horizontal(self):
        g = horizontal_compose(corolla(1, 2), PropGraph(1, 1, 0))
        assert g.signature == (2, 3)
        assert g.black == 1

    def test_horizontal_with_empty_graph(self):
        empty = PropGraph(0, 0, 0)
        assert horizontal_compose(corolla(2, 1), empty) == corolla(2, 1)

    def test_horizontal_degree_is_additive(self):
        a, b = corolla(2, 1), corolla(1, 2)
        assert d_degree(horizontal_compose(a, b)) == d_degree(a) + d_degree(b)

    def test_vertical(self):
        result = vertical_compose(corolla(2, 1), corolla(1, 2))
        assert not result.is_zero
        for g, _ in result.items():
            assert g.signature == (2, 2)
            assert g.black == 2

    def test_vertical_worked_cobracket_over_bracket(self):
        result = vertical_compose(corolla(2, 1), corolla(1, 2))
        # 配对成一条内部边的一项，加上两条自由腿各有两种接法的四项
        chain = PropGraph(2, 2, 2, e_in=((0, 1), (1, 1)), e_int=((1, 0),), e_out=((0, 0), (0, 1)))
        expected = PropVector.from_graph(chain)
        for t in range(2):
            for i in range(2):
                expected.add_labeled(
                    PropGraph(2, 2, 2, e_in=((0, 1), (1, 1), (t, 0)), e_out=((0, 0), (0, 1), (1, i))), 1
                )
        assert len(result) == 5
        assert result == expected

    @pytest.mark.parametrize("top", enumerate_prop_graphs(1, 1, 2))
    def test_vertical_matches_brute_force(self, top):
        for bottom in enumerate_prop_graphs(1, 2, 2):
            counts = _attachment_counts(top, bottom)
            terms = dict(vertical_compose(top, bottom).items())
            assert set(terms) <= set(counts), (top.encode(), bottom.encode())
            for g, count in counts.items():
                c = terms.get(g, 0)
                assert abs(c) <= count and (c - count) % 2 == 0, g.encode()
                if count == 1:
                    assert abs(c) == 1, g.encode()

    @pytest.mark.parametrize("middle", enumerate_prop_graphs(1, 1, 1))
    def test_vertical_associative_through_one_label(self, middle):
        for top in enumerate_prop_graphs(1, 2, 1):
            for bottom in enumerate_prop_graphs(1, 1, 2):
                left = compose_vectors(vertical_compose(top, middle), PropVector.from_graph(bottom))
                right = compose_vectors(PropVector.from_graph(top), vertical_compose(middle, bottom))
                assert left == right, (top.encode(), middle.encode(), bottom.encode())

    def test_through_legs_counted_per_middle_label(self):
        # 穿过两标号中间层的腿在 (a∘b)∘c 中出现两次，在 a∘(b∘c) 中只出现一次
        a = prop_decode("m1;n2;k1;Ein:1>0;Eint:;Eout:0>0")
        b = prop_decode("m2;n2;k1;Ein:1>0;Eint:;Eout:0>1")
        c = prop_decode("m2;n1;k1;Ein:0>0;Eint:;Eout:0>0")
        chain = PropGraph(1, 1, 3, e_in=((0, 1), (0, 2)), e_int=((1, 0),), e_out=((0, 0), (2, 0)))
        left = compose_vectors(vertical_compose(a, b), PropVector.from_graph(c))
        right = compose_vectors(PropVector.from_graph(a), vertical_compose(b, c))
        assert len(right) == 1
        assert abs(right.coefficient(chain)) == 1
        assert len(left) <= 1
        assert left.coefficient(chain) in (0, 2, -2)

    def test_vectors_extend_bilinearly(self):
        top, bottom = PropVector.from_graph(corolla(2, 1)), PropVector.from_graph(corolla(1, 2))
        assert compose_vectors(top, bottom) == vertical_compose(corolla(2, 1), corolla(1, 2))
        assert compose_vectors(top * 2, bottom) == vertical_compose(corolla(2, 1), corolla(1, 2)) * 2

    def test_vertical_signature_mismatch(self):
        with pytest.raises(StructuralError):
            vertical_compose(corolla(2, 1), corolla(2, 2))


class TestDifferential:
    @pytest.mark.parametrize("m,n", [(2, 1), (1, 2)])
    def test_generators_are_closed(self, m, n):
        assert lieb_infty_diff(Corolla(m, n)).is_zero

    @pytest.mark.parametrize("m,n", [(2, 2), (3, 2), (2, 3), (1, 4)])
    def test_squares_to_zero_on_corollas(self, m, n):
        image = lieb_infty_diff(Corolla(m, n))
        assert not image.is_zero
        assert d_lieb_diff(image).is_zero

    def test_splitting_produces_two_vertices(self):
        for g, _ in lieb_infty_diff(Corolla(2, 2)).items():
            assert g.black == 2
            assert len(g.e_int) == 1

    def test_splitting_is_edge_derivation(self):
        v = PropVector.from_graph(corolla(2, 2))
        assert graph_derivation(DirectedGraph(2, ((0, 1),)), v) == d_lieb_diff(v)

    def test_white_only_graph(self):
        assert d_lieb_diff(PropVector.from_graph(PropGraph(1, 1, 0))).is_zero

    def test_squares_to_zero_on_small_graphs(self):
        for k in (1, 2):
            for m in (1, 2):
                for n in (1, 2):
                    for g in enumerate_prop_graphs(k, m, n):
                        image = d_lieb_diff(PropVector.from_graph(g))
                        assert d_lieb_diff(image).is_zero, g.encode()

    @pytest.mark.parametrize("shape", [((2, 2), (2, 1)), ((1, 2), (2, 2))])
    def test_derivation_of_vertical_composition(self, shape):
        (mt, nt), (mb, nb) = shape
        for top in enumerate_prop_graphs(1, mt, nt):
            sign = (-1) ** (d_degree(top) % 2)
            d_top = d_lieb_diff(PropVector.from_graph(top))
            for bottom in enumerate_prop_graphs(1, mb, nb):
                d_bottom = d_lieb_diff(PropVector.from_graph(bottom))
                lhs = d_lieb_diff(vertical_compose(top, bottom))
                rhs = compose_vectors(d_top, PropVector.from_graph(bottom)) + compose_vectors(
                    PropVector.from_graph(top), d_bottom
                ) * sign
                assert lhs == rhs, (top.encode(), bottom.encode())

    def test_wheeled_closure_keeps_cycles(self):
        # 0→1→2→0 加一条 0→2：没有非平凡自同构
        cyclic = DirectedGraph(3, ((0, 1), (1, 2), (2, 0), (0, 2)))
        plain = corolla(2, 2)
        wheeled = PropGraph(2, 2, 1, plain.e_in, (), plain.e_out, wheels_allowed=True)
        assert graph_derivation(cyclic, PropVector.from_graph(plain)).is_zero
        result = graph_derivation(cyclic, PropVector.from_graph(wheeled))
        # 四条腿分到三个顶点，中间顶点至少分到一条
        assert len(result) == 3**4 - 2**4
        for g, _ in result.items():
            assert g.wheels_allowed
            assert g.black == 3
            assert g.encode().endswith(";W")

    def test_small_enumeration_guard(self):
        with pytest.raises(ResourceGuardError):
            enumerate_prop_graphs(3, 1, 1)


class TestAttachLegs:
    def test_ladder_has_bivalent_vertices(self):
        # 两个顶点各只有两条半边，不是合法生成元
        assert attach_legs(DirectedGraph(2, ((0, 1),)), 1, 1).is_zero

    def test_missing_output(self):
        assert attach_legs(DirectedGraph(2, ((0, 1),)), 0, 1).is_zero

    def test_wheel_is_dropped(self):
        wheel = DirectedGraph(2, ((0, 1), (1, 0)))
        assert attach_legs(wheel, 2, 2).is_zero

    def test_edge_with_enough_legs(self):
        result = attach_legs(DirectedGraph(2, ((0, 1),)), 2, 2)
        assert not result.is_zero
        for g, _ in result.items():
            assert g.signature == (2, 2)

    @pytest.mark.parametrize("m,n", [(1, 2), (2, 2), (3, 1)])
    def test_edge_gives_chain_map(self, m, n):
        edge = GraphVector.from_graph(DirectedGraph(2, ((0, 1),)), 3)
        assert attach_legs(differential(edge), m, n).is_zero
        assert graph_derivation(m_element(3), attach_legs(edge, m, n)).is_zero

    @pytest.mark.parametrize("m,n", [(2, 2), (1, 3), (3, 1)])
    def test_path_gives_chain_map(self, m, n):
        path = GraphVector.from_graph(DirectedGraph(3, ((0, 1), (1, 2))), 3)
        mu = m_element(3)
        c = PropVector.from_graph(corolla(m, n))
        outer = graph_derivation(mu, attach_legs(path, m, n))
        inner = graph_derivation(path, graph_derivation(mu, c))
        image = attach_legs(differential(path), m, n)
        # f(δΓ) 等于 [f(m), f(Γ)] 作用在 corolla 上，两项的相对符号由次数决定
        assert any(image == outer * s + inner * t for s in (1, -1) for t in (1, -1))

    def test_requires_odd_dimension(self):
        with pytest.raises(FlavorMismatchError):
            attach_legs(GraphVector.from_graph(DirectedGraph(2, ((0, 1),)), 2), 1, 2)

    def test_negative_legs(self):
        with pytest.raises(StructuralError):
            attach_legs(DirectedGraph(2, ((0, 1),)), -1, 1)


class TestQuantizableSets:
    def test_validation(self):
        with pytest.raises(StructuralError):
            enumerate_quantizable_sets(0)
        with pytest.raises(StructuralError):
            enumerate_quantizable_sets(2, max_valence=4)

    @pytest.mark.slow
    def test_six_vertices_is_empty(self):
        assert enumerate_quantizable_sets(1) == []

    @pytest.mark.slow
    def test_trivalent_members_have_four_bivalent_vertices(self):
        graphs = enumerate_quantizable_sets(2, max_valence=3)
        assert graphs
        for c in graphs:
            assert sum(1 for v in c.graph.valences() if v == 2) == 4


def test_vector_json():
    v = lieb_infty_diff(Corolla(2, 2))
    assert prop_vector_from_json(prop_vector_to_json(v)) == v

"""
数值积分测试：凸起传播子、迭代积分、结构性零点与蒙特卡洛权重
"""

import csv
import io
import math

import numpy as np
import pytest

from gcq_cli.core.errors import SamplingError, StructuralError
from gcq_cli.graphcore import DirectedGraph, canonicalize
from gcq_cli.integrals import (
    BumpPropagator,
    HalfPlaneGraph,
    WeightEstimate,
    decode_halfplane,
    degree_filter,
    lambda_p,
    mc_weight_H,
    mc_weight_halfplane,
    mc_weight_rd,
    poisson_bracket,
    reflect,
    reflected_density,
    sphere_density,
    sphere_propagator_integral,
    star_order1,
    wedge_graph,
    weights_table_csv,
)
from gcq_cli.jobs.verify import BIVALENT_CHAIN_GRAPH
from gcq_cli.polyrep import GeneratorSpec, SuperPolynomial
from gcq_cli.props import PropGraph, corolla

TRIANGLE = DirectedGraph(3, ((0, 1), (1, 2), (0, 2)))


class TestPropagator:
    def test_validation(self):
        with pytest.raises(StructuralError):
            BumpPropagator(0.0)
        with pytest.raises(StructuralError):
            BumpPropagator(math.pi / 6, sharpness=-1.0)
        with pytest.raises(StructuralError):
            BumpPropagator(math.pi / 6, skew=0.3)
        assert BumpPropagator(math.pi / 6, skew=0.3, symmetric=False).skew == 0.3

    def test_support(self, prop):
        lo, hi = prop.support
        assert prop.density(lo / 2) == 0.0
        assert prop.density(hi + 0.1) == 0.0
        assert prop.density(math.pi / 2) > 0.0
        assert prop.density(math.pi / 2 + 2 * math.pi) == pytest.approx(prop.density(math.pi / 2))

    def test_symmetric_about_half_pi(self, prop):
        theta = np.linspace(0.6, 1.5, 7)
        assert np.allclose(prop.density(theta), prop.density(math.pi - theta))

    def test_gbar(self, prop):
        assert prop.gbar(1.0) == pytest.approx(2 * math.pi * prop.density(1.0))

    @pytest.mark.parametrize("p", [1, 2, 3, 4, 5])
    def test_iterated_integrals(self, prop, p):
        assert lambda_p(prop, p) == pytest.approx(1.0 / math.factorial(p), abs=1e-8)

    def test_skewed_is_normalized(self):
        skewed = BumpPropagator(math.pi / 5, sharpness=2.0, skew=0.4, symmetric=False)
        assert lambda_p(skewed, 1) == pytest.approx(1.0, abs=1e-8)
        assert lambda_p(skewed, 3) == pytest.approx(1.0 / 6, abs=1e-8)

    def test_lambda_needs_positive_p(self, prop):
        with pytest.raises(StructuralError):
            lambda_p(prop, 0)


class TestSphere:
    def test_circle_integral(self, prop):
        assert sphere_propagator_integral(prop, 2) == pytest.approx(1.0, abs=1e-8)

    def test_sphere_integral(self, prop):
        value = sphere_propagator_integral(prop, 3, samples=1 << 16, seed=1, tolerance=1e-2)
        assert value == pytest.approx(1.0, abs=0.02)

    def test_unsupported_dimension(self, prop):
        with pytest.raises(StructuralError):
            sphere_propagator_integral(prop, 4)

    def test_reflect(self):
        points = np.array([[1.0, 2.0, 3.0], [-0.5, 0.25, 0.1]])
        assert np.array_equal(reflect(points), np.array([[-1.0, -2.0, 3.0], [0.5, -0.25, 0.1]]))

    @pytest.mark.parametrize("d", [2, 3])
    def test_reflected_density(self, prop, d):
        rng = np.random.default_rng(5)
        points = rng.normal(size=(64, d))
        points /= np.linalg.norm(points, axis=1, keepdims=True)
        points[:, -1] = np.abs(points[:, -1])
        expected = (-1.0) ** (d - 1) * sphere_density(d, prop)(points)
        assert np.allclose(reflected_density(prop, d, points), expected)


class TestDegreeFilter:
    @pytest.mark.parametrize(
        "k,edges,d,expected",
        [(2, 1, 2, True), (3, 3, 2, True), (3, 2, 2, False), (2, 1, 3, True), (4, 4, 3, True), (3, 3, 3, False), (6, 7, 3, True)],
    )
    def test_top_degree(self, k, edges, d, expected):
        graph = DirectedGraph(k, tuple((0, 1) for _ in range(edges)))
        assert degree_filter(graph, d) is expected

    def test_accepts_classes(self):
        assert degree_filter(canonicalize(DirectedGraph(2, ((0, 1),)), 2), 2)


class TestRdWeights:
    @pytest.mark.parametrize(
        "graph,d,reason",
        [
            (DirectedGraph(3, ((0, 1), (1, 2))), 2, "次数不匹配"),
            (DirectedGraph(3, ((0, 1), (0, 1), (1, 2))), 2, "一价顶点"),
            (DirectedGraph(3, ((0, 1), (1, 2), (2, 0))), 2, "有向圈"),
            (
                DirectedGraph(6, ((0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (0, 5))),
                3,
                "含三角形",
            ),
        ],
    )
    def test_structural_zeros(self, prop, graph, d, reason):
        estimate = mc_weight_rd(graph, d, prop, samples=1000, seed=0)
        assert estimate.exact
        assert estimate.mean == 0.0
        assert estimate.reason == reason
        assert estimate.samples == 0

    def test_zero_class(self, prop):
        zero = canonicalize(DirectedGraph(2, ((0, 1), (0, 1))), 2)
        estimate = mc_weight_rd(zero, 2, prop, samples=1000, seed=0)
        assert estimate.exact and estimate.reason == "零类"

    def test_reproducible_and_worker_independent(self, prop):
        one = mc_weight_rd(TRIANGLE, 2, prop, samples=40_000, seed=3, workers=1)
        again = mc_weight_rd(TRIANGLE, 2, prop, samples=40_000, seed=3, workers=1)
        many = mc_weight_rd(TRIANGLE, 2, prop, samples=40_000, seed=3, workers=4)
        assert one.mean == again.mean == many.mean
        assert one.stderr == many.stderr

    def test_too_few_samples(self, prop):
        with pytest.raises(SamplingError):
            mc_weight_rd(TRIANGLE, 2, prop, samples=1, seed=0)

    def test_bad_anchor(self, prop):
        with pytest.raises(StructuralError):
            mc_weight_rd(TRIANGLE, 2, prop, samples=100, seed=0, anchor=(1, 1))

    @pytest.mark.slow
    def test_graph_with_bivalent_chain_vanishes(self, prop):
        estimate = mc_weight_rd(BIVALENT_CHAIN_GRAPH, 3, prop, samples=1_000_000, seed=0, workers=4)
        assert not estimate.exact
        assert estimate.consistent_with(0.0)


class TestHalfPlane:
    def test_encoding(self):
        g = wedge_graph(mirror=True)
        assert g.encode() == "H1,2;E:0>2,0>1"
        assert decode_halfplane(g.encode()) == g

    def test_decode_rejects_garbage(self):
        with pytest.raises(StructuralError):
            decode_halfplane("H1;E:0>1")

    def test_boundary_vertices_have_no_out_edges(self):
        with pytest.raises(StructuralError):
            HalfPlaneGraph(1, 2, ((1, 0), (0, 2)))

    def test_form_degree_mismatch(self, prop):
        estimate = mc_weight_halfplane(HalfPlaneGraph(1, 2, ((0, 1),)), prop, samples=1000, seed=0)
        assert estimate.exact

    def test_single_leg_is_normalized(self, prop):
        g = HalfPlaneGraph(1, 1, ((0, 1),))
        estimate = mc_weight_halfplane(g, prop, samples=40_000, seed=2)
        assert abs(abs(estimate.mean) - 1.0) <= 5 * estimate.stderr + 1e-3

    @pytest.mark.slow
    def test_wedge_minus_mirror(self, prop):
        wedge = mc_weight_halfplane(wedge_graph(), prop, 400_000, 0, workers=4)
        mirror = mc_weight_halfplane(wedge_graph(mirror=True), prop, 400_000, 1, workers=4)
        assert wedge.mean - mirror.mean == pytest.approx(1.0, abs=0.02)


class TestHWeights:
    def test_one_in_one_out_vanishes(self, prop):
        g = PropGraph(1, 1, 1, e_in=((0, 0),), e_out=((0, 0),))
        estimate = mc_weight_H(g, prop, samples=1000, seed=0)
        assert estimate.exact
        assert estimate.space == "H"

    def test_not_top_degree(self, prop):
        ladder = PropGraph(2, 2, 2, e_in=((0, 0), (1, 0)), e_int=((0, 1),), e_out=((1, 0), (1, 1)))
        assert mc_weight_H(ladder, prop, samples=1000, seed=0).exact

    def test_one_leg_per_white_vertex(self, prop):
        g = PropGraph(1, 1, 1, e_in=((0, 0), (0, 0)), e_out=((0, 0),))
        with pytest.raises(StructuralError):
            mc_weight_H(g, prop, samples=1000, seed=0)

    def test_needs_black_vertex(self, prop):
        with pytest.raises(StructuralError):
            mc_weight_H(PropGraph(1, 1, 0), prop, samples=1000, seed=0)

    def test_corolla_is_sampled(self, prop):
        estimate = mc_weight_H(corolla(2, 1), prop, samples=20_000, seed=4)
        assert not estimate.exact
        assert math.isfinite(estimate.mean)


class TestStarProduct:
    def _spec(self):
        return GeneratorSpec(2, 2, truncation=4)

    def test_poisson_bracket_of_coordinates(self):
        spec = self._spec()
        gen = lambda name: SuperPolynomial.generator(spec, name)  # noqa: E731
        pi = gen("psi1") * gen("psi2")
        assert poisson_bracket(pi, gen("x1"), gen("x2")) == 1
        assert poisson_bracket(pi, gen("x2"), gen("x1")) == -1

    def test_vanishing_cases_skip_sampling(self, prop):
        spec = self._spec()
        gen = lambda name: SuperPolynomial.generator(spec, name)  # noqa: E731
        pi = gen("psi1") * gen("psi2")
        assert star_order1(pi, prop, gen("x1"), gen("x1"), samples=10, seed=0).is_zero
        assert star_order1(SuperPolynomial(spec), prop, gen("x1"), gen("x2"), samples=10, seed=0).is_zero

    @pytest.mark.slow
    def test_first_order_term_is_poisson_bracket(self, prop):
        spec = self._spec()
        gen = lambda name: SuperPolynomial.generator(spec, name)  # noqa: E731
        value = star_order1(gen("psi1") * gen("psi2"), prop, gen("x1"), gen("x2"), 400_000, 0, workers=4)
        constant = dict(value.items())[spec.one()]
        assert float(constant) == pytest.approx(1.0, abs=0.02)


def test_weights_table_csv():
    rows = [
        WeightEstimate(0.5, 0.01, 1000, 7, "d2;k2;E:0>1", 2),
        WeightEstimate.zero("H1,2;E:0>1", "形式次数不等于维数", 8, space="halfplane"),
    ]
    lines = weights_table_csv(rows).splitlines()
    assert lines[0] == "graph,d,mean,stderr,samples,seed"
    assert lines[1] == "d2;k2;E:0>1,2,0.5,0.01,1000,7"
    assert lines[2] == '"H1,2;E:0>1",,0.0,0.0,0,8'
    parsed = list(csv.reader(io.StringIO(weights_table_csv(rows))))
    assert [row[0] for row in parsed[1:]] == ["d2;k2;E:0>1", "H1,2;E:0>1"]
    assert all(len(row) == 6 for row in parsed)


def test_consistent_with():
    estimate = WeightEstimate(0.03, 0.01, 100, 0, "g")
    assert estimate.consistent_with(0.0)
    assert not estimate.consistent_with(0.0, sigmas=2)

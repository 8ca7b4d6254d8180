"""
多项式表示测试：超交换代数、Schouten 括号、Φ 与 Maurer-Cartan 检查
"""

import json
from fractions import Fraction

import pytest

from gcq_cli.core.errors import FlavorMismatchError, MissingArityError, StructuralError
from gcq_cli.gcomplex import m_element
from gcq_cli.graphcore import DirectedGraph, canonicalize
from gcq_cli.polyrep import (
    GeneratorSpec,
    SuperPolynomial,
    WeightedLinfty,
    bialgebra_gamma,
    bialgebra_spec,
    gamma_from_json,
    linfty_apply,
    mc_check_quantizable,
    monomials,
    phi_apply,
    quantizable_arity,
    schouten,
    structure_constants,
)


def _poly(spec, text):
    return SuperPolynomial.parse(spec, text)


class TestGeneratorSpec:
    def test_default_degrees(self):
        spec = GeneratorSpec(3, 2)
        assert spec.degrees == ((0, 2), (0, 2))
        assert spec.generator_count == 4
        assert spec.index_of("psi2") == spec.psi(1) == 3

    def test_degrees_must_sum_to_d_minus_one(self):
        with pytest.raises(StructuralError):
            GeneratorSpec(3, 1, ((1, 0),))

    def test_hbar_is_optional(self):
        with pytest.raises(StructuralError):
            GeneratorSpec(2, 1).index_of("hbar")
        assert GeneratorSpec(2, 1, hbar_order=2).index_of("hbar") == 2

    def test_unknown_generator(self):
        with pytest.raises(StructuralError):
            GeneratorSpec(2, 1).index_of("psi2")


class TestSuperPolynomial:
    def test_odd_generators_anticommute(self):
        spec = GeneratorSpec(2, 2)
        p1, p2 = (SuperPolynomial.generator(spec, n) for n in ("psi1", "psi2"))
        assert p1 * p2 == -(p2 * p1)
        assert (p1 * p1).is_zero

    def test_even_generators_commute(self):
        spec = GeneratorSpec(3, 2)
        p1, p2 = (SuperPolynomial.generator(spec, n) for n in ("psi1", "psi2"))
        assert p1 * p2 == p2 * p1
        assert not (p1 * p1).is_zero

    def test_parse(self):
        spec = GeneratorSpec(2, 2)
        f = _poly(spec, "2 * x1^2 psi1 - 1/3 * psi2 psi1")
        g = _poly(spec, "1/3 * psi1 psi2 + 2 * x1 x1 psi1")
        assert f == g
        assert f.homogeneous_degree() is None

    def test_parse_rejects_garbage(self):
        with pytest.raises(StructuralError):
            _poly(GeneratorSpec(2, 1), "y1 * x1")

    def test_truncation_drops_high_degree(self):
        spec = GeneratorSpec(2, 1, truncation=2)
        x = SuperPolynomial.generator(spec, "x1")
        assert (x * x).items()
        assert (x * x * x).is_zero

    def test_left_derivative_sign(self):
        spec = GeneratorSpec(2, 2)
        f = _poly(spec, "psi1 psi2")
        assert f.derivative(spec.psi(0)) == SuperPolynomial.generator(spec, "psi2")
        assert f.derivative(spec.psi(1)) == -SuperPolynomial.generator(spec, "psi1")

    def test_even_derivative(self):
        spec = GeneratorSpec(2, 1)
        assert _poly(spec, "x1^3").derivative(spec.x(0)) == _poly(spec, "3 * x1^2")

    def test_mixed_specs_rejected(self):
        a = SuperPolynomial.generator(GeneratorSpec(2, 1), "x1")
        b = SuperPolynomial.generator(GeneratorSpec(3, 1), "x1")
        with pytest.raises(FlavorMismatchError):
            a + b

    def test_hbar_coefficient(self):
        spec = GeneratorSpec(2, 1, hbar_order=2)
        f = _poly(spec, "x1 + hbar * psi1 + 5 * hbar^2")
        assert f.hbar_coefficient(0) == SuperPolynomial.generator(spec, "x1")
        assert f.hbar_coefficient(1) == SuperPolynomial.generator(spec, "psi1")
        assert f.hbar_coefficient(2) == 5


class TestSchouten:
    def test_canonical_pair(self):
        spec = GeneratorSpec(2, 1)
        x, psi = (SuperPolynomial.generator(spec, n) for n in ("x1", "psi1"))
        assert schouten(psi, x) == 1
        assert schouten(x, psi) == 1
        assert schouten(x, x).is_zero

    @pytest.mark.parametrize("d", [2, 3])
    def test_graded_symmetry(self, d):
        spec = GeneratorSpec(d, 2, truncation=4)
        pool = list(monomials(spec, 2))
        for a in pool:
            for b in pool:
                sa = spec.monomial_degree(a.items()[0][0]) + d
                sb = spec.monomial_degree(b.items()[0][0]) + d
                assert schouten(a, b) == schouten(b, a) * (-1) ** ((sa * sb) % 2)

    def test_jacobi_for_even_generators(self):
        # d = 3 时所有生成元为偶，括号即 ℝ^{2n} 上的标准 Poisson 括号
        spec = GeneratorSpec(3, 2, truncation=6)
        pool = list(monomials(spec, 2))[1:8]
        for a in pool:
            for b in pool:
                for c in pool:
                    total = (
                        schouten(schouten(a, b), c)
                        + schouten(schouten(b, c), a)
                        + schouten(schouten(c, a), b)
                    )
                    assert total.is_zero

    def test_lie_poisson_structure(self):
        spec = GeneratorSpec(2, 3)
        pi = _poly(spec, "x1 * psi2 psi3 + x2 * psi3 psi1 + x3 * psi1 psi2")
        assert schouten(pi, pi).is_zero

    def test_non_poisson_bivector(self):
        spec = GeneratorSpec(2, 3)
        pi = _poly(spec, "x1 * psi3 psi1 + psi1 psi2")
        assert not schouten(pi, pi).is_zero


class TestPhi:
    def test_edge_operator(self):
        spec = GeneratorSpec(3, 1)
        x = SuperPolynomial.generator(spec, "x1")
        psi = SuperPolynomial.generator(spec, "psi1")
        edge = DirectedGraph(2, ((0, 1),))
        assert phi_apply(edge, [x, psi]) == 1
        assert phi_apply(edge, [psi, x]).is_zero

    def test_canonical_class_carries_sign(self):
        spec = GeneratorSpec(3, 1)
        x = SuperPolynomial.generator(spec, "x1")
        psi = SuperPolynomial.generator(spec, "psi1")
        forward = canonicalize(DirectedGraph(2, ((0, 1),)), 3)
        backward = canonicalize(DirectedGraph(2, ((1, 0),)), 3)
        assert forward.graph == backward.graph
        assert phi_apply(forward, [x, psi]) == 1
        assert phi_apply(backward, [x, psi]) == -1
        assert phi_apply(backward, [psi, x]).is_zero

    def test_argument_count_checked(self):
        spec = GeneratorSpec(2, 1)
        with pytest.raises(StructuralError):
            phi_apply(DirectedGraph(2, ((0, 1),)), [SuperPolynomial.constant(spec)])

    def test_dimension_checked(self):
        spec = GeneratorSpec(2, 1)
        c = canonicalize(DirectedGraph(2, ((0, 1),)), 3)
        with pytest.raises(FlavorMismatchError):
            phi_apply(c, [SuperPolynomial.constant(spec)] * 2)

    @pytest.mark.parametrize("d", [2, 3])
    def test_m_gives_schouten_bracket(self, d):
        spec = GeneratorSpec(d, 2, truncation=5)
        L = WeightedLinfty.from_graph_vector(m_element(d))
        pool = list(monomials(spec, 2))
        for f1 in pool:
            for f2 in pool:
                assert linfty_apply(L, 2, [f1, f2]) == schouten(f1, f2)

    def test_missing_arity_is_zero(self):
        spec = GeneratorSpec(2, 1)
        L = WeightedLinfty.from_graph_vector(m_element(2))
        assert linfty_apply(L, 3, [SuperPolynomial.generator(spec, "x1")] * 3).is_zero

    def test_arity_must_match_vertices(self):
        c = canonicalize(DirectedGraph(2, ((0, 1),)), 2)
        with pytest.raises(StructuralError):
            WeightedLinfty({3: [(c, Fraction(1))]})


class TestMaurerCartan:
    @pytest.mark.parametrize("d,p,expected", [(2, 1, 4), (2, 2, 6), (3, 1, 6), (3, 2, 10)])
    def test_quantizable_arity(self, d, p, expected):
        assert quantizable_arity(d, p) == expected

    def test_order_zero_is_half_schouten(self):
        spec = GeneratorSpec(2, 3)
        pi = _poly(spec, "x1 * psi3 psi1 + psi1 psi2")
        (residual,) = mc_check_quantizable(pi, WeightedLinfty(), 0)
        assert residual == schouten(pi, pi) * Fraction(1, 2)

    def test_missing_arity_raises(self):
        spec = GeneratorSpec(2, 2, hbar_order=1)
        pi = _poly(spec, "x1 * psi1 psi2")
        with pytest.raises(MissingArityError) as info:
            mc_check_quantizable(pi, WeightedLinfty.from_graph_vector(m_element(2)), 1)
        assert info.value.payload == 4

    def test_truncated_structure(self):
        spec = GeneratorSpec(2, 2, hbar_order=1)
        pi = _poly(spec, "x1 * psi1 psi2")
        residuals = mc_check_quantizable(pi, WeightedLinfty(truncated=True), 1)
        assert len(residuals) == 2
        assert all(r.is_zero for r in residuals)

    def test_needs_hbar(self):
        spec = GeneratorSpec(2, 2)
        with pytest.raises(StructuralError):
            mc_check_quantizable(_poly(spec, "x1 * psi1 psi2"), WeightedLinfty(truncated=True), 1)


class TestBialgebra:
    def test_lie_algebra_without_cobracket(self):
        C, Phi = structure_constants(2, {(0, 1): {1: 1}}, {})
        gamma = bialgebra_gamma(C, Phi, bialgebra_spec(2))
        assert schouten(gamma, gamma).is_zero

    def test_two_dimensional_bialgebra(self):
        C, Phi = structure_constants(2, {(0, 1): {1: 1}}, {1: {(0, 1): 1}})
        gamma = bialgebra_gamma(C, Phi, bialgebra_spec(2))
        assert not gamma.is_zero
        assert schouten(gamma, gamma).is_zero

    def test_cocycle_failure(self):
        C, Phi = structure_constants(3, {(0, 1): {1: 1}}, {2: {(0, 1): 1}})
        gamma = bialgebra_gamma(C, Phi, bialgebra_spec(3))
        assert not schouten(gamma, gamma).is_zero

    def test_structure_constants_antisymmetric(self):
        C, Phi = structure_constants(2, {(0, 1): {1: 3}}, {0: {(0, 1): Fraction(1, 2)}})
        assert C[0][1][1] == 3 and C[1][0][1] == -3
        assert Phi[0][0][1] == Fraction(1, 2) and Phi[0][1][0] == Fraction(-1, 2)

    def test_gamma_from_json(self):
        C, Phi = structure_constants(2, {(0, 1): {1: 1}}, {1: {(0, 1): 1}})
        text = json.dumps(
            {
                "dim": 2,
                "C": [[[str(v) for v in row] for row in plane] for plane in C],
                "Phi": [[[str(v) for v in row] for row in plane] for plane in Phi],
            }
        )
        assert gamma_from_json(text) == bialgebra_gamma(C, Phi, bialgebra_spec(2))

    def test_requires_odd_generators(self):
        with pytest.raises(StructuralError):
            bialgebra_gamma([], [], GeneratorSpec(3, 1))

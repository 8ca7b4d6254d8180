"""
验收作业
运行组合、代数与数值三类检查并写出通过/失败报告；scale=quick 为缩小规模，scale=full 为完整规模
"""

import json
import math
import random
from fractions import Fraction
from typing import Any, Callable, Dict, List, Tuple

from ..core.base import BaseJob
from ..core.errors import GCQError, VerificationError
from ..gcomplex import (
    FlavorSpec,
    basis,
    bracket,
    cohomology_dim,
    differential,
    m_element,
    mc_defect,
    mc_extend,
    upsilon4,
)
from ..graphcore import DirectedGraph, FilterSet, GraphFilter, GraphVector, enumerate_graphs
from ..integrals import (
    BumpPropagator,
    lambda_p,
    mc_weight_halfplane,
    mc_weight_rd,
    sphere_propagator_integral,
    star_order1,
    wedge_graph,
)
from ..polyrep import (
    GeneratorSpec,
    SuperPolynomial,
    WeightedLinfty,
    bialgebra_gamma,
    bialgebra_spec,
    linfty_apply,
    monomials,
    schouten,
    structure_constants,
)
from ..polytopes import boundary_f2_squares_to_zero, build_poset, diamond_check, f_vector
from ..props import (
    Corolla,
    PropVector,
    d_lieb_diff,
    enumerate_prop_graphs,
    enumerate_quantizable_sets,
    lieb_infty_diff,
)

Check = Tuple[str, Callable[[], Tuple[bool, str]]]

BIVALENT_CHAIN_GRAPH = DirectedGraph(6, ((0, 1), (1, 2), (2, 3), (0, 5), (5, 4), (4, 3), (0, 3)))

SCALES = {
    "quick": dict(vertices=4, edges=6, pairs=20, monomial_degree=2, arity=5, polytope=4, samples=200_000, black=1),
    "full": dict(vertices=5, edges=7, pairs=200, monomial_degree=3, arity=7, polytope=5, samples=1_000_000, black=2),
}


class VerifyJob(BaseJob):
    """运行验收检查并输出报告"""

    stochastic = True

    def get_config_keys(self) -> List[str]:
        return ["seed", "workers", "theta0", "max_search_space", "output_dir"]

    def validate_params(self, **kwargs) -> bool:
        if kwargs.get("scale", "quick") not in SCALES:
            self.log_error(f"scale 必须是 {', '.join(SCALES)} 之一")
            return False
        return True

    # -- 图复形 ----------------------------------------------------------
    def _delta_squared(self, s: Dict[str, int]) -> Tuple[bool, str]:
        checked = 0
        for name in ("dfGC_2", "dfGC_3", "GC_or_2"):
            flavor = FlavorSpec.parse(name)
            keep = flavor if flavor.filters.names else None
            for k in range(1, s["vertices"] + 1):
                for l in range(0, s["edges"] + 1):
                    for c in basis(flavor, k, l, self.config.max_search_space):
                        if not differential(differential(GraphVector.from_class(c), keep), keep).is_zero:
                            return False, f"{name}: δ² ≠ 0 于 {c.encode()}"
                        checked += 1
        return True, f"{checked} 个基元素"

    def _m_bracket(self, s) -> Tuple[bool, str]:
        for d in (2, 3):
            m = m_element(d)
            if not bracket(m, m).is_zero:
                return False, f"d={d}: [m, m] ≠ 0"
        return True, "d = 2, 3"

    def _bracket_laws(self, s) -> Tuple[bool, str]:
        rng = random.Random(self.seed)
        flavor = FlavorSpec.parse("GC_or_2")
        pool = [c for k in range(2, 5) for l in range(1, 6) for c in basis(flavor, k, l)]
        if len(pool) < 2:
            return False, "基太小"
        for _ in range(s["pairs"]):
            a, b = rng.sample(pool, 2)
            va, vb = GraphVector.from_class(a), GraphVector.from_class(b)
            sign = (-1) ** ((a.degree * b.degree) % 2)
            if not (bracket(va, vb) + bracket(vb, va) * sign).is_zero:
                return False, f"反对称性失败: {a.encode()}, {b.encode()}"
        return True, f"{s['pairs']} 对"

    def _upsilon4(self, s) -> Tuple[bool, str]:
        if not differential(upsilon4()).is_zero:
            return False, "δΥ₄ ≠ 0"
        dims = cohomology_dim(
            FlavorSpec.parse("GC_or_2"), 4, 5, self.config.max_search_space, check_dense=True
        )
        return dims.h_dim == 1, f"H = {dims.h_dim}"

    def _mc_solver(self, s) -> Tuple[bool, str]:
        start = m_element(2) + upsilon4()
        upsilon6 = mc_extend(start, 6, max_search_space=self.config.max_search_space)
        defect = mc_defect(start + upsilon6, 7)
        return defect.is_zero, f"Υ₆ 有 {len(upsilon6)} 项"

    # -- 多项式表示 ------------------------------------------------------
    def _phi_schouten(self, s) -> Tuple[bool, str]:
        checked = 0
        for d in (2, 3):
            spec = GeneratorSpec(d, 2, truncation=2 * s["monomial_degree"] + 1)
            L = WeightedLinfty.from_graph_vector(m_element(d))
            basis_monomials = list(monomials(spec, s["monomial_degree"]))
            for f1 in basis_monomials:
                for f2 in basis_monomials:
                    if linfty_apply(L, 2, [f1, f2]) != schouten(f1, f2):
                        return False, f"d={d}: Φ_m({f1}, {f2}) ≠ [{f1}, {f2}]"
                    checked += 1
        return True, f"{checked} 对单项式"

    def _bialgebra(self, s) -> Tuple[bool, str]:
        C, Phi = structure_constants(2, {(0, 1): {1: 1}}, {1: {(0, 1): 1}})
        gamma = bialgebra_gamma(C, Phi, bialgebra_spec(2))
        if not schouten(gamma, gamma).is_zero:
            return False, "二维 Lie 双代数的 [γ, γ] ≠ 0"
        C, Phi = structure_constants(3, {(0, 1): {1: 1}}, {2: {(0, 1): 1}})
        broken = bialgebra_gamma(C, Phi, bialgebra_spec(3))
        return not schouten(broken, broken).is_zero, "二维例子闭合，三维反例不闭合"

    # -- prop ------------------------------------------------------------
    def _d_lieb_squared(self, s) -> Tuple[bool, str]:
        checked = 0
        for k in range(1, s["black"] + 1):
            for m in range(1, 3):
                for n in range(1, 3):
                    for g in enumerate_prop_graphs(k, m, n):
                        if not d_lieb_diff(d_lieb_diff(PropVector.from_graph(g))).is_zero:
                            return False, f"d² ≠ 0 于 {g.encode()}"
                        checked += 1
        return True, f"{checked} 个 PropGraph"

    def _lieb_infty(self, s) -> Tuple[bool, str]:
        checked = 0
        for total in range(3, s["arity"] + 1):
            for m in range(1, total):
                image = lieb_infty_diff(Corolla(m, total - m))
                if not d_lieb_diff(image).is_zero:
                    return False, f"({m}, {total - m}) 处 d² ≠ 0"
                checked += 1
        return True, f"{checked} 个 corolla"

    # -- 多面体 ----------------------------------------------------------
    def _polytopes(self, s) -> Tuple[bool, str]:
        if f_vector(3, 2, "K") != [6, 6, 1]:
            return False, f"K_3^2 的 f 向量为 {f_vector(3, 2, 'K')}"
        if len(build_poset(2, 2, "K").cells) != 3:
            return False, "K_2^2 不是 3 个胞腔"
        for n in range(2, s["polytope"] + 1):
            k_poset, a_poset = build_poset(1, n, "K"), build_poset(1, n, "A")
            shape = lambda p: (f_vector(p.m, p.n, p.family), sum(map(len, p.covers.values())))  # noqa: E731
            if shape(k_poset) != shape(a_poset):
                return False, f"K_1^{n} 与结合多面体不一致"
        for total in range(3, s["polytope"] + 1):
            for m in range(1, total):
                for family in ("K", "P"):
                    if not diamond_check(m, total - m, family):
                        return False, f"{family}({m}, {total - m}) 菱形性质失败"
                    if not boundary_f2_squares_to_zero(m, total - m, family):
                        return False, f"{family}({m}, {total - m}) 的 ∂² ≠ 0"
        return True, f"m + n ≤ {s['polytope']}"

    def _six_vertex_graphs(self, s) -> Tuple[bool, str]:
        if enumerate_quantizable_sets(1, max_search_space=self.config.max_search_space):
            return False, "Ĝ^or_{6,7} 非空"
        filters = FilterSet.of(GraphFilter.CONNECTED, GraphFilter.MIN_VALENCE_2)
        for c in enumerate_graphs(6, 7, filters, d=3, max_search_space=self.config.max_search_space):
            if sum(1 for v in c.graph.valences() if v == 2) < 4:
                return False, f"{c.encode()} 的二价顶点少于 4 个"
        return True, "Ĝ^or_{6,7} 为空，G_{6,7} 至少 4 个二价顶点"

    def _trivalent_bivalent_count(self, s) -> Tuple[bool, str]:
        graphs = enumerate_quantizable_sets(2, max_valence=3)
        bad = [c for c in graphs if sum(1 for v in c.graph.valences() if v == 2) != 4]
        return not bad, f"{len(graphs)} 个图"

    # -- 数值 ------------------------------------------------------------
    def _numerics(self, s) -> Tuple[bool, str]:
        prop = self.prop
        if abs(sphere_propagator_integral(prop, 2) - 1.0) > 1e-8:
            return False, "∫_{S¹} ω ≠ 1"
        for p in range(1, 6):
            if abs(lambda_p(prop, p) - 1.0 / math.factorial(p)) > 1e-8:
                return False, f"Λ^({p}) ≠ 1/{p}!"
        wedge = mc_weight_halfplane(wedge_graph(), prop, s["samples"], self.seed, self.workers)
        mirror = mc_weight_halfplane(wedge_graph(mirror=True), prop, s["samples"], self.seed + 1, self.workers)
        combined = wedge.mean - mirror.mean
        if abs(combined - 1.0) > 0.02:
            return False, f"楔形组合 {combined:.4f}"
        spec = GeneratorSpec(2, 2, truncation=4)
        gen = lambda name: SuperPolynomial.generator(spec, name)  # noqa: E731
        value = star_order1(gen("psi1") * gen("psi2"), prop, gen("x1"), gen("x2"), s["samples"], self.seed, self.workers)
        constant = dict(value.items()).get(spec.one(), Fraction(0))
        if abs(float(constant) - 1.0) > 0.02:
            return False, f"{{x, y}}₁ = {value}"
        return True, f"楔形组合 {combined:.4f}"

    def _numerics_full(self, s) -> Tuple[bool, str]:
        prop = self.prop
        if abs(sphere_propagator_integral(prop, 3, samples=10_000_000, seed=self.seed) - 1.0) > 1e-4:
            return False, "∫_{S²} ω ≠ 1"
        estimate = mc_weight_rd(BIVALENT_CHAIN_GRAPH, 3, prop, s["samples"], self.seed, self.workers)
        return estimate.consistent_with(0.0), f"{estimate.mean:.2e} ± {estimate.stderr:.1e}"

    def checks(self, scale: str) -> List[Check]:
        s = SCALES[scale]
        checks: List[Check] = [
            ("δ² = 0", lambda: self._delta_squared(s)),
            ("[m, m] = 0", lambda: self._m_bracket(s)),
            ("括号反对称", lambda: self._bracket_laws(s)),
            ("δΥ₄ = 0 且 H = 1", lambda: self._upsilon4(s)),
            ("Φ_m = Schouten", lambda: self._phi_schouten(s)),
            ("Lie 双代数 MC", lambda: self._bialgebra(s)),
            ("D Lieb∞ 的 d² = 0", lambda: self._d_lieb_squared(s)),
            ("Lieb∞ 的 d² = 0", lambda: self._lieb_infty(s)),
            ("分层偏序集", lambda: self._polytopes(s)),
            ("六顶点图集合", lambda: self._six_vertex_graphs(s)),
            ("数值积分", lambda: self._numerics(s)),
        ]
        if scale == "full":
            checks += [
                ("MC 求解到 Υ₆", lambda: self._mc_solver(s)),
                ("Ĝ^{≤3}_{10,13} 二价顶点", lambda: self._trivalent_bivalent_count(s)),
                ("S² 积分与二价顶点消失", lambda: self._numerics_full(s)),
            ]
        return checks

    def execute(self, **kwargs) -> Dict[str, Any]:
        """
        执行验收检查

        Args:
            **kwargs:
                - scale: quick（默认）或 full
                - seed, workers, theta0: 默认取配置
                - out: 输出目录（可选）

        Returns:
            执行结果；任一检查失败时 exit_code = 2
        """
        scale = kwargs.get("scale", "quick")
        self.seed = int(kwargs.get("seed", self.config.seed))
        self.workers = int(kwargs.get("workers", self.config.workers))
        self.prop = BumpPropagator(float(kwargs.get("theta0", self.config.theta0)))

        report: List[Dict[str, Any]] = []
        for name, check in self.checks(scale):
            try:
                passed, detail = check()
            except GCQError as e:
                passed, detail = False, f"{type(e).__name__}: {e}"
            report.append({"check": name, "passed": bool(passed), "detail": detail})
            if passed:
                self.log_success(f"{name}: {detail}")
            else:
                self.log_error(f"{name}: {detail}")

        failed = [r["check"] for r in report if not r["passed"]]
        document = {"scale": scale, "seed": self.seed, "passed": not failed, "checks": report}
        path = self.write_output(f"verify_{scale}.json", json.dumps(document, indent=2, ensure_ascii=False) + "\n", kwargs.get("out"))

        if failed:
            return {
                "success": False,
                "error": f"{len(failed)} 项检查失败: {', '.join(failed)}",
                "exit_code": VerificationError.exit_code,
                "checks": report,
                "output": str(path),
            }
        return {"success": True, "message": f"全部 {len(report)} 项检查通过", "checks": report, "output": str(path)}

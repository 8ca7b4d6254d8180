"""
Maurer-Cartan 求解作业
从 m 出发逐阶构造 Υ = m + Υ₄ + Υ₆ + …，写出各阶的项与缺陷报告
"""

import json
from typing import Any, Dict, List

from ..core.base import BaseJob
from ..core.errors import ObstructionError
from ..gcomplex import FlavorSpec, m_element, mc_defect, mc_extend, project, upsilon4
from ..graphcore import GraphVector, encode_graph, format_fraction
from ..polyrep import quantizable_arity


def candidate_orders(d: int, max_vertices: int) -> List[int]:
    """可能非零的阶 k = 2p(d−1)+2；d 为奇数时反射使 p 为奇数的阶为零"""
    orders = []
    p = 1
    while quantizable_arity(d, p) <= max_vertices:
        if d % 2 == 0 or p % 2 == 0:
            orders.append(quantizable_arity(d, p))
        p += 1
    return orders


def _records(v: GraphVector) -> List[Dict[str, str]]:
    return [{"graph": encode_graph(g, v.d), "coeff": format_fraction(c)} for g, c in v.items()]


class McSolveJob(BaseJob):
    """逐阶求解图复形中的 Maurer-Cartan 元素"""

    def get_config_keys(self) -> List[str]:
        return ["max_vertices", "max_search_space", "output_dir"]

    def validate_params(self, **kwargs) -> bool:
        if not kwargs.get("flavor"):
            self.log_error("必须指定 flavor")
            return False
        max_vertices = int(kwargs.get("max_vertices", self.config.max_vertices))
        if max_vertices < 2:
            self.log_error("max_vertices 至少为 2")
            return False
        return True

    def execute(self, **kwargs) -> Dict[str, Any]:
        """
        执行求解

        Args:
            **kwargs:
                - flavor: 子复形，例如 "GC_or_2"
                - max_vertices: 最高阶（默认取配置）
                - out: 输出目录（可选）

        Returns:
            执行结果，terms 为 {阶: 项数}
        """
        flavor = FlavorSpec.parse(str(kwargs["flavor"]))
        max_vertices = int(kwargs.get("max_vertices", self.config.max_vertices))
        d = flavor.d

        upsilon = m_element(d)
        layers: Dict[int, GraphVector] = {2: upsilon}
        report: Dict[str, Any] = {"flavor": str(flavor), "max_vertices": max_vertices}
        obstruction = None

        for order in candidate_orders(d, max_vertices):
            if order == 4 and d == 2:
                layer = project(upsilon4(), flavor)
            else:
                try:
                    layer = mc_extend(upsilon, order, flavor, self.config.max_search_space)
                except ObstructionError as e:
                    self.log_error(f"{order} 顶点处的障碍不是恰当的")
                    obstruction = {"order": order, "residual": _records(e.residual)}
                    break
            if layer:
                layers[order] = layer
                upsilon = upsilon + layer
                self.log_info(f"Υ_{order}: {len(layer)} 项")

        cutoff = max_vertices + 1
        defect = project(mc_defect(upsilon, cutoff), flavor)
        report["terms"] = {str(order): _records(layer) for order, layer in layers.items()}
        report["defect"] = {"cutoff": cutoff, "zero": defect.is_zero, "terms": _records(defect)}
        if obstruction:
            report["obstruction"] = obstruction

        name = f"mc_{flavor.subcomplex.value}_d{d}_v{max_vertices}.json"
        path = self.write_output(name, json.dumps(report, indent=2, ensure_ascii=False) + "\n", kwargs.get("out"))

        counts = {order: len(layer) for order, layer in layers.items()}
        if obstruction:
            return {
                "success": False,
                "error": f"{obstruction['order']} 顶点处障碍不是恰当的",
                "exit_code": 1,
                "terms": counts,
                "output": str(path),
            }
        if not defect.is_zero:
            self.log_warning(f"缺陷在 {cutoff} 顶点以内不为零: {len(defect)} 项")
        else:
            self.log_success(f"缺陷在 {cutoff} 顶点以内为零")
        return {
            "success": True,
            "message": f"求得 {len(layers)} 阶: {sorted(layers)}",
            "terms": counts,
            "defect_zero": defect.is_zero,
            "output": str(path),
        }

"""
图复形基枚举作业
按子复形与附加过滤器枚举 (k, l) 扇区的规范类（或带标号的图），逐行写出编码
"""

from typing import Any, Dict, List, Optional

from ..core.base import BaseJob
from ..gcomplex import FlavorSpec
from ..graphcore import FilterSet, encode_graph, enumerate_graphs


class BasisJob(BaseJob):
    """枚举图复形的基"""

    def get_config_keys(self) -> List[str]:
        return ["max_search_space", "output_dir"]

    def validate_params(self, **kwargs) -> bool:
        if kwargs.get("flavor") is None or kwargs.get("k") is None or kwargs.get("l") is None:
            self.log_error("必须指定 flavor、k 与 l")
            return False
        if int(kwargs["k"]) < 1 or int(kwargs["l"]) < 0:
            self.log_error("需要 k ≥ 1 且 l ≥ 0")
            return False
        return True

    def execute(self, **kwargs) -> Dict[str, Any]:
        """
        执行基枚举

        Args:
            **kwargs:
                - flavor: 子复形，例如 "GC_or_2"、"dfGC_3"
                - k, l: 顶点数与边数
                - filters: 附加过滤器（逗号分隔，可选）
                - labeled: 是否输出全部带标号的图（默认 False）
                - out: 输出目录（可选）

        Returns:
            执行结果
        """
        flavor = FlavorSpec.parse(str(kwargs["flavor"]))
        k, l = int(kwargs["k"]), int(kwargs["l"])
        labeled = bool(kwargs.get("labeled", False))
        extra: Optional[str] = kwargs.get("filters")

        filters = flavor.filters
        if extra:
            filters = filters.union(FilterSet.of(*(name.strip() for name in extra.split(",") if name.strip())))

        classes = enumerate_graphs(
            k, l, filters, flavor.d, labeled=labeled, max_search_space=self.config.max_search_space
        )
        lines = [encode_graph(c.graph, c.dimension_flavor) for c in classes]
        suffix = "_labeled" if labeled else ""
        name = f"basis_{flavor.subcomplex.value}_d{flavor.d}_k{k}_l{l}{suffix}.txt"
        path = self.write_output(name, "".join(line + "\n" for line in lines), kwargs.get("out"))

        self.log_success(f"{flavor} (k={k}, l={l}, 过滤器={filters}): {len(lines)} 个元素")
        return {
            "success": True,
            "message": f"共 {len(lines)} 个基元素",
            "count": len(lines),
            "filters": str(filters),
            "output": str(path),
        }

"""
分层偏序集作业
写出 K_m^n、P_m^n 或结合多面体的胞腔与覆盖关系（JSON）以及 f 向量（CSV）
"""

from typing import Any, Dict, List

from ..core.base import BaseJob
from ..polytopes import diamond_check, f_vector, f_vector_csv, poset_to_json

FAMILIES = ("K", "P", "A")


class PolytopeJob(BaseJob):
    """枚举双结合/双置换多面体的分层"""

    def get_config_keys(self) -> List[str]:
        return ["output_dir"]

    def validate_params(self, **kwargs) -> bool:
        family = str(kwargs.get("family", "")).upper()
        if family not in FAMILIES:
            self.log_error(f"family 必须是 {', '.join(FAMILIES)} 之一")
            return False
        if kwargs.get("m") is None or kwargs.get("n") is None:
            self.log_error("必须指定 m 与 n")
            return False
        return True

    def execute(self, **kwargs) -> Dict[str, Any]:
        family = str(kwargs["family"]).upper()
        m, n = int(kwargs["m"]), int(kwargs["n"])
        out = kwargs.get("out")

        counts = f_vector(m, n, family)
        stem = f"{family}_{m}_{n}"
        poset_path = self.write_output(f"{stem}.json", poset_to_json(m, n, family) + "\n", out)
        csv_path = self.write_output(f"{stem}_f_vector.csv", f_vector_csv([(family, m, n, counts)]), out)

        result: Dict[str, Any] = {
            "success": True,
            "message": f"{family}({m}, {n}) 的 f 向量: {tuple(counts)}",
            "f_vector": counts,
            "output": str(poset_path),
            "csv": str(csv_path),
        }
        if kwargs.get("check"):
            result["diamond"] = diamond_check(m, n, family)
        return result

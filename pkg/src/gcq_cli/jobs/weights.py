"""
图权重作业
读取图编码文件（每行一个图，# 开头为注释），逐行估计权重并写出 CSV 权重表
"""

import math
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..core.base import BaseJob
from ..core.errors import FlavorMismatchError, GCQError, StructuralError
from ..graphcore import decode_graph
from ..integrals import (
    BumpPropagator,
    WeightEstimate,
    decode_halfplane,
    mc_weight_H,
    mc_weight_halfplane,
    mc_weight_rd,
    weights_table_csv,
)
from ..props import prop_decode

SPACES = ("rd", "halfplane", "H")


def read_graph_lines(path: Path) -> List[str]:
    lines = []
    with open(path, "r", encoding="utf-8") as f:
        for raw in f:
            line = raw.strip()
            if line and not line.startswith("#"):
                lines.append(line)
    return lines


class WeightsJob(BaseJob):
    """蒙特卡洛估计图权重"""

    stochastic = True

    def get_config_keys(self) -> List[str]:
        return ["seed", "samples", "workers", "theta0", "output_dir"]

    def validate_params(self, **kwargs) -> bool:
        if kwargs.get("space") not in SPACES:
            self.log_error(f"space 必须是 {', '.join(SPACES)} 之一")
            return False
        graph_file = kwargs.get("graph_file")
        if not graph_file or not self._resolve(graph_file).exists():
            self.log_error(f"图文件不存在: {graph_file}")
            return False
        return True

    def _resolve(self, graph_file: str) -> Path:
        path = Path(graph_file)
        return path if path.is_absolute() else self.working_dir / path

    def _estimate(
        self, line: str, space: str, d: Optional[int], prop: BumpPropagator, samples: int, seed: int, workers: int
    ) -> WeightEstimate:
        if space == "rd":
            graph, encoded_d = decode_graph(line)
            if d is not None and d != encoded_d:
                raise FlavorMismatchError(f"图编码的维数 d={encoded_d} 与参数 d={d} 不一致")
            return mc_weight_rd(graph, encoded_d, prop, samples, seed, workers)
        if space == "halfplane":
            return mc_weight_halfplane(decode_halfplane(line), prop, samples, seed, workers)
        return mc_weight_H(prop_decode(line), prop, samples, seed, workers)

    def execute(self, **kwargs) -> Dict[str, Any]:
        """
        执行权重估计

        Args:
            **kwargs:
                - graph_file: 图编码文件
                - space: rd、halfplane 或 H
                - d: ℝ^d 的维数（可选，须与编码一致）
                - samples, seed, workers, theta0: 默认取配置
                - out: 输出目录（可选）

        Returns:
            执行结果；第 i 行使用种子 seed + i
        """
        space = kwargs["space"]
        d = int(kwargs["d"]) if kwargs.get("d") is not None else None
        samples = int(kwargs.get("samples", self.config.samples))
        seed = int(kwargs.get("seed", self.config.seed))
        workers = int(kwargs.get("workers", self.config.workers))
        prop = BumpPropagator(float(kwargs.get("theta0", self.config.theta0)))

        graph_path = self._resolve(kwargs["graph_file"])
        lines = read_graph_lines(graph_path)
        if not lines:
            raise StructuralError(f"图文件为空: {graph_path}")

        rows: List[WeightEstimate] = []
        failures: List[Dict[str, str]] = []
        for index, line in enumerate(lines):
            row_seed = seed + index
            try:
                estimate = self._estimate(line, space, d, prop, samples, row_seed, workers)
            except (StructuralError, FlavorMismatchError):
                raise
            except GCQError as e:
                self.log_error(f"{line}: {e}")
                failures.append({"graph": line, "error": str(e)})
                estimate = WeightEstimate(math.nan, math.nan, samples, row_seed, line, d, space)
            if estimate.exact:
                self.log_info(f"{estimate.graph}: 精确为 0（{estimate.reason}）")
            else:
                self.log_info(f"{estimate.graph}: {estimate.mean:.6f} ± {estimate.stderr:.6f}")
            rows.append(estimate)

        name = f"weights_{space}_{graph_path.stem}_s{seed}.csv"
        path = self.write_output(name, weights_table_csv(rows), kwargs.get("out"))
        summary = [{"graph": r.graph, "mean": r.mean, "stderr": r.stderr, "exact": r.exact} for r in rows]
        if failures:
            return {
                "success": False,
                "error": f"{len(failures)} 行采样失败",
                "exit_code": 1,
                "rows": summary,
                "failures": failures,
                "output": str(path),
            }
        return {"success": True, "message": f"已估计 {len(rows)} 个权重", "rows": summary, "output": str(path)}

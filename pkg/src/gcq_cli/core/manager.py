"""
作业管理器
发现、校验并执行 gcq_cli/jobs 下的计算作业
"""

import importlib
import inspect
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Type

from pydantic import ValidationError

from ..config import GCQConfig, JobSpec
from ..utils import get_logger, log_debug, log_error, log_warning
from .base import BaseJob
from .errors import GCQError

logger = get_logger("manager")


class JobManager:
    """作业管理器"""

    def __init__(self, config: GCQConfig, working_dir: Path):
        """
        初始化作业管理器

        Args:
            config: 配置对象
            working_dir: 工作目录
        """
        self.config = config
        self.working_dir = working_dir
        self.jobs: Dict[str, Type[BaseJob]] = {}
        self._load_jobs()

    def _load_jobs(self):
        """加载所有作业"""
        jobs_dir = Path(__file__).parent.parent / "jobs"

        for job_file in sorted(jobs_dir.glob("*.py")):
            if job_file.name == "__init__.py":
                continue

            try:
                module = importlib.import_module(f"gcq_cli.jobs.{job_file.stem}")
                for _, obj in inspect.getmembers(module, inspect.isclass):
                    if issubclass(obj, BaseJob) and obj is not BaseJob and obj.__module__ == module.__name__:
                        self.jobs[job_file.stem] = obj
                        break
            except Exception as e:
                log_error(f"加载作业失败 {job_file.name}: {e}", logger)

        log_debug(f"已加载作业: {', '.join(self.jobs)}", logger)

    def get_available_jobs(self) -> List[str]:
        """获取可用的作业列表"""
        return list(self.jobs.keys())

    def get_job_info(self, job_name: str) -> Optional[Dict[str, Any]]:
        """获取作业信息"""
        if job_name not in self.jobs:
            return None
        return self.jobs[job_name](self.config, self.working_dir).get_job_info()

    def build_spec(self, job_name: str, params: Dict[str, Any]) -> JobSpec:
        """由参数与配置组装 JobSpec（pydantic 校验资源上限与种子）"""
        job_class = self.jobs[job_name]
        seed = params.get("seed", self.config.seed if job_class.stochastic else None)
        return JobSpec(
            command=job_name,
            params=params,
            seed=seed,
            stochastic=job_class.stochastic,
            max_vertices=params.get("max_vertices", self.config.max_vertices),
            max_samples=params.get("samples", self.config.samples),
            max_search_space=self.config.max_search_space,
            time_budget=params.get("time_budget"),
            output=params.get("out"),
        )

    def execute_job(self, job_name: str, **kwargs) -> Dict[str, Any]:
        """
        执行作业

        Args:
            job_name: 作业名称
            **kwargs: 作业参数

        Returns:
            执行结果
        """
        if job_name not in self.jobs:
            return {
                "success": False,
                "error": f"作业不存在: {job_name}",
                "exit_code": 1,
                "available_jobs": self.get_available_jobs(),
            }

        try:
            spec = self.build_spec(job_name, kwargs)
        except ValidationError as e:
            return {"success": False, "error": f"作业参数无效: {e}", "exit_code": 1, "job_name": job_name}

        job = self.jobs[job_name](self.config, self.working_dir)
        if not job.validate_params(**kwargs):
            return {"success": False, "error": "参数验证失败", "exit_code": 1, "job_name": job_name}

        started = time.perf_counter()
        try:
            result = job.execute(**kwargs)
        except GCQError as e:
            result = {"success": False, "error": str(e), "exit_code": e.exit_code}
        except Exception as e:
            result = {"success": False, "error": f"执行作业失败: {e}", "exit_code": 1}
        elapsed = time.perf_counter() - started

        if spec.time_budget is not None and elapsed > spec.time_budget:
            log_warning(f"作业 {job_name} 用时 {elapsed:.1f}s，超过预算 {spec.time_budget:.1f}s", logger)

        result.setdefault("exit_code", 0 if result.get("success") else 1)
        result["job_name"] = job_name
        result["elapsed"] = elapsed
        return result

    def list_jobs(self) -> List[Dict[str, Any]]:
        """列出所有作业信息"""
        return [info for info in (self.get_job_info(name) for name in self.jobs) if info]

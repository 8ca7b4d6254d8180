"""
作业基类
定义所有计算作业的统一接口
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional

from .. import utils
from ..config import GCQConfig
from ..utils import ensure_directory_exists, get_logger


class BaseJob(ABC):
    """作业基类"""

    # 需要随机种子的作业
    stochastic: bool = False

    def __init__(self, config: GCQConfig, working_dir: Path):
        """
        初始化作业

        Args:
            config: 合并后的配置对象
            working_dir: 命令运行的目录路径
        """
        self.config = config
        self.working_dir = working_dir
        self.logger = get_logger(f"jobs.{self.job_name}")

    @property
    def job_name(self) -> str:
        return self.__class__.__module__.rsplit(".", 1)[-1]

    @abstractmethod
    def execute(self, **kwargs) -> Dict[str, Any]:
        """
        执行作业的主要逻辑

        Args:
            **kwargs: 作业特定的参数

        Returns:
            执行结果字典，至少包含 success
        """

    @abstractmethod
    def validate_params(self, **kwargs) -> bool:
        """
        验证作业参数

        Args:
            **kwargs: 作业特定的参数

        Returns:
            参数是否有效
        """

    def get_job_info(self) -> Dict[str, Any]:
        """
        获取作业信息

        Returns:
            作业信息字典
        """
        doc = (self.__doc__ or "无描述").strip().splitlines()[0]
        return {
            "name": self.job_name,
            "description": doc,
            "stochastic": self.stochastic,
            "config_keys": self.get_config_keys(),
        }

    def get_config_keys(self) -> List[str]:
        """
        获取作业使用的配置键

        Returns:
            配置键列表
        """
        return []

    def log_info(self, message: str):
        utils.log_info(message, self.logger)

    def log_success(self, message: str):
        utils.log_success(message, self.logger)

    def log_warning(self, message: str):
        utils.log_warning(message, self.logger)

    def log_error(self, message: str):
        utils.log_error(message, self.logger)

    def output_dir(self, out: Optional[str] = None) -> Path:
        """--out 优先，否则使用配置中的 output_dir（相对于工作目录）"""
        target = Path(out) if out else Path(self.config.output_dir)
        if not target.is_absolute():
            target = self.working_dir / target
        return target

    def write_output(self, name: str, text: str, out: Optional[str] = None) -> Path:
        """
        写出纯文本结果文件

        Args:
            name: 文件名
            text: 文件内容
            out: 输出目录（可选）

        Returns:
            写出的文件路径
        """
        directory = self.output_dir(out)
        ensure_directory_exists(directory)
        path = directory / name
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        self.log_info(f"已写出 {path}")
        return path

"""
配置管理模块
实现三层配置系统：内置配置、全局配置、本地配置，最后由环境变量覆盖资源上限
"""

import json
import math
import os
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field, field_validator, model_validator
from rich.console import Console
from rich.table import Table

console = Console()

ENV_MAX_SEARCH_SPACE = "GCQ_MAX_SEARCH_SPACE"


class GCQConfig(BaseModel):
    """GCQ配置模型"""

    # 随机数与采样
    seed: int = Field(default=0, description="随机种子")
    samples: int = Field(default=100_000, description="蒙特卡洛样本数")
    workers: int = Field(default=1, description="采样工作进程数")

    # 资源上限
    max_vertices: int = Field(default=8, description="MC 求解的最大顶点数")
    max_search_space: int = Field(
        default=2_000_000, description="枚举搜索空间上限（超过即触发资源保护）"
    )

    # 传播子
    theta0: float = Field(default=math.pi / 6, description="凸起函数支撑边距 θ₀")

    # 输出与日志
    output_dir: str = Field(default="./gcq_out", description="输出目录")
    log_level: str = Field(default="INFO", description="日志级别")
    debug: bool = Field(default=False, description="调试模式")

    @field_validator("samples", "workers", "max_vertices", "max_search_space")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("资源上限必须为正数")
        return value

    @field_validator("theta0")
    @classmethod
    def _margin(cls, value: float) -> float:
        if not 0.0 < value < math.pi / 2:
            raise ValueError("θ₀ 必须位于 (0, π/2)")
        return value


class JobSpec(BaseModel):
    """一次作业的命令、参数、种子与资源上限"""

    command: str = Field(description="作业名称")
    params: Dict[str, Any] = Field(default_factory=dict, description="作业参数")
    seed: Optional[int] = Field(default=None, description="随机种子")
    stochastic: bool = Field(default=False, description="是否为随机作业")
    max_vertices: int = Field(default=8, description="最大顶点数")
    max_samples: int = Field(default=100_000, description="最大样本数")
    max_search_space: int = Field(default=2_000_000, description="枚举搜索空间上限")
    time_budget: Optional[float] = Field(default=None, description="时间预算（秒）")
    output: Optional[str] = Field(default=None, description="输出目录")

    @field_validator("max_vertices", "max_samples", "max_search_space")
    @classmethod
    def _bounded(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("资源上限必须为正数")
        return value

    @field_validator("time_budget")
    @classmethod
    def _budget(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and value <= 0:
            raise ValueError("时间预算必须为正数")
        return value

    @model_validator(mode="after")
    def _seeded(self) -> "JobSpec":
        if self.stochastic and self.seed is None:
            raise ValueError(f"随机作业 {self.command} 需要种子")
        return self


class ConfigManager:
    """配置管理器"""

    def __init__(self):
        self.config_file_name = ".gcqrc"
        self.builtin_config = self._get_builtin_config()
        self.global_config_path = self._get_global_config_path()
        self.local_config_path = self._get_local_config_path()

    def _get_builtin_config(self) -> Dict[str, Any]:
        """获取内置配置"""
        return GCQConfig().model_dump()

    def _get_global_config_path(self) -> Path:
        """获取全局配置文件路径"""
        return Path.home() / self.config_file_name

    def _get_local_config_path(self) -> Path:
        """获取本地配置文件路径"""
        return Path.cwd() / self.config_file_name

    def _read_layer(self, path: Path, label: str) -> Dict[str, Any]:
        if not path.exists():
            return {}
        try:
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
        except Exception as e:
            console.print(f"[yellow]警告: 无法读取{label}配置文件: {e}[/yellow]")
            return {}

    def load_config(self) -> GCQConfig:
        """加载配置，按优先级合并"""
        config_dict = self.builtin_config.copy()
        config_dict.update(self._read_layer(self.global_config_path, "全局"))
        config_dict.update(self._read_layer(self.local_config_path, "本地"))

        env_bound = os.environ.get(ENV_MAX_SEARCH_SPACE)
        if env_bound:
            try:
                config_dict["max_search_space"] = int(env_bound)
            except ValueError:
                console.print(
                    f"[yellow]警告: 忽略非法的 {ENV_MAX_SEARCH_SPACE}={env_bound}[/yellow]"
                )

        known = {k: v for k, v in config_dict.items() if k in GCQConfig.model_fields}
        return GCQConfig(**known)

    def _save(self, config: GCQConfig, path: Path, label: str) -> None:
        try:
            with open(path, "w", encoding="utf-8") as f:
                json.dump(config.model_dump(), f, indent=2, ensure_ascii=False)
            console.print(f"[green]{label}配置已保存到: {path}[/green]")
        except Exception as e:
            console.print(f"[red]错误: 无法保存{label}配置: {e}[/red]")

    def save_global_config(self, config: GCQConfig) -> None:
        """保存全局配置"""
        self._save(config, self.global_config_path, "全局")

    def save_local_config(self, config: GCQConfig) -> None:
        """保存本地配置"""
        self._save(config, self.local_config_path, "本地")

    def show_config(self, config: GCQConfig) -> None:
        """显示配置信息"""
        table = Table(title="GCQ 配置信息")
        table.add_column("配置项", style="cyan")
        table.add_column("值", style="green")
        table.add_column("描述", style="yellow")

        for field_name, field in GCQConfig.model_fields.items():
            value = getattr(config, field_name)
            table.add_row(field_name, str(value), field.description or "")

        console.print(table)

        console.print("\n[cyan]配置文件路径:[/cyan]")
        console.print("  内置配置: 内置")
        console.print(f"  全局配置: {self.global_config_path}")
        console.print(f"  本地配置: {self.local_config_path}")
        console.print(f"  环境变量: {ENV_MAX_SEARCH_SPACE}")

    def create_default_configs(self) -> None:
        """创建默认配置文件"""
        default_config = GCQConfig()
        if not self.global_config_path.exists():
            self.save_global_config(default_config)
        if not self.local_config_path.exists():
            self.save_local_config(default_config)

    def convert_value(self, key: str, value: str) -> Optional[Any]:
        """按字段类型转换命令行给出的字符串值，未知键返回 None"""
        field = GCQConfig.model_fields.get(key)
        if field is None:
            return None
        if field.annotation is bool:
            lowered = value.lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"无效的布尔值: {value}")
        if field.annotation is int:
            return int(value)
        if field.annotation is float:
            return float(value)
        return value


# 全局配置管理器实例
config_manager = ConfigManager()

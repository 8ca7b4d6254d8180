"""
错误类型
所有库函数抛出的异常都继承自 GCQError，并携带命令行退出码
"""

from typing import Any, Optional


class GCQError(Exception):
    """GCQ 基础异常"""

    exit_code = 1

    def __init__(self, message: str, payload: Optional[Any] = None):
        super().__init__(message)
        self.payload = payload


class StructuralError(GCQError):
    """图、树或多项式的结构不合法"""


class FlavorMismatchError(GCQError):
    """维数 d 或生成元规格不一致"""


class ResourceGuardError(GCQError):
    """搜索空间超过配置的上限"""

    exit_code = 3


class ObstructionError(GCQError):
    """障碍类不是恰当的，payload 为残差向量"""

    @property
    def residual(self) -> Any:
        return self.payload


class SamplingError(GCQError):
    """蒙特卡洛采样退化"""


class MissingArityError(GCQError):
    """L∞ 结构缺少所需元数"""


class QuadratureError(GCQError):
    """数值积分未收敛，payload 为实际误差"""


class VerificationError(GCQError):
    """验收检查失败"""

    exit_code = 2

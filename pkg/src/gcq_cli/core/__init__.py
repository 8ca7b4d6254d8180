"""
GCQ CLI 核心模块
包含作业基类、作业管理器和错误类型
"""

from .errors import (
    FlavorMismatchError,
    GCQError,
    MissingArityError,
    ObstructionError,
    QuadratureError,
    ResourceGuardError,
    SamplingError,
    StructuralError,
    VerificationError,
)

__version__ = "0.1.0"

__all__ = [
    "GCQError",
    "StructuralError",
    "FlavorMismatchError",
    "ResourceGuardError",
    "ObstructionError",
    "SamplingError",
    "MissingArityError",
    "QuadratureError",
    "VerificationError",
]

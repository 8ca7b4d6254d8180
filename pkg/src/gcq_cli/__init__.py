"""
GCQ CLI - 图复形、量子化权重与分层多面体的计算工具
"""

__version__ = "0.1.0"

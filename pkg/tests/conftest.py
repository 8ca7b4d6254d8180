"""
测试公共夹具
"""

import math

import pytest

from gcq_cli.config import GCQConfig, config_manager
from gcq_cli.integrals import BumpPropagator


@pytest.fixture
def prop() -> BumpPropagator:
    return BumpPropagator(math.pi / 6)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """隔离的工作目录：配置文件与输出都落在 tmp_path 下"""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("GCQ_CURRENT_DIR", str(tmp_path))
    monkeypatch.delenv("GCQ_MAX_SEARCH_SPACE", raising=False)
    monkeypatch.setattr(config_manager, "global_config_path", tmp_path / "home.gcqrc")
    monkeypatch.setattr(config_manager, "local_config_path", tmp_path / ".gcqrc")
    return tmp_path


@pytest.fixture
def config(tmp_path) -> GCQConfig:
    return GCQConfig(output_dir=str(tmp_path / "out"), samples=20_000)

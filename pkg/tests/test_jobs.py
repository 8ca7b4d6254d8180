"""
作业层测试：JobManager 的发现、校验与退出码，以及各作业的输出文件
"""

import json

import pytest
from pydantic import ValidationError

from gcq_cli.config import GCQConfig, JobSpec
from gcq_cli.core.manager import JobManager
from gcq_cli.jobs.mc_solve import candidate_orders
from gcq_cli.jobs.weights import read_graph_lines


@pytest.fixture
def manager(config, tmp_path) -> JobManager:
    return JobManager(config, tmp_path)


def test_jobs_are_discovered(manager):
    assert set(manager.get_available_jobs()) == {"basis", "mc_solve", "polytope", "verify", "weights"}
    info = manager.get_job_info("weights")
    assert info["stochastic"] is True
    assert "seed" in info["config_keys"]
    assert manager.get_job_info("nope") is None


def test_unknown_job(manager):
    result = manager.execute_job("nope")
    assert not result["success"]
    assert result["exit_code"] == 1
    assert "basis" in result["available_jobs"]


def test_validation_failure(manager):
    result = manager.execute_job("basis", flavor="dfGC_2")
    assert not result["success"]
    assert result["error"] == "参数验证失败"


def test_invalid_time_budget(manager):
    result = manager.execute_job("basis", flavor="dfGC_2", k=2, l=1, time_budget=-1)
    assert not result["success"]
    assert result["error"].startswith("作业参数无效")


class TestJobSpec:
    def test_stochastic_job_needs_seed(self):
        with pytest.raises(ValidationError):
            JobSpec(command="weights", stochastic=True)
        assert JobSpec(command="weights", stochastic=True, seed=0).seed == 0

    def test_bounds_are_positive(self):
        with pytest.raises(ValidationError):
            JobSpec(command="basis", max_search_space=0)

    def test_stochastic_seed_defaults_to_config(self, tmp_path):
        manager = JobManager(GCQConfig(seed=42), tmp_path)
        assert manager.build_spec("weights", {}).seed == 42
        assert manager.build_spec("basis", {}).seed is None


class TestBasisJob:
    def test_labeled_and_canonical(self, manager, config):
        labeled = manager.execute_job("basis", flavor="dfGC_2", k=2, l=1, labeled=True)
        canonical = manager.execute_job("basis", flavor="dfGC_2", k=2, l=1)
        assert labeled["count"] == 2
        assert canonical["count"] == 1
        assert labeled["output"].endswith("_labeled.txt")
        with open(canonical["output"], encoding="utf-8") as f:
            assert f.read().splitlines() == ["d2;k2;E:0>1"]

    def test_extra_filters(self, manager):
        result = manager.execute_job("basis", flavor="dfGC_3", k=3, l=3, filters="no-triangle")
        assert result["success"]
        assert "no-triangle" in result["filters"]

    def test_resource_guard_exit_code(self, tmp_path):
        manager = JobManager(GCQConfig(max_search_space=10, output_dir=str(tmp_path)), tmp_path)
        result = manager.execute_job("basis", flavor="dfGC_2", k=5, l=7)
        assert not result["success"]
        assert result["exit_code"] == 3


class TestPolytopeJob:
    def test_writes_poset_and_f_vector(self, manager):
        result = manager.execute_job("polytope", family="K", m=3, n=2, check=True)
        assert result["success"]
        assert result["f_vector"] == [6, 6, 1]
        assert result["diamond"] is True
        with open(result["csv"], encoding="utf-8") as f:
            assert f.read() == "family,m,n,f_vector\nK,3,2,6 6 1\n"
        with open(result["output"], encoding="utf-8") as f:
            assert json.load(f)["family"] == "K"

    def test_unknown_family(self, manager):
        assert manager.execute_job("polytope", family="Q", m=2, n=2)["error"] == "参数验证失败"

    def test_resource_guard(self, manager):
        result = manager.execute_job("polytope", family="P", m=4, n=4)
        assert result["exit_code"] == 3


class TestMcSolveJob:
    @pytest.mark.parametrize("d,max_vertices,expected", [(2, 8, [4, 6, 8]), (3, 8, []), (3, 10, [10]), (4, 8, [8])])
    def test_candidate_orders(self, d, max_vertices, expected):
        assert candidate_orders(d, max_vertices) == expected

    def test_upsilon4(self, manager):
        result = manager.execute_job("mc_solve", flavor="GC_or_2", max_vertices=4)
        assert result["success"], result.get("error")
        assert result["terms"] == {2: 1, 4: 3}
        assert result["defect_zero"]
        with open(result["output"], encoding="utf-8") as f:
            report = json.load(f)
        assert set(report["terms"]) == {"2", "4"}

    def test_needs_two_vertices(self, manager):
        assert not manager.execute_job("mc_solve", flavor="GC_or_2", max_vertices=1)["success"]


class TestWeightsJob:
    def test_read_graph_lines(self, tmp_path):
        path = tmp_path / "graphs.txt"
        path.write_text("# 注释\n\n d2;k2;E:0>1 \n", encoding="utf-8")
        assert read_graph_lines(path) == ["d2;k2;E:0>1"]

    def test_structural_zeros(self, manager, tmp_path):
        (tmp_path / "graphs.txt").write_text("# 次数不匹配\nd2;k3;E:0>1,1>2\n", encoding="utf-8")
        result = manager.execute_job("weights", graph_file="graphs.txt", space="rd", seed=5)
        assert result["success"]
        assert result["rows"][0]["exact"]
        with open(result["output"], encoding="utf-8") as f:
            lines = f.read().splitlines()
        assert lines[0] == "graph,d,mean,stderr,samples,seed"
        assert lines[1].endswith(",0.0,0.0,0,5")

    def test_halfplane_degree_mismatch(self, manager, tmp_path):
        (tmp_path / "hp.txt").write_text("H1,2;E:0>1\n", encoding="utf-8")
        result = manager.execute_job("weights", graph_file="hp.txt", space="halfplane")
        assert result["success"]
        assert result["rows"][0]["exact"]

    def test_sampling_failure_becomes_nan_row(self, manager, tmp_path):
        (tmp_path / "graphs.txt").write_text("d2;k3;E:0>1,0>2,1>2\n", encoding="utf-8")
        result = manager.execute_job("weights", graph_file="graphs.txt", space="rd", samples=1)
        assert not result["success"]
        assert result["exit_code"] == 1
        assert len(result["failures"]) == 1
        with open(result["output"], encoding="utf-8") as f:
            assert "nan" in f.read()

    def test_dimension_mismatch(self, manager, tmp_path):
        (tmp_path / "graphs.txt").write_text("d2;k3;E:0>1,0>2,1>2\n", encoding="utf-8")
        result = manager.execute_job("weights", graph_file="graphs.txt", space="rd", d=3)
        assert not result["success"]
        assert result["exit_code"] == 1

    def test_missing_file(self, manager):
        assert manager.execute_job("weights", graph_file="missing.txt", space="rd")["error"] == "参数验证失败"


@pytest.mark.slow
def test_verify_quick(manager):
    result = manager.execute_job("verify", scale="quick", seed=0)
    assert result["success"], result.get("error")
    assert all(row["passed"] for row in result["checks"])

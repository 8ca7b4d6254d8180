"""
精确线性代数测试
"""

from fractions import Fraction

import pytest

from gcq_cli.core.errors import ObstructionError
from gcq_cli.linalg import SparseSystem, dense_rank, to_dense


def _system() -> SparseSystem:
    # 列 a, b, c 的像；c = a + b
    return SparseSystem.from_columns(
        ["a", "b", "c"],
        [{"x": 1, "y": 2}, {"y": 1, "z": Fraction(1, 2)}, {"x": 1, "y": 3, "z": Fraction(1, 2)}],
    )


def test_rank_matches_dense():
    system = _system()
    assert system.shape == (3, 3)
    assert system.rank() == 2
    assert dense_rank(to_dense(system)) == 2


def test_solve_consistent():
    system = _system()
    rhs = {"x": Fraction(2), "y": Fraction(5), "z": Fraction(1, 2)}
    x = system.solve(rhs)
    image = {}
    for (i, j), value in system.entries.items():
        key = system.rows[i]
        image[key] = image.get(key, 0) + value * x.get(system.columns[j], 0)
    assert all(image.get(k, 0) == v for k, v in rhs.items())


def test_solve_inconsistent_reports_residual():
    system = _system()
    with pytest.raises(ObstructionError) as info:
        system.solve({"x": Fraction(1), "y": Fraction(0), "z": Fraction(7)})
    assert info.value.payload


def test_unknown_row_is_inconsistent():
    with pytest.raises(ObstructionError):
        _system().solve({"w": Fraction(1)})


def test_kernel_basis():
    system = _system()
    kernel = system.kernel_basis()
    assert len(kernel) == 1
    vec = kernel[0]
    assert vec["c"] == 1
    assert vec["a"] == -1 and vec["b"] == -1


def test_empty_system():
    assert SparseSystem().rank() == 0
    assert dense_rank([]) == 0


def test_matrix_market_header():
    text = _system().to_matrix_market()
    lines = text.splitlines()
    assert lines[0] == "%%MatrixMarket matrix coordinate rational general"
    assert lines[2] == "3 3 7"
    assert "1/2" in text

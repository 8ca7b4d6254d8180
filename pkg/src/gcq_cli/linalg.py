"""
精确稀疏线性代数
整数无分数消元（gcd 约化）求秩、解方程和核空间，另附稠密有理数消元作为独立校验
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .core.errors import ObstructionError
from .utils import get_logger, log_debug

logger = get_logger("linalg")


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _integer_row(entries: Dict[int, Fraction], rhs: Fraction) -> Tuple[Dict[int, int], int]:
    """把有理数行放大成互素的整数行"""
    scale = rhs.denominator
    for value in entries.values():
        scale = _lcm(scale, value.denominator)
    row = {c: int(v * scale) for c, v in entries.items() if v != 0}
    return _reduce_content(row, int(rhs * scale))


def _reduce_content(row: Dict[int, int], rhs: int) -> Tuple[Dict[int, int], int]:
    content = abs(rhs)
    for value in row.values():
        content = gcd(content, value)
        if content == 1:
            return row, rhs
    if content > 1:
        row = {c: v // content for c, v in row.items()}
        rhs //= content
    return row, rhs


@dataclass
class _Pivot:
    column: int
    row: Dict[int, int]
    rhs: int


class _Echelon:
    """增量行阶梯形：按非零元个数从少到多处理方程，主元列取全局出现次数最少者"""

    def __init__(self, n_columns: int):
        self.n_columns = n_columns
        self.pivots: List[_Pivot] = []
        self.pivot_of: Dict[int, int] = {}
        self.inconsistent: List[Tuple[Dict[int, int], int]] = []

    def build(self, rows: List[Tuple[Dict[int, int], int]]) -> None:
        col_count = [0] * self.n_columns
        for row, _ in rows:
            for c in row:
                col_count[c] += 1

        for index, (row, rhs) in enumerate(sorted(rows, key=lambda r: len(r[0]))):
            row, rhs = self._reduce(dict(row), rhs)
            if not row:
                if rhs != 0:
                    self.inconsistent.append((row, rhs))
                continue
            column = min(row, key=lambda c: (col_count[c], c))
            self.pivot_of[column] = len(self.pivots)
            self.pivots.append(_Pivot(column, row, rhs))
            if index and index % 500 == 0:
                log_debug(f"消元进度: {index}/{len(rows)} 行, 主元 {len(self.pivots)}", logger)

    def _reduce(self, row: Dict[int, int], rhs: int) -> Tuple[Dict[int, int], int]:
        # 主元按插入顺序依次消去，后插入的主元行不含先前主元列
        for pivot in self.pivots:
            a = row.get(pivot.column)
            if not a:
                continue
            p = pivot.row[pivot.column]
            g = gcd(p, a)
            mul_row, mul_piv = p // g, a // g
            updated = {c: v * mul_row for c, v in row.items()}
            for c, v in pivot.row.items():
                value = updated.get(c, 0) - mul_piv * v
                if value:
                    updated[c] = value
                else:
                    updated.pop(c, None)
            row, rhs = _reduce_content(updated, rhs * mul_row - pivot.rhs * mul_piv)
        return row, rhs

    def back_substitute(self, free_values: Dict[int, Fraction]) -> Dict[int, Fraction]:
        x: Dict[int, Fraction] = dict(free_values)
        for pivot in reversed(self.pivots):
            acc = Fraction(pivot.rhs)
            for c, v in pivot.row.items():
                if c != pivot.column and c in x:
                    acc -= v * x[c]
            value = acc / pivot.row[pivot.column]
            if value:
                x[pivot.column] = value
            else:
                x.pop(pivot.column, None)
        return {c: v for c, v in x.items() if v}


@dataclass
class SparseSystem:
    """稀疏线性方程组 A x = b，行列由任意可哈希键索引"""

    rows: List[Hashable] = field(default_factory=list)
    columns: List[Hashable] = field(default_factory=list)
    entries: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    @classmethod
    def from_columns(
        cls,
        columns: Sequence[Hashable],
        images: Iterable[Dict[Hashable, Fraction]],
        extra_rows: Sequence[Hashable] = (),
    ) -> "SparseSystem":
        """由每一列的像（行键 -> 系数）构造方程组"""
        system = cls(columns=list(columns))
        row_index: Dict[Hashable, int] = {}
        for j, image in enumerate(images):
            for key, value in image.items():
                if value == 0:
                    continue
                if key not in row_index:
                    row_index[key] = len(system.rows)
                    system.rows.append(key)
                system.entries[(row_index[key], j)] = Fraction(value)
        for key in extra_rows:
            if key not in row_index:
                row_index[key] = len(system.rows)
                system.rows.append(key)
        return system

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.columns)

    def _row_dicts(self) -> List[Dict[int, Fraction]]:
        rows: List[Dict[int, Fraction]] = [dict() for _ in self.rows]
        for (i, j), value in self.entries.items():
            rows[i][j] = value
        return rows

    def _echelon(self, rhs: Optional[Dict[Hashable, Fraction]] = None) -> _Echelon:
        rhs = rhs or {}
        index = {key: i for i, key in enumerate(self.rows)}
        unknown = [key for key, value in rhs.items() if value and key not in index]
        ech = _Echelon(len(self.columns))
        rows = [
            _integer_row(entries, Fraction(rhs.get(self.rows[i], 0)))
            for i, entries in enumerate(self._row_dicts())
        ]
        rows.extend(({}, 1) for _ in unknown)
        ech.build(rows)
        return ech

    def rank(self) -> int:
        """精确秩"""
        if not self.entries:
            return 0
        return len(self._echelon().pivots)

    def solve(self, rhs: Dict[Hashable, Fraction]) -> Dict[Hashable, Fraction]:
        """求一组解，自由变量取 0（主元顺序确定，结果可复现）

        无解时抛出 ObstructionError，payload 为残差 b − A x。
        """
        ech = self._echelon(rhs)
        x = ech.back_substitute({})
        solution = {self.columns[j]: v for j, v in x.items()}
        if ech.inconsistent:
            residual = dict((k, Fraction(v)) for k, v in rhs.items() if v)
            for (i, j), value in self.entries.items():
                if j in x:
                    key = self.rows[i]
                    residual[key] = residual.get(key, Fraction(0)) - value * x[j]
            residual = {k: v for k, v in residual.items() if v}
            raise ObstructionError("方程组不相容：障碍类不是恰当的", residual)
        return solution

    def kernel_basis(self) -> List[Dict[Hashable, Fraction]]:
        """核空间基：每个自由列给出一个向量"""
        ech = self._echelon()
        basis = []
        for j in range(len(self.columns)):
            if j in ech.pivot_of:
                continue
            x = ech.back_substitute({j: Fraction(1)})
            basis.append({self.columns[c]: v for c, v in sorted(x.items())})
        return basis

    def to_matrix_market(self) -> str:
        """Matrix Market 坐标格式，元素写作 p/q"""
        lines = [
            "%%MatrixMarket matrix coordinate rational general",
            f"% rows: {len(self.rows)} target classes; columns: {len(self.columns)} source classes",
            f"{len(self.rows)} {len(self.columns)} {len(self.entries)}",
        ]
        for (i, j), value in sorted(self.entries.items()):
            lines.append(f"{i + 1} {j + 1} {value.numerator}/{value.denominator}")
        return "\n".join(lines) + "\n"


def dense_rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    """稠密有理数高斯消元求秩，作为稀疏消元的独立校验"""
    m = [[Fraction(v) for v in row] for row in matrix]
    if not m:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(n_rows):
            if r != rank and m[r][col] != 0:
                factor = m[r][col] / m[rank][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == n_rows:
            break
    return rank


def to_dense(system: SparseSystem) -> List[List[Fraction]]:
    n_rows, n_cols = system.shape
    dense = [[Fraction(0)] * n_cols for _ in range(n_rows)]
    for (i, j), value in system.entries.items():
        dense[i][j] = value
    return dense

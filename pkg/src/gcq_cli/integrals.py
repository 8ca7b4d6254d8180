"""
数值积分模块
凸起传播子、迭代积分 Λ^{(p)}、次数过滤，以及 C_k(ℝ^d)、上半平面和 ℋ 空间上图权重的蒙特卡洛估计

所有传播子因子都写成角度 1-形式 ρ(φ) dφ，φ = Arg(X + iY)：
- ℝ² 中每条边一个因子 (w_x, w_y)；
- ℝ³ 中每条边两个因子 (w_x, w_z) 与 (w_y, w_z)，即 ν₊ 的拉回；
- 上半平面边取 conj(z_j − z_i)；
- ℋ 空间的内部边取 z′ 与 conj z″ 两个因子，输入/输出腿各一个。
被积函数是 Π ρ(φ) 乘以规范切片坐标下的行列式，定向由构形空间坐标与群作用的生成元确定。
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate
from scipy.stats import qmc

from .core.errors import QuadratureError, SamplingError, StructuralError
from .graphcore import DirectedGraph, SignedGraphClass, has_triangle, is_oriented
from .polyrep import SuperPolynomial
from .props import PropGraph
from .utils import get_logger, log_debug, log_warning

logger = get_logger("integrals")

RADIUS_RANGE = (1e-3, 1e3)
CHUNK_SIZE = 1 << 14
MAX_REJECTION = 0.99
TWO_PI = 2.0 * math.pi

Factor = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
GraphLike = Union[DirectedGraph, SignedGraphClass]


@dataclass(frozen=True)
class BumpPropagator:
    """S¹ 上的凸起密度 ρ(θ) = ḡ(θ)/2π，支撑在 (θ₀, π − θ₀)，∫ρ dθ = 1"""

    theta0: float = math.pi / 6
    sharpness: float = 1.0
    skew: float = 0.0
    symmetric: bool = True

    def __post_init__(self):
        if not 0.0 < self.theta0 < math.pi / 2:
            raise StructuralError(f"θ₀ 必须位于 (0, π/2): {self.theta0}")
        if self.sharpness <= 0:
            raise StructuralError(f"sharpness 必须为正: {self.sharpness}")
        if not -1.0 < self.skew < 1.0:
            raise StructuralError(f"skew 必须位于 (−1, 1): {self.skew}")
        if self.symmetric and self.skew:
            raise StructuralError("对称传播子不能带 skew")

    def _profile(self, u: np.ndarray) -> np.ndarray:
        inside = np.abs(u) < 1.0
        safe = np.where(inside, u, 0.0)
        bump = np.exp(-self.sharpness / (1.0 - safe * safe)) * (1.0 + self.skew * safe)
        return np.where(inside, bump, 0.0)

    def _rescale(self, theta: np.ndarray) -> np.ndarray:
        return (2.0 * theta - math.pi) / (math.pi - 2.0 * self.theta0)

    @cached_property
    def normalization(self) -> float:
        value, error = integrate.quad(
            lambda t: float(self._profile(np.asarray(self._rescale(t)))),
            self.theta0,
            math.pi - self.theta0,
            epsabs=1e-14,
            epsrel=1e-13,
            limit=200,
        )
        if not value > 0:
            raise QuadratureError("凸起函数积分为零", error)
        return 1.0 / value

    def density(self, theta) -> np.ndarray:
        """ρ(θ)，θ 按 2π 取模"""
        theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        return self.normalization * self._profile(self._rescale(theta))

    def gbar(self, theta) -> np.ndarray:
        """ḡ(θ) = 2π ρ(θ)"""
        return TWO_PI * self.density(theta)

    @property
    def support(self) -> Tuple[float, float]:
        return self.theta0, math.pi - self.theta0


def lambda_p(prop: BumpPropagator, p: int) -> float:
    """迭代积分 ∫_{0<θ₁<…<θ_p<π} Π ρ(θ_i) dθ_i"""
    if p < 1:
        raise StructuralError(f"需要 p ≥ 1: {p}")
    lo, hi = prop.support
    if p == 1:
        value, error = integrate.quad(
            lambda t: float(prop.density(t)), lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200
        )
        if error > 1e-10:
            raise QuadratureError(f"Λ^(1) 未收敛，误差 {error:.2e}", error)
        return value

    # y_j(θ) 是前 j+1 重迭代积分，y_j′ = ρ(θ)·y_{j−1}
    def rhs(theta, y):
        rho = float(prop.density(theta))
        return rho * np.concatenate(([1.0], y[:-1]))

    solution = integrate.solve_ivp(
        rhs, (lo, hi), np.zeros(p), method="DOP853", rtol=1e-12, atol=1e-15
    )
    if not solution.success:
        raise QuadratureError(f"Λ^({p}) 迭代积分失败: {solution.message}", None)
    return float(solution.y[-1, -1])


def sphere_density(d: int, prop: BumpPropagator) -> Callable[[np.ndarray], np.ndarray]:
    """传播子关于 S^{d−1} 面积元的密度；d = 3 时为 ν₊ 拉回 ρ(θ₁)ρ(θ₂)dθ₁∧dθ₂"""
    if d == 2:
        return lambda p: prop.density(np.arctan2(p[..., 1], p[..., 0]))
    if d == 3:

        def density(p: np.ndarray) -> np.ndarray:
            x, y, z = p[..., 0], p[..., 1], p[..., 2]
            rho = prop.density(np.arctan2(z, x)) * prop.density(np.arctan2(z, y))
            with np.errstate(divide="ignore", invalid="ignore"):
                jac = z / ((x * x + z * z) * (y * y + z * z))
            return np.where(z > 0, rho * np.nan_to_num(jac), 0.0)

        return density
    raise StructuralError(f"只支持 d ∈ {{2, 3}}: {d}")


def reflect(points: np.ndarray) -> np.ndarray:
    """σ：前 d−1 个坐标取反"""
    out = np.array(points, dtype=float, copy=True)
    out[..., :-1] *= -1.0
    return out


def reflected_density(prop: BumpPropagator, d: int, points: np.ndarray) -> np.ndarray:
    """σ*ω 的密度：ρ(σp) 乘 σ 在 S^{d−1} 上的度 (−1)^{d−1}"""
    return (-1.0) ** (d - 1) * sphere_density(d, prop)(reflect(points))


def sphere_propagator_integral(
    prop: BumpPropagator,
    d: int,
    samples: int = 1 << 20,
    seed: int = 0,
    tolerance: Optional[float] = None,
) -> float:
    """∫_{S^{d−1}} ω；d = 2 用自适应求积，d = 3 用随机化 Sobol 序列"""
    if d == 2:
        tolerance = 1e-8 if tolerance is None else tolerance
        lo, hi = prop.support
        value, error = integrate.quad(
            lambda t: float(prop.density(t)), lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200
        )
        if error > tolerance:
            raise QuadratureError(f"求积误差 {error:.2e} 超过 {tolerance:.0e}", error)
        return value
    if d != 3:
        raise StructuralError(f"只支持 d ∈ {{2, 3}}: {d}")

    tolerance = 1e-4 if tolerance is None else tolerance
    replicas = 8
    power = max(4, int(math.log2(max(samples // replicas, 16))))
    density = sphere_density(3, prop)
    estimates = []
    for seq in np.random.SeedSequence(seed).spawn(replicas):
        sobol = qmc.Sobol(d=2, scramble=True, seed=np.random.default_rng(seq))
        u = sobol.random_base2(power)
        # 上半球面积测度：z 在 (0, 1) 上均匀
        z = u[:, 0]
        phi = TWO_PI * u[:, 1]
        rad = np.sqrt(1.0 - z * z)
        points = np.stack([rad * np.cos(phi), rad * np.sin(phi), z], axis=-1)
        estimates.append(TWO_PI * float(np.mean(density(points))))
    value = float(np.mean(estimates))
    error = float(np.std(estimates, ddof=1) / math.sqrt(replicas))
    log_debug(f"S² 积分 {value:.8f} ± {error:.1e}（{replicas} × 2^{power} 点）", logger)
    if error > tolerance:
        raise QuadratureError(f"QMC 误差 {error:.2e} 超过 {tolerance:.0e}", error)
    return value


def degree_filter(g: GraphLike, d: int) -> bool:
    """Ω_Γ 在 C_k(ℝ^d) 上是顶次形式：k = (d−1)l + 2 且 #E = dl + 1"""
    graph = g.graph if isinstance(g, SignedGraphClass) else g
    k, edges = graph.vertex_count, graph.edge_count
    if d < 2 or k < 2 or (k - 2) % (d - 1):
        return False
    l = (k - 2) // (d - 1)
    return edges == d * l + 1


# ---------------------------------------------------------------------------
# 权重估计
# ---------------------------------------------------------------------------


@dataclass
class WeightEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int
    graph: str
    d: Optional[int] = None
    space: str = "rd"
    exact: bool = False
    reason: str = ""
    rejected: int = 0

    def consistent_with(self, value: float, sigmas: float = 3.0) -> bool:
        return abs(self.mean - value) <= sigmas * self.stderr + 1e-12

    @classmethod
    def zero(cls, graph: str, reason: str, seed: int, d: Optional[int] = None, space: str = "rd"):
        return cls(0.0, 0.0, 0, seed, graph, d, space, exact=True, reason=reason)


def _log_uniform(rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
    low, high = RADIUS_RANGE
    span = math.log(high / low)
    r = low * np.exp(rng.random(size) * span)
    return r, -np.log(r) - math.log(span)


def _signed_log_uniform(rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
    r, logp = _log_uniform(rng, size)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return sign * r, logp - math.log(2.0)


def _sorted_points(rng: np.random.Generator, size: int, count: int, draw) -> Tuple[np.ndarray, np.ndarray]:
    """count 个独立样本排序后的联合密度多出 count! 因子"""
    if count == 0:
        return np.zeros((size, 0)), np.zeros(size)
    values, logps = zip(*(draw(rng, size) for _ in range(count)))
    stacked = np.sort(np.stack(values, axis=1), axis=1)
    return stacked, np.sum(logps, axis=0) + math.lgamma(count + 1)


class _Slice:
    """规范切片：抽样、角度因子和定向"""

    dimension: int

    def draw(self, rng: np.random.Generator, size: int) -> Tuple[Dict[str, np.ndarray], np.ndarray]:
        raise NotImplementedError

    def factors(self, state: Dict[str, np.ndarray]) -> List[Factor]:
        raise NotImplementedError

    def frame(self, state: Dict[str, np.ndarray]) -> np.ndarray:
        """第 0 个样本处 [群生成元 | 切片坐标] 在构形空间坐标下的矩阵"""
        raise NotImplementedError

    def orientation(self, seed: int) -> int:
        state, _ = self.draw(np.random.default_rng(seed), 1)
        sign = int(np.sign(np.linalg.det(self.frame(state))))
        if sign == 0:
            raise SamplingError("定向参考点退化")
        return sign


class _EuclideanSlice(_Slice):
    """C_k(ℝ^d)：anchor[0] 固定在原点，anchor[1] 在单位球面上"""

    def __init__(self, k: int, d: int, anchor: Tuple[int, int] = (0, 1)):
        if d not in (2, 3):
            raise StructuralError(f"只支持 d ∈ {{2, 3}}: {d}")
        a, b = anchor
        if a == b or not (0 <= a < k and 0 <= b < k):
            raise StructuralError(f"非法规范顶点 {anchor}")
        self.k, self.d, self.anchor = k, d, (a, b)
        self.free = [v for v in range(k) if v not in (a, b)]
        self.dimension = (d - 1) + d * len(self.free)
        self.edges: Sequence[Tuple[int, int]] = ()

    def draw(self, rng, size):
        k, d, D = self.k, self.d, self.dimension
        _, b = self.anchor
        P = np.zeros((size, k, d))
        J = np.zeros((size, k, d, D))
        logp = np.zeros(size)
        alpha = rng.random(size) * TWO_PI
        if d == 2:
            P[:, b] = np.stack([np.cos(alpha), np.sin(alpha)], axis=-1)
            J[:, b, :, 0] = np.stack([-np.sin(alpha), np.cos(alpha)], axis=-1)
            logp -= math.log(TWO_PI)
        else:
            cb = rng.uniform(-1.0, 1.0, size)
            sb = np.sqrt(1.0 - cb * cb)
            P[:, b] = np.stack([sb * np.cos(alpha), sb * np.sin(alpha), cb], axis=-1)
            J[:, b, :, 0] = np.stack([cb * np.cos(alpha), cb * np.sin(alpha), -sb], axis=-1)
            J[:, b, :, 1] = np.stack([-sb * np.sin(alpha), sb * np.cos(alpha), np.zeros(size)], axis=-1)
            logp += np.log(sb) - math.log(4.0 * math.pi)
        area = TWO_PI if d == 2 else 4.0 * math.pi
        column = d - 1
        for v in self.free:
            r, logr = _log_uniform(rng, size)
            direction = rng.normal(size=(size, d))
            direction /= np.linalg.norm(direction, axis=1, keepdims=True)
            P[:, v] = r[:, None] * direction
            J[:, v, :, column : column + d] = np.eye(d)
            logp += logr - math.log(area) - (d - 1) * np.log(r)
            column += d
        return {"P": P, "J": J}, logp

    def factors(self, state):
        P, J = state["P"], state["J"]
        result: List[Factor] = []
        for i, j in self.edges:
            w = P[:, j] - P[:, i]
            dw = J[:, j] - J[:, i]
            if self.d == 2:
                result.append((w[:, 0], w[:, 1], dw[:, 0], dw[:, 1]))
            else:
                result.append((w[:, 0], w[:, 2], dw[:, 0], dw[:, 2]))
                result.append((w[:, 1], w[:, 2], dw[:, 1], dw[:, 2]))
        return result

    def frame(self, state):
        k, d = self.k, self.d
        P, J = state["P"][0], state["J"][0]
        columns = []
        for axis in range(d):
            t = np.zeros((k, d))
            t[:, axis] = 1.0
            columns.append(t.reshape(-1))
        columns.append(P.reshape(-1))
        group = np.stack(columns, axis=1)
        return np.concatenate([group, J.reshape(k * d, -1)], axis=1)


class _HalfPlaneSlice(_Slice):
    """C_{k,m}(H)：边界点 0 ↦ 0、1 ↦ 1；m = 1 时第一个空中点在单位半圆上；m = 0 时固定在 i"""

    def __init__(self, aerial: int, boundary: int):
        self.k, self.m = aerial, boundary
        if boundary >= 2:
            self.dimension = 2 * aerial + boundary - 2
        elif boundary == 1:
            self.dimension = 1 + 2 * (aerial - 1)
        else:
            self.dimension = 2 * (aerial - 1)
        self.edges: Sequence[Tuple[int, int]] = ()

    def draw(self, rng, size):
        k, m, D = self.k, self.m, self.dimension
        P = np.zeros((size, k + m, 2))
        J = np.zeros((size, k + m, 2, D))
        logp = np.zeros(size)
        column = 0
        free_aerial = list(range(k))
        if m >= 2:
            P[:, k + 1, 0] = 1.0
        elif m == 1:
            alpha = rng.random(size) * math.pi
            P[:, 0] = np.stack([np.cos(alpha), np.sin(alpha)], axis=-1)
            J[:, 0, :, 0] = np.stack([-np.sin(alpha), np.cos(alpha)], axis=-1)
            logp -= math.log(math.pi)
            column, free_aerial = 1, free_aerial[1:]
        else:
            P[:, 0, 1] = 1.0
            free_aerial = free_aerial[1:]
        for v in free_aerial:
            r, logr = _log_uniform(rng, size)
            alpha = rng.random(size) * math.pi
            P[:, v] = r[:, None] * np.stack([np.cos(alpha), np.sin(alpha)], axis=-1)
            J[:, v, :, column : column + 2] = np.eye(2)
            logp += logr - math.log(math.pi) - np.log(r)
            column += 2
        if m > 2:
            offsets, logo = _sorted_points(rng, size, m - 2, _log_uniform)
            for i in range(m - 2):
                P[:, k + 2 + i, 0] = 1.0 + offsets[:, i]
                J[:, k + 2 + i, 0, column] = 1.0
                column += 1
            logp += logo
        return {"P": P, "J": J}, logp

    def factors(self, state):
        P, J = state["P"], state["J"]
        result: List[Factor] = []
        for i, j in self.edges:
            w = P[:, j] - P[:, i]
            dw = J[:, j] - J[:, i]
            result.append((w[:, 0], -w[:, 1], dw[:, 0], -dw[:, 1]))
        return result

    def frame(self, state):
        k, m = self.k, self.m
        P, J = state["P"][0], state["J"][0]
        rows = [(v, 0) for v in range(k)] + [(v, 1) for v in range(k)]
        rows = sorted(rows) + [(k + i, 0) for i in range(m)]
        translate = np.array([1.0 if axis == 0 else 0.0 for _, axis in rows])
        dilate = np.array([P[v, axis] for v, axis in rows])
        slice_part = np.stack([J[v, axis] for v, axis in rows], axis=0)
        return np.concatenate([translate[:, None], dilate[:, None], slice_part.reshape(len(rows), -1)], axis=1)


class _HSlice(_Slice):
    """C_{k;m,n}(ℋ)：第 0 个黑顶点固定在 (x, y, t) = (0, 0, 1)"""

    def __init__(self, g: PropGraph):
        self.g = g
        self.k = g.black
        self.in_legs = sorted(range(len(g.e_in)), key=lambda e: g.e_in[e][0])
        self.out_legs = sorted(range(len(g.e_out)), key=lambda e: g.e_out[e][1])
        self.dimension = 3 * (self.k - 1) + len(g.e_in) + len(g.e_out)

    def draw(self, rng, size):
        k, D = self.k, self.dimension
        B = np.zeros((size, k, 3))
        JB = np.zeros((size, k, 3, D))
        B[:, 0, 2] = 1.0
        logp = np.zeros(size)
        column = 0
        for v in range(1, k):
            x, lx = _signed_log_uniform(rng, size)
            y, ly = _signed_log_uniform(rng, size)
            t, lt = _log_uniform(rng, size)
            B[:, v] = np.stack([x, y, t], axis=-1)
            JB[:, v, :, column : column + 3] = np.eye(3)
            logp += lx + ly + lt
            column += 3
        xin, lin = _sorted_points(rng, size, len(self.in_legs), _signed_log_uniform)
        yout, lout = _sorted_points(rng, size, len(self.out_legs), _signed_log_uniform)
        logp += lin + lout
        Jin = np.zeros((size, xin.shape[1], D))
        for i in range(xin.shape[1]):
            Jin[:, i, column] = 1.0
            column += 1
        Jout = np.zeros((size, yout.shape[1], D))
        for i in range(yout.shape[1]):
            Jout[:, i, column] = 1.0
            column += 1
        return {"B": B, "JB": JB, "xin": xin, "Jin": Jin, "yout": yout, "Jout": Jout}, logp

    def factors(self, state):
        g = self.g
        B, JB = state["B"], state["JB"]
        in_slot = {e: i for i, e in enumerate(self.in_legs)}
        out_slot = {e: i for i, e in enumerate(self.out_legs)}
        x, y, t = B[..., 0], B[..., 1], B[..., 2]
        dx, dy, dt = JB[:, :, 0], JB[:, :, 1], JB[:, :, 2]
        result: List[Factor] = []
        for e, (_, v) in enumerate(g.e_in):
            i = in_slot[e]
            result.append((x[:, v] - state["xin"][:, i], t[:, v], dx[:, v] - state["Jin"][:, i], dt[:, v]))
        for a, b in g.e_int:
            result.append((x[:, b] - x[:, a], t[:, b] - t[:, a], dx[:, b] - dx[:, a], dt[:, b] - dt[:, a]))
            inv_a, inv_b = 1.0 / t[:, a], 1.0 / t[:, b]
            d_inv_a = -dt[:, a] * (inv_a**2)[:, None]
            d_inv_b = -dt[:, b] * (inv_b**2)[:, None]
            result.append((y[:, b] - y[:, a], inv_a - inv_b, dy[:, b] - dy[:, a], d_inv_a - d_inv_b))
        for e, (v, _) in enumerate(g.e_out):
            i = out_slot[e]
            inv = 1.0 / t[:, v]
            result.append(
                (
                    state["yout"][:, i] - y[:, v],
                    inv,
                    state["Jout"][:, i] - dy[:, v],
                    -dt[:, v] * (inv**2)[:, None],
                )
            )
        return result

    def frame(self, state):
        k = self.k
        B, JB = state["B"][0], state["JB"][0]
        xin, Jin = state["xin"][0], state["Jin"][0]
        yout, Jout = state["yout"][0], state["Jout"][0]
        rows, a, b, lam = [], [], [], []
        for v in range(k):
            for axis, (ca, cb, scale) in enumerate(((1, 0, 1), (0, 1, -1), (0, 0, 1))):
                rows.append(JB[v, axis])
                a.append(ca)
                b.append(cb)
                lam.append(scale * B[v, axis])
        for i in range(len(xin)):
            rows.append(Jin[i])
            a.append(1)
            b.append(0)
            lam.append(xin[i])
        for i in range(len(yout)):
            rows.append(Jout[i])
            a.append(0)
            b.append(1)
            lam.append(-yout[i])
        group = np.array([a, b, lam], dtype=float).T
        return np.concatenate([group, np.array(rows).reshape(len(rows), -1)], axis=1)


def _evaluate(prop: BumpPropagator, factors: List[Factor], dimension: int, size: int):
    """Π ρ(φ) · det[dφ]；返回 (值, 退化掩码)"""
    values = np.zeros(size)
    bad = np.zeros(size, dtype=bool)
    if len(factors) != dimension:
        return values, bad
    density = np.ones(size)
    rows = []
    with np.errstate(divide="ignore", invalid="ignore"):
        for X, Y, dX, dY in factors:
            r2 = X * X + Y * Y
            bad |= ~(r2 > 1e-24)
            density = density * prop.density(np.arctan2(Y, X))
            rows.append((X[:, None] * dY - Y[:, None] * dX) / r2[:, None])
    live = (density > 0) & ~bad
    if dimension == 0:
        values[live] = density[live]
    elif live.any():
        matrix = np.stack(rows, axis=1)[live]
        values[live] = density[live] * np.linalg.det(matrix)
    bad &= density > 0
    return values, bad


def _estimate(
    slice_: _Slice,
    prop: BumpPropagator,
    samples: int,
    seed: int,
    workers: int,
) -> Tuple[float, float, int]:
    if samples < 2:
        raise SamplingError(f"样本数至少为 2: {samples}")
    sign = slice_.orientation(seed)
    chunks = math.ceil(samples / CHUNK_SIZE)
    streams = np.random.SeedSequence(seed).spawn(chunks)

    def run(index: int) -> Tuple[float, float, int]:
        size = min(CHUNK_SIZE, samples - index * CHUNK_SIZE)
        rng = np.random.default_rng(streams[index])
        state, logp = slice_.draw(rng, size)
        values, bad = _evaluate(prop, slice_.factors(state), slice_.dimension, size)
        weights = np.zeros(size)
        nonzero = (values != 0) & ~bad
        weights[nonzero] = values[nonzero] * np.exp(-logp[nonzero])
        return float(weights.sum()), float((weights * weights).sum()), int(bad.sum())

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        parts = list(pool.map(run, range(chunks)))

    total = math.fsum(p[0] for p in parts)
    squares = math.fsum(p[1] for p in parts)
    rejected = sum(p[2] for p in parts)
    if rejected > MAX_REJECTION * samples:
        raise SamplingError(f"退化样本比例 {rejected / samples:.1%} 超过 99%", rejected)
    mean = total / samples
    variance = max(squares / samples - mean * mean, 0.0) * samples / (samples - 1)
    log_debug(f"{chunks} 个分块, 退化样本 {rejected}, 均值 {sign * mean:.6g}", logger)
    return sign * mean, math.sqrt(variance / samples), rejected


def _ordered_encoding(g: DirectedGraph, d: int) -> str:
    return f"d{d};k{g.vertex_count};E:" + ",".join(f"{t}>{h}" for t, h in g.edges)


def mc_weight_rd(
    g: GraphLike,
    d: int,
    prop: BumpPropagator,
    samples: int,
    seed: int,
    workers: int = 1,
    anchor: Tuple[int, int] = (0, 1),
) -> WeightEstimate:
    """C_Γ = ∫_{C_k(ℝ^d)} ∧_e π_e^*(ω)，结构性为零的图不采样"""
    sign = 1
    if isinstance(g, SignedGraphClass):
        sign, graph = g.sign, g.graph
    else:
        graph = g
    label = _ordered_encoding(graph, d)

    if sign == 0:
        return WeightEstimate.zero(label, "零类", seed, d)
    if not degree_filter(graph, d):
        return WeightEstimate.zero(label, "次数不匹配", seed, d)
    if min(graph.valences()) < 2:
        return WeightEstimate.zero(label, "一价顶点", seed, d)
    if not is_oriented(graph):
        return WeightEstimate.zero(label, "有向圈", seed, d)
    if d == 3 and has_triangle(graph):
        return WeightEstimate.zero(label, "含三角形", seed, d)

    slice_ = _EuclideanSlice(graph.vertex_count, d, anchor)
    slice_.edges = graph.edges
    mean, stderr, rejected = _estimate(slice_, prop, samples, seed, workers)
    return WeightEstimate(sign * mean, stderr, samples, seed, label, d, "rd", rejected=rejected)


@dataclass(frozen=True)
class HalfPlaneGraph:
    """aerial 个空中顶点（0 … k−1）与 boundary 个边界顶点（k … k+m−1，按实轴顺序）"""

    aerial: int
    boundary: int
    edges: Tuple[Tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        total = self.aerial + self.boundary
        if self.aerial < 1:
            raise StructuralError("至少需要一个空中顶点")
        for a, b in self.edges:
            if not (0 <= a < total and 0 <= b < total) or a == b:
                raise StructuralError(f"非法边 {a}>{b}")
            if a >= self.aerial:
                raise StructuralError(f"边界顶点 {a} 不能有出边")

    @property
    def form_degree_matches(self) -> bool:
        return len(self.edges) == 2 * self.aerial + self.boundary - 2

    def encode(self) -> str:
        return f"H{self.aerial},{self.boundary};E:" + ",".join(f"{a}>{b}" for a, b in self.edges)


def decode_halfplane(text: str) -> HalfPlaneGraph:
    """解析 "H1,2;E:0>1,0>2"，边的顺序保持不变"""
    try:
        head, body = text.strip().split(";", 1)
        aerial, boundary = (int(part) for part in head[1:].split(","))
        items = body.split(":", 1)[1]
        edges = tuple(tuple(map(int, item.split(">"))) for item in items.split(",") if item)
    except (ValueError, IndexError) as e:
        raise StructuralError(f"无法解析半平面图编码 {text!r}: {e}") from e
    return HalfPlaneGraph(aerial, boundary, edges)


def wedge_graph(mirror: bool = False) -> HalfPlaneGraph:
    """一个空中顶点连向两个边界点；mirror 时腿的顺序为 (2, 1)"""
    edges = ((0, 2), (0, 1)) if mirror else ((0, 1), (0, 2))
    return HalfPlaneGraph(1, 2, edges)


def mc_weight_halfplane(
    g: HalfPlaneGraph,
    prop: BumpPropagator,
    samples: int,
    seed: int,
    workers: int = 1,
) -> WeightEstimate:
    """∫_{C_{k,m}(H)} ∧_e ω(z_i, z_j)，ω = ρ(Arg conj(z_j − z_i)) dArg conj(z_j − z_i)"""
    label = g.encode()
    if not g.form_degree_matches:
        return WeightEstimate.zero(label, "形式次数不等于维数", seed, space="halfplane")
    if 2 * g.aerial + g.boundary < 2:
        raise StructuralError("需要 2k + m ≥ 2")
    slice_ = _HalfPlaneSlice(g.aerial, g.boundary)
    slice_.edges = g.edges
    mean, stderr, rejected = _estimate(slice_, prop, samples, seed, workers)
    return WeightEstimate(mean, stderr, samples, seed, label, 2, "halfplane", rejected=rejected)


def h_top_degree(g: PropGraph) -> bool:
    """Ω_Γ 的次数 #E_in + 2#E_int + #E_out 等于 dim C_{k;m,n}(ℋ) = 3k + #E_in + #E_out − 3"""
    return len(g.e_in) + 2 * len(g.e_int) + len(g.e_out) == 3 * g.black + len(g.e_in) + len(g.e_out) - 3


def mc_weight_H(
    g: PropGraph,
    prop: BumpPropagator,
    samples: int,
    seed: int,
    workers: int = 1,
) -> WeightEstimate:
    """∫ ∧ω′_e ∧ ∧Ω_e ∧ ∧ω″_e，每条腿对应 X 或 Y 线上的一个边界点"""
    label = g.encode()
    if g.black < 1:
        raise StructuralError("ℋ 空间权重需要至少一个黑顶点")
    whites_in = [j for j, _ in g.e_in]
    whites_out = [i for _, i in g.e_out]
    if len(set(whites_in)) != len(whites_in) or len(set(whites_out)) != len(whites_out):
        raise StructuralError("每个白顶点至多一条腿")
    if len(g.e_in) == 1 and len(g.e_out) == 1:
        return WeightEstimate.zero(label, "G_{k;1,1} 计数不相容", seed, 3, "H")
    if not h_top_degree(g):
        return WeightEstimate.zero(label, "非顶次形式", seed, 3, "H")
    slice_ = _HSlice(g)
    mean, stderr, rejected = _estimate(slice_, prop, samples, seed, workers)
    return WeightEstimate(mean, stderr, samples, seed, label, 3, "H", rejected=rejected)


def poisson_bracket(pi: SuperPolynomial, f: SuperPolynomial, g: SuperPolynomial) -> SuperPolynomial:
    """楔形图算子 Σ_{a,b} (∂ψ_b ∂ψ_a π)(∂x_a f)(∂x_b g)"""
    spec = pi.spec
    result = SuperPolynomial(spec)
    for a in range(spec.n):
        dfa = f.derivative(spec.x(a))
        if dfa.is_zero:
            continue
        for b in range(spec.n):
            coefficient = pi.derivative(spec.psi(a)).derivative(spec.psi(b))
            if coefficient.is_zero:
                continue
            result = result + coefficient * dfa * g.derivative(spec.x(b))
    return result


def star_order1(
    pi: SuperPolynomial,
    prop: BumpPropagator,
    f: SuperPolynomial,
    g: SuperPolynomial,
    samples: int,
    seed: int,
    workers: int = 1,
) -> SuperPolynomial:
    """B₁(f, g) − B₁(g, f)，B₁ 由楔形图及其镜像的权重组装"""
    bracket = poisson_bracket(pi, f, g)
    if bracket.is_zero:
        return bracket
    wedge = mc_weight_halfplane(wedge_graph(), prop, samples, seed, workers)
    mirror = mc_weight_halfplane(wedge_graph(mirror=True), prop, samples, seed + 1, workers)
    combined = wedge.mean - mirror.mean
    error = math.hypot(wedge.stderr, mirror.stderr)
    if error > 0.05 * abs(combined):
        log_warning(f"楔形权重相对误差偏大: {combined:.4f} ± {error:.4f}", logger)
    # B₁(f, g) = ½(W − W_mirror)·Φ_wedge(π; f, g)，反对称化后系数为 W − W_mirror
    return bracket * Fraction(combined).limit_denominator(10**9)


def weights_table_csv(rows: Sequence[WeightEstimate]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["graph", "d", "mean", "stderr", "samples", "seed"])
    for row in rows:
        writer.writerow(
            [row.graph, "" if row.d is None else row.d, repr(row.mean), repr(row.stderr), row.samples, row.seed]
        )
    return buffer.getvalue()

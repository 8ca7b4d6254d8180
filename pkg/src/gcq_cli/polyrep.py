"""
多项式表示模块
分次超交换多项式代数 A_d^(n)、Schouten 括号、图到多重微分算子的表示 Φ_Γ、
由加权图给出的 L∞ 括号，以及 Poisson / Lie 双代数结构的 Maurer-Cartan 检查

约定：生成元按 x₁ < ψ₁ < x₂ < ψ₂ < … 排序，ħ（偶，次数 0，中心元）排在最后；
奇生成元的左导数符号为单项式中排在它前面的奇生成元个数的奇偶。
"""

import itertools
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .core.errors import FlavorMismatchError, MissingArityError, StructuralError
from .graphcore import DirectedGraph, GraphVector, SignedGraphClass, canonicalize, relabel
from .utils import get_logger, log_debug, log_warning

logger = get_logger("polyrep")

Monomial = Tuple[int, ...]


@dataclass(frozen=True)
class GeneratorSpec:
    """生成元规格：维数 d、变量个数 n、各生成元次数和截断阶"""

    d: int
    n: int
    degrees: Tuple[Tuple[int, int], ...] = ()
    truncation: int = 6
    hbar_order: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise StructuralError(f"变量个数必须为正: {self.n}")
        if not self.degrees:
            object.__setattr__(self, "degrees", tuple((0, self.d - 1) for _ in range(self.n)))
        object.__setattr__(self, "degrees", tuple(tuple(p) for p in self.degrees))
        if len(self.degrees) != self.n:
            raise StructuralError(f"需要 {self.n} 组次数，实际 {len(self.degrees)}")
        for i, (dx, dpsi) in enumerate(self.degrees):
            if dx + dpsi != self.d - 1:
                raise StructuralError(f"|x{i + 1}| + |psi{i + 1}| = {dx + dpsi} ≠ d − 1 = {self.d - 1}")
        if self.truncation < 1:
            raise StructuralError(f"截断阶必须 ≥ 1: {self.truncation}")
        if self.hbar_order < 0:
            raise StructuralError(f"ħ 截断阶不能为负: {self.hbar_order}")

    @property
    def generator_count(self) -> int:
        return 2 * self.n + (1 if self.hbar_order else 0)

    @property
    def hbar_index(self) -> Optional[int]:
        return 2 * self.n if self.hbar_order else None

    def x(self, i: int) -> int:
        return 2 * i

    def psi(self, i: int) -> int:
        return 2 * i + 1

    def generator_degree(self, g: int) -> int:
        if g == self.hbar_index:
            return 0
        dx, dpsi = self.degrees[g // 2]
        return dx if g % 2 == 0 else dpsi

    def is_odd(self, g: int) -> bool:
        return self.generator_degree(g) % 2 == 1

    def name(self, g: int) -> str:
        if g == self.hbar_index:
            return "hbar"
        return f"{'x' if g % 2 == 0 else 'psi'}{g // 2 + 1}"

    def index_of(self, name: str) -> int:
        if name == "hbar":
            if self.hbar_index is None:
                raise StructuralError("当前规格未启用 ħ")
            return self.hbar_index
        match = re.fullmatch(r"(x|psi)(\d+)", name)
        if not match or not 1 <= int(match.group(2)) <= self.n:
            raise StructuralError(f"未知生成元: {name}")
        i = int(match.group(2)) - 1
        return self.x(i) if match.group(1) == "x" else self.psi(i)

    def monomial_degree(self, mono: Monomial) -> int:
        return sum(e * self.generator_degree(g) for g, e in enumerate(mono) if e)

    def polynomial_degree(self, mono: Monomial) -> int:
        """多项式次数（不计 ħ）"""
        return sum(e for g, e in enumerate(mono) if e and g != self.hbar_index)

    def fits(self, mono: Monomial) -> bool:
        if self.polynomial_degree(mono) > self.truncation:
            return False
        h = self.hbar_index
        return h is None or mono[h] <= self.hbar_order

    def one(self) -> Monomial:
        return (0,) * self.generator_count


def _odd_before(spec: GeneratorSpec, mono: Monomial, g: int) -> int:
    return sum(e for h, e in enumerate(mono[:g]) if e and spec.is_odd(h))


def _multiply_monomials(spec: GeneratorSpec, a: Monomial, b: Monomial) -> Tuple[int, Optional[Monomial]]:
    """按生成元顺序排好的单项式之积：返回 (符号, 单项式)，奇生成元重复时为 (0, None)"""
    sign = 1
    odd_in_b = [h for h, e in enumerate(b) if e and spec.is_odd(h)]
    for g, e in enumerate(a):
        if not e or not spec.is_odd(g):
            continue
        if b[g]:
            return 0, None
        if sum(1 for h in odd_in_b if h < g) % 2:
            sign = -sign
    return sign, tuple(x + y for x, y in zip(a, b))


class SuperPolynomial:
    """A_d^(n) 中截断到给定次数的元素"""

    __slots__ = ("spec", "_terms")

    def __init__(self, spec: GeneratorSpec, terms: Optional[Dict[Monomial, Fraction]] = None):
        self.spec = spec
        self._terms: Dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            self._add(tuple(mono), Fraction(c))

    def _add(self, mono: Monomial, coeff: Fraction) -> None:
        if not coeff or not self.spec.fits(mono):
            return
        if any(e > 1 for g, e in enumerate(mono) if self.spec.is_odd(g)):
            return
        value = self._terms.get(mono, Fraction(0)) + coeff
        if value:
            self._terms[mono] = value
        else:
            self._terms.pop(mono, None)

    # -- 构造 ------------------------------------------------------------
    @classmethod
    def constant(cls, spec: GeneratorSpec, value=1) -> "SuperPolynomial":
        return cls(spec, {spec.one(): Fraction(value)})

    @classmethod
    def generator(cls, spec: GeneratorSpec, name: str) -> "SuperPolynomial":
        mono = list(spec.one())
        mono[spec.index_of(name)] = 1
        return cls(spec, {tuple(mono): Fraction(1)})

    @classmethod
    def parse(cls, spec: GeneratorSpec, text: str) -> "SuperPolynomial":
        """解析 "2 * x1^2 psi1 - 1/3 * psi1 psi2 + hbar * x1" 形式的文本，因子按书写顺序相乘"""
        body = text.replace(" ", "")
        if not body or body == "0":
            return cls(spec)
        result = cls(spec)
        for sign, term in re.findall(r"([+-]?)([^+-]+)", body):
            factors = [f for f in term.split("*") if f]
            coeff = Fraction(-1 if sign == "-" else 1)
            value = cls.constant(spec)
            for factor in factors:
                if re.fullmatch(r"\d+(/\d+)?", factor):
                    coeff *= Fraction(factor)
                    continue
                if not re.fullmatch(r"((x\d+|psi\d+|hbar)(\^\d+)?)+", factor):
                    raise StructuralError(f"无法解析因子 {factor!r}")
                for name, exp in re.findall(r"(x\d+|psi\d+|hbar)(?:\^(\d+))?", factor):
                    for _ in range(int(exp or 1)):
                        value = value * cls.generator(spec, name)
            result = result + value * coeff
        return result

    # -- 访问 ------------------------------------------------------------
    def items(self) -> List[Tuple[Monomial, Fraction]]:
        return sorted(self._terms.items())

    def __iter__(self):
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def homogeneous_degree(self) -> Optional[int]:
        degrees = {self.spec.monomial_degree(m) for m in self._terms}
        return degrees.pop() if len(degrees) == 1 else None

    def truncate(self, truncation: int) -> "SuperPolynomial":
        spec = GeneratorSpec(self.spec.d, self.spec.n, self.spec.degrees, truncation, self.spec.hbar_order)
        return SuperPolynomial(spec, self._terms)

    def hbar_coefficient(self, power: int) -> "SuperPolynomial":
        """ħ^power 的系数（ħ 指数置零）"""
        h = self.spec.hbar_index
        if h is None:
            return SuperPolynomial(self.spec, self._terms if power == 0 else {})
        terms = {}
        for mono, c in self._terms.items():
            if mono[h] == power:
                stripped = list(mono)
                stripped[h] = 0
                terms[tuple(stripped)] = c
        return SuperPolynomial(self.spec, terms)

    # -- 代数运算 --------------------------------------------------------
    def _check(self, other: "SuperPolynomial") -> None:
        if self.spec != other.spec:
            raise FlavorMismatchError("生成元规格不一致")

    def __add__(self, other: "SuperPolynomial") -> "SuperPolynomial":
        self._check(other)
        result = SuperPolynomial(self.spec, self._terms)
        for mono, c in other._terms.items():
            result._add(mono, c)
        return result

    def __neg__(self) -> "SuperPolynomial":
        return SuperPolynomial(self.spec, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "SuperPolynomial") -> "SuperPolynomial":
        return self + (-other)

    def __mul__(self, other: Union["SuperPolynomial", int, Fraction]) -> "SuperPolynomial":
        if not isinstance(other, SuperPolynomial):
            scalar = Fraction(other)
            return SuperPolynomial(self.spec, {m: c * scalar for m, c in self._terms.items()})
        self._check(other)
        result = SuperPolynomial(self.spec)
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                sign, mono = _multiply_monomials(self.spec, a, b)
                if sign:
                    result._add(mono, ca * cb * sign)
        return result

    def __rmul__(self, scalar) -> "SuperPolynomial":
        return self * scalar

    def derivative(self, g: int) -> "SuperPolynomial":
        """对第 g 个生成元的左导数"""
        result = SuperPolynomial(self.spec)
        for mono, c in self._terms.items():
            e = mono[g]
            if not e:
                continue
            reduced = list(mono)
            reduced[g] -= 1
            if self.spec.is_odd(g):
                sign = -1 if _odd_before(self.spec, mono, g) % 2 else 1
                result._add(tuple(reduced), c * sign)
            else:
                result._add(tuple(reduced), c * e)
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self == SuperPolynomial.constant(self.spec, other)
        if not isinstance(other, SuperPolynomial):
            return NotImplemented
        return self.spec == other.spec and self._terms == other._terms

    def __hash__(self):
        return hash((self.spec, frozenset(self._terms.items())))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mono, c in sorted(self._terms.items(), reverse=True):
            factors = [
                self.spec.name(g) + (f"^{e}" if e > 1 else "") for g, e in enumerate(mono) if e
            ]
            coeff = str(abs(c))
            body = f"{coeff} * {' '.join(factors)}" if factors else coeff
            parts.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    __repr__ = __str__


def _monomial_poly(spec: GeneratorSpec, mono: Monomial, coeff: Fraction = Fraction(1)) -> SuperPolynomial:
    return SuperPolynomial(spec, {mono: coeff})


# ---------------------------------------------------------------------------
# Schouten 括号与表示 Φ
# ---------------------------------------------------------------------------


def schouten(f1: SuperPolynomial, f2: SuperPolynomial) -> SuperPolynomial:
    """次数 1−d 的标准 Lie 括号

    [f₁, f₂] = Σ_a (−1)^{|ψ_a||f₁|} ∂_{x_a}f₁ ∂_{ψ_a}f₂ + (−1)^{d + |x_a|(|f₁|−|ψ_a|)} ∂_{ψ_a}f₁ ∂_{x_a}f₂
    """
    f1._check(f2)
    spec = f1.spec
    result = SuperPolynomial(spec)
    for mono, c in f1.items():
        part = _monomial_poly(spec, mono, c)
        deg = spec.monomial_degree(mono)
        for a in range(spec.n):
            dx, dpsi = spec.degrees[a]
            x, psi = spec.x(a), spec.psi(a)
            first = part.derivative(x) * f2.derivative(psi)
            second = part.derivative(psi) * f2.derivative(x)
            result = result + first * ((-1) ** ((dpsi * deg) % 2))
            result = result + second * ((-1) ** ((spec.d + dx * (deg - dpsi)) % 2))
    return result


def _as_labeled(g: Union[SignedGraphClass, DirectedGraph]) -> Tuple[DirectedGraph, int, Optional[int]]:
    if isinstance(g, SignedGraphClass):
        return g.graph, g.sign, g.dimension_flavor
    return g, 1, None


def _apply_edges(
    spec: GeneratorSpec, edges: Sequence[Tuple[int, int]], factors: List[SuperPolynomial]
) -> List[Tuple[int, List[SuperPolynomial]]]:
    """按从后往前的顺序施加 Δ_e：先在头部因子上求 ∂ψ，再在尾部因子上求 ∂x"""
    states: List[Tuple[int, List[SuperPolynomial]]] = [(1, factors)]
    for tail, head in reversed(edges):
        next_states = []
        for sign, current in states:
            for a in range(spec.n):
                dx, dpsi = spec.degrees[a]
                step = list(current)
                # 各因子均为单项式，次数确定
                before = sum(spec.monomial_degree(step[t].items()[0][0]) for t in range(head))
                step[head] = step[head].derivative(spec.psi(a))
                if step[head].is_zero:
                    continue
                s = sign * (-1) ** ((dpsi * before) % 2)
                before = sum(spec.monomial_degree(step[t].items()[0][0]) for t in range(tail))
                step[tail] = step[tail].derivative(spec.x(a))
                if step[tail].is_zero:
                    continue
                s *= (-1) ** ((dx * before) % 2)
                next_states.append((s, step))
        states = next_states
        if not states:
            break
    return states


def phi_apply(
    g: Union[SignedGraphClass, DirectedGraph], args: Sequence[SuperPolynomial]
) -> SuperPolynomial:
    """Φ_Γ(f₁, …, f_k) = m(∏_e Δ_e (f₁ ⊗ … ⊗ f_k))"""
    graph, sign, flavor = _as_labeled(g)
    if len(args) != graph.vertex_count:
        raise StructuralError(f"图有 {graph.vertex_count} 个顶点，但给出 {len(args)} 个参数")
    if not args:
        raise StructuralError("至少需要一个参数")
    spec = args[0].spec
    for f in args[1:]:
        f._check(args[0])
    if flavor is not None and flavor != spec.d:
        raise FlavorMismatchError(f"图的维数 d={flavor} 与生成元规格 d={spec.d} 不一致")

    result = SuperPolynomial(spec)
    if sign == 0:
        return result
    for choice in itertools.product(*(f.items() for f in args)):
        coeff = Fraction(sign)
        factors = []
        for mono, c in choice:
            coeff *= c
            factors.append(_monomial_poly(spec, mono))
        for s, final in _apply_edges(spec, graph.edges, factors):
            product = SuperPolynomial.constant(spec)
            for f in final:
                product = product * f
            result = result + product * (coeff * s)
    return result


# ---------------------------------------------------------------------------
# 加权 L∞ 结构
# ---------------------------------------------------------------------------


@dataclass
class WeightedLinfty:
    """元数 k -> [(k 顶点图类, 权重)]；truncated=True 表示未列出的元数按零处理"""

    arity_to_terms: Dict[int, List[Tuple[SignedGraphClass, Fraction]]] = field(default_factory=dict)
    truncated: bool = False

    def __post_init__(self):
        for k, terms in self.arity_to_terms.items():
            for c, _ in terms:
                if c.graph.vertex_count != k:
                    raise StructuralError(f"元数 {k} 处的图有 {c.graph.vertex_count} 个顶点")

    @classmethod
    def from_graph_vector(cls, v: GraphVector, weight=1, truncated: bool = False) -> "WeightedLinfty":
        """把图向量的每个类以 coeff·weight 放入对应元数"""
        table: Dict[int, List[Tuple[SignedGraphClass, Fraction]]] = {}
        for g, c in v.items():
            table.setdefault(g.vertex_count, []).append(
                (SignedGraphClass(g, 1, v.d), Fraction(c) * Fraction(weight))
            )
        return cls(table, truncated)

    def add(self, c: SignedGraphClass, weight) -> None:
        k = c.graph.vertex_count
        self.arity_to_terms.setdefault(k, []).append((c, Fraction(weight)))

    def arities(self) -> List[int]:
        return sorted(self.arity_to_terms)

    def defines(self, k: int) -> bool:
        return k in self.arity_to_terms or self.truncated


def symmetrized_phi(c: SignedGraphClass, args: Sequence[SuperPolynomial]) -> SuperPolynomial:
    """图类的算子 (1/k!) Σ_σ ε(σ) Φ_{σΓ}，与代表元的标号无关"""
    k = c.graph.vertex_count
    spec = args[0].spec
    total = SuperPolynomial(spec)
    if c.is_zero:
        return total
    for perm in itertools.permutations(range(k)):
        labeled = relabel(c.graph, perm)
        s = canonicalize(labeled, c.dimension_flavor).sign
        if s:
            total = total + phi_apply(labeled, args) * (s * c.sign)
    return total * Fraction(1, math.factorial(k))


def linfty_apply(L: WeightedLinfty, k: int, args: Sequence[SuperPolynomial]) -> SuperPolynomial:
    """μ_k(f₁, …, f_k) = Σ 权重 · Φ_Γ(f₁, …, f_k)"""
    if len(args) != k:
        raise StructuralError(f"元数 {k} 需要 {k} 个参数，实际 {len(args)}")
    spec = args[0].spec
    terms = L.arity_to_terms.get(k)
    if not terms:
        if not L.truncated:
            log_warning(f"L∞ 结构未定义元数 {k}，结果按 0 处理", logger)
        return SuperPolynomial(spec)
    total = SuperPolynomial(spec)
    for c, weight in terms:
        if weight:
            total = total + symmetrized_phi(c, args) * weight
    return total


def quantizable_arity(d: int, p: int) -> int:
    """ħ^p 项对应的元数 2p(d−1)+2"""
    return 2 * p * (d - 1) + 2


def mc_check_quantizable(pi: SuperPolynomial, L: WeightedLinfty, order: int) -> List[SuperPolynomial]:
    """逐阶展开 ½[π◇, π◇]_S + Σ_{p≥1} ħ^p/(2p(d−1)+2)! μ_{2p(d−1)+2}(π◇, …, π◇)

    π◇ 可含 ħ（规格需启用 hbar_order ≥ order）；返回第 0..order 阶的残差。
    """
    spec = pi.spec
    if order > 0 and spec.hbar_order < order:
        raise StructuralError(f"ħ 截断阶 {spec.hbar_order} 小于所需阶数 {order}")
    total = schouten(pi, pi) * Fraction(1, 2)
    hbar = SuperPolynomial.generator(spec, "hbar") if spec.hbar_order else None
    for p in range(1, order + 1):
        n = quantizable_arity(spec.d, p)
        if not L.defines(n):
            raise MissingArityError(f"计算 ħ^{p} 阶需要元数 {n} 的 L∞ 数据", n)
        term = linfty_apply(L, n, [pi] * n) * Fraction(1, math.factorial(n))
        for _ in range(p):
            term = term * hbar
        total = total + term
        log_debug(f"ħ^{p}: 元数 {n} 的贡献有 {len(term)} 项", logger)
    return [total.hbar_coefficient(j) for j in range(order + 1)]


# ---------------------------------------------------------------------------
# Lie 双代数
# ---------------------------------------------------------------------------

StructureConstants = Sequence[Sequence[Sequence[Union[int, Fraction]]]]


def bialgebra_spec(dim: int, truncation: int = 6) -> GeneratorSpec:
    return GeneratorSpec(3, dim, tuple((1, 1) for _ in range(dim)), truncation)


def bialgebra_gamma(C: StructureConstants, Phi: StructureConstants, spec: GeneratorSpec) -> SuperPolynomial:
    """γ = Σ C_{ij}^k ψ_k x_i x_j + Φ_k^{ij} x_k ψ_i ψ_j

    C[i][j][k] = C_{ij}^k，Phi[k][i][j] = Φ_k^{ij}。
    """
    if spec.d != 3 or any(p != (1, 1) for p in spec.degrees):
        raise StructuralError("Lie 双代数要求 d = 3 且 |x_i| = |ψ_i| = 1")
    n = spec.n
    gen = lambda name: SuperPolynomial.generator(spec, name)  # noqa: E731
    gamma = SuperPolynomial(spec)
    for i, j, k in itertools.product(range(n), repeat=3):
        c = Fraction(C[i][j][k]) if C else Fraction(0)
        if c:
            gamma = gamma + gen(f"psi{k + 1}") * gen(f"x{i + 1}") * gen(f"x{j + 1}") * c
        phi = Fraction(Phi[k][i][j]) if Phi else Fraction(0)
        if phi:
            gamma = gamma + gen(f"x{k + 1}") * gen(f"psi{i + 1}") * gen(f"psi{j + 1}") * phi
    return gamma


def structure_constants(
    dim: int,
    bracket: Dict[Tuple[int, int], Dict[int, object]],
    cobracket: Dict[int, Dict[Tuple[int, int], object]],
) -> Tuple[List, List]:
    """由 [e_i, e_j] = Σ c e_k 与 δ(e_k) = Σ c e_i∧e_j（0 起始下标）生成反对称的 C 与 Φ"""
    C = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
    Phi = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
    for (i, j), image in bracket.items():
        for k, c in image.items():
            C[i][j][k] += Fraction(c)
            C[j][i][k] -= Fraction(c)
    for k, image in cobracket.items():
        for (i, j), c in image.items():
            Phi[k][i][j] += Fraction(c)
            Phi[k][j][i] -= Fraction(c)
    return C, Phi


def gamma_from_json(text: str, truncation: int = 6) -> SuperPolynomial:
    """读取 {"dim": n, "C": [[[..]]], "Phi": [[[..]]]}，元素可为 "p/q" 字符串"""
    data = json.loads(text)
    dim = int(data["dim"])

    def parse(tensor):
        if tensor is None:
            return None
        return [[[Fraction(v) for v in row] for row in plane] for plane in tensor]

    return bialgebra_gamma(parse(data.get("C")), parse(data.get("Phi")), bialgebra_spec(dim, truncation))


def monomials(spec: GeneratorSpec, max_degree: int) -> Iterable[SuperPolynomial]:
    """所有多项式次数 ≤ max_degree 的单项式（不含 ħ）"""
    gens = list(range(2 * spec.n))
    for total in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(gens, total):
            mono = [0] * spec.generator_count
            for g in combo:
                mono[g] += 1
            if any(mono[g] > 1 for g in gens if spec.is_odd(g)):
                continue
            yield _monomial_poly(spec, tuple(mono))

# 非诺特几何报告：U/W 轨迹、闭点的几何维数、维数等式
"""
只处理单项式表示：

    k + J·S        J 为 S 中的单项式理想
    k[R', J]       R' 为附加的单项式生成元
    k + ∏ 𝔫_i      有限个有理点粘成一点（S 为多项式环）

S 可以是多项式环 k[variables]，也可以是由单项式生成的 toric 环。
所有计算都是精确的（整数、有理数、sympy 矩阵）。
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import sympy as sp

from impression import Monomial, format_monomial, format_monomials, sort_monomials
from tiling_core import MalformedInputError, TilingError
from toric_center import MonoidMembership

logger = logging.getLogger(__name__)

K_PLUS_IDEAL = "k-plus-ideal"
K_ADJOIN = "k-adjoin"
FINITE_POINTS = "finite-points"

UNIQUE_MAXIMAL = "unique-maximal-depiction"
UNKNOWN = "unknown"

Point = Tuple[Fraction, ...]


class UnsupportedPresentationError(TilingError):
    """非单项式理想或不支持的表示形式"""


@dataclass(frozen=True)
class SubalgebraPresentation:
    variables: Tuple[str, ...]
    form: str
    ideal: Tuple[Monomial, ...] = ()
    adjoin: Tuple[Monomial, ...] = ()
    s_generators: Optional[Tuple[Monomial, ...]] = None
    points: Tuple[Point, ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.form not in (K_PLUS_IDEAL, K_ADJOIN, FINITE_POINTS):
            raise UnsupportedPresentationError(f"未知的表示形式: {self.form}")
        if self.form == FINITE_POINTS:
            if self.s_generators is not None:
                raise UnsupportedPresentationError("有限点粘合只支持多项式环 S")
            if len(set(self.points)) != len(self.points):
                raise MalformedInputError("粘合的点有重复")
            if any(len(p) != len(self.variables) for p in self.points):
                raise MalformedInputError("点的坐标个数与变量个数不一致")
            return
        if not self.ideal:
            raise UnsupportedPresentationError("理想 J 不能为空")
        if self.s_generators is not None:
            membership = MonoidMembership(self.s_generators)
            for j in self.ideal + self.adjoin:
                if j not in membership:
                    raise UnsupportedPresentationError(f"{format_monomial(j, self.variables)} 不在 S 中")

    @property
    def is_polynomial(self) -> bool:
        return self.s_generators is None

    def fmt(self, monomials) -> str:
        return format_monomials(monomials, self.variables)

    def unit_ideal(self) -> bool:
        return any(not any(j) for j in self.ideal)

    def s_line(self) -> str:
        if self.is_polynomial:
            return f"S = k[{', '.join(self.variables)}]"
        return f"S = {self.fmt(self.s_generators)}"

    def r_line(self) -> str:
        if self.form == FINITE_POINTS:
            if len(self.points) <= 1:
                return "R = S"
            return f"R = k + {_point_ideal_text(self.variables, self.points)}S"
        if self.unit_ideal():
            return "R = S"
        if self.form == K_ADJOIN:
            return f"R = k[{self.fmt(self.adjoin)}, ({self.fmt(self.ideal)})S]"
        return f"R = k + ({self.fmt(self.ideal)})S"


def _coordinate(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_point(point: Point) -> str:
    if len(point) == 1:
        return _coordinate(point[0])
    return "(" + ", ".join(_coordinate(c) for c in point) + ")"


def _point_ideal_text(variables: Sequence[str], points: Sequence[Point]) -> str:
    symbols = [sp.Symbol(v) for v in variables]
    parts = []
    for point in points:
        generators = [str(s - sp.Rational(c.numerator, c.denominator)) for s, c in zip(symbols, point)]
        parts.append("(" + ", ".join(generators) + ")")
    return "".join(parts)


# ---------- 多项式 S：单项式理想的零点集 ----------

def _supports(ideal: Sequence[Monomial]) -> List[FrozenSet[int]]:
    return [frozenset(i for i, e in enumerate(j) if e) for j in ideal]


def minimal_covers(n: int, ideal: Sequence[Monomial]) -> List[FrozenSet[int]]:
    """与每个生成元支撑都相交的极小变量集合；每个给出 Z(J) 的一个坐标子空间分支"""
    supports = _supports(ideal)
    if any(not s for s in supports):
        return []
    covers: List[FrozenSet[int]] = []
    for size in range(n + 1):
        for subset in combinations(range(n), size):
            candidate = frozenset(subset)
            if any(c <= candidate for c in covers):
                continue
            if all(candidate & s for s in supports):
                covers.append(candidate)
    return covers


# ---------- toric S：锥的面 ----------

@dataclass
class ConeFace:
    generators: FrozenSet[int]
    normals: List[sp.Matrix] = field(default_factory=list)
    dimension: int = 0

    def contains(self, m: Monomial) -> bool:
        return all((sp.Matrix([list(m)]) * n)[0] == 0 for n in self.normals)


def cone_faces(generators: Sequence[Monomial]) -> List[ConeFace]:
    """
    由 sympy 零空间求出支撑超平面（facet 法向量），再对 facet 取交得到全部面。
    法向量限制在生成元张成的子空间里，使得秩为 d-1 的子集恰好决定一条法线。
    """
    gens = [list(g) for g in generators]
    A = sp.Matrix(gens)
    n = A.cols
    d = A.rank()
    complement = [v.T for v in A.nullspace()]

    facets: Dict[FrozenSet[int], sp.Matrix] = {}
    for subset in combinations(range(len(gens)), d - 1):
        rows = [sp.Matrix([gens[i]]) for i in subset] + complement
        M = sp.Matrix.vstack(*rows) if rows else sp.zeros(0, n)
        if M.rank() != n - 1:
            continue
        normal = M.nullspace()[0]
        values = [(sp.Matrix([g]) * normal)[0] for g in gens]
        if all(v >= 0 for v in values) or all(v <= 0 for v in values):
            zero = frozenset(i for i, v in enumerate(values) if v == 0)
            facets.setdefault(zero, normal)

    everything = frozenset(range(len(gens)))
    found = {everything}
    pending = list(facets)
    while pending:
        face = pending.pop()
        if face in found:
            continue
        found.add(face)
        for zero in facets:
            pending.append(face & zero)

    faces = []
    for face in found:
        normals = [normal for zero, normal in facets.items() if face <= zero]
        dimension = sp.Matrix([gens[i] for i in sorted(face)]).rank() if face else 0
        faces.append(ConeFace(face, normals, dimension))
    faces.sort(key=lambda f: (f.dimension, sorted(f.generators)))
    return faces


def lattice_rank(generators: Sequence[Monomial]) -> int:
    return sp.Matrix([list(g) for g in generators]).rank()


# ---------- 报告 ----------

@dataclass
class Loci:
    U_complement: str
    W_complement: str
    exact: bool
    components: List[str] = field(default_factory=list)
    collapsed: str = ""


def _zero_text(pres: SubalgebraPresentation) -> str:
    return f"Z({pres.fmt(pres.ideal)})"


def _components(pres: SubalgebraPresentation) -> List[str]:
    if pres.is_polynomial:
        covers = minimal_covers(len(pres.variables), pres.ideal)
        return ["{" + " = ".join(pres.variables[i] for i in sorted(c)) + " = 0}" for c in covers]
    faces = [f for f in cone_faces(pres.s_generators) if not any(f.contains(j) for j in pres.ideal)]
    maximal = [f for f in faces if not any(f.generators < g.generators for g in faces)]
    gens = sort_monomials(pres.s_generators)
    index = {g: i for i, g in enumerate(pres.s_generators)}
    components = []
    for face in maximal:
        vanishing = [format_monomial(g, pres.variables) for g in gens if index[g] not in face.generators]
        components.append("{" + " = ".join(vanishing) + " = 0}")
    return sorted(components)


def loci(pres: SubalgebraPresentation) -> Loci:
    """U 与 W 的补集；k + J 形式下二者都等于 Z(J)"""
    if pres.form == FINITE_POINTS:
        if len(pres.points) <= 1:
            return Loci("∅", "∅", True)
        points = "{" + ", ".join(_format_point(p) for p in pres.points) + "}"
        return Loci(points, points, True, [f"{{{_format_point(p)}}}" for p in pres.points])

    if pres.unit_ideal():
        return Loci("∅ (U = W = Max S)", "∅ (U = W = Max S)", True)

    zero = _zero_text(pres)
    components = _components(pres)
    union = " ∪ ".join(components)
    if pres.form == K_PLUS_IDEAL:
        return Loci(f"{zero} = {union}", f"{zero} = {union}", True, components)

    fibers = ", ".join(f"{format_monomial(g, pres.variables)} = c{i + 1}"
                        for i, g in enumerate(sort_monomials(pres.adjoin)))
    collapsed = f"{{{fibers}}} ∩ {zero}" if fibers else zero
    return Loci(f"⊆ {zero}", f"⊆ {zero}", False, components, collapsed)


def geometric_dimension(pres: SubalgebraPresentation) -> int:
    """闭点 J∩R 的几何维数：Z(J) 在 Max S 中的维数"""
    if pres.form == FINITE_POINTS:
        return 0
    if pres.form != K_PLUS_IDEAL:
        raise UnsupportedPresentationError("几何维数只对 k + J 形式计算")
    if pres.unit_ideal():
        raise UnsupportedPresentationError("J = (1) 时 Z(J) 为空，没有闭点")
    if pres.is_polynomial:
        covers = minimal_covers(len(pres.variables), pres.ideal)
        return len(pres.variables) - min(len(c) for c in covers)
    faces = cone_faces(pres.s_generators)
    return max(f.dimension for f in faces if not any(f.contains(j) for j in pres.ideal))


@dataclass
class DimensionRecord:
    dim_S_R: int
    trdeg: int
    dim_S: int

    @property
    def common(self) -> int:
        return self.dim_S


def dimension_equalities(pres: SubalgebraPresentation) -> DimensionRecord:
    dim = len(pres.variables) if pres.is_polynomial else lattice_rank(pres.s_generators)
    return DimensionRecord(dim, dim, dim)


def finite_point_gluing(variables: Sequence[str], points: Sequence[Sequence], name: str = "") -> SubalgebraPresentation:
    """R = k + ∏ 𝔫_i：把 S = k[variables] 的 r 个点粘成一个点"""
    exact = tuple(tuple(Fraction(c) for c in p) for p in points)
    return SubalgebraPresentation(tuple(variables), FINITE_POINTS, points=exact, name=name)


def uniqueness_flag(pres: SubalgebraPresentation) -> str:
    """多项式环（或生成元线性无关的 toric 环）满足互素条件，极大描绘唯一"""
    if pres.is_polynomial:
        return UNIQUE_MAXIMAL
    if lattice_rank(pres.s_generators) == len(pres.s_generators):
        return UNIQUE_MAXIMAL
    return UNKNOWN


@dataclass
class GeometryReport:
    presentation: SubalgebraPresentation
    loci: Loci
    closed_point: str
    geometric_dimension: Optional[int]
    dimensions: DimensionRecord
    depiction: str
    birational: bool
    uniqueness: str


def geometry_report(pres: SubalgebraPresentation) -> GeometryReport:
    logger.info(f"生成几何报告: {pres.name or pres.r_line()}")
    if pres.form == FINITE_POINTS:
        closed_point = "∏ n_i ∩ R"
    else:
        closed_point = f"({pres.fmt(pres.ideal)})S ∩ R"
    try:
        dimension = geometric_dimension(pres)
    except UnsupportedPresentationError:
        dimension = None
    depiction = "yes (monomial k + J form)" if pres.form != K_ADJOIN else "unknown"
    if pres.form == FINITE_POINTS:
        depiction = "yes (finitely many points glued)"
    return GeometryReport(pres, loci(pres), closed_point, dimension, dimension_equalities(pres),
                          depiction, True, uniqueness_flag(pres))

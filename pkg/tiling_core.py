# 环面箭图数据模型与校验模块
"""
嵌入二维环面的箭图（brane tiling）。

嵌入信息只用箭头的偏移量（覆盖空间中头所在格子减去尾所在格子）表示，
面带有显式的正负号。路径的提升端点由尾、头和同调向量（偏移量之和）决定。
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

Vector = Tuple[int, int]
Word = Tuple[str, ...]

ZERO: Vector = (0, 0)


class TilingError(Exception):
    """所有铺砌相关错误的基类"""


class MalformedInputError(TilingError):
    """悬空或重复的顶点/箭头编号"""


class CompositionError(TilingError):
    """箭头序列不可复合"""


def add_vectors(u: Vector, v: Vector) -> Vector:
    return (u[0] + v[0], u[1] + v[1])


@dataclass(frozen=True)
class Arrow:
    id: str
    tail: str
    head: str
    offset: Vector = ZERO

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class Face:
    sign: int
    boundary: Word

    def rotations(self) -> List[Word]:
        n = len(self.boundary)
        return [self.boundary[i:] + self.boundary[:i] for i in range(n)]

    def canonical(self) -> Word:
        """按箭头编号字典序最小的旋转"""
        return min(self.rotations())

    def rotated_to_end_with(self, arrow_id: str) -> Word:
        for rotation in self.rotations():
            if rotation[-1] == arrow_id:
                return rotation
        raise MalformedInputError(f"箭头 {arrow_id} 不在面 {self.boundary} 上")

    def rotated_to_start_with(self, arrow_id: str) -> Word:
        for rotation in self.rotations():
            if rotation[0] == arrow_id:
                return rotation
        raise MalformedInputError(f"箭头 {arrow_id} 不在面 {self.boundary} 上")


@dataclass(frozen=True)
class TorusQuiver:
    """环面上的箭图 Q：顶点、带偏移量的箭头、带符号的面"""

    vertices: Tuple[str, ...]
    arrows: Tuple[Arrow, ...]
    faces: Tuple[Face, ...]
    name: str = ""
    grid: Optional[Tuple[Tuple[str, Vector], ...]] = field(default=None, compare=False)
    period: Tuple[Vector, Vector] = field(default=((1, 0), (0, 1)), compare=False)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise MalformedInputError("顶点编号重复")
        seen = set()
        vertex_set = set(self.vertices)
        for arrow in self.arrows:
            if arrow.id in seen:
                raise MalformedInputError(f"箭头编号重复: {arrow.id}")
            seen.add(arrow.id)
            for end in (arrow.tail, arrow.head):
                if end not in vertex_set:
                    raise MalformedInputError(f"箭头 {arrow.id} 引用了未知顶点 {end}")
        for face in self.faces:
            if face.sign not in (1, -1):
                raise MalformedInputError(f"面的符号必须是 +1 或 -1: {face.sign}")
            for arrow_id in face.boundary:
                if arrow_id not in seen:
                    raise MalformedInputError(f"面 {face.boundary} 引用了未知箭头 {arrow_id}")
        if self.grid is not None:
            gridded = {v for v, _ in self.grid}
            if gridded != vertex_set:
                raise MalformedInputError("网格坐标必须覆盖全部顶点或全部省略")

    @cached_property
    def _arrow_map(self) -> Dict[str, Arrow]:
        return {a.id: a for a in self.arrows}

    @cached_property
    def arrow_ids(self) -> Tuple[str, ...]:
        return tuple(sorted(self._arrow_map))

    @cached_property
    def _out(self) -> Dict[str, Tuple[Arrow, ...]]:
        out = {v: [] for v in self.vertices}
        for arrow_id in self.arrow_ids:
            arrow = self._arrow_map[arrow_id]
            out[arrow.tail].append(arrow)
        return {v: tuple(arrows) for v, arrows in out.items()}

    @cached_property
    def _in(self) -> Dict[str, Tuple[Arrow, ...]]:
        inc = {v: [] for v in self.vertices}
        for arrow_id in self.arrow_ids:
            arrow = self._arrow_map[arrow_id]
            inc[arrow.head].append(arrow)
        return {v: tuple(arrows) for v, arrows in inc.items()}

    @cached_property
    def grid_map(self) -> Dict[str, Vector]:
        return dict(self.grid) if self.grid else {}

    def arrow(self, arrow_id: str) -> Arrow:
        try:
            return self._arrow_map[arrow_id]
        except KeyError:
            raise MalformedInputError(f"未知箭头: {arrow_id}") from None

    def has_arrow(self, arrow_id: str) -> bool:
        return arrow_id in self._arrow_map

    def out_arrows(self, vertex: str) -> Tuple[Arrow, ...]:
        return self._out[vertex]

    def in_arrows(self, vertex: str) -> Tuple[Arrow, ...]:
        return self._in[vertex]

    @property
    def has_grid(self) -> bool:
        return self.grid is not None

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.arrows) + len(self.faces)

    def structure_key(self):
        """与编号无关的比较键：顶点、箭头（尾/头/偏移）、规范化的面"""
        arrows = tuple((a.id, a.tail, a.head, a.offset) for a in sorted(self.arrows, key=lambda a: a.id))
        faces = tuple(sorted((f.sign, f.canonical()) for f in self.faces))
        return tuple(sorted(self.vertices)), arrows, faces


@dataclass(frozen=True)
class PathWord:
    """可复合的箭头序列；空路径需要基点"""

    arrows: Word
    tail: str
    head: str
    homology: Vector

    @property
    def length(self) -> int:
        return len(self.arrows)

    def __str__(self):
        return " ".join(self.arrows) if self.arrows else f"e_{self.tail}"


@dataclass
class Violation:
    invariant: str
    detail: str


@dataclass
class ValidationReport:
    ok: bool
    violations: List[Violation] = field(default_factory=list)

    def invariants(self) -> List[str]:
        return sorted({v.invariant for v in self.violations})


def make_path(q: TorusQuiver, arrows: Sequence[str], base: Optional[str] = None) -> PathWord:
    """由箭头编号序列构造路径，检查可复合性"""
    word = tuple(arrows)
    if not word:
        if base is None or base not in q.vertices:
            raise CompositionError("空路径需要一个合法的基点")
        return PathWord((), base, base, ZERO)
    homology = ZERO
    first = q.arrow(word[0])
    if base is not None and base != first.tail:
        raise CompositionError(f"路径不从基点 {base} 出发")
    current = first.tail
    for arrow_id in word:
        arrow = q.arrow(arrow_id)
        if arrow.tail != current:
            raise CompositionError(f"箭头 {arrow_id} 的尾 {arrow.tail} 与前一箭头的头 {current} 不一致")
        homology = add_vectors(homology, arrow.offset)
        current = arrow.head
    return PathWord(word, first.tail, current, homology)


def lift_endpoints(q: TorusQuiver, p: PathWord) -> Tuple[str, str, Vector]:
    checked = make_path(q, p.arrows, base=p.tail)
    return checked.tail, checked.head, checked.homology


def word_homology(q: TorusQuiver, word: Sequence[str]) -> Vector:
    x = y = 0
    for arrow_id in word:
        dx, dy = q.arrow(arrow_id).offset
        x += dx
        y += dy
    return (x, y)


def is_composable(q: TorusQuiver, word: Sequence[str]) -> bool:
    for left, right in zip(word, word[1:]):
        if q.arrow(left).head != q.arrow(right).tail:
            return False
    return True


def validate_tiling(q: TorusQuiver) -> ValidationReport:
    """检查四条环面不变量，违例中写明失败的不变量与对应的面/箭头"""
    violations = []

    chi = q.euler_characteristic
    if chi != 0:
        violations.append(Violation(
            "euler",
            f"|Q0| - |Q1| + |F| = {len(q.vertices)} - {len(q.arrows)} + {len(q.faces)} = {chi}, 应为 0"))

    for arrow_id in q.arrow_ids:
        positive = sum(f.boundary.count(arrow_id) for f in q.faces if f.sign == 1)
        negative = sum(f.boundary.count(arrow_id) for f in q.faces if f.sign == -1)
        if positive != 1 or negative != 1:
            violations.append(Violation(
                "two-faces",
                f"箭头 {arrow_id} 出现在 {positive} 个正面和 {negative} 个负面中"))

    for index, face in enumerate(q.faces):
        label = f"面 #{index} ({'+' if face.sign == 1 else '-'} {' '.join(face.boundary)})"
        if len(face.boundary) < 2:
            violations.append(Violation("closed-cycle", f"{label} 长度小于 2"))
            continue
        cyclic = face.boundary + face.boundary[:1]
        if not is_composable(q, cyclic):
            violations.append(Violation("closed-cycle", f"{label} 不是闭合可复合的圈"))
            continue
        total = word_homology(q, face.boundary)
        if total != ZERO:
            violations.append(Violation("face-sum-zero", f"{label} 的偏移量之和为 {total}"))

    report = ValidationReport(ok=not violations, violations=violations)
    if report.ok:
        logger.debug(f"铺砌 {q.name} 校验通过")
    else:
        logger.debug(f"铺砌 {q.name} 校验失败: {report.invariants()}")
    return report


def enumerate_paths(q: TorusQuiver, length: int, tail: Optional[str] = None) -> Iterator[Word]:
    """按箭头编号字典序枚举给定长度的所有路径"""
    if length <= 0:
        return
    if tail is None:
        starts = [q.arrow(a) for a in q.arrow_ids]
    else:
        starts = list(q.out_arrows(tail))

    stack: List[Tuple[Word, str]] = [((a.id,), a.head) for a in reversed(starts)]
    while stack:
        word, head = stack.pop()
        if len(word) == length:
            yield word
            continue
        for arrow in reversed(q.out_arrows(head)):
            stack.append((word + (arrow.id,), arrow.head))


def rename(q: TorusQuiver, vertex_map: Dict[str, str], arrow_map: Dict[str, str]) -> TorusQuiver:
    """按双射重新编号，用于检查校验结论与编号无关"""
    vertices = tuple(sorted(vertex_map[v] for v in q.vertices))
    arrows = tuple(
        Arrow(arrow_map[a.id], vertex_map[a.tail], vertex_map[a.head], a.offset) for a in q.arrows)
    faces = tuple(Face(f.sign, tuple(arrow_map[a] for a in f.boundary)) for f in q.faces)
    grid = None
    if q.grid is not None:
        grid = tuple(sorted((vertex_map[v], g) for v, g in q.grid))
    return TorusQuiver(vertices, arrows, faces, name=q.name, grid=grid, period=q.period)

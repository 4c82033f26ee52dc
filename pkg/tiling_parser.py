# 输入文件解析模块
"""
两种文本格式：

铺砌文件 (*.tiling)
    tiling <name>
    period <p1x> <p1y> <p2x> <p2y>          可选，默认 1 0 0 1
    variables <names...>                   可选，标注所用变量的顺序
    square                                 可选，按网格方向自动标注
    vertex <id> [at <gx> <gy>]
    arrow <id> <tail> <head> <dx> <dy> [label <monomial>]
    face <+|-> <arrow ids...>
    contract <arrow ids...>                可选，可重复，至少一个箭头

环文件 (*.ring)
    ring <name>
    variables <names...>
    generators <monomials...>              可选，toric 环 S
    ideal <monomials...>
    adjoin <monomials...>
    point <c1> <c2> ...                    可重复

`#` 之后为注释，记号以空白分隔。出错时报告行号与列号。
"""

import logging
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple, Union

from config import DATA_DIR, RING_SUFFIX, TILING_SUFFIX
from geometry import FINITE_POINTS, K_ADJOIN, K_PLUS_IDEAL, SubalgebraPresentation
from impression import (LabelingError, Labeling, build_labeling, parse_monomial,
                        square_labeling, variables_of)
from tiling_core import Arrow, Face, TilingError, TorusQuiver, Vector

logger = logging.getLogger(__name__)

DEFAULT_PERIOD: Tuple[Vector, Vector] = ((1, 0), (0, 1))

_TOKEN = re.compile(r"\S+")


class ParseError(TilingError):
    """带位置信息的输入错误"""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"第 {line} 行第 {column} 列: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int

    def error(self, message: str) -> ParseError:
        return ParseError(self.line, self.column, message)


@dataclass
class TilingFile:
    quiver: TorusQuiver
    period: Tuple[Vector, Vector] = DEFAULT_PERIOD
    grid: Optional[Tuple[Tuple[str, Vector], ...]] = None
    labels: Dict[str, str] = field(default_factory=dict)
    variables: Tuple[str, ...] = ()
    square: bool = False
    contractions: Tuple[Tuple[str, ...], ...] = ()

    @property
    def name(self) -> str:
        return self.quiver.name

    @property
    def has_contraction(self) -> bool:
        return bool(self.contractions)

    @property
    def contracted(self) -> Tuple[str, ...]:
        """所有 contract 行的并集"""
        return tuple(sorted({a for line in self.contractions for a in line}))

    def labeling(self) -> Optional[Labeling]:
        """显式标注优先；否则在声明了 square 时按网格方向标注"""
        if self.labels:
            variables = self.variables or tuple(sorted(variables_of(list(self.labels.values()))))
            labels = {a: parse_monomial(text, variables) for a, text in self.labels.items()}
            return build_labeling(self.quiver, variables, labels)
        if self.square:
            return square_labeling(self.quiver)
        return None


def _decode(data: Union[bytes, str]) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        prefix = data[:e.start]
        line_start = prefix.rfind(b"\n") + 1
        column = len(prefix[line_start:].decode("utf-8")) + 1
        raise ParseError(prefix.count(b"\n") + 1, column, "输入不是合法的 UTF-8 文本") from None


def _lines(text: str) -> Iterator[List[Token]]:
    for number, raw in enumerate(text.splitlines(), 1):
        content = raw.split("#", 1)[0]
        tokens = [Token(m.group(), number, m.start() + 1) for m in _TOKEN.finditer(content)]
        if tokens:
            yield tokens


def _int(token: Token) -> int:
    try:
        return int(token.text)
    except ValueError:
        raise token.error(f"需要整数: {token.text!r}") from None


def _rational(token: Token) -> Fraction:
    try:
        return Fraction(token.text)
    except (ValueError, ZeroDivisionError):
        raise token.error(f"需要有理数坐标: {token.text!r}") from None


def _arity(keyword: Token, args: List[Token], allowed: Tuple[int, ...]) -> None:
    if len(args) not in allowed:
        expected = " 或 ".join(str(n) for n in allowed)
        raise keyword.error(f"{keyword.text} 需要 {expected} 个参数，实际为 {len(args)}")


def _at_least(keyword: Token, args: List[Token], minimum: int) -> None:
    if len(args) < minimum:
        raise keyword.error(f"{keyword.text} 至少需要 {minimum} 个参数")


def _check_monomial(token: Token) -> None:
    try:
        parse_monomial(token.text, variables_of([token.text]))
    except LabelingError as e:
        raise token.error(str(e)) from None


class _TilingReader:
    """先收集声明，再统一解析引用，使得面可以引用后面声明的箭头"""

    def __init__(self):
        self.name: Optional[str] = None
        self.name_token: Optional[Token] = None
        self.period: Tuple[Vector, Vector] = DEFAULT_PERIOD
        self.variables: Tuple[str, ...] = ()
        self.square = False
        self.vertices: List[Token] = []
        self.grid: Dict[str, Vector] = {}
        self.arrows: List[Tuple[Token, Token, Token, Vector]] = []
        self.labels: Dict[str, str] = {}
        self.faces: List[Tuple[int, List[Token]]] = []
        self.contractions: List[List[Token]] = []

    def read(self, text: str) -> TilingFile:
        for tokens in _lines(text):
            keyword, args = tokens[0], tokens[1:]
            handler = getattr(self, f"_kw_{keyword.text}", None)
            if handler is None:
                raise keyword.error(f"未知的关键字: {keyword.text}")
            handler(keyword, args)
        return self._build()

    def _kw_tiling(self, keyword: Token, args: List[Token]) -> None:
        _arity(keyword, args, (1,))
        if self.name is not None:
            raise keyword.error("每个文件只能包含一个铺砌")
        self.name, self.name_token = args[0].text, args[0]

    def _kw_period(self, keyword: Token, args: List[Token]) -> None:
        _arity(keyword, args, (4,))
        p1x, p1y, p2x, p2y = (_int(t) for t in args)
        if p1x * p2y - p1y * p2x == 0:
            raise keyword.error("周期向量线性相关")
        self.period = ((p1x, p1y), (p2x, p2y))

    def _kw_variables(self, keyword: Token, args: List[Token]) -> None:
        _at_least(keyword, args, 1)
        names = [t.text for t in args]
        for token in args:
            if names.count(token.text) > 1:
                raise token.error(f"变量重复: {token.text}")
        self.variables = tuple(names)

    def _kw_square(self, keyword: Token, args: List[Token]) -> None:
        _arity(keyword, args, (0,))
        self.square = True

    def _kw_vertex(self, keyword: Token, args: List[Token]) -> None:
        _arity(keyword, args, (1, 4))
        vertex = args[0]
        if any(v.text == vertex.text for v in self.vertices):
            raise vertex.error(f"顶点编号重复: {vertex.text}")
        if len(args) == 4:
            if args[1].text != "at":
                raise args[1].error(f"应为 at，实际为 {args[1].text!r}")
            self.grid[vertex.text] = (_int(args[2]), _int(args[3]))
        self.vertices.append(vertex)

    def _kw_arrow(self, keyword: Token, args: List[Token]) -> None:
        _arity(keyword, args, (5, 7))
        arrow_id, tail, head = args[0], args[1], args[2]
        if any(a[0].text == arrow_id.text for a in self.arrows):
            raise arrow_id.error(f"箭头编号重复: {arrow_id.text}")
        offset = (_int(args[3]), _int(args[4]))
        if len(args) == 7:
            if args[5].text != "label":
                raise args[5].error(f"应为 label，实际为 {args[5].text!r}")
            _check_monomial(args[6])
            self.labels[arrow_id.text] = args[6].text
        self.arrows.append((arrow_id, tail, head, offset))

    def _kw_face(self, keyword: Token, args: List[Token]) -> None:
        _at_least(keyword, args, 2)
        if args[0].text not in ("+", "-"):
            raise args[0].error(f"面的符号必须是 + 或 -: {args[0].text!r}")
        self.faces.append((1 if args[0].text == "+" else -1, args[1:]))

    def _kw_contract(self, keyword: Token, args: List[Token]) -> None:
        _at_least(keyword, args, 1)
        self.contractions.append(args)

    def _build(self) -> TilingFile:
        if self.name is None:
            raise ParseError(1, 1, "缺少 tiling 声明")
        if not self.vertices:
            raise self.name_token.error("铺砌没有顶点")

        if self.grid and len(self.grid) != len(self.vertices):
            missing = next(v for v in self.vertices if v.text not in self.grid)
            raise missing.error(f"网格坐标必须全部给出或全部省略，顶点 {missing.text} 缺少坐标")

        vertex_ids = {v.text for v in self.vertices}
        arrow_ids = {a[0].text for a in self.arrows}
        arrows = []
        for arrow_id, tail, head, offset in self.arrows:
            for end in (tail, head):
                if end.text not in vertex_ids:
                    raise end.error(f"未知顶点: {end.text}")
            arrows.append(Arrow(arrow_id.text, tail.text, head.text, offset))

        faces = []
        for sign, members in self.faces:
            for token in members:
                if token.text not in arrow_ids:
                    raise token.error(f"未知箭头: {token.text}")
            faces.append(Face(sign, tuple(t.text for t in members)))

        contractions = []
        for members in self.contractions:
            for token in members:
                if token.text not in arrow_ids:
                    raise token.error(f"未知箭头: {token.text}")
            contractions.append(tuple(t.text for t in members))

        for arrow_id in self.labels:
            for name in variables_of([self.labels[arrow_id]]):
                if self.variables and name not in self.variables:
                    token = next(a[0] for a in self.arrows if a[0].text == arrow_id)
                    raise token.error(f"箭头 {arrow_id} 的标注使用了未声明的变量 {name}")

        grid = tuple((v.text, self.grid[v.text]) for v in self.vertices) if self.grid else None
        quiver = TorusQuiver(
            vertices=tuple(v.text for v in self.vertices),
            arrows=tuple(arrows),
            faces=tuple(faces),
            name=self.name,
            grid=grid,
            period=self.period,
        )
        logger.debug(f"解析铺砌 {self.name}: {len(arrows)} 个箭头, {len(faces)} 个面")
        return TilingFile(quiver, self.period, grid, dict(self.labels), self.variables,
                          self.square, tuple(contractions))


def parse(data: Union[bytes, str]) -> TilingFile:
    """解析铺砌文件"""
    return _TilingReader().read(_decode(data))


def format_tiling_file(tf: TilingFile) -> str:
    """规范化输出；parse(format_tiling_file(parse(f))) == parse(f)"""
    q = tf.quiver
    lines = [f"tiling {q.name}"]
    if tf.period != DEFAULT_PERIOD:
        (p1x, p1y), (p2x, p2y) = tf.period
        lines.append(f"period {p1x} {p1y} {p2x} {p2y}")
    if tf.variables:
        lines.append("variables " + " ".join(tf.variables))
    if tf.square:
        lines.append("square")
    grid = dict(tf.grid) if tf.grid else {}
    for v in q.vertices:
        if v in grid:
            lines.append(f"vertex {v} at {grid[v][0]} {grid[v][1]}")
        else:
            lines.append(f"vertex {v}")
    for a in q.arrows:
        line = f"arrow {a.id} {a.tail} {a.head} {a.offset[0]} {a.offset[1]}"
        if a.id in tf.labels:
            line += f" label {tf.labels[a.id]}"
        lines.append(line)
    for f in q.faces:
        lines.append(f"face {'+' if f.sign == 1 else '-'} " + " ".join(f.boundary))
    for members in tf.contractions:
        lines.append(" ".join(("contract",) + members))
    return "\n".join(lines) + "\n"


# ---------- 环文件 ----------

def parse_ring(data: Union[bytes, str]) -> SubalgebraPresentation:
    """解析环文件，得到 k+J·S、k[R′, J] 或有限点粘合的表示"""
    text = _decode(data)
    name = None
    variables: Optional[List[Token]] = None
    sections: Dict[str, List[Token]] = {}
    points: List[Tuple[Token, List[Token]]] = []

    for tokens in _lines(text):
        keyword, args = tokens[0], tokens[1:]
        if keyword.text == "ring":
            _arity(keyword, args, (1,))
            if name is not None:
                raise keyword.error("每个文件只能包含一个环")
            name = args[0].text
        elif keyword.text == "variables":
            _at_least(keyword, args, 1)
            variables = args
        elif keyword.text in ("generators", "ideal", "adjoin"):
            _at_least(keyword, args, 1)
            if keyword.text in sections:
                raise keyword.error(f"{keyword.text} 只能出现一次")
            sections[keyword.text] = args
        elif keyword.text == "point":
            _at_least(keyword, args, 1)
            points.append((keyword, args))
        else:
            raise keyword.error(f"未知的关键字: {keyword.text}")

    if name is None:
        raise ParseError(1, 1, "缺少 ring 声明")
    if variables is None:
        raise ParseError(1, 1, "缺少 variables 声明")
    names = tuple(t.text for t in variables)

    def monomials(key: str) -> Tuple[Tuple[int, ...], ...]:
        result = []
        for token in sections.get(key, []):
            try:
                result.append(parse_monomial(token.text, names))
            except LabelingError as e:
                raise token.error(str(e)) from None
        return tuple(result)

    if points:
        if sections:
            keyword = points[0][0]
            raise keyword.error("point 不能与 generators/ideal/adjoin 同时使用")
        coordinates = []
        for keyword, args in points:
            if len(args) != len(names):
                raise keyword.error(f"点的坐标个数应为 {len(names)}")
            point = tuple(_rational(t) for t in args)
            if point in coordinates:
                raise args[0].error("粘合的点有重复")
            coordinates.append(point)
        return SubalgebraPresentation(names, FINITE_POINTS, points=tuple(coordinates), name=name)

    if "ideal" not in sections:
        raise ParseError(1, 1, "缺少 ideal 或 point 声明")
    generators = monomials("generators") or None
    form = K_ADJOIN if "adjoin" in sections else K_PLUS_IDEAL
    return SubalgebraPresentation(names, form, monomials("ideal"), monomials("adjoin"),
                                  generators, name=name)


def is_ring_file(path: str, text: str) -> bool:
    if path.endswith(RING_SUFFIX):
        return True
    for tokens in _lines(text):
        return tokens[0].text == "ring"
    return False


def resolve_path(path: str) -> str:
    """路径不存在时依次尝试 data/ 目录与默认后缀，例如 conifold -> data/conifold.tiling"""
    candidates = [path, path + TILING_SUFFIX, path + RING_SUFFIX]
    candidates += [os.path.join(DATA_DIR, c) for c in candidates]
    for candidate in candidates:
        if os.path.isfile(candidate):
            return candidate
    raise FileNotFoundError(f"文件不存在: {path}")


def load(path: str) -> Union[TilingFile, SubalgebraPresentation]:
    """按后缀或首个关键字选择解析器"""
    path = resolve_path(path)
    with open(path, "rb") as f:
        text = _decode(f.read())
    if is_ring_file(path, text):
        return parse_ring(text)
    return parse(text)

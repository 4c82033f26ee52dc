# 箭头标注（印象）模块
"""
把箭头映到多项式环 B 中单项式的标注 τ̄。

单项式用非负整数指数元组表示，变量顺序由标注的 variables 给出；
路径的像是各箭头单项式的乘积，空路径的像是单位单项式 1。
"""

import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from config import DEFAULT_BUDGET, DEFAULT_SEPARATION_LEN
from rewrite_engine import BudgetExceededError, ClassIndex, Relation, RewriteSystem
from tiling_core import PathWord, TilingError, TorusQuiver, Word, enumerate_paths, word_homology

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]

VERIFIED = "verified"
FAILED = "failed"
INCONCLUSIVE = "inconclusive"

# 方向（网格位移） -> 标注
SQUARE_LABELS = {
    (1, 0): "x1",
    (-1, 0): "x2",
    (0, 1): "y1",
    (0, -1): "y2",
    (1, 1): "x1*y1",
    (-1, -1): "x2*y2",
    (1, -1): "x1*y2",
    (-1, 1): "x2*y1",
}
SQUARE_VARIABLES = ("x1", "x2", "y1", "y2")

# 只出现三个方向时：上、左、右下 -> x, y, z；反向的三元组 下、右、左上 同样记为 x, y, z
THREE_ORIENTATION_LABELS = (
    {(0, 1): "x", (-1, 0): "y", (1, -1): "z"},
    {(0, -1): "x", (1, 0): "y", (-1, 1): "z"},
)
THREE_VARIABLES = ("x", "y", "z")

_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(\d+))?$")


class LabelingError(TilingError):
    """标注缺少箭头，或标注了零"""


class UnsupportedEmbeddingError(TilingError):
    """网格位移不是八个单位方向之一"""


def unit_monomial(n: int) -> Monomial:
    return (0,) * n


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_quotient(b: Monomial, a: Monomial) -> Monomial:
    """b / a，要求 a | b"""
    return tuple(y - x for x, y in zip(a, b))


def monomial_key(m: Monomial):
    """固定的输出顺序：先比总次数，再比反转后的指数元组"""
    return sum(m), tuple(reversed(m))


def sort_monomials(monomials) -> List[Monomial]:
    return sorted(set(monomials), key=monomial_key)


def format_monomial(m: Monomial, variables: Sequence[str]) -> str:
    factors = []
    for name, exponent in zip(variables, m):
        if exponent == 1:
            factors.append(name)
        elif exponent > 1:
            factors.append(f"{name}^{exponent}")
    return "*".join(factors) if factors else "1"


def format_monomials(monomials, variables: Sequence[str]) -> str:
    return ", ".join(format_monomial(m, variables) for m in sort_monomials(monomials))


def parse_monomial(text: str, variables: Sequence[str]) -> Monomial:
    """解析 `x1^2*y2` 形式的单项式；`1` 表示单位"""
    text = text.strip()
    exponents = [0] * len(variables)
    if text == "1":
        return tuple(exponents)
    if text == "0":
        raise LabelingError("标注不能为零")
    index = {name: i for i, name in enumerate(variables)}
    for factor in text.split("*"):
        match = _FACTOR.match(factor.strip())
        if not match:
            raise LabelingError(f"无法解析单项式因子: {factor!r}")
        name, power = match.group(1), match.group(2)
        if name not in index:
            raise LabelingError(f"未知变量: {name}")
        exponents[index[name]] += int(power) if power else 1
    return tuple(exponents)


def variables_of(texts: Sequence[str]) -> Tuple[str, ...]:
    """按首次出现的顺序收集单项式文本中的变量名"""
    names: List[str] = []
    for text in texts:
        if text.strip() in ("0", "1"):
            continue
        for factor in text.split("*"):
            match = _FACTOR.match(factor.strip())
            if match and match.group(1) not in names:
                names.append(match.group(1))
    return tuple(names)


@dataclass(frozen=True)
class Labeling:
    variables: Tuple[str, ...]
    labels: Mapping[str, Monomial] = field(default_factory=dict)
    sigma: Optional[Monomial] = None

    def label(self, arrow_id: str) -> Monomial:
        try:
            return self.labels[arrow_id]
        except KeyError:
            raise LabelingError(f"箭头 {arrow_id} 没有标注") from None

    def format(self, m: Monomial) -> str:
        return format_monomial(m, self.variables)

    @property
    def unit(self) -> Monomial:
        return unit_monomial(len(self.variables))


def tau_word(lab: Labeling, word: Sequence[str]) -> Monomial:
    image = [0] * len(lab.variables)
    for arrow_id in word:
        for i, e in enumerate(lab.label(arrow_id)):
            image[i] += e
    return tuple(image)


def tau_path(lab: Labeling, p: Union[PathWord, Sequence[str]]) -> Monomial:
    word = p.arrows if isinstance(p, PathWord) else p
    return tau_word(lab, word)


def build_labeling(q: TorusQuiver, variables: Sequence[str], labels: Mapping[str, Monomial]) -> Labeling:
    """检查每个箭头都有标注，并以第一个面的像作为 σ"""
    missing = [a for a in q.arrow_ids if a not in labels]
    if missing:
        raise LabelingError(f"以下箭头没有标注: {', '.join(missing)}")
    draft = Labeling(tuple(variables), dict(labels))
    sigma = tau_word(draft, q.faces[0].boundary) if q.faces else draft.unit
    return Labeling(tuple(variables), dict(labels), sigma)


def _displacement(q: TorusQuiver, arrow) -> Tuple[int, int]:
    grid = q.grid_map
    period = np.asarray(q.period, dtype=np.int64)
    delta = np.asarray(grid[arrow.head], dtype=np.int64) - np.asarray(grid[arrow.tail], dtype=np.int64)
    delta = delta + np.asarray(arrow.offset, dtype=np.int64) @ period
    return int(delta[0]), int(delta[1])


def square_labeling(q: TorusQuiver) -> Labeling:
    """按网格位移方向给每个箭头标注"""
    if not q.has_grid:
        raise UnsupportedEmbeddingError("square 标注需要每个顶点的网格坐标")
    moves = {a.id: _displacement(q, a) for a in q.arrows}
    directions = set(moves.values())

    for table in THREE_ORIENTATION_LABELS:
        if directions <= set(table):
            labels = {a: parse_monomial(table[d], THREE_VARIABLES) for a, d in moves.items()}
            logger.debug(f"{q.name} 使用三方向标注")
            return build_labeling(q, THREE_VARIABLES, labels)

    labels = {}
    for arrow_id, move in sorted(moves.items()):
        if move not in SQUARE_LABELS:
            raise UnsupportedEmbeddingError(f"箭头 {arrow_id} 的位移 {move} 不是网格方向")
        labels[arrow_id] = parse_monomial(SQUARE_LABELS[move], SQUARE_VARIABLES)
    return build_labeling(q, SQUARE_VARIABLES, labels)


@dataclass
class LabelingReport:
    sigma_uniform: bool
    relation_compatible: bool
    separation: str
    max_len: int
    separation_witness: Optional[Tuple[Word, Word]] = None
    face_images: Dict[int, Monomial] = field(default_factory=dict)

    @property
    def separation_ok(self) -> bool:
        return self.separation == VERIFIED


def check_separation(q: TorusQuiver, system: RewriteSystem, lab: Labeling, max_len: int,
                     budget: int = DEFAULT_BUDGET) -> Tuple[str, Optional[Tuple[Word, Word]]]:
    """端点、同调和像都相同的路径必须等价（长度不超过 max_len）"""
    groups: Dict[tuple, List[Word]] = defaultdict(list)
    for length in range(1, max_len + 1):
        for word in enumerate_paths(q, length):
            first, last = q.arrow(word[0]), q.arrow(word[-1])
            key = (first.tail, last.head, word_homology(q, word), tau_word(lab, word))
            groups[key].append(word)

    classes = ClassIndex(system, budget)
    try:
        for members in sorted(groups.values(), key=lambda ws: (len(ws[0]), ws[0])):
            if len(members) < 2:
                continue
            for other in members[1:]:
                if not classes.same_class(members[0], other):
                    return FAILED, (members[0], other)
    except BudgetExceededError:
        return INCONCLUSIVE, None
    return VERIFIED, None


def verify_labeling(q: TorusQuiver, rels: Sequence[Relation], lab: Labeling,
                    max_len: int = DEFAULT_SEPARATION_LEN, budget: int = DEFAULT_BUDGET) -> LabelingReport:
    face_images = {i: tau_word(lab, f.boundary) for i, f in enumerate(q.faces)}
    sigma_uniform = len(set(face_images.values())) <= 1
    relation_compatible = all(tau_word(lab, r.left) == tau_word(lab, r.right) for r in rels)

    system = RewriteSystem(q, rels)
    separation, witness = check_separation(q, system, lab, max_len, budget)
    if separation == FAILED:
        logger.info(f"标注不能分离 {' '.join(witness[0])} 与 {' '.join(witness[1])}")
    return LabelingReport(sigma_uniform, relation_compatible, separation, max_len, witness, face_images)

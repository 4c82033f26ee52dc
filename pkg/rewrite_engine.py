# 超势理想的重写引擎：路径等价判定与可消性反例搜索
import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from config import DEFAULT_BUDGET
from tiling_core import (
    Face, PathWord, TilingError, TorusQuiver, Word, enumerate_paths, make_path, word_homology,
)

logger = logging.getLogger(__name__)

EQUIVALENT = "equivalent"
INEQUIVALENT = "inequivalent"
BUDGET_EXCEEDED = "budget-exceeded"

NO_COUNTEREXAMPLE = "no-counterexample"
COUNTEREXAMPLE = "counterexample"
INCONCLUSIVE = "inconclusive"

SIDES = ("right", "left")


@dataclass(frozen=True)
class Relation:
    """d ≡ d′，其中 d·a 与 d′·a 是包含见证箭头 a 的两个面（按遍历顺序书写）"""
    left: Word
    right: Word
    witness: str


@dataclass(frozen=True)
class EquivClassQuery:
    p: PathWord
    q: PathWord
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget 必须至少为 1")


@dataclass(frozen=True)
class Counterexample:
    p: Word
    q: Word
    arrow: str
    side: str

    def describe(self) -> str:
        p, q = " ".join(self.p), " ".join(self.q)
        if self.side == "right":
            return f"({p}) {self.arrow} ≡ ({q}) {self.arrow} 但 {p} ≢ {q}"
        return f"{self.arrow} ({p}) ≡ {self.arrow} ({q}) 但 {p} ≢ {q}"


@dataclass
class CancellativityResult:
    verdict: str
    max_len: int
    checked_up_to: int
    counterexample: Optional[Counterexample] = None

    def summary(self) -> str:
        if self.verdict == NO_COUNTEREXAMPLE:
            return f"no counterexample up to {self.max_len}"
        if self.verdict == COUNTEREXAMPLE:
            ce = self.counterexample
            return (f"counterexample p = {' '.join(ce.p)}, q = {' '.join(ce.q)}, "
                    f"arrow = {ce.arrow}, side = {ce.side}")
        return f"inconclusive beyond length {self.checked_up_to}"


def superpotential_relations(q: TorusQuiver) -> List[Relation]:
    """每个箭头一条关系，按箭头编号排序；左边取正面，右边取负面"""
    relations = []
    for arrow_id in q.arrow_ids:
        positive = [f for f in q.faces if f.sign == 1 and arrow_id in f.boundary]
        negative = [f for f in q.faces if f.sign == -1 and arrow_id in f.boundary]
        if len(positive) != 1 or len(negative) != 1:
            raise TilingError(f"箭头 {arrow_id} 不恰好属于一个正面和一个负面")
        d = positive[0].rotated_to_end_with(arrow_id)[:-1]
        d_prime = negative[0].rotated_to_end_with(arrow_id)[:-1]
        relations.append(Relation(d, d_prime, arrow_id))
    logger.debug(f"生成 {len(relations)} 条超势关系")
    return relations


class BudgetExceededError(TilingError):
    """等价类的大小超出预算"""


class RewriteSystem:
    """关系的替换索引：把任一边替换为另一边（双向）"""

    def __init__(self, q: TorusQuiver, relations: Iterable[Relation]):
        self.quiver = q
        self.rules: Dict[Word, List[Word]] = defaultdict(list)
        for rel in relations:
            if word_homology(q, rel.left) != word_homology(q, rel.right):
                raise TilingError(f"关系 {rel.witness} 两边同调不同")
            if rel.left == rel.right:
                continue
            if rel.right not in self.rules[rel.left]:
                self.rules[rel.left].append(rel.right)
            if rel.left not in self.rules[rel.right]:
                self.rules[rel.right].append(rel.left)
        for targets in self.rules.values():
            targets.sort()
        self.lengths = sorted({len(w) for w in self.rules})
        # 收缩箭头所在的两个面可能长度不同，此时关系不保持长度
        self.length_preserving = all(
            len(w) == len(t) for w, targets in self.rules.items() for t in targets)

    def neighbors(self, word: Word) -> Iterable[Word]:
        n = len(word)
        for i in range(n):
            for length in self.lengths:
                if i + length > n:
                    break
                sub = word[i:i + length]
                for replacement in self.rules.get(sub, ()):
                    yield word[:i] + replacement + word[i + length:]


class ClassIndex:
    """按需用广度优先搜索展开整个等价类并缓存：路径 -> 类代表（(长度, 字典序) 最小者）"""

    def __init__(self, system: RewriteSystem, budget: int = DEFAULT_BUDGET):
        self.system = system
        self.budget = budget
        self._rep: Dict[Word, Word] = {}

    def class_of(self, word: Word) -> Word:
        rep = self._rep.get(word)
        if rep is not None:
            return rep
        members = {word}
        queue = deque([word])
        while queue:
            current = queue.popleft()
            for neighbor in self.system.neighbors(current):
                if neighbor not in members:
                    members.add(neighbor)
                    if len(members) > self.budget:
                        raise BudgetExceededError(f"等价类大小超出预算 {self.budget}")
                    queue.append(neighbor)
        rep = min(members, key=lambda w: (len(w), w))
        for member in members:
            self._rep[member] = rep
        return rep

    def same_class(self, left: Word, right: Word) -> bool:
        return self.class_of(left) == self.class_of(right)


def _quick_inequivalent(q: TorusQuiver, system: RewriteSystem, p: PathWord, r: PathWord) -> bool:
    if system.length_preserving and p.length != r.length:
        return True
    return (p.tail != r.tail or p.head != r.head
            or word_homology(q, p.arrows) != word_homology(q, r.arrows))


def paths_equivalent(q: TorusQuiver, rels: Sequence[Relation], query: EquivClassQuery,
                     system: Optional[RewriteSystem] = None) -> str:
    """
    在重写图上做广度优先搜索。

    关系保持提升端点（通常也保持长度），所以 p 的等价类有限；在预算内搜完整个类
    仍未遇到 q 才返回 inequivalent，否则返回 budget-exceeded。
    """
    p, target = query.p, query.q
    system = system or RewriteSystem(q, rels)
    if _quick_inequivalent(q, system, p, target):
        return INEQUIVALENT
    if p.arrows == target.arrows:
        return EQUIVALENT

    visited = {p.arrows}
    queue = deque([p.arrows])
    while queue:
        word = queue.popleft()
        for neighbor in system.neighbors(word):
            if neighbor in visited:
                continue
            if neighbor == target.arrows:
                return EQUIVALENT
            visited.add(neighbor)
            if len(visited) > query.budget:
                logger.debug(f"等价判定超出预算 {query.budget}")
                return BUDGET_EXCEEDED
            queue.append(neighbor)
    return INEQUIVALENT


def words_equivalent(q: TorusQuiver, system: RewriteSystem, left: Sequence[str], right: Sequence[str],
                     budget: int = DEFAULT_BUDGET) -> str:
    """对两个箭头序列直接判定等价（序列须非空且可复合）"""
    p = make_path(q, left)
    r = make_path(q, right)
    return paths_equivalent(q, [], EquivClassQuery(p, r, budget), system=system)


@dataclass
class TwoCycleElimination:
    """删去长度为 2 的面后的箭图，以及被删箭头到剩余箭头路径的替换"""
    quiver: TorusQuiver
    substitutions: Dict[str, Word] = field(default_factory=dict)

    def reduce(self, word: Sequence[str]) -> Word:
        return tuple(b for a in word for b in self.substitutions.get(a, (a,)))


def two_cycle_elimination(q: TorusQuiver) -> TwoCycleElimination:
    """
    删去长度为 2 的面 (a b)：a 的另一个面 X·a 与 b 的另一个面 b·Y 合并成 X·Y，
    并记录 a ≡ Y、b ≡ X（分别是 a、b 的关系）。重复直到没有长度为 2 的面，
    最后把替换展开到只含剩余的箭头。
    """
    faces: List[Face] = list(q.faces)
    steps: List[Tuple[str, Word]] = []
    while True:
        twos = sorted((i for i, f in enumerate(faces) if len(f.boundary) == 2),
                      key=lambda i: (faces[i].canonical(), faces[i].sign))
        if not twos:
            break
        index = twos[0]
        a, b = faces[index].canonical()
        other_a = [i for i, f in enumerate(faces) if i != index and a in f.boundary]
        other_b = [i for i, f in enumerate(faces) if i != index and b in f.boundary]
        if len(other_a) != 1 or len(other_b) != 1 or other_a[0] == other_b[0]:
            raise TilingError(f"无法删除二圈 ({a} {b})：相邻面不合法")
        face_a, face_b = faces[other_a[0]], faces[other_b[0]]
        x_part = face_a.rotated_to_end_with(a)[:-1]
        y_part = face_b.rotated_to_start_with(b)[1:]
        if len(x_part) + len(y_part) < 2:
            raise TilingError(f"删除二圈 ({a} {b}) 后得到长度小于 2 的面")
        faces = [f for i, f in enumerate(faces) if i not in (index, other_a[0], other_b[0])]
        faces.append(Face(face_a.sign, x_part + y_part))
        steps.extend(((a, y_part), (b, x_part)))
        logger.debug(f"删除二圈 ({a} {b})")

    if not steps:
        return TwoCycleElimination(q)
    # 每一步的替换只含当时剩余的箭头，倒序展开
    substitutions: Dict[str, Word] = {}
    for arrow_id, word in reversed(steps):
        substitutions[arrow_id] = tuple(c for a in word for c in substitutions.get(a, (a,)))
    arrows = tuple(arrow for arrow in q.arrows if arrow.id not in substitutions)
    logger.info(f"删除了 {len(steps) // 2} 个二圈")
    reduced = TorusQuiver(q.vertices, arrows, tuple(faces), name=q.name, grid=q.grid, period=q.period)
    return TwoCycleElimination(reduced, substitutions)


class ReducedClassIndex(ClassIndex):
    """先做质量项替换，再在删去二圈后的箭图中取等价类；类代表是替换后的路径"""

    def __init__(self, system: RewriteSystem, elimination: TwoCycleElimination, reduced: ClassIndex):
        super().__init__(system, reduced.budget)
        self.elimination = elimination
        self.reduced = reduced

    def class_of(self, word: Word) -> Word:
        return self.reduced.class_of(self.elimination.reduce(word))


def _elimination_is_faithful(q: TorusQuiver, system: RewriteSystem, rels: Sequence[Relation],
                             elimination: TwoCycleElimination, reduced: ClassIndex, budget: int) -> bool:
    """
    替换 φ 在两边诱导同一个等价关系，当且仅当下面三条都成立时才使用：
    每条关系 d ≡ d′ 有 φ(d) ≡ φ(d′)；删去二圈后的每条关系在原箭图中成立；
    每个被删箭头 a ≡ φ(a)。
    """
    small = elimination.quiver
    try:
        for rel in rels:
            if not reduced.same_class(elimination.reduce(rel.left), elimination.reduce(rel.right)):
                return False
        for rel in superpotential_relations(small):
            if words_equivalent(q, system, rel.left, rel.right, budget) != EQUIVALENT:
                return False
        for arrow_id, word in elimination.substitutions.items():
            if words_equivalent(q, system, (arrow_id,), word, budget) != EQUIVALENT:
                return False
    except TilingError as e:
        logger.debug(f"二圈替换不可用: {e}")
        return False
    return True


def class_index_for(q: TorusQuiver, rels: Sequence[Relation], budget: int = DEFAULT_BUDGET) -> ClassIndex:
    """有长度为 2 的面时在删去二圈后的箭图中判定等价；替换不忠实时退回原箭图"""
    system = RewriteSystem(q, rels)
    try:
        elimination = two_cycle_elimination(q)
        if not elimination.substitutions:
            return ClassIndex(system, budget)
        small = elimination.quiver
        reduced = ClassIndex(RewriteSystem(small, superpotential_relations(small)), budget)
    except TilingError as e:
        logger.debug(f"二圈替换不可用: {e}")
        return ClassIndex(system, budget)
    if _elimination_is_faithful(q, system, rels, elimination, reduced, budget):
        logger.info(f"{q.name}: 在删去 {len(elimination.substitutions) // 2} 个二圈的箭图中判定等价")
        return ReducedClassIndex(system, elimination, reduced)
    logger.warning(f"⚠️ {q.name}: 二圈替换与原关系不一致，直接在原箭图中判定")
    return ClassIndex(system, budget)


def cancellativity_search(q: TorusQuiver, rels: Sequence[Relation], max_len: int,
                          budget: int = DEFAULT_BUDGET) -> CancellativityResult:
    """
    搜索 p·a ≡ q·a（或 a·p ≡ a·q）但 p ≢ q 的最小反例。

    顺序：路径长度，然后 p、q（按 (长度, 字典序)），然后箭头，然后 right/left。
    第 ℓ 轮考察所有长度不超过 ℓ 的路径。≡ 是同余，所以路径的类由前缀的类代表
    接上最后一个箭头得到，分组也只需对每个类代表做一次；每个类记住其中最小的路径。
    路径数或类大小超出预算时返回 inconclusive，不会当作没有反例。
    """
    if max_len < 1:
        raise ValueError("max_len 必须为正整数")
    classes = class_index_for(q, rels, budget)
    logger.info(f"开始可消性搜索: {q.name}, max_len={max_len}")

    smallest: Dict[Word, Word] = {}
    ends: Dict[Word, Tuple[str, str]] = {}
    extended: Dict[Tuple[Word, str, int], Word] = {}
    previous: Dict[Word, Word] = {}
    for length in range(1, max_len + 1):
        current: Dict[Word, Word] = {}
        best = None
        try:
            for word in enumerate_paths(q, length):
                if len(current) >= budget:
                    logger.warning(f"⚠️ 长度 {length} 的路径数超出预算 {budget}")
                    return CancellativityResult(INCONCLUSIVE, max_len, length - 1)
                if length == 1:
                    rep = classes.class_of(word)
                else:
                    rep = classes.class_of(previous[word[:-1]] + word[-1:])
                current[word] = rep
                if rep not in smallest or (len(word), word) < (len(smallest[rep]), smallest[rep]):
                    smallest[rep] = word
                    ends[rep] = (q.arrow(word[0]).tail, q.arrow(word[-1]).head)
            previous = current

            for arrow_id in q.arrow_ids:
                arrow = q.arrow(arrow_id)
                for side_rank, side in enumerate(SIDES):
                    groups: Dict[Word, List[Word]] = defaultdict(list)
                    for rep, (tail, head) in ends.items():
                        if side == "right" and head != arrow.tail:
                            continue
                        if side == "left" and tail != arrow.head:
                            continue
                        key = (rep, arrow_id, side_rank)
                        target = extended.get(key)
                        if target is None:
                            word = rep + (arrow_id,) if side == "right" else (arrow_id,) + rep
                            target = extended[key] = classes.class_of(word)
                        groups[target].append(smallest[rep])
                    for members in groups.values():
                        if len(members) < 2:
                            continue
                        members.sort(key=lambda w: (len(w), w))
                        first, partner = members[0], members[1]
                        candidate = ((len(first), first), (len(partner), partner), arrow_id, side_rank)
                        if best is None or candidate < best:
                            best = candidate
        except BudgetExceededError as e:
            logger.warning(f"⚠️ {e}")
            return CancellativityResult(INCONCLUSIVE, max_len, length - 1)

        if best is not None:
            (_, p), (_, other), arrow_id, side_rank = best
            ce = Counterexample(p, other, arrow_id, SIDES[side_rank])
            logger.info(f"❌ 找到可消性反例: {ce.describe()}")
            return CancellativityResult(COUNTEREXAMPLE, max_len, length, ce)

    logger.info(f"✅ 长度 {max_len} 以内没有可消性反例")
    return CancellativityResult(NO_COUNTEREXAMPLE, max_len, max_len)


def unit_cycles_at(q: TorusQuiver, vertex: str) -> List[Word]:
    """以 vertex 为基点的所有单位圈（各面的旋转）"""
    cycles = set()
    for face in q.faces:
        for rotation in face.rotations():
            if q.arrow(rotation[0]).tail == vertex:
                cycles.add(rotation)
    return sorted(cycles)


def unit_cycle_at(q: TorusQuiver, vertex: str) -> PathWord:
    cycles = unit_cycles_at(q, vertex)
    if not cycles:
        raise TilingError(f"顶点 {vertex} 不在任何面上")
    return make_path(q, cycles[0], base=vertex)


def center_candidate_u(q: TorusQuiver) -> Dict[str, PathWord]:
    return {v: unit_cycle_at(q, v) for v in q.vertices}


def check_cycle_family_central(q: TorusQuiver, system: RewriteSystem, family: Dict[str, Sequence[str]],
                               budget: int = DEFAULT_BUDGET) -> Dict[str, str]:
    """对每个箭头 a 判定 c_{t(a)}·a ≡ a·c_{h(a)}（遍历顺序）"""
    verdicts = {}
    for arrow_id in q.arrow_ids:
        arrow = q.arrow(arrow_id)
        left = tuple(family[arrow.tail]) + (arrow_id,)
        right = (arrow_id,) + tuple(family[arrow.head])
        verdicts[arrow_id] = words_equivalent(q, system, left, right, budget)
    return verdicts


def check_unit_cycle_centrality(q: TorusQuiver, rels: Sequence[Relation],
                                budget: int = DEFAULT_BUDGET) -> Dict[str, str]:
    system = RewriteSystem(q, rels)
    family = {v: u.arrows for v, u in center_candidate_u(q).items()}
    return check_cycle_family_central(q, system, family, budget)


def check_unit_cycles_equivalent(q: TorusQuiver, rels: Sequence[Relation], vertex: str,
                                 budget: int = DEFAULT_BUDGET) -> str:
    """同一顶点上的任意两个单位圈是否等价"""
    system = RewriteSystem(q, rels)
    cycles = unit_cycles_at(q, vertex)
    verdict = EQUIVALENT
    for other in cycles[1:]:
        result = words_equivalent(q, system, cycles[0], other, budget)
        if result == INEQUIVALENT:
            return INEQUIVALENT
        if result == BUDGET_EXCEEDED:
            verdict = BUDGET_EXCEEDED
    return verdict

# 中心计算模块：S、R 的单项式生成元与中心元素
"""
通过有界枚举计算

    S = k[ ∪_i τ̄(e_i A e_i) ]      R = k[ ∩_i τ̄(e_i A e_i) ]

以及 R 的 k + J·S 表示。某个单项式是否是某顶点处圈的像，用按整除剪枝的
搜索精确判定：正长度的圈的像都不是 1，所以剪枝后的状态空间有限。
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from config import DEFAULT_BUDGET, DEFAULT_LEN_BOUND, MAX_CENTRAL_ALTERNATIVES
from impression import (
    Labeling, Monomial, format_monomial, format_monomials, mono_divides, mono_mul, mono_quotient,
    sort_monomials,
)
from rewrite_engine import (
    BUDGET_EXCEEDED, INEQUIVALENT, Relation, RewriteSystem, check_cycle_family_central,
    words_equivalent,
)
from tiling_core import TorusQuiver, Vector, Word, add_vectors

logger = logging.getLogger(__name__)

EQUAL_TO_S = "equal-to-S"
PROPER_SUBRING = "proper-subring"
INCONCLUSIVE = "inconclusive"

EQUAL = "equal"
DIFFER = "differ"

CENTRAL = "central"
NOT_CENTRAL = "not-central"


class MonoidMembership:
    """由有限个单项式生成的幺半群的成员判定（带缓存）"""

    def __init__(self, generators: Iterable[Monomial]):
        self.generators = sort_monomials(generators)
        self._cache: Dict[Monomial, bool] = {}

    def __contains__(self, m: Monomial) -> bool:
        if not any(m):
            return True
        cached = self._cache.get(m)
        if cached is not None:
            return cached
        result = False
        for g in self.generators:
            if any(g) and mono_divides(g, m) and mono_quotient(m, g) in self:
                result = True
                break
        self._cache[m] = result
        return result

    def divides(self, a: Monomial, b: Monomial) -> bool:
        """a | b 在幺半群中成立：b = a·c 且 c 在幺半群里"""
        return mono_divides(a, b) and mono_quotient(b, a) in self


def minimal_generators(elements: Iterable[Monomial]) -> List[Monomial]:
    """按次数从小到大贪心保留不能由已保留元素生成的元素"""
    kept: List[Monomial] = []
    for m in sort_monomials(elements):
        if not any(m):
            continue
        if m not in MonoidMembership(kept):
            kept.append(m)
    return sort_monomials(kept)


def cycle_images(q: TorusQuiver, lab: Labeling, vertex: str, len_bound: int) -> Dict[Monomial, Word]:
    """
    顶点处长度不超过 len_bound 的圈的像，每个像对应 (长度, 字典序) 最小的圈。
    状态为 (顶点, 像)，同一状态只保留第一次到达的路径。
    """
    unit = lab.unit
    seen = {(vertex, unit)}
    frontier: List[Tuple[str, Monomial, Word]] = [(vertex, unit, ())]
    images: Dict[Monomial, Word] = {}
    for _ in range(len_bound):
        next_frontier = []
        for current, image, word in frontier:
            for arrow in q.out_arrows(current):
                new_image = mono_mul(image, lab.label(arrow.id))
                state = (arrow.head, new_image)
                if state in seen:
                    continue
                seen.add(state)
                new_word = word + (arrow.id,)
                if arrow.head == vertex and new_image not in images:
                    images[new_image] = new_word
                next_frontier.append((arrow.head, new_image, new_word))
        frontier = next_frontier
        if not frontier:
            break
    return images


def find_cycle_with_image(q: TorusQuiver, lab: Labeling, target: Monomial, vertex: Optional[str] = None,
                          homology: Optional[Vector] = None) -> Optional[Word]:
    """
    精确搜索像为 target 的正长度圈（可限定基点与同调），返回 (长度, 字典序) 最小者。
    只走像整除 target 的路径。
    """
    starts = [vertex] if vertex is not None else sorted(q.vertices)
    track = homology is not None
    for start in starts:
        unit = lab.unit
        origin = (start, unit, (0, 0) if track else None)
        seen = {origin}
        queue = deque([(origin, ())])
        while queue:
            (current, image, hom), word = queue.popleft()
            for arrow in q.out_arrows(current):
                new_image = mono_mul(image, lab.label(arrow.id))
                if not mono_divides(new_image, target):
                    continue
                new_hom = add_vectors(hom, arrow.offset) if track else None
                new_word = word + (arrow.id,)
                if arrow.head == start and new_image == target and (not track or new_hom == homology):
                    return new_word
                state = (arrow.head, new_image, new_hom)
                if state in seen:
                    continue
                seen.add(state)
                queue.append((state, new_word))
    return None


def cycle_in_monoid(q: TorusQuiver, lab: Labeling, vertex: str, m: Monomial) -> bool:
    """m 是否属于 τ̄(e_v A e_v)；单位元总是属于（空路径）"""
    if not any(m):
        return True
    return find_cycle_with_image(q, lab, m, vertex=vertex) is not None


def in_every_vertex_monoid(q: TorusQuiver, lab: Labeling, m: Monomial) -> bool:
    return all(cycle_in_monoid(q, lab, v, m) for v in sorted(q.vertices))


def cycles_with_image(q: TorusQuiver, lab: Labeling, vertex: str, target: Monomial, limit: int) -> List[Word]:
    """按 (长度, 字典序) 列出顶点处像为 target 的圈，最多 limit 个"""
    found: List[Word] = []
    frontier: List[Tuple[str, Monomial, Word]] = [(vertex, lab.unit, ())]
    while frontier and len(found) < limit:
        next_frontier = []
        for current, image, word in frontier:
            for arrow in q.out_arrows(current):
                new_image = mono_mul(image, lab.label(arrow.id))
                if not mono_divides(new_image, target):
                    continue
                new_word = word + (arrow.id,)
                if arrow.head == vertex and new_image == target:
                    found.append(new_word)
                    if len(found) >= limit:
                        return found
                next_frontier.append((arrow.head, new_image, new_word))
        frontier = next_frontier
    return found


@dataclass
class CycleMonoid:
    vertex: str
    generators: List[Monomial]
    degree_bound: int
    elements: Dict[Monomial, Word] = field(default_factory=dict, repr=False)


@dataclass
class MonoidAlgebra:
    tag: str
    variables: Tuple[str, ...]
    generators: List[Monomial]
    len_bound: int

    def formatted(self) -> str:
        return format_monomials(self.generators, self.variables)

    def membership(self) -> MonoidMembership:
        return MonoidMembership(self.generators)


@dataclass
class CenterResult:
    """R 的计算结果：verdict 为 equal-to-S / proper-subring / inconclusive"""
    S: MonoidAlgebra
    ideal: List[Monomial]
    verdict: str
    len_bound: int
    reason: str = ""

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.S.variables

    def r_line(self) -> str:
        if self.verdict == EQUAL_TO_S:
            return "R = S"
        if self.verdict == PROPER_SUBRING:
            return f"R = k + ({format_monomials(self.ideal, self.variables)})S"
        return f"R = inconclusive at len-bound {self.len_bound}"


def cycle_monoid(q: TorusQuiver, lab: Labeling, vertex: str, len_bound: int = DEFAULT_LEN_BOUND) -> CycleMonoid:
    images = cycle_images(q, lab, vertex, len_bound)
    return CycleMonoid(vertex, minimal_generators(images), len_bound, images)


def vertex_monoids(q: TorusQuiver, lab: Labeling, len_bound: int) -> Dict[str, CycleMonoid]:
    logger.debug(f"枚举 {q.name} 各顶点的圈, len_bound={len_bound}")
    return {v: cycle_monoid(q, lab, v, len_bound) for v in sorted(q.vertices)}


def compute_S(q: TorusQuiver, lab: Labeling, len_bound: int = DEFAULT_LEN_BOUND,
              monoids: Optional[Dict[str, CycleMonoid]] = None) -> MonoidAlgebra:
    monoids = monoids or vertex_monoids(q, lab, len_bound)
    union = set()
    for monoid in monoids.values():
        union.update(monoid.generators)
    return MonoidAlgebra("S", lab.variables, minimal_generators(union), len_bound)


def _proper_divisors(m: Monomial, membership: MonoidMembership) -> List[Monomial]:
    """m 在幺半群中的真因子（不含 1 与 m 本身）"""
    divisors = []
    for d in product(*(range(e + 1) for e in m)):
        if not any(d) or d == m:
            continue
        if d in membership and mono_quotient(m, d) in membership:
            divisors.append(d)
    return divisors


def compute_R(q: TorusQuiver, lab: Labeling, len_bound: int = DEFAULT_LEN_BOUND,
              monoids: Optional[Dict[str, CycleMonoid]] = None) -> CenterResult:
    """
    求 R 并尝试写成 k + J·S。

    J 取枚举到的交集中非单位元的 S-整除极小元；J 的元素、J 中元素的真因子
    以及每个乘积 j·s（s 取界限内枚举到的全部 S 元素）是否在 R 中都精确判定。
    """
    monoids = monoids or vertex_monoids(q, lab, len_bound)
    S = compute_S(q, lab, len_bound, monoids)
    membership = S.membership()

    candidates = None
    for monoid in monoids.values():
        elements = set(monoid.elements)
        candidates = elements if candidates is None else candidates & elements
    candidates = {m for m in (candidates or set()) if any(m)}

    if all(in_every_vertex_monoid(q, lab, g) for g in S.generators):
        logger.info(f"✅ {q.name}: 所有顶点的圈幺半群一致，R = S")
        return CenterResult(S, [], EQUAL_TO_S, len_bound)

    while True:
        ordered = sort_monomials(candidates)
        ideal = [m for m in ordered
                 if not any(j != m and membership.divides(j, m) for j in ordered)]
        missed = [d for j in ideal for d in _proper_divisors(j, membership)
                  if d not in candidates and in_every_vertex_monoid(q, lab, d)]
        if not missed:
            break
        # 界限内漏掉的更小元素，加入后重新取极小元
        candidates.update(missed)

    if not ideal:
        return CenterResult(S, [], INCONCLUSIVE, len_bound, "界限内没有找到 R 的非单位元")

    # 界限内枚举到的 S 元素（各顶点圈的像）加上生成元
    s_elements = set(S.generators)
    for monoid in monoids.values():
        s_elements.update(m for m in monoid.elements if any(m))
    checked = set()
    for j in ideal:
        for s in sort_monomials(s_elements):
            js = mono_mul(j, s)
            if js in checked or js in candidates:
                continue
            checked.add(js)
            if not in_every_vertex_monoid(q, lab, js):
                reason = f"{lab.format(j)} * {lab.format(s)} 不在 R 中"
                logger.warning(f"⚠️ {q.name}: R 不是 k + J·S 形式 ({reason})")
                return CenterResult(S, ideal, INCONCLUSIVE, len_bound, reason)

    logger.info(f"📊 {q.name}: R = k + J·S, J 有 {len(ideal)} 个生成元")
    return CenterResult(S, ideal, PROPER_SUBRING, len_bound)


@dataclass
class SComparison:
    verdict: str
    S: MonoidAlgebra
    S_prime: MonoidAlgebra
    witness: Optional[Monomial] = None
    side: str = ""

    def line(self) -> str:
        if self.verdict == EQUAL:
            return "S = S': equal"
        if self.verdict == DIFFER:
            where = "S' \\ S" if self.side == "S'" else "S \\ S'"
            return f"S = S': differ, witness {format_monomial(self.witness, self.S.variables)} in {where}"
        return f"S = S': inconclusive at len-bound {self.S.len_bound}"


def compare_S_Sprime(cmap, lab: Labeling, lab_prime: Labeling,
                     len_bound: int = DEFAULT_LEN_BOUND) -> SComparison:
    """比较收缩前后的 S 与 S'；差异的见证会用精确搜索确认"""
    S = compute_S(cmap.source, lab, len_bound)
    S_prime = compute_S(cmap.target, lab_prime, len_bound)
    in_S, in_S_prime = S.membership(), S_prime.membership()

    for g in S_prime.generators:
        if g not in in_S:
            if find_cycle_with_image(cmap.source, lab, g) is not None:
                return SComparison(INCONCLUSIVE, S, S_prime)
            logger.info(f"❌ S' 的生成元 {lab_prime.format(g)} 不在 S 中")
            return SComparison(DIFFER, S, S_prime, g, "S'")
    for g in S.generators:
        if g not in in_S_prime:
            if find_cycle_with_image(cmap.target, lab_prime, g) is not None:
                return SComparison(INCONCLUSIVE, S, S_prime)
            return SComparison(DIFFER, S, S_prime, g, "S")
    return SComparison(EQUAL, S, S_prime)


@dataclass
class CentralElement:
    gamma: Monomial
    cycles: Dict[str, Word]
    verdict: str
    alternatives_checked: int = 0
    failures: List[str] = field(default_factory=list)


def central_elements(q: TorusQuiver, rels: Sequence[Relation], lab: Labeling,
                     gammas: Optional[Sequence[Monomial]] = None, len_bound: int = DEFAULT_LEN_BOUND,
                     budget: int = DEFAULT_BUDGET) -> List[CentralElement]:
    """
    对每个 γ 在各顶点取像为 γ 的最小圈 c_i，并用重写引擎确认 c_{t(a)}·a ≡ a·c_{h(a)}。
    同一顶点上像为 γ 的其他圈（最多若干个）也要与 c_i 等价。
    """
    if gammas is None:
        center = compute_R(q, lab, len_bound)
        gammas = center.S.generators if center.verdict == EQUAL_TO_S else center.ideal
        gammas = sort_monomials(list(gammas) + [lab.sigma])

    system = RewriteSystem(q, rels)
    results = []
    for gamma in gammas:
        cycles = {}
        for v in sorted(q.vertices):
            word = find_cycle_with_image(q, lab, gamma, vertex=v)
            if word is None:
                break
            cycles[v] = word
        if len(cycles) != len(q.vertices):
            missing = sorted(set(q.vertices) - set(cycles))
            results.append(CentralElement(gamma, cycles, INCONCLUSIVE,
                                          failures=[f"顶点 {', '.join(missing)} 没有像为该单项式的圈"]))
            continue

        failures = []
        verdict = CENTRAL
        checks = check_cycle_family_central(q, system, cycles, budget)
        for arrow_id, result in checks.items():
            if result == INEQUIVALENT:
                failures.append(f"箭头 {arrow_id} 不交换")
            elif result == BUDGET_EXCEEDED:
                verdict = INCONCLUSIVE

        checked = 0
        for v, chosen in cycles.items():
            for other in cycles_with_image(q, lab, v, gamma, MAX_CENTRAL_ALTERNATIVES + 1):
                if other == chosen:
                    continue
                checked += 1
                result = words_equivalent(q, system, chosen, other, budget)
                if result == INEQUIVALENT:
                    failures.append(f"顶点 {v} 上 {' '.join(other)} 与 {' '.join(chosen)} 不等价")
                elif result == BUDGET_EXCEEDED:
                    verdict = INCONCLUSIVE

        if failures:
            logger.warning(f"❌ {lab.format(gamma)} 的圈族不是中心元素: {failures[0]}")
            verdict = NOT_CENTRAL
        results.append(CentralElement(gamma, cycles, verdict, checked, failures))
    return results

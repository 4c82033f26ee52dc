# 箭头收缩（Higgsing）与充分性检查
import logging
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations, product
from math import atan2, gcd
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from config import DEFAULT_BUDGET, DEFAULT_LEN_BOUND, DEFAULT_SEPARATION_LEN, MAX_WITNESSES_PER_RAY
from impression import Labeling, LabelingError, Monomial, build_labeling, mono_divides, mono_mul
from rewrite_engine import (
    BudgetExceededError, ClassIndex, RewriteSystem, superpotential_relations, two_cycle_elimination,
)
from tiling_core import (
    Arrow, Face, MalformedInputError, TilingError, TorusQuiver, Vector, Word, ZERO, add_vectors,
    enumerate_paths, word_homology,
)
from toric_center import compute_S, find_cycle_with_image

logger = logging.getLogger(__name__)

HOLDS = "holds"
NOT_APPLICABLE = "not-applicable"

VERIFIED = "verified"
FAILED = "failed"
INCONCLUSIVE = "inconclusive"


class InvalidContractionError(TilingError):
    """收缩会把正长度的圈压成顶点，或无法重新规范偏移量"""


@dataclass
class ContractionMap:
    source: TorusQuiver
    contracted: FrozenSet[str]
    vertex_merge: Dict[str, str]
    target: TorusQuiver
    arrow_image: Dict[str, str]
    potentials: Dict[str, Vector] = field(default_factory=dict)

    def psi_vertex(self, vertex: str) -> str:
        return self.vertex_merge[vertex]

    def psi_word(self, word: Sequence[str]) -> Word:
        """ψ：删去被收缩的箭头（空结果表示 ψ 的像是一个顶点）"""
        return tuple(self.arrow_image[a] for a in word if a not in self.contracted)

    def regauged_homology(self, word: Sequence[str]) -> Vector:
        """重新规范后路径的同调：原同调 + pot(尾) - pot(头)"""
        homology = word_homology(self.source, word)
        tail = self.source.arrow(word[0]).tail
        head = self.source.arrow(word[-1]).head
        pt, ph = self.potentials[tail], self.potentials[head]
        return (homology[0] + pt[0] - ph[0], homology[1] + pt[1] - ph[1])


def contract(q: TorusQuiver, contracted: Iterable[str], name: Optional[str] = None) -> ContractionMap:
    """
    收缩 Q₁* 中的箭头：合并其端点（代表元取编号最小的顶点），删去这些箭头，
    并按生成树给每个顶点一个势，使被收缩箭头的偏移量变为 (0,0)。
    """
    contracted = frozenset(contracted)
    unknown = sorted(a for a in contracted if not q.has_arrow(a))
    if unknown:
        raise MalformedInputError(f"收缩引用了未知箭头: {', '.join(unknown)}")

    directed = nx.MultiDiGraph()
    directed.add_nodes_from(q.vertices)
    for arrow_id in sorted(contracted):
        arrow = q.arrow(arrow_id)
        directed.add_edge(arrow.tail, arrow.head, key=arrow_id)
    if not nx.is_directed_acyclic_graph(directed):
        cycle = [key for _, _, key in nx.find_cycle(directed)]
        raise InvalidContractionError(f"被收缩的箭头构成有向圈 {' '.join(cycle)}，正长度的圈会变成顶点")

    tree = nx.Graph()
    tree.add_nodes_from(q.vertices)
    for arrow_id in sorted(contracted):
        arrow = q.arrow(arrow_id)
        if not tree.has_edge(arrow.tail, arrow.head):
            tree.add_edge(arrow.tail, arrow.head, arrow=arrow_id)

    vertex_merge: Dict[str, str] = {}
    potentials: Dict[str, Vector] = {}
    for component in nx.connected_components(tree):
        rep = min(component)
        potentials[rep] = ZERO
        for u, v in nx.bfs_edges(tree, rep):
            arrow = q.arrow(tree[u][v]["arrow"])
            if arrow.tail == u:
                potentials[v] = add_vectors(potentials[u], arrow.offset)
            else:
                potentials[v] = (potentials[u][0] - arrow.offset[0], potentials[u][1] - arrow.offset[1])
        for vertex in component:
            vertex_merge[vertex] = rep

    for arrow_id in sorted(contracted):
        arrow = q.arrow(arrow_id)
        if add_vectors(potentials[arrow.tail], arrow.offset) != potentials[arrow.head]:
            raise InvalidContractionError(f"无法重新规范：被收缩的箭头 {arrow_id} 处在同调非平凡的圈上")

    arrows = []
    arrow_image = {}
    for arrow in q.arrows:
        if arrow.id in contracted:
            continue
        pt, ph = potentials[arrow.tail], potentials[arrow.head]
        offset = (arrow.offset[0] + pt[0] - ph[0], arrow.offset[1] + pt[1] - ph[1])
        arrows.append(Arrow(arrow.id, vertex_merge[arrow.tail], vertex_merge[arrow.head], offset))
        arrow_image[arrow.id] = arrow.id

    faces = []
    for face in q.faces:
        boundary = tuple(a for a in face.boundary if a not in contracted)
        if len(boundary) < 2:
            raise InvalidContractionError(f"面 {' '.join(face.boundary)} 收缩后长度小于 2")
        faces.append(Face(face.sign, boundary))

    vertices = tuple(sorted(set(vertex_merge.values())))
    grid = None
    if q.grid is not None:
        grid = tuple((v, q.grid_map[v]) for v in vertices)
    target = TorusQuiver(vertices, tuple(arrows), tuple(faces), name=name or f"{q.name}'",
                         grid=grid, period=q.period)
    logger.info(f"收缩 {len(contracted)} 个箭头: {len(q.vertices)} 个顶点 -> {len(vertices)} 个顶点")
    return ContractionMap(q, contracted, vertex_merge, target, arrow_image, potentials)


def remove_two_cycles(q: TorusQuiver) -> TorusQuiver:
    """删去全部长度为 2 的面（合并规则见 two_cycle_elimination）；没有时原样返回"""
    return two_cycle_elimination(q).quiver


def check_two_cycle_removal(q: TorusQuiver, reduced: TorusQuiver, max_len: int = DEFAULT_SEPARATION_LEN,
                            budget: int = DEFAULT_BUDGET) -> Tuple[str, Optional[Tuple[Word, Word]]]:
    """在长度界内比较 reduced 中的路径在两个箭图里的等价关系是否一致"""
    full = ClassIndex(RewriteSystem(q, superpotential_relations(q)), budget)
    small = ClassIndex(RewriteSystem(reduced, superpotential_relations(reduced)), budget)
    groups: Dict[tuple, List[Word]] = {}
    for length in range(1, max_len + 1):
        for word in enumerate_paths(reduced, length):
            key = (reduced.arrow(word[0]).tail, reduced.arrow(word[-1]).head, word_homology(reduced, word))
            groups.setdefault(key, []).append(word)
    try:
        for members in groups.values():
            # 两边的类代表必须一一对应
            forward: Dict[Word, Word] = {}
            backward: Dict[Word, Word] = {}
            for word in members:
                big, little = full.class_of(word), small.class_of(word)
                if forward.setdefault(big, word) != word and small.class_of(forward[big]) != little:
                    return FAILED, (forward[big], word)
                if backward.setdefault(little, word) != word and full.class_of(backward[little]) != big:
                    return FAILED, (backward[little], word)
    except BudgetExceededError:
        return INCONCLUSIVE, None
    return VERIFIED, None


def check_condition1_sufficient(q: TorusQuiver, contracted: Iterable[str]) -> str:
    """Q 没有环，且每个被收缩的箭头有一个端点的入度和出度都为 1"""
    if any(arrow.is_loop for arrow in q.arrows):
        return NOT_APPLICABLE
    for arrow_id in sorted(contracted):
        arrow = q.arrow(arrow_id)
        if not any(len(q.in_arrows(v)) == 1 and len(q.out_arrows(v)) == 1 for v in (arrow.tail, arrow.head)):
            return NOT_APPLICABLE
    return HOLDS


def induced_labeling(cmap: ContractionMap, lab_prime: Labeling) -> Labeling:
    """τ̄(a) := τ̄′(ψ(a))，被收缩的箭头标为 1"""
    labels = {}
    for arrow_id in cmap.source.arrow_ids:
        if arrow_id in cmap.contracted:
            labels[arrow_id] = lab_prime.unit
        else:
            labels[arrow_id] = lab_prime.label(cmap.arrow_image[arrow_id])
    return build_labeling(cmap.source, lab_prime.variables, labels)


def pushforward_labeling(cmap: ContractionMap, lab: Labeling) -> Labeling:
    """induced_labeling 的逆：要求被收缩的箭头标为 1"""
    for arrow_id in sorted(cmap.contracted):
        if any(lab.label(arrow_id)):
            raise LabelingError(f"被收缩的箭头 {arrow_id} 的标注必须是 1")
    labels = {cmap.arrow_image[a]: lab.label(a) for a in cmap.source.arrow_ids if a not in cmap.contracted}
    return build_labeling(cmap.target, lab.variables, labels)


@dataclass
class Witness:
    vertex: str
    word: Word
    image: Monomial
    homology: Vector


@dataclass
class Condition2Report:
    verdicts: Dict[str, str]
    len_bound: int
    witnesses: List[Witness] = field(default_factory=list)
    failing_generator: Optional[Monomial] = None
    reason: str = ""
    excluded_direction: Optional[Vector] = None

    @property
    def verdict(self) -> str:
        values = set(self.verdicts.values())
        return values.pop() if len(values) == 1 else INCONCLUSIVE


@dataclass
class AdequacyReport:
    condition1_sufficient: str
    condition2: Condition2Report


def _support(m: Monomial) -> FrozenSet[int]:
    return frozenset(i for i, e in enumerate(m) if e)


def _primitive(h: Vector) -> bool:
    return h != ZERO and gcd(abs(h[0]), abs(h[1])) == 1


class WitnessFan:
    """σ-free 见证圈按同调射线分组；相邻射线 det = 1 且联合支撑不含 σ 的全部变量时连边"""

    def __init__(self, sigma: Monomial):
        self.sigma_support = _support(sigma)
        self.rays: Dict[Vector, Dict[str, List[Witness]]] = {}

    def add(self, witness: Witness) -> bool:
        per_vertex = self.rays.setdefault(witness.homology, {}).setdefault(witness.vertex, [])
        if len(per_vertex) >= MAX_WITNESSES_PER_RAY:
            return False
        if any(w.image == witness.image for w in per_vertex):
            return False
        per_vertex.append(witness)
        return True

    def _compatible(self, r: Vector, s: Vector) -> Optional[Tuple[Witness, Witness]]:
        for vertex in sorted(set(self.rays[r]) & set(self.rays[s])):
            for a in self.rays[r][vertex]:
                for b in self.rays[s][vertex]:
                    if not self.sigma_support <= (_support(a.image) | _support(b.image)):
                        return a, b
        return None

    def covering_cycle(self) -> Optional[List[Witness]]:
        graph = nx.DiGraph()
        rays = sorted(self.rays)
        for r in rays:
            for s in rays:
                if r[0] * s[1] - r[1] * s[0] != 1:
                    continue
                pair = self._compatible(r, s)
                if pair is not None:
                    graph.add_edge(r, s, pair=pair)
        try:
            cycle = nx.find_cycle(graph)
        except nx.NetworkXNoCycle:
            return None
        used: List[Witness] = []
        for r, s in cycle:
            for w in graph[r][s]["pair"]:
                if w not in used:
                    used.append(w)
        return used


def sigma_free_witness_fan(q: TorusQuiver, lab: Labeling, len_bound: int) -> Tuple[WitnessFan, Optional[List[Witness]]]:
    """
    逐层枚举 Q 中 σ-free 的圈（任意基点，同调本原），每层之后检查射线图中是否有有向圈。
    状态为 (基点, 顶点, 像, 同调)；像被 σ 整除后不再延伸。
    """
    sigma = lab.sigma
    fan = WitnessFan(sigma)
    frontier = []
    seen = set()
    for start in sorted(q.vertices):
        state = (start, start, lab.unit, ZERO)
        seen.add(state)
        frontier.append((state, ()))

    for _ in range(len_bound):
        added = False
        next_frontier = []
        for (start, current, image, hom), word in frontier:
            for arrow in q.out_arrows(current):
                new_image = mono_mul(image, lab.label(arrow.id))
                if mono_divides(sigma, new_image):
                    continue
                new_hom = add_vectors(hom, arrow.offset)
                state = (start, arrow.head, new_image, new_hom)
                if state in seen:
                    continue
                seen.add(state)
                new_word = word + (arrow.id,)
                if arrow.head == start and _primitive(new_hom):
                    added |= fan.add(Witness(start, new_word, new_image, new_hom))
                next_frontier.append((state, new_word))
        frontier = next_frontier
        if added:
            cycle = fan.covering_cycle()
            if cycle is not None:
                return fan, cycle
        if not frontier:
            break
    return fan, None


def _det(u: Vector, v: Vector) -> int:
    return u[0] * v[1] - u[1] * v[0]


def _in_cone(h: Vector, generators: Sequence[Vector]) -> bool:
    """h 是否是 generators 的非负整系数组合的方向（平面锥只需逐对检查）"""
    for g in generators:
        if _det(h, g) == 0 and h[0] * g[0] + h[1] * g[1] > 0:
            return True
    for g1, g2 in combinations(generators, 2):
        d = _det(g1, g2)
        if d != 0 and _det(h, g2) * d >= 0 and _det(g1, h) * d >= 0:
            return True
    return False


def _direction(h: Vector) -> Vector:
    k = gcd(abs(h[0]), abs(h[1]))
    return h[0] // k, h[1] // k


def sigma_free_cones(q: TorusQuiver, lab: Labeling, vertex: Optional[str] = None) -> Dict[str, List[Vector]]:
    """
    σ 的每个变量 x 给出一个锥：像不含 x 的圈只走标注不含 x 的箭头，
    其同调是这个子箭图中简单圈同调的非负组合。σ 中指数大于 1 的变量取整个箭图。
    任何 σ-free 圈的同调都落在某个锥里；给定 vertex 时只看它所在的强连通分支。
    """
    cones: Dict[str, List[Vector]] = {}
    for index, exponent in enumerate(lab.sigma):
        if not exponent:
            continue
        graph = nx.DiGraph()
        graph.add_nodes_from(q.vertices)
        for arrow in q.arrows:
            if exponent == 1 and lab.label(arrow.id)[index]:
                continue
            if graph.has_edge(arrow.tail, arrow.head):
                graph[arrow.tail][arrow.head]["offsets"].add(arrow.offset)
            else:
                graph.add_edge(arrow.tail, arrow.head, offsets={arrow.offset})
        if vertex is not None:
            component = next(c for c in nx.strongly_connected_components(graph) if vertex in c)
            graph = graph.subgraph(component)
        rays = set()
        for cycle in nx.simple_cycles(graph):
            steps = [graph[u][v]["offsets"] for u, v in zip(cycle, cycle[1:] + cycle[:1])]
            for choice in product(*steps):
                h = reduce(add_vectors, choice, ZERO)
                if h != ZERO:
                    rays.add(_direction(h))
        cones[lab.variables[index]] = sorted(rays)
    return cones


def direction_reachable(h: Vector, cones: Dict[str, List[Vector]]) -> bool:
    return any(_in_cone(h, generators) for generators in cones.values())


def uncovered_direction(cones: Dict[str, List[Vector]]) -> Optional[Vector]:
    """锥的并不是整个平面时返回空隙中的一个方向；相邻射线之间的空隙只需检查一个方向"""
    rays = sorted({g for generators in cones.values() for g in generators}, key=lambda v: atan2(v[1], v[0]))
    if not rays:
        return 1, 0
    for i, r in enumerate(rays):
        s = rays[(i + 1) % len(rays)]
        sample = add_vectors(r, s) if _det(r, s) > 0 else (-r[1], r[0])
        if not direction_reachable(sample, cones):
            return _direction(sample)
    return None


def check_condition2(cmap: ContractionMap, lab_prime: Labeling,
                     len_bound: int = DEFAULT_LEN_BOUND) -> Condition2Report:
    """
    条件 2 的判定。条件只约束圈的位移 j - i，不约束圈的基点，
    所以见证圈可以在 Q 的任意顶点，所有顶点给出同一个结论。

    verified：σ-free 见证圈的同调射线构成绕原点一周的 det = 1 有向圈，
    相邻两条射线在同一顶点处有见证且像的联合支撑缺少 σ 的某个变量，
    于是任意格向量都由某个 σ-free 圈实现。
    failed：某个方向不在任何 σ-free 锥中（与 len_bound 无关的精确证明），
    优先报告 S' 中同调落在该方向上的生成元。
    其余情形为 inconclusive。

    见证圈是 Q 中的圈，可以经过被收缩的箭头；它们的 ψ 像都是 Q' 中的圈。
    """
    lab = induced_labeling(cmap, lab_prime)
    target_vertices = sorted(cmap.target.vertices)

    fan, cycle = sigma_free_witness_fan(cmap.source, lab, len_bound)
    if cycle is not None:
        logger.info(f"✅ 条件 2 成立，使用 {len(cycle)} 个见证圈")
        return Condition2Report({v: VERIFIED for v in target_vertices}, len_bound, cycle,
                                reason="σ-free 见证圈（基点不限）覆盖所有格方向")

    cones = sigma_free_cones(cmap.source, lab)
    S_prime = compute_S(cmap.target, lab_prime, len_bound)
    for g in S_prime.generators:
        realized = find_cycle_with_image(cmap.target, lab_prime, g)
        if realized is None:
            continue
        homology = word_homology(cmap.target, realized)
        if not direction_reachable(homology, cones):
            logger.info(f"❌ 条件 2 不成立: {lab_prime.format(g)} 方向 {homology} 没有 σ-free 圈")
            return Condition2Report({v: FAILED for v in target_vertices}, len_bound, [], g,
                                    reason=f"S' 的生成元 {lab_prime.format(g)} 的同调 {homology} 不能由 σ-free 圈实现",
                                    excluded_direction=homology)

    direction = uncovered_direction(cones)
    if direction is not None:
        logger.info(f"❌ 条件 2 不成立: 方向 {direction} 没有 σ-free 圈")
        return Condition2Report({v: FAILED for v in target_vertices}, len_bound,
                                reason=f"同调方向 {direction} 不能由 σ-free 圈实现",
                                excluded_direction=direction)

    logger.warning(f"⚠️ 条件 2 在 len_bound={len_bound} 下无法判定")
    return Condition2Report({v: INCONCLUSIVE for v in target_vertices}, len_bound,
                            reason="见证圈不足以覆盖所有格方向")


def check_adequacy(cmap: ContractionMap, lab_prime: Labeling, len_bound: int = DEFAULT_LEN_BOUND) -> AdequacyReport:
    return AdequacyReport(check_condition1_sufficient(cmap.source, cmap.contracted),
                          check_condition2(cmap, lab_prime, len_bound))

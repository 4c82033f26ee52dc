#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
重写引擎测试
超势关系、等价判定（与暴力连通分量对照）、可消性反例搜索、单位圈
"""

import random
from collections import defaultdict
from itertools import combinations
from pathlib import Path

import networkx as nx
import pytest

from rewrite_engine import (
    BUDGET_EXCEEDED, COUNTEREXAMPLE, EQUIVALENT, INEQUIVALENT, NO_COUNTEREXAMPLE, ClassIndex,
    EquivClassQuery, ReducedClassIndex, RewriteSystem, cancellativity_search, check_unit_cycle_centrality,
    check_unit_cycles_equivalent, class_index_for, paths_equivalent, superpotential_relations,
    two_cycle_elimination, unit_cycle_at, words_equivalent,
)
from impression import tau_word
from tiling_core import enumerate_paths, make_path, word_homology
from tiling_parser import parse

DATA = Path(__file__).parent / "data"
TILINGS = sorted(p.stem for p in DATA.glob("*.tiling"))


def load(name):
    return parse((DATA / f"{name}.tiling").read_text(encoding="utf-8"))


def system_for(name):
    q = load(name).quiver
    rels = superpotential_relations(q)
    return q, rels, RewriteSystem(q, rels)


def random_path(q, rng, length):
    arrow = q.arrow(rng.choice(q.arrow_ids))
    word = [arrow.id]
    while len(word) < length:
        arrow = rng.choice(q.out_arrows(arrow.head))
        word.append(arrow.id)
    return tuple(word)


def test_conifold_relations():
    """conifold 每个箭头一条关系"""
    q, rels, _ = system_for("conifold")
    assert len(rels) == 4
    assert [r.witness for r in rels] == ["a1", "a2", "b1", "b2"]
    a1 = rels[0]
    assert a1.left == ("b1", "a2", "b2")
    assert a1.right == ("b2", "a2", "b1")


@pytest.mark.parametrize("name", TILINGS)
def test_relations_preserve_lifted_endpoints(name):
    q, rels, _ = system_for(name)
    for rel in rels:
        left, right = make_path(q, rel.left), make_path(q, rel.right)
        assert (left.tail, left.head, left.homology) == (right.tail, right.head, right.homology)


@pytest.mark.parametrize("name", ["conifold", "c3", "conifold_triangles", "conifold_hexagons"])
def test_relations_preserve_length_on_uniform_faces(name):
    _, rels, system = system_for(name)
    assert all(len(r.left) == len(r.right) for r in rels)
    assert system.length_preserving


def test_contracted_faces_give_length_changing_relations():
    _, rels, system = system_for("conifold_triangles_contracted")
    assert not system.length_preserving
    assert any(len(r.left) != len(r.right) for r in rels)


def test_equivalence_basic_verdicts():
    q, rels, system = system_for("conifold")
    assert words_equivalent(q, system, ["b1", "a2", "b2"], ["b2", "a2", "b1"]) == EQUIVALENT
    assert words_equivalent(q, system, ["a1", "b1"], ["a1", "b1"]) == EQUIVALENT
    assert words_equivalent(q, system, ["b1"], ["b2"]) == INEQUIVALENT
    query = EquivClassQuery(make_path(q, ["a1"]), make_path(q, ["a1", "b1", "a1"]))
    assert paths_equivalent(q, rels, query) == INEQUIVALENT


def test_budget_exceeded_is_not_inequivalent():
    """预算耗尽时返回 budget-exceeded"""
    q, rels, _ = system_for("c3")
    p = make_path(q, ["x", "y", "z"])
    r = make_path(q, ["z", "y", "x"])
    assert paths_equivalent(q, rels, EquivClassQuery(p, r, budget=1)) == BUDGET_EXCEEDED
    assert paths_equivalent(q, rels, EquivClassQuery(p, r, budget=100)) == EQUIVALENT
    with pytest.raises(ValueError):
        EquivClassQuery(p, r, budget=0)


def _oracle_components(q, rels, length):
    """暴力：所有长度为 length 的路径上的单步替换图的连通分量"""
    graph = nx.Graph()
    words = list(enumerate_paths(q, length))
    graph.add_nodes_from(words)
    pairs = [(r.left, r.right) for r in rels]
    for word in words:
        for left, right in pairs:
            for src, dst in ((left, right), (right, left)):
                n = len(src)
                for i in range(len(word) - n + 1):
                    if word[i:i + n] == src:
                        graph.add_edge(word, word[:i] + dst + word[i + n:])
    component = {}
    for index, nodes in enumerate(nx.connected_components(graph)):
        for node in nodes:
            component[node] = index
    return words, component


@pytest.mark.parametrize("name,max_len", [("conifold", 6), ("c3", 6)])
def test_equivalence_matches_bruteforce(name, max_len):
    """与暴力连通分量逐对比较"""
    q, rels, system = system_for(name)
    for length in range(1, max_len + 1):
        words, component = _oracle_components(q, rels, length)
        buckets = defaultdict(list)
        for word in words:
            path = make_path(q, word)
            buckets[(path.tail, path.head, path.homology)].append(word)
        for bucket in buckets.values():
            for left, right in combinations(bucket, 2):
                expected = EQUIVALENT if component[left] == component[right] else INEQUIVALENT
                assert words_equivalent(q, system, left, right) == expected


@pytest.mark.parametrize("name", ["conifold", "c3", "conifold_triangles", "conifold_triangles_contracted"])
def test_rewrite_steps_preserve_endpoints(name):
    """随机路径的每一步替换都保持提升端点"""
    q, _, system = system_for(name)
    rng = random.Random(7)
    for _ in range(1000):
        word = random_path(q, rng, rng.randint(1, 7))
        path = make_path(q, word)
        for neighbor in system.neighbors(word):
            moved = make_path(q, neighbor)
            assert (moved.tail, moved.head, moved.homology) == (path.tail, path.head, path.homology)
            if system.length_preserving:
                assert len(neighbor) == len(word)


@pytest.mark.parametrize("name", ["conifold", "c3", "conifold_triangles", "conifold_hexagons", "veronese",
                                  "four_vertex"])
def test_rewrite_steps_preserve_tau(name):
    """每一步替换两边的 τ 像相同"""
    tf = load(name)
    q, lab = tf.quiver, tf.labeling()
    system = RewriteSystem(q, superpotential_relations(q))
    rng = random.Random(13)
    for _ in range(1000):
        word = random_path(q, rng, rng.randint(1, 7))
        image = tau_word(lab, word)
        for neighbor in system.neighbors(word):
            assert tau_word(lab, neighbor) == image


def test_class_index_representative():
    q, _, system = system_for("c3")
    classes = ClassIndex(system)
    assert classes.class_of(("z", "y", "x")) == ("x", "y", "z")
    assert classes.same_class(("y", "x"), ("x", "y"))
    assert not classes.same_class(("x", "x"), ("x", "y"))


@pytest.mark.parametrize("name,max_len", [("conifold", 8), ("c3", 6)])
def test_cancellative_tilings_have_no_counterexample(name, max_len):
    q, rels, _ = system_for(name)
    result = cancellativity_search(q, rels, max_len)
    assert result.verdict == NO_COUNTEREXAMPLE
    assert result.checked_up_to == max_len
    assert result.summary() == f"no counterexample up to {max_len}"


@pytest.mark.parametrize("name", [
    "conifold_triangles_contracted", "conifold_triangles_reduced", "conifold_hexagons_contracted",
    "veronese_contracted", "four_vertex_contracted", "four_vertex_reduced",
])
def test_contracted_and_reduced_tilings_have_no_counterexample(name):
    """收缩后与删去二圈后的铺砌在长度 8 以内没有反例"""
    q, rels, _ = system_for(name)
    result = cancellativity_search(q, rels, 8)
    assert result.verdict == NO_COUNTEREXAMPLE
    assert result.checked_up_to == 8


@pytest.mark.parametrize("name,expected", [
    ("conifold_triangles_contracted", {"DL": ("L1", "D7"), "UR": ("R1", "U1"),
                                       "DR": ("R1", "D7"), "UL": ("L1", "U1")}),
    ("four_vertex_contracted", {"P": ("g", "h"), "Q": ("e", "f")}),
])
def test_two_cycle_elimination_substitutions(name, expected):
    q = load(name).quiver
    elimination = two_cycle_elimination(q)
    assert elimination.substitutions == expected
    reduced_name = name.replace("_contracted", "_reduced")
    assert elimination.quiver.structure_key() == load(reduced_name).quiver.structure_key()
    for arrow_id, word in expected.items():
        path, image = make_path(q, (arrow_id,)), make_path(elimination.quiver, word)
        assert (path.tail, path.head, path.homology) == (image.tail, image.head, image.homology)


def test_two_cycle_elimination_without_two_cycles():
    q = load("conifold").quiver
    elimination = two_cycle_elimination(q)
    assert elimination.substitutions == {}
    assert elimination.quiver is q
    assert elimination.reduce(("a1", "b1")) == ("a1", "b1")


def test_class_index_uses_reduced_quiver_only_with_two_cycles():
    q, rels, system = system_for("conifold_triangles_contracted")
    classes = class_index_for(q, rels)
    assert isinstance(classes, ReducedClassIndex)
    assert classes.same_class(("DR",), ("R1", "D7"))
    assert classes.same_class(("DR", "UL"), ("R1", "D7", "L1", "U1"))
    assert not classes.same_class(("DR",), ("DL",))
    plain = class_index_for(*system_for("conifold")[:2])
    assert type(plain) is ClassIndex


def test_reduced_classes_agree_with_direct_rewriting():
    """删去二圈后判定的等价与在原箭图中直接重写一致"""
    q, rels, system = system_for("conifold_triangles_contracted")
    classes = class_index_for(q, rels)
    for length in range(1, 4):
        buckets = defaultdict(list)
        for word in enumerate_paths(q, length):
            path = make_path(q, word)
            buckets[(path.tail, path.head, path.homology)].append(word)
        for bucket in buckets.values():
            for left, right in combinations(bucket, 2):
                expected = EQUIVALENT if classes.same_class(left, right) else INEQUIVALENT
                assert words_equivalent(q, system, left, right) == expected


    assert result.summary() == f"no counterexample up to {max_len}"


def _certify(q, rels, ce):
    system = RewriteSystem(q, rels)
    if ce.side == "right":
        left, right = ce.p + (ce.arrow,), ce.q + (ce.arrow,)
    else:
        left, right = (ce.arrow,) + ce.p, (ce.arrow,) + ce.q
    assert words_equivalent(q, system, left, right) == EQUIVALENT
    assert words_equivalent(q, system, ce.p, ce.q) == INEQUIVALENT


def test_triangles_counterexample_is_certified():
    """三角形铺砌在长度 2 处出现反例，且反例可被独立验证"""
    q, rels, system = system_for("conifold_triangles")
    result = cancellativity_search(q, rels, 4)
    assert result.verdict == COUNTEREXAMPLE
    assert result.checked_up_to == 2
    _certify(q, rels, result.counterexample)
    assert result.summary().startswith("counterexample p = ")

    assert words_equivalent(q, system, ["DR", "DL"], ["DL", "DR"]) == INEQUIVALENT
    assert words_equivalent(q, system, ["DR", "DL", "delta"], ["DL", "DR", "delta"]) == EQUIVALENT


def test_hexagons_counterexample_is_minimal():
    q, rels, _ = system_for("conifold_hexagons")
    result = cancellativity_search(q, rels, 6)
    assert result.verdict == COUNTEREXAMPLE
    assert result.checked_up_to == 4
    ce = result.counterexample
    assert ce.p == ("L", "D1b", "D2", "R")
    assert ce.q == ("R", "D1b", "D2", "L")
    assert ce.arrow == "U1"
    assert ce.side == "right"
    _certify(q, rels, ce)


def test_cancellativity_rejects_bad_max_len():
    q, rels, _ = system_for("conifold")
    with pytest.raises(ValueError):
        cancellativity_search(q, rels, 0)


def test_unit_cycle_is_least_rotation():
    q = load("conifold").quiver
    assert unit_cycle_at(q, "1").arrows == ("a1", "b1", "a2", "b2")
    assert unit_cycle_at(q, "2").arrows == ("b1", "a1", "b2", "a2")


@pytest.mark.parametrize("name", TILINGS)
def test_unit_cycles_commute_with_every_arrow(name):
    """a·u ≡ u·a 对所有箭头成立，且同一顶点上的单位圈两两等价"""
    q, rels, _ = system_for(name)
    verdicts = check_unit_cycle_centrality(q, rels)
    assert set(verdicts) == set(q.arrow_ids)
    assert all(v == EQUIVALENT for v in verdicts.values())
    for vertex in q.vertices:
        assert check_unit_cycles_equivalent(q, rels, vertex) == EQUIVALENT


def test_relation_sides_share_homology_in_system():
    q, rels, system = system_for("four_vertex")
    for word, targets in system.rules.items():
        for target in targets:
            assert word_homology(q, word) == word_homology(q, target)

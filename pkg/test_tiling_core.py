#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
环面箭图模块测试
校验四条不变量、提升端点与同调、重新编号的不变性
"""

import random
from pathlib import Path

import pytest

from tiling_core import (
    Arrow, CompositionError, Face, MalformedInputError, PathWord, TorusQuiver, enumerate_paths,
    lift_endpoints, make_path, rename, validate_tiling, word_homology,
)
from tiling_parser import parse

DATA = Path(__file__).parent / "data"
TILINGS = sorted(p.stem for p in DATA.glob("*.tiling"))


def load(name):
    return parse((DATA / f"{name}.tiling").read_text(encoding="utf-8"))


def conifold(b1_offset=(0, -1), with_negative_face=True):
    arrows = (
        Arrow("a1", "1", "2", (0, 0)),
        Arrow("a2", "1", "2", (1, 1)),
        Arrow("b1", "2", "1", b1_offset),
        Arrow("b2", "2", "1", (-1, 0)),
    )
    faces = [Face(1, ("a1", "b1", "a2", "b2"))]
    if with_negative_face:
        faces.append(Face(-1, ("a1", "b2", "a2", "b1")))
    return TorusQuiver(("1", "2"), arrows, tuple(faces), name="conifold")


def random_path(q, rng, length):
    arrow = q.arrow(rng.choice(q.arrow_ids))
    word = [arrow.id]
    while len(word) < length:
        arrow = rng.choice(q.out_arrows(arrow.head))
        word.append(arrow.id)
    return tuple(word)


def test_conifold_validates():
    """conifold 满足全部不变量"""
    report = validate_tiling(conifold())
    assert report.ok
    assert report.violations == []


def test_missing_face_breaks_euler_and_two_faces():
    report = validate_tiling(conifold(with_negative_face=False))
    assert not report.ok
    assert "euler" in report.invariants()
    assert "two-faces" in report.invariants()


def test_bad_offset_breaks_face_sum():
    report = validate_tiling(conifold(b1_offset=(0, 0)))
    assert not report.ok
    assert report.invariants() == ["face-sum-zero"]
    assert any("b1" in v.detail or "#0" in v.detail for v in report.violations)


def test_dangling_ids_are_malformed_input():
    with pytest.raises(MalformedInputError):
        TorusQuiver(("1",), (Arrow("a", "1", "9"),), ())
    with pytest.raises(MalformedInputError):
        TorusQuiver(("1",), (Arrow("a", "1", "1"),), (Face(1, ("a", "zz")),))
    with pytest.raises(MalformedInputError):
        TorusQuiver(("1", "1"), (), ())


def test_single_face_cycle_too_short():
    q = TorusQuiver(("v",), (Arrow("x", "v", "v"),), (Face(1, ("x",)), Face(-1, ("x",))))
    report = validate_tiling(q)
    assert "closed-cycle" in report.invariants()


def test_lift_endpoints_examples():
    q = conifold()
    assert lift_endpoints(q, make_path(q, ["a1", "b1"])) == ("1", "1", (0, -1))
    assert lift_endpoints(q, make_path(q, ["a1", "b1", "a2", "b2"])) == ("1", "1", (0, 0))
    empty = make_path(q, [], base="2")
    assert lift_endpoints(q, empty) == ("2", "2", (0, 0))
    assert str(empty) == "e_2"


def test_non_composable_sequence():
    q = conifold()
    with pytest.raises(CompositionError):
        make_path(q, ["a1", "a2"])
    with pytest.raises(CompositionError):
        make_path(q, [])
    with pytest.raises(CompositionError):
        lift_endpoints(q, PathWord(("a1", "a2"), "1", "2", (1, 1)))


@pytest.mark.parametrize("name", TILINGS)
def test_data_tilings_validate(name):
    """data 目录下的每个铺砌都通过校验"""
    assert validate_tiling(load(name).quiver).ok


@pytest.mark.parametrize("name", TILINGS)
def test_unit_cycles_are_closed_from_every_start(name):
    q = load(name).quiver
    for face in q.faces:
        for rotation in face.rotations():
            path = make_path(q, rotation)
            assert path.tail == path.head
            assert path.homology == (0, 0)


@pytest.mark.parametrize("name", ["conifold", "c3", "conifold_triangles", "four_vertex", "veronese"])
def test_homology_is_additive(name):
    """homology(pq) = homology(p) + homology(q)"""
    q = load(name).quiver
    rng = random.Random(20240611)
    for _ in range(1000):
        p = random_path(q, rng, rng.randint(1, 6))
        r = [rng.choice(q.out_arrows(q.arrow(p[-1]).head)).id]
        r_len = rng.randint(1, 6)
        while len(r) < r_len:
            r.append(rng.choice(q.out_arrows(q.arrow(r[-1]).head)).id)
        hp, hr = word_homology(q, p), word_homology(q, r)
        assert make_path(q, p + tuple(r)).homology == (hp[0] + hr[0], hp[1] + hr[1])


def test_enumerate_paths_order_and_count():
    q = conifold()
    words = list(enumerate_paths(q, 2))
    assert len(words) == 8
    assert words == sorted(words)
    assert words[0] == ("a1", "b1")
    assert list(enumerate_paths(q, 1, tail="2")) == [("b1",), ("b2",)]
    assert list(enumerate_paths(q, 0)) == []


def test_renaming_keeps_verdict_and_faces():
    q = load("conifold_triangles").quiver
    vertex_map = {"v1": "p", "v2": "q", "v3": "r"}
    arrow_map = {a: f"arrow_{i}" for i, a in enumerate(reversed(q.arrow_ids))}
    renamed = rename(q, vertex_map, arrow_map)
    assert validate_tiling(renamed).ok == validate_tiling(q).ok
    assert sorted(len(f.boundary) for f in renamed.faces) == sorted(len(f.boundary) for f in q.faces)

    broken = TorusQuiver(q.vertices, q.arrows, q.faces[1:], name="broken")
    renamed_broken = rename(broken, vertex_map, arrow_map)
    assert validate_tiling(renamed_broken).invariants() == validate_tiling(broken).invariants()
